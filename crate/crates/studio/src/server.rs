//! TCP front end. Connections, readers and the event producer run on their
//! own threads and only submit actions; the studio itself is touched by the
//! control loop alone.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Sender};
use std::sync::Arc;
use std::thread;

use serde_json::Value;

use crate::app::{Studio, StudioError};
use crate::control::{ControlLoop, Flow, Submitter, QUEUE_CAPACITY};
use crate::event::{EventError, EventRecord};
use crate::protocol::{self, CommandError, Notice};

pub type ClientId = u64;

pub enum Action {
    Connected {
        client: ClientId,
        outbox: Sender<String>,
        stream: TcpStream,
    },
    Line {
        client: ClientId,
        text: String,
    },
    Disconnected {
        client: ClientId,
    },
    EventReady {
        client: ClientId,
        id: Value,
        result: Result<EventRecord, EventError>,
    },
    Shutdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ServeStats {
    pub actions: usize,
    pub clients: usize,
}

pub struct Server {
    listener: TcpListener,
    addr: SocketAddr,
}

struct Client {
    outbox: Sender<String>,
    stream: TcpStream,
}

impl Server {
    pub fn bind(addr: &str) -> Result<Self, StudioError> {
        let listener = TcpListener::bind(addr).map_err(|e| StudioError::Io(format!("cannot listen on {addr}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| StudioError::Io(e.to_string()))?;
        Ok(Self { listener, addr })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Serves until a client sends `shutdown`. The studio's event source
    /// moves to the producer thread for the duration.
    pub fn run(self, studio: &mut Studio) -> Result<ServeStats, StudioError> {
        let ctl = ControlLoop::<Action>::new(QUEUE_CAPACITY);
        let stop = Arc::new(AtomicBool::new(false));
        spawn_acceptor(self.listener, ctl.submitter(), stop.clone());

        let producer = studio.take_source().map(|mut source| {
            let (tx, rx) = mpsc::channel::<(ClientId, Value)>();
            let submit = ctl.submitter();
            thread::spawn(move || {
                for (client, id) in rx {
                    let result = source.next_event();
                    if submit.submit(Action::EventReady { client, id, result }).is_err() {
                        break;
                    }
                }
            });
            tx
        });

        // nobody was connected to hear about startup changes
        let _ = protocol::follow_ups(studio);
        let mut clients: BTreeMap<ClientId, Client> = BTreeMap::new();
        let mut seen = 0;
        let actions = ctl.run(|action| match action {
            Action::Connected { client, outbox, stream } => {
                let _ = outbox.send(Notice::hello().to_line());
                clients.insert(client, Client { outbox, stream });
                seen += 1;
                Flow::Continue
            }
            Action::Disconnected { client } => {
                clients.remove(&client);
                Flow::Continue
            }
            Action::Shutdown => Flow::Shutdown,
            Action::EventReady { client, id, result } => {
                let reply = match result.map_err(StudioError::from).and_then(|r| studio.materialize(r)) {
                    Ok(event) => Notice::ok(id, protocol::event_summary(studio, event)),
                    Err(e) => Notice::error(id, &CommandError::from(e)),
                };
                send(&clients, client, &reply);
                broadcast(&clients, &protocol::follow_ups(studio));
                Flow::Continue
            }
            Action::Line { client, text } => {
                let cmd = match protocol::parse_line(&text) {
                    Ok(cmd) => cmd,
                    Err((id, e)) => {
                        send(&clients, client, &Notice::error(id, &e));
                        return Flow::Continue;
                    }
                };
                match (cmd.cmd.as_str(), &producer) {
                    ("shutdown", _) => {
                        send(&clients, client, &Notice::ok(cmd.id, Value::Null));
                        return Flow::Shutdown;
                    }
                    ("nextEvent", Some(tx)) => {
                        if tx.send((client, cmd.id.clone())).is_err() {
                            let e = CommandError::Failed("event producer stopped".into());
                            send(&clients, client, &Notice::error(cmd.id, &e));
                        }
                        return Flow::Continue;
                    }
                    _ => {}
                }
                let reply = protocol::reply_notice(cmd.id.clone(), protocol::execute(studio, &cmd));
                send(&clients, client, &reply);
                broadcast(&clients, &protocol::follow_ups(studio));
                Flow::Continue
            }
        });

        stop.store(true, Ordering::SeqCst);
        // wake the acceptor so it sees the flag
        let _ = TcpStream::connect(self.addr);
        for c in clients.values() {
            let _ = c.stream.shutdown(Shutdown::Read);
        }
        Ok(ServeStats { actions, clients: seen })
    }
}

fn send(clients: &BTreeMap<ClientId, Client>, client: ClientId, notice: &Notice) {
    if let Some(c) = clients.get(&client) {
        let _ = c.outbox.send(notice.to_line());
    }
}

fn broadcast(clients: &BTreeMap<ClientId, Client>, notices: &[Notice]) {
    for n in notices {
        let line = n.to_line();
        for c in clients.values() {
            let _ = c.outbox.send(line.clone());
        }
    }
}

fn spawn_acceptor(listener: TcpListener, submit: Submitter<Action>, stop: Arc<AtomicBool>) {
    thread::spawn(move || {
        let mut next: ClientId = 0;
        for stream in listener.incoming() {
            if stop.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            next += 1;
            if start_client(next, stream, &submit).is_err() {
                break;
            }
        }
    });
}

fn start_client(client: ClientId, stream: TcpStream, submit: &Submitter<Action>) -> Result<(), ()> {
    let _ = stream.set_nodelay(true);
    let (Ok(reader), Ok(mut writer), Ok(control)) = (stream.try_clone(), stream.try_clone(), stream.try_clone()) else {
        return Ok(());
    };
    let (outbox, lines) = mpsc::channel::<String>();
    thread::spawn(move || {
        for line in lines {
            if writer.write_all(line.as_bytes()).and_then(|_| writer.write_all(b"\n")).is_err() {
                break;
            }
        }
        let _ = writer.shutdown(Shutdown::Write);
    });
    // connect before any line from this client can be queued
    submit
        .submit(Action::Connected {
            client,
            outbox,
            stream: control,
        })
        .map_err(|_| ())?;
    let submit = submit.clone();
    thread::spawn(move || {
        let mut reader = BufReader::new(reader);
        let mut buf = Vec::new();
        loop {
            buf.clear();
            match reader.read_until(b'\n', &mut buf) {
                Ok(0) | Err(_) => break,
                Ok(_) => {
                    let text = String::from_utf8_lossy(&buf).trim().to_string();
                    if text.is_empty() {
                        continue;
                    }
                    if submit.submit(Action::Line { client, text }).is_err() {
                        return;
                    }
                }
            }
        }
        let _ = submit.submit(Action::Disconnected { client });
    });
    Ok(())
}
