use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};

use super::{BrowserId, HubError, ViewClass};
use crate::repkit::ReprId;

pub const SELECTION_TOPIC: &str = "selection";
pub const VISIBILITY_TOPIC: &str = "visibility";
pub const CONFIG_TOPIC: &str = "config";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObserverId(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// The selection after an update.
    Selection {
        source: Option<BrowserId>,
        ids: BTreeSet<ReprId>,
    },
    Visibility {
        path: String,
        view: ViewClass,
        self_visible: bool,
        descendants_visible: bool,
    },
    Config {
        key: String,
        value: String,
    },
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub topic: String,
    pub payload: Payload,
}

/// Messages posted by an observer; they are queued behind the current
/// delivery.
#[derive(Debug, Default)]
pub struct Outbox {
    posted: Vec<Message>,
}

impl Outbox {
    pub fn post(&mut self, topic: impl Into<String>, payload: Payload) {
        self.posted.push(Message {
            topic: topic.into(),
            payload,
        });
    }
}

type ObserverFn = Box<dyn FnMut(&Message, &mut Outbox) -> Result<(), String>>;

struct Observer {
    id: ObserverId,
    name: String,
    callback: ObserverFn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverError {
    pub observer: ObserverId,
    pub name: String,
    pub topic: String,
    pub reason: String,
}

/// One observer invocation, in the order it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    /// Index of the message within the broadcast (0 is the original).
    pub message: usize,
    pub topic: String,
    pub observer: ObserverId,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BroadcastReport {
    /// Successful deliveries of the original message.
    pub delivered: usize,
    /// Every invocation, including queued follow-up messages.
    pub transcript: Vec<Delivery>,
    pub errors: Vec<ObserverError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    Replace,
    Add,
    Toggle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionEvent {
    pub source: Option<BrowserId>,
    pub ids: BTreeSet<ReprId>,
    pub mode: SelectionMode,
}

impl SelectionEvent {
    pub fn new(source: Option<BrowserId>, ids: impl IntoIterator<Item = ReprId>, mode: SelectionMode) -> Self {
        Self {
            source,
            ids: ids.into_iter().collect(),
            mode,
        }
    }
}

/// Topic-based synchronous delivery plus the session-wide selection.
#[derive(Default)]
pub struct MessageBus {
    topics: BTreeMap<String, Vec<Observer>>,
    selection: BTreeSet<ReprId>,
    next_observer: u32,
}

impl MessageBus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subscribe<F>(&mut self, topic: &str, name: impl Into<String>, callback: F) -> ObserverId
    where
        F: FnMut(&Message, &mut Outbox) -> Result<(), String> + 'static,
    {
        self.next_observer += 1;
        let id = ObserverId(self.next_observer);
        self.topics.entry(topic.to_string()).or_default().push(Observer {
            id,
            name: name.into(),
            callback: Box::new(callback),
        });
        id
    }

    pub fn unsubscribe(&mut self, id: ObserverId) -> bool {
        let mut found = false;
        for list in self.topics.values_mut() {
            let before = list.len();
            list.retain(|o| o.id != id);
            found |= list.len() != before;
        }
        found
    }

    pub fn observer_count(&self, topic: &str) -> usize {
        self.topics.get(topic).map_or(0, Vec::len)
    }

    pub fn selection(&self) -> &BTreeSet<ReprId> {
        &self.selection
    }

    /// Delivers to the topic's observers in registration order. Messages
    /// posted during delivery run afterwards, first in first out.
    pub fn broadcast(&mut self, topic: &str, payload: Payload) -> BroadcastReport {
        let mut report = BroadcastReport::default();
        let mut queue = VecDeque::from([Message {
            topic: topic.to_string(),
            payload,
        }]);
        let mut index = 0;
        while let Some(message) = queue.pop_front() {
            if let Some(observers) = self.topics.get_mut(&message.topic) {
                for observer in observers.iter_mut() {
                    let mut outbox = Outbox::default();
                    report.transcript.push(Delivery {
                        message: index,
                        topic: message.topic.clone(),
                        observer: observer.id,
                    });
                    let outcome = catch_unwind(AssertUnwindSafe(|| (observer.callback)(&message, &mut outbox)));
                    let failure = match outcome {
                        Ok(Ok(())) => None,
                        Ok(Err(reason)) => Some(reason),
                        Err(panic) => Some(
                            panic
                                .downcast_ref::<&str>()
                                .map(|s| s.to_string())
                                .or_else(|| panic.downcast_ref::<String>().cloned())
                                .unwrap_or_else(|| "observer panicked".into()),
                        ),
                    };
                    match failure {
                        None if index == 0 => report.delivered += 1,
                        None => {}
                        Some(reason) => report.errors.push(ObserverError {
                            observer: observer.id,
                            name: observer.name.clone(),
                            topic: message.topic.clone(),
                            reason,
                        }),
                    }
                    queue.extend(outbox.posted);
                }
            }
            index += 1;
        }
        report
    }

    /// Updates the shared selection and announces it on the selection topic.
    pub fn select(&mut self, event: SelectionEvent) -> Result<BroadcastReport, HubError> {
        match event.mode {
            SelectionMode::Replace => self.selection = event.ids.clone(),
            SelectionMode::Add | SelectionMode::Toggle if event.ids.is_empty() => {
                return Err(HubError::EmptySelection(if event.mode == SelectionMode::Add {
                    "add"
                } else {
                    "toggle"
                }))
            }
            SelectionMode::Add => self.selection.extend(event.ids.iter().copied()),
            SelectionMode::Toggle => {
                for id in &event.ids {
                    if !self.selection.remove(id) {
                        self.selection.insert(*id);
                    }
                }
            }
        }
        let payload = Payload::Selection {
            source: event.source,
            ids: self.selection.clone(),
        };
        Ok(self.broadcast(SELECTION_TOPIC, payload))
    }
}
