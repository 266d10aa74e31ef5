//! The single-consumer action queue behind the control loop.
//!
//! Any thread may submit; only the loop's thread runs actions, one at a time
//! and in submission order. The queue is bounded, so producers block when
//! the loop falls behind.

use std::sync::mpsc::{sync_channel, Receiver, SyncSender, TrySendError};

pub const QUEUE_CAPACITY: usize = 1024;

/// What the loop should do after an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    /// Run what is already queued, then stop.
    Shutdown,
}

/// Cloneable handle for submitting actions.
pub struct Submitter<T> {
    tx: SyncSender<T>,
}

impl<T> Clone for Submitter<T> {
    fn clone(&self) -> Self {
        Self { tx: self.tx.clone() }
    }
}

impl<T> Submitter<T> {
    /// Blocks while the queue is full. Fails once the loop is gone.
    pub fn submit(&self, action: T) -> Result<(), T> {
        self.tx.send(action).map_err(|e| e.0)
    }

    /// Fails instead of blocking when the queue is full.
    pub fn try_submit(&self, action: T) -> Result<(), T> {
        self.tx.try_send(action).map_err(|e| match e {
            TrySendError::Full(a) | TrySendError::Disconnected(a) => a,
        })
    }
}

pub struct ControlLoop<T> {
    rx: Receiver<T>,
    tx: Option<SyncSender<T>>,
}

impl<T> ControlLoop<T> {
    pub fn new(capacity: usize) -> Self {
        let (tx, rx) = sync_channel(capacity);
        Self { rx, tx: Some(tx) }
    }

    pub fn submitter(&self) -> Submitter<T> {
        Submitter {
            tx: self.tx.clone().expect("loop not started"),
        }
    }

    /// Runs actions until one asks for shutdown or every submitter is
    /// dropped. Returns the number of actions run.
    pub fn run(mut self, mut step: impl FnMut(T) -> Flow) -> usize {
        // the loop keeps no sender of its own, so it ends when producers do
        self.tx = None;
        let mut count = 0;
        while let Ok(action) = self.rx.recv() {
            count += 1;
            if step(action) == Flow::Shutdown {
                while let Ok(rest) = self.rx.try_recv() {
                    count += 1;
                    step(rest);
                }
                break;
            }
        }
        count
    }
}
