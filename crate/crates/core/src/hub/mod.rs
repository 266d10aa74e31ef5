//! Sites and browsers, the twig visibility tree and the message bus that
//! keeps browsers in step.

mod browser;
mod bus;
mod site;
mod twig;

use thiserror::Error;

pub use browser::{attach_browser, Browser, BrowserId, BrowserKind};
pub use bus::{
    BroadcastReport, Delivery, Message, MessageBus, ObserverError, ObserverId, Outbox, Payload, SelectionEvent,
    SelectionMode, CONFIG_TOPIC, SELECTION_TOPIC, VISIBILITY_TOPIC,
};
pub use site::{Site, SiteId, SiteKind, SiteTree};
pub use twig::{set_twig_visibility, Twig, TwigTree, ViewClass, VisFlags};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HubError {
    #[error("hosting violation: {0}")]
    HostingViolation(String),
    #[error("unknown site {0:?}")]
    UnknownSite(SiteId),
    #[error("unknown browser {0:?}")]
    UnknownBrowser(BrowserId),
    #[error("unknown twig path {0:?}")]
    UnknownPath(String),
    #[error("twig {0:?} already exists")]
    DuplicatePath(String),
    #[error("invalid twig name {0:?}")]
    BadName(String),
    #[error("{0} selection needs at least one id")]
    EmptySelection(&'static str),
    #[error("unknown view class {0:?}")]
    UnknownViewClass(String),
    #[error("site tree audit failed: {0}")]
    Audit(String),
}
