use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use super::{MessageBus, ObserverId, Payload, TwigTree, SELECTION_TOPIC};
use crate::repkit::{ModelId, RepContent, RepId, RepKit, ReprId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BrowserId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BrowserKind {
    View3d,
    View2d,
    Twig,
    Text,
    Background,
}

impl BrowserKind {
    pub fn name(self) -> &'static str {
        match self {
            BrowserKind::View3d => "view3d",
            BrowserKind::View2d => "view2d",
            BrowserKind::Twig => "twig",
            BrowserKind::Text => "text",
            BrowserKind::Background => "background",
        }
    }
}

impl fmt::Display for BrowserKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BrowserKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            BrowserKind::View3d,
            BrowserKind::View2d,
            BrowserKind::Twig,
            BrowserKind::Text,
            BrowserKind::Background,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown browser kind {s:?}"))
    }
}

/// Per-browser view of the shared selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Browser {
    pub id: BrowserId,
    pub kind: BrowserKind,
    pub model: Option<ModelId>,
    highlighted: BTreeSet<ReprId>,
    highlighted_reps: BTreeSet<RepId>,
    shown: Option<ReprId>,
    text: Option<String>,
}

impl Browser {
    pub fn new(id: BrowserId, kind: BrowserKind, model: Option<ModelId>) -> Self {
        Self {
            id,
            kind,
            model,
            highlighted: BTreeSet::new(),
            highlighted_reps: BTreeSet::new(),
            shown: None,
            text: None,
        }
    }

    pub fn highlighted(&self) -> &BTreeSet<ReprId> {
        &self.highlighted
    }

    /// Reps of highlighted objects in this browser's model.
    pub fn highlighted_reps(&self) -> &BTreeSet<RepId> {
        &self.highlighted_reps
    }

    /// Object whose text rep a text browser shows.
    pub fn shown(&self) -> Option<ReprId> {
        self.shown
    }

    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    /// Paths of twigs bound to highlighted objects.
    pub fn highlighted_twigs(&self, tree: &TwigTree) -> Vec<String> {
        tree.twigs()
            .filter(|t| t.binding.is_some_and(|b| self.highlighted.contains(&b)))
            .map(|t| t.path.clone())
            .collect()
    }

    fn on_selection(&mut self, ids: &BTreeSet<ReprId>, kit: &mut RepKit) -> Result<(), String> {
        self.highlighted = ids.clone();
        self.highlighted_reps.clear();
        if let Some(model) = self.model {
            for &id in ids {
                for reps in kit.correlate(id, &[model]) {
                    self.highlighted_reps.extend(reps);
                }
            }
        }
        if self.kind != BrowserKind::Text {
            return Ok(());
        }
        self.text = None;
        self.shown = match ids.len() {
            1 => ids.first().copied(),
            _ => None,
        };
        let (Some(id), Some(model)) = (self.shown, self.model) else {
            return Ok(());
        };
        let rep = kit.make_rep(id, model).map_err(|e| e.to_string())?;
        kit.expand_rep(model, rep).map_err(|e| e.to_string())?;
        self.highlighted_reps.insert(rep);
        match &kit.rep(model, rep).map_err(|e| e.to_string())?.content {
            RepContent::Text(body) => {
                self.text = Some(body.to_html());
                Ok(())
            }
            _ => Err(format!("object {id} has no text rep")),
        }
    }
}

/// Subscribes the browser to selection changes.
pub fn attach_browser(bus: &mut MessageBus, browser: Rc<RefCell<Browser>>, kit: Rc<RefCell<RepKit>>) -> ObserverId {
    let name = {
        let b = browser.borrow();
        format!("{}#{}", b.kind, b.id.0)
    };
    bus.subscribe(SELECTION_TOPIC, name, move |message, _| match &message.payload {
        Payload::Selection { ids, .. } => browser.borrow_mut().on_selection(ids, &mut kit.borrow_mut()),
        _ => Ok(()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hub::{SelectionEvent, SelectionMode};
    use crate::repkit::{Representable, Represented, TextBody, ANY_KIND, EXPAND, REPRESENT};

    fn kit_with_text() -> (RepKit, ModelId, ModelId) {
        let mut kit = RepKit::new();
        kit.register_method::<(), _>(REPRESENT, ANY_KIND, "text", |_, _| Ok(Box::new(Represented::Stub)))
            .unwrap();
        kit.register_method::<(), _>(EXPAND, ANY_KIND, "text", |kit, call| {
            let n = *kit.object_mut(call.object)?.payload::<u32>()?;
            Ok(Box::new(RepContent::Text(TextBody::new("Hit").field("n", n))))
        })
        .unwrap();
        kit.register_method::<(), _>(REPRESENT, ANY_KIND, "3d", |_, _| {
            Ok(Box::new(Represented::Expanded(RepContent::Empty)))
        })
        .unwrap();
        for i in [41u64, 42, 43] {
            kit.add_object(Representable::new(ReprId(i), ["Hit"], i as u32).unwrap()).unwrap();
        }
        let text = kit.add_model("text");
        let view = kit.add_model("3d");
        for i in [41u64, 42, 43] {
            kit.make_rep(ReprId(i), view).unwrap();
        }
        (kit, text, view)
    }

    #[test]
    fn selection_reaches_every_browser() {
        let (kit, text_model, view_model) = kit_with_text();
        let kit = Rc::new(RefCell::new(kit));
        let mut bus = MessageBus::new();
        let view = Rc::new(RefCell::new(Browser::new(BrowserId(1), BrowserKind::View3d, Some(view_model))));
        let text = Rc::new(RefCell::new(Browser::new(BrowserId(2), BrowserKind::Text, Some(text_model))));
        attach_browser(&mut bus, view.clone(), kit.clone());
        attach_browser(&mut bus, text.clone(), kit.clone());

        let report = bus
            .select(SelectionEvent::new(Some(BrowserId(1)), [ReprId(42)], SelectionMode::Replace))
            .unwrap();
        assert!(report.errors.is_empty(), "{:?}", report.errors);
        assert_eq!(view.borrow().highlighted_reps().len(), 1);
        assert_eq!(text.borrow().shown(), Some(ReprId(42)));
        assert!(text.borrow().text().unwrap().contains("42"));

        bus.select(SelectionEvent::new(None, [], SelectionMode::Replace)).unwrap();
        assert!(view.borrow().highlighted().is_empty());
        assert_eq!(text.borrow().shown(), None);
        assert_eq!(text.borrow().text(), None);
    }

    #[test]
    fn kind_names() {
        assert_eq!("view2d".parse::<BrowserKind>().unwrap(), BrowserKind::View2d);
        assert!("x".parse::<BrowserKind>().is_err());
    }
}
