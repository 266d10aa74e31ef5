use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{BroadcastReport, HubError, MessageBus, Payload, VISIBILITY_TOPIC};
use crate::repkit::ReprId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViewClass {
    ThreeD,
    TwoD,
    Text,
}

impl ViewClass {
    pub const ALL: [ViewClass; 3] = [ViewClass::ThreeD, ViewClass::TwoD, ViewClass::Text];

    pub fn name(self) -> &'static str {
        match self {
            ViewClass::ThreeD => "3d",
            ViewClass::TwoD => "2d",
            ViewClass::Text => "text",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ViewClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ViewClass {
    type Err = HubError;

    fn from_str(s: &str) -> Result<Self, HubError> {
        ViewClass::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| HubError::UnknownViewClass(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VisFlags {
    pub self_visible: bool,
    pub descendants_visible: bool,
}

impl Default for VisFlags {
    fn default() -> Self {
        Self {
            self_visible: true,
            descendants_visible: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Twig {
    pub name: String,
    pub path: String,
    /// Child names in insertion order.
    pub children: Vec<String>,
    pub binding: Option<ReprId>,
    flags: [VisFlags; 3],
}

impl Twig {
    fn new(name: &str, path: String, binding: Option<ReprId>) -> Self {
        Self {
            name: name.to_string(),
            path,
            children: Vec::new(),
            binding,
            flags: [VisFlags::default(); 3],
        }
    }

    pub fn flags(&self, view: ViewClass) -> VisFlags {
        self.flags[view.index()]
    }
}

fn join(parent: &str, name: &str) -> String {
    if parent == "/" {
        format!("/{name}")
    } else {
        format!("{parent}/{name}")
    }
}

/// Hierarchy of named twigs rooted at `/`, each optionally bound to a
/// representable, with two visibility flags per view class.
#[derive(Debug, Clone, PartialEq)]
pub struct TwigTree {
    twigs: BTreeMap<String, Twig>,
}

impl Default for TwigTree {
    fn default() -> Self {
        Self::new()
    }
}

impl TwigTree {
    pub fn new() -> Self {
        let mut twigs = BTreeMap::new();
        twigs.insert("/".to_string(), Twig::new("", "/".to_string(), None));
        Self { twigs }
    }

    pub fn len(&self) -> usize {
        self.twigs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, path: &str) -> Result<&Twig, HubError> {
        self.twigs.get(path).ok_or_else(|| HubError::UnknownPath(path.to_string()))
    }

    pub fn contains(&self, path: &str) -> bool {
        self.twigs.contains_key(path)
    }

    /// Adds a child twig and returns its path.
    pub fn add(&mut self, parent: &str, name: &str, binding: Option<ReprId>) -> Result<String, HubError> {
        if name.is_empty() || name.contains('/') {
            return Err(HubError::BadName(name.to_string()));
        }
        if !self.twigs.contains_key(parent) {
            return Err(HubError::UnknownPath(parent.to_string()));
        }
        let path = join(parent, name);
        if self.twigs.contains_key(&path) {
            return Err(HubError::DuplicatePath(path));
        }
        self.twigs.insert(path.clone(), Twig::new(name, path.clone(), binding));
        self.twigs.get_mut(parent).expect("checked").children.push(name.to_string());
        Ok(path)
    }

    /// Returns the twig at `parent/name`, creating it when missing.
    pub fn ensure(&mut self, parent: &str, name: &str) -> Result<String, HubError> {
        let path = join(parent, name);
        if self.twigs.contains_key(&path) {
            Ok(path)
        } else {
            self.add(parent, name, None)
        }
    }

    pub fn bind(&mut self, path: &str, binding: Option<ReprId>) -> Result<(), HubError> {
        self.twigs
            .get_mut(path)
            .ok_or_else(|| HubError::UnknownPath(path.to_string()))?
            .binding = binding;
        Ok(())
    }

    /// Drops every descendant of `path`.
    pub fn clear_children(&mut self, path: &str) -> Result<(), HubError> {
        let children = std::mem::take(
            &mut self
                .twigs
                .get_mut(path)
                .ok_or_else(|| HubError::UnknownPath(path.to_string()))?
                .children,
        );
        let mut stack: Vec<String> = children.iter().map(|c| join(path, c)).collect();
        while let Some(p) = stack.pop() {
            if let Some(t) = self.twigs.remove(&p) {
                stack.extend(t.children.iter().map(|c| join(&p, c)));
            }
        }
        Ok(())
    }

    /// Depth-first, children in insertion order.
    pub fn twigs(&self) -> impl Iterator<Item = &Twig> + '_ {
        let mut stack = vec!["/".to_string()];
        std::iter::from_fn(move || {
            let path = stack.pop()?;
            let twig = &self.twigs[&path];
            stack.extend(twig.children.iter().rev().map(|c| join(&path, c)));
            Some(twig)
        })
    }

    pub fn path_of(&self, id: ReprId) -> Option<&str> {
        self.twigs().find(|t| t.binding == Some(id)).map(|t| t.path.as_str())
    }

    /// Sets both flags; returns whether anything changed.
    pub fn set_flags(
        &mut self,
        path: &str,
        view: ViewClass,
        self_visible: bool,
        descendants_visible: bool,
    ) -> Result<bool, HubError> {
        let twig = self
            .twigs
            .get_mut(path)
            .ok_or_else(|| HubError::UnknownPath(path.to_string()))?;
        let new = VisFlags {
            self_visible,
            descendants_visible,
        };
        let changed = twig.flags[view.index()] != new;
        twig.flags[view.index()] = new;
        Ok(changed)
    }

    /// The node's own flag and the descendants flag of every proper ancestor.
    pub fn effective_visibility(&self, path: &str, view: ViewClass) -> Result<bool, HubError> {
        let twig = self.get(path)?;
        if !twig.flags(view).self_visible {
            return Ok(false);
        }
        let mut cur = path;
        while cur != "/" {
            cur = match cur.rfind('/') {
                Some(0) => "/",
                Some(i) => &cur[..i],
                None => return Err(HubError::UnknownPath(path.to_string())),
            };
            if !self.get(cur)?.flags(view).descendants_visible {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Bindings of all effectively visible twigs.
    pub fn visible_set(&self, view: ViewClass) -> BTreeSet<ReprId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![("/".to_string(), true)];
        while let Some((path, reachable)) = stack.pop() {
            let twig = &self.twigs[&path];
            let flags = twig.flags(view);
            if reachable && flags.self_visible {
                out.extend(twig.binding);
            }
            let below = reachable && flags.descendants_visible;
            if below {
                stack.extend(twig.children.iter().map(|c| (join(&path, c), true)));
            }
        }
        out
    }

    /// Number of bound twigs strictly below `path`.
    pub fn bound_descendants(&self, path: &str) -> Result<usize, HubError> {
        self.get(path)?;
        let prefix = if path == "/" { "/".to_string() } else { format!("{path}/") };
        Ok(self
            .twigs
            .values()
            .filter(|t| t.path != path && t.path.starts_with(&prefix) && t.binding.is_some())
            .count())
    }
}

/// Updates the flags and, when they changed, announces it on the
/// visibility topic. Returns `None` for a no-op.
pub fn set_twig_visibility(
    tree: &mut TwigTree,
    bus: &mut MessageBus,
    path: &str,
    view: ViewClass,
    self_visible: bool,
    descendants_visible: bool,
) -> Result<Option<BroadcastReport>, HubError> {
    if !tree.set_flags(path, view, self_visible, descendants_visible)? {
        return Ok(None);
    }
    let payload = Payload::Visibility {
        path: path.to_string(),
        view,
        self_visible,
        descendants_visible,
    };
    Ok(Some(bus.broadcast(VISIBILITY_TOPIC, payload)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_leaves() -> TwigTree {
        let mut t = TwigTree::new();
        let a = t.add("/", "A", None).unwrap();
        for i in 0..5 {
            t.add(&a, &format!("l{i}"), Some(ReprId(i + 1))).unwrap();
        }
        t
    }

    #[test]
    fn fully_visible() {
        let t = five_leaves();
        assert_eq!(t.visible_set(ViewClass::ThreeD).len(), 5);
        assert!(t.effective_visibility("/A/l3", ViewClass::TwoD).unwrap());
    }

    #[test]
    fn ancestor_descendants_flag_hides() {
        let mut t = five_leaves();
        t.set_flags("/", ViewClass::ThreeD, true, false).unwrap();
        assert!(!t.effective_visibility("/A/l0", ViewClass::ThreeD).unwrap());
        assert!(t.visible_set(ViewClass::ThreeD).is_empty());
        assert_eq!(t.visible_set(ViewClass::TwoD).len(), 5);
    }

    #[test]
    fn root_self_flag() {
        let mut t = five_leaves();
        t.set_flags("/", ViewClass::Text, false, true).unwrap();
        assert!(!t.effective_visibility("/", ViewClass::Text).unwrap());
        assert!(t.effective_visibility("/A", ViewClass::Text).unwrap());
    }

    #[test]
    fn unknown_path() {
        let t = five_leaves();
        assert!(matches!(
            t.effective_visibility("/B", ViewClass::ThreeD),
            Err(HubError::UnknownPath(_))
        ));
    }

    #[test]
    fn no_op_is_suppressed() {
        let mut t = five_leaves();
        let mut bus = MessageBus::new();
        let hits = std::rc::Rc::new(std::cell::Cell::new(0));
        let h = hits.clone();
        bus.subscribe(VISIBILITY_TOPIC, "m", move |_, _| {
            h.set(h.get() + 1);
            Ok(())
        });
        assert!(set_twig_visibility(&mut t, &mut bus, "/A", ViewClass::ThreeD, true, false)
            .unwrap()
            .is_some());
        assert!(set_twig_visibility(&mut t, &mut bus, "/A", ViewClass::ThreeD, true, false)
            .unwrap()
            .is_none());
        assert_eq!(hits.get(), 1);
        assert_eq!(t.bound_descendants("/A").unwrap(), 5);
        assert_eq!(t.bound_descendants("/").unwrap(), 5);
    }

    #[test]
    fn preorder_and_clear() {
        let mut t = five_leaves();
        t.add("/", "B", Some(ReprId(9))).unwrap();
        let order: Vec<_> = t.twigs().map(|t| t.path.clone()).collect();
        assert_eq!(order[..3], ["/", "/A", "/A/l0"]);
        assert_eq!(order.last().unwrap(), "/B");
        assert_eq!(t.path_of(ReprId(9)), Some("/B"));
        t.clear_children("/A").unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.get("/A").unwrap().children.is_empty());
        assert!(matches!(t.add("/", "B", None), Err(HubError::DuplicatePath(_))));
        assert!(matches!(t.add("/", "x/y", None), Err(HubError::BadName(_))));
    }
}
