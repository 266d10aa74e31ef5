use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{BrowserId, BrowserKind, HubError};
use crate::repkit::ModelId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Window,
    SplitHorizontal,
    SplitVertical,
    Tab,
    Pipe,
}

impl SiteKind {
    pub fn is_split(self) -> bool {
        matches!(self, SiteKind::SplitHorizontal | SiteKind::SplitVertical)
    }

    /// Kinds that may have child sites.
    pub fn is_container(self) -> bool {
        !matches!(self, SiteKind::Pipe)
    }

    pub fn name(self) -> &'static str {
        match self {
            SiteKind::Window => "window",
            SiteKind::SplitHorizontal => "splitHorizontal",
            SiteKind::SplitVertical => "splitVertical",
            SiteKind::Tab => "tab",
            SiteKind::Pipe => "pipe",
        }
    }
}

impl fmt::Display for SiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SiteKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            SiteKind::Window,
            SiteKind::SplitHorizontal,
            SiteKind::SplitVertical,
            SiteKind::Tab,
            SiteKind::Pipe,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown site kind {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub id: SiteId,
    pub kind: SiteKind,
    pub parent: Option<SiteId>,
    pub children: Vec<SiteId>,
    pub hosted: Vec<BrowserId>,
}

#[derive(Debug, Clone, PartialEq)]
struct BrowserSlot {
    kind: BrowserKind,
    model: Option<ModelId>,
    site: Option<SiteId>,
}

/// Forest of sites plus the browsers they host.
#[derive(Debug, Clone, Default)]
pub struct SiteTree {
    sites: BTreeMap<SiteId, Site>,
    browsers: BTreeMap<BrowserId, BrowserSlot>,
    next_site: u32,
    next_browser: u32,
}

impl SiteTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an unhosted browser.
    pub fn add_browser(&mut self, kind: BrowserKind, model: Option<ModelId>) -> BrowserId {
        self.next_browser += 1;
        let id = BrowserId(self.next_browser);
        self.browsers.insert(id, BrowserSlot { kind, model, site: None });
        id
    }

    pub fn browser_site(&self, id: BrowserId) -> Result<Option<SiteId>, HubError> {
        self.browsers.get(&id).map(|b| b.site).ok_or(HubError::UnknownBrowser(id))
    }

    pub fn browser_kind(&self, id: BrowserId) -> Result<BrowserKind, HubError> {
        self.browsers.get(&id).map(|b| b.kind).ok_or(HubError::UnknownBrowser(id))
    }

    pub fn browser_model(&self, id: BrowserId) -> Result<Option<ModelId>, HubError> {
        self.browsers.get(&id).map(|b| b.model).ok_or(HubError::UnknownBrowser(id))
    }

    pub fn browsers(&self) -> impl Iterator<Item = BrowserId> + '_ {
        self.browsers.keys().copied()
    }

    pub fn site(&self, id: SiteId) -> Result<&Site, HubError> {
        self.sites.get(&id).ok_or(HubError::UnknownSite(id))
    }

    pub fn sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.values()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    fn check_hosting(&self, kind: SiteKind, already: usize, browser: BrowserId) -> Result<(), HubError> {
        let slot = self.browsers.get(&browser).ok_or(HubError::UnknownBrowser(browser))?;
        if let Some(site) = slot.site {
            return Err(HubError::HostingViolation(format!(
                "browser {} is already hosted by site {}",
                browser.0, site.0
            )));
        }
        if kind.is_split() {
            return Err(HubError::HostingViolation(format!("a {kind} site hosts only sites")));
        }
        if kind == SiteKind::Pipe && already > 0 {
            return Err(HubError::HostingViolation("a pipe site hosts at most one browser".into()));
        }
        if slot.kind == BrowserKind::Background && kind != SiteKind::Pipe {
            return Err(HubError::HostingViolation(format!(
                "background browsers may only be hosted by a pipe site, not a {kind} site"
            )));
        }
        Ok(())
    }

    /// Adds a site below `parent` (or as a new root), optionally hosting a
    /// browser.
    pub fn compose_site(
        &mut self,
        parent: Option<SiteId>,
        kind: SiteKind,
        hosted: Option<BrowserId>,
    ) -> Result<SiteId, HubError> {
        if let Some(p) = parent {
            let parent_site = self.site(p)?;
            if !parent_site.kind.is_container() {
                return Err(HubError::HostingViolation(format!(
                    "a {} site cannot contain sites",
                    parent_site.kind
                )));
            }
        }
        if let Some(b) = hosted {
            self.check_hosting(kind, 0, b)?;
        }
        self.next_site += 1;
        let id = SiteId(self.next_site);
        self.sites.insert(
            id,
            Site {
                id,
                kind,
                parent,
                children: Vec::new(),
                hosted: hosted.into_iter().collect(),
            },
        );
        if let Some(p) = parent {
            self.sites.get_mut(&p).expect("checked").children.push(id);
        }
        if let Some(b) = hosted {
            self.browsers.get_mut(&b).expect("checked").site = Some(id);
        }
        Ok(id)
    }

    /// Hosts another browser in an existing site.
    pub fn host(&mut self, site: SiteId, browser: BrowserId) -> Result<(), HubError> {
        let s = self.site(site)?;
        self.check_hosting(s.kind, s.hosted.len(), browser)?;
        self.sites.get_mut(&site).expect("checked").hosted.push(browser);
        self.browsers.get_mut(&browser).expect("checked").site = Some(site);
        Ok(())
    }

    /// Full consistency check of parent/child links and hosting rules.
    pub fn audit(&self) -> Result<(), HubError> {
        let bad = |m: String| Err(HubError::Audit(m));
        for site in self.sites.values() {
            match site.parent {
                Some(p) => match self.sites.get(&p) {
                    Some(ps) if ps.children.iter().filter(|&&c| c == site.id).count() == 1 => {
                        if !ps.kind.is_container() {
                            return bad(format!("site {} has a pipe parent", site.id.0));
                        }
                    }
                    _ => return bad(format!("site {} is not listed by its parent", site.id.0)),
                },
                None => {}
            }
            for c in &site.children {
                if self.sites.get(c).and_then(|cs| cs.parent) != Some(site.id) {
                    return bad(format!("child {} of site {} points elsewhere", c.0, site.id.0));
                }
            }
            if site.kind.is_split() && !site.hosted.is_empty() {
                return bad(format!("split site {} hosts browsers", site.id.0));
            }
            if site.kind == SiteKind::Pipe && site.hosted.len() > 1 {
                return bad(format!("pipe site {} hosts several browsers", site.id.0));
            }
            for b in &site.hosted {
                if self.browsers.get(b).and_then(|s| s.site) != Some(site.id) {
                    return bad(format!("browser {} does not point back to site {}", b.0, site.id.0));
                }
            }
            // walk to a root; more steps than sites means a cycle
            let mut cur = site.parent;
            let mut steps = 0;
            while let Some(p) = cur {
                steps += 1;
                if steps > self.sites.len() {
                    return bad(format!("cycle through site {}", site.id.0));
                }
                cur = self.sites.get(&p).and_then(|s| s.parent);
            }
        }
        for (id, slot) in &self.browsers {
            if let Some(s) = slot.site {
                if !self.sites.get(&s).is_some_and(|site| site.hosted.contains(id)) {
                    return bad(format!("browser {} references site {} which does not host it", id.0, s.0));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_split_two_windows() {
        let mut tree = SiteTree::new();
        let v3 = tree.add_browser(BrowserKind::View3d, None);
        let tw = tree.add_browser(BrowserKind::Twig, None);
        let w = tree.compose_site(None, SiteKind::Window, None).unwrap();
        let s = tree.compose_site(Some(w), SiteKind::SplitHorizontal, None).unwrap();
        tree.compose_site(Some(s), SiteKind::Window, Some(v3)).unwrap();
        tree.compose_site(Some(s), SiteKind::Window, Some(tw)).unwrap();
        assert_eq!(tree.len(), 4);
        assert_eq!(tree.site(s).unwrap().children.len(), 2);
        tree.audit().unwrap();
    }

    #[test]
    fn browser_directly_under_split() {
        let mut tree = SiteTree::new();
        let b = tree.add_browser(BrowserKind::View2d, None);
        let w = tree.compose_site(None, SiteKind::Window, None).unwrap();
        let err = tree.compose_site(Some(w), SiteKind::SplitVertical, Some(b)).unwrap_err();
        assert!(matches!(err, HubError::HostingViolation(_)));
        let s = tree.compose_site(Some(w), SiteKind::SplitVertical, None).unwrap();
        assert!(matches!(tree.host(s, b), Err(HubError::HostingViolation(_))));
        assert_eq!(tree.browser_site(b).unwrap(), None);
        tree.audit().unwrap();
    }

    #[test]
    fn pipe_hosts_background_browser() {
        let mut tree = SiteTree::new();
        let bg = tree.add_browser(BrowserKind::Background, None);
        let other = tree.add_browser(BrowserKind::Text, None);
        let w = tree.compose_site(None, SiteKind::Window, None).unwrap();
        let p = tree.compose_site(Some(w), SiteKind::Pipe, Some(bg)).unwrap();
        assert!(matches!(tree.host(p, other), Err(HubError::HostingViolation(_))));
        assert!(matches!(
            tree.compose_site(Some(p), SiteKind::Window, None),
            Err(HubError::HostingViolation(_))
        ));
        tree.audit().unwrap();
    }

    #[test]
    fn background_browser_outside_pipe_refused() {
        let mut tree = SiteTree::new();
        let bg = tree.add_browser(BrowserKind::Background, None);
        assert!(tree.compose_site(None, SiteKind::Window, Some(bg)).is_err());
    }

    #[test]
    fn browser_hosted_once() {
        let mut tree = SiteTree::new();
        let b = tree.add_browser(BrowserKind::Text, None);
        let w = tree.compose_site(None, SiteKind::Window, Some(b)).unwrap();
        assert!(tree.compose_site(Some(w), SiteKind::Tab, Some(b)).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ["window", "splitHorizontal", "splitVertical", "tab", "pipe"] {
            assert_eq!(k.parse::<SiteKind>().unwrap().name(), k);
        }
        assert!("frame".parse::<SiteKind>().is_err());
    }
}
