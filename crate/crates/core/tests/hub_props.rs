use std::cell::RefCell;
use std::collections::BTreeSet;
use std::rc::Rc;

use evd_core::hub::{
    attach_browser, Browser, BrowserId, BrowserKind, HubError, MessageBus, SelectionEvent, SelectionMode,
    SiteKind, SiteTree, TwigTree, ViewClass,
};
use evd_core::repkit::{RepContent, RepKit, Representable, Represented, ReprId, TextBody, ANY_KIND, REPRESENT};
use evd_testkit::selection::{self, Mode};
use evd_testkit::twigs::{self, PlainTwig};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const UNIVERSE: u64 = 12;

struct World {
    bus: MessageBus,
    browsers: Vec<Rc<RefCell<Browser>>>,
}

fn world() -> World {
    let mut kit = RepKit::new();
    kit.register_method::<(), _>(REPRESENT, ANY_KIND, "3d", |_, _| {
        Ok(Box::new(Represented::Expanded(RepContent::Empty)))
    })
    .unwrap();
    kit.register_method::<(), _>(REPRESENT, ANY_KIND, "text", |_, call| {
        Ok(Box::new(Represented::Expanded(RepContent::Text(TextBody::new(format!(
            "object {}",
            call.object
        ))))))
    })
    .unwrap();
    for i in 1..=UNIVERSE {
        kit.add_object(Representable::new(ReprId(i), ["Hit"], i).unwrap()).unwrap();
    }
    let view = kit.add_model("3d");
    let text = kit.add_model("text");
    for i in 1..=UNIVERSE {
        kit.make_rep(ReprId(i), view).unwrap();
    }
    let kit = Rc::new(RefCell::new(kit));
    let mut bus = MessageBus::new();
    let browsers: Vec<_> = [
        (BrowserKind::View3d, Some(view)),
        (BrowserKind::Twig, None),
        (BrowserKind::Text, Some(text)),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (kind, model))| Rc::new(RefCell::new(Browser::new(BrowserId(i as u32 + 1), kind, model))))
    .collect();
    for b in &browsers {
        attach_browser(&mut bus, b.clone(), kit.clone());
    }
    World { bus, browsers }
}

fn event(step: &selection::Step) -> SelectionEvent {
    let mode = match step.mode {
        Mode::Replace => SelectionMode::Replace,
        Mode::Add => SelectionMode::Add,
        Mode::Toggle => SelectionMode::Toggle,
    };
    SelectionEvent::new(
        step.source.map(|s| BrowserId(s as u32 + 1)),
        step.ids.iter().map(|&i| ReprId(i)),
        mode,
    )
}

fn ids(set: &BTreeSet<ReprId>) -> BTreeSet<u64> {
    set.iter().map(|r| r.0).collect()
}

fn build_twigs(plain: &[PlainTwig]) -> TwigTree {
    let mut tree = TwigTree::new();
    let views = [ViewClass::ThreeD, ViewClass::TwoD, ViewClass::Text];
    for (i, t) in plain.iter().enumerate() {
        let path = match t.parent {
            None => "/".to_string(),
            Some(p) => tree
                .add(&twigs::path(plain, p), &t.name, t.binding.map(ReprId))
                .unwrap(),
        };
        assert_eq!(path, twigs::path(plain, i));
        for (v, view) in views.iter().enumerate() {
            tree.set_flags(&path, *view, t.flags[v].0, t.flags[v].1).unwrap();
        }
    }
    tree
}

proptest! {
    #[test]
    fn every_browser_tracks_the_bus_selection(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut w = world();
        let mut expected = BTreeSet::new();
        for step in selection::random_sequence(&mut rng, 3, UNIVERSE, 30) {
            let result = w.bus.select(event(&step));
            match selection::apply(&expected, &step) {
                Some(next) => {
                    let report = result.unwrap();
                    prop_assert!(report.errors.is_empty(), "{:?}", report.errors);
                    expected = next;
                }
                None => prop_assert!(matches!(result, Err(HubError::EmptySelection(_)))),
            }
            prop_assert_eq!(&ids(w.bus.selection()), &expected);
            for b in &w.browsers {
                prop_assert_eq!(&ids(b.borrow().highlighted()), &expected);
            }
            let text = w.browsers[2].borrow();
            prop_assert_eq!(text.text().is_some(), expected.len() == 1);
            prop_assert_eq!(w.browsers[0].borrow().highlighted_reps().len(), expected.len());
        }
    }

    #[test]
    fn broadcasts_are_deterministic(seed in any::<u64>()) {
        let steps = selection::random_sequence(&mut StdRng::seed_from_u64(seed), 3, UNIVERSE, 20);
        let run = || {
            let mut w = world();
            steps
                .iter()
                .filter_map(|s| w.bus.select(event(s)).ok())
                .map(|r| format!("{:?}", r.transcript))
                .collect::<Vec<_>>()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn visible_set_matches_ancestor_walk(seed in any::<u64>()) {
        let plain = twigs::random_tree(&mut StdRng::seed_from_u64(seed), 200);
        let tree = build_twigs(&plain);
        for (v, view) in [ViewClass::ThreeD, ViewClass::TwoD, ViewClass::Text].into_iter().enumerate() {
            prop_assert_eq!(ids(&tree.visible_set(view)), twigs::visible_set(&plain, v));
        }
    }

    #[test]
    fn hiding_never_reveals(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let plain = twigs::random_tree(&mut rng, 120);
        let mut tree = build_twigs(&plain);
        let before = tree.visible_set(ViewClass::ThreeD);
        let i = rng.gen_range(0..plain.len());
        let path = twigs::path(&plain, i);
        let f = tree.get(&path).unwrap().flags(ViewClass::ThreeD);
        let (s, d) = (f.self_visible && rng.gen_bool(0.5), f.descendants_visible && rng.gen_bool(0.5));
        tree.set_flags(&path, ViewClass::ThreeD, s, d).unwrap();
        prop_assert!(tree.visible_set(ViewClass::ThreeD).is_subset(&before));
    }

    #[test]
    fn site_composition_keeps_the_tree_consistent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut tree = SiteTree::new();
        let kinds = [SiteKind::Window, SiteKind::SplitHorizontal, SiteKind::SplitVertical, SiteKind::Tab, SiteKind::Pipe];
        let bkinds = [BrowserKind::View3d, BrowserKind::View2d, BrowserKind::Twig, BrowserKind::Text, BrowserKind::Background];
        let mut sites = Vec::new();
        let mut browsers = Vec::new();
        for _ in 0..40 {
            let before = format!("{:?}", tree.sites().collect::<Vec<_>>());
            let result = match rng.gen_range(0..3) {
                0 => {
                    let b = tree.add_browser(bkinds[rng.gen_range(0..bkinds.len())], None);
                    browsers.push(b);
                    Ok(())
                }
                1 => {
                    let parent = (!sites.is_empty() && rng.gen_bool(0.8)).then(|| sites[rng.gen_range(0..sites.len())]);
                    let hosted = (!browsers.is_empty() && rng.gen_bool(0.5)).then(|| browsers[rng.gen_range(0..browsers.len())]);
                    tree.compose_site(parent, kinds[rng.gen_range(0..kinds.len())], hosted).map(|s| sites.push(s))
                }
                _ if !sites.is_empty() && !browsers.is_empty() => {
                    tree.host(sites[rng.gen_range(0..sites.len())], browsers[rng.gen_range(0..browsers.len())])
                }
                _ => Ok(()),
            };
            if result.is_err() {
                prop_assert_eq!(format!("{:?}", tree.sites().collect::<Vec<_>>()), before);
            }
            prop_assert!(tree.audit().is_ok());
        }
    }
}
