use evd_core::geom::{shift, LogicalVolume, Solid, TraversalMode, Usage, UsageDirection, VolumeTree};
use evd_testkit::volumes::{self, PlainLogical, PlainPlacement, VolumeCase};
use nalgebra::Point3;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn build(case: &VolumeCase) -> VolumeTree {
    let mut tree = VolumeTree::new();
    for l in &case.logicals {
        let solid = Solid::cuboid(l.half[0], l.half[1], l.half[2]);
        tree.add_logical(LogicalVolume::new(&l.name, &l.material, l.sensitive, solid)).unwrap();
    }
    for p in &case.placements {
        let o = p.offset;
        tree.place(&case.logicals[p.mother].name, &case.logicals[p.logical].name, p.copy, shift(o[0], o[1], o[2]))
            .unwrap();
    }
    tree.set_root(&case.logicals[0].name).unwrap();
    tree
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|p| p.to_string()).collect()
}

fn oracle_select(case: &VolumeCase, keep: impl Fn(&PlainLogical) -> bool) -> Vec<String> {
    volumes::expand(case)
        .iter()
        .filter(|n| keep(&case.logicals[n.logical]))
        .map(|n| volumes::path_string(&n.path))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selectors_match_the_expansion(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let case = volumes::random_case(&mut rng, 15, 1000, 30.0);
        let tree = build(&case);
        for m in volumes::MATERIALS {
            prop_assert_eq!(strings(tree.select_by_material(m).unwrap()), oracle_select(&case, |l| l.material == m));
        }
        prop_assert_eq!(strings(tree.select_sensitive().unwrap()), oracle_select(&case, |l| l.sensitive));
        let target = &case.logicals[rng.gen_range(0..case.logicals.len())].name;
        match tree.usage_search(target, UsageDirection::Reverse).unwrap() {
            Usage::Paths(paths) => prop_assert_eq!(strings(paths), oracle_select(&case, |l| &l.name == target)),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn world_positions_accumulate(seed in any::<u64>()) {
        let case = volumes::random_case(&mut StdRng::seed_from_u64(seed), 10, 300, 30.0);
        let tree = build(&case);
        let nodes = tree.traverse(TraversalMode::Physical).unwrap();
        let expected = volumes::expand(&case);
        prop_assert_eq!(nodes.len(), expected.len());
        for (n, e) in nodes.iter().zip(&expected) {
            prop_assert_eq!(n.path.to_string(), volumes::path_string(&e.path));
            let at = n.world.apply(&Point3::origin());
            prop_assert!((at - Point3::new(e.center[0], e.center[1], e.center[2])).norm() < 1e-9);
        }
    }

    #[test]
    fn overlaps_match_pairwise_boxes(seed in any::<u64>()) {
        let case = volumes::random_case(&mut StdRng::seed_from_u64(seed), 8, 200, 15.0);
        let tree = build(&case);
        for tol in [0.0, 0.5] {
            let mut got: Vec<(String, String, bool, f64)> = tree
                .find_overlaps(tol)
                .unwrap()
                .into_iter()
                .map(|r| {
                    let (a, b) = (r.first.to_string(), r.second.to_string());
                    let (a, b) = if r.protrusion || a <= b { (a, b) } else { (b, a) };
                    (a, b, r.protrusion, r.penetration)
                })
                .collect();
            got.sort_by(|x, y| (&x.0, &x.1, x.2).cmp(&(&y.0, &y.1, y.2)));
            let want = volumes::aabb_overlaps(&case, tol);
            prop_assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                prop_assert_eq!((&g.0, &g.1, g.2), (&w.first, &w.second, w.protrusion));
                prop_assert!((g.3 - w.depth).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn overlap_reports_are_order_independent(seed in any::<u64>()) {
        let mut case = volumes::random_case(&mut StdRng::seed_from_u64(seed), 8, 200, 15.0);
        let forward = build(&case).find_overlaps(0.0).unwrap();
        case.placements.reverse();
        prop_assert_eq!(build(&case).find_overlaps(0.0).unwrap(), forward);
    }
}

#[test]
fn touching_boxes_are_clean_at_zero_tolerance() {
    let unit = |name: &str, half: f64| PlainLogical {
        name: name.into(),
        material: "iron".into(),
        sensitive: false,
        half: [half; 3],
    };
    let at = |logical, copy, x: f64| PlainPlacement {
        mother: 0,
        logical,
        copy,
        offset: [x, 0.0, 0.0],
    };
    // a row of cubes, face to face, the last one flush with the mother wall
    let case = VolumeCase {
        logicals: vec![unit("World", 4.0), unit("Cube", 1.0)],
        placements: vec![at(1, 0, -3.0), at(1, 1, -1.0), at(1, 2, 1.0), at(1, 3, 3.0)],
    };
    assert!(build(&case).find_overlaps(0.0).unwrap().is_empty());
    assert!(volumes::aabb_overlaps(&case, 0.0).is_empty());
}
