use evd_core::repkit::ReprId;
use evd_core::scene::{
    clip_polyhedron, eta_phi_project, parse_scene, write_scene, EnergyDeposit, Plane, Primitive, Rgba, SceneGraph,
    Transform,
};
use evd_testkit::polyhedra;
use nalgebra::{Point3, Vector3};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn to_prim(vertices: &[[f64; 3]], faces: &[Vec<usize>]) -> Primitive {
    Primitive::polyhedron(
        1,
        ReprId(1),
        vertices.iter().map(|v| Point3::new(v[0], v[1], v[2])).collect(),
        faces.to_vec(),
        Rgba::GREY,
    )
}

fn volume(p: &Option<Primitive>) -> f64 {
    match p {
        None => 0.0,
        Some(p) => {
            let v: Vec<[f64; 3]> = p.placed_vertices().iter().map(|v| [v.x, v.y, v.z]).collect();
            polyhedra::volume(&v, &p.faces)
        }
    }
}

fn random_plane<R: Rng>(rng: &mut R, through_box: f64) -> Plane {
    let n = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let p = Vector3::new(
        rng.gen_range(-through_box..through_box),
        rng.gen_range(-through_box..through_box),
        rng.gen_range(-through_box..through_box),
    );
    Plane::new(n, n.dot(&p)).unwrap_or_else(|_| Plane::new(Vector3::x(), 0.0).unwrap())
}

proptest! {
    #[test]
    fn two_sided_clip_conserves_volume(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (v, f) = polyhedra::random_convex(&mut rng, 12, [0.0; 3], 5.0);
        let prim = to_prim(&v, &f);
        let plane = random_plane(&mut rng, 4.0);
        let kept = clip_polyhedron(&prim, &plane).unwrap();
        let rest = clip_polyhedron(&prim, &plane.flipped()).unwrap();
        let whole = polyhedra::volume(&v, &f);
        prop_assert!(((volume(&kept) + volume(&rest)) - whole).abs() <= 1e-6 * whole);
        for (side, plane) in [(&kept, plane), (&rest, plane.flipped())] {
            if let Some(p) = side {
                prop_assert!(p.is_well_formed());
                for q in p.placed_vertices() {
                    prop_assert!(plane.distance(&q) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn clipping_a_placed_solid_uses_its_placement(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (v, f) = polyhedra::random_convex(&mut rng, 10, [0.0; 3], 3.0);
        let t = Transform::rotation_z(rng.gen_range(0.0..6.0)).then(&Transform::translation(1.0, -2.0, 0.5));
        let placed = to_prim(&v, &f).with_transform(t);
        let plane = random_plane(&mut rng, 2.0);
        if let Some(p) = clip_polyhedron(&placed, &plane).unwrap() {
            for q in p.placed_vertices() {
                prop_assert!(plane.distance(&q) <= 1e-9);
            }
        }
    }

    #[test]
    fn binned_energy_equals_accepted_energy(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let deposits: Vec<EnergyDeposit> = (0..rng.gen_range(0..60))
            .map(|_| {
                let on_axis = rng.gen_bool(0.1);
                let (x, y) = if on_axis { (0.0, 0.0) } else { (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)) };
                EnergyDeposit::new(x, y, rng.gen_range(-5.0..5.0), rng.gen_range(0.0..10.0))
            })
            .collect();
        let map = eta_phi_project(&deposits, 0.1, 0.1).unwrap();
        let accepted: f64 = deposits
            .iter()
            .enumerate()
            .filter(|(i, _)| !map.rejected.contains(i))
            .map(|(_, d)| d.energy)
            .sum();
        prop_assert!((map.total_energy() - accepted).abs() <= 1e-9 * accepted.max(1.0));
        for &i in &map.rejected {
            let p = deposits[i].position;
            prop_assert!(p.x == 0.0 && p.y == 0.0);
        }
    }

    #[test]
    fn scene_fixture_round_trips(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut scene = SceneGraph::new();
        for i in 0..rng.gen_range(0..6u32) {
            let path = format!("/n{i}");
            scene.add_node(&path, Transform::translation(rng.gen_range(-5.0..5.0), 0.25, -1.5)).unwrap();
            let a = Point3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), 0.0);
            let prims = &mut scene.node_mut(&path).unwrap().primitives;
            prims.push(Primitive::cuboid(i * 3, ReprId(i as u64), a, a + Vector3::new(1.0, 2.0, 3.0), Rgba::BLUE));
            prims.push(Primitive::polyline(i * 3 + 1, ReprId(i as u64), vec![a, Point3::origin()], Rgba::RED));
            prims.push(Primitive::text_label(i * 3 + 2, ReprId(i as u64), a, format!("label {i}"), Rgba::CYAN));
        }
        let text = write_scene(&scene);
        let back = parse_scene(&text).unwrap();
        prop_assert_eq!(&back, &scene);
        prop_assert_eq!(write_scene(&back), text);
    }
}

#[test]
fn unit_cube_halved() {
    let (v, f) = polyhedra::cuboid([0.0; 3], [1.0; 3]);
    let half = clip_polyhedron(&to_prim(&v, &f), &Plane::new(Vector3::x(), 0.5).unwrap()).unwrap();
    assert!((volume(&half) - 0.5).abs() <= 1e-12);
}
