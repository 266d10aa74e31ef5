//! Line-oriented text format for scenes. The grammar is described in
//! `docs/formats.md`.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Point3, Vector3};

use super::{PrimKind, Primitive, Rgba, SceneError, SceneGraph, Transform};
use crate::repkit::ReprId;

enum Target {
    Node(String),
    Prim,
}

fn fail(line: usize, reason: impl Into<String>) -> SceneError {
    SceneError::Fixture {
        line,
        reason: reason.into(),
    }
}

fn numbers(line: usize, fields: &[&str]) -> Result<Vec<f64>, SceneError> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| fail(line, format!("bad number {f:?}")))
        })
        .collect()
}

struct Pending {
    line: usize,
    node: String,
    prim: Primitive,
}

fn finish(scene: &mut SceneGraph, pending: Option<Pending>) -> Result<(), SceneError> {
    if let Some(p) = pending {
        if !p.prim.is_well_formed() {
            return Err(fail(p.line, format!("malformed {}", p.prim.kind.name())));
        }
        scene.ensure_node(&p.node).primitives.push(p.prim);
    }
    Ok(())
}

pub fn parse_scene(text: &str) -> Result<SceneGraph, SceneError> {
    let mut scene = SceneGraph::new();
    let mut node = "/".to_string();
    let mut target = Target::Node(node.clone());
    let mut pending: Option<Pending> = None;
    let mut next_prim_id = 0u32;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match fields[0] {
            "node" => {
                finish(&mut scene, pending.take())?;
                let [_, path] = fields[..] else {
                    return Err(fail(line, "expected `node <path>`"));
                };
                if !path.starts_with('/') || (path.len() > 1 && path.ends_with('/')) || path.contains("//") {
                    return Err(fail(line, format!("bad node path {path:?}")));
                }
                scene.ensure_node(path);
                node = path.to_string();
                target = Target::Node(node.clone());
            }
            "prim" => {
                finish(&mut scene, pending.take())?;
                if !(5..=6).contains(&fields.len()) {
                    return Err(fail(line, "expected `prim <kind> <pickId> <rgba> <opaque> [primId]`"));
                }
                let kind = PrimKind::from_name(fields[1])
                    .ok_or_else(|| fail(line, format!("unknown kind {:?}", fields[1])))?;
                let pick: u64 = fields[2].parse().map_err(|_| fail(line, "bad pick id"))?;
                let color = Rgba::from_hex(fields[3]).ok_or_else(|| fail(line, "bad colour"))?;
                let opaque = match fields[4] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(fail(line, "opaque flag must be 0 or 1")),
                };
                let prim_id = match fields.get(5) {
                    Some(f) => f.parse().map_err(|_| fail(line, "bad prim id"))?,
                    None => next_prim_id,
                };
                next_prim_id = prim_id.saturating_add(1);
                let mut prim = Primitive::polyline(prim_id, ReprId(pick), Vec::new(), color).with_opaque(opaque);
                prim.kind = kind;
                pending = Some(Pending {
                    line,
                    node: node.clone(),
                    prim,
                });
                target = Target::Prim;
            }
            "transform" => {
                let v = numbers(line, &fields[1..])?;
                if v.len() != 12 {
                    return Err(fail(line, "transform takes 9 rotation and 3 translation values"));
                }
                let rotation = Matrix3::from_row_slice(&v[..9]);
                let t = Transform::new(rotation, Vector3::new(v[9], v[10], v[11]))
                    .map_err(|e| fail(line, e.to_string()))?;
                match &target {
                    Target::Node(path) => scene.ensure_node(path).transform = t,
                    Target::Prim => pending.as_mut().expect("prim target").prim.transform = t,
                }
            }
            "v" | "f" | "label" => {
                let Some(p) = pending.as_mut() else {
                    return Err(fail(line, format!("`{}` outside a prim", fields[0])));
                };
                match fields[0] {
                    "v" => {
                        let v = numbers(line, &fields[1..])?;
                        let [x, y, z] = v[..] else {
                            return Err(fail(line, "vertex takes 3 coordinates"));
                        };
                        p.prim.vertices.push(Point3::new(x, y, z));
                    }
                    "f" => {
                        let face = fields[1..]
                            .iter()
                            .map(|f| f.parse::<usize>())
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| fail(line, "bad face index"))?;
                        if face.len() < 3 {
                            return Err(fail(line, "face needs at least 3 indices"));
                        }
                        p.prim.faces.push(face);
                    }
                    _ => {
                        let text = trimmed["label".len()..].trim();
                        p.prim.label = Some(text.to_string());
                    }
                }
            }
            other => return Err(fail(line, format!("unknown directive {other:?}"))),
        }
    }
    finish(&mut scene, pending)?;
    Ok(scene)
}

fn write_transform(out: &mut String, t: &Transform) {
    let r = t.rotation();
    let d = t.translation_part();
    out.push_str("transform");
    for i in 0..3 {
        for j in 0..3 {
            let _ = write!(out, " {}", r[(i, j)]);
        }
    }
    let _ = writeln!(out, " {} {} {}", d.x, d.y, d.z);
}

/// Inverse of [`parse_scene`]. Colours are quantised to 8 bits per channel.
pub fn write_scene(scene: &SceneGraph) -> String {
    let mut out = String::new();
    for (path, node) in scene.nodes() {
        if path == "/" && node.transform.is_identity() && node.primitives.is_empty() {
            continue;
        }
        let _ = writeln!(out, "node {path}");
        if !node.transform.is_identity() {
            write_transform(&mut out, &node.transform);
        }
        for prim in &node.primitives {
            let _ = writeln!(
                out,
                "prim {} {} {} {} {}",
                prim.kind.name(),
                prim.pick_id.0,
                prim.color.hex_rgba(),
                u8::from(prim.opaque),
                prim.prim_id
            );
            if !prim.transform.is_identity() {
                write_transform(&mut out, &prim.transform);
            }
            if let Some(label) = &prim.label {
                let _ = writeln!(out, "label {label}");
            }
            for v in &prim.vertices {
                let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
            }
            for f in &prim.faces {
                out.push('f');
                for i in f {
                    let _ = write!(out, " {i}");
                }
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two nodes
node /Detector
transform 0 -1 0 1 0 0 0 0 1 10 0 0
prim polyhedron 7 999999FF 1
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
f 0 2 1
f 0 1 3
f 0 3 2
f 1 2 3
node /Event/Tracks
prim polyline 3 FF0000FF 1
v 0 0 0
v 1 2 3
prim textLabel 4 00FF0080 0
label hello world
v 1 1 1
";

    #[test]
    fn parse_sample() {
        let scene = parse_scene(SAMPLE).unwrap();
        assert_eq!(scene.primitive_count(), 3);
        let det = scene.node("/Detector").unwrap();
        assert!(!det.transform.is_identity());
        assert_eq!(det.primitives[0].prim_id, 0);
        assert_eq!(det.primitives[0].pick_id, ReprId(7));
        assert!(scene.node("/Event").is_some());
        let tracks = &scene.node("/Event/Tracks").unwrap().primitives;
        assert_eq!(tracks[1].label.as_deref(), Some("hello world"));
        assert!(!tracks[1].opaque);
        assert_eq!(tracks[1].prim_id, 2);
    }

    #[test]
    fn round_trip() {
        let scene = parse_scene(SAMPLE).unwrap();
        let text = write_scene(&scene);
        assert_eq!(parse_scene(&text).unwrap(), scene);
        assert_eq!(write_scene(&parse_scene(&text).unwrap()), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("v 0 0 0\n", 1),
            ("node /a\nprim blob 1 FF0000 1\n", 2),
            ("prim marker 1 FF0000 2\n", 1),
            ("prim marker 1 FF0000 1\nv 0 0\n", 2),
            ("prim polyline 1 FF0000 1\nv 0 0 0\n", 1),
            ("node /a\ntransform 2 0 0 0 1 0 0 0 1 0 0 0\n", 2),
            ("\n\nbogus\n", 3),
        ];
        for (text, line) in cases {
            match parse_scene(text) {
                Err(SceneError::Fixture { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
