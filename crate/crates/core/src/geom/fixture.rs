//! Line-oriented geometry format; see `docs/formats.md`.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Point3, Vector3};

use super::{GeomError, LogicalVolume, Solid, VolumeTree};
use crate::scene::Transform;

fn fail(line: usize, reason: impl Into<String>) -> GeomError {
    GeomError::Fixture {
        line,
        reason: reason.into(),
    }
}

fn numbers(line: usize, fields: &[&str]) -> Result<Vec<f64>, GeomError> {
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

struct PendingPlace {
    line: usize,
    mother: String,
    logical: String,
    copy: u32,
    transform: Transform,
}

pub fn parse_geometry(text: &str) -> Result<VolumeTree, GeomError> {
    let mut volumes: Vec<(usize, LogicalVolume)> = Vec::new();
    let mut places = Vec::new();
    let mut root: Option<(usize, String)> = None;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match fields[0] {
            "logical" => {
                let [_, name, material, sensitive] = fields[..] else {
                    return Err(fail(line, "expected `logical <name> <material> <0|1>`"));
                };
                let sensitive = match sensitive {
                    "0" => false,
                    "1" => true,
                    _ => return Err(fail(line, "sensitive flag must be 0 or 1")),
                };
                let empty = Solid {
                    vertices: Vec::new(),
                    faces: Vec::new(),
                };
                volumes.push((line, LogicalVolume::new(name, material, sensitive, empty)));
            }
            "v" | "f" | "box" => {
                let Some((_, lv)) = volumes.last_mut() else {
                    return Err(fail(line, format!("`{}` before any logical", fields[0])));
                };
                match fields[0] {
                    "v" => {
                        let v = numbers(line, &fields[1..])?;
                        let [x, y, z] = v[..] else {
                            return Err(fail(line, "vertex takes 3 coordinates"));
                        };
                        lv.solid.vertices.push(Point3::new(x, y, z));
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
                        lv.solid.faces.push(face);
                    }
                    _ => {
                        let v = numbers(line, &fields[1..])?;
                        let [hx, hy, hz] = v[..] else {
                            return Err(fail(line, "box takes 3 half-lengths"));
                        };
                        if !lv.solid.vertices.is_empty() || !(hx > 0.0 && hy > 0.0 && hz > 0.0) {
                            return Err(fail(line, "box needs positive half-lengths and no other shape lines"));
                        }
                        lv.solid = Solid::cuboid(hx, hy, hz);
                    }
                }
            }
            "place" => {
                if fields.len() != 7 && fields.len() != 16 {
                    return Err(fail(line, "expected `place <mother> <logical> <copy> tx ty tz [9 rotation values]`"));
                }
                let copy = fields[3].parse().map_err(|_| fail(line, "bad copy number"))?;
                let v = numbers(line, &fields[4..])?;
                let rotation = if v.len() == 12 {
                    Matrix3::from_row_slice(&v[3..])
                } else {
                    Matrix3::identity()
                };
                let transform = Transform::new(rotation, Vector3::new(v[0], v[1], v[2]))
                    .map_err(|e| fail(line, e.to_string()))?;
                places.push(PendingPlace {
                    line,
                    mother: fields[1].to_string(),
                    logical: fields[2].to_string(),
                    copy,
                    transform,
                });
            }
            "root" => {
                let [_, name] = fields[..] else {
                    return Err(fail(line, "expected `root <logical>`"));
                };
                if root.is_some() {
                    return Err(fail(line, "root declared twice"));
                }
                root = Some((line, name.to_string()));
            }
            other => return Err(fail(line, format!("unknown directive {other:?}"))),
        }
    }

    let mut tree = VolumeTree::new();
    for (line, lv) in volumes {
        tree.add_logical(lv).map_err(|e| fail(line, e.to_string()))?;
    }
    for p in places {
        tree.place(&p.mother, &p.logical, p.copy, p.transform)
            .map_err(|e| fail(p.line, e.to_string()))?;
    }
    let (line, name) = root.ok_or(GeomError::NoRoot)?;
    tree.set_root(&name).map_err(|e| fail(line, e.to_string()))?;
    tree.validate()?;
    Ok(tree)
}

pub fn write_geometry(tree: &VolumeTree) -> String {
    let mut out = String::new();
    if let Ok(root) = tree.root() {
        let _ = writeln!(out, "root {}", root.name);
    }
    for lv in tree.logicals() {
        let _ = writeln!(out, "logical {} {} {}", lv.name, lv.material, u8::from(lv.sensitive));
        for v in &lv.solid.vertices {
            let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
        }
        for f in &lv.solid.faces {
            out.push('f');
            for i in f {
                let _ = write!(out, " {i}");
            }
            out.push('\n');
        }
    }
    for lv in tree.logicals() {
        for d in &lv.daughters {
            let t = d.transform.translation_part();
            let _ = write!(out, "place {} {} {} {} {} {}", lv.name, d.logical, d.copy, t.x, t.y, t.z);
            if !d.transform.rotation().is_identity(0.0) {
                let r = d.transform.rotation();
                for i in 0..3 {
                    for j in 0..3 {
                        let _ = write!(out, " {}", r[(i, j)]);
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}
