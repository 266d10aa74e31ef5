use nalgebra::Point3;

use super::Transform;
use crate::repkit::ReprId;

/// Linear RGBA colour, channels in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rgba {
    pub r: f64,
    pub g: f64,
    pub b: f64,
    pub a: f64,
}

impl Rgba {
    pub const RED: Rgba = Rgba::new(1.0, 0.0, 0.0, 1.0);
    pub const GREEN: Rgba = Rgba::new(0.0, 1.0, 0.0, 1.0);
    pub const BLUE: Rgba = Rgba::new(0.0, 0.0, 1.0, 1.0);
    pub const CYAN: Rgba = Rgba::new(0.0, 1.0, 1.0, 1.0);
    pub const GREY: Rgba = Rgba::new(0.6, 0.6, 0.6, 1.0);

    pub const fn new(r: f64, g: f64, b: f64, a: f64) -> Self {
        Self { r, g, b, a }
    }

    pub fn with_alpha(self, a: f64) -> Self {
        Self { a, ..self }
    }

    fn byte(c: f64) -> u8 {
        (c.clamp(0.0, 1.0) * 255.0).round() as u8
    }

    /// `#RRGGBB`, upper case.
    pub fn hex_rgb(&self) -> String {
        format!(
            "#{:02X}{:02X}{:02X}",
            Self::byte(self.r),
            Self::byte(self.g),
            Self::byte(self.b)
        )
    }

    /// `RRGGBBAA` without the leading `#`.
    pub fn hex_rgba(&self) -> String {
        format!("{}{:02X}", &self.hex_rgb()[1..], Self::byte(self.a))
    }

    /// Parses `RRGGBB` or `RRGGBBAA`, with or without a leading `#`.
    pub fn from_hex(text: &str) -> Option<Rgba> {
        let s = text.strip_prefix('#').unwrap_or(text);
        if !(s.len() == 6 || s.len() == 8) || !s.is_ascii() {
            return None;
        }
        let channel = |i: usize| u8::from_str_radix(&s[i..i + 2], 16).ok().map(|v| v as f64 / 255.0);
        let a = if s.len() == 8 { channel(6)? } else { 1.0 };
        Some(Rgba::new(channel(0)?, channel(2)?, channel(4)?, a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimKind {
    Polyhedron,
    Polyline,
    Marker,
    TextLabel,
}

impl PrimKind {
    pub fn name(self) -> &'static str {
        match self {
            PrimKind::Polyhedron => "polyhedron",
            PrimKind::Polyline => "polyline",
            PrimKind::Marker => "marker",
            PrimKind::TextLabel => "textLabel",
        }
    }

    pub fn from_name(name: &str) -> Option<PrimKind> {
        Some(match name {
            "polyhedron" => PrimKind::Polyhedron,
            "polyline" => PrimKind::Polyline,
            "marker" => PrimKind::Marker,
            "textLabel" => PrimKind::TextLabel,
            _ => return None,
        })
    }
}

/// A drawable item. `pick_id` is the id of the representable it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub prim_id: u32,
    pub pick_id: ReprId,
    pub kind: PrimKind,
    pub vertices: Vec<Point3<f64>>,
    /// Vertex index loops, counter-clockwise seen from outside.
    pub faces: Vec<Vec<usize>>,
    pub color: Rgba,
    pub opaque: bool,
    pub transform: Transform,
    pub label: Option<String>,
}

impl Primitive {
    fn base(prim_id: u32, pick_id: ReprId, kind: PrimKind, vertices: Vec<Point3<f64>>, color: Rgba) -> Self {
        Self {
            prim_id,
            pick_id,
            kind,
            vertices,
            faces: Vec::new(),
            color,
            opaque: color.a >= 1.0,
            transform: Transform::identity(),
            label: None,
        }
    }

    pub fn polyhedron(
        prim_id: u32,
        pick_id: ReprId,
        vertices: Vec<Point3<f64>>,
        faces: Vec<Vec<usize>>,
        color: Rgba,
    ) -> Self {
        Self {
            faces,
            ..Self::base(prim_id, pick_id, PrimKind::Polyhedron, vertices, color)
        }
    }

    /// Axis-aligned box between two corners.
    pub fn cuboid(prim_id: u32, pick_id: ReprId, min: Point3<f64>, max: Point3<f64>, color: Rgba) -> Self {
        let vertices = vec![
            Point3::new(min.x, min.y, min.z),
            Point3::new(max.x, min.y, min.z),
            Point3::new(max.x, max.y, min.z),
            Point3::new(min.x, max.y, min.z),
            Point3::new(min.x, min.y, max.z),
            Point3::new(max.x, min.y, max.z),
            Point3::new(max.x, max.y, max.z),
            Point3::new(min.x, max.y, max.z),
        ];
        let faces = vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![2, 3, 7, 6],
            vec![1, 2, 6, 5],
            vec![0, 4, 7, 3],
        ];
        Self::polyhedron(prim_id, pick_id, vertices, faces, color)
    }

    pub fn polyline(prim_id: u32, pick_id: ReprId, vertices: Vec<Point3<f64>>, color: Rgba) -> Self {
        Self::base(prim_id, pick_id, PrimKind::Polyline, vertices, color)
    }

    pub fn marker(prim_id: u32, pick_id: ReprId, position: Point3<f64>, color: Rgba) -> Self {
        Self::base(prim_id, pick_id, PrimKind::Marker, vec![position], color)
    }

    pub fn text_label(prim_id: u32, pick_id: ReprId, position: Point3<f64>, text: impl Into<String>, color: Rgba) -> Self {
        Self {
            label: Some(text.into()),
            ..Self::base(prim_id, pick_id, PrimKind::TextLabel, vec![position], color)
        }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_opaque(mut self, opaque: bool) -> Self {
        self.opaque = opaque;
        self
    }

    /// Vertices with the primitive's own transform applied.
    pub fn placed_vertices(&self) -> Vec<Point3<f64>> {
        self.vertices.iter().map(|v| self.transform.apply(v)).collect()
    }

    /// Copy with `outer ∘ transform` baked into the vertices.
    pub fn baked(&self, outer: &Transform) -> Primitive {
        let t = outer.then(&self.transform);
        Primitive {
            vertices: self.vertices.iter().map(|v| t.apply(v)).collect(),
            transform: Transform::identity(),
            ..self.clone()
        }
    }

    /// Checks the structural invariants of the primitive's kind.
    pub fn is_well_formed(&self) -> bool {
        match self.kind {
            PrimKind::Polyline => self.vertices.len() >= 2,
            PrimKind::Marker | PrimKind::TextLabel => self.vertices.len() == 1,
            PrimKind::Polyhedron => {
                self.faces.len() >= 4
                    && self
                        .faces
                        .iter()
                        .all(|f| f.len() >= 3 && f.iter().all(|&i| i < self.vertices.len()))
                    && faces_closed(&self.faces)
            }
        }
    }
}

/// Each directed edge appears once and is matched by its reverse.
pub(crate) fn faces_closed(faces: &[Vec<usize>]) -> bool {
    use std::collections::HashMap;
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for face in faces {
        for (i, &a) in face.iter().enumerate() {
            let b = face[(i + 1) % face.len()];
            *edges.entry((a, b)).or_default() += 1;
        }
    }
    edges
        .iter()
        .all(|(&(a, b), &n)| n == 1 && edges.get(&(b, a)) == Some(&1))
}
