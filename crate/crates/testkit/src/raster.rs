//! Reference rasterizer for the SVG subset the exporter writes: `path`
//! elements made of `M`/`L`/`Z`, flat fills and round-capped strokes.
//!
//! Pixels are sampled once at their centres, fills use the even-odd rule,
//! and colours are blended source-over onto white.

use roxmltree::{Document, Node};

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[f64; 3]>,
}

impl Image {
    fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![[1.0; 3]; width * height],
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    /// Number of pixels that are not white.
    pub fn inked(&self) -> usize {
        self.pixels.iter().filter(|p| **p != [1.0; 3]).count()
    }
}

type Pt = (f64, f64);

fn parse_colour(text: &str) -> Result<[f64; 3], String> {
    let hex = text.strip_prefix('#').ok_or_else(|| format!("colour {text:?}"))?;
    if hex.len() != 6 {
        return Err(format!("colour {text:?}"));
    }
    let mut out = [0.0; 3];
    for (i, c) in out.iter_mut().enumerate() {
        *c = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|e| e.to_string())? as f64 / 255.0;
    }
    Ok(out)
}

/// Splits path data into subpaths; the flag marks closed ones.
fn parse_path(d: &str) -> Result<Vec<(Vec<Pt>, bool)>, String> {
    let mut subpaths: Vec<(Vec<Pt>, bool)> = Vec::new();
    let mut tokens = d.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        match tok {
            "M" | "L" => {
                let x: f64 = tokens.next().ok_or("missing x")?.parse().map_err(|e| format!("{e}"))?;
                let y: f64 = tokens.next().ok_or("missing y")?.parse().map_err(|e| format!("{e}"))?;
                if tok == "M" || subpaths.is_empty() {
                    subpaths.push((Vec::new(), false));
                }
                subpaths.last_mut().expect("pushed").0.push((x, y));
            }
            "Z" => subpaths.last_mut().ok_or("Z without subpath")?.1 = true,
            other => return Err(format!("unsupported path token {other:?}")),
        }
    }
    Ok(subpaths)
}

fn even_odd(polys: &[Vec<Pt>], p: Pt) -> bool {
    let mut inside = false;
    for poly in polys {
        let n = poly.len();
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            if (a.1 > p.1) != (b.1 > p.1) {
                let x = a.0 + (p.1 - a.1) / (b.1 - a.1) * (b.0 - a.0);
                if p.0 < x {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

fn segment_distance(p: Pt, a: Pt, b: Pt) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

fn number_attr(node: &Node, name: &str, default: f64) -> Result<f64, String> {
    match node.attribute(name) {
        Some(v) => v
            .trim_end_matches("pt")
            .parse()
            .map_err(|_| format!("attribute {name}={v:?}")),
        None => Ok(default),
    }
}

fn blend(img: &mut Image, x: usize, y: usize, colour: [f64; 3], alpha: f64) {
    let px = &mut img.pixels[y * img.width + x];
    for k in 0..3 {
        px[k] = alpha * colour[k] + (1.0 - alpha) * px[k];
    }
}

/// Renders `svg` at `width` × `height`, stretching its viewBox to fit.
pub fn rasterize_svg(svg: &str, width: usize, height: usize) -> Result<Image, String> {
    let doc = Document::parse(svg).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err("root element is not svg".into());
    }
    let vb: Vec<f64> = root
        .attribute("viewBox")
        .ok_or("missing viewBox")?
        .split_whitespace()
        .map(|s| s.parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let [vx, vy, vw, vh] = vb[..] else {
        return Err("viewBox needs 4 numbers".into());
    };
    let (sx, sy) = (width as f64 / vw, height as f64 / vh);
    let mut img = Image::new(width, height);

    for node in root.descendants().filter(|n| n.is_element() && n.tag_name().name() == "path") {
        let subpaths: Vec<(Vec<Pt>, bool)> = parse_path(node.attribute("d").ok_or("path without d")?)?
            .into_iter()
            .map(|(pts, closed)| (pts.into_iter().map(|(x, y)| ((x - vx) * sx, (y - vy) * sy)).collect(), closed))
            .collect();
        let all: Vec<Pt> = subpaths.iter().flat_map(|(p, _)| p.iter().copied()).collect();
        if all.is_empty() {
            continue;
        }
        let fill = node.attribute("fill").unwrap_or("#000000");
        let stroke = node.attribute("stroke").unwrap_or("none");
        let half = number_attr(&node, "stroke-width", 1.0)? * (sx + sy) / 4.0;
        let pad = if stroke == "none" { 0.0 } else { half };
        let lo_x = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - pad;
        let hi_x = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) + pad;
        let lo_y = all.iter().map(|p| p.1).fold(f64::INFINITY, f64::min) - pad;
        let hi_y = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) + pad;
        let range = |lo: f64, hi: f64, n: usize| {
            let a = (lo - 0.5).ceil().max(0.0) as usize;
            let b = ((hi - 0.5).floor() + 1.0).clamp(0.0, n as f64) as usize;
            a..b
        };

        if fill != "none" {
            let colour = parse_colour(fill)?;
            let alpha = number_attr(&node, "fill-opacity", 1.0)?;
            let polys: Vec<Vec<Pt>> = subpaths.iter().map(|(p, _)| p.clone()).collect();
            for y in range(lo_y, hi_y, height) {
                for x in range(lo_x, hi_x, width) {
                    if even_odd(&polys, (x as f64 + 0.5, y as f64 + 0.5)) {
                        blend(&mut img, x, y, colour, alpha);
                    }
                }
            }
        }
        if stroke != "none" {
            let colour = parse_colour(stroke)?;
            let alpha = number_attr(&node, "stroke-opacity", 1.0)?;
            for y in range(lo_y, hi_y, height) {
                for x in range(lo_x, hi_x, width) {
                    let p = (x as f64 + 0.5, y as f64 + 0.5);
                    let hit = subpaths.iter().any(|(pts, closed)| {
                        let n = pts.len();
                        let segs = if *closed { n } else { n.saturating_sub(1) };
                        (n == 1 && segment_distance(p, pts[0], pts[0]) <= half)
                            || (0..segs).any(|i| segment_distance(p, pts[i], pts[(i + 1) % n]) <= half)
                    });
                    if hit {
                        blend(&mut img, x, y, colour, alpha);
                    }
                }
            }
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="10pt" height="10pt" viewBox="0 0 10 10">"#;

    #[test]
    fn square_covers_expected_pixels() {
        let svg = format!(r##"{HEAD}<path d="M 0 0 L 5 0 L 5 5 L 0 5 Z" fill="#FF0000"/></svg>"##);
        let img = rasterize_svg(&svg, 10, 10).unwrap();
        assert_eq!(img.inked(), 25);
        assert_eq!(img.pixel(0, 0), [1.0, 0.0, 0.0]);
        assert_eq!(img.pixel(5, 5), [1.0; 3]);
    }

    #[test]
    fn translucent_blend() {
        let svg = format!(r##"{HEAD}<path d="M 0 0 L 10 0 L 10 10 L 0 10 Z" fill="#0000FF" fill-opacity="0.5"/></svg>"##);
        let img = rasterize_svg(&svg, 4, 4).unwrap();
        assert_eq!(img.pixel(1, 1), [0.5, 0.5, 1.0]);
    }

    #[test]
    fn later_paths_paint_over() {
        let svg = format!(
            r##"{HEAD}<path d="M 0 0 L 10 0 L 10 10 L 0 10 Z" fill="#FF0000"/><path d="M 0 0 L 10 0 L 10 10 L 0 10 Z" fill="#00FF00"/></svg>"##
        );
        let img = rasterize_svg(&svg, 3, 3).unwrap();
        assert!(img.pixels.iter().all(|p| *p == [0.0, 1.0, 0.0]));
    }

    #[test]
    fn stroke_band() {
        let svg = format!(r##"{HEAD}<path d="M 0 5 L 10 5" fill="none" stroke="#000000" stroke-width="2"/></svg>"##);
        let img = rasterize_svg(&svg, 10, 10).unwrap();
        // centres at y = 4.5 and 5.5 lie within 1 of the line
        assert_eq!(img.inked(), 20);
    }

    #[test]
    fn rejects_unknown_commands() {
        let svg = format!(r##"{HEAD}<path d="M 0 0 C 1 1 2 2 3 3" fill="#000000"/></svg>"##);
        assert!(rasterize_svg(&svg, 4, 4).is_err());
    }
}
