use std::io::Write;

use super::{num, VectorDoc, VgError, PT_PER_MM};
use crate::scene::Prim2D;

fn path_data(doc: &VectorDoc, prim: &Prim2D) -> String {
    let mut d = String::new();
    for (i, p) in prim.outline.iter().enumerate() {
        let (x, y) = doc.to_page_top_left(p);
        d.push_str(if i == 0 { "M" } else { " L" });
        d.push_str(&format!(" {} {}", num(x), num(y)));
    }
    if prim.is_area() {
        d.push_str(" Z");
    }
    d
}

/// SVG 1.1, one `path` per primitive in paint order.
pub fn write_svg(doc: &VectorDoc, sink: &mut dyn Write) -> Result<(), VgError> {
    let (w, h) = doc.page_size();
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}pt\" height=\"{h}pt\" viewBox=\"0 0 {w} {h}\">\n",
        w = num(w),
        h = num(h)
    ));
    for prim in &doc.prims {
        if prim.outline.is_empty() {
            continue;
        }
        let colour = prim.color.hex_rgb();
        let alpha = prim.color.a.clamp(0.0, 1.0);
        if prim.is_area() {
            out.push_str(&format!("<path d=\"{}\" fill=\"{colour}\"", path_data(doc, prim)));
            if alpha < 1.0 {
                out.push_str(&format!(" fill-opacity=\"{}\"", num(alpha)));
            }
        } else {
            out.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"{}\" stroke-linecap=\"round\" stroke-linejoin=\"round\"",
                path_data(doc, prim),
                num(doc.stroke_mm * PT_PER_MM)
            ));
            if alpha < 1.0 {
                out.push_str(&format!(" stroke-opacity=\"{}\"", num(alpha)));
            }
        }
        out.push_str("/>\n");
    }
    out.push_str("</svg>\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}
