use std::io::Write;

use super::{num, VectorDoc, VgError, PT_PER_MM};

/// Encapsulated PostScript, one filled (or stroked) path per primitive.
/// Translucency is not representable and is dropped.
pub fn write_eps(doc: &VectorDoc, sink: &mut dyn Write) -> Result<(), VgError> {
    let (w, h) = doc.page_size();
    let mut out = String::new();
    out.push_str("%!PS-Adobe-3.0 EPSF-3.0\n");
    out.push_str(&format!("%%BoundingBox: 0 0 {} {}\n", w.ceil() as i64, h.ceil() as i64));
    out.push_str(&format!("%%HiResBoundingBox: 0.000 0.000 {} {}\n", num(w), num(h)));
    out.push_str("%%LanguageLevel: 2\n%%Pages: 1\n%%EndComments\n");
    out.push_str("1 setlinecap 1 setlinejoin\n");
    out.push_str(&format!("{} setlinewidth\n", num(doc.stroke_mm * PT_PER_MM)));
    for prim in &doc.prims {
        if prim.outline.is_empty() {
            continue;
        }
        let c = prim.color;
        out.push_str(&format!(
            "{} {} {} setrgbcolor\nnewpath",
            num(c.r.clamp(0.0, 1.0)),
            num(c.g.clamp(0.0, 1.0)),
            num(c.b.clamp(0.0, 1.0))
        ));
        for (i, p) in prim.outline.iter().enumerate() {
            let (x, y) = doc.to_page_bottom_left(p);
            out.push_str(&format!(" {} {} {}", num(x), num(y), if i == 0 { "moveto" } else { "lineto" }));
        }
        out.push_str(if prim.is_area() { " closepath fill\n" } else { " stroke\n" });
    }
    out.push_str("showpage\n%%EOF\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}
