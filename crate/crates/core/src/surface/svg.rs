use std::fmt::Write;

use super::{Segment, TranslationSurface};

const SCALE: f64 = 100.0;
const GAP: f64 = 0.5;

/// Draws the polygons side by side with gluing labels, marked points and,
/// optionally, segments developed from their start points.
pub fn render_svg(s: &TranslationSurface, segments: &[Segment]) -> String {
    let mut shift = Vec::new();
    let mut x0 = 0.0;
    let (mut ymin, mut ymax) = (f64::MAX, f64::MIN);
    for poly in &s.polygons {
        let xs: Vec<f64> = poly.iter().map(|v| v.x.to_f64()).collect();
        let lo = xs.iter().cloned().fold(f64::MAX, f64::min);
        let hi = xs.iter().cloned().fold(f64::MIN, f64::max);
        for v in poly {
            ymin = ymin.min(v.y.to_f64());
            ymax = ymax.max(v.y.to_f64());
        }
        shift.push(x0 - lo);
        x0 += hi - lo + GAP;
    }
    let width = (x0 + GAP) * SCALE;
    let height = (ymax - ymin + 2.0 * GAP) * SCALE;
    let pt = |p: usize, x: f64, y: f64| ((x + shift[p] + GAP) * SCALE, (ymax - y + GAP) * SCALE);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    )
    .unwrap();
    for (i, poly) in s.polygons.iter().enumerate() {
        let pts: Vec<String> = poly
            .iter()
            .map(|v| {
                let (x, y) = pt(i, v.x.to_f64(), v.y.to_f64());
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            out,
            r##"<polygon points="{}" fill="#eef3fb" stroke="#234" stroke-width="1.5"/>"##,
            pts.join(" ")
        )
        .unwrap();
    }
    for (g, &(a, b)) in s.gluings.iter().enumerate() {
        for (p, e) in [a, b] {
            let u = s.vertex(p, e);
            let w = s.vertex(p, e + 1);
            let (x, y) = pt(
                p,
                (u.x.to_f64() + w.x.to_f64()) / 2.0,
                (u.y.to_f64() + w.y.to_f64()) / 2.0,
            );
            writeln!(
                out,
                r##"<text x="{x:.2}" y="{y:.2}" font-size="11" fill="#a33">{g}</text>"##
            )
            .unwrap();
        }
    }
    for seg in segments {
        let p = seg.start.polygon;
        let (sx, sy) = seg.start.point.to_f64();
        let (hx, hy) = seg.holonomy.to_f64();
        let (x1, y1) = pt(p, sx, sy);
        let (x2, y2) = pt(p, sx + hx, sy + hy);
        writeln!(
            out,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#2a7" stroke-opacity="0.6"/>"##
        )
        .unwrap();
    }
    for m in &s.marked_points {
        let (x, y) = m.at.point.to_f64();
        let (x, y) = pt(m.at.polygon, x, y);
        writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#111"/>"##).unwrap();
        writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"##,
            x + 5.0,
            y - 5.0,
            m.label
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::tests::square_torus;

    #[test]
    fn draws_polygons_and_labels() {
        let svg = render_svg(&square_torus(), &[]);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<text").count(), 4);
    }
}
