//! SVG output: geodesics as circular arcs orthogonal to the unit circle.
//!
//! Coordinates are written with fixed precision so identical inputs give
//! identical bytes.

use std::fmt::Write as _;

use crate::fuchsian::FundamentalPolygon;
use crate::hypgeom::{DiskPoint, Mobius};

const SIZE: f64 = 800.0;

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Centre and radius of the circle through `p`, `q` orthogonal to the unit
/// circle, or `None` when the geodesic is a diameter.
pub fn geodesic_circle(p: DiskPoint, q: DiskPoint) -> Option<([f64; 2], f64)> {
    let det = p.x * q.y - p.y * q.x;
    if det.abs() < 1e-12 * (1.0 + p.norm_sqr() + q.norm_sqr()) {
        return None;
    }
    // 2 c·p = |p|² + 1 and 2 c·q = |q|² + 1
    let (bp, bq) = ((p.norm_sqr() + 1.0) / 2.0, (q.norm_sqr() + 1.0) / 2.0);
    let cx = (bp * q.y - bq * p.y) / det;
    let cy = (p.x * bq - q.x * bp) / det;
    let r = ((cx - p.x).powi(2) + (cy - p.y).powi(2)).sqrt();
    Some(([cx, cy], r))
}

/// Path data in disk coordinates.
pub fn geodesic_path(p: DiskPoint, q: DiskPoint) -> String {
    match geodesic_circle(p, q) {
        None => format!("M{} {}L{} {}", num(p.x), num(p.y), num(q.x), num(q.y)),
        Some((c, r)) => {
            let cross = (p.x - c[0]) * (q.y - c[1]) - (p.y - c[1]) * (q.x - c[0]);
            let sweep = u8::from(cross > 0.0);
            // very flat arcs render as lines; SVG arc parameters lose precision there
            if r > 1e4 {
                format!("M{} {}L{} {}", num(p.x), num(p.y), num(q.x), num(q.y))
            } else {
                format!(
                    "M{} {}A{} {} 0 0 {} {} {}",
                    num(p.x),
                    num(p.y),
                    num(r),
                    num(r),
                    sweep,
                    num(q.x),
                    num(q.y)
                )
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SvgScene {
    layers: Vec<(String, String, Vec<String>)>,
}

impl SvgScene {
    pub fn new() -> Self {
        Self::default()
    }

    /// A group of geodesic segments with the given stroke colour and width
    /// (in disk units).
    pub fn segments(&mut self, stroke: &str, width: f64, segs: impl IntoIterator<Item = (DiskPoint, DiskPoint)>) {
        let paths = segs.into_iter().map(|(p, q)| geodesic_path(p, q)).collect();
        self.layers.push((stroke.to_string(), num(width), paths));
    }

    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let half = SIZE / 2.0;
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, r#"<g transform="matrix({} 0 0 {} {half} {half})" fill="none">"#, half * 0.98, -half * 0.98);
        let _ = writeln!(s, r#"<circle cx="0" cy="0" r="1" stroke="black" stroke-width="0.004"/>"#);
        for (stroke, width, paths) in &self.layers {
            let _ = writeln!(s, r#"<path stroke="{stroke}" stroke-width="{width}" d=""#);
            for p in paths {
                let _ = writeln!(s, "{p}");
            }
            let _ = writeln!(s, r#""/>"#);
        }
        let _ = writeln!(s, "</g>\n</svg>");
        s
    }
}

/// Unit circle, polygon and the image edges of the realization under every
/// group element up to `word_len`. Returns the SVG and the number of copies.
pub fn render_tessellation(
    positions: &[DiskPoint],
    edges: &[[usize; 2]],
    polygon: &FundamentalPolygon,
    word_len: usize,
) -> (String, usize) {
    let group = polygon.enumerate_group(word_len);
    let mut scene = SvgScene::new();
    let copy = |m: &Mobius| -> Vec<(DiskPoint, DiskPoint)> {
        edges
            .iter()
            .map(|&[a, b]| (m.apply(positions[a]), m.apply(positions[b])))
            .collect()
    };
    let others: Vec<(DiskPoint, DiskPoint)> = group.iter().skip(1).flat_map(|g| copy(&g.transform)).collect();
    scene.segments("#9aa5b1", 0.0015, others);
    scene.segments("#1f4e79", 0.002, copy(&Mobius::IDENTITY));
    scene.segments("#c0392b", 0.004, (0..polygon.n_sides()).map(|k| polygon.side(k)));
    (scene.to_svg(), group.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::regular_polygon;
    use crate::hypgeom::hyp_distance;
    use proptest::prelude::*;

    #[test]
    fn diameters_are_lines() {
        let p = DiskPoint::new(0.5, 0.5).unwrap();
        let q = DiskPoint::new(-0.25, -0.25).unwrap();
        assert!(geodesic_circle(p, q).is_none());
        assert!(geodesic_path(p, q).contains('L'));
    }

    proptest! {
        #[test]
        fn arc_circle_is_orthogonal_and_through_endpoints(
            a in -0.7f64..0.7, b in -0.7f64..0.7, c in -0.7f64..0.7, d in -0.7f64..0.7
        ) {
            let p = DiskPoint::new(a, b).unwrap();
            let q = DiskPoint::new(c, d).unwrap();
            prop_assume!(hyp_distance(p, q).unwrap() > 1e-3);
            if let Some((ctr, r)) = geodesic_circle(p, q) {
                let on = |z: DiskPoint| ((ctr[0] - z.x).powi(2) + (ctr[1] - z.y).powi(2)).sqrt() - r;
                prop_assert!(on(p).abs() < 1e-9 * r.max(1.0));
                prop_assert!(on(q).abs() < 1e-9 * r.max(1.0));
                prop_assert!((ctr[0] * ctr[0] + ctr[1] * ctr[1] - r * r - 1.0).abs() < 1e-9 * r.max(1.0).powi(2));
            }
        }
    }

    #[test]
    fn copy_counts_and_determinism() {
        let poly = regular_polygon(2).unwrap();
        let pos = poly.vertices.clone();
        let edges: Vec<[usize; 2]> = (0..8).map(|k| [k, (k + 1) % 8]).collect();
        assert_eq!(render_tessellation(&pos, &edges, &poly, 0).1, 1);
        let (svg, n) = render_tessellation(&pos, &edges, &poly, 1);
        assert_eq!(n, 9);
        assert_eq!(svg, render_tessellation(&pos, &edges, &poly, 1).0);
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    }
}
