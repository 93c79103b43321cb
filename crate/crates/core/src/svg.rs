//! SVG 1.1 rendering of laid-out packings in the Poincaré disk.
//!
//! The viewport is 1000×1000 with the unit disk mapped to the circle of
//! radius 480 about (500, 500), y pointing up.

use std::fmt::Write as _;

use crate::hypgeom::{circumcircle, hyp_to_euc_circle, EuclideanCircle, HyperbolicCircle, Point};
use crate::io::{IoError, Packing};
use crate::mesh::{Geometry, VertexId};
use crate::metrics::power_center;

pub const VIEWPORT: f64 = 1000.0;
pub const DISK_RADIUS_PX: f64 = 480.0;

const BOUNDARY_STROKE: &str = "#000000";
const VERTEX_STROKE: &str = "#1f5fa8";
const CLIPPED_STROKE: &str = "#c0392b";
const EDGE_STROKE: &str = "#555555";
const FACE_STROKE: &str = "#2e8b57";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeStyle {
    #[default]
    Chord,
    Geodesic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    pub edges: EdgeStyle,
    pub face_circles: bool,
}

fn px(p: Point) -> (f64, f64) {
    (
        VIEWPORT / 2.0 + DISK_RADIUS_PX * p.re,
        VIEWPORT / 2.0 - DISK_RADIUS_PX * p.im,
    )
}

/// Fixed six-decimal formatting without negative zero.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Euclidean images of the vertex circles.
pub fn vertex_circles(packing: &Packing) -> Result<Vec<(VertexId, EuclideanCircle)>, IoError> {
    let layout = packing.layout()?;
    let radii = packing.radii()?;
    radii
        .iter()
        .map(|(v, r)| {
            let p = layout[&v];
            let c = match packing.geometry {
                Geometry::Hyperbolic => {
                    HyperbolicCircle::new(p, r).and_then(|c| hyp_to_euc_circle(&c))
                }
                Geometry::Euclidean => EuclideanCircle::new(p, r),
            };
            c.map(|c| (v, c))
                .map_err(|e| IoError::Geometry(e.to_string()))
        })
        .collect()
}

fn circle_element(out: &mut String, class: &str, c: &EuclideanCircle, extra: &str) {
    let (x, y) = px(c.center);
    let _ = writeln!(
        out,
        "    <circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\"{extra}/>",
        num(x),
        num(y),
        num(c.radius * DISK_RADIUS_PX)
    );
}

fn edge_element(out: &mut String, p: Point, q: Point, style: EdgeStyle) {
    let (x1, y1) = px(p);
    let (x2, y2) = px(q);
    let arc = match style {
        EdgeStyle::Chord => None,
        EdgeStyle::Geodesic => geodesic_circle(p, q),
    };
    match arc {
        None => {
            let _ = writeln!(
                out,
                "    <line class=\"edge\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            );
        }
        Some(c) => {
            let (cx, cy) = px(c.center);
            let cross = (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx);
            let sweep = u8::from(cross > 0.0);
            let r = num(c.radius * DISK_RADIUS_PX);
            let _ = writeln!(
                out,
                "    <path class=\"edge\" d=\"M {} {} A {r} {r} 0 0 {sweep} {} {}\"/>",
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            );
        }
    }
}

/// Circle orthogonal to the unit circle through `p` and `q`; `None` when the
/// geodesic is a diameter.
fn geodesic_circle(p: Point, q: Point) -> Option<EuclideanCircle> {
    let (a, b) = if p.norm() >= q.norm() { (p, q) } else { (q, p) };
    if a.norm() < 1e-12 || (a.re * b.im - a.im * b.re).abs() < 1e-12 {
        return None;
    }
    let inv = a / a.norm_sqr();
    circumcircle(a, b, inv).ok()
}

/// Renders the boundary circle, edges, vertex circles and optionally the
/// real face circles. Circles not inside the disk are clipped to it and
/// drawn with a distinct stroke.
pub fn render_svg(packing: &Packing, opts: &RenderOptions) -> Result<String, IoError> {
    let layout = packing.layout()?;
    let circles = vertex_circles(packing)?;
    let mut out = String::new();
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{v}\" height=\"{v}\" viewBox=\"0 0 {v} {v}\">",
        v = VIEWPORT
    );
    let (c0, _) = px(Point::new(0.0, 0.0));
    let _ = writeln!(
        out,
        "  <defs>\n    <clipPath id=\"disk\">\n      <circle cx=\"{c}\" cy=\"{c}\" r=\"{r}\"/>\n    </clipPath>\n  </defs>",
        c = num(c0),
        r = num(DISK_RADIUS_PX)
    );
    let _ = writeln!(
        out,
        "  <circle class=\"boundary\" cx=\"{c}\" cy=\"{c}\" r=\"{r}\" fill=\"none\" stroke=\"{BOUNDARY_STROKE}\" stroke-width=\"2\"/>",
        c = num(c0),
        r = num(DISK_RADIUS_PX)
    );

    let _ = writeln!(
        out,
        "  <g id=\"edges\" fill=\"none\" stroke=\"{EDGE_STROKE}\" stroke-width=\"1\">"
    );
    for e in packing.tri.edges().keys() {
        edge_element(&mut out, layout[&e.lo()], layout[&e.hi()], opts.edges);
    }
    out += "  </g>\n";

    let _ = writeln!(
        out,
        "  <g id=\"vertex-circles\" fill=\"none\" stroke=\"{VERTEX_STROKE}\" stroke-width=\"1.5\">"
    );
    for (_, c) in &circles {
        if c.is_inside_disk() {
            circle_element(&mut out, "vertex", c, "");
        } else {
            let extra = format!(
                " clip-path=\"url(#disk)\" stroke=\"{CLIPPED_STROKE}\" stroke-dasharray=\"2 2\""
            );
            circle_element(&mut out, "vertex clipped", c, &extra);
        }
    }
    out += "  </g>\n";

    if opts.face_circles {
        let _ = writeln!(
            out,
            "  <g id=\"face-circles\" fill=\"none\" stroke=\"{FACE_STROKE}\" stroke-width=\"1\" stroke-dasharray=\"6 4\">"
        );
        let by_id: std::collections::BTreeMap<_, _> = circles.iter().cloned().collect();
        for f in packing.tri.faces() {
            let cs = f.map(|v| by_id[&v]);
            let fg = power_center(cs.map(|c| c.center), cs.map(|c| c.radius))
                .map_err(|e| IoError::Geometry(e.to_string()))?;
            if let Some(fc) = fg.face_circle() {
                circle_element(&mut out, "face", &fc, "");
            }
        }
        out += "  </g>\n";
    }
    out += "</svg>\n";
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{RadiusAssignment, Triangulation, WeightAssignment};
    use crate::metrics::edge_lengths;
    use crate::solver::{
        default_initial_labels, layout_in_disk, solve_prescribed_curvature, SolveConfig,
    };

    fn flat_star() -> Packing {
        let tri = Triangulation::hex_disk(1).unwrap();
        let eta = WeightAssignment::uniform(&tri, 1.0).unwrap();
        let r = RadiusAssignment::uniform(&tri, Geometry::Hyperbolic, 0.4).unwrap();
        let cfg = SolveConfig::uniform_target(&tri, &r, 0.0);
        let init = default_initial_labels(&tri, &cfg).unwrap();
        let rep = solve_prescribed_curvature(&tri, &eta, &cfg, &init).unwrap();
        let lengths = edge_lengths(&tri, &eta, &rep.radii).unwrap();
        let layout = layout_in_disk(&tri, &lengths, 0).unwrap();
        Packing::new(tri, eta, rep.radii).with_layout(&layout)
    }

    #[test]
    fn hex_star_counts_and_determinism() {
        let p = flat_star();
        for edges in [EdgeStyle::Chord, EdgeStyle::Geodesic] {
            let opts = RenderOptions {
                edges,
                face_circles: true,
            };
            let svg = render_svg(&p, &opts).unwrap();
            assert_eq!(svg.matches("<circle class=\"vertex\"").count(), 7);
            assert_eq!(svg.matches("class=\"edge\"").count(), 12);
            assert_eq!(svg.matches("class=\"boundary\"").count(), 1);
            assert_eq!(svg.matches("class=\"face\"").count(), 6);
            assert!(!svg.contains("clipped"));
            assert_eq!(render_svg(&p.clone(), &opts).unwrap(), svg);
        }
        let plain = render_svg(&p, &RenderOptions::default()).unwrap();
        assert!(!plain.contains("class=\"face\""));
        assert!(!plain.contains("<path"));
    }

    #[test]
    fn circle_crossing_boundary_is_clipped() {
        let tri = Triangulation::from_faces(&[[0, 1, 2]]).unwrap();
        let eta = WeightAssignment::uniform(&tri, 0.0).unwrap();
        let radii = RadiusAssignment::new(
            &tri,
            Geometry::Euclidean,
            [(0, 0.3), (1, 0.6), (2, 0.5)].into_iter().collect(),
        )
        .unwrap();
        let mut p = Packing::new(tri, eta, radii);
        p.layout = Some(
            [
                (0, Point::new(0.0, 0.0)),
                (1, Point::new(0.5, 0.0)),
                (2, Point::new(0.0, 0.58309518948453)),
            ]
            .into_iter()
            .collect(),
        );
        let svg = render_svg(&p, &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle class=\"vertex\"").count(), 1);
        assert_eq!(svg.matches("class=\"vertex clipped\"").count(), 2);
        assert_eq!(svg.matches("clip-path=\"url(#disk)\"").count(), 2);
        assert!(svg.contains(CLIPPED_STROKE));
    }

    #[test]
    fn missing_layout_is_an_error() {
        let mut p = flat_star();
        p.layout = Some(Default::default());
        assert!(matches!(
            render_svg(&p, &RenderOptions::default()),
            Err(IoError::MissingLayout)
        ));
        p.layout = None;
        assert!(render_svg(&p, &RenderOptions::default()).is_err());
    }

    #[test]
    fn geodesic_circle_is_orthogonal_through_endpoints() {
        let (p, q) = (Point::new(0.3, 0.2), Point::new(-0.1, 0.6));
        let c = geodesic_circle(p, q).unwrap();
        assert!((c.center.norm_sqr() - c.radius * c.radius - 1.0).abs() < 1e-12);
        assert!(((p - c.center).norm() - c.radius).abs() < 1e-12);
        assert!(((q - c.center).norm() - c.radius).abs() < 1e-12);
        assert!(geodesic_circle(Point::new(0.2, 0.2), Point::new(-0.4, -0.4)).is_none());
    }

    #[test]
    fn numbers_have_no_negative_zero() {
        assert_eq!(num(-0.0), "0.000000");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(-1.5), "-1.500000");
    }
}
