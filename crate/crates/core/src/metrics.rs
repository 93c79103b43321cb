//! Packing metrics: edge lengths induced by radii and weights, triangle
//! angles, combinatorial curvature, power centers and the weighted Delaunay
//! predicate.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::hypgeom::{
    hyp_to_euc_circle, inversive_distance_euc, EuclideanCircle, GeometryError, HyperbolicCircle,
    Point,
};
use crate::mesh::{EdgeKey, Geometry, RadiusAssignment, Triangulation, VertexId, WeightAssignment};

/// Relative margin under which a triangle inequality counts as violated.
pub const DEGENERACY_MARGIN: f64 = 1e-12;

/// Slack on `h_{12,3} + h_{12,4} >= 0`.
pub const DELAUNAY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("face {face} is degenerate (lengths {lengths:?})")]
    Degenerate { face: usize, lengths: [f64; 3] },
    #[error("triangle with lengths {0:?} is degenerate")]
    DegenerateTriangle([f64; 3]),
    #[error("face vertices are collinear")]
    Collinear,
    #[error("arccosh argument {arg} <= 1 on edge {edge}")]
    LengthArgument { edge: EdgeKey, arg: f64 },
    #[error("angle table has {got} faces, triangulation has {expected}")]
    MissingAngle { expected: usize, got: usize },
    #[error("radius table is {got:?}, expected {expected:?}")]
    WrongGeometry { expected: Geometry, got: Geometry },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Per-edge lengths of a piecewise Euclidean or hyperbolic metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeLengthTable {
    pub geometry: Geometry,
    pub lengths: BTreeMap<EdgeKey, f64>,
}

impl EdgeLengthTable {
    pub fn get(&self, a: VertexId, b: VertexId) -> f64 {
        self.lengths[&EdgeKey::new(a, b)]
    }

    /// Side lengths of `face`, indexed by the opposite corner.
    pub fn face_lengths(&self, face: &[VertexId; 3]) -> [f64; 3] {
        [
            self.get(face[1], face[2]),
            self.get(face[0], face[2]),
            self.get(face[0], face[1]),
        ]
    }
}

/// `acosh(1 + t)` without forming `1 + t`.
fn acosh1p(t: f64) -> f64 {
    (t + (t * (t + 2.0)).sqrt()).ln_1p()
}

/// Hyperbolic length of an edge, `cosh l = cosh ri cosh rj + eta sinh ri sinh rj`.
pub fn hyperbolic_edge_length(ri: f64, rj: f64, eta: f64) -> f64 {
    let a = 2.0 * (ri / 2.0).sinh().powi(2);
    let b = 2.0 * (rj / 2.0).sinh().powi(2);
    // cosh ri cosh rj - 1 + eta sinh ri sinh rj
    let t = a * b + a + b + eta * ri.sinh() * rj.sinh();
    acosh1p(t)
}

/// Euclidean length of an edge, `L^2 = Ri^2 + Rj^2 + 2 eta Ri Rj`.
pub fn euclidean_edge_length(ri: f64, rj: f64, eta: f64) -> f64 {
    (ri * ri + rj * rj + 2.0 * eta * ri * rj).sqrt()
}

pub fn edge_lengths_h(
    tri: &Triangulation,
    eta: &WeightAssignment,
    r: &RadiusAssignment,
) -> Result<EdgeLengthTable, MetricError> {
    expect_geometry(r, Geometry::Hyperbolic)?;
    let mut lengths = BTreeMap::new();
    for &edge in tri.edges().keys() {
        let (ri, rj, e) = (
            r.get(edge.lo()),
            r.get(edge.hi()),
            eta.get(edge.lo(), edge.hi()),
        );
        let l = hyperbolic_edge_length(ri, rj, e);
        if !(l > 0.0) {
            let arg = ri.cosh() * rj.cosh() + e * ri.sinh() * rj.sinh();
            return Err(MetricError::LengthArgument { edge, arg });
        }
        lengths.insert(edge, l);
    }
    Ok(EdgeLengthTable {
        geometry: Geometry::Hyperbolic,
        lengths,
    })
}

pub fn edge_lengths_e(
    tri: &Triangulation,
    eta: &WeightAssignment,
    radii: &RadiusAssignment,
) -> Result<EdgeLengthTable, MetricError> {
    expect_geometry(radii, Geometry::Euclidean)?;
    let lengths = tri
        .edges()
        .keys()
        .map(|&e| {
            let l = euclidean_edge_length(
                radii.get(e.lo()),
                radii.get(e.hi()),
                eta.get(e.lo(), e.hi()),
            );
            (e, l)
        })
        .collect();
    Ok(EdgeLengthTable {
        geometry: Geometry::Euclidean,
        lengths,
    })
}

/// Edge lengths in the geometry of `radii`.
pub fn edge_lengths(
    tri: &Triangulation,
    eta: &WeightAssignment,
    radii: &RadiusAssignment,
) -> Result<EdgeLengthTable, MetricError> {
    match radii.geometry {
        Geometry::Hyperbolic => edge_lengths_h(tri, eta, radii),
        Geometry::Euclidean => edge_lengths_e(tri, eta, radii),
    }
}

fn expect_geometry(r: &RadiusAssignment, expected: Geometry) -> Result<(), MetricError> {
    if r.geometry == expected {
        Ok(())
    } else {
        Err(MetricError::WrongGeometry {
            expected,
            got: r.geometry,
        })
    }
}

/// True when some side is at least the sum of the other two, up to
/// [`DEGENERACY_MARGIN`] relative to the longest side.
pub fn is_degenerate(l: [f64; 3]) -> bool {
    let longest = l[0].max(l[1]).max(l[2]);
    let sum: f64 = l.iter().sum();
    !(l.iter().all(|x| *x > 0.0 && x.is_finite()))
        || sum - 2.0 * longest <= DEGENERACY_MARGIN * longest
}

/// Interior angles of a triangle. `l[k]` is the side opposite corner `k`.
///
/// Uses the half-angle forms of the laws of cosines,
/// `tan^2(A/2) = (s-b)(s-c) / (s(s-a))` and its hyperbolic analogue with
/// `sinh` applied to every factor.
pub fn triangle_angles(l: [f64; 3], geometry: Geometry) -> Result<[f64; 3], MetricError> {
    if is_degenerate(l) {
        return Err(MetricError::DegenerateTriangle(l));
    }
    let s = 0.5 * (l[0] + l[1] + l[2]);
    // s - l[k], computed without cancellation against s
    let d = [
        0.5 * (l[1] + l[2] - l[0]),
        0.5 * (l[0] + l[2] - l[1]),
        0.5 * (l[0] + l[1] - l[2]),
    ];
    let f = |x: f64| match geometry {
        Geometry::Euclidean => x,
        Geometry::Hyperbolic => x.sinh(),
    };
    let fs = f(s);
    let fd = d.map(f);
    let angle = |k: usize| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        2.0 * ((fd[i] * fd[j]) / (fs * fd[k])).sqrt().atan()
    };
    Ok([angle(0), angle(1), angle(2)])
}

/// Corner angles per face, aligned with [`Triangulation::faces`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleTable {
    pub geometry: Geometry,
    pub angles: Vec<[f64; 3]>,
}

pub fn face_angles(
    tri: &Triangulation,
    lengths: &EdgeLengthTable,
) -> Result<AngleTable, MetricError> {
    let angles = tri
        .faces()
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            let l = lengths.face_lengths(f);
            triangle_angles(l, lengths.geometry).map_err(|_| MetricError::Degenerate {
                face: fi,
                lengths: l,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AngleTable {
        geometry: lengths.geometry,
        angles,
    })
}

/// Combinatorial curvature per vertex, in radians.
pub type CurvatureVector = BTreeMap<VertexId, f64>;

/// `2 pi` minus the angle sum at interior vertices, `pi` minus it at
/// boundary vertices.
pub fn curvature(tri: &Triangulation, angles: &AngleTable) -> Result<CurvatureVector, MetricError> {
    if angles.angles.len() != tri.faces().len() {
        return Err(MetricError::MissingAngle {
            expected: tri.faces().len(),
            got: angles.angles.len(),
        });
    }
    let mut sums: BTreeMap<VertexId, f64> = tri.vertex_ids().map(|v| (v, 0.0)).collect();
    for (f, a) in tri.faces().iter().zip(&angles.angles) {
        for k in 0..3 {
            *sums.get_mut(&f[k]).expect("face vertex") += a[k];
        }
    }
    Ok(tri
        .vertices()
        .iter()
        .map(|v| {
            let total = if v.boundary { PI } else { 2.0 * PI };
            (v.id, total - sums[&v.id])
        })
        .collect())
}

/// Curvature of the packing `radii` on `(tri, eta)`.
pub fn packing_curvature(
    tri: &Triangulation,
    eta: &WeightAssignment,
    radii: &RadiusAssignment,
) -> Result<CurvatureVector, MetricError> {
    let lengths = edge_lengths(tri, eta, radii)?;
    curvature(tri, &face_angles(tri, &lengths)?)
}

/// Power center data of one embedded face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FaceGeometry {
    pub center: Point,
    /// Common power `|c - v_i|^2 - R_i^2`; the face-circle is virtual when
    /// this is not positive.
    pub power: f64,
    pub is_virtual: bool,
    /// `h[k]`: signed distance from the center to the side opposite corner
    /// `k`, positive toward corner `k`.
    pub h: [f64; 3],
}

impl FaceGeometry {
    /// The real face-circle, orthogonal to all three vertex-circles.
    pub fn face_circle(&self) -> Option<EuclideanCircle> {
        if self.is_virtual {
            None
        } else {
            EuclideanCircle::new(self.center, self.power.sqrt()).ok()
        }
    }
}

fn cross(a: Point, b: Point) -> f64 {
    a.re * b.im - a.im * b.re
}

/// `|p - v|^2 - R^2`.
pub fn power_distance(p: Point, v: Point, radius: f64) -> f64 {
    (p - v).norm_sqr() - radius * radius
}

/// The point with equal power to the three vertex-circles, from
/// `2 c . (v_j - v_1) = |v_j|^2 - |v_1|^2 - R_j^2 + R_1^2`, `j = 2, 3`.
pub fn power_center(v: [Point; 3], radii: [f64; 3]) -> Result<FaceGeometry, MetricError> {
    let e2 = v[1] - v[0];
    let e3 = v[2] - v[0];
    let det = cross(e2, e3);
    let scale = e2.norm_sqr().max(e3.norm_sqr());
    if det.abs() <= 1e-14 * scale {
        return Err(MetricError::Collinear);
    }
    // work relative to v[0] to keep the right-hand sides small
    let b2 = 0.5 * (e2.norm_sqr() - radii[1] * radii[1] + radii[0] * radii[0]);
    let b3 = 0.5 * (e3.norm_sqr() - radii[2] * radii[2] + radii[0] * radii[0]);
    let cx = (b2 * e3.im - b3 * e2.im) / det;
    let cy = (e2.re * b3 - e3.re * b2) / det;
    let center = v[0] + Point::new(cx, cy);
    let power = power_distance(center, v[0], radii[0]);

    let h = std::array::from_fn(|k| {
        let (p, q, apex) = (v[(k + 1) % 3], v[(k + 2) % 3], v[k]);
        let edge = q - p;
        let side = cross(edge, apex - p).signum();
        side * cross(edge, center - p) / edge.norm()
    });
    Ok(FaceGeometry {
        center,
        power,
        is_virtual: power <= 0.0,
        h,
    })
}

/// Weighted Delaunay test of one interior edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeDelaunay {
    /// `h_{12,3} + h_{12,4}`.
    pub h_sum: f64,
    pub pass: bool,
    /// Inversive distance between the face-circle of `v1 v2 v3` and the
    /// vertex-circle at `v4`, when the face-circle is real. The edge is
    /// weighted Delaunay iff this is non-negative.
    pub face_circle_eta: Option<f64>,
}

/// Weighted Delaunay predicate for the edge `v1 v2` shared by the faces
/// `v1 v2 v3` and `v1 v2 v4` of a planar embedding.
pub fn is_weighted_delaunay_edge(
    v: [Point; 4],
    radii: [f64; 4],
) -> Result<EdgeDelaunay, MetricError> {
    let a = power_center([v[0], v[1], v[2]], [radii[0], radii[1], radii[2]])?;
    let b = power_center([v[0], v[1], v[3]], [radii[0], radii[1], radii[3]])?;
    let h_sum = a.h[2] + b.h[2];
    let face_circle_eta = a.face_circle().and_then(|fc| {
        EuclideanCircle::new(v[3], radii[3])
            .ok()
            .map(|c4| inversive_distance_euc(&fc, &c4))
    });
    Ok(EdgeDelaunay {
        h_sum,
        pass: h_sum >= -DELAUNAY_TOL,
        face_circle_eta,
    })
}

/// Planar positions of a quad from its five edge lengths: `v1` at the
/// origin, `v2` on the positive x-axis, `v3` above and `v4` below.
pub fn embed_quad(l12: f64, l13: f64, l23: f64, l14: f64, l24: f64) -> [Point; 4] {
    let apex = |la: f64, lb: f64, sign: f64| {
        let x = (la * la + l12 * l12 - lb * lb) / (2.0 * l12);
        let y = (la * la - x * x).max(0.0).sqrt();
        Point::new(x, sign * y)
    };
    [
        Point::new(0.0, 0.0),
        Point::new(l12, 0.0),
        apex(l13, l23, 1.0),
        apex(l14, l24, -1.0),
    ]
}

/// Euclidean circles of a hyperbolic quad laid out in the Poincaré disk:
/// `v1` at the origin, `v2` on the positive real axis, `v3` above and `v4`
/// below the shared geodesic.
pub fn layout_hyperbolic_quad(
    radii: [f64; 4],
    l12: f64,
    l13: f64,
    l23: f64,
    l14: f64,
    l24: f64,
) -> Result<[HyperbolicCircle; 4], MetricError> {
    let a3 = triangle_angles([l23, l13, l12], Geometry::Hyperbolic)?[0];
    let a4 = triangle_angles([l24, l14, l12], Geometry::Hyperbolic)?[0];
    let pos = [
        Point::new(0.0, 0.0),
        Point::new((l12 / 2.0).tanh(), 0.0),
        Point::from_polar((l13 / 2.0).tanh(), a3),
        Point::from_polar((l14 / 2.0).tanh(), -a4),
    ];
    let mut out = [HyperbolicCircle {
        center: pos[0],
        radius: radii[0],
    }; 4];
    for k in 0..4 {
        out[k] = HyperbolicCircle::new(pos[k], radii[k])?;
    }
    Ok(out)
}

/// Euclidean predicate applied to the Euclidean images of four hyperbolic
/// circles (the induced PE data).
pub fn delaunay_edge_from_hyperbolic(
    circles: &[HyperbolicCircle; 4],
) -> Result<EdgeDelaunay, MetricError> {
    let mut pos = [Point::new(0.0, 0.0); 4];
    let mut rad = [0.0; 4];
    for k in 0..4 {
        let e = hyp_to_euc_circle(&circles[k])?;
        pos[k] = e.center;
        rad[k] = e.radius;
    }
    is_weighted_delaunay_edge(pos, rad)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeReport {
    pub edge: EdgeKey,
    pub apexes: (VertexId, VertexId),
    pub h_sum: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelaunayReport {
    pub pass: bool,
    pub edges: Vec<EdgeReport>,
}

impl DelaunayReport {
    pub fn failing(&self) -> impl Iterator<Item = &EdgeReport> {
        self.edges.iter().filter(|e| !e.pass)
    }
}

/// Runs the weighted Delaunay predicate on every interior edge. Euclidean
/// packings embed each quad from its edge lengths; hyperbolic packings are
/// laid out in the disk and tested through their Euclidean images.
pub fn is_weighted_delaunay_packing(
    tri: &Triangulation,
    eta: &WeightAssignment,
    radii: &RadiusAssignment,
) -> Result<DelaunayReport, MetricError> {
    let lengths = edge_lengths(tri, eta, radii)?;
    for (fi, f) in tri.faces().iter().enumerate() {
        let l = lengths.face_lengths(f);
        if is_degenerate(l) {
            return Err(MetricError::Degenerate {
                face: fi,
                lengths: l,
            });
        }
    }
    let mut edges = Vec::new();
    for (edge, k, m) in tri.interior_edges() {
        let (i, j) = (edge.lo(), edge.hi());
        let l12 = lengths.get(i, j);
        let (l13, l23, l14, l24) = (
            lengths.get(i, k),
            lengths.get(j, k),
            lengths.get(i, m),
            lengths.get(j, m),
        );
        let rad = [radii.get(i), radii.get(j), radii.get(k), radii.get(m)];
        let res = match radii.geometry {
            Geometry::Euclidean => {
                is_weighted_delaunay_edge(embed_quad(l12, l13, l23, l14, l24), rad)?
            }
            Geometry::Hyperbolic => delaunay_edge_from_hyperbolic(&layout_hyperbolic_quad(
                rad, l12, l13, l23, l14, l24,
            )?)?,
        };
        edges.push(EdgeReport {
            edge,
            apexes: (k, m),
            h_sum: res.h_sum,
            pass: res.pass,
        });
    }
    Ok(DelaunayReport {
        pass: edges.iter().all(|e| e.pass),
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn hyperbolic_length_examples() {
        let r = 0.7;
        assert_abs_diff_eq!(hyperbolic_edge_length(r, r, 1.0), 2.0 * r, epsilon = 1e-14);
        // acosh(cosh^2 1) evaluated in closed form
        let expected = (1f64.cosh().powi(2)).acosh();
        assert_abs_diff_eq!(
            hyperbolic_edge_length(1.0, 1.0, 0.0),
            expected,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(expected, 1.5133, epsilon = 1e-4);
        let tiny = hyperbolic_edge_length(r, r, -1.0 + 1e-12);
        assert!(tiny > 0.0 && tiny < 1e-5);
    }

    #[test]
    fn euclidean_length_examples() {
        assert_abs_diff_eq!(euclidean_edge_length(0.3, 0.3, 1.0), 0.6, epsilon = 1e-16);
        assert_abs_diff_eq!(euclidean_edge_length(3.0, 4.0, 0.0), 5.0);
        assert_abs_diff_eq!(euclidean_edge_length(1.0, 1.0, -0.5), 1.0);
    }

    #[test]
    fn length_tables() {
        let t = Triangulation::star_polygon(5).unwrap();
        let eta = WeightAssignment::uniform(&t, 1.0).unwrap();
        let rh = RadiusAssignment::uniform(&t, Geometry::Hyperbolic, 0.4).unwrap();
        let lh = edge_lengths_h(&t, &eta, &rh).unwrap();
        assert!(lh.lengths.values().all(|&l| (l - 0.8).abs() < 1e-14));
        assert!(matches!(
            edge_lengths_e(&t, &eta, &rh),
            Err(MetricError::WrongGeometry { .. })
        ));
        let re = RadiusAssignment::uniform(&t, Geometry::Euclidean, 0.4).unwrap();
        assert!(edge_lengths(&t, &eta, &re)
            .unwrap()
            .lengths
            .values()
            .all(|&l| (l - 0.8).abs() < 1e-15));
    }

    #[test]
    fn euclidean_angles() {
        let a = triangle_angles([3.0, 4.0, 5.0], Geometry::Euclidean).unwrap();
        assert_abs_diff_eq!(a[0], (0.6f64).asin(), epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], (0.8f64).asin(), epsilon = 1e-15);
        assert_abs_diff_eq!(a[2], PI / 2.0, epsilon = 1e-15);
        for x in triangle_angles([2.0, 2.0, 2.0], Geometry::Euclidean).unwrap() {
            assert_abs_diff_eq!(x, FRAC_PI_3, epsilon = 1e-15);
        }
        assert!(triangle_angles([1.0, 2.0, 3.0], Geometry::Euclidean).is_err());
        assert!(triangle_angles([1.0, 1.0, 3.0], Geometry::Hyperbolic).is_err());
    }

    #[test]
    fn hyperbolic_equilateral_angle() {
        let c = (1f64.cosh().powi(2) - 1f64.cosh()) / 1f64.sinh().powi(2);
        assert_abs_diff_eq!(c, 0.6067, epsilon = 1e-4);
        let a = triangle_angles([1.0; 3], Geometry::Hyperbolic).unwrap();
        for x in a {
            assert_abs_diff_eq!(x, c.acos(), epsilon = 1e-14);
            assert_abs_diff_eq!(x, 0.9189, epsilon = 2e-4);
        }
        assert!(a.iter().sum::<f64>() < PI);
    }

    #[test]
    fn half_angle_matches_law_of_cosines() {
        let l = [0.9, 1.3, 0.7];
        let a = triangle_angles(l, Geometry::Hyperbolic).unwrap();
        let cos0 = (l[1].cosh() * l[2].cosh() - l[0].cosh()) / (l[1].sinh() * l[2].sinh());
        assert_abs_diff_eq!(a[0], cos0.acos(), epsilon = 1e-13);
        let e = triangle_angles(l, Geometry::Euclidean).unwrap();
        let cos1 = (l[0] * l[0] + l[2] * l[2] - l[1] * l[1]) / (2.0 * l[0] * l[2]);
        assert_abs_diff_eq!(e[1], cos1.acos(), epsilon = 1e-13);
    }

    #[test]
    fn curvature_examples() {
        let star = Triangulation::star_polygon(6).unwrap();
        let eta = WeightAssignment::uniform(&star, 1.0).unwrap();
        let re = RadiusAssignment::uniform(&star, Geometry::Euclidean, 0.5).unwrap();
        let k = packing_curvature(&star, &eta, &re).unwrap();
        assert_abs_diff_eq!(k[&0], 0.0, epsilon = 1e-14);

        let face = Triangulation::from_faces(&[[0, 1, 2]]).unwrap();
        let eta1 = WeightAssignment::uniform(&face, 1.0).unwrap();
        let r1 = RadiusAssignment::uniform(&face, Geometry::Euclidean, 1.0).unwrap();
        for (_, kv) in packing_curvature(&face, &eta1, &r1).unwrap() {
            assert_abs_diff_eq!(kv, 2.0 * PI / 3.0, epsilon = 1e-14);
        }

        let rh = RadiusAssignment::uniform(&star, Geometry::Hyperbolic, 0.5).unwrap();
        let kh = packing_curvature(&star, &eta, &rh).unwrap();
        let alpha = triangle_angles([1.0; 3], Geometry::Hyperbolic).unwrap()[0];
        assert_abs_diff_eq!(kh[&0], 2.0 * PI - 6.0 * alpha, epsilon = 1e-13);
        assert!(kh[&0] > 0.0);

        let bad = AngleTable {
            geometry: Geometry::Euclidean,
            angles: vec![],
        };
        assert!(matches!(
            curvature(&star, &bad),
            Err(MetricError::MissingAngle { .. })
        ));
    }

    #[test]
    fn angle_sums() {
        let hex = Triangulation::hex_disk(2).unwrap();
        let eta = WeightAssignment::uniform(&hex, 0.4).unwrap();
        let radii: BTreeMap<_, _> = hex
            .vertex_ids()
            .map(|v| (v, 0.2 + 0.03 * v as f64))
            .collect();
        let rh = RadiusAssignment::new(&hex, Geometry::Hyperbolic, radii.clone()).unwrap();
        let ah = face_angles(&hex, &edge_lengths(&hex, &eta, &rh).unwrap()).unwrap();
        let defect: f64 = ah.angles.iter().map(|a| PI - a.iter().sum::<f64>()).sum();
        assert!(ah.angles.iter().all(|a| a.iter().sum::<f64>() < PI));
        assert!(defect > 0.0);
        let re = RadiusAssignment::new(&hex, Geometry::Euclidean, radii).unwrap();
        let ae = face_angles(&hex, &edge_lengths(&hex, &eta, &re).unwrap()).unwrap();
        for a in &ae.angles {
            assert_abs_diff_eq!(a.iter().sum::<f64>(), PI, epsilon = 1e-10);
        }
    }

    #[test]
    fn power_center_equilateral() {
        let s = 2.0;
        let v = [p(0.0, 0.0), p(s, 0.0), p(s / 2.0, s * 3f64.sqrt() / 2.0)];
        let g = power_center(v, [0.3; 3]).unwrap();
        let centroid = (v[0] + v[1] + v[2]) / 3.0;
        assert_abs_diff_eq!((g.center - centroid).norm(), 0.0, epsilon = 1e-14);
        for h in g.h {
            assert_abs_diff_eq!(h, s / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
        }
    }

    #[test]
    fn equal_radii_give_circumcenter() {
        let v = [p(0.1, -0.3), p(2.0, 0.4), p(0.7, 1.9)];
        let g = power_center(v, [0.8; 3]).unwrap();
        let cc = crate::hypgeom::circumcircle(v[0], v[1], v[2]).unwrap();
        assert_abs_diff_eq!((g.center - cc.center).norm(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(g.power, cc.radius * cc.radius - 0.64, epsilon = 1e-12);
    }

    /// Dense-grid oracle: minimize the largest pairwise power discrepancy.
    #[test]
    fn power_center_matches_grid_search() {
        let v = [p(0.0, 0.0), p(4.0, 0.0), p(0.0, 4.0)];
        let r = [1.0, 1.0, 3.0];
        let spread = |c: Point| {
            let q: Vec<f64> = (0..3).map(|k| power_distance(c, v[k], r[k])).collect();
            (q[0] - q[1]).abs().max((q[0] - q[2]).abs())
        };
        let (mut best, mut best_c) = (f64::INFINITY, p(0.0, 0.0));
        let (mut lo, mut width) = (p(-5.0, -5.0), 10.0);
        for _ in 0..12 {
            let n = 80;
            for i in 0..=n {
                for j in 0..=n {
                    let c = lo + p(width * i as f64 / n as f64, width * j as f64 / n as f64);
                    let s = spread(c);
                    if s < best {
                        best = s;
                        best_c = c;
                    }
                }
            }
            width /= 8.0;
            lo = best_c - p(width / 2.0, width / 2.0);
        }
        let g = power_center(v, r).unwrap();
        assert_abs_diff_eq!(g.center.re, best_c.re, epsilon = 1e-9);
        assert_abs_diff_eq!(g.center.im, best_c.im, epsilon = 1e-9);
        // closed form: c = (2, 1)
        assert_abs_diff_eq!((g.center - p(2.0, 1.0)).norm(), 0.0, epsilon = 1e-14);
        let q: Vec<f64> = (0..3)
            .map(|k| power_distance(g.center, v[k], r[k]))
            .collect();
        assert_abs_diff_eq!(q[0], q[1], epsilon = 1e-10);
        assert_abs_diff_eq!(q[0], q[2], epsilon = 1e-10);
    }

    #[test]
    fn real_face_circle_is_orthogonal() {
        let v = [p(0.0, 0.0), p(3.0, 0.2), p(1.1, 2.7)];
        let r = [0.4, 0.7, 0.3];
        let g = power_center(v, r).unwrap();
        let fc = g.face_circle().expect("real face circle");
        for k in 0..3 {
            let c = EuclideanCircle::new(v[k], r[k]).unwrap();
            assert_abs_diff_eq!(inversive_distance_euc(&fc, &c), 0.0, epsilon = 1e-8);
        }
        assert!(power_center([p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)], r).is_err());
    }

    #[test]
    fn delaunay_edge_examples() {
        let s = 1.0;
        let hgt = s * 3f64.sqrt() / 2.0;
        let quad = [p(0.0, 0.0), p(s, 0.0), p(s / 2.0, hgt), p(s / 2.0, -hgt)];
        let d = is_weighted_delaunay_edge(quad, [0.2; 4]).unwrap();
        assert_abs_diff_eq!(d.h_sum, 2.0 * s / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
        assert!(d.pass);

        // mirror-symmetric quad: h_{12,3} = h_{12,4}
        let quad = [p(0.0, 0.0), p(2.0, 0.0), p(0.8, 0.3), p(0.8, -0.3)];
        let a = power_center([quad[0], quad[1], quad[2]], [0.1; 3]).unwrap();
        let b = power_center([quad[0], quad[1], quad[3]], [0.1; 3]).unwrap();
        assert_abs_diff_eq!(a.h[2], b.h[2], epsilon = 1e-14);
        let d = is_weighted_delaunay_edge(quad, [0.1; 4]).unwrap();
        assert_eq!(d.pass, a.h[2] >= 0.0);
        assert!(!d.pass);

        // v4 pulled deep inside the circumcircle of v1 v2 v3
        let quad = [p(0.0, 0.0), p(2.0, 0.0), p(1.0, 1.5), p(1.0, -0.1)];
        let d = is_weighted_delaunay_edge(quad, [0.05; 4]).unwrap();
        assert!(!d.pass);
        assert!(d.face_circle_eta.unwrap() < 0.0);
    }

    #[test]
    fn packing_predicate_on_symmetric_star() {
        let star = Triangulation::star_polygon(6).unwrap();
        let eta = WeightAssignment::uniform(&star, 1.0).unwrap();
        for g in [Geometry::Euclidean, Geometry::Hyperbolic] {
            let r = RadiusAssignment::uniform(&star, g, 0.3).unwrap();
            let rep = is_weighted_delaunay_packing(&star, &eta, &r).unwrap();
            assert!(rep.pass);
            assert_eq!(rep.edges.len(), 6);
        }
    }

    #[test]
    fn virtual_face_circles_pass() {
        // eta in (-1, 1] with the structure condition; radii chosen so
        // that the face circle is virtual
        let star = Triangulation::star_polygon(5).unwrap();
        let eta = WeightAssignment::uniform(&star, 0.3).unwrap();
        let mut radii: BTreeMap<_, _> = star
            .vertex_ids()
            .map(|v| (v, 0.2 + 0.05 * v as f64))
            .collect();
        radii.insert(0, 0.5);
        let r = RadiusAssignment::new(&star, Geometry::Euclidean, radii).unwrap();
        let lengths = edge_lengths(&star, &eta, &r).unwrap();
        let f = star.faces()[0];
        let l = lengths.face_lengths(&f);
        let pos = embed_quad(l[2], l[1], l[0], 1.0, 1.0);
        let g = power_center(
            [pos[0], pos[1], pos[2]],
            [r.get(f[0]), r.get(f[1]), r.get(f[2])],
        )
        .unwrap();
        assert!(g.is_virtual);
        let rep = is_weighted_delaunay_packing(&star, &eta, &r).unwrap();
        assert!(rep.edges.iter().all(|e| e.h_sum >= -DELAUNAY_TOL));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn relabeling_permutes_angles_and_h(
                x in -1.0f64..1.0, y in 0.3f64..2.0, r in prop::array::uniform3(0.05f64..0.6)
            ) {
                let v = [p(0.0, 0.0), p(1.5, 0.0), p(x, y)];
                let g = power_center(v, r).unwrap();
                let g2 = power_center([v[1], v[2], v[0]], [r[1], r[2], r[0]]).unwrap();
                prop_assert!((g.center - g2.center).norm() < 1e-12);
                for k in 0..3 {
                    prop_assert!((g.h[(k + 1) % 3] - g2.h[k]).abs() < 1e-12);
                }
                let l = [(v[1] - v[2]).norm(), (v[0] - v[2]).norm(), (v[0] - v[1]).norm()];
                if !is_degenerate(l) {
                    let a = triangle_angles(l, Geometry::Euclidean).unwrap();
                    let b = triangle_angles([l[1], l[2], l[0]], Geometry::Euclidean).unwrap();
                    for k in 0..3 {
                        prop_assert!((a[(k + 1) % 3] - b[k]).abs() < 1e-12);
                    }
                }
            }

            #[test]
            fn face_circle_criterion_agrees_with_h_sum(
                x3 in -0.5f64..2.5, y3 in 0.3f64..2.0, x4 in -0.5f64..2.5, y4 in 0.3f64..2.0,
                r in prop::array::uniform4(0.05f64..0.5)
            ) {
                let quad = [p(0.0, 0.0), p(2.0, 0.0), p(x3, y3), p(x4, -y4)];
                let d = is_weighted_delaunay_edge(quad, r).unwrap();
                if let Some(eta) = d.face_circle_eta {
                    prop_assume!(d.h_sum.abs() > 1e-7 && eta.abs() > 1e-7);
                    prop_assert_eq!(d.h_sum >= 0.0, eta >= 0.0);
                }
            }
        }
    }
}
