//! Prescribed-curvature solver in label coordinates and the developing map
//! of flat-interior hyperbolic packings into the Poincaré disk.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::hypgeom::{hyp_distance, DiskMobius, GeometryError, Point};
use crate::mesh::{
    radius_to_label, EdgeKey, Geometry, LabelAssignment, MeshError, RadiusAssignment,
    Triangulation, VertexId, WeightAssignment,
};
use crate::metrics::{
    curvature, edge_lengths, face_angles, triangle_angles, EdgeLengthTable, MetricError,
};

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 50;
pub const FD_STEP: f64 = 1e-6;
const FD_RETRY_FACTOR: f64 = 1e-2;
const MAX_HALVINGS: usize = 30;

/// Hyperbolic radius of the default interior initialization.
pub const DEFAULT_INITIAL_RADIUS: f64 = 0.5;

pub const HOLONOMY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("singular Jacobian (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },
    #[error("degenerate faces at every Jacobian probe step")]
    DegenerateProbe,
    #[error("no convergence after {iterations} iterations (best residual {best_residual:e})")]
    NotConverged {
        iterations: usize,
        best_residual: f64,
        report: Box<SolveReport>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveConfig {
    pub geometry: Geometry,
    /// Target curvature at each interior vertex.
    pub target_k: BTreeMap<VertexId, f64>,
    /// Fixed radius at each boundary vertex.
    pub boundary_radii: BTreeMap<VertexId, f64>,
    pub max_iterations: usize,
    pub residual_tol: f64,
    /// Initial step length multiplier in (0, 1].
    pub step_damping: f64,
}

impl SolveConfig {
    pub fn new(
        geometry: Geometry,
        target_k: BTreeMap<VertexId, f64>,
        boundary_radii: BTreeMap<VertexId, f64>,
    ) -> Self {
        SolveConfig {
            geometry,
            target_k,
            boundary_radii,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            step_damping: 1.0,
        }
    }

    /// Uniform target `k` at every interior vertex, boundary radii taken
    /// from `radii`.
    pub fn uniform_target(tri: &Triangulation, radii: &RadiusAssignment, k: f64) -> Self {
        let target_k = tri
            .interior_vertices()
            .into_iter()
            .map(|v| (v, k))
            .collect();
        let boundary_radii = tri
            .boundary_vertices()
            .into_iter()
            .map(|v| (v, radii.get(v)))
            .collect();
        Self::new(radii.geometry, target_k, boundary_radii)
    }

    fn validate(&self, tri: &Triangulation) -> Result<(), SolveError> {
        if !(self.residual_tol > 0.0) {
            return Err(SolveError::Config("residual_tol must be positive".into()));
        }
        if !(self.step_damping > 0.0 && self.step_damping <= 1.0) {
            return Err(SolveError::Config("step_damping must lie in (0, 1]".into()));
        }
        for v in tri.interior_vertices() {
            if !self.target_k.contains_key(&v) {
                return Err(SolveError::Config(format!(
                    "no target curvature for interior vertex {v}"
                )));
            }
        }
        for v in tri.boundary_vertices() {
            match self.boundary_radii.get(&v) {
                Some(&r) if r > 0.0 && r.is_finite() => {}
                Some(&r) => {
                    return Err(SolveError::Config(format!(
                        "boundary radius {r} at vertex {v}"
                    )))
                }
                None => {
                    return Err(SolveError::Config(format!(
                        "no fixed radius for boundary vertex {v}"
                    )))
                }
            }
        }
        if let Some(v) = self
            .target_k
            .keys()
            .find(|v| tri.is_boundary(**v) != Some(false))
        {
            return Err(SolveError::Config(format!(
                "target given for non-interior vertex {v}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub radii: RadiusAssignment,
    pub labels: LabelAssignment,
    /// Max-norm of `K - target` at the start and after each iteration.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Trial steps rejected for degenerate faces or invalid labels.
    pub degenerate_incidents: usize,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self
            .residual_history
            .last()
            .expect("history starts with the initial residual")
    }
}

/// Curvature at the labels `u`.
pub fn curvature_map(
    tri: &Triangulation,
    eta: &WeightAssignment,
    u: &LabelAssignment,
) -> Result<BTreeMap<VertexId, f64>, MetricError> {
    let radii = u.to_radii();
    let lengths = edge_lengths(tri, eta, &radii)?;
    curvature(tri, &face_angles(tri, &lengths)?)
}

/// Interior unknowns and the fixed part of the label vector.
struct Problem<'a> {
    tri: &'a Triangulation,
    eta: &'a WeightAssignment,
    geometry: Geometry,
    interior: Vec<VertexId>,
    labels: BTreeMap<VertexId, f64>,
}

impl<'a> Problem<'a> {
    fn new(tri: &'a Triangulation, eta: &'a WeightAssignment, u: &LabelAssignment) -> Self {
        Problem {
            tri,
            eta,
            geometry: u.geometry,
            interior: tri.interior_vertices(),
            labels: u.as_map().clone(),
        }
    }

    fn interior_vector(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.interior.len(),
            self.interior.iter().map(|v| self.labels[v]),
        )
    }

    fn with_interior(&self, x: &DVector<f64>) -> BTreeMap<VertexId, f64> {
        let mut labels = self.labels.clone();
        for (v, xi) in self.interior.iter().zip(x.iter()) {
            labels.insert(*v, *xi);
        }
        labels
    }

    /// Interior curvatures at `x`, or `None` when the labels are out of
    /// range or some face degenerates.
    fn curvature_at(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let u = LabelAssignment::from_map(self.geometry, self.with_interior(x)).ok()?;
        let radii = u.to_radii();
        if radii.iter().any(|(_, r)| !(r > 0.0 && r.is_finite())) {
            return None;
        }
        let k = curvature_map(self.tri, self.eta, &u).ok()?;
        let out = DVector::from_iterator(self.interior.len(), self.interior.iter().map(|v| k[v]));
        out.iter().all(|x| x.is_finite()).then_some(out)
    }

    fn jacobian_with_step(&self, x: &DVector<f64>, h: f64) -> Option<DMatrix<f64>> {
        let n = self.interior.len();
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[j] += h;
            minus[j] -= h;
            let col = (self.curvature_at(&plus)? - self.curvature_at(&minus)?) / (2.0 * h);
            jac.set_column(j, &col);
        }
        Some(jac)
    }

    fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>, SolveError> {
        self.jacobian_with_step(x, FD_STEP)
            .or_else(|| self.jacobian_with_step(x, FD_STEP * FD_RETRY_FACTOR))
            .ok_or(SolveError::DegenerateProbe)
    }
}

/// `dK_i / du_j` over interior vertices (ordered by id), by central finite
/// differences with step [`FD_STEP`]; the step shrinks once by a factor
/// 100 if a probe degenerates.
pub fn curvature_jacobian(
    tri: &Triangulation,
    eta: &WeightAssignment,
    u: &LabelAssignment,
) -> Result<DMatrix<f64>, SolveError> {
    let p = Problem::new(tri, eta, u);
    p.curvature_at(&p.interior_vector())
        .ok_or(SolveError::Metric(MetricError::DegenerateTriangle(
            [f64::NAN; 3],
        )))
        .and_then(|_| p.jacobian(&p.interior_vector()))
}

/// Central-difference Jacobian at an explicit step.
pub fn curvature_jacobian_with_step(
    tri: &Triangulation,
    eta: &WeightAssignment,
    u: &LabelAssignment,
    h: f64,
) -> Result<DMatrix<f64>, SolveError> {
    let p = Problem::new(tri, eta, u);
    p.jacobian_with_step(&p.interior_vector(), h)
        .ok_or(SolveError::DegenerateProbe)
}

/// Default initial labels: hyperbolic interior radius
/// [`DEFAULT_INITIAL_RADIUS`] (Euclidean: radius 1), boundary from `config`.
pub fn default_initial_labels(
    tri: &Triangulation,
    config: &SolveConfig,
) -> Result<LabelAssignment, SolveError> {
    let r0 = match config.geometry {
        Geometry::Hyperbolic => DEFAULT_INITIAL_RADIUS,
        Geometry::Euclidean => 1.0,
    };
    let mut radii: BTreeMap<VertexId, f64> = tri
        .interior_vertices()
        .into_iter()
        .map(|v| (v, r0))
        .collect();
    radii.extend(config.boundary_radii.iter().map(|(&v, &r)| (v, r)));
    Ok(RadiusAssignment::new(tri, config.geometry, radii)?.to_labels())
}

fn max_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton iteration on the interior labels. Boundary labels are
/// overwritten with the fixed radii of `config`.
pub fn solve_prescribed_curvature(
    tri: &Triangulation,
    eta: &WeightAssignment,
    config: &SolveConfig,
    initial: &LabelAssignment,
) -> Result<SolveReport, SolveError> {
    config.validate(tri)?;
    if initial.geometry != config.geometry {
        return Err(SolveError::Config(
            "initial labels and config disagree on geometry".into(),
        ));
    }
    let mut labels = initial.as_map().clone();
    for (&v, &r) in &config.boundary_radii {
        labels.insert(v, radius_to_label(config.geometry, r));
    }
    let start = LabelAssignment::new(tri, config.geometry, labels)?;
    let problem = Problem::new(tri, eta, &start);
    let target = DVector::from_iterator(
        problem.interior.len(),
        problem.interior.iter().map(|v| config.target_k[v]),
    );

    let mut x = problem.interior_vector();
    let k0 = match problem.curvature_at(&x) {
        Some(k) => k,
        None => {
            // surface the face-level diagnosis
            curvature_map(tri, eta, &start)?;
            return Err(SolveError::Config("initial labels are out of range".into()));
        }
    };
    let mut residual = k0 - &target;
    let mut history = vec![max_norm(&residual)];
    let mut incidents = 0;
    let mut iterations = 0;

    let finish = |x: &DVector<f64>, history: Vec<f64>, converged, iterations, incidents| {
        let labels = LabelAssignment::new(tri, config.geometry, problem.with_interior(x))?;
        Ok::<_, SolveError>(SolveReport {
            radii: labels.to_radii(),
            labels,
            residual_history: history,
            converged,
            iterations,
            degenerate_incidents: incidents,
        })
    };

    while *history.last().unwrap() > config.residual_tol && iterations < config.max_iterations {
        iterations += 1;
        let jac = match problem.jacobian(&x) {
            Ok(j) => j,
            Err(e) if iterations == 1 => return Err(e),
            Err(_) => break,
        };
        let step = match jac.clone().lu().solve(&(-&residual)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => {
                return Err(SolveError::SingularJacobian {
                    condition: condition_estimate(&jac),
                })
            }
        };
        let current = *history.last().unwrap();
        let mut t = config.step_damping;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + &step * t;
            match problem.curvature_at(&trial) {
                Some(k) => {
                    let r = k - &target;
                    if max_norm(&r) <= current {
                        accepted = Some((trial, r));
                        break;
                    }
                }
                None => incidents += 1,
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, r)) => {
                x = trial;
                residual = r;
                history.push(max_norm(&residual));
            }
            None => break,
        }
    }

    let converged = *history.last().unwrap() <= config.residual_tol;
    let report = finish(&x, history, converged, iterations, incidents)?;
    if converged {
        Ok(report)
    } else {
        let best_residual = report
            .residual_history
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        Err(SolveError::NotConverged {
            iterations,
            best_residual,
            report: Box::new(report),
        })
    }
}

/// Ratio of extreme singular values.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let s = m.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("layout needs hyperbolic edge lengths")]
    NotHyperbolic,
    #[error("seed face {0} does not exist")]
    NoSeedFace(usize),
    #[error("holonomy mismatch {mismatch:e} at vertex {vertex}")]
    Holonomy { vertex: VertexId, mismatch: f64 },
    #[error("vertex {0} left the disk")]
    Escaped(VertexId),
    #[error("triangulation is not connected through interior edges")]
    Unreached,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Positions of a developed packing in the Poincaré disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskLayout {
    pub positions: BTreeMap<VertexId, Point>,
    /// Per face: true when its vertices appear counter-clockwise.
    pub orientation: Vec<bool>,
    /// Largest disagreement between two placements of the same vertex.
    pub closing_error: f64,
}

impl DiskLayout {
    pub fn position(&self, v: VertexId) -> Point {
        self.positions[&v]
    }

    /// Largest deviation between laid-out hyperbolic distances and `lengths`.
    pub fn isometry_error(&self, lengths: &EdgeLengthTable) -> Result<f64, GeometryError> {
        let mut worst: f64 = 0.0;
        for (e, &l) in &lengths.lengths {
            let d = hyp_distance(self.position(e.lo()), self.position(e.hi()))?;
            worst = worst.max((d - l).abs());
        }
        Ok(worst)
    }

    /// Moves `v` to the origin by a disk automorphism.
    pub fn centered_at(&self, v: VertexId) -> Result<DiskLayout, GeometryError> {
        let m = DiskMobius::to_origin(self.position(v))?;
        Ok(DiskLayout {
            positions: self
                .positions
                .iter()
                .map(|(&k, &p)| (k, m.apply(p)))
                .collect(),
            orientation: self.orientation.clone(),
            closing_error: self.closing_error,
        })
    }
}

/// Develops a hyperbolic metric into the disk. The first vertex of
/// `seed_face` goes to the origin and the second onto the positive real
/// axis; faces are then attached breadth-first across interior edges.
/// Fails with [`LayoutError::Holonomy`] when two paths place a vertex more
/// than [`HOLONOMY_TOL`] apart.
pub fn layout_in_disk(
    tri: &Triangulation,
    lengths: &EdgeLengthTable,
    seed_face: usize,
) -> Result<DiskLayout, LayoutError> {
    develop(tri, lengths, seed_face, Some(HOLONOMY_TOL))
}

/// As [`layout_in_disk`], keeping the first placement of each vertex and
/// only recording the closing error.
pub fn layout_in_disk_unchecked(
    tri: &Triangulation,
    lengths: &EdgeLengthTable,
    seed_face: usize,
) -> Result<DiskLayout, LayoutError> {
    develop(tri, lengths, seed_face, None)
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

/// Angle at corner `p` of the face with the given other corners.
fn corner_angle(
    lengths: &EdgeLengthTable,
    p: VertexId,
    q: VertexId,
    s: VertexId,
) -> Result<f64, MetricError> {
    let a = triangle_angles(
        [lengths.get(q, s), lengths.get(p, s), lengths.get(p, q)],
        lengths.geometry,
    )?;
    Ok(a[0])
}

/// Position of `s` given `p`, `q` placed and `(p, q, s)` counter-clockwise.
fn place_apex(
    lengths: &EdgeLengthTable,
    pp: Point,
    pq: Point,
    p: VertexId,
    q: VertexId,
    s: VertexId,
) -> Result<Point, LayoutError> {
    let m = DiskMobius::to_origin(pp)?;
    let phi = m.apply(pq).arg();
    let alpha = corner_angle(lengths, p, q, s)?;
    let local = Point::from_polar((lengths.get(p, s) / 2.0).tanh(), phi + alpha);
    Ok(m.apply_inverse(local))
}

fn develop(
    tri: &Triangulation,
    lengths: &EdgeLengthTable,
    seed_face: usize,
    holonomy_tol: Option<f64>,
) -> Result<DiskLayout, LayoutError> {
    if lengths.geometry != Geometry::Hyperbolic {
        return Err(LayoutError::NotHyperbolic);
    }
    let faces = tri.faces();
    let seed = *faces
        .get(seed_face)
        .ok_or(LayoutError::NoSeedFace(seed_face))?;
    for (fi, f) in faces.iter().enumerate() {
        let l = lengths.face_lengths(f);
        triangle_angles(l, Geometry::Hyperbolic).map_err(|_| MetricError::Degenerate {
            face: fi,
            lengths: l,
        })?;
    }

    let mut pos: BTreeMap<VertexId, Point> = BTreeMap::new();
    let [a, b, c] = seed;
    pos.insert(a, Point::new(0.0, 0.0));
    pos.insert(b, Point::new((lengths.get(a, b) / 2.0).tanh(), 0.0));
    pos.insert(c, place_apex(lengths, pos[&a], pos[&b], a, b, c)?);

    let mut closing_error: f64 = 0.0;
    let mut visited = vec![false; faces.len()];
    visited[seed_face] = true;
    let mut queue = VecDeque::from([seed_face]);
    while let Some(fi) = queue.pop_front() {
        let f = faces[fi];
        for k in 0..3 {
            let edge = EdgeKey::new(f[(k + 1) % 3], f[(k + 2) % 3]);
            let Some(gi) = tri.edges()[&edge].faces().find(|&g| g != fi) else {
                continue;
            };
            if visited[gi] {
                continue;
            }
            visited[gi] = true;
            queue.push_back(gi);
            let g = faces[gi];
            // rotate g so that its apex comes last: (p, q, s) in face order
            let s_idx = (0..3).find(|&i| !edge.contains(g[i])).expect("apex");
            let (p, q, s) = (g[(s_idx + 1) % 3], g[(s_idx + 2) % 3], g[s_idx]);
            let placed = place_apex(lengths, pos[&p], pos[&q], p, q, s)?;
            if placed.norm() >= 1.0 {
                return Err(LayoutError::Escaped(s));
            }
            match pos.get(&s) {
                Some(&old) => {
                    let mismatch = (old - placed).norm();
                    closing_error = closing_error.max(mismatch);
                    if let Some(tol) = holonomy_tol {
                        if mismatch > tol {
                            return Err(LayoutError::Holonomy {
                                vertex: s,
                                mismatch,
                            });
                        }
                    }
                }
                None => {
                    pos.insert(s, placed);
                }
            }
        }
    }
    if visited.iter().any(|v| !v) || pos.len() != tri.num_vertices() {
        return Err(LayoutError::Unreached);
    }
    let orientation = faces
        .iter()
        .map(|f| signed_area(pos[&f[0]], pos[&f[1]], pos[&f[2]]) > 0.0)
        .collect();
    Ok(DiskLayout {
        positions: pos,
        orientation,
        closing_error,
    })
}
