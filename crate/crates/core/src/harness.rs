//! Randomized instance generation and numerical checks of the maximum
//! principle, the discrete Schwarz-Ahlfors lemma, the scaling lemmas and
//! finite rigidity.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypgeom::{
    euc_to_hyp_circle, generalized_radius, hyp_to_euc_circle, EuclideanCircle, GeneralizedRadius,
    GeometryError, HyperbolicCircle, Point, RadiusRatio,
};
use crate::mesh::{
    check_regular_weight, check_structure_condition, label_to_radius, EdgeKey, Geometry, MeshError,
    RadiusAssignment, Triangulation, VertexId, WeightAssignment,
};
use crate::metrics::{
    edge_lengths, is_weighted_delaunay_packing, packing_curvature, CurvatureVector, MetricError,
};
use crate::solver::{
    layout_in_disk, layout_in_disk_unchecked, solve_prescribed_curvature, DiskLayout, LayoutError,
    SolveConfig, SolveError,
};

/// Violations of a strict inequality smaller than this are reported as
/// numerical-boundary cases.
pub const BOUNDARY_FLAG: f64 = 1e-12;
/// Slack on the radius comparison of the Schwarz-Ahlfors check.
pub const SCHWARZ_SLACK: f64 = 1e-10;
/// Max-norm agreement required between solves from different starts.
pub const RIGIDITY_TOL: f64 = 1e-8;
pub const RIGIDITY_MU: f64 = 1.05;
pub const REJECTION_BUDGET: usize = 10_000;
pub const RADIUS_RANGE: (f64, f64) = (0.05, 0.5);
/// Upper end of the sampled weights in the `[0,inf)` regime.
pub const NONNEGATIVE_ETA_MAX: f64 = 2.0;
pub const NON_VACUOUS_MIN_RATE: f64 = 0.3;
/// Share of star instances whose `r_bar` is drawn by [`coupled_radii`].
pub const COUPLED_SHARE: f64 = 0.5;
/// Coupled share for the generalized suite, whose uncoupled draws are almost always vacuous.
pub const GENERALIZED_COUPLED_SHARE: f64 = 0.9;

const WEIGHT_RESTARTS: usize = 1000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("star needs at least 3 sides, got {0}")]
    TooFewSides(usize),
    #[error("rejection budget of {attempts} attempts exhausted while sampling {what}")]
    RejectionBudget { attempts: usize, what: &'static str },
    #[error("fewer than two solves converged ({0})")]
    TooFewSolves(usize),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Weight range of a theorem instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `eta in (-1, 1]`
    #[serde(rename = "(-1,1]")]
    Bounded,
    /// `eta in [0, inf)`
    #[serde(rename = "[0,inf)")]
    NonNegative,
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::Bounded, Regime::NonNegative];

    pub fn contains(&self, eta: f64) -> bool {
        match self {
            Regime::Bounded => eta > -1.0 && eta <= 1.0,
            Regime::NonNegative => eta >= 0.0 && eta.is_finite(),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            Regime::Bounded => 1.0 - 2.0 * rng.random::<f64>(),
            Regime::NonNegative => rng.random_range(0.0..=NONNEGATIVE_ETA_MAX),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Bounded => "(-1,1]",
            Regime::NonNegative => "[0,inf)",
        })
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "(-1,1]" | "bounded" => Ok(Regime::Bounded),
            "[0,inf)" | "[0,∞)" | "nonnegative" => Ok(Regime::NonNegative),
            other => Err(format!(
                "unknown regime {other:?}; expected \"(-1,1]\" or \"[0,inf)\""
            )),
        }
    }
}

/// Seed of trial `index` in a run with base seed `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Values `c` of a face's third weight that keep the structure condition
/// satisfiable when the other two weights are `a` and `b` (if assigned).
/// A pair is completable iff at most one is negative and its magnitude is
/// at most the other, i.e. `c >= -a`.
fn feasible_interval(a: Option<f64>, b: Option<f64>) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    match (a, b) {
        (None, None) => {}
        (Some(a), None) | (None, Some(a)) => lo = -a,
        (Some(a), Some(b)) => {
            lo = -a * b;
            // a + b c >= 0 and b + a c >= 0
            for (k, m) in [(b, a), (a, b)] {
                if k > 0.0 {
                    lo = lo.max(-m / k);
                } else if k < 0.0 {
                    hi = hi.min(-m / k);
                } else if m < 0.0 {
                    return None;
                }
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Weights in `regime` satisfying the structure condition on every face
/// and the regularity condition. Edges are drawn in key order, each
/// uniformly from the values compatible with its already-drawn face
/// neighbours; an empty range restarts the assignment.
pub fn sample_weights(
    tri: &Triangulation,
    regime: Regime,
    rng: &mut impl Rng,
) -> Result<WeightAssignment, HarnessError> {
    let faces_of: BTreeMap<EdgeKey, Vec<[VertexId; 3]>> = tri
        .edges()
        .iter()
        .map(|(&e, ef)| (e, ef.faces().map(|f| tri.faces()[f]).collect()))
        .collect();
    let (reg_lo, reg_hi) = match regime {
        Regime::Bounded => (-1.0f64, 1.0f64),
        Regime::NonNegative => (0.0, NONNEGATIVE_ETA_MAX),
    };
    'restart: for _ in 0..WEIGHT_RESTARTS {
        let mut eta: BTreeMap<EdgeKey, f64> = BTreeMap::new();
        for (&e, faces) in &faces_of {
            let (mut lo, mut hi) = (reg_lo, reg_hi);
            for f in faces {
                let others: Vec<Option<f64>> = (0..3)
                    .map(|k| EdgeKey::new(f[k], f[(k + 1) % 3]))
                    .filter(|&o| o != e)
                    .map(|o| eta.get(&o).copied())
                    .collect();
                let Some((a, b)) = feasible_interval(others[0], others[1]) else {
                    continue 'restart;
                };
                lo = lo.max(a);
                hi = hi.min(b);
            }
            if lo > hi {
                continue 'restart;
            }
            let v = rng.random_range(lo..=hi);
            if !regime.contains(v) {
                continue 'restart;
            }
            eta.insert(e, v);
        }
        let w = WeightAssignment::new(tri, eta)?;
        if check_structure_condition(tri, &w).pass && check_regular_weight(tri, &w).pass {
            return Ok(w);
        }
    }
    Err(HarnessError::RejectionBudget {
        attempts: WEIGHT_RESTARTS,
        what: "weights",
    })
}

/// Hyperbolic radii, log-uniform in [`RADIUS_RANGE`].
pub fn sample_radii(tri: &Triangulation, rng: &mut impl Rng) -> RadiusAssignment {
    let radii = tri
        .vertex_ids()
        .map(|v| (v, log_uniform(rng, RADIUS_RANGE.0, RADIUS_RANGE.1)))
        .collect();
    RadiusAssignment::new(tri, Geometry::Hyperbolic, radii).expect("positive radii")
}

/// Second packing of a star drawn relative to `r`: `w_0 = s a` and
/// `w_i = w_0 + s b_i` with a random sign `s`, `a` in `(0, 0.5)` and
/// `b_i` in `(-0.3, 0.6)`. Rim labels then tend to move further than the
/// center, which is where the maximum principle has content.
pub fn coupled_radii(
    tri: &Triangulation,
    r: &RadiusAssignment,
    rng: &mut impl Rng,
) -> RadiusAssignment {
    let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let w0 = s * rng.random_range(0.0..0.5);
    let u = r.to_labels();
    let radii = tri
        .vertex_ids()
        .map(|v| {
            let w = if v == 0 {
                w0
            } else {
                w0 + s * rng.random_range(-0.3..0.6)
            };
            (
                v,
                label_to_radius(Geometry::Hyperbolic, (u.get(v) + w).min(-1e-3)),
            )
        })
        .collect();
    RadiusAssignment::new(tri, Geometry::Hyperbolic, radii).expect("positive radii")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Certificates {
    pub non_degenerate: bool,
    pub delaunay_r: bool,
    pub delaunay_r_bar: bool,
    pub circles_in_disk: bool,
    pub structure_condition: bool,
    pub regular: bool,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.non_degenerate
            && self.delaunay_r
            && self.delaunay_r_bar
            && self.circles_in_disk
            && self.structure_condition
            && self.regular
    }
}

/// Two hyperbolic packings of a star with center `v0 = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct StarInstance {
    pub n: usize,
    pub regime: Regime,
    pub seed: u64,
    pub tri: Triangulation,
    pub eta: WeightAssignment,
    pub r: RadiusAssignment,
    pub r_bar: RadiusAssignment,
    /// Fan layouts with `v0` at the origin.
    pub layout_r: DiskLayout,
    pub layout_r_bar: DiskLayout,
    pub certificates: Certificates,
    pub attempts: usize,
}

impl StarInstance {
    /// `w_i = u_bar_i - u_i`.
    pub fn w(&self) -> BTreeMap<VertexId, f64> {
        let (u, ub) = (self.r.to_labels(), self.r_bar.to_labels());
        self.tri
            .vertex_ids()
            .map(|v| (v, ub.get(v) - u.get(v)))
            .collect()
    }
}

/// Euclidean images of the circles of `radii` placed at `layout`.
pub fn euclidean_circles(
    layout: &DiskLayout,
    radii: &RadiusAssignment,
) -> Result<BTreeMap<VertexId, EuclideanCircle>, GeometryError> {
    radii
        .iter()
        .map(|(v, r)| {
            let c = HyperbolicCircle::new(layout.position(v), r)?;
            Ok((v, hyp_to_euc_circle(&c)?))
        })
        .collect()
}

/// Fan layout of a star with the center at the origin.
fn star_layout(
    tri: &Triangulation,
    eta: &WeightAssignment,
    radii: &RadiusAssignment,
) -> Result<DiskLayout, HarnessError> {
    let lengths = edge_lengths(tri, eta, radii)?;
    Ok(layout_in_disk_unchecked(tri, &lengths, 0)?.centered_at(0)?)
}

fn certify(
    tri: &Triangulation,
    eta: &WeightAssignment,
    r: &RadiusAssignment,
    r_bar: &RadiusAssignment,
) -> Option<(Certificates, DiskLayout, DiskLayout)> {
    let del_r = is_weighted_delaunay_packing(tri, eta, r).ok()?;
    let del_rb = is_weighted_delaunay_packing(tri, eta, r_bar).ok()?;
    let layout_r = star_layout(tri, eta, r).ok()?;
    let layout_rb = star_layout(tri, eta, r_bar).ok()?;
    let inside = |lay: &DiskLayout, radii: &RadiusAssignment| {
        euclidean_circles(lay, radii)
            .map(|cs| cs.values().all(EuclideanCircle::is_inside_disk))
            .unwrap_or(false)
    };
    let cert = Certificates {
        non_degenerate: true,
        delaunay_r: del_r.pass,
        delaunay_r_bar: del_rb.pass,
        circles_in_disk: inside(&layout_r, r) && inside(&layout_rb, r_bar),
        structure_condition: check_structure_condition(tri, eta).pass,
        regular: check_regular_weight(tri, eta).pass,
    };
    cert.all().then_some((cert, layout_r, layout_rb))
}

/// Star instance with every certificate passing, by rejection sampling.
/// Deterministic in `seed`.
pub fn random_star_instance(
    n: usize,
    regime: Regime,
    seed: u64,
) -> Result<StarInstance, HarnessError> {
    if n < 3 {
        return Err(HarnessError::TooFewSides(n));
    }
    let tri = Triangulation::star_polygon(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=REJECTION_BUDGET {
        let eta = sample_weights(&tri, regime, &mut rng)?;
        let r = sample_radii(&tri, &mut rng);
        let r_bar = if rng.random_bool(COUPLED_SHARE) {
            coupled_radii(&tri, &r, &mut rng)
        } else {
            sample_radii(&tri, &mut rng)
        };
        if let Some((certificates, layout_r, layout_r_bar)) = certify(&tri, &eta, &r, &r_bar) {
            return Ok(StarInstance {
                n,
                regime,
                seed,
                tri,
                eta,
                r,
                r_bar,
                layout_r,
                layout_r_bar,
                certificates,
                attempts: attempt,
            });
        }
    }
    Err(HarnessError::RejectionBudget {
        attempts: REJECTION_BUDGET,
        what: "star instance",
    })
}

/// Result of checking one instance against one theorem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Outcome {
    /// No hypothesis branch applies.
    Vacuous,
    /// Hypotheses hold and the conclusion holds with the given margin.
    Holds {
        margin: f64,
    },
    /// Conclusion fails by less than the boundary flag.
    NumericalBoundary {
        margin: f64,
    },
    Violation {
        margin: f64,
    },
    /// Instance could not be built or solved.
    Skipped {
        reason: String,
    },
    /// Symbolic radius arithmetic produced an indeterminate value.
    Disqualified {
        reason: String,
    },
}

impl Outcome {
    /// Classifies the margin of a strict inequality `margin > 0`.
    pub fn strict(margin: f64) -> Self {
        if margin > 0.0 {
            Outcome::Holds { margin }
        } else if margin > -BOUNDARY_FLAG {
            Outcome::NumericalBoundary { margin }
        } else {
            Outcome::Violation { margin }
        }
    }

    /// Classifies the margin of `margin >= 0` with slack `slack`.
    pub fn non_strict(margin: f64, slack: f64) -> Self {
        if margin >= 0.0 {
            Outcome::Holds { margin }
        } else if margin >= -slack {
            Outcome::NumericalBoundary { margin }
        } else {
            Outcome::Violation { margin }
        }
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Outcome::Violation { .. })
    }

    pub fn applies(&self) -> bool {
        matches!(
            self,
            Outcome::Holds { .. } | Outcome::NumericalBoundary { .. } | Outcome::Violation { .. }
        )
    }
}

/// Aggregate of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub suite: String,
    pub regime: Option<Regime>,
    pub base_seed: u64,
    pub trials: usize,
    pub skipped: usize,
    pub disqualified: usize,
    pub vacuous: usize,
    /// Trials whose hypotheses hold.
    pub hypothesis_count: usize,
    pub violation_count: usize,
    pub boundary_count: usize,
    /// Smallest margin among hypothesis-satisfying trials.
    pub worst_margin: Option<f64>,
    pub violation_seeds: Vec<u64>,
    pub boundary_seeds: Vec<u64>,
    /// Suite-specific figures.
    pub extras: BTreeMap<String, f64>,
}

impl TrialReport {
    pub fn new(suite: &str, regime: Option<Regime>, base_seed: u64) -> Self {
        TrialReport {
            suite: suite.to_string(),
            regime,
            base_seed,
            trials: 0,
            skipped: 0,
            disqualified: 0,
            vacuous: 0,
            hypothesis_count: 0,
            violation_count: 0,
            boundary_count: 0,
            worst_margin: None,
            violation_seeds: Vec::new(),
            boundary_seeds: Vec::new(),
            extras: BTreeMap::new(),
        }
    }

    /// Folds outcomes in the given order.
    pub fn from_outcomes(
        suite: &str,
        regime: Option<Regime>,
        base_seed: u64,
        outcomes: impl IntoIterator<Item = (u64, Outcome)>,
    ) -> Self {
        let mut rep = Self::new(suite, regime, base_seed);
        for (seed, o) in outcomes {
            rep.record(seed, &o);
        }
        rep
    }

    pub fn record(&mut self, seed: u64, o: &Outcome) {
        self.trials += 1;
        let margin = match *o {
            Outcome::Vacuous => {
                self.vacuous += 1;
                return;
            }
            Outcome::Skipped { .. } => {
                self.skipped += 1;
                return;
            }
            Outcome::Disqualified { .. } => {
                self.disqualified += 1;
                return;
            }
            Outcome::Holds { margin } => margin,
            Outcome::NumericalBoundary { margin } => {
                self.boundary_count += 1;
                self.boundary_seeds.push(seed);
                margin
            }
            Outcome::Violation { margin } => {
                self.violation_count += 1;
                self.violation_seeds.push(seed);
                margin
            }
        };
        self.hypothesis_count += 1;
        self.worst_margin = Some(self.worst_margin.map_or(margin, |m| m.min(margin)));
    }

    /// Share of built instances (not skipped) satisfying a hypothesis.
    pub fn non_vacuous_rate(&self) -> f64 {
        let built = self.trials - self.skipped;
        if built == 0 {
            0.0
        } else {
            self.hypothesis_count as f64 / built as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    /// Counts agree with the number of trials.
    pub fn is_consistent(&self) -> bool {
        self.skipped + self.disqualified + self.vacuous + self.hypothesis_count == self.trials
            && self.violation_count + self.boundary_count <= self.hypothesis_count
            && self.violation_seeds.len() == self.violation_count
    }
}

fn run_trials(
    suite: &str,
    regime: Option<Regime>,
    base_seed: u64,
    trials: usize,
    trial: impl Fn(u64) -> Outcome + Sync,
) -> TrialReport {
    let outcomes: Vec<(u64, Outcome)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(base_seed, i);
            (s, trial(s))
        })
        .collect();
    TrialReport::from_outcomes(suite, regime, base_seed, outcomes)
}

fn k0(
    tri: &Triangulation,
    eta: &WeightAssignment,
    r: &RadiusAssignment,
) -> Result<f64, MetricError> {
    Ok(packing_curvature(tri, eta, r)?[&0])
}

/// Maximum principle on a star: branch (i) `K_0(r) >= K_0(r_bar)`,
/// `w_0 > 0` requires `w_0 < max_i w_i`; branch (ii) is the mirror image.
pub fn check_max_principle(inst: &StarInstance) -> Outcome {
    let (k, kb) = match (
        k0(&inst.tri, &inst.eta, &inst.r),
        k0(&inst.tri, &inst.eta, &inst.r_bar),
    ) {
        (Ok(k), Ok(kb)) => (k, kb),
        (Err(e), _) | (_, Err(e)) => {
            return Outcome::Skipped {
                reason: e.to_string(),
            }
        }
    };
    max_principle_outcome(k, kb, &inst.w())
}

fn max_principle_outcome(k: f64, kb: f64, w: &BTreeMap<VertexId, f64>) -> Outcome {
    let w0 = w[&0];
    let rim = w.iter().filter(|(&v, _)| v != 0).map(|(_, &x)| x);
    if k >= kb && w0 > 0.0 {
        Outcome::strict(rim.fold(f64::NEG_INFINITY, f64::max) - w0)
    } else if k <= kb && w0 < 0.0 {
        Outcome::strict(w0 - rim.fold(f64::INFINITY, f64::min))
    } else {
        Outcome::Vacuous
    }
}

fn random_star_size(rng: &mut impl Rng) -> usize {
    rng.random_range(3..=8)
}

pub fn max_principle_suite(regime: Regime, trials: usize, seed: u64) -> TrialReport {
    run_trials("max-principle", Some(regime), seed, trials, |s| {
        let n = random_star_size(&mut ChaCha8Rng::seed_from_u64(s ^ 0x5eed));
        match random_star_instance(n, regime, s) {
            Ok(inst) => check_max_principle(&inst),
            Err(e) => Outcome::Skipped {
                reason: e.to_string(),
            },
        }
    })
}

/// A star instance whose `r`-circles are scaled by `mu` about the center
/// of `v0`, so that some of them cross the unit circle.
#[derive(Debug, Clone, Serialize)]
pub struct GeneralizedInstance {
    pub base: StarInstance,
    pub mu: f64,
    pub circles_r: BTreeMap<VertexId, EuclideanCircle>,
    pub rho: BTreeMap<VertexId, GeneralizedRadius>,
    pub rho_bar: BTreeMap<VertexId, GeneralizedRadius>,
}

/// Scales the `r`-packing of `base` by `mu` and computes generalized radii.
pub fn generalize_instance(
    base: StarInstance,
    mu: f64,
) -> Result<GeneralizedInstance, HarnessError> {
    let circles_r = euclidean_circles(&base.layout_r, &base.r)?
        .into_iter()
        .map(|(v, c)| Ok((v, c.scale(mu)?)))
        .collect::<Result<BTreeMap<_, _>, GeometryError>>()?;
    let rho = circles_r
        .iter()
        .map(|(&v, c)| Ok((v, generalized_radius(c)?)))
        .collect::<Result<_, GeometryError>>()?;
    let rho_bar = base
        .r_bar
        .iter()
        .map(|(v, r)| (v, GeneralizedRadius::Finite((r / 2.0).tanh())))
        .collect();
    Ok(GeneralizedInstance {
        base,
        mu,
        circles_r,
        rho,
        rho_bar,
    })
}

/// Star instance with `r` scaled so that at least one circle crosses the
/// unit circle while every circle still meets the disk.
pub fn random_generalized_instance(
    n: usize,
    regime: Regime,
    seed: u64,
) -> Result<GeneralizedInstance, HarnessError> {
    let base = random_star_instance(n, regime, seed)?;
    let circles = euclidean_circles(&base.layout_r, &base.r)?;
    let far = circles
        .values()
        .map(|c| c.center.norm() + c.radius)
        .fold(0.0, f64::max);
    let near = circles
        .values()
        .map(|c| c.center.norm() - c.radius)
        .fold(0.0, f64::max);
    let lo = (1.0 / far) * (1.0 + 1e-9);
    let hi = if near > 0.0 {
        (1.0 / near) * (1.0 - 1e-9)
    } else {
        f64::INFINITY
    };
    let hi = hi.min(lo * 1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mu = rng.random_range(lo..hi);
    let mut g = generalize_instance(base, mu)?;
    for _ in 0..REJECTION_BUDGET {
        let r_bar = if rng.random_bool(GENERALIZED_COUPLED_SHARE) {
            coupled_generalized_radii(&g, &mut rng)
        } else {
            sample_radii(&g.base.tri, &mut rng)
        };
        let b = &g.base;
        if !matches!(is_weighted_delaunay_packing(&b.tri, &b.eta, &r_bar), Ok(rep) if rep.pass) {
            continue;
        }
        let Ok(layout) = star_layout(&b.tri, &b.eta, &r_bar) else {
            continue;
        };
        g.rho_bar = r_bar
            .iter()
            .map(|(v, r)| (v, GeneralizedRadius::Finite((r / 2.0).tanh())))
            .collect();
        g.base.r_bar = r_bar;
        g.base.layout_r_bar = layout;
        return Ok(g);
    }
    Err(HarnessError::RejectionBudget {
        attempts: REJECTION_BUDGET,
        what: "generalized instance",
    })
}

/// `r_bar` drawn relative to the scaled packing: `ln rho_bar_v = ln rho_v + w_v`
/// with `w_0 = a > 0` and `w_i = a + b_i` as in [`coupled_radii`]. Vertices
/// whose scaled circle leaves the disk have `w = -inf` whatever `r_bar` is;
/// they get large circles, which lowers `K_0(r_bar)`.
fn coupled_generalized_radii(g: &GeneralizedInstance, rng: &mut impl Rng) -> RadiusAssignment {
    let w0 = rng.random_range(0.0..0.5);
    let radii = g
        .rho
        .iter()
        .map(|(&v, rho)| {
            let w = if v == 0 {
                w0
            } else {
                w0 + rng.random_range(-0.3..1.2)
            };
            let u = match rho {
                GeneralizedRadius::Finite(x) => x.ln() + w,
                GeneralizedRadius::Infinite(_) => rng.random_range(0.5f64..0.95).ln(),
            };
            (v, label_to_radius(Geometry::Hyperbolic, u.min(-1e-3)))
        })
        .collect();
    RadiusAssignment::new(&g.base.tri, Geometry::Hyperbolic, radii).expect("positive radii")
}

/// `w_v = ln(rho_bar_v / rho_v)`; `None` for an indeterminate ratio.
pub fn generalized_w(inst: &GeneralizedInstance) -> Option<BTreeMap<VertexId, f64>> {
    inst.rho
        .iter()
        .map(|(&v, rho)| {
            let ratio = inst.rho_bar[&v].ratio(rho).ok()?;
            Some((v, ratio.ln()?))
        })
        .collect()
}

/// Generalized maximum principle: with `K_0(r) >= K_0(r_bar)`, a positive
/// maximum of `w` is never attained at `v0`.
pub fn check_generalized_max_principle(inst: &GeneralizedInstance) -> Outcome {
    let b = &inst.base;
    // angles at the origin are unchanged by scaling about it
    let (k, kb) = match (k0(&b.tri, &b.eta, &b.r), k0(&b.tri, &b.eta, &b.r_bar)) {
        (Ok(k), Ok(kb)) => (k, kb),
        (Err(e), _) | (_, Err(e)) => {
            return Outcome::Skipped {
                reason: e.to_string(),
            }
        }
    };
    let Some(w) = generalized_w(inst) else {
        return Outcome::Disqualified {
            reason: "indeterminate generalized radius ratio".into(),
        };
    };
    if w.values().any(|x| *x == f64::INFINITY) {
        return Outcome::Disqualified {
            reason: "infinite ratio".into(),
        };
    }
    let w0 = w[&0];
    if k >= kb && w0 > 0.0 {
        let rim_max = w
            .iter()
            .filter(|(&v, _)| v != 0)
            .map(|(_, &x)| x)
            .fold(f64::NEG_INFINITY, f64::max);
        Outcome::strict(rim_max - w0)
    } else {
        Outcome::Vacuous
    }
}

pub fn generalized_suite(regime: Regime, trials: usize, seed: u64) -> TrialReport {
    run_trials("generalized", Some(regime), seed, trials, |s| {
        let n = random_star_size(&mut ChaCha8Rng::seed_from_u64(s ^ 0x5eed));
        match random_generalized_instance(n, regime, s) {
            Ok(inst) => check_generalized_max_principle(&inst),
            Err(e) => Outcome::Skipped {
                reason: e.to_string(),
            },
        }
    })
}

/// Discrete Schwarz-Ahlfors comparison of two packings on a compact
/// triangulation. Branch (a): `K(r) >= K(r_bar)` inside and `r >= r_bar`
/// on the boundary give `r >= r_bar` everywhere; branch (b) mirrors it.
pub fn check_schwarz_lemma(
    tri: &Triangulation,
    eta: &WeightAssignment,
    r: &RadiusAssignment,
    r_bar: &RadiusAssignment,
) -> Outcome {
    let (k, kb) = match (
        packing_curvature(tri, eta, r),
        packing_curvature(tri, eta, r_bar),
    ) {
        (Ok(k), Ok(kb)) => (k, kb),
        (Err(e), _) | (_, Err(e)) => {
            return Outcome::Skipped {
                reason: e.to_string(),
            }
        }
    };
    let interior = tri.interior_vertices();
    let boundary = tri.boundary_vertices();
    let diff: BTreeMap<VertexId, f64> = tri
        .vertex_ids()
        .map(|v| (v, r.get(v) - r_bar.get(v)))
        .collect();
    let min_all = diff.values().copied().fold(f64::INFINITY, f64::min);
    let max_all = diff.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let a = interior.iter().all(|v| k[v] >= kb[v]) && boundary.iter().all(|v| diff[v] >= 0.0);
    let b = interior.iter().all(|v| k[v] <= kb[v]) && boundary.iter().all(|v| diff[v] <= 0.0);
    match (a, b) {
        (true, true) => Outcome::non_strict(min_all.min(-max_all), SCHWARZ_SLACK),
        (true, false) => Outcome::non_strict(min_all, SCHWARZ_SLACK),
        (false, true) => Outcome::non_strict(-max_all, SCHWARZ_SLACK),
        (false, false) => Outcome::Vacuous,
    }
}

/// Random weighted Delaunay packing with radii in [`RADIUS_RANGE`].
fn random_delaunay_packing(
    tri: &Triangulation,
    eta: &WeightAssignment,
    rng: &mut impl Rng,
) -> Result<RadiusAssignment, HarnessError> {
    for _ in 0..REJECTION_BUDGET {
        let r = sample_radii(tri, rng);
        if matches!(is_weighted_delaunay_packing(tri, eta, &r), Ok(rep) if rep.pass) {
            return Ok(r);
        }
    }
    Err(HarnessError::RejectionBudget {
        attempts: REJECTION_BUDGET,
        what: "weighted Delaunay radii",
    })
}

/// One Schwarz-Ahlfors trial on `hex_disk(rings)`: a random packing `r`,
/// and `r_bar` with boundary radii shrunk (or enlarged) by a random factor
/// and interior curvatures lowered (or raised) by random amounts.
pub fn schwarz_trial(rings: usize, regime: Regime, seed: u64) -> Outcome {
    let run = || -> Result<Outcome, HarnessError> {
        let tri = Triangulation::hex_disk(rings)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = sample_weights(&tri, regime, &mut rng)?;
        let r = random_delaunay_packing(&tri, &eta, &mut rng)?;
        let k = packing_curvature(&tri, &eta, &r)?;
        let shrink = rng.random_bool(0.5);
        let factor = rng.random_range(0.8..0.99);
        let factor = if shrink { factor } else { 1.0 / factor };
        let sign = if shrink { -1.0 } else { 1.0 };
        let target_k = tri
            .interior_vertices()
            .into_iter()
            .map(|v| (v, k[&v] + sign * rng.random_range(1e-4..0.05)))
            .collect();
        let boundary_radii = tri
            .boundary_vertices()
            .into_iter()
            .map(|v| (v, r.get(v) * factor))
            .collect();
        let cfg = SolveConfig::new(Geometry::Hyperbolic, target_k, boundary_radii);
        let r_bar = match solve_prescribed_curvature(&tri, &eta, &cfg, &r.to_labels()) {
            Ok(rep) => rep.radii,
            Err(e) => {
                return Ok(Outcome::Skipped {
                    reason: e.to_string(),
                })
            }
        };
        if !matches!(is_weighted_delaunay_packing(&tri, &eta, &r_bar), Ok(rep) if rep.pass) {
            return Ok(Outcome::Skipped {
                reason: "r_bar is not weighted Delaunay".into(),
            });
        }
        Ok(check_schwarz_lemma(&tri, &eta, &r, &r_bar))
    };
    run().unwrap_or_else(|e| Outcome::Skipped {
        reason: e.to_string(),
    })
}

pub fn schwarz_suite(regime: Regime, rings: usize, trials: usize, seed: u64) -> TrialReport {
    run_trials("schwarz", Some(regime), seed, trials, |s| {
        schwarz_trial(rings, regime, s)
    })
}

/// `f(lambda)` of the scaling lemma, computed from the closed-form ratio
/// of half-radius tangents minus `lambda`.
pub fn scaling_f_direct(x: f64, y: f64, lambda: f64) -> f64 {
    let s1 = ((1.0 - x * x) * (1.0 - y * y)).sqrt();
    let sl = ((1.0 - lambda * lambda * x * x) * (1.0 - lambda * lambda * y * y)).sqrt();
    lambda * (1.0 - x * y + s1) / (1.0 - lambda * lambda * x * y + sl) - lambda
}

/// The same `f(lambda)` in the factored form `lambda (Q1 - Q2) / D`, with
/// `Q2` rationalized. Exact zero at `lambda = 1`.
pub fn scaling_f(x: f64, y: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    let s1 = ((1.0 - x * x) * (1.0 - y * y)).sqrt();
    let sl = ((1.0 - l2 * x * x) * (1.0 - l2 * y * y)).sqrt();
    let one_minus = (1.0 - lambda) * (1.0 + lambda);
    let q1 = -one_minus * x * y;
    let q2 = one_minus * (x * x + y * y - (1.0 + l2) * x * x * y * y) / (sl + s1);
    lambda / (1.0 - l2 * x * y + sl) * (q1 - q2)
}

/// The scaling ratio `tanh(r1^l/2)/tanh(r1/2) - tanh(r0^l/2)/tanh(r0/2)`
/// measured on actual circles: `C0` centered at the origin through `z`,
/// `C1` meeting the real axis at `x < y`.
pub fn scaling_f_geometric(z: f64, x: f64, y: f64, lambda: f64) -> Result<f64, GeometryError> {
    let c0 = EuclideanCircle::new(Point::new(0.0, 0.0), z)?;
    let c1 = EuclideanCircle::new(Point::new(0.5 * (x + y), 0.0), 0.5 * (y - x))?;
    let t = |c: &EuclideanCircle| -> Result<f64, GeometryError> {
        Ok((euc_to_hyp_circle(c)?.radius / 2.0).tanh())
    };
    Ok(t(&c1.scale(lambda)?)? / t(&c1)? - t(&c0.scale(lambda)?)? / t(&c0)?)
}

/// Samples `(z, x, y, lambda)` and checks `f(lambda) < 0` and `f(1) = 0`.
pub fn check_scaling_f(trials: usize, seed: u64) -> TrialReport {
    run_trials("scaling-f", None, seed, trials, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let z = rng.random_range(0.01..0.99);
        let y = rng.random_range(0.01..0.99);
        let x = y * rng.random_range(-0.999..0.999);
        let lambda = rng.random_range(0.001..0.999);
        let f = scaling_f(x, y, lambda);
        let f1 = scaling_f_direct(x, y, 1.0);
        let geo = scaling_f_geometric(z, x, y, lambda);
        match geo {
            Ok(g) if (g - f).abs() > 1e-9 => Outcome::Violation {
                margin: -(g - f).abs(),
            },
            Ok(_) if f1.abs() >= 1e-12 || scaling_f(x, y, 1.0) != 0.0 => {
                Outcome::Violation { margin: -f1.abs() }
            }
            Ok(_) => Outcome::strict(-f),
            Err(e) => Outcome::Skipped {
                reason: e.to_string(),
            },
        }
    })
}

/// Euclidean circle at distance `sqrt(R0^2 + R1^2 + 2 eta R0 R1)` on the
/// positive real axis, at inversive distance `eta` from the circle of
/// radius `r0_euc` centered at the origin.
pub fn adjacent_circle(
    r0_euc: f64,
    r1_euc: f64,
    eta: f64,
) -> Result<EuclideanCircle, GeometryError> {
    let l = (r0_euc * r0_euc + r1_euc * r1_euc + 2.0 * eta * r0_euc * r1_euc).sqrt();
    EuclideanCircle::new(Point::new(l, 0.0), r1_euc)
}

const GRID_POINTS: usize = 24;

/// `r1` strictly increasing in `R1` along random grids with `C1` inside
/// the disk.
pub fn check_monotonicity_grids(trials: usize, seed: u64) -> TrialReport {
    run_trials("scaling-monotone", None, seed, trials, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let r0 = rng.random_range(0.05..0.8);
        let eta = rng.random_range(-0.95..3.0);
        // largest R1 keeping C1 inside: L + R1 < 1
        let fits = |r1: f64| adjacent_circle(r0, r1, eta).is_ok_and(|c| c.is_inside_disk());
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r1_max = lo * 0.999;
        let mut grid: Vec<f64> = (0..GRID_POINTS)
            .map(|_| rng.random_range(1e-3 * r1_max..r1_max))
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let mut prev = f64::NEG_INFINITY;
        let mut margin = f64::INFINITY;
        for r1 in grid {
            let c = match adjacent_circle(r0, r1, eta).and_then(|c| euc_to_hyp_circle(&c)) {
                Ok(c) => c,
                Err(e) => {
                    return Outcome::Skipped {
                        reason: e.to_string(),
                    }
                }
            };
            margin = margin.min(c.radius - prev);
            prev = c.radius;
        }
        Outcome::strict(margin)
    })
}

/// Generalized scaling lemma: `rho1^l / rho0^l < rho1 / rho0` with `C1`
/// possibly crossing the unit circle and `lambda C1` inside, and strict
/// growth of `rho1` in `R1` across the unit circle.
pub fn check_generalized_scaling(trials: usize, seed: u64) -> TrialReport {
    run_trials("scaling-generalized", None, seed, trials, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let r0 = rng.random_range(0.05..0.9);
        let eta = rng.random_range(-0.95..3.0);
        let r1 = log_uniform(&mut rng, 0.01, 3.0);
        let c0 = EuclideanCircle::new(Point::new(0.0, 0.0), r0).expect("positive radius");
        let c1 = match adjacent_circle(r0, r1, eta) {
            Ok(c) => c,
            Err(e) => {
                return Outcome::Skipped {
                    reason: e.to_string(),
                }
            }
        };
        let lam_max = (1.0 / (c1.center.norm() + c1.radius)).min(1.0);
        let lambda = rng.random_range(0.0..lam_max).max(1e-6);
        let rho = |c: &EuclideanCircle| generalized_radius(c);
        let ratio = |a: &EuclideanCircle,
                     b: &EuclideanCircle|
         -> Result<RadiusRatio, GeometryError> { rho(a)?.ratio(&rho(b)?) };
        let scaled = c0.scale(lambda).and_then(|s0| Ok((s0, c1.scale(lambda)?)));
        let (lhs, rhs) = match scaled.and_then(|(s0, s1)| Ok((ratio(&s1, &s0)?, ratio(&c1, &c0)?)))
        {
            Ok(v) => v,
            Err(GeometryError::EnclosesDisk) => {
                return Outcome::Skipped {
                    reason: "C1 encloses the disk".into(),
                }
            }
            Err(e) => {
                return Outcome::Skipped {
                    reason: e.to_string(),
                }
            }
        };
        // monotonicity in R1 of the generalized radius
        let step = r1 * 1e-3;
        let mono = match (
            adjacent_circle(r0, r1, eta).and_then(|c| rho(&c)),
            adjacent_circle(r0, r1 + step, eta).and_then(|c| rho(&c)),
        ) {
            (Ok(a), Ok(b)) => b.compare(&a) == std::cmp::Ordering::Greater,
            _ => true,
        };
        match (lhs, rhs) {
            (RadiusRatio::IndeterminateEqualExponent, _)
            | (_, RadiusRatio::IndeterminateEqualExponent) => Outcome::Disqualified {
                reason: "indeterminate ratio".into(),
            },
            _ if !mono => Outcome::Violation { margin: -step },
            (RadiusRatio::Value(a), RadiusRatio::Value(b)) => Outcome::strict(b - a),
            (l, r) if l.strictly_less(&r) => Outcome::Holds {
                margin: f64::INFINITY,
            },
            _ => Outcome::Violation {
                margin: f64::NEG_INFINITY,
            },
        }
    })
}

/// The three scaling-lemma checks, `trials` samples each.
pub fn check_scaling_lemmas(seed: u64, trials: usize) -> Vec<TrialReport> {
    vec![
        check_scaling_f(trials, seed),
        check_monotonicity_grids(trials, seed.wrapping_add(1)),
        check_generalized_scaling(trials, seed.wrapping_add(2)),
    ]
}

/// Weights used by the rigidity experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RigidityWeights {
    /// `eta = 1` on every edge.
    Tangential,
    /// Random weights in the regime satisfying the structure condition.
    Random(Regime),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub seed: u64,
    pub inits: usize,
    pub converged: usize,
    /// Largest max-norm label difference between converged solutions.
    pub max_pairwise_u_diff: f64,
    /// Boundary circles that leave the disk after scaling by `mu`.
    pub exiting_boundary: usize,
    /// Exiting boundary vertices where `rho^mu > rho_bar` fails.
    pub probe_violations: usize,
    pub delaunay: bool,
}

impl RigidityReport {
    pub fn passed(&self) -> bool {
        self.converged >= 2 && self.max_pairwise_u_diff < RIGIDITY_TOL && self.probe_violations == 0
    }
}

/// Solves `K = 0` inside `hex_disk(rings)` with fixed random boundary
/// radii from `inits` random starts, compares the solutions and runs the
/// `mu`-scaling probe on the first one.
pub fn rigidity_experiment(
    rings: usize,
    weights: RigidityWeights,
    inits: usize,
    seed: u64,
) -> Result<RigidityReport, HarnessError> {
    let tri = Triangulation::hex_disk(rings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = match weights {
        RigidityWeights::Tangential => WeightAssignment::uniform(&tri, 1.0)?,
        RigidityWeights::Random(regime) => sample_weights(&tri, regime, &mut rng)?,
    };
    let boundary: BTreeMap<VertexId, f64> = tri
        .boundary_vertices()
        .into_iter()
        .map(|v| (v, log_uniform(&mut rng, 0.8, 2.0)))
        .collect();
    let target = tri
        .interior_vertices()
        .into_iter()
        .map(|v| (v, 0.0))
        .collect();
    let cfg = SolveConfig::new(Geometry::Hyperbolic, target, boundary.clone());
    let mut solutions = Vec::new();
    for _ in 0..inits {
        let mut radii = boundary.clone();
        for v in tri.interior_vertices() {
            radii.insert(v, log_uniform(&mut rng, 0.2, 1.5));
        }
        let init = RadiusAssignment::new(&tri, Geometry::Hyperbolic, radii)?.to_labels();
        if let Ok(rep) = solve_prescribed_curvature(&tri, &eta, &cfg, &init) {
            solutions.push(rep);
        }
    }
    if solutions.len() < 2 {
        return Err(HarnessError::TooFewSolves(solutions.len()));
    }
    let mut max_diff: f64 = 0.0;
    for (i, a) in solutions.iter().enumerate() {
        for b in &solutions[i + 1..] {
            for (v, ua) in a.labels.iter() {
                max_diff = max_diff.max((ua - b.labels.get(v)).abs());
            }
        }
    }

    let r = &solutions[0].radii;
    let r_bar = &solutions[1].radii;
    let delaunay = is_weighted_delaunay_packing(&tri, &eta, r)?.pass;
    let lengths = edge_lengths(&tri, &eta, r)?;
    let layout = layout_in_disk(&tri, &lengths, 0)?.centered_at(0)?;
    let circles = euclidean_circles(&layout, r)?;
    let mut exiting = 0;
    let mut probe_violations = 0;
    for v in tri.boundary_vertices() {
        let scaled = circles[&v].scale(RIGIDITY_MU)?;
        if scaled.is_inside_disk() {
            continue;
        }
        exiting += 1;
        let rho_mu = generalized_radius(&scaled)?;
        let rho_bar = GeneralizedRadius::Finite((r_bar.get(v) / 2.0).tanh());
        if rho_mu.compare(&rho_bar) != std::cmp::Ordering::Greater {
            probe_violations += 1;
        }
    }
    Ok(RigidityReport {
        seed,
        inits,
        converged: solutions.len(),
        max_pairwise_u_diff: max_diff,
        exiting_boundary: exiting,
        probe_violations,
        delaunay,
    })
}

pub fn rigidity_suite(
    rings: usize,
    weights: RigidityWeights,
    inits: usize,
    trials: usize,
    seed: u64,
) -> TrialReport {
    let regime = match weights {
        RigidityWeights::Tangential => None,
        RigidityWeights::Random(r) => Some(r),
    };
    let results: Vec<(u64, Result<RigidityReport, String>)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            (
                s,
                rigidity_experiment(rings, weights, inits, s).map_err(|e| e.to_string()),
            )
        })
        .collect();
    let suite = match weights {
        RigidityWeights::Tangential => "rigidity-tangential",
        RigidityWeights::Random(_) => "rigidity-random",
    };
    let mut rep = TrialReport::new(suite, regime, seed);
    let (mut worst, mut exiting, mut converged) = (0.0f64, 0usize, 0usize);
    for (s, res) in results {
        let o = match res {
            Ok(r) => {
                worst = worst.max(r.max_pairwise_u_diff);
                exiting += r.exiting_boundary;
                converged += r.converged;
                if r.probe_violations > 0 {
                    Outcome::Violation {
                        margin: -(r.probe_violations as f64),
                    }
                } else {
                    let margin = RIGIDITY_TOL - r.max_pairwise_u_diff;
                    if margin > 0.0 {
                        Outcome::Holds { margin }
                    } else {
                        Outcome::Violation { margin }
                    }
                }
            }
            Err(reason) => Outcome::Skipped { reason },
        };
        rep.record(s, &o);
    }
    rep.extras.insert("max_pairwise_u_diff".into(), worst);
    rep.extras
        .insert("exiting_boundary_circles".into(), exiting as f64);
    rep.extras
        .insert("converged_solves".into(), converged as f64);
    rep
}

/// Verification suites runnable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    MaxPrinciple,
    Schwarz,
    Scaling,
    Rigidity,
    Generalized,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::MaxPrinciple,
        Suite::Schwarz,
        Suite::Scaling,
        Suite::Rigidity,
        Suite::Generalized,
    ];

    pub fn default_trials(&self) -> usize {
        match self {
            Suite::MaxPrinciple => 1000,
            Suite::Schwarz => 100,
            Suite::Scaling => 10_000,
            Suite::Rigidity => 1,
            Suite::Generalized => 100,
        }
    }

    pub fn default_rings(&self) -> usize {
        match self {
            Suite::Rigidity => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub trials: Option<usize>,
    pub seed: u64,
    pub rings: Option<usize>,
    /// Both regimes when unset.
    pub regime: Option<Regime>,
    pub inits: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: None,
            seed: 0,
            rings: None,
            regime: None,
            inits: 10,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<TrialReport> {
    let trials = opts.trials.unwrap_or(suite.default_trials());
    let rings = opts.rings.unwrap_or(suite.default_rings());
    let regimes: Vec<Regime> = opts.regime.map_or(Regime::ALL.to_vec(), |r| vec![r]);
    let seed = opts.seed;
    match suite {
        Suite::MaxPrinciple => regimes
            .iter()
            .map(|&r| max_principle_suite(r, trials, seed))
            .collect(),
        Suite::Schwarz => regimes
            .iter()
            .map(|&r| schwarz_suite(r, rings, trials, seed))
            .collect(),
        Suite::Scaling => check_scaling_lemmas(seed, trials),
        Suite::Rigidity => {
            let mut out = Vec::new();
            if opts.regime.is_none() {
                out.push(rigidity_suite(
                    rings,
                    RigidityWeights::Tangential,
                    opts.inits,
                    trials,
                    seed,
                ));
            }
            out.extend(regimes.iter().map(|&r| {
                rigidity_suite(rings, RigidityWeights::Random(r), opts.inits, trials, seed)
            }));
            out
        }
        Suite::Generalized => regimes
            .iter()
            .map(|&r| generalized_suite(r, trials, seed))
            .collect(),
    }
}

/// Plain-text table, one row per report.
pub fn summary_table(reports: &[TrialReport]) -> String {
    let mut out = format!(
        "{:<22} {:<8} {:>7} {:>7} {:>7} {:>8} {:>6} {:>8} {:>12}\n",
        "suite",
        "regime",
        "trials",
        "skipped",
        "vacuous",
        "applied",
        "viol",
        "boundary",
        "worst margin"
    );
    for r in reports {
        let regime = r.regime.map_or("-".to_string(), |g| g.to_string());
        let margin = r
            .worst_margin
            .map_or("-".to_string(), |m| format!("{m:.3e}"));
        out += &format!(
            "{:<22} {:<8} {:>7} {:>7} {:>7} {:>8} {:>6} {:>8} {:>12}\n",
            r.suite,
            regime,
            r.trials,
            r.skipped,
            r.vacuous,
            r.hypothesis_count,
            r.violation_count,
            r.boundary_count,
            margin
        );
    }
    out
}

/// Curvatures of both packings of a star instance.
pub fn star_curvatures(
    inst: &StarInstance,
) -> Result<(CurvatureVector, CurvatureVector), MetricError> {
    Ok((
        packing_curvature(&inst.tri, &inst.eta, &inst.r)?,
        packing_curvature(&inst.tri, &inst.eta, &inst.r_bar)?,
    ))
}
