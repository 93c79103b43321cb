//! Poincaré disk primitives: hyperbolic distance, disk automorphisms,
//! conversion between the Euclidean and hyperbolic descriptions of a circle,
//! inversive distances and generalized hyperbolic radii.
//!
//! Circles are stored in Euclidean form; the hyperbolic center and radius are
//! a view computed on demand.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point of the complex plane, `x + iy`.
pub type Point = Complex64;

/// Width of the collar around the unit circle inside which a circle counts
/// as tangent to it.
pub const DISK_COLLAR: f64 = 1e-12;

/// Angular threshold below which the diametral-line construction in
/// [`DiskMobius::apply_circle`] falls back to three-point recircumscription.
const POLE_LINE_EPS: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point ({0}, {1}) is not inside the unit disk")]
    OutsideDisk(f64, f64),
    #[error("circle (center ({cx}, {cy}), radius {r}) is not strictly inside the unit disk")]
    CircleNotInDisk { cx: f64, cy: f64, r: f64 },
    #[error("circle passes through the pole of the transformation")]
    ThroughPole,
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("circle encloses the closed unit disk; its generalized radius is undefined")]
    EnclosesDisk,
    #[error("ratio with a zero finite denominator")]
    ZeroDenominator,
    #[error("three points are collinear")]
    Collinear,
}

fn check_in_disk(p: Point) -> Result<(), GeometryError> {
    if p.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(GeometryError::OutsideDisk(p.re, p.im))
    }
}

/// Hyperbolic distance in the Poincaré disk,
/// `sinh(d/2) = |p - q| / sqrt((1 - |p|^2)(1 - |q|^2))`.
pub fn hyp_distance(p: Point, q: Point) -> Result<f64, GeometryError> {
    Ok(2.0 * half_distance_sinh(p, q)?.asinh())
}

/// `sinh(d(p, q) / 2)`.
fn half_distance_sinh(p: Point, q: Point) -> Result<f64, GeometryError> {
    check_in_disk(p)?;
    check_in_disk(q)?;
    Ok((p - q).norm() / ((1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr())).sqrt())
}

/// Euclidean distance from the origin of the point at hyperbolic distance `d`.
pub fn radial_position(d: f64) -> f64 {
    (d / 2.0).tanh()
}

/// Disk automorphism `z -> e^{i theta} (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskMobius {
    pub a: Point,
    pub theta: f64,
}

impl DiskMobius {
    pub fn new(a: Point, theta: f64) -> Result<Self, GeometryError> {
        check_in_disk(a)?;
        Ok(DiskMobius { a, theta })
    }

    /// The automorphism sending `a` to the origin (no rotation).
    pub fn to_origin(a: Point) -> Result<Self, GeometryError> {
        Self::new(a, 0.0)
    }

    pub fn identity() -> Self {
        DiskMobius {
            a: Point::new(0.0, 0.0),
            theta: 0.0,
        }
    }

    pub fn apply(&self, z: Point) -> Point {
        Point::from_polar(1.0, self.theta) * (z - self.a) / (1.0 - self.a.conj() * z)
    }

    /// Inverse map: `w -> (e^{-i theta} w + a) / (1 + conj(a) e^{-i theta} w)`.
    pub fn apply_inverse(&self, w: Point) -> Point {
        let v = Point::from_polar(1.0, -self.theta) * w;
        (v + self.a) / (1.0 + self.a.conj() * v)
    }

    /// `1 / conj(a)`, the point sent to infinity; `None` when `a = 0`.
    pub fn pole(&self) -> Option<Point> {
        if self.a.norm() == 0.0 {
            None
        } else {
            Some(1.0 / self.a.conj())
        }
    }

    /// Image of a circle. The line through the circle's center and the pole
    /// is orthogonal to the circle and is mapped to a line, so the images of
    /// its two intersection points with the circle are diametrically
    /// opposite on the image circle.
    pub fn apply_circle(&self, c: &EuclideanCircle) -> Result<EuclideanCircle, GeometryError> {
        let dir = match self.pole() {
            None => Point::new(1.0, 0.0),
            Some(pole) => {
                let to_pole = pole - c.center;
                let dist = to_pole.norm();
                if (dist - c.radius).abs() <= 1e-12 * dist.max(1.0) {
                    return Err(GeometryError::ThroughPole);
                }
                if dist <= POLE_LINE_EPS * c.radius {
                    return self.apply_circle_three_point(c);
                }
                to_pole / dist
            }
        };
        let p = self.apply(c.center + dir * c.radius);
        let q = self.apply(c.center - dir * c.radius);
        let radius = 0.5 * (p - q).norm();
        EuclideanCircle::new((p + q) * 0.5, radius)
    }

    /// Image circle through the images of three points of `c`.
    pub fn apply_circle_three_point(
        &self,
        c: &EuclideanCircle,
    ) -> Result<EuclideanCircle, GeometryError> {
        let pts: Vec<Point> = [0.3, 2.4, 4.4]
            .iter()
            .map(|&t| self.apply(c.center + Point::from_polar(c.radius, t)))
            .collect();
        circumcircle(pts[0], pts[1], pts[2])
    }
}

/// Circle through three points.
pub fn circumcircle(a: Point, b: Point, c: Point) -> Result<EuclideanCircle, GeometryError> {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    if d.abs() <= f64::EPSILON * b.norm_sqr().max(c.norm_sqr()) {
        return Err(GeometryError::Collinear);
    }
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    let ux = (c.im * b2 - b.im * c2) / d;
    let uy = (b.re * c2 - c.re * b2) / d;
    let u = Point::new(ux, uy);
    EuclideanCircle::new(a + u, u.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanCircle {
    pub center: Point,
    pub radius: f64,
}

impl EuclideanCircle {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(EuclideanCircle { center, radius })
        } else {
            Err(GeometryError::NonPositiveRadius(radius))
        }
    }

    /// `|center| + R < 1 - DISK_COLLAR`.
    pub fn is_inside_disk(&self) -> bool {
        self.center.norm() + self.radius < 1.0 - DISK_COLLAR
    }

    /// True when the closed disk bounded by the circle meets the open unit disk.
    pub fn meets_disk(&self) -> bool {
        self.center.norm() - self.radius < 1.0
    }

    /// Image under `z -> lambda z`.
    pub fn scale(&self, lambda: f64) -> Result<Self, GeometryError> {
        if !(lambda > 0.0) {
            return Err(GeometryError::NonPositiveScale(lambda));
        }
        EuclideanCircle::new(self.center * lambda, self.radius * lambda)
    }

    /// The two points where the line through the origin and the center meets
    /// the circle, as signed coordinates `x < y` along the unit direction of
    /// the center (the positive real axis when the center is the origin).
    pub fn axis_points(&self) -> (f64, f64, Point) {
        let m = self.center.norm();
        let dir = if m > 0.0 {
            self.center / m
        } else {
            Point::new(1.0, 0.0)
        };
        (m - self.radius, m + self.radius, dir)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicCircle {
    pub center: Point,
    pub radius: f64,
}

impl HyperbolicCircle {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeometryError> {
        check_in_disk(center)?;
        if radius > 0.0 && radius.is_finite() {
            Ok(HyperbolicCircle { center, radius })
        } else {
            Err(GeometryError::NonPositiveRadius(radius))
        }
    }
}

/// Euclidean description of a hyperbolic circle. With the center at
/// hyperbolic distance `d` from the origin, the circle meets the ray through
/// the center at `tanh((d - r)/2)` and `tanh((d + r)/2)`.
pub fn hyp_to_euc_circle(c: &HyperbolicCircle) -> Result<EuclideanCircle, GeometryError> {
    check_in_disk(c.center)?;
    let m = c.center.norm();
    let dir = if m > 0.0 {
        c.center / m
    } else {
        Point::new(1.0, 0.0)
    };
    let d = 2.0 * m.atanh();
    let x = ((d - c.radius) / 2.0).tanh();
    let y = ((d + c.radius) / 2.0).tanh();
    EuclideanCircle::new(dir * (0.5 * (x + y)), 0.5 * (y - x))
}

/// `tanh(r/2)` for the hyperbolic circle meeting a diameter at `x < y`:
/// `(y - x) / (1 - xy + sqrt((1 - x^2)(1 - y^2)))`.
pub fn axis_tanh_half_radius(x: f64, y: f64) -> f64 {
    (y - x) / (1.0 - x * y + ((1.0 - x * x) * (1.0 - y * y)).sqrt())
}

/// Hyperbolic description of a Euclidean circle strictly inside the disk.
pub fn euc_to_hyp_circle(c: &EuclideanCircle) -> Result<HyperbolicCircle, GeometryError> {
    if !c.is_inside_disk() {
        return Err(GeometryError::CircleNotInDisk {
            cx: c.center.re,
            cy: c.center.im,
            r: c.radius,
        });
    }
    let (x, y, dir) = c.axis_points();
    let radius = 2.0 * axis_tanh_half_radius(x, y).atanh();
    // midpoint of the hyperbolic segment [x, y] on the diameter
    let mid = 0.5 * (x.atanh() + y.atanh());
    HyperbolicCircle::new(dir * mid.tanh(), radius)
}

/// `eta = (L^2 - R1^2 - R2^2) / (2 R1 R2)` with `L` the distance of centers.
pub fn inversive_distance_euc(c1: &EuclideanCircle, c2: &EuclideanCircle) -> f64 {
    let l2 = (c1.center - c2.center).norm_sqr();
    (l2 - c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * c1.radius * c2.radius)
}

/// `eta = (cosh l - cosh r1 cosh r2) / (sinh r1 sinh r2)` with `l` the
/// hyperbolic distance of the centers. The numerator is assembled from
/// `cosh x - 1 = 2 sinh^2(x/2)` terms to avoid cancellation for small circles.
pub fn inversive_distance_hyp(
    c1: &HyperbolicCircle,
    c2: &HyperbolicCircle,
) -> Result<f64, GeometryError> {
    let s = half_distance_sinh(c1.center, c2.center)?;
    let cosh_l_m1 = 2.0 * s * s;
    let a = 2.0 * (c1.radius / 2.0).sinh().powi(2);
    let b = 2.0 * (c2.radius / 2.0).sinh().powi(2);
    let cosh_prod_m1 = a * b + a + b;
    Ok((cosh_l_m1 - cosh_prod_m1) / (c1.radius.sinh() * c2.radius.sinh()))
}

/// Generalized hyperbolic radius: `tanh(r/2)` for circles inside the disk,
/// the symbol `inf^(eta_v + 1)` otherwise, with `eta_v` the inversive distance
/// to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum GeneralizedRadius {
    Finite(f64),
    Infinite(f64),
}

impl GeneralizedRadius {
    pub fn is_finite(&self) -> bool {
        matches!(self, GeneralizedRadius::Finite(_))
    }

    /// Total order: finite values by magnitude, every finite value below
    /// every infinite one, infinite values by exponent.
    pub fn compare(&self, other: &Self) -> Ordering {
        use GeneralizedRadius::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.total_cmp(b),
            (Finite(_), Infinite(_)) => Ordering::Less,
            (Infinite(_), Finite(_)) => Ordering::Greater,
            (Infinite(a), Infinite(b)) => a.total_cmp(b),
        }
    }

    /// `self / den` under the symbolic conventions `a / inf^alpha = 0`.
    pub fn ratio(&self, den: &Self) -> Result<RadiusRatio, GeometryError> {
        use GeneralizedRadius::*;
        Ok(match (self, den) {
            (_, Finite(d)) if *d == 0.0 => return Err(GeometryError::ZeroDenominator),
            (Finite(a), Finite(b)) => RadiusRatio::Value(a / b),
            (Finite(_), Infinite(_)) => RadiusRatio::Value(0.0),
            (Infinite(_), Finite(_)) => RadiusRatio::PosInfinity,
            (Infinite(a), Infinite(b)) => match a.total_cmp(b) {
                Ordering::Greater => RadiusRatio::PosInfinity,
                Ordering::Less => RadiusRatio::Value(0.0),
                Ordering::Equal => RadiusRatio::IndeterminateEqualExponent,
            },
        })
    }
}

/// Result of dividing generalized radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadiusRatio {
    Value(f64),
    PosInfinity,
    /// `inf^alpha / inf^alpha`: ordered by convention, but not a number.
    IndeterminateEqualExponent,
}

impl RadiusRatio {
    /// Strict `<`. Comparisons involving the indeterminate marker are false.
    pub fn strictly_less(&self, other: &Self) -> bool {
        use RadiusRatio::*;
        match (self, other) {
            (Value(a), Value(b)) => a < b,
            (Value(_), PosInfinity) => true,
            _ => false,
        }
    }

    /// Natural logarithm, `-inf` for a zero ratio; `None` for the
    /// indeterminate marker.
    pub fn ln(&self) -> Option<f64> {
        match self {
            RadiusRatio::Value(v) => Some(v.ln()),
            RadiusRatio::PosInfinity => Some(f64::INFINITY),
            RadiusRatio::IndeterminateEqualExponent => None,
        }
    }
}

/// Generalized radius of a Euclidean circle. Circles inside the collar
/// around the unit circle are reported as `Infinite(0)`.
pub fn generalized_radius(c: &EuclideanCircle) -> Result<GeneralizedRadius, GeometryError> {
    if c.is_inside_disk() {
        let (x, y, _) = c.axis_points();
        return Ok(GeneralizedRadius::Finite(axis_tanh_half_radius(x, y)));
    }
    let l = c.center.norm();
    if c.radius > l + 1.0 + DISK_COLLAR {
        return Err(GeometryError::EnclosesDisk);
    }
    if (l + c.radius - 1.0).abs() <= DISK_COLLAR {
        return Ok(GeneralizedRadius::Infinite(0.0));
    }
    let eta_v = (l * l - c.radius * c.radius - 1.0) / (2.0 * c.radius);
    Ok(GeneralizedRadius::Infinite((eta_v + 1.0).max(0.0)))
}

/// Image of a circle under `z -> lambda z`.
pub fn scale_circle(lambda: f64, c: &EuclideanCircle) -> Result<EuclideanCircle, GeometryError> {
    c.scale(lambda)
}
