//! Inversive distance circle packings in the Euclidean plane and the
//! Poincaré disk.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod hypgeom;
pub mod io;
pub mod mesh;
pub mod metrics;
pub mod solver;
pub mod svg;
