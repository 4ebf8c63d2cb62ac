//! Distances, bounds and convergence experiments for warped product metric
//! spaces `B ×_f S¹` with metric `dr² + f(r)² dθ²`.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod functionals;
pub mod geodesy;
pub mod io;
pub mod lab;
pub mod profile;
pub mod quadrature;
pub mod ret;
pub mod space;
pub mod torus3d;

pub use error::{Result, WarpError};
