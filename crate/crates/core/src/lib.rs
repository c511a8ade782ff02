//! Limited memory steepest descent (LMSD) and two sweep variants for
//! strongly convex quadratics: LMSDC, which inserts a constant Yuan
//! steplength phase to align the gradient with the small eigenvalues, and
//! LMSDR, which reuses each Ritz value several times per sweep.
//!
//! The crate is organised bottom-up:
//!
//! * [`problem`]: the quadratic `½ xᵀAx − bᵀx` and the geometric test spectrum;
//! * [`factorize`]: Householder QR, extended Cholesky, tridiagonal
//!   projections and the QL eigensolver that yields Ritz values;
//! * [`steplength`]: SD, BB and Yuan steplengths;
//! * [`sweeps`]: the method drivers and their run traces;
//! * [`batch`]: many independent runs at once, on rayon when the `parallel`
//!   feature is on.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod error;
pub mod factorize;
pub mod linalg;
pub mod problem;
pub mod steplength;
pub mod sweeps;

pub use error::{Error, Result};
pub use problem::{make_fletcher_problem, Iterate, QuadraticProblem};
pub use sweeps::{Method, RunTrace, SweepConfig};
