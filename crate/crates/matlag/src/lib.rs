//! Matrix orthogonal polynomials for Laguerre-type 2x2 matrix differential
//! operators.
//!
//! This crate builds, verifies, and classifies second-order operators
//!
//! ```text
//! D = t I d^2/dt^2 + (C - t U) d/dt - V
//! ```
//!
//! acting on the right on row vectors of polynomials, together with 2x2
//! matrix weights `W` on `(0, infinity)` that make `D` symmetric with
//! respect to the matrix inner product `<P, Q> = integral P(t)* W(t) Q(t) dt`.
//!
//! The main capabilities, one module each:
//!
//! - [`operators`]: the operator model, three canonical one- and
//!   two-parameter families, four raw constructor families, conjugation
//!   and time-rescaling gauges, and the action `D P`.
//! - [`weights`]: the matching matrix weights, their first two derivatives
//!   in closed form, domain validation, and moment matrices (Gamma-function
//!   fast path where the entries are polynomial, double-double quadrature
//!   otherwise).
//! - [`quad`]: tanh-sinh style quadrature on `(0, infinity)` after the
//!   substitution `t = s^2`, inner products, and boundary-decay probes.
//! - [`mops`]: monic matrix orthogonal polynomials by two independent
//!   routes (moment Gram-Schmidt and the differential-equation coefficient
//!   recursion), the three-term recurrence, and Favard-type checks.
//! - [`symmetry`]: residual verification of the three symmetry equations
//!   relating `(D, W)`, with exact derivative jets cross-checked against
//!   finite differences.
//! - [`classify`]: the decision procedure mapping an operator to one of
//!   the canonical families (or a typed refusal), with an explicit
//!   conjugation witness.
//! - [`reduce`]: commutant probes for irreducibility of a weight and of a
//!   polynomial sequence.
//! - [`selftest`]: the end-to-end acceptance battery used by the CLI and
//!   the integration tests.
//!
//! Everything numerical that is ill-conditioned (moment tables, Gram-
//! Schmidt, coefficient recursions) runs in double-double precision
//! internally and rounds to `f64` at the public boundary; documented
//! tolerances refer to the rounded results.
//!
//! # Examples
//!
//! Build a canonical family, its weight, and its polynomials:
//!
//! ```
//! use matlag::operators::LagOperator;
//! use matlag::weights::WeightSpec;
//! use matlag::mops::build_by_moments;
//!
//! let spec = WeightSpec::F1 { alpha: 0.0, beta: 1.0, b: 1.0 };
//! let op = spec.operator().unwrap();
//! let seq = build_by_moments(&spec, 6).unwrap();
//! // D P_n = P_n Delta_n with Delta_n lower triangular:
//! let delta1 = op.eigenvalue(1).unwrap();
//! assert!((delta1.lambda.re - (-2.0)).abs() < 1e-12);
//! assert!(seq.grams[3].is_positive_definite(1e-10));
//! ```

pub mod classify;
pub mod cmat;
mod dd;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mops;
pub mod symmetry;
mod num;
pub mod operators;
pub mod quad;
pub mod reduce;
pub mod selftest;
pub mod weights;

pub use cmat::CMat2;
pub use error::{Error, Result};
