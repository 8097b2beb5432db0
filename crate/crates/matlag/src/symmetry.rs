//! Verification that a weight symmetrizes an operator.
//!
//! The operator `D = t I d2 + (C - t U) d - V` acts on row polynomials;
//! write its coefficients as `F2 = t I`, `F1 = C - t U`, `F0 = -V`.  The
//! weight `W` makes `D` symmetric with respect to
//! `<P, Q> = integral P W Q* dt` exactly when three matrix identities
//! hold pointwise on `(0, infinity)` together with vanishing boundary
//! terms:
//!
//! * `E1(t) = F2* W - W F2 = t (W* - W) = 0`,
//! * `E2(t) = 2 (W F2)' - W F1 - F1* W = 2 (W + t W') - W (C - t U)
//!   - (C - t U)* W = 0`,
//! * `E3(t) = (W F2)'' - (W F1)' + W F0 - F0* W = (2 W' + t W'')
//!   - W' (C - t U) + W U - W V + V* W = 0`,
//!
//! and the boundary conditions: `t W -> 0` at the origin and rapid decay
//! of `t W` and `W F1 - F1* W` at infinity.  [`check`] evaluates the
//! residuals on a grid (each normalized by `1 + ||W(t)|| (1 + t)` so that
//! growing weights do not mask defects), probes both boundaries, and
//! cross-checks the analytically propagated derivatives `W'`, `W''`
//! against finite differences computed in double-double precision —
//! a plain `f64` five-point stencil has a roundoff floor near
//! `64 eps ||W|| / (12 h^2) ~ 4e-6` at `h = 1e-5 t`, which would drown
//! the defects this validation is meant to expose.
//!
//! The check is sharp in both directions: exact pairs sit at residuals
//! near machine precision, while perturbing any single operator entry by
//! `1e-3` lifts some residual above `1e-5` (see
//! [`perturbation_sensitivity`]).

use crate::dd::Dd;
use crate::error::Result;
use crate::num::GMat2;
use crate::operators::LagOperator;
use crate::quad::{boundary_probe, BoundaryReport};
use crate::weights::{weight_jets_raw, WeightSpec};

/// Residual tolerance for a PASS verdict.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Size of the single-entry perturbation used by
/// [`perturbation_sensitivity`].
pub const PERTURBATION: f64 = 1e-3;

/// A perturbed pair must push some residual above this floor.
pub const SENSITIVITY_FLOOR: f64 = 1e-5;

/// Grid points where [`check`] cross-validates derivatives.
pub const DERIVATIVE_POINTS: [f64; 3] = [0.01, 1.0, 10.0];

/// Ceiling for the derivative cross-validation mismatch inside [`check`].
pub const DERIVATIVE_TOL: f64 = 1e-5;

/// Evaluation grid spanning five decades around the unit scale.
pub fn default_grid() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 100.0]
}

/// Normalized residuals of the three symmetry identities at one point.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SymmetryPoint {
    pub t: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl SymmetryPoint {
    pub fn worst(&self) -> f64 {
        self.e1.max(self.e2).max(self.e3)
    }
}

/// Outcome of a full symmetry verification.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SymmetryReport {
    pub points: Vec<SymmetryPoint>,
    /// Largest normalized residual over the grid.
    pub worst: f64,
    pub boundary: BoundaryReport,
    /// `(t, mismatch)` of analytic versus double-double finite-difference
    /// derivatives at [`DERIVATIVE_POINTS`].
    pub derivative_checks: Vec<(f64, f64)>,
    pub tol: f64,
    pub pass: bool,
}

/// The three normalized residuals at a single `t`.
///
/// # Errors
///
/// Propagates weight evaluation errors (`t <= 0`, bad parameters).
pub fn residuals_at(op: &LagOperator, spec: &WeightSpec, t: f64) -> Result<SymmetryPoint> {
    let jet = spec.eval(t)?;
    let (w, w1, w2) = (jet.w, jet.w1, jet.w2);
    let f1 = op.c - op.u.scale_re(t);
    let e1 = (w.adjoint() - w).scale_re(t);
    let e2 = (w + w1.scale_re(t)).scale_re(2.0) - w * f1 - f1.adjoint() * w;
    let e3 = w1.scale_re(2.0) + w2.scale_re(t) - w1 * f1 + w * op.u - w * op.v
        + op.v.adjoint() * w;
    let scale = 1.0 + w.norm_inf() * (1.0 + t);
    Ok(SymmetryPoint {
        t,
        e1: e1.norm_inf() / scale,
        e2: e2.norm_inf() / scale,
        e3: e3.norm_inf() / scale,
    })
}

/// Verify the pair on a grid: residuals, boundary decay, and derivative
/// cross-validation.  `pass` requires every residual at or below `tol`,
/// both boundary conditions, and derivative mismatches below
/// [`DERIVATIVE_TOL`].
///
/// # Errors
///
/// Propagates weight evaluation errors.
///
/// # Examples
///
/// ```
/// use matlag::symmetry::{check, default_grid, DEFAULT_TOL};
/// use matlag::weights::WeightSpec;
/// let spec = WeightSpec::F1 { alpha: 0.0, beta: 1.0, b: 1.0 };
/// let op = spec.operator().unwrap();
/// let report = check(&op, &spec, &default_grid(), DEFAULT_TOL).unwrap();
/// assert!(report.pass);
/// ```
pub fn check(
    op: &LagOperator,
    spec: &WeightSpec,
    grid: &[f64],
    tol: f64,
) -> Result<SymmetryReport> {
    let mut points = Vec::with_capacity(grid.len());
    let mut worst = 0.0f64;
    for &t in grid {
        let p = residuals_at(op, spec, t)?;
        worst = worst.max(p.worst());
        points.push(p);
    }
    let boundary = boundary_probe(spec, op)?;
    let mut derivative_checks = Vec::with_capacity(DERIVATIVE_POINTS.len());
    for &t in &DERIVATIVE_POINTS {
        derivative_checks.push((t, cross_validate_derivatives(spec, t)?));
    }
    let derivatives_ok = derivative_checks.iter().all(|&(_, m)| m <= DERIVATIVE_TOL);
    let pass = worst <= tol
        && boundary.vanishes_at_zero
        && boundary.decays_at_infinity
        && derivatives_ok;
    Ok(SymmetryReport {
        points,
        worst,
        boundary,
        derivative_checks,
        tol,
        pass,
    })
}

/// Compare the analytic `W'`, `W''` against five-point finite differences
/// with step `h = 1e-5 t`, evaluated in double-double precision; returns
/// the larger of the two relative mismatches.
///
/// # Errors
///
/// [`crate::Error::NonPositiveT`] for `t <= 0`,
/// [`crate::Error::ParameterOutOfDomain`] for invalid parameters.
pub fn cross_validate_derivatives(spec: &WeightSpec, t: f64) -> Result<f64> {
    spec.check_valid()?;
    if t <= 0.0 {
        return Err(crate::Error::NonPositiveT(t));
    }
    let h = 1e-5 * t;
    let td = Dd::from_f64(t);
    let hd = Dd::from_f64(h);
    let value = |x: Dd| weight_jets_raw::<Dd>(spec, x).0;
    let (_, w1, w2) = weight_jets_raw::<Dd>(spec, td);
    let p2 = value(td + hd + hd);
    let p1 = value(td + hd);
    let m1 = value(td - hd);
    let m2 = value(td - hd - hd);
    // f' ~ (-f(t+2h) + 8 f(t+h) - 8 f(t-h) + f(t-2h)) / (12 h)
    let fd1 = p2
        .neg()
        .add(p1.scale_r(Dd::from_f64(8.0)))
        .sub(m1.scale_r(Dd::from_f64(8.0)))
        .add(m2)
        .scale_r((Dd::from_f64(12.0) * hd).recip());
    // f'' ~ (-f(t+2h) + 16 f(t+h) - 30 f(t) + 16 f(t-h) - f(t-2h)) / (12 h^2)
    let center = value(td);
    let fd2 = p2
        .neg()
        .add(p1.scale_r(Dd::from_f64(16.0)))
        .sub(center.scale_r(Dd::from_f64(30.0)))
        .add(m1.scale_r(Dd::from_f64(16.0)))
        .sub(m2)
        .scale_r((Dd::from_f64(12.0) * hd * hd).recip());
    let rel = |fd: GMat2<Dd>, exact: GMat2<Dd>| {
        fd.sub(exact).norm_inf() / (1.0 + exact.norm_inf())
    };
    Ok(rel(fd1, w1).max(rel(fd2, w2)))
}

/// Smallest worst-residual over single-entry operator perturbations: each
/// of the twelve entries of `C`, `U`, `V` is shifted by [`PERTURBATION`]
/// in turn and the grid residual recomputed.  A sharp verification keeps
/// this above [`SENSITIVITY_FLOOR`].
///
/// # Errors
///
/// Propagates weight evaluation errors.
pub fn perturbation_sensitivity(
    op: &LagOperator,
    spec: &WeightSpec,
    grid: &[f64],
) -> Result<f64> {
    let mut min_worst = f64::INFINITY;
    for target in 0..3 {
        for r in 0..2 {
            for c in 0..2 {
                let mut p = op.clone();
                let m = match target {
                    0 => &mut p.c,
                    1 => &mut p.u,
                    _ => &mut p.v,
                };
                m.e[r][c] += PERTURBATION;
                let mut worst = 0.0f64;
                for &t in grid {
                    worst = worst.max(residuals_at(&p, spec, t)?.worst());
                }
                min_worst = min_worst.min(worst);
            }
        }
    }
    Ok(min_worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_pairs() -> Vec<WeightSpec> {
        vec![
            WeightSpec::F1 {
                alpha: 0.0,
                beta: 1.0,
                b: 1.0,
            },
            WeightSpec::F2 { alpha: 0.5, b: 0.4 },
            WeightSpec::F3 { beta: 4.0 },
        ]
    }

    fn raw_pairs() -> Vec<WeightSpec> {
        vec![
            WeightSpec::RawVEqU {
                u: 1.0,
                c21: 1.0,
                c22: 3.0,
                gamma: 1.0,
            },
            WeightSpec::RawVEq2U {
                u: 1.0,
                c21: 1.0,
                gamma: 0.5,
            },
            WeightSpec::RawVEqHalfU { u: 1.0, c22: 1.5 },
            WeightSpec::RawScalarU {
                u: 1.0,
                c21: num_complex::Complex64::new(0.5, 0.5),
                c22: 2.0,
                gamma: 1.0,
            },
        ]
    }

    #[test]
    fn canonical_pairs_pass_with_tiny_residuals() {
        for spec in canonical_pairs() {
            let op = spec.operator().unwrap();
            let report = check(&op, &spec, &default_grid(), DEFAULT_TOL).unwrap();
            assert!(report.pass, "{spec}: {report:?}");
            assert!(report.worst < 1e-12, "{spec}: worst {:.3e}", report.worst);
        }
    }

    #[test]
    fn raw_pairs_pass() {
        for spec in raw_pairs() {
            let op = spec.operator().unwrap();
            let report = check(&op, &spec, &default_grid(), DEFAULT_TOL).unwrap();
            assert!(report.pass, "{spec}: worst {:.3e}", report.worst);
        }
    }

    #[test]
    fn diagonal_pair_passes() {
        let spec = WeightSpec::DiagLaguerre {
            alpha1: -0.5,
            alpha2: 2.0,
        };
        let op = spec.operator().unwrap();
        let report = check(&op, &spec, &default_grid(), DEFAULT_TOL).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn hermitian_weight_kills_first_identity() {
        let spec = WeightSpec::F2 { alpha: 0.5, b: 0.4 };
        let op = spec.operator().unwrap();
        for &t in &default_grid() {
            let p = residuals_at(&op, &spec, t).unwrap();
            assert!(p.e1 < 1e-14);
        }
    }

    #[test]
    fn mismatched_pair_fails_loudly() {
        let op = LagOperator::family1(0.0, 1.0, 1.0).unwrap();
        let wrong = WeightSpec::F1 {
            alpha: 0.0,
            beta: 3.0,
            b: 1.0,
        };
        let report = check(&op, &wrong, &default_grid(), DEFAULT_TOL).unwrap();
        assert!(!report.pass);
        assert!(report.worst > 1e-2, "worst {:.3e}", report.worst);
    }

    #[test]
    fn derivative_cross_validation_meets_documented_bars() {
        let f1 = WeightSpec::F1 {
            alpha: 0.0,
            beta: 1.0,
            b: 1.0,
        };
        assert!(cross_validate_derivatives(&f1, 1.0).unwrap() <= 1e-6);
        assert!(cross_validate_derivatives(&f1, 10.0).unwrap() <= 1e-6);
        let f3 = WeightSpec::F3 { beta: 4.0 };
        assert!(cross_validate_derivatives(&f3, 0.01).unwrap() <= 1e-5);
        let f2 = WeightSpec::F2 { alpha: 0.5, b: 0.4 };
        assert!(cross_validate_derivatives(&f2, 10.0).unwrap() <= 1e-6);
    }

    #[test]
    fn single_entry_perturbations_are_detected() {
        let spec = WeightSpec::F1 {
            alpha: 0.0,
            beta: 1.0,
            b: 1.0,
        };
        let op = spec.operator().unwrap();
        let min_worst = perturbation_sensitivity(&op, &spec, &default_grid()).unwrap();
        assert!(
            min_worst > SENSITIVITY_FLOOR,
            "least detectable perturbation: {min_worst:.3e}"
        );
    }

    #[test]
    fn rejects_nonpositive_point() {
        let spec = WeightSpec::F3 { beta: 4.0 };
        assert!(cross_validate_derivatives(&spec, 0.0).is_err());
        let op = spec.operator().unwrap();
        assert!(residuals_at(&op, &spec, -1.0).is_err());
    }
}
