//! Double-exponential quadrature on `(0, infinity)`.
//!
//! The exp-sinh substitution `t = exp(pi sinh(x))` maps the half line to
//! the real axis and turns both the algebraic singularity `t^alpha`
//! (`alpha > -1`) at the origin and the exponential decay at infinity into
//! double-exponentially decaying tails, so the trapezoid rule converges
//! geometrically in the number of correct digits per level.  The engine
//! runs the rule at step sizes `h = 2^-L` for increasing `L`, marching
//! each level outward from `x = 0` until four consecutive terms fall below
//! the truncation threshold, and accepts once two consecutive levels agree
//! to the requested target.
//!
//! Integrands are matrix-valued and generic over the working precision:
//! `f64` for user-facing integrals and double-double for the moment
//! pipeline, whose Hankel-type conditioning consumes roughly half of the
//! working digits by degree twelve.

use crate::cmat::CMat2;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::num::{GMat2, Real};
use crate::operators::{LagOperator, MatPoly};
use crate::weights::{weight_jets_raw, WeightSpec};

/// Default relative accuracy target for user-facing integrals.
pub const DEFAULT_TARGET: f64 = 1e-12;

/// Relative accuracy target for internal double-double moments.
pub(crate) const DD_TARGET: f64 = 1e-26;

/// Default cap on integrand evaluations for one integral.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Hard cap on the transformed abscissa `|x|`; tails die from the
/// truncation test long before this for every admissible weight.
const X_CAP: f64 = 8.0;

/// `|ln t|` beyond which nodes are treated as dead: entries there underflow
/// or are annihilated by the `t^{alpha + 1}` factor of the transformed
/// integrand.
const LN_T_CAP: f64 = 600.0;

/// Consecutive below-threshold terms required to stop a tail march.
const DEAD_RUN: usize = 4;

/// A computed integral with its accuracy diagnostics.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct QuadResult {
    pub value: CMat2,
    /// Difference between the two finest levels, an upper bound proxy for
    /// the remaining truncation error.
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Decay diagnostics of a weight-operator pair at both ends of
/// `(0, infinity)`.
///
/// Symmetry of the operator needs the boundary terms of its integration by
/// parts to vanish: `W F_2 = t W` at both ends, and the skew part
/// `W F_1 - F_1* W` with `F_1 = C - t U` must stay bounded into the
/// endpoints.  The probe samples both at `t in {1e-8, 1e-6, 1e-4}` and
/// `{50, 100, 200}` and fits decay exponents.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BoundaryReport {
    pub t_small: [f64; 3],
    pub t_large: [f64; 3],
    /// `||t W(t)||` at the small and large stations.
    pub wf2_small: [f64; 3],
    pub wf2_large: [f64; 3],
    /// `||W F_1 - F_1* W||` at the small and large stations.
    pub skew_small: [f64; 3],
    pub skew_large: [f64; 3],
    /// Log-log slope of `||t W||` fitted between `t = 1e-8` and `1e-4`.
    pub small_exponent: f64,
    /// Fitted rate `r` in `||t W|| ~ e^{-r t}` between `t = 100` and `200`.
    pub large_decay_rate: f64,
    /// `small_exponent > 0`: the boundary term vanishes at the origin.
    pub vanishes_at_zero: bool,
    /// Positive exponential decay rate at infinity.
    pub decays_at_infinity: bool,
}

/// Trapezoid sum at step `h`, or `None` when the budget runs out.
/// `trunc` is the truncation threshold relative to the largest term seen.
fn de_level<R: Real, F: Fn(R) -> GMat2<R>>(
    f: &F,
    h: f64,
    trunc: f64,
    budget: usize,
    evaluations: &mut usize,
) -> Option<GMat2<R>> {
    let pi = R::from_f64(std::f64::consts::PI);
    let mut sum = GMat2::<R>::zero();
    let mut max_term = 0.0f64;
    for dir in [1.0f64, -1.0] {
        let mut j: u64 = if dir > 0.0 { 0 } else { 1 };
        let mut dead = 0usize;
        loop {
            let x = dir * j as f64 * h;
            if x.abs() > X_CAP {
                break;
            }
            // Plan in f64: skip nodes whose t under/overflows.
            let ln_t = std::f64::consts::PI * x.sinh();
            if ln_t.abs() > LN_T_CAP {
                break;
            }
            if *evaluations >= budget {
                return None;
            }
            *evaluations += 1;
            let xr = R::from_f64(x);
            let t = (pi * xr.sinh()).exp();
            // dt/dx = pi cosh(x) t.
            let wgt = t * pi * xr.cosh() * R::from_f64(h);
            let term = f(t).scale_r(wgt);
            let nrm = term.norm_inf();
            sum = sum.add(term);
            max_term = max_term.max(nrm);
            if nrm <= trunc * max_term {
                dead += 1;
                if dead >= DEAD_RUN {
                    break;
                }
            } else {
                dead = 0;
            }
            j += 1;
        }
    }
    Some(sum)
}

/// Integrate a matrix-valued function over `(0, infinity)`, refining until
/// two levels agree to `target` relative accuracy.
///
/// Returns `(value, error_estimate, evaluations)`.
pub(crate) fn de_integrate<R: Real, F: Fn(R) -> GMat2<R>>(
    f: F,
    target: f64,
    budget: usize,
) -> Result<(GMat2<R>, f64, usize)> {
    // Double-double needs one extra initial and final refinement level to
    // reach its ~31-digit targets.
    let (level_lo, level_hi) = if R::epsilon() < 1e-20 { (5, 9) } else { (4, 8) };
    let trunc = R::epsilon() * 1e-3;
    let mut evaluations = 0usize;
    let mut prev: Option<GMat2<R>> = None;
    let mut best: Option<(GMat2<R>, f64)> = None;
    for level in level_lo..=level_hi {
        let h = 0.5f64.powi(level);
        let Some(val) = de_level(&f, h, trunc, budget, &mut evaluations) else {
            break; // budget exhausted
        };
        if let Some(p) = prev {
            let err = p.sub(val).norm_inf();
            if best.as_ref().is_none_or(|(_, e)| err < *e) {
                best = Some((val, err));
            }
            if err <= target * (1.0 + val.norm_inf()) {
                return Ok((val, err, evaluations));
            }
        }
        prev = Some(val);
    }
    let (value, error_estimate) = match (best, prev) {
        (Some((v, e)), _) => (v, e),
        (None, Some(v)) => (v, f64::INFINITY),
        (None, None) => (GMat2::zero(), f64::INFINITY),
    };
    Err(Error::NonConvergence {
        value: Box::new(CMat2::from_gmat(value).e),
        error_estimate,
        target,
        evaluations,
    })
}

/// Moment `integral t^k W(t) dt` by quadrature at `f64` working precision.
///
/// # Errors
///
/// [`Error::ParameterOutOfDomain`] for inadmissible weights,
/// [`Error::NonConvergence`] if the target cannot be met within budget.
pub fn weight_moment(
    spec: &WeightSpec,
    k: usize,
    target: f64,
    budget: usize,
) -> Result<QuadResult> {
    let bad = spec.validate();
    if !bad.is_empty() {
        return Err(Error::ParameterOutOfDomain(format!(
            "{spec}: {}",
            bad.join("; ")
        )));
    }
    let f = |t: f64| {
        let (w, _, _) = weight_jets_raw::<f64>(spec, t);
        w.scale_r(t.powi(k as i32))
    };
    let (v, err, evals) = de_integrate(f, target, budget)?;
    Ok(QuadResult {
        value: CMat2::from_gmat(v),
        abs_error_estimate: err,
        evaluations: evals,
    })
}

/// The default evaluation budget, overridable through the
/// `MATLAG_QUAD_BUDGET` environment variable (a positive integer;
/// malformed values fall back to [`DEFAULT_BUDGET`]).
pub fn default_budget() -> usize {
    std::env::var("MATLAG_QUAD_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_BUDGET)
}

/// Double-double moment by quadrature, for the hyperbolic families.
pub(crate) fn weight_moment_dd(spec: &WeightSpec, k: usize) -> Result<GMat2<Dd>> {
    let kf = Dd::from_f64(k as f64);
    let f = |t: Dd| {
        let (w, _, _) = weight_jets_raw::<Dd>(spec, t);
        // t^k via exp(k ln t), stable for any k at double-double precision.
        w.scale_r((kf * t.ln()).exp())
    };
    let (v, _, _) = de_integrate(f, DD_TARGET, 2 * default_budget())?;
    Ok(v)
}

/// Weighted inner product `integral P(t)* W(t) Q(t) dt` at `f64` working
/// precision.
///
/// # Errors
///
/// [`Error::ParameterOutOfDomain`], [`Error::NonConvergence`] as for
/// [`weight_moment`].
///
/// # Examples
///
/// ```
/// use matlag::operators::MatPoly;
/// use matlag::quad::{inner_product, DEFAULT_BUDGET, DEFAULT_TARGET};
/// use matlag::weights::WeightSpec;
/// use matlag::CMat2;
/// let spec = WeightSpec::F1 { alpha: 0.0, beta: 1.0, b: 1.0 };
/// let one = MatPoly::new(vec![CMat2::identity()]);
/// let m0 = inner_product(&one, &one, &spec, DEFAULT_TARGET, DEFAULT_BUDGET).unwrap();
/// assert!((m0.value - CMat2::from_real([[3.0, 1.0], [1.0, 1.0]])).norm_inf() < 1e-10);
/// ```
pub fn inner_product(
    p: &MatPoly,
    q: &MatPoly,
    spec: &WeightSpec,
    target: f64,
    budget: usize,
) -> Result<QuadResult> {
    let bad = spec.validate();
    if !bad.is_empty() {
        return Err(Error::ParameterOutOfDomain(format!(
            "{spec}: {}",
            bad.join("; ")
        )));
    }
    let f = |t: f64| {
        let (w, _, _) = weight_jets_raw::<f64>(spec, t);
        let pv = p.eval(t).to_gmat::<f64>();
        let qv = q.eval(t).to_gmat::<f64>();
        pv.adjoint().mul(w).mul(qv)
    };
    let (v, err, evals) = de_integrate(f, target, budget)?;
    Ok(QuadResult {
        value: CMat2::from_gmat(v),
        abs_error_estimate: err,
        evaluations: evals,
    })
}

/// Probe the decay of a weight-operator pair at both ends of the half line.
///
/// # Errors
///
/// Propagates evaluation errors for inadmissible parameters.
pub fn boundary_probe(spec: &WeightSpec, op: &LagOperator) -> Result<BoundaryReport> {
    let t_small = [1e-8, 1e-6, 1e-4];
    let t_large = [50.0, 100.0, 200.0];
    // Floor for logarithms: norms this small have underflowed.
    let floor = 1e-300;
    let probe = |t: f64| -> Result<(f64, f64)> {
        let w = spec.eval(t)?.w;
        let f1 = op.c - op.u.scale_re(t);
        let skew = w * f1 - f1.adjoint() * w;
        Ok(((w.norm_inf() * t).max(floor), skew.norm_inf()))
    };
    let mut wf2_small = [0.0; 3];
    let mut skew_small = [0.0; 3];
    let mut wf2_large = [0.0; 3];
    let mut skew_large = [0.0; 3];
    for i in 0..3 {
        (wf2_small[i], skew_small[i]) = probe(t_small[i])?;
        (wf2_large[i], skew_large[i]) = probe(t_large[i])?;
    }
    let small_exponent =
        (wf2_small[2].ln() - wf2_small[0].ln()) / (t_small[2].ln() - t_small[0].ln());
    let large_decay_rate =
        (wf2_large[1].ln() - wf2_large[2].ln()) / (t_large[2] - t_large[1]);
    Ok(BoundaryReport {
        t_small,
        t_large,
        wf2_small,
        wf2_large,
        skew_small,
        skew_large,
        small_exponent,
        large_decay_rate,
        vanishes_at_zero: small_exponent > 0.0,
        decays_at_infinity: large_decay_rate > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Cx;

    #[test]
    fn scalar_gamma_integral_matches_gamma_function() {
        // integral t^{2.5} e^{-t} dt = Gamma(3.5).
        let f = |t: f64| {
            let mut m = GMat2::<f64>::zero();
            m.e[0][0] = Cx::real(t.powf(2.5) * (-t).exp());
            m.e[1][1] = Cx::real((-t).exp());
            m
        };
        let (v, _, evals) = de_integrate(f, 1e-12, DEFAULT_BUDGET).unwrap();
        let want = statrs::function::gamma::gamma(3.5);
        assert!((v.e[0][0].re - want).abs() < 1e-10 * want);
        assert!((v.e[1][1].re - 1.0).abs() < 1e-10);
        assert!(evals < 10_000, "used {evals} evaluations");
    }

    #[test]
    fn singular_endpoint_integral_converges() {
        // integral t^{-1/2} e^{-t} dt = Gamma(1/2) = sqrt(pi).
        let f = |t: f64| {
            let mut m = GMat2::<f64>::zero();
            m.e[0][0] = Cx::real(t.powf(-0.5) * (-t).exp());
            m
        };
        let (v, _, _) = de_integrate(f, 1e-12, DEFAULT_BUDGET).unwrap();
        let want = std::f64::consts::PI.sqrt();
        assert!((v.e[0][0].re - want).abs() < 1e-11 * want);
    }

    #[test]
    fn quadrature_moments_match_gamma_fast_path() {
        let specs = [
            WeightSpec::F1 {
                alpha: -0.5,
                beta: 2.0,
                b: 0.7,
            },
            WeightSpec::F2 {
                alpha: 1.0,
                b: 0.3,
            },
            WeightSpec::RawScalarU {
                u: 2.0,
                c21: num_complex::Complex64::new(0.4, 0.3),
                c22: 1.5,
                gamma: 1.0,
            },
        ];
        for spec in specs {
            for k in [0usize, 3] {
                let exact = spec.moment(k).unwrap();
                let quad = weight_moment(&spec, k, 1e-13, DEFAULT_BUDGET).unwrap();
                let rel = (quad.value - exact).norm_inf() / (1.0 + exact.norm_inf());
                assert!(rel < 1e-10, "{spec} k = {k}: rel = {rel:.3e}");
            }
        }
    }

    #[test]
    fn hyperbolic_family_zeroth_moment_closed_form() {
        // For F3, m0 = 2 sqrt(pi) e^{beta/4} [[1 + 2/beta, 1], [1, 1]].
        for beta in [0.5, 4.0] {
            let spec = WeightSpec::F3 { beta };
            let m0 = spec.moment(0).unwrap();
            let s = 2.0 * std::f64::consts::PI.sqrt() * (beta / 4.0).exp();
            let want =
                CMat2::from_real([[1.0 + 2.0 / beta, 1.0], [1.0, 1.0]]).scale_re(s);
            let rel = (m0 - want).norm_inf() / want.norm_inf();
            assert!(rel < 1e-12, "beta = {beta}: rel = {rel:.3e}");
        }
    }

    #[test]
    fn inner_product_is_sesquilinear() {
        let spec = WeightSpec::F1 {
            alpha: 0.0,
            beta: 1.0,
            b: 1.0,
        };
        let a = CMat2::new([
            [num_complex::Complex64::new(1.0, 2.0), num_complex::Complex64::ZERO],
            [num_complex::Complex64::new(0.0, -1.0), num_complex::Complex64::new(3.0, 0.0)],
        ]);
        let p = MatPoly::new(vec![CMat2::identity(), CMat2::identity()]);
        let q = MatPoly::new(vec![a, CMat2::zero()]);
        // <P, A + t 0> with A constant: <P, A> = <P, I> A.
        let lhs = inner_product(&p, &q, &spec, 1e-12, DEFAULT_BUDGET)
            .unwrap()
            .value;
        let base = inner_product(
            &p,
            &MatPoly::new(vec![CMat2::identity()]),
            &spec,
            1e-12,
            DEFAULT_BUDGET,
        )
        .unwrap()
        .value;
        assert!((lhs - base * a).norm_inf() < 1e-9);
        // Conjugate symmetry: <P, Q> = <Q, P>*.
        let qp = inner_product(&q, &p, &spec, 1e-12, DEFAULT_BUDGET)
            .unwrap()
            .value;
        assert!((lhs - qp.adjoint()).norm_inf() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let f = |t: f64| {
            let mut m = GMat2::<f64>::zero();
            m.e[0][0] = Cx::real(t.powf(-0.5) * (-t).exp());
            m
        };
        match de_integrate(f, 1e-12, 40) {
            Err(Error::NonConvergence {
                evaluations, target, ..
            }) => {
                assert!(evaluations <= 40);
                assert_eq!(target, 1e-12);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn boundary_probe_classifies_families() {
        let spec = WeightSpec::F1 {
            alpha: -0.5,
            beta: 2.0,
            b: 1.0,
        };
        let report = boundary_probe(&spec, &spec.operator().unwrap()).unwrap();
        // ||t W|| ~ t^{1 + alpha} with alpha = -0.5 near the origin.
        assert!((report.small_exponent - 0.5).abs() < 1e-3);
        assert!(report.vanishes_at_zero);
        // e^{-t} decay dominates every entry.
        assert!(report.decays_at_infinity);
        assert!((report.large_decay_rate - 1.0).abs() < 0.1);

        let f3 = WeightSpec::F3 { beta: 4.0 };
        let rf3 = boundary_probe(&f3, &f3.operator().unwrap()).unwrap();
        assert!(rf3.vanishes_at_zero);
        assert!(rf3.decays_at_infinity);
        // ||t W|| at t = 200 is dominated by e^{-t + sqrt(beta t)}.
        assert!(rf3.wf2_large[2] <= 1e-60);

        let f1 = WeightSpec::F1 {
            alpha: 0.0,
            beta: 1.0,
            b: 1.0,
        };
        let r1 = boundary_probe(&f1, &f1.operator().unwrap()).unwrap();
        assert!(r1.wf2_small[0] <= 1e-7);
        assert!(r1.wf2_large[2] <= 1e-70);
    }
}
