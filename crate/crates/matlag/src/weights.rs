//! Matrix weights on `(0, infinity)` paired with Laguerre-type operators.
//!
//! Each [`WeightSpec`] names a family of Hermitian positive-definite 2x2
//! weights `W(t)` together with the operator that is symmetric with
//! respect to `<P, Q> = integral P(t)* W(t) Q(t) dt`.  Three canonical
//! families:
//!
//! - `F1(alpha, beta, b)`:
//!   `W = e^{-t} t^alpha [[t^beta + b^2 t^2, b t], [b t, 1]]`,
//!   `alpha > -1`, `beta > -1 - alpha`, `b != 0`;
//! - `F2(alpha, b)`:
//!   `W = e^{-t} t^alpha [[t^4 + 4 b^2 (alpha+2) t^2 (alpha+2-t),
//!   b t (2(alpha+2) - t)], [.., 1]]`, `alpha > -1`, `0 < |b| < 1`;
//! - `F3(beta)`:
//!   `W = e^{-t} t^{-1/2} [[8 t cosh(sqrt(beta t))/beta,
//!   4 t sinh(sqrt(beta t))/sqrt(beta t)], [.., 2 cosh(sqrt(beta t))]]`,
//!   `beta > 0`;
//!
//! four raw families mirroring the operator constructors (`raw-v-eq-u`,
//! `raw-v-eq-2u`, `raw-v-eq-half-u`, `raw-scalar-u`), and a diagonal
//! classical-Laguerre pair used by reducibility probes.
//!
//! Evaluation returns the weight together with its first two derivatives,
//! propagated through second-order jets rather than finite differences, so
//! symmetry residuals are limited only by roundoff.  Moments
//! `M_k = integral t^k W(t) dt` use a Gamma-function fast path whenever
//! the entries are finite sums `c t^p e^{-u t}` and double-double
//! quadrature otherwise.

use crate::cmat::CMat2;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::num::{CJet, Cx, GMat2, RJet, Real};
use crate::operators::LagOperator;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Below this value of the series variable (`beta t` for `F3`), hyperbolic
/// entries switch to their even power series to avoid `0/0` evaluation.
pub const SERIES_FALLBACK_THRESHOLD: f64 = 1e-8;

/// A named weight family with parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum WeightSpec {
    F1 {
        alpha: f64,
        beta: f64,
        b: f64,
    },
    F2 {
        alpha: f64,
        b: f64,
    },
    F3 {
        beta: f64,
    },
    #[serde(rename = "raw-v-eq-u")]
    RawVEqU {
        u: f64,
        c21: f64,
        c22: f64,
        gamma: f64,
    },
    #[serde(rename = "raw-v-eq-2u")]
    RawVEq2U {
        u: f64,
        c21: f64,
        gamma: f64,
    },
    #[serde(rename = "raw-v-eq-half-u")]
    RawVEqHalfU {
        u: f64,
        c22: f64,
    },
    #[serde(rename = "raw-scalar-u")]
    RawScalarU {
        u: f64,
        c21: Complex64,
        c22: f64,
        gamma: f64,
    },
    #[serde(rename = "diag-laguerre")]
    DiagLaguerre {
        alpha1: f64,
        alpha2: f64,
    },
}

/// Weight value and derivatives at a point.
#[derive(Clone, Copy, Debug)]
pub struct WeightJet {
    pub t: f64,
    pub w: CMat2,
    pub w1: CMat2,
    pub w2: CMat2,
}

/// Entries of a weight as finite sums `sum c * t^p * e^{-u t}`.
pub(crate) struct PolyTerms {
    /// Exponential decay rate shared by all entries.
    pub u: f64,
    /// For each entry, `(coefficient, power)` pairs.
    pub terms: [[Vec<(Complex64, f64)>; 2]; 2],
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WeightSpec::F1 { alpha, beta, b } => {
                write!(f, "F1(alpha={alpha}, beta={beta}, b={b})")
            }
            WeightSpec::F2 { alpha, b } => write!(f, "F2(alpha={alpha}, b={b})"),
            WeightSpec::F3 { beta } => write!(f, "F3(beta={beta})"),
            WeightSpec::RawVEqU { u, c21, c22, gamma } => {
                write!(f, "raw-v-eq-u(u={u}, c21={c21}, c22={c22}, gamma={gamma})")
            }
            WeightSpec::RawVEq2U { u, c21, gamma } => {
                write!(f, "raw-v-eq-2u(u={u}, c21={c21}, gamma={gamma})")
            }
            WeightSpec::RawVEqHalfU { u, c22 } => {
                write!(f, "raw-v-eq-half-u(u={u}, c22={c22})")
            }
            WeightSpec::RawScalarU { u, c21, c22, gamma } => {
                write!(
                    f,
                    "raw-scalar-u(u={u}, c21={}+{}i, c22={c22}, gamma={gamma})",
                    c21.re, c21.im
                )
            }
            WeightSpec::DiagLaguerre { alpha1, alpha2 } => {
                write!(f, "diag-laguerre(alpha1={alpha1}, alpha2={alpha2})")
            }
        }
    }
}

impl WeightSpec {
    /// List of violated domain constraints; empty means the parameters are
    /// admissible.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        match *self {
            WeightSpec::F1 { alpha, beta, b } => {
                if alpha <= -1.0 {
                    bad.push(format!("alpha > -1 violated (alpha = {alpha})"));
                }
                if beta <= -1.0 - alpha {
                    bad.push(format!(
                        "beta > -1 - alpha violated (beta = {beta}, alpha = {alpha})"
                    ));
                }
                if b == 0.0 {
                    bad.push("b != 0 violated (b = 0)".into());
                }
            }
            WeightSpec::F2 { alpha, b } => {
                if alpha <= -1.0 {
                    bad.push(format!("alpha > -1 violated (alpha = {alpha})"));
                }
                if b == 0.0 || b.abs() >= 1.0 {
                    bad.push(format!("0 < |b| < 1 violated (b = {b})"));
                }
            }
            WeightSpec::F3 { beta } => {
                if beta <= 0.0 {
                    bad.push(format!("beta > 0 violated (beta = {beta})"));
                }
            }
            WeightSpec::RawVEqU { u, c21, c22, gamma } => {
                if u <= 0.0 {
                    bad.push(format!("u > 0 violated (u = {u})"));
                }
                if c22 <= 0.0 {
                    bad.push(format!("c22 > 0 violated (c22 = {c22})"));
                }
                if (c21 * u - c22).abs() <= 1e-12 * (1.0 + c22.abs()) {
                    bad.push(format!(
                        "c21 u != c22 violated (c21 u = {}, c22 = {c22})",
                        c21 * u
                    ));
                } else if c22 <= 2.0 * c21 * u / (c22 - c21 * u) {
                    bad.push(format!(
                        "c22 > 2 c21 u / (c22 - c21 u) violated \
                         (c21 = {c21}, c22 = {c22}, u = {u})"
                    ));
                }
                if gamma <= 0.0 {
                    bad.push(format!("gamma > 0 violated (gamma = {gamma})"));
                }
            }
            WeightSpec::RawVEq2U { u, c21, gamma } => {
                if u <= 0.0 {
                    bad.push(format!("u > 0 violated (u = {u})"));
                }
                if c21 <= 0.0 {
                    bad.push(format!("c21 > 0 violated (c21 = {c21})"));
                }
                if u > 0.0 && c21 > 0.0 {
                    let bound = u * u / (16.0 * (c21 * u + 1.0).powi(2));
                    if gamma <= bound {
                        bad.push(format!(
                            "gamma > u^2 / (16 (c21 u + 1)^2) violated \
                             (gamma = {gamma}, bound = {bound})"
                        ));
                    }
                }
            }
            WeightSpec::RawVEqHalfU { u, c22 } => {
                if u <= 0.0 {
                    bad.push(format!("u > 0 violated (u = {u})"));
                }
                if c22 <= 0.5 {
                    bad.push(format!("c22 > 1/2 violated (c22 = {c22})"));
                }
            }
            WeightSpec::RawScalarU { u, c21, c22, gamma } => {
                if u <= 0.0 {
                    bad.push(format!("u > 0 violated (u = {u})"));
                }
                if c22 <= 0.0 {
                    bad.push(format!("c22 > 0 violated (c22 = {c22})"));
                }
                if u > 0.0 && c22 > 0.0 {
                    let bound = c21.norm_sqr() * u * u / (4.0 * c22 * c22);
                    if gamma <= bound {
                        bad.push(format!(
                            "gamma > |c21|^2 u^2 / (4 c22^2) violated \
                             (gamma = {gamma}, bound = {bound})"
                        ));
                    }
                }
            }
            WeightSpec::DiagLaguerre { alpha1, alpha2 } => {
                if alpha1 <= -1.0 {
                    bad.push(format!("alpha1 > -1 violated (alpha1 = {alpha1})"));
                }
                if alpha2 <= -1.0 {
                    bad.push(format!("alpha2 > -1 violated (alpha2 = {alpha2})"));
                }
            }
        }
        bad
    }

    /// The operator this weight symmetrizes.
    ///
    /// # Errors
    ///
    /// Propagates [`Error::ParameterOutOfDomain`] from the operator
    /// constructors.
    pub fn operator(&self) -> Result<LagOperator> {
        match *self {
            WeightSpec::F1 { alpha, beta, b } => LagOperator::family1(alpha, beta, b),
            WeightSpec::F2 { alpha, b } => LagOperator::family2(alpha, b),
            WeightSpec::F3 { beta } => LagOperator::family3(beta),
            WeightSpec::RawVEqU { u, c21, c22, .. } => {
                LagOperator::raw_v_eq_u(u, c21, c22)
            }
            WeightSpec::RawVEq2U { u, c21, .. } => LagOperator::raw_v_eq_2u(u, c21),
            WeightSpec::RawVEqHalfU { u, c22 } => LagOperator::raw_v_eq_half_u(u, c22),
            WeightSpec::RawScalarU { u, c21, c22, .. } => {
                LagOperator::raw_scalar_u(u, c21, c22)
            }
            WeightSpec::DiagLaguerre { alpha1, alpha2 } => {
                self.check_valid()?;
                Ok(LagOperator::new(
                    CMat2::from_real([[alpha1 + 1.0, 0.0], [0.0, alpha2 + 1.0]]),
                    CMat2::identity(),
                    CMat2::zero(),
                ))
            }
        }
    }

    /// All-or-nothing form of [`WeightSpec::validate`].
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] naming every violated constraint.
    pub fn check_valid(&self) -> Result<()> {
        let bad = self.validate();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::ParameterOutOfDomain(format!(
                "{self}: {}",
                bad.join("; ")
            )))
        }
    }

    /// Evaluate `W`, `W'`, `W''` at `t`.
    ///
    /// # Errors
    ///
    /// [`Error::NonPositiveT`] for `t <= 0` and
    /// [`Error::ParameterOutOfDomain`] for inadmissible parameters.
    ///
    /// # Examples
    ///
    /// ```
    /// use matlag::weights::WeightSpec;
    /// let spec = WeightSpec::F1 { alpha: 0.0, beta: 1.0, b: 1.0 };
    /// let jet = spec.eval(1.0).unwrap();
    /// // W(1) = e^{-1} [[2, 1], [1, 1]].
    /// let scaled = jet.w.scale_re(1.0f64.exp());
    /// assert!((scaled.e[0][0].re - 2.0).abs() < 1e-12);
    /// ```
    pub fn eval(&self, t: f64) -> Result<WeightJet> {
        if t <= 0.0 {
            return Err(Error::NonPositiveT(t));
        }
        self.check_valid()?;
        let (w, w1, w2) = weight_jets_raw::<f64>(self, t);
        Ok(WeightJet {
            t,
            w: CMat2::from_gmat(w),
            w1: CMat2::from_gmat(w1),
            w2: CMat2::from_gmat(w2),
        })
    }

    /// Entry decomposition `sum c t^p e^{-u t}` when the family is
    /// polynomial-times-exponential; `None` for the hyperbolic families
    /// (`F3`, `raw-v-eq-half-u`).
    pub(crate) fn poly_terms(&self) -> Option<PolyTerms> {
        let re = |x: f64| Complex64::new(x, 0.0);
        match *self {
            WeightSpec::F1 { alpha, beta, b } => Some(PolyTerms {
                u: 1.0,
                terms: [
                    [
                        vec![(re(1.0), alpha + beta), (re(b * b), alpha + 2.0)],
                        vec![(re(b), alpha + 1.0)],
                    ],
                    [
                        vec![(re(b), alpha + 1.0)],
                        vec![(re(1.0), alpha)],
                    ],
                ],
            }),
            WeightSpec::F2 { alpha, b } => {
                let a2 = alpha + 2.0;
                let off = vec![(re(2.0 * b * a2), alpha + 1.0), (re(-b), alpha + 2.0)];
                Some(PolyTerms {
                    u: 1.0,
                    terms: [
                        [
                            vec![
                                (re(1.0), alpha + 4.0),
                                (re(4.0 * b * b * a2 * a2), alpha + 2.0),
                                (re(-4.0 * b * b * a2), alpha + 3.0),
                            ],
                            off.clone(),
                        ],
                        [off, vec![(re(1.0), alpha)]],
                    ],
                })
            }
            WeightSpec::RawVEqU { u, c21, c22, gamma } => {
                // Off-diagonal q(t) = (c22 - c21 u)(c22 - t u) / (2 u c22).
                let q0 = (c22 - c21 * u) / (2.0 * u);
                let q1 = -(c22 - c21 * u) / (2.0 * c22);
                let a0 = c22 - 1.0;
                let p = 2.0 * c21 * u / (c21 * u - c22);
                let off = vec![(re(q0), a0), (re(q1), a0 + 1.0)];
                Some(PolyTerms {
                    u,
                    terms: [
                        [
                            vec![
                                (re(gamma), a0 + p),
                                (re(q0 * q0), a0),
                                (re(2.0 * q0 * q1), a0 + 1.0),
                                (re(q1 * q1), a0 + 2.0),
                            ],
                            off.clone(),
                        ],
                        [off, vec![(re(1.0), a0)]],
                    ],
                })
            }
            WeightSpec::RawVEq2U { u, c21, gamma } => {
                // (1,1) entry t^4 gamma + (c21 - 2t)(c21 (c21 u + 1)
                //   + 2t(t u - 1 - c21 u)) / (16 (c21 u + 1)), expanded in t.
                let kap = c21 * u + 1.0;
                let a0 = c21 * u - 1.0;
                let off = vec![
                    (re(-c21 / 4.0), a0),
                    (re(0.5), a0 + 1.0),
                    (re(-u / (4.0 * kap)), a0 + 2.0),
                ];
                Some(PolyTerms {
                    u,
                    terms: [
                        [
                            vec![
                                (re(gamma), a0 + 4.0),
                                (re(c21 * c21 / 16.0), a0),
                                (re(-c21 / 4.0), a0 + 1.0),
                                (re((2.0 * c21 * u + 4.0 * kap) / (16.0 * kap)), a0 + 2.0),
                                (re(-u / (4.0 * kap)), a0 + 3.0),
                            ],
                            off.clone(),
                        ],
                        [off, vec![(re(1.0), a0)]],
                    ],
                })
            }
            WeightSpec::RawScalarU { u, c21, c22, gamma } => {
                let a0 = c22 - 1.0;
                let n21 = c21.norm_sqr();
                // (1,2) entry: conj(c21) (t u - c22) / (2 c22).
                let upper = vec![
                    (c21.conj() * re(-0.5), a0),
                    (c21.conj() * re(u / (2.0 * c22)), a0 + 1.0),
                ];
                let lower = vec![
                    (c21 * re(-0.5), a0),
                    (c21 * re(u / (2.0 * c22)), a0 + 1.0),
                ];
                Some(PolyTerms {
                    u,
                    terms: [
                        [
                            vec![
                                (re(gamma), a0 + 2.0),
                                (re(n21 / 4.0), a0),
                                (re(-n21 * u / (2.0 * c22)), a0 + 1.0),
                            ],
                            upper,
                        ],
                        [lower, vec![(re(1.0), a0)]],
                    ],
                })
            }
            WeightSpec::DiagLaguerre { alpha1, alpha2 } => Some(PolyTerms {
                u: 1.0,
                terms: [
                    [vec![(re(1.0), alpha1)], vec![]],
                    [vec![], vec![(re(1.0), alpha2)]],
                ],
            }),
            WeightSpec::F3 { .. } | WeightSpec::RawVEqHalfU { .. } => None,
        }
    }

    /// Moment matrix `M_k = integral t^k W(t) dt`.
    ///
    /// Polynomial families evaluate term-by-term through the Gamma
    /// function; the hyperbolic families integrate by double-double
    /// quadrature.
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] for inadmissible parameters,
    /// [`Error::NonConvergence`] if quadrature cannot reach its target.
    pub fn moment(&self, k: usize) -> Result<CMat2> {
        Ok(CMat2::from_gmat(self.moment_dd(k)?))
    }

    /// Double-double moment matrix (internal precision of the pipeline).
    pub(crate) fn moment_dd(&self, k: usize) -> Result<GMat2<Dd>> {
        self.check_valid()?;
        if let Some(pt) = self.poly_terms() {
            let mut m = GMat2::zero();
            let ln_u = if pt.u == 1.0 {
                Dd::ZERO
            } else {
                Dd::from_f64(pt.u).ln()
            };
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = Cx::<Dd>::zero();
                    for &(c, p) in &pt.terms[i][j] {
                        // integral t^{k+p} e^{-u t} dt
                        //   = Gamma(k + p + 1) / u^{k + p + 1}.
                        let e = Dd::from_f64(k as f64 + p + 1.0);
                        let mut val = crate::dd::gamma_dd(e);
                        if pt.u != 1.0 {
                            val = val * (-(e * ln_u)).exp();
                        }
                        acc = acc + Cx::from_f64s(c.re, c.im).scale(val);
                    }
                    m.e[i][j] = acc;
                }
            }
            Ok(m)
        } else {
            crate::quad::weight_moment_dd(self, k)
        }
    }
}

/// `cosh(sqrt(y))` as a jet in `y`, analytic through `y = 0`.
fn cosh_sqrt<R: Real>(y: RJet<R>) -> RJet<R> {
    if y.v.to_f64() < SERIES_FALLBACK_THRESHOLD {
        // 1 + y/2 + y^2/24 + y^3/720 + y^4/40320; remainder below 1e-47
        // at the switch point.
        y.poly(&[
            1.0,
            1.0 / 2.0,
            1.0 / 24.0,
            1.0 / 720.0,
            1.0 / 40_320.0,
        ])
    } else {
        y.sqrt().cosh()
    }
}

/// `sinh(sqrt(y)) / sqrt(y)` as a jet in `y`, analytic through `y = 0`.
fn sinhc_sqrt<R: Real>(y: RJet<R>) -> RJet<R> {
    if y.v.to_f64() < SERIES_FALLBACK_THRESHOLD {
        y.poly(&[
            1.0,
            1.0 / 6.0,
            1.0 / 120.0,
            1.0 / 5_040.0,
            1.0 / 362_880.0,
        ])
    } else {
        let s = y.sqrt();
        s.sinh().div(s)
    }
}

/// Weight value and first two derivatives at `t > 0`, generic over the
/// working precision.  Domain validity is the caller's responsibility.
pub(crate) fn weight_jets_raw<R: Real>(
    spec: &WeightSpec,
    t: R,
) -> (GMat2<R>, GMat2<R>, GMat2<R>) {
    let tj = RJet::var(t);
    let mut w = [[CJet::<R>::zero(); 2]; 2];
    match *spec {
        WeightSpec::F3 { beta } => {
            let pre = tj
                .neg()
                .exp()
                .mul(tj.powf(R::from_f64(-0.5)));
            let x = tj.scale(R::from_f64(beta));
            let ch = cosh_sqrt(x);
            let g2 = sinhc_sqrt(x);
            let e00 = pre.mul(tj.scale(R::from_f64(8.0 / beta))).mul(ch);
            let e01 = pre.mul(tj.scale(R::from_f64(4.0))).mul(g2);
            let e11 = pre.mul(ch).scale(R::from_f64(2.0));
            w[0][0] = CJet::from_real(e00);
            w[0][1] = CJet::from_real(e01);
            w[1][0] = CJet::from_real(e01);
            w[1][1] = CJet::from_real(e11);
        }
        WeightSpec::RawVEqHalfU { u, c22 } => {
            // gamma = sqrt(2 c22 - 1); with x = 2 u t and y = gamma^2 x the
            // entries are analytic functions of y:
            //   (1,1) = ((gamma^2 + x) C(y) - 2 gamma^2 x G(y)) / (gamma^2 u^2)
            //   (1,2) = (C(y) - x G(y)) / u,   (2,2) = C(y),
            // all times e^{-u t} / sqrt(t), where C = cosh(sqrt(.)) and
            // G = sinh(sqrt(.))/sqrt(.).
            let g2 = 2.0 * c22 - 1.0;
            let pre = tj
                .scale(R::from_f64(-u))
                .exp()
                .mul(tj.powf(R::from_f64(-0.5)));
            let x = tj.scale(R::from_f64(2.0 * u));
            let y = x.scale(R::from_f64(g2));
            let ch = cosh_sqrt(y);
            let gg = sinhc_sqrt(y);
            let e00 = x
                .add(RJet::constant(R::from_f64(g2)))
                .mul(ch)
                .sub(x.mul(gg).scale(R::from_f64(2.0 * g2)))
                .scale(R::from_f64(1.0 / (g2 * u * u)));
            let e01 = ch.sub(x.mul(gg)).scale(R::from_f64(1.0 / u));
            let e00 = pre.mul(e00);
            let e01 = pre.mul(e01);
            let e11 = pre.mul(ch);
            w[0][0] = CJet::from_real(e00);
            w[0][1] = CJet::from_real(e01);
            w[1][0] = CJet::from_real(e01);
            w[1][1] = CJet::from_real(e11);
        }
        _ => {
            let pt = spec
                .poly_terms()
                .expect("non-hyperbolic families decompose into power terms");
            let epre = tj.scale(R::from_f64(-pt.u)).exp();
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = CJet::zero();
                    for &(c, p) in &pt.terms[i][j] {
                        let jet = epre.mul(tj.powf(R::from_f64(p)));
                        acc = acc.add(CJet::from_real(jet).scale_c(Cx::from_f64s(c.re, c.im)));
                    }
                    w[i][j] = acc;
                }
            }
        }
    }
    let mut w0 = GMat2::zero();
    let mut w1 = GMat2::zero();
    let mut w2 = GMat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            w0.e[i][j] = w[i][j].v;
            w1.e[i][j] = w[i][j].d1;
            w2.e[i][j] = w[i][j].d2;
        }
    }
    (w0, w1, w2)
}
