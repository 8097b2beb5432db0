//! Monic matrix orthogonal polynomials by two independent routes.
//!
//! For a weight `W` on `(0, infinity)` with inner product
//! `<P, Q> = integral P(t)* W(t) Q(t) dt`, there is a unique sequence of
//! monic polynomials `P_n(t) = t^n I + ... ` with `<P_n, P_m> = 0` for
//! `n != m`.  This module constructs it two ways:
//!
//! 1. **Moment route** ([`build_by_moments`]): Gram-Schmidt through the
//!    normal equations `sum_j m_{i+j} T_j = -m_{i+n}` over the cached
//!    moment matrices `m_k = integral t^k W dt`, the authoritative
//!    construction.
//! 2. **Recursion route** ([`build_by_recursion`]): for an operator
//!    `D = t I d2 + (C - t U) d - V` with `D P_n = P_n Delta_n`,
//!    `Delta_n = -n U - V = [[lambda_n, 0], [nu_n, mu_n]]`, the
//!    coefficient columns satisfy the top-down ladder
//!    `(lambda_n I - Delta_k) F_k = (k+1)(C + kI) F_{k+1} - nu_n G_k` and
//!    `(mu_n I - Delta_k) G_k = (k+1)(C + kI) G_{k+1}` started from the
//!    monic top `F_n = (1,0)^T`, `G_n = (0,1)^T`.  Integer resonances make
//!    single steps singular (e.g. `mu_n = lambda_{n-1}` when `v = u`); the
//!    consistent component is solved and the free direction is pinned by
//!    least-squares orthogonality against lower degrees.
//!
//! Route agreement on every coefficient is the strongest cross-check in
//! the crate: the two constructions share no code path beyond the moment
//! cache.
//!
//! From the coefficients, the three-term recurrence
//! `t P_n = P_{n+1} + P_n B_n + P_{n-1} A_n` is extracted both from Gram
//! matrices (`B_n = S_n^{-1} <P_n, t P_n>`) and from coefficient
//! differences (`B_n = T_{n-1}^n - T_n^{n+1}`,
//! `A_n = T_{n-2}^n - T_{n-1}^{n+1} - T_{n-1}^n B_n`), and
//! [`favard_check`] verifies the classical positivity package:
//! `A_n = S_{n-1}^{-1} S_n` nonsingular, `S_n B_n` Hermitian, plus the
//! structural identities `s22 nu_n = (mu_n - lambda_n) conj(s12)` and
//! `v21 = -v conj(s12^0) / s22^0` tying Gram entries to the operator.
//!
//! All construction arithmetic runs in double-double precision: the
//! moment normal equations are Hankel-like with condition number near
//! `1e9` by degree twelve, which would leave plain `f64` results at the
//! edge of the acceptance tolerances.

use crate::cmat::CMat2;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::num::{lu_solve, singular_values2, CVec2, Cx, GMat2};
use crate::operators::{LagOperator, MatPoly};
use crate::weights::WeightSpec;

/// Default maximum polynomial degree.
pub const DEFAULT_N: usize = 12;

/// Hard cap on the degree; moment magnitudes beyond this exhaust even
/// double-double working precision.
pub const MAX_N: usize = 24;

/// Off-diagonal Gram residual (relative) above which one
/// re-orthogonalization pass is applied.
pub const REORTH_TRIGGER: f64 = 1e-10;

/// A ladder step counts as resonant when a diagonal entry of the shift
/// matrix is below this tolerance times `1 + ||matrix||`; in-domain
/// resonances are exact integer relations, far from the threshold.
pub const RESONANCE_TOL: f64 = 1e-10;

/// Relative singular-value floor for "A_n nonsingular".
pub const NONSINGULAR_TOL: f64 = 1e-12;

/// Cached moment matrices `m_k = integral t^k W(t) dt` in double-double
/// precision; the shared input of both construction routes.
#[derive(Clone)]
pub struct MomentTable {
    dd: Vec<GMat2<Dd>>,
}

impl MomentTable {
    /// Moments `m_0 .. m_{2 n_max + 2}` for the given weight.
    ///
    /// # Errors
    ///
    /// Propagates domain and quadrature errors from the weight.
    pub fn new(spec: &WeightSpec, n_max: usize) -> Result<MomentTable> {
        let mut dd = Vec::with_capacity(2 * n_max + 3);
        for k in 0..=(2 * n_max + 2) {
            dd.push(spec.moment_dd(k)?);
        }
        Ok(MomentTable { dd })
    }

    /// The table of the congruent weight `M* W M`: every moment maps to
    /// `M* m_k M`.
    pub fn conjugated(&self, m: &CMat2) -> MomentTable {
        let md: GMat2<Dd> = m.to_gmat();
        let mda = md.adjoint();
        MomentTable {
            dd: self.dd.iter().map(|mk| mda.mul(*mk).mul(md)).collect(),
        }
    }

    /// Number of cached moments.
    pub fn count(&self) -> usize {
        self.dd.len()
    }

    /// Largest degree a sequence built from this table may have.
    pub fn max_degree(&self) -> usize {
        (self.count().saturating_sub(3)) / 2
    }

    pub fn moment(&self, k: usize) -> CMat2 {
        CMat2::from_gmat(self.dd[k])
    }

    pub(crate) fn dd(&self, k: usize) -> &GMat2<Dd> {
        &self.dd[k]
    }
}

/// `sum_{a,b} p_a* m_{a+b+shift} q_b`, the inner product
/// `<P, t^shift Q>` expressed through moments.
fn inner_dd(
    table: &MomentTable,
    p: &[GMat2<Dd>],
    q: &[GMat2<Dd>],
    shift: usize,
) -> GMat2<Dd> {
    let mut s = GMat2::zero();
    for (a, pa) in p.iter().enumerate() {
        let pad = pa.adjoint();
        for (b, qb) in q.iter().enumerate() {
            s = s.add(pad.mul(*table.dd(a + b + shift)).mul(*qb));
        }
    }
    s
}

/// A monic orthogonal sequence with its Gram matrices and three-term
/// recurrence coefficients.
///
/// Public fields are `f64` roundings; inner products and residual
/// diagnostics recompute from retained double-double data.
#[derive(Clone)]
pub struct MOPSequence {
    /// Maximum degree `N`.
    pub n_max: usize,
    /// `P_0 .. P_N`, monic.
    pub polys: Vec<MatPoly>,
    /// `S_n = <P_n, P_n>`, Hermitian positive definite.
    pub grams: Vec<CMat2>,
    /// `A_1 .. A_N` with `A_n = S_{n-1}^{-1} <P_{n-1}, t P_n>`.
    pub a: Vec<CMat2>,
    /// `B_0 .. B_N` with `B_n = S_n^{-1} <P_n, t P_n>`.
    pub b: Vec<CMat2>,
    table: MomentTable,
    dd_polys: Vec<Vec<GMat2<Dd>>>,
    dd_grams: Vec<GMat2<Dd>>,
    dd_a: Vec<GMat2<Dd>>,
    dd_b: Vec<GMat2<Dd>>,
}

impl MOPSequence {
    /// `<P_i, P_j>` recomputed at full internal precision.
    pub fn inner(&self, i: usize, j: usize) -> CMat2 {
        CMat2::from_gmat(inner_dd(
            &self.table,
            &self.dd_polys[i],
            &self.dd_polys[j],
            0,
        ))
    }

    /// Worst off-diagonal orthogonality defect
    /// `||<P_n, P_m>|| / sqrt(||S_n|| ||S_m||)` over `n != m`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..=self.n_max {
            for j in 0..i {
                let g = inner_dd(&self.table, &self.dd_polys[i], &self.dd_polys[j], 0);
                let scale =
                    (self.dd_grams[i].norm_inf() * self.dd_grams[j].norm_inf()).sqrt();
                worst = worst.max(g.norm_inf() / scale.max(1e-300));
            }
        }
        worst
    }

    /// Worst coefficient residual of
    /// `t P_n = P_{n+1} + P_n B_n + P_{n-1} A_n`, relative to the largest
    /// coefficient of the left side.
    pub fn recurrence_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.n_max {
            // Coefficient of t^k on the left is T_{k-1}^n.
            let mut scale = 1.0f64;
            for c in &self.dd_polys[n] {
                scale = scale.max(c.norm_inf());
            }
            for k in 0..=(n + 1) {
                let lhs = if k > 0 {
                    self.dd_polys[n][k - 1]
                } else {
                    GMat2::zero()
                };
                let mut rhs = self.dd_polys[n + 1][k];
                if k <= n {
                    rhs = rhs.add(self.dd_polys[n][k].mul(self.dd_b[n]));
                }
                if n > 0 && k <= n - 1 {
                    rhs = rhs.add(self.dd_polys[n - 1][k].mul(self.dd_a[n - 1]));
                }
                worst = worst.max(lhs.sub(rhs).norm_inf() / scale);
            }
        }
        worst
    }

    /// Per-degree residual of `D P_n = P_n Delta_n`, relative to
    /// `1 + ||Delta_n|| max_k ||T_k||`.
    ///
    /// # Errors
    ///
    /// [`Error::NotLowerTriangular`] when the operator has no
    /// lower-triangular eigenvalue matrices.
    pub fn eigen_residuals(&self, op: &LagOperator) -> Result<Vec<f64>> {
        let c = op.c.to_gmat::<Dd>();
        let u = op.u.to_gmat::<Dd>();
        let v = op.v.to_gmat::<Dd>();
        let mut out = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            op.eigenvalue(n)?;
            let delta = delta_dd(&u, &v, n);
            out.push(eigen_residual_dd(&c, &u, &v, &self.dd_polys[n], &delta));
        }
        Ok(out)
    }

    pub(crate) fn table(&self) -> &MomentTable {
        &self.table
    }

}

fn delta_dd(u: &GMat2<Dd>, v: &GMat2<Dd>, n: usize) -> GMat2<Dd> {
    u.scale_r(Dd::from_f64(-(n as f64))).sub(*v)
}

/// `||D P - P Delta|| / (1 + ||Delta|| max_k ||T_k||)` with all products
/// in double-double.  Coefficient `k` of `D P` is
/// `(k+1)(C + kI) T_{k+1} - (k U + V) T_k`.
fn eigen_residual_dd(
    c: &GMat2<Dd>,
    u: &GMat2<Dd>,
    v: &GMat2<Dd>,
    t: &[GMat2<Dd>],
    delta: &GMat2<Dd>,
) -> f64 {
    let mut worst = 0.0f64;
    let mut tmax = 0.0f64;
    for tk in t {
        tmax = tmax.max(tk.norm_inf());
    }
    let scale = 1.0 + delta.norm_inf() * tmax;
    for k in 0..t.len() {
        let kf = Dd::from_f64(k as f64);
        let mut dp = u.scale_r(kf).add(*v).mul(t[k]).neg();
        if k + 1 < t.len() {
            let fac = Dd::from_f64((k + 1) as f64);
            let shift = c.add(GMat2::identity().scale_r(kf));
            dp = dp.add(shift.mul(t[k + 1]).scale_r(fac));
        }
        let resid = dp.sub(t[k].mul(*delta));
        worst = worst.max(resid.norm_inf() / scale);
    }
    worst
}

/// Solve the monic normal equations for degree `n` over the table:
/// unknown lower coefficients `T_0 .. T_{n-1}` with
/// `sum_j m_{i+j} T_j = -m_{i+n}` for `i < n`.
fn monic_coeffs(table: &MomentTable, n: usize) -> Result<Vec<GMat2<Dd>>> {
    let mut coeffs = vec![GMat2::<Dd>::zero(); n + 1];
    coeffs[n] = GMat2::identity();
    if n == 0 {
        return Ok(coeffs);
    }
    let dim = 2 * n;
    let build_rhs = |rows: &[GMat2<Dd>]| -> Vec<Vec<Cx<Dd>>> {
        let mut b = vec![vec![Cx::<Dd>::zero(); 2]; dim];
        for (i, m) in rows.iter().enumerate() {
            for r in 0..2 {
                for col in 0..2 {
                    b[2 * i + r][col] = -m.e[r][col];
                }
            }
        }
        b
    };
    let solve = |rhs_rows: &[GMat2<Dd>]| -> Result<Vec<GMat2<Dd>>> {
        let mut a = vec![vec![Cx::<Dd>::zero(); dim]; dim];
        for i in 0..n {
            for j in 0..n {
                let m = table.dd(i + j);
                for r in 0..2 {
                    for c in 0..2 {
                        a[2 * i + r][2 * j + c] = m.e[r][c];
                    }
                }
            }
        }
        let mut b = build_rhs(rhs_rows);
        lu_solve(&mut a, &mut b).ok_or_else(|| {
            Error::SingularMatrix(format!("moment normal equations at degree {n}"))
        })?;
        let mut xs = Vec::with_capacity(n);
        for j in 0..n {
            let mut x = GMat2::zero();
            for r in 0..2 {
                for c in 0..2 {
                    x.e[r][c] = b[2 * j + r][c];
                }
            }
            xs.push(x);
        }
        Ok(xs)
    };

    let rhs: Vec<GMat2<Dd>> = (0..n).map(|i| *table.dd(i + n)).collect();
    let xs = solve(&rhs)?;
    coeffs[..n].copy_from_slice(&xs);

    // One re-orthogonalization pass when the off-diagonal Gram residual
    // is above trigger (guards weights with near-singular moment scales).
    let residual_rows = |coeffs: &[GMat2<Dd>]| -> (Vec<GMat2<Dd>>, f64) {
        let mut rows = Vec::with_capacity(n);
        let mut rel = 0.0f64;
        for i in 0..n {
            let mut r = GMat2::<Dd>::zero();
            for (j, tj) in coeffs.iter().enumerate() {
                r = r.add(table.dd(i + j).mul(*tj));
            }
            rel = rel.max(r.norm_inf() / (1.0 + table.dd(i + n).norm_inf()));
            rows.push(r);
        }
        (rows, rel)
    };
    let (rows, rel) = residual_rows(&coeffs);
    if rel > REORTH_TRIGGER {
        let fix = solve(&rows)?;
        for j in 0..n {
            coeffs[j] = coeffs[j].add(fix[j]);
        }
    }
    Ok(coeffs)
}

/// Build the sequence from an explicit moment table (used directly for
/// congruence-transformed weights that have no named family).
///
/// # Errors
///
/// [`Error::InvalidInput`] when `n_max` exceeds the table or [`MAX_N`];
/// [`Error::GramNotPositiveDefinite`] when a Gram matrix degenerates;
/// [`Error::SingularMatrix`] on normal-equation breakdown.
pub fn build_from_table(table: MomentTable, n_max: usize) -> Result<MOPSequence> {
    if n_max > MAX_N {
        return Err(Error::InvalidInput(format!(
            "n_max = {n_max} exceeds the double-double degree cap {MAX_N}"
        )));
    }
    if n_max > table.max_degree() {
        return Err(Error::InvalidInput(format!(
            "n_max = {n_max} needs {} moments, table has {}",
            2 * n_max + 3,
            table.count()
        )));
    }
    let mut dd_polys = Vec::with_capacity(n_max + 1);
    let mut dd_grams = Vec::with_capacity(n_max + 1);
    let mut dd_a = Vec::new();
    let mut dd_b = Vec::new();
    for n in 0..=n_max {
        let coeffs = monic_coeffs(&table, n)?;
        let s = inner_dd(&table, &coeffs, &coeffs, 0);
        check_gram(&s, n)?;
        let g1 = inner_dd(&table, &coeffs, &coeffs, 1);
        let b = invert_gram(&s, n)?.mul(g1);
        if n > 0 {
            let prev: &Vec<GMat2<Dd>> = &dd_polys[n - 1];
            let cross = inner_dd(&table, prev, &coeffs, 1);
            let a = invert_gram(&dd_grams[n - 1], n - 1)?.mul(cross);
            dd_a.push(a);
        }
        dd_b.push(b);
        dd_grams.push(s);
        dd_polys.push(coeffs);
    }
    Ok(MOPSequence {
        n_max,
        polys: dd_polys.iter().map(|c| poly_from_dd(c)).collect(),
        grams: dd_grams.iter().map(|g| CMat2::from_gmat(*g)).collect(),
        a: dd_a.iter().map(|g| CMat2::from_gmat(*g)).collect(),
        b: dd_b.iter().map(|g| CMat2::from_gmat(*g)).collect(),
        table,
        dd_polys,
        dd_grams,
        dd_a,
        dd_b,
    })
}

fn check_gram(s: &GMat2<Dd>, n: usize) -> Result<()> {
    let scale = 1.0 + s.norm_inf();
    let herm = s.sub(s.adjoint()).norm_inf();
    let m1 = s.e[0][0].re.to_f64();
    let det = s.det().re.to_f64();
    if herm > 1e-10 * scale || m1 <= 0.0 || det <= 0.0 {
        return Err(Error::GramNotPositiveDefinite {
            n,
            detail: format!(
                "hermitian residual {herm:.3e}, leading minor {m1:.3e}, det {det:.3e}"
            ),
        });
    }
    Ok(())
}

fn invert_gram(s: &GMat2<Dd>, n: usize) -> Result<GMat2<Dd>> {
    s.inverse()
        .ok_or_else(|| Error::SingularMatrix(format!("Gram matrix S_{n}")))
}

fn poly_from_dd(coeffs: &[GMat2<Dd>]) -> MatPoly {
    MatPoly::new(coeffs.iter().map(|c| CMat2::from_gmat(*c)).collect())
}

/// Build the monic orthogonal sequence of a weight by the moment route.
///
/// # Errors
///
/// As for [`build_from_table`], plus weight domain/quadrature errors.
///
/// # Examples
///
/// ```
/// use matlag::mops::build_by_moments;
/// use matlag::weights::WeightSpec;
/// use matlag::CMat2;
/// let spec = WeightSpec::F1 { alpha: 0.0, beta: 1.0, b: 1.0 };
/// let seq = build_by_moments(&spec, 1).unwrap();
/// let want = CMat2::from_real([[-3.0, -0.5], [1.0, -0.5]]);
/// assert!((seq.polys[1].coeffs[0] - want).norm_inf() < 1e-10);
/// ```
pub fn build_by_moments(spec: &WeightSpec, n_max: usize) -> Result<MOPSequence> {
    build_from_table(MomentTable::new(spec, n_max)?, n_max)
}

/// How a single ladder step was solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SolveTag {
    /// Shift matrix nonsingular.
    Unique,
    /// Shift matrix singular with consistent right side; a free direction
    /// was spawned.
    ResonantConsistent,
    /// Singular with inconsistent right side (raised as an error).
    Inconsistent,
}

/// Diagnostics of the two column solves at one `(n, k)` step.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct RecursionCell {
    pub n: usize,
    pub k: usize,
    pub f_tag: SolveTag,
    pub g_tag: SolveTag,
    /// Condition numbers of the two shift matrices (infinite at
    /// resonances).
    pub f_cond: f64,
    pub g_cond: f64,
    /// Relative size of the right-hand side component that a resonant
    /// step requires to vanish; zero for unique steps.
    pub consistency: f64,
}

/// Full diagnostics of the recursion route.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct RecursionReport {
    pub cells: Vec<RecursionCell>,
    /// Residual of `D P_n = P_n Delta_n` per degree.
    pub eigen_residuals: Vec<f64>,
    /// `(n, k)` pairs where a resonance occurred.
    pub resonances: Vec<(usize, usize)>,
}

/// Output of the recursion route.
pub struct RecursionBuild {
    pub polys: Vec<MatPoly>,
    pub report: RecursionReport,
}

/// Solution of one lower-triangular ladder step, possibly with a free
/// direction.
struct StepSolution {
    part: CVec2<Dd>,
    /// Propagated image of the incoming null direction, when one is
    /// already active.
    null: Option<CVec2<Dd>>,
    /// Newly spawned null direction at a resonant step.
    spawned: Option<CVec2<Dd>>,
    tag: SolveTag,
    cond: f64,
    consistency: f64,
}

/// Solve `M x = r` for lower-triangular `M = [[a00, 0], [a10, a11]]`,
/// including the singular (resonant) patterns.
fn solve_ladder_step(
    m: &GMat2<Dd>,
    r_part: CVec2<Dd>,
    r_null: Option<CVec2<Dd>>,
    n: usize,
    k: usize,
    column: &str,
) -> Result<StepSolution> {
    let a00 = m.e[0][0];
    let a10 = m.e[1][0];
    let a11 = m.e[1][1];
    let scale = 1.0 + m.norm_inf();
    let tol = RESONANCE_TOL * scale;
    let (smax, smin) = singular_values2(m);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let ok00 = a00.abs().to_f64() > tol;
    let ok11 = a11.abs().to_f64() > tol;
    let rhs_scale = 1.0
        + r_part.norm_inf()
        + r_null.map_or(0.0, |v| v.norm_inf());
    let inconsistent = |detail: String| Error::RecursionInconsistent { n, k, detail };
    if ok00 && ok11 {
        let solve1 = |r: CVec2<Dd>| {
            let x0 = r.x[0] / a00;
            let x1 = (r.x[1] - a10 * x0) / a11;
            CVec2::new(x0, x1)
        };
        return Ok(StepSolution {
            part: solve1(r_part),
            null: r_null.map(solve1),
            spawned: None,
            tag: SolveTag::Unique,
            cond,
            consistency: 0.0,
        });
    }
    if !ok00 && !ok11 {
        return Err(inconsistent(format!(
            "{column} shift matrix doubly singular (|a00| = {:.3e}, |a11| = {:.3e})",
            a00.abs().to_f64(),
            a11.abs().to_f64()
        )));
    }
    if r_null.is_some() {
        return Err(inconsistent(format!(
            "second resonance in {column} ladder with a free direction already active"
        )));
    }
    if !ok00 {
        // First row forces r0 = 0; x0 free.
        let consistency = r_part.x[0].abs().to_f64() / rhs_scale;
        if consistency > RESONANCE_TOL {
            return Err(inconsistent(format!(
                "{column} resonant step requires vanishing first component, \
                 got relative residual {consistency:.3e}"
            )));
        }
        Ok(StepSolution {
            part: CVec2::new(Cx::zero(), r_part.x[1] / a11),
            null: None,
            spawned: Some(CVec2::new(Cx::one(), -(a10 / a11))),
            tag: SolveTag::ResonantConsistent,
            cond,
            consistency,
        })
    } else {
        // Second row resonant: x0 determined, x1 free.
        let x0 = r_part.x[0] / a00;
        let consistency =
            (r_part.x[1] - a10 * x0).abs().to_f64() / rhs_scale;
        if consistency > RESONANCE_TOL {
            return Err(inconsistent(format!(
                "{column} resonant step requires vanishing second component, \
                 got relative residual {consistency:.3e}"
            )));
        }
        Ok(StepSolution {
            part: CVec2::new(x0, Cx::zero()),
            null: None,
            spawned: Some(CVec2::new(Cx::zero(), Cx::one())),
            tag: SolveTag::ResonantConsistent,
            cond,
            consistency,
        })
    }
}

/// Build coefficients from the operator's differential equation.
///
/// At resonant steps the free direction is fixed by least-squares
/// orthogonality against all lower monomial rows of the completion's
/// moment table; with no completion the free coefficient is set to zero
/// (which reproduces the orthogonal sequence only for resonance-free
/// operators).
///
/// # Errors
///
/// [`Error::NotLowerTriangular`] for operators without lower-triangular
/// eigenvalue matrices; [`Error::RecursionInconsistent`] when a resonant
/// step has no solution — the operator then has no monic polynomial
/// eigenfunctions of this shape.
pub fn build_by_recursion(
    op: &LagOperator,
    n_max: usize,
    completion: Option<&MOPSequence>,
) -> Result<RecursionBuild> {
    let c = op.c.to_gmat::<Dd>();
    let u = op.u.to_gmat::<Dd>();
    let v = op.v.to_gmat::<Dd>();
    let mut report = RecursionReport::default();
    let mut polys = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        op.eigenvalue(n)?;
        let dn = delta_dd(&u, &v, n);
        let (lam_n, mu_n, nu_n) = (dn.e[0][0], dn.e[1][1], dn.e[1][0]);

        let mut f_part = vec![CVec2::<Dd>::zero(); n + 1];
        let mut g_part = vec![CVec2::<Dd>::zero(); n + 1];
        let mut f_null = vec![CVec2::<Dd>::zero(); n + 1];
        let mut g_null = vec![CVec2::<Dd>::zero(); n + 1];
        let mut null_active = false;
        f_part[n] = CVec2::new(Cx::one(), Cx::zero());
        g_part[n] = CVec2::new(Cx::zero(), Cx::one());

        for k in (0..n).rev() {
            let dk = delta_dd(&u, &v, k);
            let kf = Dd::from_f64(k as f64);
            let step = c
                .add(GMat2::identity().scale_r(kf))
                .scale_r(Dd::from_f64((k + 1) as f64));

            // Second column first: it feeds the first column through nu_n.
            let mg = GMat2::identity().scale_c(mu_n).sub(dk);
            let g_sol = solve_ladder_step(
                &mg,
                step.matvec(g_part[k + 1]),
                null_active.then(|| step.matvec(g_null[k + 1])),
                n,
                k,
                "second-column",
            )?;
            g_part[k] = g_sol.part;
            if let Some(x) = g_sol.null {
                g_null[k] = x;
            }
            if let Some(seed) = g_sol.spawned {
                g_null[k] = seed;
                null_active = true;
                report.resonances.push((n, k));
            }

            let mf = GMat2::identity().scale_c(lam_n).sub(dk);
            let f_rhs_part = step
                .matvec(f_part[k + 1])
                .sub(g_part[k].scale(nu_n));
            let f_rhs_null = null_active
                .then(|| step.matvec(f_null[k + 1]).sub(g_null[k].scale(nu_n)));
            let f_sol = solve_ladder_step(&mf, f_rhs_part, f_rhs_null, n, k, "first-column")?;
            f_part[k] = f_sol.part;
            if let Some(x) = f_sol.null {
                f_null[k] = x;
            }
            if f_sol.spawned.is_some() {
                // Never reached for u, v in the documented domains: the
                // first-column shifts are singular only for v < 0.
                return Err(Error::RecursionInconsistent {
                    n,
                    k,
                    detail: "resonant step in the first column is outside the \
                             supported operator domain"
                        .into(),
                });
            }
            report.cells.push(RecursionCell {
                n,
                k,
                f_tag: f_sol.tag,
                g_tag: g_sol.tag,
                f_cond: f_sol.cond,
                g_cond: g_sol.cond,
                consistency: f_sol.consistency.max(g_sol.consistency),
            });
        }

        let assemble = |fs: &[CVec2<Dd>], gs: &[CVec2<Dd>]| -> Vec<GMat2<Dd>> {
            fs.iter()
                .zip(gs)
                .map(|(fk, gk)| {
                    let mut m = GMat2::zero();
                    m.set_column(0, *fk);
                    m.set_column(1, *gk);
                    m
                })
                .collect()
        };
        let t_part = assemble(&f_part, &g_part);
        let coeffs = if null_active {
            let t_null = assemble(&f_null, &g_null);
            let xi = completion
                .map(|seq| completion_coefficient(seq.table(), &t_part, &t_null, n))
                .unwrap_or_else(Cx::zero);
            t_part
                .iter()
                .zip(&t_null)
                .map(|(p, q)| p.add(q.scale_c(xi)))
                .collect()
        } else {
            t_part
        };
        report
            .eigen_residuals
            .push(eigen_residual_dd(&c, &u, &v, &coeffs, &dn));
        polys.push(coeffs);
    }
    Ok(RecursionBuild {
        polys: polys.iter().map(|c| poly_from_dd(c)).collect(),
        report,
    })
}

/// Least-squares value of the free coefficient `xi` making
/// `T = T_part + xi T_null` orthogonal to all lower monomials: rows
/// `<t^j I, P_n> = sum_k m_{j+k} T_k` for `j < n`, each row scaled by the
/// size of its terms so that the huge dynamic range of moments cannot
/// bias the fit.
fn completion_coefficient(
    table: &MomentTable,
    t_part: &[GMat2<Dd>],
    t_null: &[GMat2<Dd>],
    n: usize,
) -> Cx<Dd> {
    let mut num = Cx::<Dd>::zero();
    let mut den = Dd::ZERO;
    for j in 0..n {
        let mut r_part = GMat2::<Dd>::zero();
        let mut r_null = GMat2::<Dd>::zero();
        let mut term_size = 0.0f64;
        for k in 0..t_part.len() {
            let m = table.dd(j + k);
            r_part = r_part.add(m.mul(t_part[k]));
            r_null = r_null.add(m.mul(t_null[k]));
            term_size += m.norm_inf() * t_part[k].norm_inf().max(t_null[k].norm_inf());
        }
        let w = Dd::from_f64(1.0 / (term_size * term_size).max(1e-300));
        for r in 0..2 {
            for cc in 0..2 {
                num = num + (r_null.e[r][cc].conj() * r_part.e[r][cc]).scale(w);
                den = den + r_null.e[r][cc].norm_sqr() * w;
            }
        }
    }
    if den.to_f64() <= 0.0 {
        return Cx::zero();
    }
    -(num.scale(den.recip()))
}

/// Recurrence coefficients from coefficient differences:
/// `B_n = T_{n-1}^n - T_n^{n+1}` and
/// `A_n = T_{n-2}^n - T_{n-1}^{n+1} - T_{n-1}^n B_n` (out-of-range `T`
/// are zero, so `B_0 = -T_0^1`).  Needs degrees through `N+1`; returns
/// `(A_1..A_N, B_0..B_N)` for `N = polys.len() - 2`.
pub fn recurrence_from_coeffs(polys: &[MatPoly]) -> (Vec<CMat2>, Vec<CMat2>) {
    assert!(polys.len() >= 2, "need degrees through N + 1");
    let t = |n: usize, k: isize| -> CMat2 {
        if k < 0 {
            CMat2::zero()
        } else {
            polys[n].coeffs[k as usize]
        }
    };
    let top = polys.len() - 2;
    let mut bs = Vec::with_capacity(top + 1);
    let mut as_ = Vec::with_capacity(top);
    for n in 0..=top {
        let ni = n as isize;
        let b = t(n, ni - 1) - t(n + 1, ni);
        if n >= 1 {
            let a = t(n, ni - 2) - t(n + 1, ni - 1) - t(n, ni - 1) * b;
            as_.push(a);
        }
        bs.push(b);
    }
    (as_, bs)
}

/// Residual summary of the classical positivity conditions plus the
/// structural Gram identities of the operator pairing.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FavardReport {
    /// `||A_n - S_{n-1}^{-1} S_n|| / (1 + ||A_n||)` for `n = 1..N`.
    pub a_vs_gram: Vec<f64>,
    /// Hermiticity defect of `S_n B_n = <P_n, t P_n>` for `n = 0..N`.
    pub snbn_hermitian: Vec<f64>,
    /// Smallest singular value of `A_n` exceeds
    /// [`NONSINGULAR_TOL`]` * (1 + largest)`.
    pub a_nonsingular: Vec<bool>,
    /// Gram matrices Hermitian positive definite.
    pub grams_positive: Vec<bool>,
    /// `|s22 nu_n - (mu_n - lambda_n) conj(s12)|` relative, per degree
    /// (empty without an operator).
    pub nun_residuals: Vec<f64>,
    /// `|v21 + v conj(s12^0) / s22^0|` relative (requires an operator).
    pub v21_residual: Option<f64>,
}

impl FavardReport {
    /// All residuals at or below `tol` and all flags true.
    pub fn pass(&self, tol: f64) -> bool {
        self.a_vs_gram.iter().all(|r| *r <= tol)
            && self.snbn_hermitian.iter().all(|r| *r <= tol)
            && self.a_nonsingular.iter().all(|x| *x)
            && self.grams_positive.iter().all(|x| *x)
            && self.nun_residuals.iter().all(|r| *r <= tol)
            && self.v21_residual.is_none_or(|r| r <= tol)
    }
}

/// Verify the positivity package of the three-term recurrence, and (when
/// an operator is supplied) the identities tying Gram entries to the
/// eigenvalue matrices.  The operator identities assume the `v22 = 0`
/// normalization that all constructors produce.
pub fn favard_check(seq: &MOPSequence, op: Option<&LagOperator>) -> FavardReport {
    let mut report = FavardReport {
        a_vs_gram: Vec::new(),
        snbn_hermitian: Vec::new(),
        a_nonsingular: Vec::new(),
        grams_positive: Vec::new(),
        nun_residuals: Vec::new(),
        v21_residual: None,
    };
    for n in 0..=seq.n_max {
        let s = &seq.dd_grams[n];
        report.grams_positive.push(
            s.sub(s.adjoint()).norm_inf() <= 1e-10 * (1.0 + s.norm_inf())
                && s.e[0][0].re.to_f64() > 0.0
                && s.det().re.to_f64() > 0.0,
        );
        let snbn = inner_dd(&seq.table, &seq.dd_polys[n], &seq.dd_polys[n], 1);
        report
            .snbn_hermitian
            .push(snbn.sub(snbn.adjoint()).norm_inf() / (1.0 + snbn.norm_inf()));
        if n >= 1 {
            let a = &seq.dd_a[n - 1];
            let favard_a = seq.dd_grams[n - 1]
                .inverse()
                .map(|inv| inv.mul(seq.dd_grams[n]));
            let resid = favard_a
                .map(|fa| a.sub(fa).norm_inf() / (1.0 + a.norm_inf()))
                .unwrap_or(f64::INFINITY);
            report.a_vs_gram.push(resid);
            let (smax, smin) = singular_values2(a);
            report
                .a_nonsingular
                .push(smin > NONSINGULAR_TOL * (1.0 + smax));
        }
    }
    if let Some(op) = op {
        let u = op.u.to_gmat::<Dd>();
        let v = op.v.to_gmat::<Dd>();
        for n in 0..=seq.n_max {
            let dn = delta_dd(&u, &v, n);
            let (lam, mu, nu) = (dn.e[0][0], dn.e[1][1], dn.e[1][0]);
            let s = &seq.dd_grams[n];
            let lhs = s.e[1][1] * nu;
            let rhs = (mu - lam) * s.e[0][1].conj();
            let scale = 1.0 + lhs.abs().to_f64() + rhs.abs().to_f64();
            report.nun_residuals.push((lhs - rhs).abs().to_f64() / scale);
        }
        let s0 = &seq.dd_grams[0];
        let v_head = Cx::<Dd>::from_f64s(op.v.e[0][0].re, op.v.e[0][0].im);
        let v21 = Cx::<Dd>::from_f64s(op.v.e[1][0].re, op.v.e[1][0].im);
        let predicted = -(v_head * s0.e[0][1].conj() / s0.e[1][1]);
        let resid = (v21 - predicted).abs().to_f64() / (1.0 + v21.abs().to_f64());
        report.v21_residual = Some(resid);
    }
    report
}

/// Worst relative coefficient difference between two coefficient lists:
/// `max ||T - T'|| / (1 + ||T||)`.
pub fn compare_routes(a: &[MatPoly], b: &[MatPoly]) -> f64 {
    assert_eq!(a.len(), b.len(), "comparing sequences of equal length");
    let mut worst = 0.0f64;
    for (pa, pb) in a.iter().zip(b) {
        assert_eq!(pa.coeffs.len(), pb.coeffs.len());
        for (ta, tb) in pa.coeffs.iter().zip(&pb.coeffs) {
            worst = worst.max((*ta - *tb).norm_inf() / (1.0 + ta.norm_inf()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANCHOR_TOL: f64 = 1e-10;

    fn f1_default() -> WeightSpec {
        WeightSpec::F1 {
            alpha: 0.0,
            beta: 1.0,
            b: 1.0,
        }
    }

    #[test]
    fn degree_one_closed_form_anchor() {
        let seq = build_by_moments(&f1_default(), 1).unwrap();
        let s0 = CMat2::from_real([[3.0, 1.0], [1.0, 1.0]]);
        let p1_const = CMat2::from_real([[-3.0, -0.5], [1.0, -0.5]]);
        let b0 = CMat2::from_real([[3.0, 0.5], [-1.0, 0.5]]);
        assert!((seq.grams[0] - s0).norm_inf() < ANCHOR_TOL);
        assert!((seq.polys[1].coeffs[0] - p1_const).norm_inf() < ANCHOR_TOL);
        assert!((seq.b[0] - b0).norm_inf() < ANCHOR_TOL);
        assert!(seq.polys[1].is_monic(1e-15));
    }

    #[test]
    fn orthogonality_and_recurrence_residuals_are_tiny() {
        let seq = build_by_moments(&f1_default(), 8).unwrap();
        assert!(seq.orthogonality_residual() < 1e-15);
        assert!(seq.recurrence_residual() < 1e-12);
        for s in &seq.grams {
            assert!(s.is_positive_definite(1e-12));
        }
    }

    #[test]
    fn diagonal_laguerre_reproduces_classical_recurrence() {
        for alpha in [-0.5, 0.0, 2.0] {
            let spec = WeightSpec::DiagLaguerre {
                alpha1: alpha,
                alpha2: alpha,
            };
            let seq = build_by_moments(&spec, 10).unwrap();
            for n in 0..=10usize {
                let want_b = CMat2::identity().scale_re(2.0 * n as f64 + alpha + 1.0);
                assert!(
                    (seq.b[n] - want_b).norm_inf() < ANCHOR_TOL,
                    "B_{n} for alpha = {alpha}"
                );
                if n >= 1 {
                    let want_a =
                        CMat2::identity().scale_re(n as f64 * (n as f64 + alpha));
                    assert!(
                        (seq.a[n - 1] - want_a).norm_inf() < ANCHOR_TOL,
                        "A_{n} for alpha = {alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigen_residuals_vanish_for_the_paired_operator() {
        let spec = f1_default();
        let op = spec.operator().unwrap();
        let seq = build_by_moments(&spec, 6).unwrap();
        for (n, r) in seq.eigen_residuals(&op).unwrap().into_iter().enumerate() {
            assert!(r < 1e-14, "degree {n}: residual {r:.3e}");
        }
    }

    #[test]
    fn recursion_route_matches_moment_route_through_resonances() {
        // v = u: the second-column ladder is singular at k = n - 1 for
        // every n >= 1.
        let spec = f1_default();
        let op = spec.operator().unwrap();
        let seq = build_by_moments(&spec, 8).unwrap();
        let rec = build_by_recursion(&op, 8, Some(&seq)).unwrap();
        assert!(compare_routes(&seq.polys, &rec.polys) < 1e-10);
        let res: Vec<(usize, usize)> = rec.report.resonances.clone();
        for n in 1..=8usize {
            assert!(res.contains(&(n, n - 1)), "missing resonance at ({n}, {})", n - 1);
        }
        assert!(rec.report.eigen_residuals.iter().all(|r| *r < 1e-14));
    }

    #[test]
    fn family2_resonates_two_steps_down() {
        let spec = WeightSpec::F2 {
            alpha: 0.5,
            b: 0.4,
        };
        let op = spec.operator().unwrap();
        let seq = build_by_moments(&spec, 6).unwrap();
        let rec = build_by_recursion(&op, 6, Some(&seq)).unwrap();
        assert!(compare_routes(&seq.polys, &rec.polys) < 1e-10);
        for n in 2..=6usize {
            assert!(rec.report.resonances.contains(&(n, n - 2)));
        }
        assert!(!rec.report.resonances.iter().any(|&(n, k)| k + 1 == n));
    }

    #[test]
    fn family3_recursion_is_resonance_free() {
        let spec = WeightSpec::F3 { beta: 4.0 };
        let op = spec.operator().unwrap();
        let rec = build_by_recursion(&op, 8, None).unwrap();
        assert!(rec.report.resonances.is_empty());
        assert!(rec
            .report
            .cells
            .iter()
            .all(|c| c.f_tag == SolveTag::Unique && c.g_tag == SolveTag::Unique));
        // Resonance-free means no completion was needed: the recursion
        // alone must already satisfy the eigenvalue equation.
        assert!(rec.report.eigen_residuals.iter().all(|r| *r < 1e-14));
    }

    #[test]
    fn resonant_shift_matrix_matches_hand_computation() {
        // family1(0,1,1), n = 1, k = 0: mu_1 I - Delta_0 = [[0,0],[-1,-1]].
        let op = f1_default().operator().unwrap();
        let d0 = op.delta(0);
        let mu1 = op.eigenvalue(1).unwrap().mu;
        let m = CMat2::scalar(mu1) - d0;
        assert!((m - CMat2::from_real([[0.0, 0.0], [-1.0, -1.0]])).norm_inf() < 1e-14);
    }

    #[test]
    fn recurrence_from_coeffs_matches_gram_route() {
        let seq = build_by_moments(&f1_default(), 7).unwrap();
        let (a_list, b_list) = recurrence_from_coeffs(&seq.polys);
        assert_eq!(a_list.len(), 6);
        assert_eq!(b_list.len(), 7);
        for n in 0..7 {
            assert!((b_list[n] - seq.b[n]).norm_inf() < 1e-9, "B_{n}");
            if n >= 1 {
                assert!((a_list[n - 1] - seq.a[n - 1]).norm_inf() < 1e-9, "A_{n}");
            }
        }
    }

    #[test]
    fn favard_package_holds_with_structural_identities() {
        let spec = f1_default();
        let op = spec.operator().unwrap();
        let seq = build_by_moments(&spec, 6).unwrap();
        let report = favard_check(&seq, Some(&op));
        assert!(report.pass(1e-10), "{report:?}");
        // Degree-zero identity by hand: s22 nu_0 = 1 * 1 and
        // (mu_0 - lambda_0) conj(s12) = 1 * 1.
        assert!(report.nun_residuals[0] < 1e-14);
        // v21 = -1 is forced by v = 1 and S_0 = [[3,1],[1,1]].
        assert!(report.v21_residual.unwrap() < 1e-14);
    }

    #[test]
    fn congruence_transforms_covariantly() {
        // MOPs of M* W M are M^{-1} P_n M.
        let spec = f1_default();
        let n = 4;
        let base = build_by_moments(&spec, n).unwrap();
        let m = CMat2::new([
            [
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(0.5, 0.25),
            ],
            [
                num_complex::Complex64::new(0.0, -0.5),
                num_complex::Complex64::new(2.0, 0.0),
            ],
        ]);
        let minv = m.inverse().unwrap();
        let table = MomentTable::new(&spec, n).unwrap().conjugated(&m);
        let transformed = build_from_table(table, n).unwrap();
        for deg in 0..=n {
            for k in 0..=deg {
                let want = minv * base.polys[deg].coeffs[k] * m;
                let got = transformed.polys[deg].coeffs[k];
                assert!(
                    (want - got).norm_inf() < 1e-9,
                    "degree {deg} coeff {k}"
                );
            }
        }
    }

    #[test]
    fn degree_caps_are_enforced() {
        let table = MomentTable::new(&f1_default(), 2).unwrap();
        assert!(matches!(
            build_from_table(table.clone(), 3),
            Err(Error::InvalidInput(_))
        ));
        assert_eq!(table.max_degree(), 2);
        assert!(matches!(
            build_by_moments(&f1_default(), MAX_N + 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn moment_table_values_match_weight_moments() {
        let spec = f1_default();
        let table = MomentTable::new(&spec, 2).unwrap();
        for k in 0..table.count() {
            let want = spec.moment(k).unwrap();
            assert!((table.moment(k) - want).norm_inf() < 1e-12 * (1.0 + want.norm_inf()));
        }
    }

    #[test]
    fn recursion_without_completion_drops_free_direction() {
        // With a resonance and xi = 0, the polynomials still satisfy the
        // eigen-equation but differ from the orthogonal sequence.
        let spec = f1_default();
        let op = spec.operator().unwrap();
        let seq = build_by_moments(&spec, 3).unwrap();
        let rec = build_by_recursion(&op, 3, None).unwrap();
        assert!(rec.report.eigen_residuals.iter().all(|r| *r < 1e-14));
        assert!(compare_routes(&seq.polys, &rec.polys) > 1e-4);
    }
}
