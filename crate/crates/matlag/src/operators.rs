//! Laguerre-type 2x2 matrix differential operators
//! `D = t I d^2 + (C - t U) d - V` and their action on matrix polynomials.
//!
//! Operators act on row vectors of polynomials; coefficient matrices
//! multiply polynomial coefficients from the left, eigenvalue matrices
//! from the right: a monic orthogonal sequence satisfies
//! `D P_n = P_n Delta_n` with
//!
//! ```text
//! Delta_n = -n U - V = [[lambda_n, 0], [nu_n, mu_n]]   (lower triangular)
//! ```
//!
//! when `U` and `V` are lower triangular.  The module provides the three
//! canonical families the classifier targets, the four raw constructor
//! families that parametrize all irreducible solutions before gauge
//! normalization, and the two gauge moves themselves (conjugation by a
//! constant matrix and rescaling of time).
//!
//! Conventions for the canonical families, with `W` the matching weight:
//!
//! - `family1(alpha, beta, b)`: `C = diag(alpha+beta+1, alpha+1)`,
//!   `U = [[1,0],[b(beta-2),1]]`, `V = [[1,0],[-b(alpha+1),0]]`;
//!   domain `alpha > -1`, `beta > -1-alpha`, `b != 0`.
//! - `family2(alpha, b)`: `C = diag(alpha+5, alpha+1)`,
//!   `U = [[1,0],[4b(alpha+2),1]]`, `V = [[2,0],[-2b(alpha+2)(alpha+1),0]]`;
//!   domain `alpha > -1`, `0 < |b| < 1`.
//! - `family3(beta)`: `C = [[3/2, beta/4],[0, 1/2]]`, `U = [[1,0],[-1,1]]`,
//!   `V = [[1/2,0],[-1/2,0]]`; domain `beta > 0`.

use crate::cmat::CMat2;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Entries are considered zero when below this tolerance relative to the
/// matrix scale (used by triangularity checks).
pub const TRIANGULAR_TOL: f64 = 1e-12;

/// The operator `D = t I d^2 + (C - t U) d - V`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagOperator {
    #[serde(rename = "C")]
    pub c: CMat2,
    #[serde(rename = "U")]
    pub u: CMat2,
    #[serde(rename = "V")]
    pub v: CMat2,
}

/// The three entries of the lower-triangular eigenvalue matrix `Delta_n`.
#[derive(Clone, Copy, Debug)]
pub struct EigTriple {
    pub n: usize,
    /// `-n u_11 - v_11`.
    pub lambda: Complex64,
    /// `-n u_22`.
    pub mu: Complex64,
    /// `-n u_21 - v_21`.
    pub nu: Complex64,
}

impl EigTriple {
    /// Assemble `Delta_n` as a matrix.
    pub fn matrix(&self) -> CMat2 {
        CMat2::new([
            [self.lambda, Complex64::ZERO],
            [self.nu, self.mu],
        ])
    }
}

fn domain_err(msg: String) -> Error {
    Error::ParameterOutOfDomain(msg)
}

impl LagOperator {
    pub fn new(c: CMat2, u: CMat2, v: CMat2) -> LagOperator {
        LagOperator { c, u, v }
    }

    /// Two-exponent canonical family.
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] naming the violated constraint when
    /// `alpha <= -1`, `beta <= -1 - alpha`, or `b == 0`.
    pub fn family1(alpha: f64, beta: f64, b: f64) -> Result<LagOperator> {
        if alpha <= -1.0 {
            return Err(domain_err(format!(
                "family1 requires alpha > -1 (got alpha = {alpha})"
            )));
        }
        if beta <= -1.0 - alpha {
            return Err(domain_err(format!(
                "family1 requires beta > -1 - alpha (got beta = {beta}, alpha = {alpha})"
            )));
        }
        if b == 0.0 {
            return Err(domain_err("family1 requires b != 0".into()));
        }
        Ok(LagOperator::new(
            CMat2::from_real([[alpha + beta + 1.0, 0.0], [0.0, alpha + 1.0]]),
            CMat2::from_real([[1.0, 0.0], [b * (beta - 2.0), 1.0]]),
            CMat2::from_real([[1.0, 0.0], [-b * (alpha + 1.0), 0.0]]),
        ))
    }

    /// Quartic canonical family.
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] when `alpha <= -1` or `|b|` is not
    /// strictly between 0 and 1.
    pub fn family2(alpha: f64, b: f64) -> Result<LagOperator> {
        if alpha <= -1.0 {
            return Err(domain_err(format!(
                "family2 requires alpha > -1 (got alpha = {alpha})"
            )));
        }
        if b == 0.0 || b.abs() >= 1.0 {
            return Err(domain_err(format!(
                "family2 requires 0 < |b| < 1 (got b = {b})"
            )));
        }
        let a2 = alpha + 2.0;
        Ok(LagOperator::new(
            CMat2::from_real([[alpha + 5.0, 0.0], [0.0, alpha + 1.0]]),
            CMat2::from_real([[1.0, 0.0], [4.0 * b * a2, 1.0]]),
            CMat2::from_real([[2.0, 0.0], [-2.0 * b * a2 * (alpha + 1.0), 0.0]]),
        ))
    }

    /// Hyperbolic canonical family.
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] when `beta <= 0`.
    pub fn family3(beta: f64) -> Result<LagOperator> {
        if beta <= 0.0 {
            return Err(domain_err(format!(
                "family3 requires beta > 0 (got beta = {beta})"
            )));
        }
        Ok(LagOperator::new(
            CMat2::from_real([[1.5, beta / 4.0], [0.0, 0.5]]),
            CMat2::from_real([[1.0, 0.0], [-1.0, 1.0]]),
            CMat2::from_real([[0.5, 0.0], [-0.5, 0.0]]),
        ))
    }

    /// Raw family with `V = diag(u, 0) = u E_11` and nilpotent coupling in
    /// `U` (the `v = u` constraint class).
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] when `u <= 0`, `c22 <= 0`,
    /// `c21 u == c22`, or `c22 <= 2 c21 u / (c22 - c21 u)`.
    pub fn raw_v_eq_u(u: f64, c21: f64, c22: f64) -> Result<LagOperator> {
        if u <= 0.0 {
            return Err(domain_err(format!("raw_v_eq_u requires u > 0 (got {u})")));
        }
        if c22 <= 0.0 {
            return Err(domain_err(format!(
                "raw_v_eq_u requires c22 > 0 (got {c22})"
            )));
        }
        if (c21 * u - c22).abs() < TRIANGULAR_TOL * (1.0 + c22.abs()) {
            return Err(domain_err(
                "raw_v_eq_u requires c21 u != c22".into(),
            ));
        }
        if c22 <= 2.0 * c21 * u / (c22 - c21 * u) {
            return Err(domain_err(format!(
                "raw_v_eq_u requires c22 > 2 c21 u / (c22 - c21 u) \
                 (got c21 = {c21}, c22 = {c22}, u = {u})"
            )));
        }
        let c11 = c22 + 2.0 + 2.0 * c22 / (u * c21 - c22);
        Ok(LagOperator::new(
            CMat2::from_real([[c11, 0.0], [c21, c22]]),
            CMat2::from_real([[u, 0.0], [1.0, u]]),
            CMat2::from_real([[u, 0.0], [0.0, 0.0]]),
        ))
    }

    /// Raw family with `V = diag(2u, 0)` (the `v = 2u` constraint class).
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] when `u <= 0` or `c21 <= 0`.
    pub fn raw_v_eq_2u(u: f64, c21: f64) -> Result<LagOperator> {
        if u <= 0.0 {
            return Err(domain_err(format!("raw_v_eq_2u requires u > 0 (got {u})")));
        }
        if c21 <= 0.0 {
            return Err(domain_err(format!(
                "raw_v_eq_2u requires c21 > 0 (got {c21})"
            )));
        }
        Ok(LagOperator::new(
            CMat2::from_real([[c21 * u + 4.0, 0.0], [c21, c21 * u]]),
            CMat2::from_real([[u, 0.0], [1.0, u]]),
            CMat2::from_real([[2.0 * u, 0.0], [0.0, 0.0]]),
        ))
    }

    /// Raw family with `V = diag(u/2, 0)` (the `v = u/2` constraint class);
    /// the only raw family with a nonzero upper-right entry of `C`.
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] when `u <= 0` or `c22 <= 1/2`.
    pub fn raw_v_eq_half_u(u: f64, c22: f64) -> Result<LagOperator> {
        if u <= 0.0 {
            return Err(domain_err(format!(
                "raw_v_eq_half_u requires u > 0 (got {u})"
            )));
        }
        if c22 <= 0.5 {
            return Err(domain_err(format!(
                "raw_v_eq_half_u requires c22 > 1/2 (got {c22})"
            )));
        }
        Ok(LagOperator::new(
            CMat2::from_real([
                [2.0 - c22, u * (1.0 - 2.0 * c22) / 2.0],
                [(2.0 * c22 - 3.0) / (2.0 * u), c22],
            ]),
            CMat2::from_real([[u, 0.0], [1.0, u]]),
            CMat2::from_real([[u / 2.0, 0.0], [0.0, 0.0]]),
        ))
    }

    /// Raw family with scalar `U = u I`; `c21` may be complex.
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] when `u <= 0` or `c22 <= 0`.
    pub fn raw_scalar_u(u: f64, c21: Complex64, c22: f64) -> Result<LagOperator> {
        if u <= 0.0 {
            return Err(domain_err(format!(
                "raw_scalar_u requires u > 0 (got {u})"
            )));
        }
        if c22 <= 0.0 {
            return Err(domain_err(format!(
                "raw_scalar_u requires c22 > 0 (got {c22})"
            )));
        }
        Ok(LagOperator::new(
            CMat2::new([
                [Complex64::new(c22 + 2.0, 0.0), Complex64::ZERO],
                [c21, Complex64::new(c22, 0.0)],
            ]),
            CMat2::from_real([[u, 0.0], [0.0, u]]),
            CMat2::from_real([[u, 0.0], [0.0, 0.0]]),
        ))
    }

    /// `Delta_n = -n U - V`, the eigenvalue matrix of degree `n`.
    pub fn delta(&self, n: usize) -> CMat2 {
        -(self.u.scale_re(n as f64) + self.v)
    }

    /// The eigenvalue triple `(lambda_n, mu_n, nu_n)` of `Delta_n`.
    ///
    /// # Errors
    ///
    /// [`Error::NotLowerTriangular`] when `U` or `V` has a nonzero
    /// upper-right entry, in which case `Delta_n` is not triangular and
    /// the triple is not defined.
    pub fn eigenvalue(&self, n: usize) -> Result<EigTriple> {
        if !self.u.is_lower_triangular(TRIANGULAR_TOL) {
            return Err(Error::NotLowerTriangular(format!(
                "U has U[1][2] = {}",
                self.u.e[0][1]
            )));
        }
        if !self.v.is_lower_triangular(TRIANGULAR_TOL) {
            return Err(Error::NotLowerTriangular(format!(
                "V has V[1][2] = {}",
                self.v.e[0][1]
            )));
        }
        let nf = n as f64;
        Ok(EigTriple {
            n,
            lambda: -self.u.e[0][0] * nf - self.v.e[0][0],
            mu: -self.u.e[1][1] * nf,
            nu: -self.u.e[1][0] * nf - self.v.e[1][0],
        })
    }

    /// Apply `D` to a matrix polynomial.
    ///
    /// Coefficient `j` of `D P` is
    /// `(j+1)(C + jI) T_{j+1} - (j U + V) T_j`.
    pub fn apply(&self, p: &MatPoly) -> MatPoly {
        let deg = p.degree();
        let mut out = vec![CMat2::zero(); deg + 1];
        for (j, slot) in out.iter_mut().enumerate() {
            let jf = j as f64;
            let mut acc = CMat2::zero();
            if j + 1 <= deg {
                let lead = self.c + CMat2::scalar(Complex64::new(jf, 0.0));
                acc = acc + (lead * p.coeffs[j + 1]).scale_re(jf + 1.0);
            }
            acc = acc - (self.u.scale_re(jf) + self.v) * p.coeffs[j];
            *slot = acc;
        }
        MatPoly::new(out)
    }

    /// Conjugated operator `M^{-1} D M` (coefficientwise on `C`, `U`, `V`).
    ///
    /// # Errors
    ///
    /// [`Error::SingularMatrix`] when `M` is not invertible.
    pub fn conjugate(&self, m: &CMat2) -> Result<LagOperator> {
        let mi = m.inverse()?;
        Ok(LagOperator::new(
            mi * self.c * *m,
            mi * self.u * *m,
            mi * self.v * *m,
        ))
    }

    /// Time rescaling `t = u_scale x`: divides `U` and `V` by `u_scale`
    /// and leaves `C` unchanged.
    ///
    /// # Errors
    ///
    /// [`Error::ParameterOutOfDomain`] when `u_scale <= 0`.
    pub fn rescale_time(&self, u_scale: f64) -> Result<LagOperator> {
        if u_scale <= 0.0 {
            return Err(domain_err(format!(
                "rescale_time requires u_scale > 0 (got {u_scale})"
            )));
        }
        Ok(LagOperator::new(
            self.c,
            self.u.scale_re(1.0 / u_scale),
            self.v.scale_re(1.0 / u_scale),
        ))
    }

    /// Shift `V` by a multiple of the identity: `(C, U, V - s I)`.
    pub fn shift_v(&self, s: Complex64) -> LagOperator {
        LagOperator::new(self.c, self.u, self.v - CMat2::scalar(s))
    }

    /// Largest coefficient norm, used for relative tolerances.
    pub fn norm_inf(&self) -> f64 {
        self.c
            .norm_inf()
            .max(self.u.norm_inf())
            .max(self.v.norm_inf())
    }
}

/// A matrix polynomial `P(t) = sum_k T_k t^k`, coefficients low-to-high.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatPoly {
    pub coeffs: Vec<CMat2>,
}

impl MatPoly {
    pub fn new(coeffs: Vec<CMat2>) -> MatPoly {
        assert!(!coeffs.is_empty(), "a polynomial has at least one coefficient");
        MatPoly { coeffs }
    }

    /// The monomial `t^n I`.
    pub fn monomial(n: usize) -> MatPoly {
        let mut coeffs = vec![CMat2::zero(); n + 1];
        coeffs[n] = CMat2::identity();
        MatPoly::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Leading coefficient equals the identity to within `tol`.
    pub fn is_monic(&self, tol: f64) -> bool {
        (self.coeffs[self.degree()] - CMat2::identity()).norm_inf() <= tol
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, t: f64) -> CMat2 {
        let mut acc = CMat2::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale_re(t) + *c;
        }
        acc
    }

    /// Multiply by `t` (shift coefficients up by one degree).
    pub fn times_t(&self) -> MatPoly {
        let mut coeffs = vec![CMat2::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k + 1] = *c;
        }
        MatPoly::new(coeffs)
    }

    /// Multiply every coefficient by `m` on the right.
    pub fn mul_right(&self, m: &CMat2) -> MatPoly {
        MatPoly::new(self.coeffs.iter().map(|c| *c * *m).collect())
    }

    pub fn sub(&self, o: &MatPoly) -> MatPoly {
        let len = self.coeffs.len().max(o.coeffs.len());
        let mut coeffs = vec![CMat2::zero(); len];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            let a = self.coeffs.get(k).copied().unwrap_or_else(CMat2::zero);
            let b = o.coeffs.get(k).copied().unwrap_or_else(CMat2::zero);
            *slot = a - b;
        }
        MatPoly::new(coeffs)
    }

    /// Largest coefficient norm.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.norm_inf())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn family1_eigenvalue_matrix_at_degree_one() {
        let op = LagOperator::family1(0.0, 1.0, 1.0).unwrap();
        let want = CMat2::from_real([[-2.0, 0.0], [2.0, -1.0]]);
        assert!((op.delta(1) - want).norm_inf() < TOL);
        let trip = op.eigenvalue(1).unwrap();
        assert!((trip.matrix() - want).norm_inf() < TOL);
    }

    #[test]
    fn constructors_reject_out_of_domain_parameters() {
        assert!(matches!(
            LagOperator::family1(-1.5, 1.0, 1.0),
            Err(Error::ParameterOutOfDomain(_))
        ));
        assert!(LagOperator::family1(0.0, -1.5, 1.0).is_err());
        assert!(LagOperator::family1(0.0, 1.0, 0.0).is_err());
        assert!(LagOperator::family2(0.0, 1.0).is_err());
        assert!(LagOperator::family2(0.0, 0.0).is_err());
        assert!(LagOperator::family3(0.0).is_err());
        assert!(LagOperator::raw_v_eq_2u(-1.0, 1.0).is_err());
        assert!(LagOperator::raw_v_eq_half_u(1.0, 0.5).is_err());
    }

    #[test]
    fn domain_error_names_the_violated_constraint() {
        let err = LagOperator::family1(-2.0, 1.0, 1.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha > -1"), "message was: {msg}");
    }

    #[test]
    fn eigenvalue_requires_lower_triangular_coefficients() {
        let op = LagOperator::family3(1.0).unwrap();
        // C may be upper triangular; only U and V matter.
        assert!(op.eigenvalue(2).is_ok());
        let rot = CMat2::from_real([[1.0, 1.0], [0.0, 1.0]]);
        let conj = op.conjugate(&rot).unwrap();
        assert!(matches!(
            conj.eigenvalue(2),
            Err(Error::NotLowerTriangular(_))
        ));
    }

    #[test]
    fn apply_on_linear_monomial_matches_closed_form() {
        let op = LagOperator::family1(0.5, 2.0, -0.5).unwrap();
        let dp = op.apply(&MatPoly::monomial(1));
        // D (t I) = C - t (U + V).
        assert!((dp.coeffs[0] - op.c).norm_inf() < TOL);
        assert!((dp.coeffs[1] + (op.u + op.v)).norm_inf() < TOL);
    }

    #[test]
    fn degree_one_polynomial_satisfies_its_eigen_equation() {
        // P_1 = t I + T_0 with T_0 = [[-3, -1/2], [1, -1/2]] is the monic
        // degree-one orthogonal polynomial for family1(0, 1, 1).
        let op = LagOperator::family1(0.0, 1.0, 1.0).unwrap();
        let p1 = MatPoly::new(vec![
            CMat2::from_real([[-3.0, -0.5], [1.0, -0.5]]),
            CMat2::identity(),
        ]);
        let lhs = op.apply(&p1);
        let delta = op.delta(1);
        let rhs = MatPoly::new(vec![p1.coeffs[0] * delta, delta]);
        assert!(lhs.sub(&rhs).coeff_norm() < TOL);
    }

    #[test]
    fn conjugation_roundtrips() {
        let op = LagOperator::family2(0.5, 0.4).unwrap();
        let m = CMat2::from_real([[2.0, 1.0], [-0.5, 1.5]]);
        let back = op
            .conjugate(&m)
            .unwrap()
            .conjugate(&m.inverse().unwrap())
            .unwrap();
        assert!((back.c - op.c).norm_inf() < TOL);
        assert!((back.u - op.u).norm_inf() < TOL);
        assert!((back.v - op.v).norm_inf() < TOL);
    }

    #[test]
    fn rescale_time_divides_u_and_v() {
        let op = LagOperator::family1(0.0, 3.0, 0.7).unwrap();
        let scaled = op.rescale_time(2.0).unwrap();
        assert!((scaled.u - op.u.scale_re(0.5)).norm_inf() < TOL);
        assert!((scaled.v - op.v.scale_re(0.5)).norm_inf() < TOL);
        assert!((scaled.c - op.c).norm_inf() < TOL);
        assert!(op.rescale_time(0.0).is_err());
        assert!(op.rescale_time(-1.0).is_err());
    }

    #[test]
    fn raw_scalar_u_accepts_complex_coupling() {
        let c21 = Complex64::new(0.3, -0.4);
        let op = LagOperator::raw_scalar_u(2.0, c21, 1.5).unwrap();
        assert_eq!(op.c.e[1][0], c21);
        assert!((op.u - CMat2::scalar(Complex64::new(2.0, 0.0))).norm_inf() < TOL);
    }

    #[test]
    fn operator_json_roundtrip() {
        let op = LagOperator::family3(2.5).unwrap();
        let text = serde_json::to_string(&op).unwrap();
        assert!(text.contains("\"C\""));
        let back: LagOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(op, back);
    }

    #[test]
    fn matpoly_eval_and_times_t() {
        let p = MatPoly::new(vec![
            CMat2::from_real([[1.0, 0.0], [0.0, 2.0]]),
            CMat2::identity(),
        ]);
        let at3 = p.eval(3.0);
        assert!((at3 - CMat2::from_real([[4.0, 0.0], [0.0, 5.0]])).norm_inf() < TOL);
        let tp = p.times_t();
        assert_eq!(tp.degree(), 2);
        assert!((tp.eval(3.0) - at3.scale_re(3.0)).norm_inf() < TOL);
    }
}
