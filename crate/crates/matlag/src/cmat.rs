//! Complex 2x2 matrices: the concrete matrix type of the public API.
//!
//! Everything user-facing in this crate (operator coefficients, weight
//! values, Gram matrices, recurrence coefficients) is a [`CMat2`].  The
//! type is a plain value with row-major entries, standard operator
//! overloads, and the handful of decompositions a 2x2 problem needs in
//! closed form.  JSON serialization writes the four entries row-major as
//! `[re, im]` pairs.

use crate::error::{Error, Result};
use crate::num::{Cx, GMat2, Real};
use num_complex::Complex64;
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Relative determinant threshold below which a matrix is reported singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// A 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CMat2 {
    pub e: [[Complex64; 2]; 2],
}

impl CMat2 {
    pub fn new(e: [[Complex64; 2]; 2]) -> CMat2 {
        CMat2 { e }
    }

    /// Build from real entries `[[a, b], [c, d]]`.
    pub fn from_real(r: [[f64; 2]; 2]) -> CMat2 {
        CMat2 {
            e: [
                [Complex64::new(r[0][0], 0.0), Complex64::new(r[0][1], 0.0)],
                [Complex64::new(r[1][0], 0.0), Complex64::new(r[1][1], 0.0)],
            ],
        }
    }

    pub fn zero() -> CMat2 {
        CMat2::from_real([[0.0, 0.0], [0.0, 0.0]])
    }

    pub fn identity() -> CMat2 {
        CMat2::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    /// `s * I`.
    pub fn scalar(s: Complex64) -> CMat2 {
        CMat2::new([
            [s, Complex64::ZERO],
            [Complex64::ZERO, s],
        ])
    }

    pub fn diag(a: Complex64, d: Complex64) -> CMat2 {
        CMat2::new([
            [a, Complex64::ZERO],
            [Complex64::ZERO, d],
        ])
    }

    pub fn scale(&self, s: Complex64) -> CMat2 {
        let mut m = *self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] *= s;
            }
        }
        m
    }

    pub fn scale_re(&self, s: f64) -> CMat2 {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat2 {
        CMat2::new([
            [self.e[0][0].conj(), self.e[1][0].conj()],
            [self.e[0][1].conj(), self.e[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> CMat2 {
        CMat2::new([
            [self.e[0][0], self.e[1][0]],
            [self.e[0][1], self.e[1][1]],
        ])
    }

    pub fn det(&self) -> Complex64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    /// Row-sum (infinity) norm.
    pub fn norm_inf(&self) -> f64 {
        let r0 = self.e[0][0].norm() + self.e[0][1].norm();
        let r1 = self.e[1][0].norm() + self.e[1][1].norm();
        r0.max(r1)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max(self.e[i][j].norm());
            }
        }
        m
    }

    /// Inverse by the adjugate formula.
    ///
    /// # Errors
    ///
    /// Returns [`Error::SingularMatrix`] when `|det|` is at most
    /// [`SINGULAR_TOL`] times `max(1, norm_inf^2)`.
    pub fn inverse(&self) -> Result<CMat2> {
        let d = self.det();
        let scale = self.norm_inf();
        if d.norm() <= SINGULAR_TOL * 1.0f64.max(scale * scale) {
            return Err(Error::SingularMatrix(format!(
                "inverse: |det| = {:.3e} with norm {:.3e}",
                d.norm(),
                scale
            )));
        }
        let inv = Complex64::new(1.0, 0.0) / d;
        Ok(CMat2::new([
            [self.e[1][1] * inv, -self.e[0][1] * inv],
            [-self.e[1][0] * inv, self.e[0][0] * inv],
        ]))
    }

    /// Solve `self * X = rhs`.
    ///
    /// # Errors
    ///
    /// Same singularity condition as [`CMat2::inverse`].
    pub fn solve(&self, rhs: &CMat2) -> Result<CMat2> {
        Ok(self.inverse()? * *rhs)
    }

    /// `||A - A*||_inf`, the deviation from being Hermitian.
    pub fn hermitian_residual(&self) -> f64 {
        (*self - self.adjoint()).norm_inf()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol * (1.0 + self.norm_inf())
    }

    /// Hermitian within `tol` and with both leading principal minors
    /// exceeding `tol`.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let m1 = self.e[0][0].re;
        let m2 = self.det().re;
        m1 > tol && m2 > tol
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        self.e[0][1].norm() <= tol * (1.0 + self.norm_inf())
    }

    /// Singular values `(largest, smallest)`.
    pub fn singular_values(&self) -> (f64, f64) {
        let p: f64 = self
            .e
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum();
        let q = self.det().norm_sqr();
        let disc = (p * p - 4.0 * q).max(0.0).sqrt();
        (((p + disc) * 0.5).sqrt(), ((p - disc) * 0.5).max(0.0).sqrt())
    }

    pub(crate) fn to_gmat<R: Real>(self) -> GMat2<R> {
        let c = |z: Complex64| Cx::<R>::from_f64s(z.re, z.im);
        GMat2::new([
            [c(self.e[0][0]), c(self.e[0][1])],
            [c(self.e[1][0]), c(self.e[1][1])],
        ])
    }

    pub(crate) fn from_gmat<R: Real>(g: GMat2<R>) -> CMat2 {
        let c = |x: Cx<R>| Complex64::new(x.re.to_f64(), x.im.to_f64());
        CMat2::new([
            [c(g.e[0][0]), c(g.e[0][1])],
            [c(g.e[1][0]), c(g.e[1][1])],
        ])
    }
}

impl Add for CMat2 {
    type Output = CMat2;
    fn add(self, o: CMat2) -> CMat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] += o.e[i][j];
            }
        }
        m
    }
}

impl Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, o: CMat2) -> CMat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] -= o.e[i][j];
            }
        }
        m
    }
}

impl Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, o: CMat2) -> CMat2 {
        let mut m = CMat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[i][0] * o.e[0][j] + self.e[i][1] * o.e[1][j];
            }
        }
        m
    }
}

impl Neg for CMat2 {
    type Output = CMat2;
    fn neg(self) -> CMat2 {
        self.scale_re(-1.0)
    }
}

impl fmt::Display for CMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn entry(z: Complex64) -> String {
            if z.im == 0.0 {
                format!("{:.12}", z.re)
            } else {
                format!("{:.12}{:+.12}i", z.re, z.im)
            }
        }
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            entry(self.e[0][0]),
            entry(self.e[0][1]),
            entry(self.e[1][0]),
            entry(self.e[1][1])
        )
    }
}

impl Serialize for CMat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // Row-major [re, im] pairs: [[re00, im00], [re01, im01], ...].
        let mut seq = s.serialize_seq(Some(4))?;
        for i in 0..2 {
            for j in 0..2 {
                seq.serialize_element(&[self.e[i][j].re, self.e[i][j].im])?;
            }
        }
        seq.end()
    }
}

struct CMat2Visitor;

impl<'de> Visitor<'de> for CMat2Visitor {
    type Value = CMat2;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a sequence of four [re, im] pairs, row-major")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<CMat2, A::Error> {
        let mut m = CMat2::zero();
        for k in 0..4 {
            let pair: [f64; 2] = seq
                .next_element()?
                .ok_or_else(|| de::Error::invalid_length(k, &self))?;
            m.e[k / 2][k % 2] = Complex64::new(pair[0], pair[1]);
        }
        if seq.next_element::<[f64; 2]>()?.is_some() {
            return Err(de::Error::invalid_length(5, &self));
        }
        Ok(m)
    }
}

impl<'de> Deserialize<'de> for CMat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<CMat2, D::Error> {
        d.deserialize_seq(CMat2Visitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-14;

    #[test]
    fn inverse_of_moment_like_matrix() {
        let m = CMat2::from_real([[3.0, 1.0], [1.0, 1.0]]);
        let inv = m.inverse().expect("invertible");
        let want = CMat2::from_real([[0.5, -0.5], [-0.5, 1.5]]);
        assert!((inv - want).norm_inf() < TOL);
        assert!((m * inv - CMat2::identity()).norm_inf() < TOL);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = CMat2::from_real([[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(m.inverse(), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn near_singular_matrix_is_rejected_relative_to_scale() {
        // det = 1e-4, norm ~ 1e4: relatively singular even though |det| is
        // far above the absolute threshold.
        let m = CMat2::from_real([[1e4, 1e4], [1e4 - 1e-8, 1e4]]);
        assert!(m.inverse().is_err());
    }

    #[test]
    fn positive_definiteness_checks_minors_and_hermiticity() {
        let pd = CMat2::new([
            [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.5)],
            [Complex64::new(0.5, -0.5), Complex64::new(1.0, 0.0)],
        ]);
        assert!(pd.is_positive_definite(1e-12));
        let indef = CMat2::from_real([[1.0, 3.0], [3.0, 1.0]]);
        assert!(!indef.is_positive_definite(1e-12));
        let non_herm = CMat2::from_real([[1.0, 0.5], [0.0, 1.0]]);
        assert!(!non_herm.is_positive_definite(1e-12));
    }

    #[test]
    fn singular_values_match_norm_and_det() {
        let m = CMat2::from_real([[3.0, 1.0], [1.0, 1.0]]);
        let (smax, smin) = m.singular_values();
        assert!((smax * smin - m.det().norm()).abs() < 1e-12);
        assert!((smax.powi(2) + smin.powi(2) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip_preserves_entries() {
        let m = CMat2::new([
            [Complex64::new(1.5, -2.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(-0.25, 0.0), Complex64::new(3.0, 4.0)],
        ]);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "[[1.5,-2.0],[0.0,1.0],[-0.25,0.0],[3.0,4.0]]");
        let back: CMat2 = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn dd_conversion_roundtrips() {
        let m = CMat2::from_real([[0.1, -7.25], [3.0, 0.0]]);
        let back = CMat2::from_gmat(m.to_gmat::<crate::dd::Dd>());
        assert_eq!(m, back);
    }
}
