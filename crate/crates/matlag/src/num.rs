//! Generic scalar layer shared by the `f64` and double-double code paths.
//!
//! Weight evaluation, quadrature, and orthogonalization are written once
//! against the [`Real`] trait and instantiated at both precisions: `f64`
//! for the public API and diagnostics, [`Dd`](crate::dd::Dd) for the
//! ill-conditioned moment pipeline.  On top of the trait sit a minimal
//! complex type [`Cx`], a 2x2 complex matrix [`GMat2`], a column vector
//! [`CVec2`], and second-order jets ([`RJet`], [`CJet`]) used to evaluate
//! weights together with their first two derivatives exactly.

use crate::dd::Dd;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real scalar abstraction over `f64` and double-double.
pub(crate) trait Real:
    Copy
    + PartialOrd
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn powf(self, p: Self) -> Self;
    fn cosh(self) -> Self;
    fn sinh(self) -> Self;
    /// Unit roundoff of the representation.
    fn epsilon() -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> f64 {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    fn powf(self, p: f64) -> f64 {
        f64::powf(self, p)
    }
    fn cosh(self) -> f64 {
        f64::cosh(self)
    }
    fn sinh(self) -> f64 {
        f64::sinh(self)
    }
    fn epsilon() -> f64 {
        f64::EPSILON
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Dd {
        Dd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn sqrt(self) -> Dd {
        Dd::sqrt(self)
    }
    fn exp(self) -> Dd {
        Dd::exp(self)
    }
    fn powf(self, p: Dd) -> Dd {
        Dd::powf(self, p)
    }
    fn cosh(self) -> Dd {
        Dd::cosh(self)
    }
    fn sinh(self) -> Dd {
        Dd::sinh(self)
    }
    fn epsilon() -> f64 {
        // 2^-104, the effective unit roundoff of double-double.
        4.93e-32
    }
}

/// Complex number over a generic real scalar.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Cx<R: Real> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cx<R> {
    pub fn new(re: R, im: R) -> Cx<R> {
        Cx { re, im }
    }

    pub fn real(re: R) -> Cx<R> {
        Cx {
            re,
            im: R::zero(),
        }
    }

    pub fn zero() -> Cx<R> {
        Cx::real(R::zero())
    }

    pub fn one() -> Cx<R> {
        Cx::real(R::one())
    }

    pub fn from_f64s(re: f64, im: f64) -> Cx<R> {
        Cx::new(R::from_f64(re), R::from_f64(im))
    }

    pub fn conj(self) -> Cx<R> {
        Cx::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> R {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> R {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: R) -> Cx<R> {
        Cx::new(self.re * s, self.im * s)
    }
}

impl<R: Real> Add for Cx<R> {
    type Output = Cx<R>;
    fn add(self, b: Cx<R>) -> Cx<R> {
        Cx::new(self.re + b.re, self.im + b.im)
    }
}

impl<R: Real> Sub for Cx<R> {
    type Output = Cx<R>;
    fn sub(self, b: Cx<R>) -> Cx<R> {
        Cx::new(self.re - b.re, self.im - b.im)
    }
}

impl<R: Real> Mul for Cx<R> {
    type Output = Cx<R>;
    fn mul(self, b: Cx<R>) -> Cx<R> {
        Cx::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl<R: Real> Neg for Cx<R> {
    type Output = Cx<R>;
    fn neg(self) -> Cx<R> {
        Cx::new(-self.re, -self.im)
    }
}

impl<R: Real> Div for Cx<R> {
    type Output = Cx<R>;
    fn div(self, b: Cx<R>) -> Cx<R> {
        let d = b.norm_sqr();
        let n = self * b.conj();
        Cx::new(n.re / d, n.im / d)
    }
}

/// Column vector in C^2.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CVec2<R: Real> {
    pub x: [Cx<R>; 2],
}

impl<R: Real> CVec2<R> {
    pub fn new(a: Cx<R>, b: Cx<R>) -> CVec2<R> {
        CVec2 { x: [a, b] }
    }

    pub fn zero() -> CVec2<R> {
        CVec2::new(Cx::zero(), Cx::zero())
    }

    pub fn sub(self, o: CVec2<R>) -> CVec2<R> {
        CVec2::new(self.x[0] - o.x[0], self.x[1] - o.x[1])
    }

    pub fn scale(self, s: Cx<R>) -> CVec2<R> {
        CVec2::new(self.x[0] * s, self.x[1] * s)
    }

    pub fn norm_inf(self) -> f64 {
        self.x[0].abs().to_f64().max(self.x[1].abs().to_f64())
    }
}

/// 2x2 complex matrix over a generic real scalar, row-major.
#[derive(Clone, Copy, Debug)]
pub(crate) struct GMat2<R: Real> {
    pub e: [[Cx<R>; 2]; 2],
}

impl<R: Real> GMat2<R> {
    pub fn new(e: [[Cx<R>; 2]; 2]) -> GMat2<R> {
        GMat2 { e }
    }

    pub fn zero() -> GMat2<R> {
        GMat2::new([[Cx::zero(); 2]; 2])
    }

    pub fn identity() -> GMat2<R> {
        let mut m = GMat2::zero();
        m.e[0][0] = Cx::one();
        m.e[1][1] = Cx::one();
        m
    }

    pub fn add(self, o: GMat2<R>) -> GMat2<R> {
        let mut m = GMat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[i][j] + o.e[i][j];
            }
        }
        m
    }

    pub fn sub(self, o: GMat2<R>) -> GMat2<R> {
        let mut m = GMat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[i][j] - o.e[i][j];
            }
        }
        m
    }

    pub fn mul(self, o: GMat2<R>) -> GMat2<R> {
        let mut m = GMat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[i][0] * o.e[0][j] + self.e[i][1] * o.e[1][j];
            }
        }
        m
    }

    pub fn matvec(self, v: CVec2<R>) -> CVec2<R> {
        CVec2::new(
            self.e[0][0] * v.x[0] + self.e[0][1] * v.x[1],
            self.e[1][0] * v.x[0] + self.e[1][1] * v.x[1],
        )
    }

    pub fn neg(self) -> GMat2<R> {
        GMat2::zero().sub(self)
    }

    pub fn scale_c(self, s: Cx<R>) -> GMat2<R> {
        let mut m = GMat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[i][j] * s;
            }
        }
        m
    }

    pub fn scale_r(self, s: R) -> GMat2<R> {
        self.scale_c(Cx::real(s))
    }

    pub fn adjoint(self) -> GMat2<R> {
        GMat2::new([
            [self.e[0][0].conj(), self.e[1][0].conj()],
            [self.e[0][1].conj(), self.e[1][1].conj()],
        ])
    }

    pub fn det(self) -> Cx<R> {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Inverse by the adjugate formula; `None` when the determinant is zero
    /// to working precision relative to the entry scale.
    pub fn inverse(self) -> Option<GMat2<R>> {
        let d = self.det();
        let scale = self.max_abs();
        if d.abs().to_f64() <= 1e4 * R::epsilon() * scale * scale {
            return None;
        }
        let inv = Cx::one() / d;
        Some(GMat2::new([
            [self.e[1][1] * inv, -self.e[0][1] * inv],
            [-self.e[1][0] * inv, self.e[0][0] * inv],
        ]))
    }

    /// Row-sum (infinity) norm.
    pub fn norm_inf(self) -> f64 {
        let r0 = self.e[0][0].abs().to_f64() + self.e[0][1].abs().to_f64();
        let r1 = self.e[1][0].abs().to_f64() + self.e[1][1].abs().to_f64();
        r0.max(r1)
    }

    /// Largest entry modulus, as f64.
    pub fn max_abs(self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max(self.e[i][j].abs().to_f64());
            }
        }
        m
    }

    pub fn set_column(&mut self, j: usize, v: CVec2<R>) {
        self.e[0][j] = v.x[0];
        self.e[1][j] = v.x[1];
    }
}

/// Solve the dense complex system `A X = B` in place by Gaussian
/// elimination with partial pivoting; on return `b` holds `X`.  `a` is
/// `n x n` (row-major), `b` is `n` rows of however many columns.  Returns
/// `None` when a pivot falls below working precision relative to the
/// initial entry scale.
pub(crate) fn lu_solve<R: Real>(a: &mut [Vec<Cx<R>>], b: &mut [Vec<Cx<R>>]) -> Option<()> {
    let n = a.len();
    let mut scale = 0.0f64;
    for row in a.iter() {
        for z in row {
            scale = scale.max(z.abs().to_f64());
        }
    }
    let pivot_floor = 1e3 * R::epsilon() * scale.max(1.0);
    for k in 0..n {
        let mut p = k;
        let mut best = a[k][k].abs().to_f64();
        for (r, row) in a.iter().enumerate().skip(k + 1) {
            let m = row[k].abs().to_f64();
            if m > best {
                best = m;
                p = r;
            }
        }
        if best <= pivot_floor {
            return None;
        }
        if p != k {
            a.swap(k, p);
            b.swap(k, p);
        }
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for j in k..n {
                a[r][j] = a[r][j] - f * a[k][j];
            }
            for c in 0..b[r].len() {
                b[r][c] = b[r][c] - f * b[k][c];
            }
        }
    }
    for k in (0..n).rev() {
        for c in 0..b[k].len() {
            let mut s = b[k][c];
            for j in k + 1..n {
                s = s - a[k][j] * b[j][c];
            }
            b[k][c] = s / a[k][k];
        }
    }
    Some(())
}

/// Singular values (largest, smallest) of a 2x2 complex matrix, in `f64`.
pub(crate) fn singular_values2<R: Real>(m: &GMat2<R>) -> (f64, f64) {
    let mut p = 0.0f64; // Frobenius norm squared = sigma1^2 + sigma2^2
    for i in 0..2 {
        for j in 0..2 {
            p += m.e[i][j].norm_sqr().to_f64();
        }
    }
    let q = m.det().norm_sqr().to_f64(); // (sigma1 sigma2)^2
    let disc = (p * p - 4.0 * q).max(0.0).sqrt();
    let smax = ((p + disc) * 0.5).sqrt();
    let smin = ((p - disc) * 0.5).max(0.0).sqrt();
    (smax, smin)
}

/// Second-order jet of a real-valued function of `t`: value and first two
/// derivatives, propagated exactly through arithmetic and elementary
/// functions.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RJet<R: Real> {
    pub v: R,
    pub d1: R,
    pub d2: R,
}

impl<R: Real> RJet<R> {
    pub fn constant(v: R) -> RJet<R> {
        RJet {
            v,
            d1: R::zero(),
            d2: R::zero(),
        }
    }

    /// The identity jet `t`.
    pub fn var(t: R) -> RJet<R> {
        RJet {
            v: t,
            d1: R::one(),
            d2: R::zero(),
        }
    }

    pub fn add(self, o: RJet<R>) -> RJet<R> {
        RJet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }

    pub fn sub(self, o: RJet<R>) -> RJet<R> {
        RJet {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }

    pub fn mul(self, o: RJet<R>) -> RJet<R> {
        RJet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + R::from_f64(2.0) * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    pub fn div(self, o: RJet<R>) -> RJet<R> {
        let q = self.v / o.v;
        let q1 = (self.d1 - q * o.d1) / o.v;
        let q2 = (self.d2 - R::from_f64(2.0) * q1 * o.d1 - q * o.d2) / o.v;
        RJet {
            v: q,
            d1: q1,
            d2: q2,
        }
    }

    pub fn scale(self, s: R) -> RJet<R> {
        RJet {
            v: self.v * s,
            d1: self.d1 * s,
            d2: self.d2 * s,
        }
    }

    pub fn neg(self) -> RJet<R> {
        self.scale(-R::one())
    }

    pub fn exp(self) -> RJet<R> {
        let e = self.v.exp();
        RJet {
            v: e,
            d1: e * self.d1,
            d2: e * (self.d2 + self.d1 * self.d1),
        }
    }

    /// `self^p` for constant real exponent `p`; requires a positive value.
    pub fn powf(self, p: R) -> RJet<R> {
        let f = self.v.powf(p);
        let f1 = p * self.v.powf(p - R::one());
        let f2 = p * (p - R::one()) * self.v.powf(p - R::from_f64(2.0));
        RJet {
            v: f,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }

    pub fn sqrt(self) -> RJet<R> {
        self.powf(R::from_f64(0.5))
    }

    pub fn cosh(self) -> RJet<R> {
        let c = self.v.cosh();
        let s = self.v.sinh();
        RJet {
            v: c,
            d1: s * self.d1,
            d2: c * self.d1 * self.d1 + s * self.d2,
        }
    }

    pub fn sinh(self) -> RJet<R> {
        let c = self.v.cosh();
        let s = self.v.sinh();
        RJet {
            v: s,
            d1: c * self.d1,
            d2: s * self.d1 * self.d1 + c * self.d2,
        }
    }

    /// Evaluate the polynomial `c0 + c1 x + ... ` at this jet.
    pub fn poly(self, coeffs: &[f64]) -> RJet<R> {
        let mut acc = RJet::constant(R::zero());
        for &c in coeffs.iter().rev() {
            acc = acc.mul(self).add(RJet::constant(R::from_f64(c)));
        }
        acc
    }
}

/// Second-order jet with complex values, built from real jets scaled by
/// complex constants.  Only the linear operations are needed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CJet<R: Real> {
    pub v: Cx<R>,
    pub d1: Cx<R>,
    pub d2: Cx<R>,
}

impl<R: Real> CJet<R> {
    pub fn zero() -> CJet<R> {
        CJet {
            v: Cx::zero(),
            d1: Cx::zero(),
            d2: Cx::zero(),
        }
    }

    pub fn from_real(j: RJet<R>) -> CJet<R> {
        CJet {
            v: Cx::real(j.v),
            d1: Cx::real(j.d1),
            d2: Cx::real(j.d2),
        }
    }

    pub fn add(self, o: CJet<R>) -> CJet<R> {
        CJet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }

    pub fn scale_c(self, c: Cx<R>) -> CJet<R> {
        CJet {
            v: self.v * c,
            d1: self.d1 * c,
            d2: self.d2 * c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-13;

    #[test]
    fn lu_solver_roundtrips_random_system() {
        // 4x4 complex system with a known solution.
        let n = 4;
        let entry = |i: usize, j: usize| {
            Cx::new(
                ((i * 7 + j * 3) % 11) as f64 - 5.0,
                ((i * 5 + j * 2) % 7) as f64 - 3.0,
            )
        };
        let a: Vec<Vec<Cx<f64>>> = (0..n)
            .map(|i| (0..n).map(|j| entry(i, j)).collect())
            .collect();
        let x: Vec<Cx<f64>> = (0..n).map(|i| Cx::new(i as f64 + 0.5, -(i as f64))).collect();
        let mut b: Vec<Vec<Cx<f64>>> = (0..n)
            .map(|i| {
                let mut s = Cx::zero();
                for j in 0..n {
                    s = s + a[i][j] * x[j];
                }
                vec![s]
            })
            .collect();
        let mut a_work = a.clone();
        lu_solve(&mut a_work, &mut b).expect("nonsingular");
        for i in 0..n {
            assert!((b[i][0] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn lu_solver_rejects_singular_system() {
        let row = vec![Cx::<f64>::new(1.0, 0.0), Cx::new(2.0, 0.0)];
        let mut a = vec![row.clone(), row];
        let mut b = vec![vec![Cx::one()], vec![Cx::one()]];
        assert!(lu_solve(&mut a, &mut b).is_none());
    }

    #[test]
    fn complex_division_roundtrips() {
        let a: Cx<f64> = Cx::new(3.0, -2.0);
        let b: Cx<f64> = Cx::new(-1.5, 0.25);
        let q = (a * b) / b;
        assert!((q.re - a.re).abs() < TOL && (q.im - a.im).abs() < TOL);
    }

    #[test]
    fn matrix_inverse_roundtrips() {
        let m: GMat2<f64> = GMat2::new([
            [Cx::new(3.0, 1.0), Cx::new(1.0, 0.0)],
            [Cx::new(0.0, -2.0), Cx::new(1.0, 0.5)],
        ]);
        let inv = m.inverse().expect("well conditioned");
        let p = m.mul(inv).sub(GMat2::identity());
        assert!(p.norm_inf() < TOL);
    }

    #[test]
    fn singular_values_of_diagonal_matrix() {
        let mut m: GMat2<f64> = GMat2::zero();
        m.e[0][0] = Cx::real(5.0);
        m.e[1][1] = Cx::real(-0.5);
        let (smax, smin) = singular_values2(&m);
        assert!((smax - 5.0).abs() < TOL);
        assert!((smin - 0.5).abs() < TOL);
    }

    #[test]
    fn jet_chain_rule_matches_hand_derivatives() {
        // f(t) = e^{-t} t^{3/2}: f' = e^{-t}(1.5 t^{1/2} - t^{3/2}),
        // f'' = e^{-t}(0.75 t^{-1/2} - 3 t^{1/2} + t^{3/2}).
        let t = 1.7f64;
        let jet = RJet::var(t);
        let f = jet.neg().exp().mul(jet.powf(1.5));
        let e = (-t).exp();
        assert!((f.v - e * t.powf(1.5)).abs() < TOL);
        assert!((f.d1 - e * (1.5 * t.sqrt() - t.powf(1.5))).abs() < TOL);
        let d2 = e * (0.75 / t.sqrt() - 3.0 * t.sqrt() + t.powf(1.5));
        assert!((f.d2 - d2).abs() < TOL);
    }

    #[test]
    fn jet_division_matches_product_rule() {
        let t = 0.9f64;
        let jet = RJet::var(t);
        let num = jet.sinh();
        let den = jet.cosh();
        let tanh = num.div(den);
        let th = t.tanh();
        assert!((tanh.v - th).abs() < TOL);
        assert!((tanh.d1 - (1.0 - th * th)).abs() < TOL);
        assert!((tanh.d2 - (-2.0 * th * (1.0 - th * th))).abs() < TOL);
    }

    #[test]
    fn dd_jets_agree_with_f64_jets() {
        let t = 2.3;
        let jf: RJet<f64> = RJet::var(t).neg().exp().mul(RJet::var(t).powf(0.25));
        let jd: RJet<Dd> = RJet::var(Dd::from_f64(t))
            .neg()
            .exp()
            .mul(RJet::var(Dd::from_f64(t)).powf(Dd::from_f64(0.25)));
        assert!((jf.v - jd.v.to_f64()).abs() < 1e-14);
        assert!((jf.d1 - jd.d1.to_f64()).abs() < 1e-14);
        assert!((jf.d2 - jd.d2.to_f64()).abs() < 1e-14);
    }
}
