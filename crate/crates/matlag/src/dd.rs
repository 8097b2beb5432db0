//! Double-double arithmetic: each value is an unevaluated sum `hi + lo` of
//! two `f64`s, giving roughly 31 significant decimal digits.
//!
//! Moment matrices of Laguerre-type weights form Hankel-like systems whose
//! conditioning grows factorially with the degree (about `1e9` by degree
//! ten), so orthogonalizing in plain `f64` loses eight to ten digits before
//! any result reaches the caller.  The moment tables, Gram–Schmidt sweeps,
//! and coefficient recursions therefore run in double-double internally and
//! round to `f64` only at the public boundary, where the documented `1e-8`
//! tolerances then hold with orders of magnitude to spare.
//!
//! The algorithms are the classical error-free transformations: `two_sum`,
//! `quick_two_sum`, and an FMA-based `two_prod`.  Transcendentals use
//! argument reduction plus short Taylor tails; the Gamma function uses the
//! cancellation-free Stirling series above `z = 30` together with the
//! downward recurrence, keeping relative errors near double-double
//! roundoff for every argument this crate needs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// A double-double number: the exact sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// ln 2 to double-double accuracy.
pub(crate) const LN2: Dd = Dd {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

/// pi to double-double accuracy.
pub(crate) const PI: Dd = Dd {
    hi: 3.141_592_653_589_793,
    lo: 1.224_646_799_147_353_2e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires `|a| >= |b|` (or `a == 0`).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn ldexp(self, n: i32) -> Dd {
        let f = 2.0f64.powi(n);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        // One Newton step on an f64 seed recovers full precision (Karp).
        let x = 1.0 / self.hi.sqrt();
        let ax = Dd::from_f64(self.hi * x);
        let err = self - ax * ax;
        ax + Dd::from_f64(err.hi * (x * 0.5))
    }

    pub fn exp(self) -> Dd {
        if self.hi < -709.0 {
            return Dd::ZERO;
        }
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        // exp(x) = 2^m * exp(r)^(2^9) with r = (x - m ln 2) / 2^9.
        let m = (self.hi / LN2.hi).round();
        let r = (self - LN2 * m).ldexp(-9);
        // Taylor series for exp(r) - 1; |r| <= ln2/1024 so it converges fast.
        // Divisions use exact double-double reciprocals: an f64-rounded 1/i
        // would cap the whole function at ~1e-17 relative accuracy.
        let mut p = r * r * 0.5;
        let mut s = r + p;
        let mut i = 3.0f64;
        loop {
            p = p * r / i;
            s = s + p;
            if p.hi.abs() < 1e-35 || i > 24.0 {
                break;
            }
            i += 1.0;
        }
        // exp(2x) - 1 = 2 s + s^2 with s = exp(x) - 1, applied 9 times.
        for _ in 0..9 {
            s = s * 2.0 + s * s;
        }
        (s + 1.0).ldexp(m as i32)
    }

    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "ln of non-positive double-double");
        // Newton iteration y <- y + x e^{-y} - 1 from an f64 seed; each step
        // doubles the correct digits, so two steps reach full precision.
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..3 {
            y = y + self * (-y).exp() - 1.0;
        }
        y
    }

    /// `self^p` for `self > 0`.
    pub fn powf(self, p: Dd) -> Dd {
        if p.hi == 0.0 && p.lo == 0.0 {
            return Dd::ONE;
        }
        (p * self.ln()).exp()
    }

    pub fn cosh(self) -> Dd {
        let e = self.exp();
        (e + e.recip()) * 0.5
    }

    pub fn sinh(self) -> Dd {
        if self.hi.abs() < 0.05 {
            // exp(x) - exp(-x) cancels near zero; the odd Taylor series keeps
            // full relative accuracy there.
            let x2 = self * self;
            let mut term = self;
            let mut s = self;
            let mut i = 1.0f64;
            while i < 20.0 {
                term = term * x2 / ((2.0 * i) * (2.0 * i + 1.0));
                s = s + term;
                if term.hi.abs() < 1e-40 {
                    break;
                }
                i += 1.0;
            }
            s
        } else {
            let e = self.exp();
            (e - e.recip()) * 0.5
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}{:+.3e}", self.hi, self.lo)
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Dd) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        // Normalization makes (hi, lo) lexicographic order the numeric order.
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e + q3)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        self + Dd::from_f64(b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self + Dd::from_f64(-b)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }
}

/// Bernoulli numbers `B_2, B_4, ..., B_34` as exact `(numerator,
/// denominator)` pairs; every numerator is below `2^53` and hence exact.
const BERNOULLI: [(f64, f64); 17] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
];

/// Threshold above which the Stirling series is applied directly; smaller
/// arguments are lifted there with the recurrence `Gamma(z) = Gamma(z+1)/z`.
const STIRLING_CUT: f64 = 30.0;

static HALF_LN_2PI: OnceLock<Dd> = OnceLock::new();

/// ln Gamma(z) for `z >= STIRLING_CUT` by the Stirling asymptotic series.
///
/// At `z = 30` the terms of the Bernoulli tail fall below `1e-33` after
/// about fourteen terms and the series has no internal cancellation, unlike
/// Spouge-type expansions whose coefficient sums lose several digits.
fn ln_gamma_stirling(z: Dd) -> Dd {
    let half_ln_2pi = *HALF_LN_2PI.get_or_init(|| (PI * 2.0).ln() * 0.5);
    let mut s = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let z2 = z * z;
    let mut zp = z; // z^{2n-1}
    for (n, &(num, den)) in BERNOULLI.iter().enumerate() {
        let k = 2.0 * (n as f64 + 1.0);
        let term = Dd::from_f64(num) / (Dd::from_f64(den * k * (k - 1.0)) * zp);
        s = s + term;
        if term.hi.abs() < 1e-36 * s.hi.abs() {
            break;
        }
        zp = zp * z2;
    }
    s
}

/// Gamma(z) for `z > 0`, accurate to a few units in the last double-double
/// place (relative error below `1e-28` for the exponents this crate uses,
/// all inside `(0, 80)`).
pub(crate) fn gamma_dd(z: Dd) -> Dd {
    debug_assert!(z.hi > 0.0, "gamma_dd requires a positive argument");
    // Lift small arguments with Gamma(z) = Gamma(z + m) / (z (z+1) ...).
    let mut p = Dd::ONE;
    let mut zz = z;
    while zz.hi < STIRLING_CUT {
        p = p * zz;
        zz = zz + 1.0;
    }
    ln_gamma_stirling(zz).exp() / p
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Double-double results should agree with high-precision reference
    /// values to a few units in the last place.  Gamma is the weakest link:
    /// its logarithm is computed to absolute accuracy ~1e-30 and then
    /// exponentiated, so the relative error can reach ~1e-29.
    const DD_TOL: f64 = 1e-28;

    fn assert_dd_close(got: Dd, want_hi: f64, want_lo: f64) {
        let want = Dd::new(want_hi, want_lo);
        let diff = (got - want).to_f64().abs();
        let scale = want.to_f64().abs().max(1.0);
        assert!(
            diff <= DD_TOL * scale,
            "got {got}, want {want}, rel diff {}",
            diff / scale
        );
    }

    #[test]
    fn add_and_mul_track_exact_small_integers() {
        let a = Dd::from_f64(1e17) + 0.25;
        let b = a - 1e17;
        assert_eq!(b.to_f64(), 0.25);
        let c = Dd::from_f64(3.0) * Dd::from_f64(7.0);
        assert_eq!(c.hi, 21.0);
        assert_eq!(c.lo, 0.0);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Dd::new(1.0 / 3.0, 1.8503717077085942e-17);
        let b = Dd::from_f64(97.0);
        let q = a * b / b;
        assert_dd_close(q, a.hi, a.lo);
    }

    #[test]
    fn sqrt_of_pi_matches_reference() {
        assert_dd_close(PI.sqrt(), 1.772_453_850_905_516, -7.666_586_499_825_799e-17);
    }

    #[test]
    fn exp_one_matches_reference() {
        // e to double-double accuracy.
        assert_dd_close(
            Dd::ONE.exp(),
            2.718_281_828_459_045,
            1.445_646_891_729_250_2e-16,
        );
    }

    #[test]
    fn ln_inverts_exp() {
        for &x in &[1e-3, 0.7, 1.0, 2.5, 40.0, 300.0] {
            let d = Dd::from_f64(x);
            assert_dd_close(d.exp().ln(), d.hi, d.lo);
        }
    }

    #[test]
    fn powf_agrees_with_repeated_product() {
        let x = Dd::from_f64(1.7);
        let a = x * x * x * x * x;
        let b = x.powf(Dd::from_f64(5.0));
        assert_dd_close(b, a.hi, a.lo);
    }

    #[test]
    fn hyperbolic_identity_holds() {
        for &x in &[1e-8, 1e-3, 0.04, 0.3, 2.0, 10.0] {
            let d = Dd::from_f64(x);
            let c = d.cosh();
            let s = d.sinh();
            let one = c * c - s * s;
            // The subtraction amplifies roundoff by cosh^2(x).
            let amp = (c * c).to_f64().max(1.0);
            let err = (one - Dd::ONE).to_f64().abs();
            assert!(err < DD_TOL * amp, "x = {x}: err {err}");
        }
    }

    #[test]
    fn sinh_small_argument_keeps_relative_accuracy() {
        let x = Dd::from_f64(1e-9);
        let s = x.sinh();
        // sinh(x) = x + x^3/6 + ...; the cubic term is 1.67e-28.
        let expect = Dd::from_f64(1e-9) + Dd::from_f64(1e-27) / 6.0;
        let rel = ((s - expect) / expect).to_f64().abs();
        assert!(rel < 1e-25, "rel {rel}");
    }

    #[test]
    fn gamma_matches_reference_values() {
        // Reference hi/lo pairs computed with 50-digit arithmetic.
        assert_dd_close(
            gamma_dd(Dd::from_f64(5.5)),
            52.342_777_784_553_52,
            1.253_980_383_551_158_6e-15,
        );
        assert_dd_close(
            gamma_dd(Dd::from_f64(10.3)),
            716_430.689_062_376_4,
            1.641_409_919_496_974e-11,
        );
        assert_dd_close(
            gamma_dd(Dd::from_f64(1.7)),
            0.908_638_732_853_290_4,
            -1.264_200_906_171_626_8e-18,
        );
        assert_dd_close(
            gamma_dd(Dd::from_f64(0.1)),
            9.513_507_698_668_73,
            7.024_723_067_503_411e-16,
        );
    }

    #[test]
    fn gamma_recurrence_holds() {
        let z = Dd::from_f64(3.25);
        let lhs = gamma_dd(z + 1.0);
        let rhs = gamma_dd(z) * z;
        assert_dd_close(lhs, rhs.hi, rhs.lo);
    }

    #[test]
    fn gamma_integer_values_are_factorials() {
        let mut factorial = 1.0f64;
        for n in 1..10 {
            if n > 1 {
                factorial *= (n - 1) as f64;
            }
            assert_dd_close(gamma_dd(Dd::from_f64(n as f64)), factorial, 0.0);
        }
    }
}
