//! Irreducibility probes: commutant algebras of a weight and of its
//! orthogonal-polynomial data.
//!
//! A matrix weight `W` reduces to scalar weights when a constant
//! similarity splits it: `W = M diag(w_1, w_2) M*` with scalar `w_i`.
//! Two computable commutants detect this:
//!
//! * **Weight commutant** ([`weight_commutant`]): the real vector space
//!   `{ T : W(t_i) T = T* W(t_i) }` over a sample grid.  Since `W` is
//!   Hermitian, `T = c I` with real `c` always solves, so the dimension
//!   is at least one.  Dimension one is conclusive irreducibility
//!   evidence over the sampled points; higher dimension means
//!   reducibility cannot be excluded by this probe (the samples see a
//!   common Hermitian structure).  The space is only *real*-linear
//!   because the defining equation conjugates `T` on one side.
//! * **Polynomial commutant** ([`mop_commutant`]): the complex vector
//!   space `{ T : T T_k^n = T_k^n T }` over all monic coefficient
//!   matrices up to degree `N`.  The monic orthogonal polynomials of a
//!   reduced weight are simultaneously block-diagonalized, so a
//!   commutant beyond multiples of the identity is a reducibility
//!   verdict for the polynomial data itself.
//!
//! Both probes are conjugation-covariant: replacing `W` by `M* W M` maps
//! the commutant to `M^{-1} (.) M`, preserving its dimension.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmat::CMat2;
use crate::error::{Error, Result};
use crate::linalg::{complex_nullspace_vec, real_nullspace};
use crate::mops::MOPSequence;
use crate::weights::WeightSpec;

/// Fewest weight samples accepted: two points can be matched by
/// coincidence, three already over-determine a 2x2 commutant candidate.
pub const MIN_WEIGHT_SAMPLES: usize = 3;

/// Smallest polynomial degree accepted by [`mop_commutant`].
pub const MIN_MOP_DEGREE: usize = 2;

/// Which algebra a report describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    Weight,
    Mops,
}

/// Commutant dimension verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutantVerdict {
    /// Only real multiples of the identity commute: irreducible as far
    /// as this probe can see.
    ScalarOnly,
    /// A nontrivial commutant exists.
    NonScalar,
}

/// Computed commutant basis with its interpretation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CommutantReport {
    pub kind: ProbeKind,
    /// Real dimension for the weight probe, complex dimension for the
    /// polynomial probe.
    pub dimension: usize,
    /// Basis of the commutant; the identity leads whenever it belongs to
    /// the space (always, for the weight probe).
    pub basis: Vec<CMat2>,
    pub verdict: CommutantVerdict,
    /// Sample points (weight probe) or empty (polynomial probe).
    pub samples: Vec<f64>,
}

impl CommutantReport {
    /// One-line reading of the verdict in the probe's own terms.
    pub fn interpretation(&self) -> &'static str {
        match (self.kind, self.verdict) {
            (ProbeKind::Weight, CommutantVerdict::ScalarOnly) => {
                "weight commutant is trivial: irreducible over the sampled points"
            }
            (ProbeKind::Weight, CommutantVerdict::NonScalar) => {
                "weight commutant is nontrivial: reducibility not excluded"
            }
            (ProbeKind::Mops, CommutantVerdict::ScalarOnly) => {
                "polynomial commutant is trivial: coefficient data is irreducible"
            }
            (ProbeKind::Mops, CommutantVerdict::NonScalar) => {
                "polynomial commutant is nontrivial: the polynomial data reduces"
            }
        }
    }
}

/// Six sample points log-spaced across `[0.3, 30]`.
pub fn default_samples() -> Vec<f64> {
    let (lo, hi) = (0.3f64, 30.0f64);
    (0..6)
        .map(|i| lo * (hi / lo).powf(i as f64 / 5.0))
        .collect()
}

/// Real-linear commutant `{ T : W(t_i) T = T* W(t_i) }` of a weight over
/// sample points.
///
/// # Errors
///
/// [`Error::InvalidInput`] with fewer than [`MIN_WEIGHT_SAMPLES`]
/// samples; weight evaluation errors otherwise.
///
/// # Examples
///
/// ```
/// use matlag::reduce::{default_samples, weight_commutant, CommutantVerdict};
/// use matlag::weights::WeightSpec;
/// let spec = WeightSpec::F3 { beta: 4.0 };
/// let report = weight_commutant(&spec, &default_samples()).unwrap();
/// assert_eq!(report.verdict, CommutantVerdict::ScalarOnly);
/// ```
pub fn weight_commutant(spec: &WeightSpec, samples: &[f64]) -> Result<CommutantReport> {
    if samples.len() < MIN_WEIGHT_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "weight commutant needs at least {MIN_WEIGHT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let mut values = Vec::with_capacity(samples.len());
    for &t in samples {
        values.push(spec.eval(t)?.w);
    }
    Ok(weight_commutant_from_values(&values, samples))
}

/// The probe on explicit weight values (shared with covariance tests,
/// where samples of `M* W M` have no named spec).
pub(crate) fn weight_commutant_from_values(
    values: &[CMat2],
    samples: &[f64],
) -> CommutantReport {
    // Assemble the real-linear map T -> W T - T* W column by column: the
    // unknown is x = (Re t00, Im t00, ..., Re t11, Im t11).
    let rows = 8 * values.len();
    let mut a = DMatrix::<f64>::zeros(rows, 8);
    for col in 0..8 {
        let unit = unit_matrix(col);
        for (si, w) in values.iter().enumerate() {
            let r = *w * unit - unit.adjoint() * *w;
            for i in 0..2 {
                for j in 0..2 {
                    let row = 8 * si + 4 * i + 2 * j;
                    a[(row, col)] = r.e[i][j].re;
                    a[(row + 1, col)] = r.e[i][j].im;
                }
            }
        }
    }
    let null = real_nullspace(&a);
    let dimension = null.len();
    let raw: Vec<CMat2> = null.iter().map(|v| mat_from_real8(v.as_slice())).collect();
    let basis = identity_first_basis(&raw);
    CommutantReport {
        kind: ProbeKind::Weight,
        dimension,
        basis,
        verdict: if dimension == 1 {
            CommutantVerdict::ScalarOnly
        } else {
            CommutantVerdict::NonScalar
        },
        samples: samples.to_vec(),
    }
}

/// Complex-linear commutant `{ T : T T_k^n = T_k^n T }` of all monic
/// coefficient matrices of a sequence.
///
/// # Errors
///
/// [`Error::InvalidInput`] when the sequence has degree below
/// [`MIN_MOP_DEGREE`].
pub fn mop_commutant(seq: &MOPSequence) -> Result<CommutantReport> {
    if seq.n_max < MIN_MOP_DEGREE {
        return Err(Error::InvalidInput(format!(
            "polynomial commutant needs degree >= {MIN_MOP_DEGREE}, got {}",
            seq.n_max
        )));
    }
    // Leading coefficients are the identity; only lower ones constrain.
    let mut coeffs = Vec::new();
    for n in 0..=seq.n_max {
        for k in 0..n {
            coeffs.push(seq.polys[n].coeffs[k]);
        }
    }
    let rows = 4 * coeffs.len();
    let mut a = DMatrix::<Complex64>::zeros(rows, 4);
    for col in 0..4 {
        let unit = complex_unit_matrix(col);
        for (ci, tk) in coeffs.iter().enumerate() {
            let r = unit * *tk - *tk * unit;
            for i in 0..2 {
                for j in 0..2 {
                    a[(4 * ci + 2 * i + j, col)] = r.e[i][j];
                }
            }
        }
    }
    let null = complex_nullspace_vec(&a);
    let dimension = null.len();
    let raw: Vec<CMat2> = null
        .iter()
        .map(|v| {
            CMat2::new([[v[0], v[1]], [v[2], v[3]]])
        })
        .collect();
    let basis = identity_first_basis(&raw);
    Ok(CommutantReport {
        kind: ProbeKind::Mops,
        dimension,
        basis,
        verdict: if dimension == 1 {
            CommutantVerdict::ScalarOnly
        } else {
            CommutantVerdict::NonScalar
        },
        samples: Vec::new(),
    })
}

/// The `col`-th real unit direction as a complex matrix: even indices are
/// real parts, odd are imaginary, row-major.
fn unit_matrix(col: usize) -> CMat2 {
    let mut m = CMat2::zero();
    let entry = col / 2;
    let (i, j) = (entry / 2, entry % 2);
    m.e[i][j] = if col % 2 == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    m
}

fn complex_unit_matrix(col: usize) -> CMat2 {
    let mut m = CMat2::zero();
    m.e[col / 2][col % 2] = Complex64::new(1.0, 0.0);
    m
}

fn mat_from_real8(v: &[f64]) -> CMat2 {
    CMat2::new([
        [
            Complex64::new(v[0], v[1]),
            Complex64::new(v[2], v[3]),
        ],
        [
            Complex64::new(v[4], v[5]),
            Complex64::new(v[6], v[7]),
        ],
    ])
}

/// Re-express a commutant basis so the identity (which the SVD scatters
/// across its orthonormal vectors) leads, followed by unit-norm
/// directions orthogonal to it.  Falls back to the raw basis when the
/// identity is not in the span.
fn identity_first_basis(raw: &[CMat2]) -> Vec<CMat2> {
    if raw.is_empty() {
        return Vec::new();
    }
    let dot = |a: &CMat2, b: &CMat2| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                s += a.e[i][j].conj() * b.e[i][j];
            }
        }
        s
    };
    let norm = |a: &CMat2| dot(a, a).re.sqrt();
    let id = CMat2::identity();
    // Projection of the identity onto the span.
    let mut proj = CMat2::zero();
    for b in raw {
        let nb = norm(b);
        if nb > 0.0 {
            let bn = b.scale(Complex64::new(1.0 / nb, 0.0));
            proj = proj + bn.scale(dot(&bn, &id));
        }
    }
    if (proj - id).norm_inf() > 1e-8 {
        return raw.to_vec();
    }
    let mut basis = vec![id];
    let id_unit = id.scale(Complex64::new(1.0 / norm(&id), 0.0));
    let mut ortho = vec![id_unit];
    for b in raw {
        let mut r = *b;
        for o in &ortho {
            r = r - o.scale(dot(o, &r));
        }
        let nr = norm(&r);
        if nr > 1e-8 {
            let rn = r.scale(Complex64::new(1.0 / nr, 0.0));
            ortho.push(rn);
            basis.push(rn);
        }
        if basis.len() == raw.len() {
            break;
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mops::build_by_moments;

    #[test]
    fn canonical_weights_have_trivial_commutant() {
        let specs = [
            WeightSpec::F1 {
                alpha: 0.0,
                beta: 1.0,
                b: 1.0,
            },
            WeightSpec::F2 { alpha: 0.5, b: 0.4 },
            WeightSpec::F3 { beta: 4.0 },
        ];
        for spec in specs {
            let report = weight_commutant(&spec, &default_samples()).unwrap();
            assert_eq!(report.verdict, CommutantVerdict::ScalarOnly, "{spec}");
            assert_eq!(report.dimension, 1);
            assert!((report.basis[0] - CMat2::identity()).norm_inf() < 1e-9);
        }
    }

    #[test]
    fn distinct_diagonal_weight_is_flagged() {
        let spec = WeightSpec::DiagLaguerre {
            alpha1: 0.5,
            alpha2: 1.5,
        };
        let report = weight_commutant(&spec, &default_samples()).unwrap();
        assert_eq!(report.verdict, CommutantVerdict::NonScalar);
        // Independent real scalings of the two diagonal blocks.
        assert_eq!(report.dimension, 2);
        assert!((report.basis[0] - CMat2::identity()).norm_inf() < 1e-9);
    }

    #[test]
    fn mop_commutant_is_trivial_for_canonical_families() {
        for spec in [
            WeightSpec::F1 {
                alpha: 0.0,
                beta: 1.0,
                b: 1.0,
            },
            WeightSpec::F3 { beta: 0.5 },
        ] {
            let seq = build_by_moments(&spec, 4).unwrap();
            let report = mop_commutant(&seq).unwrap();
            assert_eq!(report.verdict, CommutantVerdict::ScalarOnly, "{spec}");
            assert_eq!(report.dimension, 1);
        }
    }

    #[test]
    fn diagonal_weight_polynomials_reduce() {
        let spec = WeightSpec::DiagLaguerre {
            alpha1: 0.5,
            alpha2: 1.5,
        };
        let seq = build_by_moments(&spec, 4).unwrap();
        let report = mop_commutant(&seq).unwrap();
        assert_eq!(report.verdict, CommutantVerdict::NonScalar);
        // Complex diagonal matrices commute with diagonal coefficients.
        assert_eq!(report.dimension, 2);
    }

    #[test]
    fn equal_scalar_diagonal_weight_has_full_commutant() {
        let spec = WeightSpec::DiagLaguerre {
            alpha1: 1.0,
            alpha2: 1.0,
        };
        let seq = build_by_moments(&spec, 4).unwrap();
        let report = mop_commutant(&seq).unwrap();
        assert_eq!(report.dimension, 4);
    }

    #[test]
    fn weight_commutant_is_conjugation_covariant() {
        let spec = WeightSpec::DiagLaguerre {
            alpha1: 0.5,
            alpha2: 1.5,
        };
        let m = CMat2::new([
            [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.3)],
            [Complex64::new(-0.2, 0.1), Complex64::new(1.5, 0.0)],
        ]);
        let samples = default_samples();
        let base = weight_commutant(&spec, &samples).unwrap();
        let values: Vec<CMat2> = samples
            .iter()
            .map(|&t| {
                let w = spec.eval(t).unwrap().w;
                m.adjoint() * w * m
            })
            .collect();
        let conj = weight_commutant_from_values(&values, &samples);
        assert_eq!(conj.dimension, base.dimension);
        assert_eq!(conj.verdict, base.verdict);
        // Each transported basis element M^{-1} B M lies in the
        // conjugated commutant: W' (M^{-1} B M) is Hermitian.
        let minv = m.inverse().unwrap();
        for b in &base.basis {
            let t = minv * *b * m;
            for w in &values {
                let r = *w * t - t.adjoint() * *w;
                assert!(r.norm_inf() < 1e-9 * (1.0 + w.norm_inf()));
            }
        }
    }

    #[test]
    fn input_size_gates() {
        let spec = WeightSpec::F3 { beta: 4.0 };
        assert!(weight_commutant(&spec, &[1.0, 2.0]).is_err());
        let seq = build_by_moments(&spec, 1).unwrap();
        assert!(mop_commutant(&seq).is_err());
    }
}
