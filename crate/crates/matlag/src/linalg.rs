//! Spectral helpers for 2x2 complex matrices: eigenvalues in a
//! cancellation-safe form, Jordan-type detection, eigenvectors with a
//! canonical gauge, and numerical nullspaces.
//!
//! The discriminant of a 2x2 matrix is computed as `(a - d)^2 + 4 b c`
//! rather than `tr^2 - 4 det`: the two are equal exactly, but the latter
//! cancels catastrophically when the eigenvalue gap is small compared to
//! the trace, which is precisely the regime the Jordan-type decision has
//! to resolve.

use crate::cmat::CMat2;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Default eigenvalue-gap tolerance for [`jordan_case`], relative to
/// `1 + |lambda_1| + |lambda_2|`.
pub const JORDAN_TOL: f64 = 1e-9;

/// Relative singular-value threshold for rank decisions in [`nullspace`]
/// and the commutant solvers.
pub const RANK_TOL: f64 = 1e-9;

/// How a 2x2 matrix sits relative to its eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanTag {
    /// One repeated eigenvalue, nontrivial nilpotent part.
    NonDiagonalJordan,
    /// A multiple of the identity.
    Scalar,
    /// Two eigenvalues separated by more than the tolerance.
    DistinctEigenvalues,
}

/// Result of [`jordan_case`].
#[derive(Clone, Debug)]
pub struct JordanCase {
    pub tag: JordanTag,
    /// Similarity transform `T` with `T^{-1} M T` in canonical form:
    /// lower-triangular `[[lambda, 0], [1, lambda]]` for the Jordan case
    /// (subdiagonal exactly one), the eigenvector matrix for distinct
    /// eigenvalues, the identity for scalar matrices.
    pub transform: CMat2,
    pub eigenvalues: (Complex64, Complex64),
    /// The discriminant `(a - d)^2 + 4 b c` actually used for the decision.
    pub discriminant: Complex64,
}

/// Eigenvalues of a 2x2 matrix via the cancellation-safe discriminant.
pub fn eigenvalues(m: &CMat2) -> (Complex64, Complex64) {
    let (l1, l2, _) = eigen_with_disc(m);
    (l1, l2)
}

fn eigen_with_disc(m: &CMat2) -> (Complex64, Complex64, Complex64) {
    let a = m.e[0][0];
    let b = m.e[0][1];
    let c = m.e[1][0];
    let d = m.e[1][1];
    let disc = (a - d) * (a - d) + b * c * 4.0;
    let sq = disc.sqrt();
    let mean = (a + d) * 0.5;
    ((mean + sq * 0.5), (mean - sq * 0.5), disc)
}

/// Eigenvector of `m` for eigenvalue `mu`, gauged so that the component at
/// `pref` equals one when that component is not negligible (falling back to
/// the other component otherwise).
///
/// The gauge matters: downstream parameter extraction reads subdiagonal
/// entries of conjugated operators, and an arbitrary eigenvector scaling
/// would smuggle a diagonal gauge factor into those entries.
pub fn eigenvector(m: &CMat2, mu: Complex64, pref: usize) -> [Complex64; 2] {
    let a = m.e[0][0] - mu;
    let b = m.e[0][1];
    let c = m.e[1][0];
    let d = m.e[1][1] - mu;
    // Rows of (M - mu I) are both orthogonal-ish to the eigenvector; pick
    // the larger row for stability.
    let r0 = a.norm() + b.norm();
    let r1 = c.norm() + d.norm();
    let mut v = if r0 >= r1 {
        // a x + b y = 0
        if b.norm() >= a.norm() {
            [b, -a]
        } else {
            [-b, a]
        }
    } else {
        // c x + d y = 0
        if d.norm() >= c.norm() {
            [d, -c]
        } else {
            [-d, c]
        }
    };
    // Degenerate row (scalar matrix): fall back to coordinate vectors.
    let n = v[0].norm() + v[1].norm();
    if n == 0.0 {
        v = if pref == 0 {
            [Complex64::new(1.0, 0.0), Complex64::ZERO]
        } else {
            [Complex64::ZERO, Complex64::new(1.0, 0.0)]
        };
    }
    let n = v[0].norm() + v[1].norm();
    if v[pref].norm() > 1e-8 * n {
        let s = v[pref];
        [v[0] / s, v[1] / s]
    } else {
        let s = v[1 - pref];
        [v[0] / s, v[1] / s]
    }
}

/// Decide whether `m` is scalar, a nontrivial Jordan block, or has two
/// distinct eigenvalues, with gap tolerance `tol * (1 + |l1| + |l2|)`.
pub fn jordan_case(m: &CMat2, tol: f64) -> JordanCase {
    let (l1, l2, disc) = eigen_with_disc(m);
    let scale = 1.0 + l1.norm() + l2.norm();
    let gap = (l1 - l2).norm();
    if gap > tol * scale {
        let v1 = eigenvector(m, l1, 0);
        let v2 = eigenvector(m, l2, 1);
        let transform = CMat2::new([[v1[0], v2[0]], [v1[1], v2[1]]]);
        return JordanCase {
            tag: JordanTag::DistinctEigenvalues,
            transform,
            eigenvalues: (l1, l2),
            discriminant: disc,
        };
    }
    let lambda = (l1 + l2) * 0.5;
    let n = *m - CMat2::scalar(lambda);
    if n.norm_inf() <= tol * scale {
        return JordanCase {
            tag: JordanTag::Scalar,
            transform: CMat2::identity(),
            eigenvalues: (lambda, lambda),
            discriminant: disc,
        };
    }
    // Nontrivial nilpotent part: pick w with the larger image N w, then
    // T = [w | N w] gives the lower-triangular form
    // T^{-1} M T = [[lambda, 0], [1, lambda]] with subdiagonal exactly one.
    let col0 = [n.e[0][0], n.e[1][0]];
    let col1 = [n.e[0][1], n.e[1][1]];
    let n0 = col0[0].norm() + col0[1].norm();
    let n1 = col1[0].norm() + col1[1].norm();
    let (img, w) = if n0 >= n1 {
        (col0, [Complex64::new(1.0, 0.0), Complex64::ZERO])
    } else {
        (col1, [Complex64::ZERO, Complex64::new(1.0, 0.0)])
    };
    let transform = CMat2::new([[w[0], img[0]], [w[1], img[1]]]);
    JordanCase {
        tag: JordanTag::NonDiagonalJordan,
        transform,
        eigenvalues: (lambda, lambda),
        discriminant: disc,
    }
}

/// Orthonormal basis of the (numerical) nullspace of `m`, using singular
/// vectors whose singular values fall below `RANK_TOL` relative to the
/// largest one.
pub fn nullspace(m: &CMat2) -> Vec<[Complex64; 2]> {
    let dm = DMatrix::from_row_slice(
        2,
        2,
        &[m.e[0][0], m.e[0][1], m.e[1][0], m.e[1][1]],
    );
    complex_nullspace(&dm)
}

/// Orthonormal nullspace basis of a 2-column complex matrix via SVD.
pub(crate) fn complex_nullspace(m: &DMatrix<Complex64>) -> Vec<[Complex64; 2]> {
    complex_nullspace_vec(m)
        .into_iter()
        .map(|v| [v[0], v[1]])
        .collect()
}

/// Orthonormal nullspace basis of a general complex matrix via SVD, with
/// relative rank threshold `RANK_TOL`.
pub(crate) fn complex_nullspace_vec(m: &DMatrix<Complex64>) -> Vec<DVector<Complex64>> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= RANK_TOL * smax.max(1e-300) {
            basis.push(vt.row(i).map(|x| x.conj()).transpose());
        }
    }
    // Rectangular systems with fewer rows than columns keep the tail of V
    // (rows of V^T beyond the singular-value count) in the nullspace too.
    for i in svd.singular_values.len()..vt.nrows() {
        basis.push(vt.row(i).map(|x| x.conj()).transpose());
    }
    basis
}

/// Orthonormal nullspace basis of a real matrix via SVD, with relative
/// rank threshold `RANK_TOL`.
pub(crate) fn real_nullspace(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= RANK_TOL * smax.max(1e-300) {
            basis.push(vt.row(i).transpose());
        }
    }
    for i in svd.singular_values.len()..vt.nrows() {
        basis.push(vt.row(i).transpose());
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn eigenvalues_of_triangular_matrix_are_diagonal() {
        let m = CMat2::from_real([[3.0, 0.0], [5.0, -1.0]]);
        let (l1, l2) = eigenvalues(&m);
        assert!((l1 - Complex64::new(3.0, 0.0)).norm() < TOL);
        assert!((l2 - Complex64::new(-1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn jordan_detects_scalar_matrix() {
        let m = CMat2::from_real([[2.5, 0.0], [0.0, 2.5]]);
        let jc = jordan_case(&m, JORDAN_TOL);
        assert_eq!(jc.tag, JordanTag::Scalar);
        assert!((jc.eigenvalues.0 - Complex64::new(2.5, 0.0)).norm() < TOL);
    }

    #[test]
    fn jordan_detects_defective_matrix_and_normalizes_subdiagonal() {
        let m = CMat2::from_real([[1.0, 0.0], [7.0, 1.0]]);
        let jc = jordan_case(&m, JORDAN_TOL);
        assert_eq!(jc.tag, JordanTag::NonDiagonalJordan);
        let t = jc.transform;
        let j = t.inverse().unwrap() * m * t;
        let want = CMat2::from_real([[1.0, 0.0], [1.0, 1.0]]);
        assert!((j - want).norm_inf() < TOL, "got {j}");
    }

    #[test]
    fn jordan_survives_similarity_noise() {
        // Conjugating a defective matrix by a well-conditioned transform
        // splits the numerical eigenvalues by about sqrt(eps); the gap
        // tolerance must still call it a Jordan block.
        let m = CMat2::from_real([[1.0, 0.0], [1.0, 1.0]]);
        let g = CMat2::from_real([[2.0, 1.0], [-1.0, 1.5]]);
        let conj = g.inverse().unwrap() * m * g;
        let jc = jordan_case(&conj, 1e-6);
        assert_eq!(jc.tag, JordanTag::NonDiagonalJordan);
    }

    #[test]
    fn distinct_eigenvector_transform_diagonalizes() {
        let m = CMat2::from_real([[2.0, 1.0], [1.0, -1.0]]);
        let jc = jordan_case(&m, JORDAN_TOL);
        assert_eq!(jc.tag, JordanTag::DistinctEigenvalues);
        let t = jc.transform;
        let d = t.inverse().unwrap() * m * t;
        assert!(d.e[0][1].norm() < 1e-10 && d.e[1][0].norm() < 1e-10);
        assert!((d.e[0][0] - jc.eigenvalues.0).norm() < 1e-10);
        assert!((d.e[1][1] - jc.eigenvalues.1).norm() < 1e-10);
    }

    #[test]
    fn nullspace_of_rank_one_matrix() {
        let m = CMat2::from_real([[1.0, 2.0], [2.0, 4.0]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        let v = ns[0];
        let img0 = m.e[0][0] * v[0] + m.e[0][1] * v[1];
        let img1 = m.e[1][0] * v[0] + m.e[1][1] * v[1];
        assert!(img0.norm() < 1e-12 && img1.norm() < 1e-12);
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn prop_eigen_decomposition_reconstructs(
            a in -5.0f64..5.0, b in -5.0f64..5.0,
            c in -5.0f64..5.0, d in -5.0f64..5.0,
        ) {
            let m = CMat2::from_real([[a, b], [c, d]]);
            let (l1, l2) = eigenvalues(&m);
            // Trace and determinant identities hold regardless of type.
            prop_assert!((l1 + l2 - m.trace()).norm() < 1e-9 * (1.0 + m.norm_inf()));
            prop_assert!((l1 * l2 - m.det()).norm() < 1e-9 * (1.0 + m.norm_inf().powi(2)));
        }
    }
}
