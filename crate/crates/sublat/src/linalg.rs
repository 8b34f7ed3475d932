//! Internal dense linear-algebra helpers: Hermiticity checks, deterministic
//! phase conventions, orthonormal-basis completion, submatrix selection.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub(crate) fn max_abs_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn max_abs_r(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Check `m` equals its conjugate transpose within `rel_tol * max(1, max|m|)`.
pub(crate) fn check_hermitian(m: &DMatrix<Complex64>, rel_tol: f64) -> Result<()> {
    let tol = rel_tol * max_abs_c(m).max(1.0);
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > tol {
                return Err(Error::NotHermitian { i, j, dev, tol });
            }
        }
    }
    Ok(())
}

/// Check antisymmetry of a complex matrix within `rel_tol * max(1, max|m|)`.
pub(crate) fn check_antisymmetric_c(m: &DMatrix<Complex64>, rel_tol: f64) -> Result<()> {
    let tol = rel_tol * max_abs_c(m).max(1.0);
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if (m[(i, j)] + m[(j, i)]).norm() > tol {
                return Err(Error::NotAntisymmetric { i, j });
            }
        }
    }
    Ok(())
}

/// Multiply a complex column by a phase so its largest-magnitude entry is
/// real positive. Ties go to the lowest index. Zero columns are left alone.
pub(crate) fn phase_fix(col: &mut DVector<Complex64>) {
    let mut imax = 0;
    let mut best = 0.0f64;
    for (i, z) in col.iter().enumerate() {
        let a = z.norm();
        if a > best {
            best = a;
            imax = i;
        }
    }
    if best == 0.0 {
        return;
    }
    let phase = col[imax] / Complex64::new(best, 0.0);
    let correction = phase.conj();
    for z in col.iter_mut() {
        *z *= correction;
    }
}

/// Flip a real column so its largest-magnitude entry is positive.
pub(crate) fn sign_fix(col: &mut DVector<f64>) {
    let mut imax = 0;
    let mut best = 0.0f64;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            imax = i;
        }
    }
    if best > 0.0 && col[imax] < 0.0 {
        for x in col.iter_mut() {
            *x = -*x;
        }
    }
}

/// Complete an m x k matrix with orthonormal columns to a full orthonormal
/// basis of C^m, returning the m x (m-k) complement. Greedy choice: at each
/// step the coordinate vector with the largest residual is orthogonalized and
/// appended, which is deterministic and well conditioned.
pub(crate) fn complete_orthonormal_c(cols: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = cols.nrows();
    let k = cols.ncols();
    if m == k {
        return DMatrix::zeros(m, 0);
    }
    let mut basis: Vec<DVector<Complex64>> = (0..k).map(|j| cols.column(j).into_owned()).collect();
    let mut extra: Vec<DVector<Complex64>> = Vec::with_capacity(m - k);
    while basis.len() < m {
        let mut best: Option<(f64, DVector<Complex64>)> = None;
        for j in 0..m {
            let mut v = DVector::<Complex64>::zeros(m);
            v[j] = Complex64::new(1.0, 0.0);
            for b in &basis {
                let proj = b.dotc(&v);
                v.axpy(-proj, b, Complex64::new(1.0, 0.0));
            }
            let norm = v.norm();
            if best.as_ref().is_none_or(|(n, _)| norm > *n) {
                best = Some((norm, v));
            }
        }
        let (norm, mut v) = best.expect("nonempty candidate set");
        // One more orthogonalization pass before normalizing.
        for b in &basis {
            let proj = b.dotc(&v);
            v.axpy(-proj, b, Complex64::new(1.0, 0.0));
        }
        v /= Complex64::new(v.norm(), 0.0);
        debug_assert!(norm > 1e-8, "degenerate basis completion");
        basis.push(v.clone());
        extra.push(v);
    }
    DMatrix::from_columns(&extra)
}

/// Real-valued counterpart of [`complete_orthonormal_c`].
pub(crate) fn complete_orthonormal_r(cols: &DMatrix<f64>) -> DMatrix<f64> {
    let m = cols.nrows();
    let k = cols.ncols();
    if m == k {
        return DMatrix::zeros(m, 0);
    }
    let mut basis: Vec<DVector<f64>> = (0..k).map(|j| cols.column(j).into_owned()).collect();
    let mut extra: Vec<DVector<f64>> = Vec::with_capacity(m - k);
    while basis.len() < m {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for j in 0..m {
            let mut v = DVector::<f64>::zeros(m);
            v[j] = 1.0;
            for b in &basis {
                let proj = b.dot(&v);
                v.axpy(-proj, b, 1.0);
            }
            let norm = v.norm();
            if best.as_ref().is_none_or(|(n, _)| norm > *n) {
                best = Some((norm, v));
            }
        }
        let (norm, mut v) = best.expect("nonempty candidate set");
        for b in &basis {
            let proj = b.dot(&v);
            v.axpy(-proj, b, 1.0);
        }
        v /= v.norm();
        debug_assert!(norm > 1e-8, "degenerate basis completion");
        basis.push(v.clone());
        extra.push(v);
    }
    DMatrix::from_columns(&extra)
}

/// Select the `rows` x `cols` submatrix (complex).
pub(crate) fn select_c(
    m: &DMatrix<Complex64>,
    rows: &[usize],
    cols: &[usize],
) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Select the `rows` x `cols` submatrix (real).
pub(crate) fn select_r(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Validate a subset of indices into `0..n`: in range and free of duplicates.
pub(crate) fn validate_subset(subset: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if seen[i] {
            return Err(Error::DuplicateIndex { index: i });
        }
        seen[i] = true;
    }
    Ok(())
}

/// Eigenvalues of a Hermitian *positive semidefinite* matrix (unsorted).
///
/// Callers feed Gram-type matrices: correlation blocks and density matrices.
/// The iterative symmetric eigensolver can emit non-finite values on heavily
/// rank-deficient inputs (observed on rank-2 density matrices of dimension
/// 128); singular values equal the eigenvalues for PSD matrices and are the
/// robust fallback.
pub(crate) fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().all(|x| x.is_finite()) {
        return eig.eigenvalues.iter().cloned().collect();
    }
    m.svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect()
}
