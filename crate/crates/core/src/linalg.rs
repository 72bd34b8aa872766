//! Small dense helpers shared by the solver and the decomposition code.

use nalgebra::{DMatrix, DVector};

/// Numerical rank: singular values above `ratio · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, ratio: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > ratio * smax).count()
}

/// Rank of a matrix whose rows are `rows`, with an absolute floor on the cut.
pub fn rows_rank(rows: &[Vec<f64>], ncols: usize, ratio: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    numerical_rank(&m, ratio)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Orthonormal basis of the null space of `a` (columns), plus a
/// least-squares particular solution of `a x = b`.
///
/// Returns `None` when the system is inconsistent beyond `tol`.
pub fn affine_null_space(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let n = a.ncols();
    if a.nrows() == 0 || n == 0 {
        let ok = n > 0 || b.norm() <= tol.max(1e-12);
        return ok.then(|| (DVector::zeros(n), DMatrix::identity(n, n)));
    }
    // Pad to at least n rows so the SVD returns a full set of right vectors.
    let rows = a.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(true, true);
    let v_t = svd.v_t.as_ref().expect("requested v");
    let u = svd.u.as_ref().expect("requested u");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1e-300);
    let mut bpad = DVector::zeros(rows);
    bpad.rows_mut(0, a.nrows()).copy_from(b);
    let mut x = DVector::zeros(n);
    let mut null = Vec::new();
    for k in 0..n {
        let s = svd.singular_values[k];
        let v = v_t.row(k).transpose();
        if s > cut {
            x += v * (u.column(k).dot(&bpad) / s);
        } else {
            null.push(v);
        }
    }
    let resid = (a * &x - b).norm();
    if resid > 1e3 * tol.max(1e-12) * (1.0 + b.norm()) {
        return None;
    }
    let mut basis = DMatrix::zeros(n, null.len());
    for (c, v) in null.iter().enumerate() {
        basis.set_column(c, v);
    }
    Some((x, basis))
}

/// Least-squares solve via SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.is_empty() {
        return DVector::zeros(a.ncols());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.solve(b, 1e-13 * smax.max(1e-300)).expect("svd computed with u and v")
}
