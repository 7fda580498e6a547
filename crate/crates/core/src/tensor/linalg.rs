//! Dense complex matrix helpers shared by the whole crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Builds a complex matrix from real row-major rows.
pub fn real_matrix(rows: &[&[f64]]) -> Mat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
}

pub fn diag_real(values: &[f64]) -> Mat {
    Mat::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0))))
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Operator norm: the largest singular value.
pub fn op_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Induced ∞-norm (maximum absolute row sum).
pub fn inf_norm(m: &Mat) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn fro_norm(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hilbert–Schmidt inner product `tr(a* b)`, antilinear in `a`.
pub fn hs_inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨x, y⟩`, antilinear in `x`.
pub fn vdot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn vec_conj(a: &[C64]) -> Vec<C64> {
    a.iter().map(|z| z.conj()).collect()
}

pub fn normalize(v: &mut [C64]) {
    let n = vec_norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

pub fn matvec(m: &Mat, v: &[C64]) -> Vec<C64> {
    assert_eq!(m.ncols(), v.len(), "matvec dimension mismatch");
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// Row-major flattening of a matrix.
pub fn flatten(m: &Mat) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn unflatten(v: &[C64], rows: usize, cols: usize) -> Mat {
    assert_eq!(v.len(), rows * cols);
    Mat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Partial trace over one factor of a square matrix on `C^{d1} ⊗ C^{d2}`.
/// `keep_first` keeps the first factor (traces out the second).
pub fn partial_trace(m: &Mat, d1: usize, d2: usize, keep_first: bool) -> Mat {
    if keep_first {
        Mat::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum())
    } else {
        Mat::from_fn(d2, d2, |i, j| (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum())
    }
}

/// Orthonormal basis of the row space of `m` (as rows), from the SVD with
/// singular values in descending order. Singular values below
/// `rel_tol * s_max` are treated as zero. Each basis row is phase-normalized
/// so that its first entry of modulus above `1e-8` is real and positive.
pub fn row_space_basis(m: &Mat, rel_tol: f64) -> (Vec<Vec<C64>>, Vec<f64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let s_max = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let mut basis = Vec::new();
    let mut values = Vec::new();
    for &k in &order {
        let s = svd.singular_values[k];
        values.push(s);
        if s_max == 0.0 || s <= rel_tol * s_max {
            continue;
        }
        let mut row: Vec<C64> = v_t.row(k).iter().copied().collect();
        phase_normalize(&mut row);
        basis.push(row);
    }
    (basis, values)
}

pub fn phase_normalize(v: &mut [C64]) {
    if let Some(p) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let phase = p.conj() / p.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Numerical rank of `m` relative to its largest singular value.
pub fn rank(m: &Mat, rel_tol: f64) -> usize {
    let sv = m.singular_values();
    let s_max = sv.iter().cloned().fold(0.0, f64::max);
    if s_max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * s_max).count()
}

/// Minimum-norm least-squares solution `x` of `a x = b`.
pub fn lstsq(a: &Mat, b: &Mat) -> Mat {
    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = 1e-12 * s_max.max(f64::MIN_POSITIVE);
    svd.solve(b, eps).expect("svd computed with u and v_t")
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &Mat, rel_tol: f64) -> Mat {
    let n = m.ncols();
    let gram = m.adjoint() * m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let scale = eig.eigenvalues.iter().cloned().fold(0.0, f64::max).max(1.0);
    let cols: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k].abs() <= rel_tol * scale).collect();
    Mat::from_fn(n, cols.len(), |i, j| eig.eigenvectors[(i, cols[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_diagonal() {
        let d = diag_real(&[0.0, 0.0, -0.75, 3.0]);
        assert!((op_norm(&d) - 3.0).abs() < 1e-14);
        assert!((inf_norm(&d) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = real_matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = real_matrix(&[&[5.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[2.0, 0.0, 1.0]]);
        let ab = kron(&a, &b);
        let ta = partial_trace(&ab, 2, 3, true);
        assert!(max_abs(&(ta - a.scale(7.0))) < 1e-13);
        let tb = partial_trace(&ab, 2, 3, false);
        assert!(max_abs(&(tb - b.scale(5.0))) < 1e-13);
    }

    #[test]
    fn row_space_of_rank_one() {
        let m = real_matrix(&[&[1.0, 1.0], &[2.0, 2.0]]);
        let (basis, _) = row_space_basis(&m, 1e-10);
        assert_eq!(basis.len(), 1);
        let s = 0.5f64.sqrt();
        assert!((basis[0][0] - c(s, 0.0)).norm() < 1e-12);
        assert!((basis[0][1] - c(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn row_space_of_complex_rows() {
        let m = Mat::from_fn(2, 2, |i, j| c(1.0 + i as f64, 0.0) * if j == 0 { ONE } else { I });
        let (basis, _) = row_space_basis(&m, 1e-10);
        assert_eq!(basis.len(), 1);
        let s = 0.5f64.sqrt();
        assert!((basis[0][0] - c(s, 0.0)).norm() < 1e-12);
        assert!((basis[0][1] - c(0.0, s)).norm() < 1e-12);
    }

    #[test]
    fn lstsq_recovers_solution() {
        let a = real_matrix(&[&[2.0, 0.0], &[0.0, 4.0], &[0.0, 0.0]]);
        let b = real_matrix(&[&[2.0], &[8.0], &[0.0]]);
        let x = lstsq(&a, &b);
        assert!((x[(0, 0)] - ONE).norm() < 1e-12);
        assert!((x[(1, 0)] - c(2.0, 0.0)).norm() < 1e-12);
    }
}
