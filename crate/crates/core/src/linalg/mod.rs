//! Dense kernels used by the reduction: Stein (discrete Lyapunov) and
//! Sylvester solvers, modulus-ordered real Schur forms, and a handful of
//! small factorization helpers.

mod lyapunov;
mod schur;
mod sylvester;

pub use lyapunov::{solve_discrete_lyapunov, solve_stein};
pub use schur::{eigenvalues, ordered_schur, real_schur, spectral_radius, SchurForm};
pub use sylvester::solve_sylvester;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

pub(crate) fn check_square(m: &Matrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: &Matrix, what: &'static str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Kronecker product `a ⊗ b`.
pub(crate) fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            out.view_mut((i * br, j * bc), (br, bc)).zip_apply(b, |o, v| *o = s * v);
        }
    }
    out
}

/// Minimum-norm least-squares solution of `m x = rhs` through the SVD,
/// discarding singular values below `rcond * σ_max`.
pub(crate) fn min_norm_lstsq(m: &Matrix, rhs: &Vector, rcond: f64) -> Vector {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vector::zeros(m.ncols());
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.max();
    let mut x = Vector::zeros(m.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > rcond * smax && s > 0.0 {
            let coeff = u.column(i).dot(rhs) / s;
            x.axpy(coeff, &v_t.row(i).transpose(), 1.0);
        }
    }
    x
}

/// Orthonormal basis (as columns) of the null space `{x : m x = 0}`.
pub(crate) fn null_space(m: &Matrix, rel_tol: f64) -> Matrix {
    let n = m.ncols();
    if m.nrows() == 0 {
        return Matrix::identity(n, n);
    }
    // Pad to at least n rows so the SVD returns a full right basis.
    let padded = if m.nrows() < n {
        let mut p = Matrix::zeros(n, n);
        p.view_mut((0, 0), m.shape()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= rel_tol * smax || smax == 0.0).collect();
    let mut basis = Matrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &v_t.row(i).transpose());
    }
    basis
}

/// Extends orthonormal columns `q` to a full orthogonal matrix.
pub(crate) fn complete_orthonormal(q: &Matrix) -> Matrix {
    let n = q.nrows();
    let mut cols: Vec<Vector> = q.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = Vector::zeros(n);
        v[e] = 1.0;
        for _ in 0..2 {
            for c in &cols {
                let d = c.dot(&v);
                v.axpy(-d, c, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    Matrix::from_columns(&cols)
}

/// Cholesky factorization with symmetric diagonal pivoting, `p = l lᵀ`.
///
/// Pivots that fall below `rel_tol * max diag` are treated as zero, which
/// leaves the corresponding columns of `l` zero. Returns `l` together with
/// the detected numerical rank.
pub(crate) fn pivoted_cholesky(p: &Matrix, rel_tol: f64) -> (Matrix, usize) {
    let n = p.nrows();
    let mut a = p.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = Matrix::zeros(n, n);
    let dmax = (0..n).map(|i| p[(i, i)]).fold(0.0_f64, f64::max);
    let mut rank = 0;
    for k in 0..n {
        // Largest remaining diagonal pivot.
        let (piv, &dpiv) = (k..n).map(|i| (i, &a[(i, i)])).max_by(|x, y| x.1.total_cmp(y.1)).expect("non-empty range");
        if dpiv <= rel_tol * dmax || dpiv <= 0.0 {
            break;
        }
        a.swap_rows(k, piv);
        a.swap_columns(k, piv);
        l.swap_rows(k, piv);
        perm.swap(k, piv);
        let d = dpiv.sqrt();
        l[(k, k)] = d;
        for i in k + 1..n {
            l[(i, k)] = a[(i, k)] / d;
        }
        for j in k + 1..n {
            for i in j..n {
                let v = a[(i, j)] - l[(i, k)] * l[(j, k)];
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        rank += 1;
    }
    // Undo the row permutation: p = Πᵀ l lᵀ Π.
    let mut out = Matrix::zeros(n, n);
    for (k, &orig) in perm.iter().enumerate() {
        out.set_row(orig, &l.row(k));
    }
    (out, rank)
}

#[cfg(test)]
pub(crate) fn diff_norm(x: &Matrix, y: &Matrix) -> f64 {
    (x - y).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_matches_definition() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = Matrix::from_row_slice(1, 2, &[0.5, -1.0]);
        let k = kron(&a, &b);
        let expect = Matrix::from_row_slice(2, 4, &[0.5, -1.0, 1.0, -2.0, 1.5, -3.0, 2.0, -4.0]);
        assert_eq!(k, expect);
    }

    #[test]
    fn pivoted_cholesky_reconstructs_semidefinite() {
        // rank-2 PSD 3x3
        let g = Matrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 1.0, -1.0, 3.0]);
        let p = &g * g.transpose();
        let (l, rank) = pivoted_cholesky(&p, 1e-12);
        assert_eq!(rank, 2);
        assert!(diff_norm(&(&l * l.transpose()), &p) < 1e-12);
    }

    #[test]
    fn null_space_is_orthonormal_and_annihilated() {
        let m = Matrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).norm() < 1e-14);
        assert!(diff_norm(&(n.transpose() * &n), &Matrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn lstsq_returns_minimum_norm() {
        let m = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = min_norm_lstsq(&m, &Vector::from_vec(vec![2.0]), 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn completion_is_orthogonal() {
        let q = Matrix::from_column_slice(3, 1, &[0.6, 0.8, 0.0]);
        let full = complete_orthonormal(&q);
        assert_eq!(full.shape(), (3, 3));
        assert!(diff_norm(&(full.transpose() * &full), &Matrix::identity(3, 3)) < 1e-14);
    }
}
