use super::schur::spectral_radius;
use super::{check_finite, check_square, kron, Matrix};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Above this many unknowns the dense Kronecker system is replaced by
/// Smith's doubling iteration.
const KRONECKER_LIMIT: usize = 32 * 32;
const MAX_DOUBLINGS: usize = 100;

/// Solves the Stein equation `X − a·X·aᵀ = s` for symmetric `s`.
///
/// The right-hand side is symmetrized before solving and the result is
/// exactly symmetric.
pub fn solve_discrete_lyapunov(a: &Matrix, s: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let n = check_square(a, "transition")?;
    if s.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side is {}x{}, expected {n}x{n}",
            s.nrows(),
            s.ncols()
        )));
    }
    check_finite(a, "transition")?;
    check_finite(s, "right-hand side")?;
    let radius = spectral_radius(a);
    if !(radius < 1.0 - tol.radius) {
        return Err(Error::NonConvergent { radius });
    }
    let s = 0.5 * (s + s.transpose());
    let at = a.transpose();
    let mut x = stein_unchecked(a, &at, &s);
    // One step of refinement recovers the accuracy lost to a badly scaled
    // Kronecker system.
    let resid = &s - (&x - a * &x * &at);
    if resid.norm() > 1e-2 * tol.solve * (x.norm() + s.norm()) {
        x += stein_unchecked(a, &at, &resid);
    }
    Ok(0.5 * (&x + x.transpose()))
}

/// Solves the general Stein equation `X − a·X·b = c`.
pub fn solve_stein(a: &Matrix, b: &Matrix, c: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let n = check_square(a, "left coefficient")?;
    let m = check_square(b, "right coefficient")?;
    if c.shape() != (n, m) {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side is {}x{}, expected {n}x{m}",
            c.nrows(),
            c.ncols()
        )));
    }
    check_finite(a, "left coefficient")?;
    check_finite(b, "right coefficient")?;
    check_finite(c, "right-hand side")?;
    let radius = spectral_radius(a) * spectral_radius(b);
    if !(radius < 1.0 - tol.radius) {
        return Err(Error::NonConvergent { radius });
    }
    Ok(stein_unchecked(a, b, c))
}

fn stein_unchecked(a: &Matrix, b: &Matrix, c: &Matrix) -> Matrix {
    let (n, m) = c.shape();
    if n == 0 || m == 0 {
        return Matrix::zeros(n, m);
    }
    if n * m <= KRONECKER_LIMIT {
        // vec(a X b) = (bᵀ ⊗ a) vec X
        let k = Matrix::identity(n * m, n * m) - kron(&b.transpose(), a);
        let rhs = nalgebra::DVector::from_column_slice(c.as_slice());
        if let Some(sol) = k.lu().solve(&rhs) {
            return Matrix::from_column_slice(n, m, sol.as_slice());
        }
    }
    smith(a, b, c)
}

/// `X = Σ_j a^j c b^j`, summed by repeated squaring.
fn smith(a: &Matrix, b: &Matrix, c: &Matrix) -> Matrix {
    let mut x = c.clone();
    let mut ak = a.clone();
    let mut bk = b.clone();
    for _ in 0..MAX_DOUBLINGS {
        let inc = &ak * &x * &bk;
        x += &inc;
        ak = &ak * &ak;
        bk = &bk * &bk;
        let tail = ak.norm() * bk.norm();
        if inc.norm() <= f64::EPSILON * x.norm() && tail < 1e-3 {
            break;
        }
        if tail == 0.0 {
            break;
        }
    }
    x
}
