use super::schur::real_schur;
use super::{check_finite, check_square, kron, Matrix};
use crate::error::{Error, Result};

/// Relative eigenvalue separation below which the equation is declared singular.
const SEPARATION_EPS: f64 = 1e3 * f64::EPSILON;

/// Solves `ap·X − X·am + c = 0` by the Bartels–Stewart method.
pub fn solve_sylvester(ap: &Matrix, am: &Matrix, c: &Matrix) -> Result<Matrix> {
    let p = check_square(ap, "left coefficient")?;
    let q = check_square(am, "right coefficient")?;
    if c.shape() != (p, q) {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side is {}x{}, expected {p}x{q}",
            c.nrows(),
            c.ncols()
        )));
    }
    check_finite(ap, "left coefficient")?;
    check_finite(am, "right coefficient")?;
    check_finite(c, "right-hand side")?;
    if p == 0 || q == 0 {
        return Ok(Matrix::zeros(p, q));
    }

    let sp = real_schur(ap)?;
    let sm = real_schur(am)?;
    let scale = ap.norm().max(am.norm()).max(f64::MIN_POSITIVE);
    let separation = sp
        .eigenvalues()
        .iter()
        .flat_map(|x| sm.eigenvalues().into_iter().map(move |y| (x - y).norm()))
        .fold(f64::INFINITY, f64::min);
    if separation <= SEPARATION_EPS * scale {
        return Err(Error::SingularSystem { separation });
    }

    // Tp·Y − Y·Tm = F with Y = Upᵀ X Um.
    let f = -(sp.u.transpose() * c * &sm.u);
    let tp = &sp.t;
    let tm = &sm.t;
    let mut y = Matrix::zeros(p, q);
    for &(js, jn) in &sm.blocks() {
        for &(is, in_) in sp.blocks().iter().rev() {
            let mut rhs = f.view((is, js), (in_, jn)).into_owned();
            let below = is + in_;
            if below < p {
                rhs -= tp.view((is, below), (in_, p - below)) * y.view((below, js), (p - below, jn));
            }
            if js > 0 {
                rhs += y.view((is, 0), (in_, js)) * tm.view((0, js), (js, jn));
            }
            let tii = tp.view((is, is), (in_, in_)).into_owned();
            let tjj = tm.view((js, js), (jn, jn)).into_owned();
            let block = solve_small_sylvester(&tii, &tjj, &rhs).ok_or(Error::SingularSystem { separation })?;
            y.view_mut((is, js), (in_, jn)).copy_from(&block);
        }
    }
    Ok(&sp.u * y * sm.u.transpose())
}

/// Solves `a·X − X·b = c` for small blocks through the Kronecker form
/// `(I ⊗ a − bᵀ ⊗ I) vec X = vec c`.
pub(crate) fn solve_small_sylvester(a: &Matrix, b: &Matrix, c: &Matrix) -> Option<Matrix> {
    let (p, q) = (a.nrows(), b.nrows());
    let k = kron(&Matrix::identity(q, q), a) - kron(&b.transpose(), &Matrix::identity(p, p));
    let rhs = nalgebra::DVector::from_column_slice(c.as_slice());
    let sol = k.full_piv_lu().solve(&rhs)?;
    if sol.iter().all(|v| v.is_finite()) {
        Some(Matrix::from_column_slice(p, q, sol.as_slice()))
    } else {
        None
    }
}
