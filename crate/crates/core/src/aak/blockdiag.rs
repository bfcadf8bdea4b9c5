use crate::error::Result;
use crate::linalg::{ordered_schur, solve_sylvester};
use crate::tolerances::Tolerances;
use crate::wfa::Wfa;

/// Splits `⟨α, A, β⟩` into a direct sum of a part with all eigenvalues inside
/// the unit disc and a part with all eigenvalues outside it.
///
/// With `UᵀAU = [[T11, T12], [0, T22]]` ordered by modulus and `X` solving
/// `T11·X − X·T22 + T12 = 0`, the similarity `[[1, X], [0, 1]]` removes the
/// coupling block.
pub fn block_diagonalize(w: &Wfa, tol: &Tolerances) -> Result<(Wfa, Wfa)> {
    let n = w.n();
    let schur = ordered_schur(w.transition(), tol)?;
    let s = schur.split_index;
    let u = &schur.u;
    let t = &schur.t;
    let ua = u.transpose() * w.alpha();
    let ub = u.transpose() * w.beta();
    let t11 = t.view((0, 0), (s, s)).into_owned();
    let t22 = t.view((s, s), (n - s, n - s)).into_owned();
    let t12 = t.view((0, s), (s, n - s)).into_owned();
    let x = solve_sylvester(&t11, &t22, &t12)?;

    let ub2 = ub.rows(s, n - s).into_owned();
    let ua1 = ua.rows(0, s).into_owned();
    let stable = Wfa::new(ua1.clone(), t11, ub.rows(0, s) - &x * &ub2)?;
    let unstable = Wfa::new(x.transpose() * ua1 + ua.rows(s, n - s), t22, ub2)?;
    Ok((stable, unstable))
}
