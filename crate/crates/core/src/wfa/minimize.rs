use super::Wfa;
use crate::linalg::{Matrix, Vector};
use crate::tolerances::Tolerances;

/// Minimal realization of the same series: restrict to the reachable
/// subspace, then to the observable subspace of the result.
///
/// The zero series yields [`Wfa::zero`].
pub fn minimize(w: &Wfa, tol: &Tolerances) -> Wfa {
    let reachable = match krylov_basis(&w.transition().transpose(), w.alpha(), tol.rank) {
        Some(v) => project(w, &v),
        None => return Wfa::zero(),
    };
    match krylov_basis(reachable.transition(), reachable.beta(), tol.rank) {
        Some(v) => project(&reachable, &v),
        None => Wfa::zero(),
    }
}

/// `⟨Vᵀα, VᵀAV, Vᵀβ⟩` for orthonormal `V` spanning an invariant subspace.
fn project(w: &Wfa, v: &Matrix) -> Wfa {
    let vt = v.transpose();
    Wfa::new(&vt * w.alpha(), &vt * w.transition() * v, &vt * w.beta())
        .expect("projection preserves shapes and finiteness")
}

/// Orthonormal basis of `span{x, Mx, M²x, …}`, built by Arnoldi steps with
/// double Gram-Schmidt. A new direction is accepted while its orthogonal
/// component exceeds `rel_tol` relative to the operator scale. `None` for a
/// zero start vector.
fn krylov_basis(m: &Matrix, x: &Vector, rel_tol: f64) -> Option<Matrix> {
    let n = m.nrows();
    let xnorm = x.norm();
    if xnorm == 0.0 {
        return None;
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vector> = vec![x / xnorm];
    while basis.len() < n {
        let mut w = m * basis.last().expect("basis is non-empty");
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&w);
                w.axpy(-d, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= rel_tol * scale {
            break;
        }
        basis.push(w / norm);
    }
    Some(Matrix::from_columns(&basis))
}
