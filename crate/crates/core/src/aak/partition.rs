use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::wfa::{SvaWfa, Wfa};

/// Size of the `σ_k` multiplicity group and the permutation that moves it
/// to the last coordinates (`new[i] = old[perm[i]]`).
///
/// The group is `{i : |σᵢ − σ_k| ≤ tol·σ₀}`. `k` must be its first index,
/// and at least one singular number must lie outside it.
pub fn group_multiplicity(d: &[f64], k: usize, tol: f64) -> Result<(usize, Vec<usize>)> {
    let n = d.len();
    if k >= n {
        return Err(Error::InvalidRank { k, n });
    }
    let scale = d[0];
    let members: Vec<usize> = (0..n).filter(|&i| (d[i] - d[k]).abs() <= tol * scale).collect();
    let start = members[0];
    let end = members[members.len() - 1] + 1;
    if start < k || members.len() == n {
        return Err(Error::GroupNotAtBoundary { k, start, end });
    }
    let r = members.len();
    let perm = (0..n).filter(|i| !members.contains(i)).chain(members.iter().copied()).collect();
    Ok((r, perm))
}

/// Conformal blocks of a singular-value-form automaton after the `σ_k`
/// group has been permuted to the end:
/// `A = [[A11, A12], [A21, A22]]`, `α = (α1; α2)`, `β = (β1; β2)`, with
/// retained singular numbers `Σ` and `R = σ_k² − Σ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionBlocks {
    pub k: usize,
    pub r: usize,
    pub sigma_k: f64,
    /// Diagonal of `Σ`.
    pub sigma: Vec<f64>,
    /// Diagonal of `R`.
    pub r_diag: Vec<f64>,
    pub a11: Matrix,
    pub a12: Matrix,
    pub a21: Matrix,
    pub a22: Matrix,
    pub alpha1: Vector,
    pub alpha2: Vector,
    pub beta1: Vector,
    pub beta2: Vector,
    pub permutation: Vec<usize>,
    /// The permuted automaton; its Gramians are `diag(Σ, σ_k·1)`.
    pub permuted: Wfa,
}

impl PartitionBlocks {
    pub fn retained(&self) -> usize {
        self.sigma.len()
    }

    /// Gramian diagonal in permuted coordinates.
    pub fn gramian_diagonal(&self) -> Vec<f64> {
        let mut d = self.sigma.clone();
        d.extend(std::iter::repeat_n(self.sigma_k, self.r));
        d
    }
}

pub fn partition(s: &SvaWfa, k: usize, tol: f64) -> Result<PartitionBlocks> {
    let d = s.singular_numbers();
    let (r, perm) = group_multiplicity(d, k, tol)?;
    let n = s.n();
    let m = n - r;
    let w = s.wfa();
    let a = Matrix::from_fn(n, n, |i, j| w.transition()[(perm[i], perm[j])]);
    let alpha = Vector::from_fn(n, |i, _| w.alpha()[perm[i]]);
    let beta = Vector::from_fn(n, |i, _| w.beta()[perm[i]]);
    let sigma_k = d[k];
    let sigma: Vec<f64> = perm[..m].iter().map(|&i| d[i]).collect();
    let r_diag = sigma.iter().map(|s| sigma_k * sigma_k - s * s).collect();
    Ok(PartitionBlocks {
        k,
        r,
        sigma_k,
        sigma,
        r_diag,
        a11: a.view((0, 0), (m, m)).into_owned(),
        a12: a.view((0, m), (m, r)).into_owned(),
        a21: a.view((m, 0), (r, m)).into_owned(),
        a22: a.view((m, m), (r, r)).into_owned(),
        alpha1: alpha.rows(0, m).into_owned(),
        alpha2: alpha.rows(m, r).into_owned(),
        beta1: beta.rows(0, m).into_owned(),
        beta2: beta.rows(m, r).into_owned(),
        permutation: perm,
        permuted: Wfa::new(alpha, a, beta)?,
    })
}
