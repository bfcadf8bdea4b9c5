use serde::Serialize;

use super::auxiliary::Auxiliary;
use super::partition::PartitionBlocks;
use crate::linalg::{Matrix, Vector};
use crate::wfa::Wfa;

/// The error automaton `E = ⟨(α; −α̂), diag(A, Â), (β; β̂)⟩` in the permuted
/// coordinates of the partition. Its series is `f` minus the auxiliary series.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorWfa {
    pub wfa: Wfa,
    pub sigma_k: f64,
}

pub fn build_error_wfa(pb: &PartitionBlocks, aux: &Auxiliary) -> ErrorWfa {
    ErrorWfa { wfa: pb.permuted.difference(&aux.to_wfa()), sigma_k: pb.sigma_k }
}

/// Relative residuals of the three all-pass identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllpassResiduals {
    /// `Pₑ − AₑPₑAₑᵀ − βₑβₑᵀ`.
    pub a: f64,
    /// `Qₑ − AₑᵀQₑAₑ − αₑαₑᵀ`.
    pub b: f64,
    /// `PₑQₑ − σ_k²`, relative to `‖|Pₑ|·|Qₑ|‖`.
    pub c: f64,
}

impl AllpassResiduals {
    pub fn max(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }
}

/// Certificate matrices `(Pₑ, Qₑ)` for the error automaton, block order
/// `(n − r, r, n − r)`:
/// `Pₑ = [[Σ, 0, 1], [0, σ_k, 0], [1, 0, −ΣR⁻¹]]`,
/// `Qₑ = [[Σ, 0, R], [0, σ_k, 0], [R, 0, −ΣR]]`.
pub fn certificate(pb: &PartitionBlocks) -> (Matrix, Matrix) {
    let m = pb.retained();
    let n = m + pb.r;
    let size = n + m;
    let mut p = Matrix::zeros(size, size);
    let mut q = Matrix::zeros(size, size);
    for i in 0..m {
        let (s, r) = (pb.sigma[i], pb.r_diag[i]);
        p[(i, i)] = s;
        q[(i, i)] = s;
        p[(i, n + i)] = 1.0;
        p[(n + i, i)] = 1.0;
        q[(i, n + i)] = r;
        q[(n + i, i)] = r;
        p[(n + i, n + i)] = -s / r;
        q[(n + i, n + i)] = -s * r;
    }
    for i in m..n {
        p[(i, i)] = pb.sigma_k;
        q[(i, i)] = pb.sigma_k;
    }
    (p, q)
}

pub fn verify_allpass(e: &ErrorWfa, pb: &PartitionBlocks) -> AllpassResiduals {
    let (p, q) = certificate(pb);
    let a = e.wfa.transition();
    let alpha = e.wfa.alpha();
    let beta = e.wfa.beta();
    let rel = |res: Matrix, x: &Matrix, v: &Vector| res.norm() / x.norm().max(v.norm_squared()).max(f64::MIN_POSITIVE);
    let ra = rel(&p - a * &p * a.transpose() - beta * beta.transpose(), &p, beta);
    let rb = rel(&q - a.transpose() * &q * a - alpha * alpha.transpose(), &q, alpha);
    let s2 = e.sigma_k * e.sigma_k;
    let size = p.nrows();
    // Entrywise scale: P and Q mix blocks of very different magnitude.
    let scale = (p.abs() * q.abs()).norm().max(s2 * (size as f64).sqrt());
    let rc = (&p * &q - Matrix::identity(size, size) * s2).norm() / scale;
    AllpassResiduals { a: ra, b: rb, c: rc }
}
