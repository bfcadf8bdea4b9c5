use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the whole pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative residual accepted from the Stein/Sylvester solvers.
    pub solve: f64,
    /// Eigenvalues with `| |λ| - 1 | <= circle` count as lying on the unit circle.
    pub circle: f64,
    /// Stein solvers refuse inputs with spectral radius `>= 1 - radius`.
    pub radius: f64,
    /// Singular numbers within `multiplicity * σ₀` of each other are tied.
    pub multiplicity: f64,
    /// `‖α₂‖ <= branch * ‖α‖` selects the vanishing-α₂ formulas.
    pub branch: f64,
    /// Resolvent evaluations closer than this to an eigenvalue are rejected.
    pub pole: f64,
    /// Relative rank threshold for Krylov bases.
    pub rank: f64,
    /// Relative agreement demanded by `equivalent`.
    pub equivalence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solve: 1e-10,
            circle: 1e-8,
            radius: 1e-8,
            multiplicity: 1e-9,
            branch: 1e-8,
            pole: 1e-10,
            rank: 1e-10,
            equivalence: 1e-9,
        }
    }
}
