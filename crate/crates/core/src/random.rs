//! Seeded generators of test automata. The same seed always yields the same
//! automaton.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::tolerances::Tolerances;
use crate::wfa::{to_sva, SvaWfa, Wfa};

/// Give up on rejection sampling after this many draws.
const MAX_ATTEMPTS: usize = 10_000;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `U·diag(s)·Vᵀ` with `s` uniform in `[low, high)`, so every eigenvalue
/// modulus lies in `[min s, max s]`.
fn random_with_singular_values<R: Rng>(rng: &mut R, n: usize, low: f64, high: f64) -> Matrix {
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let s = Vector::from_fn(n, |_, _| rng.random_range(low..high));
    u * Matrix::from_diagonal(&s) * v.transpose()
}

/// Stable automaton with transition norm below `max_radius`.
pub fn random_stable_wfa<R: Rng>(rng: &mut R, n: usize, max_radius: f64) -> Wfa {
    let a = random_with_singular_values(rng, n, 0.2 * max_radius, max_radius);
    Wfa::new(gaussian_vector(rng, n), a, gaussian_vector(rng, n)).expect("generated shapes agree")
}

/// Minimal stable automaton in singular-value form whose consecutive
/// singular numbers, and the last one, are separated by more than
/// `min_gap·σ₀`. Draws are rejected until one qualifies.
pub fn random_sva<R: Rng>(rng: &mut R, n: usize, max_radius: f64, min_gap: f64, tol: &Tolerances) -> Result<SvaWfa> {
    for _ in 0..MAX_ATTEMPTS {
        let w = random_stable_wfa(rng, n, max_radius);
        let Ok(s) = to_sva(&w, tol) else { continue };
        if s.n() == n && well_separated(s.singular_numbers(), min_gap) {
            return Ok(s);
        }
    }
    Err(Error::InvalidAutomaton(format!("no {n}-state draw met the singular-number gap {min_gap:e}")))
}

pub fn well_separated(d: &[f64], min_gap: f64) -> bool {
    let Some(&top) = d.first() else { return false };
    d.iter().enumerate().all(|(i, &s)| s - d.get(i + 1).copied().unwrap_or(0.0) > min_gap * top)
}

/// `⟨α, radius·Q, β⟩` with `Q` orthogonal: every eigenvalue has modulus
/// `radius`, so the singular numbers decay slowly.
pub fn random_scaled_orthogonal<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Wfa {
    let a = random_orthogonal(rng, n) * radius;
    Wfa::new(gaussian_vector(rng, n), a, gaussian_vector(rng, n)).expect("generated shapes agree")
}

/// Automaton with `n_stable` eigenvalues of modulus in `[0.2, 0.8)` and
/// `n_unstable` of modulus in `(1.25, 5]`, mixed by a random rotation.
pub fn random_mixed<R: Rng>(rng: &mut R, n_stable: usize, n_unstable: usize) -> Wfa {
    let n = n_stable + n_unstable;
    let mut a = Matrix::zeros(n, n);
    let stable = random_with_singular_values(rng, n_stable, 0.2, 0.8);
    a.view_mut((0, 0), (n_stable, n_stable)).copy_from(&stable);
    let inner = random_with_singular_values(rng, n_unstable, 0.2, 0.8);
    let unstable = inner.try_inverse().expect("singular values bounded below");
    a.view_mut((n_stable, n_stable), (n_unstable, n_unstable)).copy_from(&unstable);
    let t = random_orthogonal(rng, n);
    let a = &t * a * t.transpose();
    Wfa::new(gaussian_vector(rng, n), a, gaussian_vector(rng, n)).expect("generated shapes agree")
}
