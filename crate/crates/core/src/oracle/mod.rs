//! Finite Hankel truncations used as ground truth for operator quantities.

mod polynomial;

pub use polynomial::{polynomial_method, PolynomialApproximation};

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::wfa::{SvaWfa, Wfa};

/// Smallest and largest sizes tried by [`auto_hankel_size`].
pub const MIN_AUTO_SIZE: usize = 16;
pub const MAX_AUTO_SIZE: usize = 1024;
/// Auto-sizing stops once the tail bound is below this fraction of the reference scale.
pub const AUTO_TAIL_FRACTION: f64 = 1e-8;

/// `H_N(i, j) = f(i + j)` for `0 ≤ i, j < N`, with a Frobenius bound on the
/// part of the infinite Hankel matrix outside the `N×N` corner.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHankel {
    matrix: Matrix,
    tail_bound: f64,
}

impl TruncatedHankel {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// All singular values, non-increasing.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().map(|x| x.abs()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        symmetric_norm(&self.matrix)
    }
}

pub fn truncated_hankel(w: &Wfa, size: usize) -> Result<TruncatedHankel> {
    let radius = stable_radius(w)?;
    let f = w.coefficients(series_len(size));
    Ok(TruncatedHankel { matrix: hankel_matrix(&f, size), tail_bound: tail_bound(&f, size, radius) })
}

fn stable_radius(w: &Wfa) -> Result<f64> {
    let radius = w.spectral_radius();
    if !(radius < 1.0) {
        return Err(Error::SpectralRadiusTooLarge { radius });
    }
    Ok(radius)
}

fn series_len(size: usize) -> usize {
    (2 * size).max(size + 12)
}

/// Builds the matrix once per anti-diagonal, so symmetry is exact.
pub(crate) fn hankel_matrix(f: &[f64], size: usize) -> Matrix {
    Matrix::from_fn(size, size, |i, j| f[i + j])
}

/// Frobenius norm of the Hankel entries outside the `size×size` corner.
///
/// Anti-diagonals `size ≤ m ≤ 2·size − 2` are summed exactly; beyond that
/// `|f(m)| ≤ c·ρᵐ` with `ρ` the larger of the spectral radius and a
/// log-linear fit, and `c` the tightest constant over `m ∈ [size, size + 10]`.
pub(crate) fn tail_bound(f: &[f64], size: usize, radius: f64) -> f64 {
    debug_assert!(f.len() >= series_len(size));
    let partial: f64 = (size..2 * size - 1).map(|m| 2.0 * (m + 1 - size) as f64 * f[m] * f[m]).sum();
    let window = size..=size + 10;
    let rho = fitted_rate(&f[window.clone()], size).max(radius).min(1.0 - 1e-15);
    if rho == 0.0 {
        return partial.sqrt();
    }
    let log_rho = rho.ln();
    let log_c =
        window.filter(|&m| f[m] != 0.0).map(|m| f[m].abs().ln() - m as f64 * log_rho).fold(f64::NEG_INFINITY, f64::max);
    if log_c == f64::NEG_INFINITY {
        return partial.sqrt();
    }
    // Σ_{m≥M} (m+1)·xᵐ = xᴹ(1 + M(1 − x))/(1 − x)², with x = ρ².
    let x = rho * rho;
    let big_m = (2 * size - 1) as f64;
    let log_tail = 2.0 * log_c + big_m * x.ln() + (1.0 + big_m * (1.0 - x)).ln() - 2.0 * (1.0 - x).ln();
    (partial + log_tail.exp()).sqrt()
}

/// Decay rate from a least-squares fit of `ln|f(m)|` over the window,
/// ignoring exact zeros. Zero when fewer than two points are usable.
fn fitted_rate(window: &[f64], offset: usize) -> f64 {
    let pts: Vec<(f64, f64)> = window
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| ((offset + i) as f64, v.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxy / sxx).exp()
}

/// Smallest power of two `N ≥ 16` whose tail bound for `w` is below
/// `1e-8 · reference`. The flag is set when the cap of 1024 was hit first.
pub fn auto_hankel_size(w: &Wfa, reference: f64) -> Result<(usize, bool)> {
    let radius = stable_radius(w)?;
    let f = w.coefficients(series_len(MAX_AUTO_SIZE));
    Ok(auto_size_from(&f, radius, reference))
}

fn auto_size_from(f: &[f64], radius: f64, reference: f64) -> (usize, bool) {
    let mut size = MIN_AUTO_SIZE;
    loop {
        if tail_bound(f, size, radius) < AUTO_TAIL_FRACTION * reference {
            return (size, false);
        }
        if size >= MAX_AUTO_SIZE {
            return (MAX_AUTO_SIZE, true);
        }
        size *= 2;
    }
}

/// Spectral-norm distance between the truncated Hankel matrices of two
/// automata, with the tail bound of their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralError {
    pub value: f64,
    pub tail_bound: f64,
    pub size: usize,
}

pub fn spectral_error(w1: &Wfa, w2: &Wfa, size: usize) -> Result<SpectralError> {
    let radius = stable_radius(w1)?.max(stable_radius(w2)?);
    let len = series_len(size);
    let f: Vec<f64> = w1.coefficients(len).iter().zip(w2.coefficients(len)).map(|(a, b)| a - b).collect();
    let h = hankel_matrix(&f, size);
    Ok(SpectralError { value: symmetric_norm(&h), tail_bound: tail_bound(&f, size, radius), size })
}

/// Like [`spectral_error`] with the size chosen by the tail criterion
/// against `reference`. Returns the measurement and whether the size cap was hit.
pub fn spectral_error_auto(w1: &Wfa, w2: &Wfa, reference: f64) -> Result<(SpectralError, bool)> {
    let radius = stable_radius(w1)?.max(stable_radius(w2)?);
    let len = series_len(MAX_AUTO_SIZE);
    let f: Vec<f64> = w1.coefficients(len).iter().zip(w2.coefficients(len)).map(|(a, b)| a - b).collect();
    let (size, capped) = auto_size_from(&f, radius, reference);
    let h = hankel_matrix(&f, size);
    Ok((SpectralError { value: symmetric_norm(&h), tail_bound: tail_bound(&f, size, radius), size }, capped))
}

/// Best rank-`k` approximation of the truncated matrix (generally not
/// Hankel) and its error `σ_k(H_N)`.
pub fn svd_truncation_baseline(t: &TruncatedHankel, k: usize) -> (Matrix, f64) {
    let size = t.size();
    let pairs = dominant_eigenpairs(&t.matrix, k + 1);
    let mut approx = Matrix::zeros(size, size);
    for (l, v) in pairs.iter().take(k) {
        approx += *l * v * v.transpose();
    }
    let err = pairs.get(k).map_or(0.0, |(l, _)| l.abs());
    (approx, err)
}

/// Keeps the leading `k` coordinates of a singular-value-form automaton.
pub fn sva_truncation_baseline(s: &SvaWfa, k: usize) -> Wfa {
    let k = k.min(s.n());
    let w = s.wfa();
    Wfa::new(
        w.alpha().rows(0, k).into_owned(),
        w.transition().view((0, 0), (k, k)).into_owned(),
        w.beta().rows(0, k).into_owned(),
    )
    .expect("truncation preserves shapes")
}

/// Exact Hankel singular numbers, read off the diagonal Gramians.
pub fn hankel_singular_numbers(s: &SvaWfa) -> Vec<f64> {
    s.singular_numbers().to_vec()
}

/// Largest `|λ|` of a symmetric matrix.
pub(crate) fn symmetric_norm(h: &Matrix) -> f64 {
    dominant_eigenpairs(h, 1).first().map_or(0.0, |(l, _)| l.abs())
}

/// The `count` eigenpairs of largest `|λ|` of a symmetric matrix, in
/// decreasing order of `|λ|`, by Lanczos with full reorthogonalization from a
/// fixed pseudo-random start. Stops once every wanted Ritz residual is below
/// `1e-14·|λ_max|` or the Krylov space is invariant.
pub(crate) fn dominant_eigenpairs(h: &Matrix, count: usize) -> Vec<(f64, Vector)> {
    let n = h.nrows();
    let scale = h.norm();
    let count = count.min(n);
    if count == 0 {
        return Vec::new();
    }
    if scale == 0.0 {
        return (0..count).map(|i| (0.0, Matrix::identity(n, n).column(i).into_owned())).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4841_4e4b);
    let start = Vector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    let mut basis = vec![start.normalize()];
    let mut diag: Vec<f64> = Vec::new();
    let mut off: Vec<f64> = Vec::new();
    for j in 0..n {
        let mut w = h * &basis[j];
        diag.push(basis[j].dot(&w));
        for _ in 0..2 {
            for v in &basis {
                let d = v.dot(&w);
                w.axpy(-d, v, 1.0);
            }
        }
        let b = w.norm();
        let exhausted = b <= 1e-14 * scale || j + 1 == n;
        let m = j + 1;
        if m >= count && (j < 200 || j % 10 == 0 || exhausted) {
            let tri = Matrix::from_fn(m, m, |r, c| {
                if r == c {
                    diag[r]
                } else if r + 1 == c {
                    off[r]
                } else if c + 1 == r {
                    off[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(tri);
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by(|&a, &c| eig.eigenvalues[c].abs().total_cmp(&eig.eigenvalues[a].abs()));
            let top = eig.eigenvalues[idx[0]].abs().max(f64::MIN_POSITIVE);
            let converged = idx.iter().take(count).all(|&i| b * eig.eigenvectors[(m - 1, i)].abs() <= 1e-14 * top);
            if converged || exhausted {
                return idx
                    .iter()
                    .take(count)
                    .map(|&i| {
                        let y = eig.eigenvectors.column(i);
                        let v = basis.iter().take(m).zip(y.iter()).fold(Vector::zeros(n), |acc, (q, c)| acc + q * *c);
                        (eig.eigenvalues[i], v)
                    })
                    .collect();
            }
        }
        off.push(b);
        basis.push(w / b);
    }
    unreachable!("the loop returns once the Krylov space is exhausted")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::Tolerances;
    use crate::wfa::to_sva;

    fn example() -> Wfa {
        let b = 3f64.sqrt() / 2.0;
        Wfa::from_rows(&[b, 0.0], &[&[0.0, 0.5], &[0.5, 0.0]], &[b, 0.0]).unwrap()
    }

    #[test]
    fn example_truncation() {
        let t = truncated_hankel(&example(), 3).unwrap();
        let expect = Matrix::from_row_slice(3, 3, &[0.75, 0.0, 0.1875, 0.0, 0.1875, 0.0, 0.1875, 0.0, 0.046875]);
        assert!((t.matrix() - expect).amax() < 1e-15);
        assert!(t.tail_bound() > 0.0);
    }

    #[test]
    fn zero_and_geometric_truncations() {
        let t = truncated_hankel(&Wfa::zero(), 5).unwrap();
        assert_eq!(t.matrix().norm(), 0.0);
        assert_eq!(t.tail_bound(), 0.0);
        let g = Wfa::from_rows(&[1.0], &[&[0.5]], &[1.0]).unwrap();
        let t = truncated_hankel(&g, 2).unwrap();
        assert_eq!(t.matrix(), &Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 0.25]));
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let g = Wfa::from_rows(&[1.0], &[&[0.7]], &[1.0]).unwrap();
        for size in [4, 8, 16] {
            let t = truncated_hankel(&g, size).unwrap();
            // true Frobenius tail by brute force
            let big = truncated_hankel(&g, 400).unwrap();
            let mut tail = big.matrix().norm_squared();
            tail -= big.matrix().view((0, 0), (size, size)).norm_squared();
            assert!(t.tail_bound() >= tail.sqrt() * (1.0 - 1e-9), "{size}");
            assert!(t.tail_bound() <= tail.sqrt() * 1.01, "{size}");
        }
    }

    #[test]
    fn unstable_rejected() {
        let w = Wfa::from_rows(&[1.0], &[&[1.0]], &[1.0]).unwrap();
        assert!(matches!(truncated_hankel(&w, 4), Err(Error::SpectralRadiusTooLarge { .. })));
    }

    #[test]
    fn lanczos_matches_dense_eigen() {
        let h = Matrix::from_fn(30, 30, |i, j| (((i + j) as f64) * 0.37).sin() * 0.8f64.powi((i + j) as i32));
        let dense = SymmetricEigen::new(h.clone()).eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!((symmetric_norm(&h) - dense).abs() < 1e-12 * dense);
        let neg = -Matrix::identity(5, 5) * 3.0;
        assert!((symmetric_norm(&neg) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn example_spectral_errors() {
        let e = example();
        assert_eq!(spectral_error(&e, &e, 8).unwrap().value, 0.0);
        let z = spectral_error(&e, &Wfa::zero(), 64).unwrap();
        assert!((z.value - 0.8).abs() < 1e-6);
        let t = truncated_hankel(&e, 64).unwrap();
        let s = t.singular_values();
        assert!((s[0] - 0.8).abs() < 1e-6 && (s[1] - 0.2).abs() < 1e-6);
        let (approx, err) = svd_truncation_baseline(&t, 1);
        assert!((err - 0.2).abs() < 1e-6);
        assert!(((t.matrix() - approx).norm() - err).abs() < 1e-6);
        assert_eq!(svd_truncation_baseline(&t, 64).1, 0.0);
    }

    #[test]
    fn sva_truncation_of_example() {
        let tol = Tolerances::default();
        let s = to_sva(&example(), &tol).unwrap();
        let t = sva_truncation_baseline(&s, 1);
        assert_eq!(t.n(), 1);
        assert!((t.evaluate(0) - 0.75).abs() < 1e-14);
        let err = spectral_error(s.wfa(), &t, 64).unwrap().value;
        assert!(err >= 0.2 - 1e-8);
        assert_eq!(sva_truncation_baseline(&s, 2), *s.wfa());
        assert_eq!(hankel_singular_numbers(&s).len(), 2);
    }

    #[test]
    fn auto_size_grows_with_slow_decay() {
        let fast = Wfa::from_rows(&[1.0], &[&[0.3]], &[1.0]).unwrap();
        let slow = Wfa::from_rows(&[1.0], &[&[0.95]], &[1.0]).unwrap();
        let (nf, cf) = auto_hankel_size(&fast, 1.0).unwrap();
        let (ns, _) = auto_hankel_size(&slow, 1.0).unwrap();
        assert_eq!((nf, cf), (16, false));
        assert!(ns > nf);
    }

    #[test]
    fn dominant_pairs_match_dense_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Matrix::from_fn(40, 40, |_, _| rng.random::<f64>() - 0.5);
        let h = &g + g.transpose();
        let mut dense: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().map(|x| x.abs()).collect();
        dense.sort_by(|a, b| b.total_cmp(a));
        let pairs = dominant_eigenpairs(&h, 4);
        for (i, (l, v)) in pairs.iter().enumerate() {
            assert!((l.abs() - dense[i]).abs() < 1e-12 * dense[0]);
            assert!((&h * v - v * *l).norm() < 1e-10 * dense[0]);
        }
    }

    #[test]
    fn svd_baseline_error_is_next_singular_value() {
        let t = truncated_hankel(&example(), 16).unwrap();
        let sv = t.singular_values();
        let (approx, err) = svd_truncation_baseline(&t, 1);
        assert!((err - sv[1]).abs() < 1e-14);
        assert!((symmetric_norm(&(t.matrix() - approx)) - sv[1]).abs() < 1e-14);
    }
}
