use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::hankel_matrix;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::symbol::{circle_samples, ErrorRatio};
use crate::tolerances::Tolerances;
use crate::wfa::SvaWfa;

const MIN_SAMPLES: usize = 256;
const MAX_SAMPLES: usize = 1 << 20;

/// Hankel matrix of the optimal approximant obtained from the error ratio
/// alone, independent of the state-space construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialApproximation {
    /// `G_N = H_N − M_N`.
    pub hankel: Matrix,
    /// `σ_k(G_N) / σ₀(G_N)`; near zero when `G_N` has rank `k`.
    pub rank_defect: f64,
    /// Circle samples used by the final DFT.
    pub samples: usize,
}

/// The error `e = φ − ψ` of the optimal approximation is `σ_k` times the
/// ratio of Schmidt functions. Its Laurent coefficients at negative powers,
/// read off a DFT of circle samples, form the Hankel matrix `M` of the
/// error, so `G = H − M`. The sample count doubles until the needed
/// coefficients stop changing.
pub fn polynomial_method(s: &SvaWfa, k: usize, size: usize, tol: &Tolerances) -> Result<PolynomialApproximation> {
    let n = s.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidRank { k, n });
    }
    super::super::aak::group_multiplicity(s.singular_numbers(), k, tol.multiplicity)?;
    let ratio = ErrorRatio::new(s, k, None, tol)?;
    let needed = 2 * size - 1;
    let scale = s.singular_numbers()[0];

    let mut samples = (8 * size).max(MIN_SAMPLES).next_power_of_two();
    let mut previous = negative_coefficients(&ratio, samples, needed)?;
    loop {
        samples *= 2;
        let current = negative_coefficients(&ratio, samples, needed)?;
        let change = current.iter().zip(&previous).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change <= 1e-11 * scale {
            let f = s.wfa().coefficients(needed);
            let g: Vec<f64> = f.iter().zip(&current).map(|(a, b)| a - b).collect();
            let hankel = hankel_matrix(&g, size);
            let mut sv: Vec<f64> = SymmetricEigen::new(hankel.clone()).eigenvalues.iter().map(|x| x.abs()).collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            let rank_defect = match (sv.first(), sv.get(k)) {
                (Some(&top), Some(&kth)) if top > 0.0 => kth / top,
                _ => 0.0,
            };
            return Ok(PolynomialApproximation { hankel, rank_defect, samples });
        }
        if samples >= MAX_SAMPLES {
            return Err(Error::ExpansionNotConverged { change });
        }
        previous = current;
    }
}

/// Real parts of the coefficients of `z^{-1}, …, z^{-count}`.
fn negative_coefficients(ratio: &ErrorRatio<'_>, samples: usize, count: usize) -> Result<Vec<f64>> {
    let mut buf = circle_samples(samples).iter().map(|p| ratio.eval(p.z)).collect::<Result<Vec<Complex64>>>()?;
    FftPlanner::new().plan_fft_forward(samples).process(&mut buf);
    Ok((1..=count).map(|m| buf[samples - m].re / samples as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wfa::{to_sva, Wfa};

    #[test]
    fn example_optimum_is_a_single_corner_entry() {
        let b = 3f64.sqrt() / 2.0;
        let w = Wfa::from_rows(&[b, 0.0], &[&[0.0, 0.5], &[0.5, 0.0]], &[b, 0.0]).unwrap();
        let tol = Tolerances::default();
        let s = to_sva(&w, &tol).unwrap();
        let p = polynomial_method(&s, 1, 32, &tol).unwrap();
        assert!((p.hankel[(0, 0)] - 0.8).abs() < 1e-6);
        let mut rest = p.hankel.clone();
        rest[(0, 0)] = 0.0;
        assert!(rest.amax() < 1e-6);
        assert!(p.rank_defect < 1e-6);
    }

    #[test]
    fn invalid_rank_rejected() {
        let w = Wfa::from_rows(&[1.0], &[&[0.5]], &[1.0]).unwrap();
        let tol = Tolerances::default();
        let s = to_sva(&w, &tol).unwrap();
        assert!(matches!(polynomial_method(&s, 1, 8, &tol), Err(Error::InvalidRank { .. })));
    }
}
