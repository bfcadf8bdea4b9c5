//! Reduction of automata whose transition has eigenvalues outside the unit
//! disc. The stable and anti-stable parts are split apart, the anti-stable
//! part is reflected into the disc through `z ↦ 1/z`, and each part is
//! reduced on its own. The recombined result is not optimal.

use crate::aak::{aak_reduce, block_diagonalize, ReduceOptions, ReductionReport};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;
use crate::wfa::{minimize, to_sva, Wfa};

#[derive(Debug, Clone, PartialEq)]
pub struct SplitWfa {
    /// All eigenvalues strictly inside the unit disc.
    pub stable: Wfa,
    /// All eigenvalues strictly outside the unit disc.
    pub unstable: Wfa,
    pub original_n: usize,
}

pub fn split_stable_unstable(w: &Wfa, tol: &Tolerances) -> Result<SplitWfa> {
    let (stable, unstable) = block_diagonalize(w, tol)?;
    Ok(SplitWfa { stable, unstable, original_n: w.n() })
}

/// `⟨α, A, β⟩ ↦ ⟨α, A⁻¹, −A⁻¹β⟩`. For `|λ(A)| > 1` the result is stable and
/// its coefficients are `−αᵀA^{−m}β` for `m = 1, 2, …`; its symbol is
/// `z⁻¹φ(z⁻¹)`. The map is an involution.
pub fn reflect_unstable(w: &Wfa) -> Result<Wfa> {
    let n = w.n();
    if n == 0 {
        return Ok(Wfa::empty());
    }
    let sv = w.transition().clone().singular_values();
    if sv.min() <= 1e-13 * sv.max() {
        return Err(Error::SingularTransition);
    }
    let inv = w.transition().clone().full_piv_lu().try_inverse().ok_or(Error::SingularTransition)?;
    let beta = -(&inv * w.beta());
    Wfa::new(w.alpha().clone(), inv, beta)
}

/// Reduction outcome for one side of the split.
#[derive(Debug, Clone, PartialEq)]
pub struct PartReduction {
    /// States of the part after minimization.
    pub n: usize,
    /// Requested size, clamped to `n`.
    pub k: usize,
    /// Hankel singular numbers of the (reflected, for the anti-stable side) part.
    pub singular_numbers: Vec<f64>,
    /// Optimal error for this part, `σ_k`, or zero when nothing was removed.
    pub sigma_k: f64,
    /// Present when an actual reduction ran (`0 < k < n`).
    pub report: Option<ReductionReport>,
}

impl PartReduction {
    pub fn certified(&self) -> bool {
        self.report.as_ref().is_none_or(|r| r.certified)
    }

    pub fn achieved_error(&self) -> Option<f64> {
        match &self.report {
            Some(r) => r.achieved_error(),
            None if self.k == 0 => Some(self.singular_numbers.first().copied().unwrap_or(0.0)),
            None => Some(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralReduction {
    pub reduced: Wfa,
    pub stable: PartReduction,
    pub unstable: PartReduction,
    /// `max_{j ≤ 2n} |f(j) − f̂(j)|` between input and result.
    pub coefficient_deviation: f64,
    /// Always set: the combination of two optimal parts is not optimal.
    pub non_optimal: bool,
}

/// Reduces the stable part to `k_stable` states and the anti-stable part to
/// `k_unstable` states. A target of zero drops the part.
pub fn reduce_general(w: &Wfa, k_stable: usize, k_unstable: usize, opts: &ReduceOptions) -> Result<GeneralReduction> {
    let tol = &opts.tolerances;
    let split = split_stable_unstable(w, tol)?;
    let (stable_red, stable) = reduce_part(&split.stable, k_stable, opts)?;
    let reflected = reflect_unstable(&split.unstable)?;
    let (reflected_red, unstable) = reduce_part(&reflected, k_unstable, opts)?;
    let unstable_red = reflect_unstable(&reflected_red)?;
    let reduced = match (stable_red.n(), unstable_red.n()) {
        (0, 0) => Wfa::zero(),
        (_, 0) => stable_red,
        (0, _) => unstable_red,
        _ => stable_red.sum(&unstable_red),
    };
    let horizon = 2 * w.n() + 1;
    let coefficient_deviation = w
        .coefficients(horizon)
        .iter()
        .zip(reduced.coefficients(horizon))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(GeneralReduction { reduced, stable, unstable, coefficient_deviation, non_optimal: true })
}

fn reduce_part(part: &Wfa, k: usize, opts: &ReduceOptions) -> Result<(Wfa, PartReduction)> {
    let tol = &opts.tolerances;
    let part = if part.n() == 0 { Wfa::empty() } else { minimize(part, tol) };
    let is_zero = part.n() <= 1 && part.coefficients(2).iter().all(|&x| x == 0.0);
    if part.n() == 0 || is_zero {
        let summary = PartReduction { n: 0, k: 0, singular_numbers: vec![], sigma_k: 0.0, report: None };
        return Ok((Wfa::empty(), summary));
    }
    let s = to_sva(&part, tol)?;
    let n = s.n();
    let k = k.min(n);
    let singular_numbers = s.singular_numbers().to_vec();
    let summary = |sigma_k, report| PartReduction { n, k, singular_numbers: singular_numbers.clone(), sigma_k, report };
    if k == n {
        return Ok((s.wfa().clone(), summary(0.0, None)));
    }
    if k == 0 {
        return Ok((Wfa::empty(), summary(singular_numbers[0], None)));
    }
    let report = aak_reduce(&s, k, opts)?;
    Ok((report.reduced.clone(), summary(report.sigma_k, Some(report))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aak::HankelSize;
    use crate::symbol::symbol_eval;
    use num_complex::Complex64;

    fn diag_example() -> Wfa {
        Wfa::from_rows(&[1.0, 1.0], &[&[0.5, 0.0], &[0.0, 2.0]], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn split_of_diagonal_example() {
        let sp = split_stable_unstable(&diag_example(), &Tolerances::default()).unwrap();
        assert_eq!(sp.original_n, 2);
        assert_eq!(sp.stable.transition()[(0, 0)], 0.5);
        assert_eq!(sp.unstable.transition()[(0, 0)], 2.0);
        assert!((sp.stable.alpha()[0] * sp.stable.beta()[0] - 1.0).abs() < 1e-15);
        assert!((sp.unstable.alpha()[0] * sp.unstable.beta()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn split_of_coupled_example_sums_back() {
        let w = Wfa::from_rows(&[1.0, 0.3], &[&[0.5, 1.0], &[0.0, 2.0]], &[0.2, 1.0]).unwrap();
        let sp = split_stable_unstable(&w, &Tolerances::default()).unwrap();
        for j in 0..=8 {
            let f = w.evaluate(j);
            let g = sp.stable.evaluate(j) + sp.unstable.evaluate(j);
            assert!((f - g).abs() <= 1e-8 * f.abs().max(1.0), "j={j}: {f} vs {g}");
        }
    }

    #[test]
    fn reflection_of_scalar() {
        let w = Wfa::from_rows(&[1.0], &[&[2.0]], &[1.0]).unwrap();
        let r = reflect_unstable(&w).unwrap();
        assert_eq!(r, Wfa::from_rows(&[1.0], &[&[0.5]], &[-0.5]).unwrap());
        for k in 0..20 {
            assert!((r.evaluate(k) + 2f64.powi(-(k as i32) - 1)).abs() < 1e-15);
        }
        let tol = Tolerances::default();
        for j in 0..8 {
            let z = Complex64::from_polar(2.0, 0.4 * j as f64);
            let a = symbol_eval(&r, z, &tol).unwrap();
            let b = symbol_eval(&w, z.inv(), &tol).unwrap();
            assert!((a - b / z).norm() < 1e-14);
        }
    }

    #[test]
    fn reflection_is_an_involution() {
        let w = Wfa::from_rows(&[0.3, -1.0], &[&[2.0, 0.5], &[0.1, -3.0]], &[1.0, 0.7]).unwrap();
        let back = reflect_unstable(&reflect_unstable(&w).unwrap()).unwrap();
        assert!((back.transition() - w.transition()).amax() < 1e-14);
        assert!((back.beta() - w.beta()).amax() < 1e-14);
        let d =
            reflect_unstable(&Wfa::from_rows(&[1.0, 1.0], &[&[2.0, 0.0], &[0.0, 3.0]], &[1.0, 1.0]).unwrap()).unwrap();
        assert!((d.transition()[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((d.transition()[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_transition_rejected() {
        let w = Wfa::from_rows(&[1.0], &[&[0.0]], &[1.0]).unwrap();
        assert!(matches!(reflect_unstable(&w), Err(Error::SingularTransition)));
    }

    #[test]
    fn diagonal_example_is_kept() {
        let out = reduce_general(&diag_example(), 1, 1, &ReduceOptions::default()).unwrap();
        assert!(out.non_optimal);
        assert_eq!(out.reduced.n(), 2);
        assert!(out.coefficient_deviation < 1e-12);
        assert!(out.stable.report.is_none() && out.unstable.report.is_none());
    }

    #[test]
    fn stable_input_matches_plain_reduction() {
        let b = 3f64.sqrt() / 2.0;
        let w = Wfa::from_rows(&[b, 0.0], &[&[0.0, 0.5], &[0.5, 0.0]], &[b, 0.0]).unwrap();
        let opts = ReduceOptions { hankel_size: HankelSize::Fixed(64), ..Default::default() };
        let out = reduce_general(&w, 1, 0, &opts).unwrap();
        let direct = aak_reduce(&to_sva(&w, &opts.tolerances).unwrap(), 1, &opts).unwrap();
        assert_eq!(out.unstable.n, 0);
        for j in 0..10 {
            assert!((out.reduced.evaluate(j) - direct.reduced.evaluate(j)).abs() < 1e-14);
        }
        assert!(out.stable.certified());
    }
}
