//! Complex-function view of an automaton: the symbol `φ(z) = αᵀ(z − A)⁻¹β`,
//! whose Laurent coefficient at `z^{-m-1}` is `f(m)`, together with the
//! Schmidt functions and the unimodular error ratio of a reduction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, Matrix, Vector};
use crate::tolerances::Tolerances;
use crate::wfa::{SvaWfa, Wfa};

type CMatrix = DMatrix<Complex64>;
type CVector = DVector<Complex64>;

/// Pivot-ratio estimate above which a resolvent solve is logged as ill-conditioned.
const CONDITION_WARNING: f64 = 1e8;

/// Resolvent solves `(z − A)⁻¹v` and `(1 − zAᵀ)⁻¹v` guarded against poles.
pub(crate) struct Resolvent<'a> {
    a: &'a Matrix,
    poles: Vec<Complex64>,
    pole_tol: f64,
}

impl<'a> Resolvent<'a> {
    pub(crate) fn new(a: &'a Matrix, tol: &Tolerances) -> Result<Self> {
        Ok(Self { a, poles: eigenvalues(a)?, pole_tol: tol.pole })
    }

    /// `(z − A)⁻¹ rhs`.
    pub(crate) fn forward(&self, z: Complex64, rhs: &CVector) -> Result<CVector> {
        let distance = self.poles.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min);
        if distance <= self.pole_tol {
            return Err(Error::NearPole { distance });
        }
        let n = self.a.nrows();
        let m = CMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { z } else { Complex64::new(0.0, 0.0) };
            d - self.a[(i, j)]
        });
        solve(m, rhs, distance)
    }

    /// `(1 − zAᵀ)⁻¹ rhs`.
    pub(crate) fn reflected(&self, z: Complex64, rhs: &CVector) -> Result<CVector> {
        let distance = self.poles.iter().map(|p| (1.0 - z * p).norm()).fold(f64::INFINITY, f64::min);
        if distance <= self.pole_tol {
            return Err(Error::NearPole { distance });
        }
        let n = self.a.nrows();
        let m = CMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            d - z * self.a[(j, i)]
        });
        solve(m, rhs, distance)
    }
}

fn solve(m: CMatrix, rhs: &CVector, distance: f64) -> Result<CVector> {
    if m.nrows() == 0 {
        return Ok(CVector::zeros(0));
    }
    let lu = m.lu();
    let u = lu.u();
    let diag: Vec<f64> = u.diagonal().iter().map(|c| c.norm()).collect();
    let big = diag.iter().copied().fold(0.0, f64::max);
    let small = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if small == 0.0 {
        return Err(Error::NearPole { distance });
    }
    if big / small > CONDITION_WARNING {
        log::warn!("resolvent solve is ill-conditioned (pivot ratio {:.3e})", big / small);
    }
    lu.solve(rhs).ok_or(Error::NearPole { distance })
}

fn complexify(v: &Vector) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

fn dot(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Evaluates `αᵀ(z − A)⁻¹β`.
pub fn symbol_eval(w: &Wfa, z: Complex64, tol: &Tolerances) -> Result<Complex64> {
    let r = Resolvent::new(w.transition(), tol)?;
    symbol_with(&r, w, z)
}

pub(crate) fn symbol_with(r: &Resolvent<'_>, w: &Wfa, z: Complex64) -> Result<Complex64> {
    let x = r.forward(z, &complexify(w.beta()))?;
    Ok(dot(&complexify(w.alpha()), &x))
}

/// Coefficient of `z^m` in the Laurent expansion of the symbol at infinity:
/// `f(−m − 1)` for `m ≤ −1` and zero otherwise.
pub fn fourier_coefficient(w: &Wfa, m: i64) -> f64 {
    if m >= 0 {
        0.0
    } else {
        w.evaluate((-m - 1) as usize)
    }
}

/// Equispaced point `e^{2πi j/count}` on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSample {
    pub theta: f64,
    pub z: Complex64,
}

pub fn circle_samples(count: usize) -> Vec<CircleSample> {
    (0..count)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / count as f64;
            CircleSample { theta, z: Complex64::from_polar(1.0, theta) }
        })
        .collect()
}

/// Schmidt functions of the `σ_k` singular pair of a singular-value-form
/// automaton, with `e` a unit vector in the `σ_k` coordinates:
/// `ξ⁺(z) = σ_k^{-1/2} βᵀ(1 − zAᵀ)⁻¹e` and `η⁻(z) = σ_k^{-1/2} αᵀ(z − A)⁻¹e`.
pub struct SchmidtPair<'a> {
    sva: &'a SvaWfa,
    resolvent: Resolvent<'a>,
    direction: CVector,
    scale: f64,
}

impl<'a> SchmidtPair<'a> {
    pub fn xi_plus(&self, z: Complex64) -> Result<Complex64> {
        let x = self.resolvent.reflected(z, &self.direction)?;
        Ok(self.scale * dot(&complexify(self.sva.wfa().beta()), &x))
    }

    pub fn eta_minus(&self, z: Complex64) -> Result<Complex64> {
        let x = self.resolvent.forward(z, &self.direction)?;
        Ok(self.scale * dot(&complexify(self.sva.wfa().alpha()), &x))
    }
}

pub fn schmidt_functions<'a>(s: &'a SvaWfa, k: usize, tol: &Tolerances) -> Result<SchmidtPair<'a>> {
    let n = s.n();
    if k >= n {
        return Err(Error::InvalidRank { k, n });
    }
    let mut e = CVector::zeros(n);
    e[k] = Complex64::new(1.0, 0.0);
    schmidt_with_direction(s, s.singular_numbers()[k], e, tol)
}

fn schmidt_with_direction<'a>(
    s: &'a SvaWfa,
    sigma: f64,
    direction: CVector,
    tol: &Tolerances,
) -> Result<SchmidtPair<'a>> {
    Ok(SchmidtPair {
        sva: s,
        resolvent: Resolvent::new(s.wfa().transition(), tol)?,
        direction,
        scale: sigma.powf(-0.5),
    })
}

/// Coordinates `[start, end)` of the group of singular numbers tied with `σ_k`.
pub(crate) fn tied_group(d: &[f64], k: usize, rel_tol: f64) -> (usize, usize) {
    let scale = d[0];
    let close = |i: usize| (d[i] - d[k]).abs() <= rel_tol * scale;
    let mut start = k;
    while start > 0 && close(start - 1) {
        start -= 1;
    }
    let mut end = k + 1;
    while end < d.len() && close(end) {
        end += 1;
    }
    (start, end)
}

/// Evaluator for the error ratio `σ_k·η⁻(z)/ξ⁺(z)` built from a fixed
/// combination `w` of the tied `σ_k` coordinates.
pub struct ErrorRatio<'a> {
    pair: SchmidtPair<'a>,
    sigma: f64,
    denominator_tol: f64,
}

impl<'a> ErrorRatio<'a> {
    /// `w` combines the coordinates of the `σ_k` group; `None` picks its
    /// first coordinate.
    pub fn new(s: &'a SvaWfa, k: usize, w: Option<&[f64]>, tol: &Tolerances) -> Result<Self> {
        let n = s.n();
        if k >= n {
            return Err(Error::InvalidRank { k, n });
        }
        let (start, end) = tied_group(s.singular_numbers(), k, tol.multiplicity);
        let mut direction = CVector::zeros(n);
        match w {
            None => direction[start] = Complex64::new(1.0, 0.0),
            Some(w) => {
                if w.len() != end - start {
                    return Err(Error::DimensionMismatch(format!(
                        "combination has {} entries, the tied group has {}",
                        w.len(),
                        end - start
                    )));
                }
                for (i, &c) in w.iter().enumerate() {
                    direction[start + i] = Complex64::new(c, 0.0);
                }
            }
        }
        let sigma = s.singular_numbers()[k];
        // Denominators are compared against the size of β restricted to the group.
        let beta_scale = (start..end).map(|i| s.wfa().beta()[i].abs()).fold(0.0, f64::max).max(1.0);
        let pair = schmidt_with_direction(s, sigma, direction, tol)?;
        Ok(Self { pair, sigma, denominator_tol: 1e-13 * beta_scale * sigma.powf(-0.5) })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let den = self.pair.xi_plus(z)?;
        if den.norm() <= self.denominator_tol {
            return Err(Error::NearZeroDenominator);
        }
        Ok(self.sigma * self.pair.eta_minus(z)? / den)
    }
}

/// The error ratio at a single point.
pub fn error_ratio(s: &SvaWfa, k: usize, z: Complex64, tol: &Tolerances) -> Result<Complex64> {
    ErrorRatio::new(s, k, None, tol)?.eval(z)
}

/// Largest deviation from 1 of `|ratio|/σ_k` over a circle grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unimodularity {
    pub max_deviation: f64,
    pub skipped: usize,
}

/// Grid test that the error ratio has constant modulus `σ_k` on the circle.
/// Points where the denominator or a pole gets in the way are skipped.
pub fn unimodularity_check(s: &SvaWfa, k: usize, samples: usize, tol: &Tolerances) -> Result<Unimodularity> {
    let ratio = ErrorRatio::new(s, k, None, tol)?;
    let sigma = s.singular_numbers()[k];
    let mut out = Unimodularity { max_deviation: 0.0, skipped: 0 };
    for p in circle_samples(samples) {
        match ratio.eval(p.z) {
            Ok(e) => out.max_deviation = out.max_deviation.max((e.norm() / sigma - 1.0).abs()),
            Err(Error::NearZeroDenominator | Error::NearPole { .. }) => out.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Grid test on an actual reduction: with `ψ₀` the symbol of the auxiliary
/// automaton `⟨α̂, Â, β̂⟩`, `(φ − ψ₀ − C)/σ_k` must be unimodular for the
/// constant `C` by which the two sides differ from the error ratio.
pub fn reduction_unimodularity(
    s: &SvaWfa,
    k: usize,
    auxiliary: &Wfa,
    samples: usize,
    tol: &Tolerances,
) -> Result<Unimodularity> {
    let ratio = ErrorRatio::new(s, k, None, tol)?;
    let sigma = s.singular_numbers()[k];
    let rs = Resolvent::new(s.wfa().transition(), tol)?;
    let ra = Resolvent::new(auxiliary.transition(), tol)?;
    let mut diffs = Vec::with_capacity(samples);
    let mut skipped = 0;
    for p in circle_samples(samples) {
        let eval = || -> Result<(Complex64, Complex64)> {
            let d = symbol_with(&rs, s.wfa(), p.z)? - symbol_with(&ra, auxiliary, p.z)?;
            Ok((d, ratio.eval(p.z)?))
        };
        match eval() {
            Ok(v) => diffs.push(v),
            Err(Error::NearZeroDenominator | Error::NearPole { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if diffs.is_empty() {
        return Ok(Unimodularity { max_deviation: f64::INFINITY, skipped });
    }
    let c = diffs.iter().map(|(d, e)| d - e).sum::<Complex64>() / diffs.len() as f64;
    let max_deviation = diffs.iter().map(|(d, _)| ((d - c).norm() / sigma - 1.0).abs()).fold(0.0, f64::max);
    Ok(Unimodularity { max_deviation, skipped })
}

/// One eigenvalue of the transition matrix, i.e. one pole of the symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub value: Complex64,
    pub modulus: f64,
    pub inside_disc: bool,
}

/// Poles of the symbol with multiplicity.
pub fn pole_report(w: &Wfa) -> Result<Vec<Pole>> {
    Ok(eigenvalues(w.transition())?
        .into_iter()
        .map(|value| Pole { value, modulus: value.norm(), inside_disc: value.norm() < 1.0 })
        .collect())
}
