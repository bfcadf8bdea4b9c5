//! One-letter weighted automata and their canonical forms.

mod json;
mod minimize;
mod sva;

pub use json::{from_json, to_json, WfaJson};
pub use minimize::minimize;
pub use sva::{gramians, to_sva, Gramians, SvaResiduals, SvaWfa};

use crate::error::{Error, Result};
use crate::linalg::{check_finite, Matrix, Vector};
use crate::tolerances::Tolerances;

/// A weighted automaton `⟨α, A, β⟩` over a one-letter alphabet, computing
/// `f(k) = αᵀAᵏβ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wfa {
    alpha: Vector,
    transition: Matrix,
    beta: Vector,
}

impl Wfa {
    pub fn new(alpha: Vector, transition: Matrix, beta: Vector) -> Result<Self> {
        let n = transition.nrows();
        if transition.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "transition must be square, got {}x{}",
                n,
                transition.ncols()
            )));
        }
        if alpha.len() != n || beta.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "alpha has {} entries and beta {}, transition is {n}x{n}",
                alpha.len(),
                beta.len()
            )));
        }
        if !alpha.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("alpha"));
        }
        check_finite(&transition, "transition")?;
        if !beta.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("beta"));
        }
        Ok(Self { alpha, transition, beta })
    }

    /// Convenience constructor from row-major data.
    pub fn from_rows(alpha: &[f64], transition: &[&[f64]], beta: &[f64]) -> Result<Self> {
        let n = transition.len();
        if transition.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("transition rows have unequal lengths".into()));
        }
        let flat: Vec<f64> = transition.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(
            Vector::from_column_slice(alpha),
            Matrix::from_row_slice(n, n, &flat),
            Vector::from_column_slice(beta),
        )
    }

    /// The minimal realization of the zero function: one state, all weights zero.
    pub fn zero() -> Self {
        Self::empty_of(1)
    }

    /// An automaton with no states; it computes the zero function.
    pub fn empty() -> Self {
        Self::empty_of(0)
    }

    fn empty_of(n: usize) -> Self {
        Self { alpha: Vector::zeros(n), transition: Matrix::zeros(n, n), beta: Vector::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.transition.nrows()
    }

    pub fn alpha(&self) -> &Vector {
        &self.alpha
    }

    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    pub fn beta(&self) -> &Vector {
        &self.beta
    }

    pub fn into_parts(self) -> (Vector, Matrix, Vector) {
        (self.alpha, self.transition, self.beta)
    }

    /// `f(k) = αᵀAᵏβ`, by `k` matrix-vector products.
    pub fn evaluate(&self, k: usize) -> f64 {
        let mut v = self.beta.clone();
        let mut w = Vector::zeros(self.n());
        for _ in 0..k {
            self.transition.mul_to(&v, &mut w);
            std::mem::swap(&mut v, &mut w);
        }
        self.alpha.dot(&v)
    }

    /// `f(0), …, f(len − 1)`.
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(len);
        let mut v = self.beta.clone();
        let mut w = Vector::zeros(self.n());
        for i in 0..len {
            out.push(self.alpha.dot(&v));
            if i + 1 < len {
                self.transition.mul_to(&v, &mut w);
                std::mem::swap(&mut v, &mut w);
            }
        }
        out
    }

    /// Automaton computing `f₁ − f₂`, realized as a direct sum.
    pub fn difference(&self, other: &Wfa) -> Wfa {
        self.direct_sum_signed(other, -1.0)
    }

    /// Automaton computing `f₁ + f₂`, realized as a direct sum.
    pub fn sum(&self, other: &Wfa) -> Wfa {
        self.direct_sum_signed(other, 1.0)
    }

    fn direct_sum_signed(&self, other: &Wfa, sign: f64) -> Wfa {
        let (n1, n2) = (self.n(), other.n());
        let n = n1 + n2;
        let mut alpha = Vector::zeros(n);
        alpha.rows_mut(0, n1).copy_from(&self.alpha);
        alpha.rows_mut(n1, n2).copy_from(&(sign * &other.alpha));
        let mut beta = Vector::zeros(n);
        beta.rows_mut(0, n1).copy_from(&self.beta);
        beta.rows_mut(n1, n2).copy_from(&other.beta);
        let mut a = Matrix::zeros(n, n);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.transition);
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.transition);
        Wfa { alpha, transition: a, beta }
    }

    /// Change of basis `⟨Tᵀα, T⁻¹AT, T⁻¹β⟩`, given `T` and its inverse.
    pub fn transform(&self, t: &Matrix, t_inv: &Matrix) -> Wfa {
        Wfa { alpha: t.transpose() * &self.alpha, transition: t_inv * &self.transition * t, beta: t_inv * &self.beta }
    }

    /// Multiplies every output by `c`.
    pub fn scaled(&self, c: f64) -> Wfa {
        Wfa { alpha: c * &self.alpha, transition: self.transition.clone(), beta: self.beta.clone() }
    }

    pub fn spectral_radius(&self) -> f64 {
        crate::linalg::spectral_radius(&self.transition)
    }
}

/// Coefficient-wise comparison on `k = 0..=horizon`, relative to
/// `max(1, |f|)`.
pub fn equivalent(w1: &Wfa, w2: &Wfa, horizon: usize, tol: &Tolerances) -> bool {
    let f1 = w1.coefficients(horizon + 1);
    let f2 = w2.coefficients(horizon + 1);
    f1.iter().zip(&f2).all(|(a, b)| (a - b).abs() <= tol.equivalence * 1f64.max(a.abs()).max(b.abs()))
}

/// Horizon that decides exact equivalence of two rational series.
pub fn default_horizon(w1: &Wfa, w2: &Wfa) -> usize {
    2 * (w1.n() + w2.n())
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn example_values() {
        let w = example();
        assert!((w.evaluate(0) - 0.75).abs() < 1e-15);
        assert_eq!(w.evaluate(1), 0.0);
        assert!((w.evaluate(2) - 0.1875).abs() < 1e-15);
        let c = w.coefficients(5);
        for (k, v) in c.iter().enumerate() {
            assert_eq!(*v, w.evaluate(k));
        }
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(matches!(Wfa::from_rows(&[1.0, 2.0], &[&[0.5]], &[1.0]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(Wfa::from_rows(&[f64::NAN], &[&[0.5]], &[1.0]), Err(Error::NonFinite("alpha"))));
        assert!(matches!(Wfa::from_rows(&[1.0], &[&[f64::INFINITY]], &[1.0]), Err(Error::NonFinite("transition"))));
    }

    #[test]
    fn equivalence_examples() {
        let tol = Tolerances::default();
        assert!(equivalent(&example(), &example(), 8, &tol));
        assert!(!equivalent(&example(), &Wfa::zero(), 8, &tol));
        // redundant embedding of the geometric series
        let emb = Wfa::from_rows(&[1.0, 0.0], &[&[0.5, 0.0], &[0.0, 0.25]], &[1.0, 7.0]).unwrap();
        assert!(equivalent(&geometric(), &emb, 6, &tol));
    }

    #[test]
    fn difference_and_sum() {
        let d = example().difference(&example());
        assert!(d.coefficients(10).iter().all(|v| *v == 0.0));
        let s = geometric().sum(&geometric());
        assert_eq!(s.evaluate(3), 0.25);
    }
}
