use nalgebra::SymmetricEigen;

use super::Wfa;
use crate::error::{Error, Result};
use crate::linalg::{pivoted_cholesky, solve_discrete_lyapunov, solve_stein, Matrix, Vector};
use crate::tolerances::Tolerances;

/// Reachability (`p`) and observability (`q`) Gramians:
/// `P − APAᵀ = ββᵀ` and `Q − AᵀQA = ααᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gramians {
    pub p: Matrix,
    pub q: Matrix,
}

pub fn gramians(w: &Wfa, tol: &Tolerances) -> Result<Gramians> {
    let radius = w.spectral_radius();
    if !(radius < 1.0 - tol.radius) {
        return Err(Error::SpectralRadiusTooLarge { radius });
    }
    let a = w.transition();
    let p = solve_discrete_lyapunov(a, &(w.beta() * w.beta().transpose()), tol)?;
    let q = solve_discrete_lyapunov(&a.transpose(), &(w.alpha() * w.alpha().transpose()), tol)?;
    Ok(Gramians { p, q })
}

/// An automaton in singular-value form: both Gramians equal
/// `diag(singular_numbers)` and, with `S = diag(signs)`, `α = Sβ` and
/// `A = SAᵀS`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvaWfa {
    wfa: Wfa,
    singular_numbers: Vec<f64>,
    signs: Vec<f64>,
}

/// Relative defects of the singular-value form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvaResiduals {
    /// `max(‖D − ADAᵀ − ββᵀ‖, ‖D − AᵀDA − ααᵀ‖) / ‖D‖`.
    pub lyapunov: f64,
    /// `max(‖A − SAᵀS‖ / ‖A‖, ‖α − Sβ‖ / ‖α‖)`.
    pub sign_symmetry: f64,
}

impl SvaWfa {
    /// Wraps an automaton claimed to be in singular-value form, checking
    /// the claim to `1e-8` relative.
    pub fn new(wfa: Wfa, singular_numbers: Vec<f64>, signs: Vec<f64>) -> Result<Self> {
        let n = wfa.n();
        if singular_numbers.len() != n || signs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} states but {} singular numbers and {} signs",
                singular_numbers.len(),
                signs.len()
            )));
        }
        if singular_numbers.iter().any(|s| !(*s > 0.0)) || singular_numbers.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidAutomaton("singular numbers must be positive and non-increasing".into()));
        }
        if signs.iter().any(|s| s.abs() != 1.0) {
            return Err(Error::InvalidAutomaton("signs must be +1 or -1".into()));
        }
        let s = Self { wfa, singular_numbers, signs };
        let r = s.residuals();
        if r.lyapunov > 1e-8 || r.sign_symmetry > 1e-8 {
            return Err(Error::InvalidAutomaton(format!(
                "not in singular-value form (Gramian defect {:e}, sign defect {:e})",
                r.lyapunov, r.sign_symmetry
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_parts(wfa: Wfa, singular_numbers: Vec<f64>, signs: Vec<f64>) -> Self {
        Self { wfa, singular_numbers, signs }
    }

    pub fn wfa(&self) -> &Wfa {
        &self.wfa
    }

    pub fn n(&self) -> usize {
        self.wfa.n()
    }

    /// Hankel singular numbers, non-increasing.
    pub fn singular_numbers(&self) -> &[f64] {
        &self.singular_numbers
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn residuals(&self) -> SvaResiduals {
        let a = self.wfa.transition();
        let alpha = self.wfa.alpha();
        let beta = self.wfa.beta();
        let d = Matrix::from_diagonal(&Vector::from_column_slice(&self.singular_numbers));
        let dn = d.norm().max(f64::MIN_POSITIVE);
        let rp = (&d - a * &d * a.transpose() - beta * beta.transpose()).norm() / dn;
        let rq = (&d - a.transpose() * &d * a - alpha * alpha.transpose()).norm() / dn;
        let s = Matrix::from_diagonal(&Vector::from_column_slice(&self.signs));
        let ra = (a - &s * a.transpose() * &s).norm() / a.norm().max(f64::MIN_POSITIVE);
        let rv = (alpha - &s * beta).norm() / alpha.norm().max(f64::MIN_POSITIVE);
        SvaResiduals { lyapunov: rp.max(rq), sign_symmetry: ra.max(rv) }
    }
}

/// Balances a minimal stable automaton into singular-value form.
///
/// Basis signs are fixed so that each `βᵢ` is positive, or when `βᵢ`
/// vanishes, the first significant entry of column `i` of `A` is.
pub fn to_sva(w: &Wfa, tol: &Tolerances) -> Result<SvaWfa> {
    let n = w.n();
    if n == 0 {
        return Err(Error::NotMinimal { states: 0, rank: 0 });
    }
    let g = gramians(w, tol)?;
    let chol_tol = (n as f64) * f64::EPSILON;
    let (lp, rp) = pivoted_cholesky(&g.p, chol_tol);
    let (lq, rq) = pivoted_cholesky(&g.q, chol_tol);
    if rp < n || rq < n {
        return Err(Error::NotMinimal { states: n, rank: rp.min(rq) });
    }
    let svd = (lq.transpose() * &lp).svd(true, true);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let d: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rank = d.iter().filter(|&&s| s > tol.rank * d[0]).count();
    if rank < n {
        return Err(Error::NotMinimal { states: n, rank });
    }
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut t = Matrix::zeros(n, n);
    let mut t_inv = Matrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        let s = d[c].sqrt();
        t.set_column(c, &(&lp * v_t.row(i).transpose() / s));
        t_inv.set_row(c, &((lq.clone() * u.column(i)).transpose() / s));
    }
    let balanced = w.transform(&t, &t_inv);

    // In singular-value form the cross Gramian X − AXA = βαᵀ equals D·S.
    // Inside a group of tied singular numbers the basis is only fixed up to
    // rotation, which is chosen here to diagonalize X.
    let a = balanced.transition().clone();
    let cross = solve_stein(&a, &a, &(balanced.beta() * balanced.alpha().transpose()), tol)?;
    let mut rotation = Matrix::identity(n, n);
    let mut signs = vec![0.0; n];
    for (start, len) in groups(&d, tol.multiplicity) {
        if len == 1 {
            signs[start] = if cross[(start, start)] >= 0.0 { 1.0 } else { -1.0 };
            continue;
        }
        let mean = d[start..start + len].iter().sum::<f64>() / len as f64;
        let block = cross.view((start, start), (len, len));
        let sym = (block + block.transpose()) / (2.0 * mean);
        let eig = SymmetricEigen::new(sym);
        let mut idx: Vec<usize> = (0..len).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        for (c, &i) in idx.iter().enumerate() {
            rotation.view_mut((start, start + c), (len, 1)).copy_from(&eig.eigenvectors.column(i));
            signs[start + c] = if eig.eigenvalues[i] >= 0.0 { 1.0 } else { -1.0 };
        }
    }
    let rotated = balanced.transform(&rotation, &rotation.transpose());
    let flips = Matrix::from_diagonal(&Vector::from_vec(sign_convention(&rotated)));
    let oriented = rotated.transform(&flips, &flips);

    // Project onto the exact sign-symmetric structure; this only removes
    // rounding noise.
    let s = Matrix::from_diagonal(&Vector::from_column_slice(&signs));
    let a = oriented.transition();
    let a_sym = (a + &s * a.transpose() * &s) / 2.0;
    let beta = (oriented.beta() + &s * oriented.alpha()) / 2.0;
    let alpha = &s * &beta;
    let wfa = Wfa::new(alpha, a_sym, beta)?;
    Ok(SvaWfa::from_parts(wfa, d, signs))
}

/// Contiguous runs of tied singular numbers as `(start, len)`.
pub(crate) fn groups(d: &[f64], rel_tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let scale = d.first().copied().unwrap_or(0.0);
    let mut start = 0;
    for i in 1..=d.len() {
        if i == d.len() || (d[i - 1] - d[i]).abs() > rel_tol * scale {
            out.push((start, i - start));
            start = i;
        }
    }
    out
}

fn sign_convention(w: &Wfa) -> Vec<f64> {
    let n = w.n();
    let bscale = w.beta().amax();
    let a = w.transition();
    let ascale = a.amax();
    (0..n)
        .map(|i| {
            let b = w.beta()[i];
            if b.abs() > 1e-12 * bscale {
                return b.signum();
            }
            (0..n).map(|j| a[(j, i)]).find(|v| v.abs() > 1e-12 * ascale).map_or(1.0, f64::signum)
        })
        .collect()
}
