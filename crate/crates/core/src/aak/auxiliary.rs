use serde::Serialize;

use super::partition::PartitionBlocks;
use super::Warning;
use crate::error::{Error, Result};
use crate::linalg::{min_norm_lstsq, null_space, Matrix, Vector};
use crate::tolerances::Tolerances;
use crate::wfa::Wfa;

/// Which set of formulas produced the auxiliary automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Alpha2Nonzero,
    Alpha2Zero,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Alpha2Nonzero => "alpha2_nonzero",
            Branch::Alpha2Zero => "alpha2_zero",
        }
    }
}

/// The automaton `⟨α̂, Â, β̂⟩` whose symbol, up to a constant, is the optimal
/// unconstrained approximant; its stable part is the reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Auxiliary {
    pub transition: Matrix,
    pub alpha: Vector,
    pub beta: Vector,
    pub branch: Branch,
    pub warnings: Vec<Warning>,
}

impl Auxiliary {
    pub fn to_wfa(&self) -> Wfa {
        Wfa::new(self.alpha.clone(), self.transition.clone(), self.beta.clone())
            .expect("auxiliary automaton has consistent shapes")
    }
}

/// Ratio below which the core matrix is declared singular.
const CORE_RCOND: f64 = 1e-13;

pub fn solve_auxiliary(pb: &PartitionBlocks, tol: &Tolerances) -> Result<Auxiliary> {
    let m = pb.retained();
    let n = m + pb.r;
    let alpha_norm = pb.alpha1.norm().hypot(pb.alpha2.norm());
    let a2 = pb.alpha2.norm();
    let mut warnings = Vec::new();
    let r = Matrix::from_diagonal(&Vector::from_column_slice(&pb.r_diag));

    let aux = if a2 > tol.branch * alpha_norm {
        if a2 <= 1e2 * tol.branch * alpha_norm {
            warnings.push(Warning::new(
                "near_branch_threshold",
                format!("|alpha2| / |alpha| = {:.3e} is close to the branch threshold", a2 / alpha_norm),
            ));
        }
        let b2 = &pb.beta2;
        let b2sq = b2.norm_squared();
        if b2sq == 0.0 {
            return Err(Error::SingularCore);
        }
        // Â = (A11ᵀ − A21ᵀβ2β1ᵀ/|β2|²)⁻¹
        let a21t_b2 = pb.a21.transpose() * b2 / b2sq;
        let core = pb.a11.transpose() - &a21t_b2 * pb.beta1.transpose();
        let a_hat = invert_core(core)?;
        let beta = -(&a_hat * &a21t_b2);
        let alpha = a_hat.transpose() * &r * &pb.a12 * &pb.alpha2 / pb.alpha2.norm_squared();
        Auxiliary { transition: a_hat, alpha, beta, branch: Branch::Alpha2Nonzero, warnings }
    } else {
        let b1sq = pb.beta1.norm_squared();
        let a1sq = pb.alpha1.norm_squared();
        if b1sq == 0.0 || a1sq == 0.0 {
            return Err(Error::SingularCore);
        }
        let a_hat = if 2 * pb.r >= n {
            warnings.push(Warning::new(
                "degenerate_case",
                format!(
                    "alpha2 vanishes and the multiplicity {} is at least n/2, forcing a zero auxiliary \
                     transition; reductions to k-1 or k+1 states may be better conditioned",
                    pb.r
                ),
            ));
            Matrix::zeros(m, m)
        } else {
            let (a_hat, residual) = constrained_core(pb, &r, tol);
            if residual > 1e-8 {
                warnings.push(Warning::new(
                    "inconsistent_constraints",
                    format!("alignment constraints hold only to {residual:.3e}"),
                ));
            }
            a_hat
        };
        let beta = (Matrix::identity(m, m) - &a_hat * pb.a11.transpose()) * &pb.beta1 / b1sq;
        let alpha = -((&r - a_hat.transpose() * &r * &pb.a11) * &pb.alpha1) / a1sq;
        Auxiliary { transition: a_hat, alpha, beta, branch: Branch::Alpha2Zero, warnings }
    };

    let shifted = Matrix::identity(m, m) - &aux.transition;
    if m > 0 && shifted.singular_values().min() <= tol.circle {
        return Err(Error::EigenvalueOnCircle { modulus: 1.0 });
    }
    Ok(aux)
}

fn invert_core(core: Matrix) -> Result<Matrix> {
    let sv = core.singular_values();
    if !sv.is_empty() && sv.min() <= CORE_RCOND * sv.max() {
        return Err(Error::SingularCore);
    }
    core.try_inverse().ok_or(Error::SingularCore)
}

/// Minimum-norm `Â` with `ÂA21ᵀ = 0` satisfying, in least squares,
/// `ÂᵀRA12 = 0`, `(1 − ÂA11ᵀ)(1 − Π_β1) = 0` and `(R − ÂᵀRA11)(1 − Π_α1) = 0`.
/// Returns `Â` and the relative residual of the system.
fn constrained_core(pb: &PartitionBlocks, r: &Matrix, tol: &Tolerances) -> (Matrix, f64) {
    let m = pb.retained();
    let rr = pb.r;
    let basis = null_space(&pb.a21, tol.rank);
    let dim = basis.ncols();
    if dim == 0 {
        return (Matrix::zeros(m, m), 0.0);
    }
    let proj = |v: &Vector| Matrix::identity(m, m) - v * v.transpose() / v.norm_squared();
    let p_beta = proj(&pb.beta1);
    let p_alpha = proj(&pb.alpha1);
    let r_scale = pb.r_diag.iter().map(|x| x.abs()).fold(0.0, f64::max);

    // Each unknown Y[i, j] contributes the rank-one Â = eᵢ nⱼᵀ.
    let ra12 = r * &pb.a12 / r_scale;
    let a11t_pb = pb.a11.transpose() * &p_beta;
    let ra11_pa = r * &pb.a11 * &p_alpha / r_scale;
    let rows = m * rr + 2 * m * m;
    let mut system = Matrix::zeros(rows, m * dim);
    for j in 0..dim {
        let nj = basis.column(j);
        let nj_a11t_pb = nj.transpose() * &a11t_pb;
        for i in 0..m {
            let col = j * m + i;
            let mut c1 = Matrix::zeros(m, rr);
            c1.copy_from(&(nj * ra12.row(i)));
            let mut c2 = Matrix::zeros(m, m);
            c2.row_mut(i).copy_from(&nj_a11t_pb);
            let c3 = nj * ra11_pa.row(i);
            let mut off = 0;
            for block in [c1.as_slice(), c2.as_slice(), c3.as_slice()] {
                system.view_mut((off, col), (block.len(), 1)).copy_from_slice(block);
                off += block.len();
            }
        }
    }
    let mut rhs = Vector::zeros(rows);
    rhs.rows_mut(m * rr, m * m).copy_from_slice(p_beta.as_slice());
    rhs.rows_mut(m * rr + m * m, m * m).copy_from_slice((r * &p_alpha / r_scale).as_slice());
    let y = min_norm_lstsq(&system, &rhs, tol.rank);
    let residual = (&system * &y - &rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    let y = Matrix::from_column_slice(m, dim, y.as_slice());
    (y * basis.transpose(), residual)
}
