//! Optimal rank-`k` reduction in the Hankel spectral norm.

mod allpass;
mod auxiliary;
mod blockdiag;
mod partition;

pub use allpass::{build_error_wfa, certificate, verify_allpass, AllpassResiduals, ErrorWfa};
pub use auxiliary::{solve_auxiliary, Auxiliary, Branch};
pub use blockdiag::block_diagonalize;
pub use partition::{group_multiplicity, partition, PartitionBlocks};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{
    spectral_error, spectral_error_auto, sva_truncation_baseline, svd_truncation_baseline, truncated_hankel,
};
use crate::symbol::{reduction_unimodularity, Unimodularity};
use crate::tolerances::Tolerances;
use crate::wfa::{SvaWfa, Wfa};

/// Verification runs by default up to this many states.
pub const AUTO_VERIFY_LIMIT: usize = 64;
/// Relative agreement between measured error and `σ_k` required to certify.
pub const CERTIFY_ERROR_TOL: f64 = 1e-6;
/// Bound on all-pass and unimodularity defects required to certify.
pub const CERTIFY_RESIDUAL_TOL: f64 = 1e-8;
/// Number of coefficients summed for the ℓ² check.
pub const L2_HORIZON: usize = 1000;

/// A non-fatal observation attached to a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

impl Warning {
    pub fn new(code: &str, message: String) -> Self {
        Self { code: code.to_string(), message }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    /// On for inputs with at most [`AUTO_VERIFY_LIMIT`] states.
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelSize {
    /// Smallest power of two whose tail bound is below `1e-8·σ_k`.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReduceOptions {
    pub verification: Verification,
    pub hankel_size: HankelSize,
    /// Circle samples for the unimodularity check.
    pub samples: usize,
    pub tolerances: Tolerances,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            verification: Verification::Auto,
            hankel_size: HankelSize::Auto,
            samples: 1000,
            tolerances: Tolerances::default(),
        }
    }
}

/// An error measured for one approximation method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Baseline {
    pub method: String,
    pub rank: usize,
    pub spectral_error: f64,
    pub is_hankel: bool,
    pub certified: bool,
}

/// Oracle measurements of a reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub achieved_error: f64,
    pub hankel_size: usize,
    pub tail_bound: f64,
    /// `Σ_{j ≤ 1000} (f(j) − f̂(j))²`.
    pub l2_error_sq: f64,
    pub unimodularity: Unimodularity,
    pub baselines: Vec<Baseline>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub reduced: Wfa,
    pub k: usize,
    pub r: usize,
    pub branch: Branch,
    pub sigma_k: f64,
    pub singular_numbers: Vec<f64>,
    pub auxiliary: Auxiliary,
    /// Size of the discarded anti-stable part of the auxiliary automaton.
    pub unstable_states: usize,
    pub allpass: AllpassResiduals,
    /// Gramian defect of the input's singular-value form.
    pub lyapunov_residual: f64,
    pub verification: Option<VerificationReport>,
    /// True when verification ran and every check passed.
    pub certified: bool,
    pub warnings: Vec<Warning>,
}

impl ReductionReport {
    pub fn achieved_error(&self) -> Option<f64> {
        self.verification.as_ref().map(|v| v.achieved_error)
    }
}

/// Best `k`-state approximation of `s` in the Hankel spectral norm.
pub fn aak_reduce(s: &SvaWfa, k: usize, opts: &ReduceOptions) -> Result<ReductionReport> {
    let tol = &opts.tolerances;
    let n = s.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidRank { k, n });
    }
    let pb = partition(s, k, tol.multiplicity)?;
    let mut aux = solve_auxiliary(&pb, tol)?;
    let (stable, unstable) = block_diagonalize(&aux.to_wfa(), tol)?;
    if stable.n() != k {
        return Err(Error::InertiaMismatch { expected: k, found: stable.n() });
    }
    let radius = stable.spectral_radius();
    if !(radius < 1.0 - tol.circle / 2.0) {
        return Err(Error::EigenvalueOnCircle { modulus: radius });
    }

    let error_wfa = build_error_wfa(&pb, &aux);
    let allpass = verify_allpass(&error_wfa, &pb);
    let mut warnings = std::mem::take(&mut aux.warnings);

    let verify = match opts.verification {
        Verification::On => true,
        Verification::Off => false,
        Verification::Auto => n <= AUTO_VERIFY_LIMIT,
    };
    let verification = if verify { Some(verify_reduction(s, &stable, &aux, &pb, opts, &mut warnings)?) } else { None };
    let certified = verification.as_ref().is_some_and(|v| {
        (v.achieved_error - pb.sigma_k).abs() <= CERTIFY_ERROR_TOL * pb.sigma_k
            && v.unimodularity.max_deviation <= CERTIFY_RESIDUAL_TOL
            && allpass.max() <= CERTIFY_RESIDUAL_TOL
    });

    Ok(ReductionReport {
        reduced: stable,
        k,
        r: pb.r,
        branch: aux.branch,
        sigma_k: pb.sigma_k,
        singular_numbers: s.singular_numbers().to_vec(),
        unstable_states: unstable.n(),
        auxiliary: aux,
        allpass,
        lyapunov_residual: s.residuals().lyapunov,
        verification,
        certified,
        warnings,
    })
}

fn verify_reduction(
    s: &SvaWfa,
    reduced: &Wfa,
    aux: &Auxiliary,
    pb: &PartitionBlocks,
    opts: &ReduceOptions,
    warnings: &mut Vec<Warning>,
) -> Result<VerificationReport> {
    let tol = &opts.tolerances;
    let k = pb.k;
    let measured = match opts.hankel_size {
        HankelSize::Fixed(size) => spectral_error(s.wfa(), reduced, size)?,
        HankelSize::Auto => {
            let (m, capped) = spectral_error_auto(s.wfa(), reduced, pb.sigma_k)?;
            if capped {
                warnings.push(Warning::new(
                    "hankel_size_capped",
                    format!("tail bound {:.3e} still above target at the size cap {}", m.tail_bound, m.size),
                ));
            }
            m
        }
    };

    let unimodularity = reduction_unimodularity(s, k, &aux.to_wfa(), opts.samples, tol)?;
    if unimodularity.skipped > 0 {
        warnings.push(Warning::new(
            "unimodularity_samples_skipped",
            format!("{} circle samples skipped near poles or zeros", unimodularity.skipped),
        ));
    }

    let f = s.wfa().coefficients(L2_HORIZON + 1);
    let g = reduced.coefficients(L2_HORIZON + 1);
    let l2_error_sq = f.iter().zip(&g).map(|(a, b)| (a - b) * (a - b)).sum();

    let size = measured.size;
    let sva_trunc = sva_truncation_baseline(s, k);
    let sva_err = spectral_error(s.wfa(), &sva_trunc, size)?.value;
    let (_, svd_err) = svd_truncation_baseline(&truncated_hankel(s.wfa(), size)?, k);
    let baselines = vec![
        Baseline {
            method: "sva_truncation".into(),
            rank: k,
            spectral_error: sva_err,
            is_hankel: true,
            certified: false,
        },
        Baseline {
            method: "svd_truncation".into(),
            rank: k,
            spectral_error: svd_err,
            is_hankel: false,
            certified: false,
        },
    ];
    Ok(VerificationReport {
        achieved_error: measured.value,
        hankel_size: size,
        tail_bound: measured.tail_bound,
        l2_error_sq,
        unimodularity,
        baselines,
    })
}
