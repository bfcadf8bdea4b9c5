//! Serializable report layouts. Field order here is the order in the
//! emitted JSON.

use serde::Serialize;
use wfa_aak::aak::{Baseline, Branch, ReductionReport, Warning};
use wfa_aak::extensions::PartReduction;

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub n: usize,
    pub spectral_radius: f64,
    pub singular_numbers: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Residuals {
    pub lyapunov: f64,
    pub allpass_a: f64,
    pub allpass_b: f64,
    pub allpass_c: f64,
    pub unimodularity: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ReductionSummary {
    pub k: usize,
    pub r: usize,
    pub branch: Branch,
    pub sigma_k: f64,
    pub achieved_error: Option<f64>,
    pub tail_bound: Option<f64>,
    pub hankel_size: Option<usize>,
    pub l2_error_sq: Option<f64>,
    pub certified: bool,
    pub residuals: Residuals,
}

impl ReductionSummary {
    pub fn from_report(rep: &ReductionReport) -> Self {
        let v = rep.verification.as_ref();
        Self {
            k: rep.k,
            r: rep.r,
            branch: rep.branch,
            sigma_k: rep.sigma_k,
            achieved_error: v.map(|v| v.achieved_error),
            tail_bound: v.map(|v| v.tail_bound),
            hankel_size: v.map(|v| v.hankel_size),
            l2_error_sq: v.map(|v| v.l2_error_sq),
            certified: rep.certified,
            residuals: Residuals {
                lyapunov: rep.lyapunov_residual,
                allpass_a: rep.allpass.a,
                allpass_b: rep.allpass.b,
                allpass_c: rep.allpass.c,
                unimodularity: v.map(|v| v.unimodularity.max_deviation),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReduceReport {
    pub input: InputSummary,
    pub reduction: ReductionSummary,
    pub baselines: Vec<Baseline>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Serialize)]
pub struct PartSummary {
    pub n: usize,
    pub k: usize,
    pub singular_numbers: Vec<f64>,
    pub sigma_k: f64,
    pub achieved_error: Option<f64>,
    pub certified: bool,
    pub reduction: Option<ReductionSummary>,
}

impl PartSummary {
    pub fn from_part(p: &PartReduction) -> Self {
        Self {
            n: p.n,
            k: p.k,
            singular_numbers: p.singular_numbers.clone(),
            sigma_k: p.sigma_k,
            achieved_error: p.achieved_error(),
            certified: p.certified(),
            reduction: p.report.as_ref().map(ReductionSummary::from_report),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GeneralReport {
    pub input: InputSummary,
    pub non_optimal: bool,
    pub stable: PartSummary,
    pub unstable: PartSummary,
    pub coefficient_deviation: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub instance: usize,
    pub n: usize,
    pub k: usize,
    pub sigma_k: Option<f64>,
    pub achieved_error: Option<f64>,
    pub allpass: Option<f64>,
    pub unimodularity: Option<f64>,
    pub certified: bool,
    /// `k` falls inside a group of equal singular numbers.
    pub skipped: bool,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub instances: usize,
    pub reductions: usize,
    pub certified: usize,
    pub skipped: usize,
    pub errors: usize,
    pub results: Vec<CheckRow>,
}
