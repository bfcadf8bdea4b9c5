use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use wfa_aak::aak::{Baseline, HankelSize, Warning};
use wfa_aak::extensions::reduce_general;
use wfa_aak::oracle::{
    auto_hankel_size, spectral_error, sva_truncation_baseline, svd_truncation_baseline, truncated_hankel,
};
use wfa_aak::random::{random_sva, seeded};
use wfa_aak::wfa::{from_json, to_json, WfaJson};
use wfa_aak::{aak_reduce, minimize as minimize_wfa, to_sva, Error, ReduceOptions, SvaWfa, Tolerances, Wfa};

use crate::report::{CheckReport, CheckRow, GeneralReport, InputSummary, PartSummary, ReduceReport, ReductionSummary};
use crate::{emit_warnings, Failure};

type Outcome = Result<(), Failure>;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input { kind: "Io".into(), message: format!("{}: {e}", path.display()) }
}

fn read_wfa(path: &Path) -> Result<Wfa, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(from_json(&text)?)
}

fn write_text(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write_text(path, &text)
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn is_zero_series(w: &Wfa) -> bool {
    w.n() <= 1 && w.coefficients(2).iter().all(|&x| x == 0.0)
}

/// Minimal singular-value form of the input, or `None` for the zero series.
fn canonical(w: &Wfa, tol: &Tolerances, warnings: &mut Vec<Warning>) -> Result<Option<SvaWfa>, Failure> {
    let m = minimize_wfa(w, tol);
    if is_zero_series(&m) {
        return Ok(None);
    }
    if m.n() < w.n() {
        warnings.push(Warning::new(
            "input_not_minimal",
            format!("input has {} states; its minimal form has {}", w.n(), m.n()),
        ));
    }
    Ok(Some(to_sva(&m, tol)?))
}

/// Shortest round-trip form, in scientific notation for very small or large
/// magnitudes.
fn format_value(x: f64) -> String {
    if x != 0.0 && !(1e-5..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Rounds to 15 significant digits, hiding the last-bit noise of products
/// such as `(√3/2)²`.
fn display_value(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format_value(format!("{x:.14e}").parse().expect("formatted float parses"))
}

pub fn eval(input: &Path, ks: &[usize], full_precision: bool) -> Outcome {
    let w = read_wfa(input)?;
    let text: String = ks
        .iter()
        .map(|&k| {
            let v = w.evaluate(k);
            let shown = if full_precision { format_value(v) } else { display_value(v) };
            format!("{shown}\n")
        })
        .collect();
    write_text(None, &text)
}

pub fn minimize(input: &Path, output: Option<&Path>, tol: &Tolerances) -> Outcome {
    let w = read_wfa(input)?;
    write_text(output, &with_newline(to_json(&minimize_wfa(&w, tol))))
}

pub fn sva(input: &Path, output: Option<&Path>, tol: &Tolerances) -> Outcome {
    let w = read_wfa(input)?;
    let mut warnings = Vec::new();
    let Some(s) = canonical(&w, tol, &mut warnings)? else {
        return Err(Error::InvalidAutomaton("the zero series has no singular-value form".into()).into());
    };
    emit_warnings(&warnings);
    let numbers: Vec<String> = s.singular_numbers().iter().map(|x| x.to_string()).collect();
    let doc = WfaJson::from_wfa(s.wfa(), Some(format!("singular numbers: {}", numbers.join(", "))));
    write_json(output, &doc)
}

#[derive(Serialize)]
struct SingularValuesOut {
    n: usize,
    singular_numbers: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<TruncatedOut>,
}

#[derive(Serialize)]
struct TruncatedOut {
    hankel_size: usize,
    singular_values: Vec<f64>,
    tail_bound: f64,
}

pub fn singular_values(input: &Path, size: Option<usize>, output: Option<&Path>, tol: &Tolerances) -> Outcome {
    let w = read_wfa(input)?;
    let mut warnings = Vec::new();
    let s = canonical(&w, tol, &mut warnings)?;
    emit_warnings(&warnings);
    let singular_numbers = s.as_ref().map_or_else(Vec::new, |s| s.singular_numbers().to_vec());
    let truncated = match size {
        Some(size) => {
            let t = truncated_hankel(&w, size)?;
            let keep = singular_numbers.len().max(1).min(size);
            Some(TruncatedOut {
                hankel_size: size,
                singular_values: t.singular_values().into_iter().take(keep).collect(),
                tail_bound: t.tail_bound(),
            })
        }
        None => None,
    };
    write_json(output, &SingularValuesOut { n: singular_numbers.len(), singular_numbers, truncated })
}

pub struct ReduceRequest<'a> {
    pub input: &'a Path,
    pub states: usize,
    /// `Some` selects the mixed-stability reduction.
    pub unstable_states: Option<usize>,
    pub output: Option<&'a Path>,
    pub report: Option<&'a Path>,
    pub options: ReduceOptions,
}

pub fn reduce(req: &ReduceRequest<'_>) -> Outcome {
    let w = read_wfa(req.input)?;
    match req.unstable_states {
        None => reduce_stable(req, &w),
        Some(ku) => reduce_mixed(req, &w, ku),
    }
}

fn reduce_stable(req: &ReduceRequest<'_>, w: &Wfa) -> Outcome {
    let tol = &req.options.tolerances;
    let k = req.states;
    if k == 0 || k >= w.n() {
        return Err(Error::InvalidRank { k, n: w.n() }.into());
    }
    let radius = w.spectral_radius();
    if radius.is_nan() || radius >= 1.0 {
        return Err(Error::SpectralRadiusTooLarge { radius }.into());
    }
    let mut warnings = Vec::new();
    let s = canonical(w, tol, &mut warnings)?
        .ok_or_else(|| Error::InvalidAutomaton("the zero series cannot be reduced further".into()))?;
    if k >= s.n() {
        emit_warnings(&warnings);
        return Err(Error::InvalidRank { k, n: s.n() }.into());
    }
    let rep = aak_reduce(&s, k, &req.options)?;
    warnings.extend(rep.warnings.iter().cloned());
    emit_warnings(&warnings);

    write_text(req.output, &with_newline(to_json(&rep.reduced)))?;
    if let Some(path) = req.report {
        let doc = ReduceReport {
            input: InputSummary { n: w.n(), spectral_radius: radius, singular_numbers: s.singular_numbers().to_vec() },
            reduction: ReductionSummary::from_report(&rep),
            baselines: rep.verification.as_ref().map_or_else(Vec::new, |v| v.baselines.clone()),
            warnings,
        };
        write_json(Some(path), &doc)?;
    }
    if rep.verification.is_some() && !rep.certified {
        return Err(Failure::Verification(format!(
            "reduction to {k} states was not certified (measured error {:?}, sigma_k {})",
            rep.achieved_error(),
            rep.sigma_k
        )));
    }
    Ok(())
}

fn reduce_mixed(req: &ReduceRequest<'_>, w: &Wfa, k_unstable: usize) -> Outcome {
    let out = reduce_general(w, req.states, k_unstable, &req.options)?;
    let mut warnings = vec![Warning::new(
        "non_optimal",
        "parts were reduced separately; the combined result is not an optimal approximation".into(),
    )];
    for part in [&out.stable, &out.unstable] {
        if let Some(r) = &part.report {
            warnings.extend(r.warnings.iter().cloned());
        }
    }
    emit_warnings(&warnings);
    write_text(req.output, &with_newline(to_json(&out.reduced)))?;
    if let Some(path) = req.report {
        let doc = GeneralReport {
            input: InputSummary { n: w.n(), spectral_radius: w.spectral_radius(), singular_numbers: Vec::new() },
            non_optimal: out.non_optimal,
            stable: PartSummary::from_part(&out.stable),
            unstable: PartSummary::from_part(&out.unstable),
            coefficient_deviation: out.coefficient_deviation,
            warnings,
        };
        write_json(Some(path), &doc)?;
    }
    let verified = |p: &wfa_aak::extensions::PartReduction| p.report.as_ref().is_some_and(|r| r.verification.is_some());
    for (name, part) in [("stable", &out.stable), ("unstable", &out.unstable)] {
        if verified(part) && !part.certified() {
            return Err(Failure::Verification(format!("{name} part reduction was not certified")));
        }
    }
    Ok(())
}

pub fn compare(input: &Path, k: usize, csv_out: bool, output: Option<&Path>, opts: &ReduceOptions) -> Outcome {
    let w = read_wfa(input)?;
    let mut warnings = Vec::new();
    let s = canonical(&w, &opts.tolerances, &mut warnings)?;
    // The zero series is accepted at any positive rank.
    if k == 0 || (k >= w.n() && s.is_some()) {
        return Err(Error::InvalidRank { k, n: w.n() }.into());
    }
    let rows = match s {
        None => ["aak", "sva_truncation", "svd_truncation"]
            .iter()
            .map(|m| Baseline {
                method: (*m).into(),
                rank: k,
                spectral_error: 0.0,
                is_hankel: *m != "svd_truncation",
                certified: *m == "aak",
            })
            .collect(),
        Some(s) if k >= s.n() => exact_rows(&s, k, opts)?,
        Some(s) => {
            let rep = aak_reduce(&s, k, opts)?;
            warnings.extend(rep.warnings.iter().cloned());
            let v = rep.verification.as_ref().expect("comparison always verifies");
            let mut rows = vec![Baseline {
                method: "aak".into(),
                rank: k,
                spectral_error: v.achieved_error,
                is_hankel: true,
                certified: rep.certified,
            }];
            rows.extend(v.baselines.iter().cloned());
            rows
        }
    };
    emit_warnings(&warnings);
    if csv_out {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for r in &rows {
            wtr.serialize(r).map_err(|e| io_failure(Path::new("<csv>"), e))?;
        }
        let bytes = wtr.into_inner().map_err(|e| io_failure(Path::new("<csv>"), e))?;
        write_text(output, &String::from_utf8(bytes).expect("csv output is utf-8"))
    } else {
        write_json(output, &rows)
    }
}

/// Rows for a target at or above the minimal state count: nothing is removed.
fn exact_rows(s: &SvaWfa, k: usize, opts: &ReduceOptions) -> Result<Vec<Baseline>, Failure> {
    let size = match opts.hankel_size {
        HankelSize::Fixed(n) => n,
        HankelSize::Auto => auto_hankel_size(s.wfa(), s.singular_numbers()[s.n() - 1])?.0,
    };
    let trunc = sva_truncation_baseline(s, k);
    let sva_err = spectral_error(s.wfa(), &trunc, size)?.value;
    let (_, svd_err) = svd_truncation_baseline(&truncated_hankel(s.wfa(), size)?, k);
    Ok(vec![
        Baseline { method: "aak".into(), rank: k, spectral_error: 0.0, is_hankel: true, certified: true },
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
    ])
}

pub enum CheckSource<'a> {
    Files(&'a [PathBuf]),
    Random { count: usize, seed: u64 },
}

/// Number of states of the `i`-th random instance.
fn random_states(i: usize) -> usize {
    2 + i % 5
}

pub fn check(source: CheckSource<'_>, jobs: usize, output: Option<&Path>, opts: &ReduceOptions) -> Outcome {
    let tol = &opts.tolerances;
    let instances: Vec<Result<SvaWfa, Failure>> = match source {
        CheckSource::Files(paths) => paths
            .iter()
            .map(|p| {
                let w = read_wfa(p)?;
                let mut warnings = Vec::new();
                let s = canonical(&w, tol, &mut warnings)?
                    .ok_or_else(|| Error::InvalidAutomaton(format!("{}: zero series", p.display())))?;
                Ok(s)
            })
            .collect(),
        CheckSource::Random { count, seed } => (0..count)
            .map(|i| {
                let mut rng = seeded(seed.wrapping_add(i as u64));
                Ok(random_sva(&mut rng, random_states(i), 0.9, 1e-3, tol)?)
            })
            .collect(),
    };
    let instances = instances.into_iter().collect::<Result<Vec<_>, _>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Input { kind: "Usage".into(), message: e.to_string() })?;
    let results: Vec<CheckRow> = pool.install(|| {
        instances
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, s)| (1..s.n()).map(move |k| check_one(i, s, k, opts)))
            .collect()
    });

    let doc = CheckReport {
        instances: instances.len(),
        reductions: results.len(),
        certified: results.iter().filter(|r| r.certified).count(),
        skipped: results.iter().filter(|r| r.skipped).count(),
        errors: results.iter().filter(|r| r.error.is_some()).count(),
        results,
    };
    write_json(output, &doc)?;
    if doc.errors > 0 {
        return Err(Failure::Numerical {
            kind: "ReductionFailed".into(),
            message: format!("{} of {} reductions failed", doc.errors, doc.reductions),
        });
    }
    let uncertified = doc.reductions - doc.certified - doc.skipped;
    if uncertified > 0 {
        return Err(Failure::Verification(format!(
            "{uncertified} of {} reductions were not certified",
            doc.reductions
        )));
    }
    Ok(())
}

fn check_one(instance: usize, s: &SvaWfa, k: usize, opts: &ReduceOptions) -> CheckRow {
    let mut row = CheckRow {
        instance,
        n: s.n(),
        k,
        sigma_k: Some(s.singular_numbers()[k]),
        achieved_error: None,
        allpass: None,
        unimodularity: None,
        certified: false,
        skipped: false,
        error: None,
    };
    match aak_reduce(s, k, opts) {
        Ok(rep) => {
            row.achieved_error = rep.achieved_error();
            row.allpass = Some(rep.allpass.max());
            row.unimodularity = rep.verification.as_ref().map(|v| v.unimodularity.max_deviation);
            row.certified = rep.certified;
        }
        // Indices strictly inside a group of equal singular numbers have no
        // distinct optimum; they are reported but not counted as failures.
        Err(Error::GroupNotAtBoundary { .. }) => row.skipped = true,
        Err(e) => row.error = Some(format!("{}: {e}", e.kind())),
    }
    row
}

pub fn hankel(input: &Path, size: usize, output: Option<&Path>, singular_values: Option<&Path>) -> Outcome {
    let w = read_wfa(input)?;
    let t = truncated_hankel(&w, size)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in t.matrix().row_iter() {
        wtr.write_record(row.iter().map(|x| x.to_string())).map_err(|e| io_failure(Path::new("<csv>"), e))?;
    }
    let bytes = wtr.into_inner().map_err(|e| io_failure(Path::new("<csv>"), e))?;
    write_text(output, &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    if let Some(path) = singular_values {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| io_failure(path, e);
        wtr.write_record(["index", "singular_value"]).map_err(csv_err)?;
        for (i, s) in t.singular_values().iter().enumerate() {
            wtr.write_record([i.to_string(), s.to_string()]).map_err(csv_err)?;
        }
        let bytes = wtr.into_inner().map_err(|e| io_failure(path, e))?;
        fs::write(path, bytes).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}
