//! Task dispatch. Each task produces an [`Outcome`]: tables plus a JSON result.

use rayon::prelude::*;
use serde_json::{json, Value};
use surfint_core::coupling::{m_infinity, planar_decay_rate};
use surfint_core::fem2d::{negative_spectrum_fem_with, EigenOptions, FemOptions};
use surfint_core::harness::{
    bound_state_certificate, compare_spectra, essential_bound_check, standard_suite, CompactGeometry, ComparisonCase,
    CountOptions, HarnessError, Verdict,
};
use surfint_core::interval::{negative_spectrum_refined, IntervalProblem, ScanOptions};
use surfint_core::radial::{
    assemble_mode_sum, bound_modes, radial_fd_extrapolated, sphere_swave_matching, OuterBc, RadialGeometry,
};
use surfint_core::report::SpectrumReport;

use crate::config::{RunConfig, SweepBlock, Task};

/// Highest angular mode probed when no mode list is given.
const MAX_MODE: usize = 256;

#[derive(Debug, Clone)]
pub enum RunError {
    Solver(String),
    /// A hypothesis that validation could not see (suite cases are checked here).
    Hypothesis(Vec<String>),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Solver(m) => write!(f, "solver failure: {m}"),
            RunError::Hypothesis(v) => write!(f, "hypothesis not satisfied: {}", v.join("; ")),
        }
    }
}

impl From<HarnessError> for RunError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::HypothesisFailed(v) => RunError::Hypothesis(v),
            other => RunError::Solver(other.to_string()),
        }
    }
}

macro_rules! solver_error {
    ($($t:ty),*) => {$(
        impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::Solver(e.to_string())
            }
        }
    )*};
}

solver_error!(
    surfint_core::coupling::CouplingError,
    surfint_core::interval::IntervalError,
    surfint_core::radial::RadialError,
    surfint_core::fem2d::FemError
);

/// One row of `spectrum.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub eigenvalue: f64,
    pub k: Option<f64>,
    pub residual: Option<f64>,
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub eigenvalues: Vec<f64>,
    pub count: usize,
    pub m_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub spectrum: Option<Vec<SpectrumRow>>,
    pub verdicts: Option<Vec<Verdict>>,
    pub sweep: Option<(String, Vec<SweepRow>)>,
    pub result: Value,
    /// An ordering or certificate was violated.
    pub verdict_failed: bool,
}

impl Outcome {
    fn spectrum(rows: Vec<SpectrumRow>, result: Value) -> Self {
        Self {
            spectrum: Some(rows),
            verdicts: None,
            sweep: None,
            result,
            verdict_failed: false,
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome, RunError> {
    match config.task() {
        Task::Interval => interval(config).map(|(o, _)| o),
        Task::Sphere => sphere(config).map(|(o, _)| o),
        Task::CircleFem => circle_fem(config).map(|(o, _)| o),
        Task::RadialOracle => radial_oracle(config).map(|(o, _)| o),
        Task::MInfinity => m_inf(config),
        Task::Compare => compare(config),
        Task::Certify => certify(config),
        Task::Sweep => sweep(config),
    }
}

fn rows_from(report: &SpectrumReport, residual: Option<f64>) -> Vec<SpectrumRow> {
    report
        .negative_eigenvalues
        .iter()
        .map(|&eigenvalue| SpectrumRow {
            eigenvalue,
            k: None,
            residual,
        })
        .collect()
}

fn spectrum_result(kind: &str, report: &SpectrumReport, extra: Value) -> Value {
    json!({ "kind": kind, "spectrum": report, "details": extra })
}

fn interval(config: &RunConfig) -> Result<(Outcome, SpectrumReport), RunError> {
    let prob = IntervalProblem::new(config.coupling(), config.geometry.d.expect("validated"))?;
    let s = &config.solver;
    let opts = ScanOptions {
        k_max: None,
        grid: s.grid,
        tol: s.tol,
    };
    let spec = negative_spectrum_refined(&prob, &opts, s.max_refinements)?;
    let rows = spec
        .negative_eigenvalues
        .iter()
        .zip(&spec.ks)
        .zip(&spec.diagnostics.residuals)
        .map(|((&eigenvalue, &k), &r)| SpectrumRow {
            eigenvalue,
            k: Some(k),
            residual: Some(r),
        })
        .collect();
    let mut report = SpectrumReport::new("interval-exact", spec.negative_eigenvalues.clone())
        .with_tolerance("bisection_tol", s.tol)
        .with_tolerance("grid", spec.diagnostics.grid as f64);
    if spec.degenerate {
        report.notes.push("degenerate coincidence γ = 0, αβ = 4: the double factor is listed once".into());
    }
    let details = json!({
        "d": prob.d(),
        "ks": spec.ks,
        "m_ad": spec.m_ad,
        "degenerate": spec.degenerate,
        "scan": spec.diagnostics,
    });
    let result = spectrum_result("interval", &report, details);
    Ok((Outcome::spectrum(rows, result), report))
}

fn sphere(config: &RunConfig) -> Result<(Outcome, SpectrumReport), RunError> {
    let alpha = config.coupling().alpha;
    let r = config.geometry.r.expect("validated");
    let m = sphere_swave_matching(alpha, r)?;
    let report = SpectrumReport::new("sphere-swave-matching", m.eigenvalue.into_iter().collect());
    let rows = rows_from(&report, None);
    let details = json!({ "R": r, "alpha_R": alpha * r, "k": m.k, "matching": m });
    Ok((Outcome::spectrum(rows, spectrum_result("sphere", &report, details)), report))
}

fn fem_options(config: &RunConfig) -> FemOptions {
    let s = &config.solver;
    FemOptions {
        growth: s.growth,
        h_max: s.h_max,
        refinements: s.refinements,
        outer_bc: config.geometry.outer_bc.unwrap_or(OuterBc::Neumann),
        truncation_check: s.truncation_check,
        eigen: EigenOptions {
            tol: s.eigen_tol,
            ..EigenOptions::default()
        },
    }
}

fn circle_fem(config: &RunConfig) -> Result<(Outcome, SpectrumReport), RunError> {
    let g = &config.geometry;
    let s = &config.solver;
    let report = negative_spectrum_fem_with(
        &config.field(),
        g.r.expect("validated"),
        g.r_out.expect("validated"),
        s.h,
        s.eigen_count,
        &fem_options(config),
    )?;
    let residual = report.tolerances.iter().find(|(n, _)| n == "max_residual").map(|&(_, v)| v);
    let rows = rows_from(&report, residual);
    let details = json!({ "R": g.r, "R_out": g.r_out, "h": s.h });
    Ok((Outcome::spectrum(rows, spectrum_result("circle-fem", &report, details)), report))
}

fn radial_oracle(config: &RunConfig) -> Result<(Outcome, SpectrumReport), RunError> {
    let g = &config.geometry;
    let s = &config.solver;
    let field = config.field();
    let geom = RadialGeometry::new(
        g.dimension.expect("validated"),
        g.r.expect("validated"),
        g.r_out.expect("validated"),
        g.outer_bc.unwrap_or(OuterBc::Neumann),
        0,
    )?;
    let modes = match &g.modes {
        Some(m) => m.clone(),
        None => bound_modes(&geom, &field, s.n_grid, MAX_MODE)?,
    };
    let mut report = assemble_mode_sum(&geom, &field, &modes, s.n_grid)?;
    let mut rows = rows_from(&report, None);
    if s.extrapolate {
        let mut all = Vec::new();
        let mut per_mode = Vec::new();
        for &mode in &modes {
            let gm = geom.with_mode(mode);
            let conv = radial_fd_extrapolated(&gm, &field, s.n_grid)?;
            for (&lam, &err) in conv.extrapolated.iter().zip(&conv.error_bar) {
                all.extend(std::iter::repeat_n((lam, err), gm.multiplicity()));
            }
            per_mode.push(json!({ "mode": mode, "convergence": conv }));
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows = all
            .iter()
            .map(|&(eigenvalue, err)| SpectrumRow {
                eigenvalue,
                k: None,
                residual: Some(err),
            })
            .collect();
        let grid_values = std::mem::take(&mut report.negative_eigenvalues);
        report = SpectrumReport {
            negative_eigenvalues: all.iter().map(|p| p.0).collect(),
            bound_state_count: all.len(),
            ..report
        };
        report.method = "radial-fd (extrapolated)".into();
        let details = json!({ "modes": modes, "grid_eigenvalues": grid_values, "ladders": per_mode });
        return Ok((Outcome::spectrum(rows, spectrum_result("radial-oracle", &report, details)), report));
    }
    let details = json!({ "modes": modes });
    Ok((Outcome::spectrum(rows, spectrum_result("radial-oracle", &report, details)), report))
}

fn m_inf(config: &RunConfig) -> Result<Outcome, RunError> {
    let c = config.coupling();
    let m_a = m_infinity(c.alpha, c.beta, c.gamma)?;
    let decay = planar_decay_rate(c.alpha, c.beta, c.gamma).ok();
    let essential = match essential_bound_check(c.alpha, c.beta, c.gamma) {
        Ok(r) => Some(r),
        Err(HarnessError::CaseInapplicable(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let result = json!({ "kind": "m-infinity", "m_a": m_a, "decay_rate": decay, "essential": essential });
    Ok(Outcome {
        spectrum: None,
        verdicts: None,
        sweep: None,
        result,
        verdict_failed: false,
    })
}

fn compare(config: &RunConfig) -> Result<Outcome, RunError> {
    let cases: Vec<ComparisonCase> = match config.comparison_case() {
        Some(case) => vec![case],
        None => standard_suite()
            .into_iter()
            .map(|c| ComparisonCase {
                k_count: config.compare.as_ref().map_or(c.k_count, |b| b.k_count),
                ..c
            })
            .collect(),
    };
    let verdicts = cases
        .par_iter()
        .map(compare_spectra)
        .collect::<Result<Vec<_>, _>>()?;
    let failed: Vec<usize> = (0..verdicts.len()).filter(|&i| !verdicts[i].ordering_ok).collect();
    let result = json!({
        "kind": "compare",
        "cases": cases,
        "verdicts": verdicts,
        "all_ordering_ok": failed.is_empty(),
        "failed_indices": failed,
    });
    Ok(Outcome {
        spectrum: None,
        verdict_failed: !failed.is_empty(),
        verdicts: Some(verdicts),
        sweep: None,
        result,
    })
}

fn certify(config: &RunConfig) -> Result<Outcome, RunError> {
    let r = config.geometry.r.expect("validated");
    let geometry = match config.geometry.dimension.expect("validated") {
        2 => CompactGeometry::Circle { r },
        _ => CompactGeometry::Sphere { r },
    };
    let opts = CountOptions {
        r_out_factor: config.solver.count_r_out_factor,
        n_grid: config.solver.n_grid,
    };
    let report = bound_state_certificate(&config.field(), &geometry, &opts)?;
    let violated = report.certificates.iter().any(|c| c.is_violation());
    let rows = rows_from(&report, None);
    let result = spectrum_result("certify", &report, json!({ "geometry": geometry, "count": opts }));
    Ok(Outcome {
        verdict_failed: violated,
        ..Outcome::spectrum(rows, result)
    })
}

fn sweep_point(point: &RunConfig, task: Task) -> Result<SweepRow, RunError> {
    let report = match task {
        Task::Interval => interval(point)?.1,
        Task::Sphere => sphere(point)?.1,
        Task::CircleFem => circle_fem(point)?.1,
        _ => radial_oracle(point)?.1,
    };
    let c = point.coupling();
    Ok(SweepRow {
        value: f64::NAN,
        count: report.bound_state_count,
        eigenvalues: report.negative_eigenvalues,
        m_a: m_infinity(c.alpha, c.beta, c.gamma).ok(),
    })
}

fn sweep(config: &RunConfig) -> Result<Outcome, RunError> {
    let sw: &SweepBlock = config.sweep.as_ref().expect("validated");
    let values = sw.values();
    let points: Vec<RunConfig> = values
        .iter()
        .map(|&v| {
            let mut p = config.with_parameter(sw.parameter, v).expect("validated");
            p.task = Some(sw.task);
            p.sweep = None;
            p
        })
        .collect();
    let rows = points
        .par_iter()
        .zip(values.par_iter())
        .map(|(p, &value)| sweep_point(p, sw.task).map(|row| SweepRow { value, ..row }))
        .collect::<Result<Vec<_>, _>>()?;
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "value": r.value, "eigenvalues": r.eigenvalues, "N": r.count, "m_a": r.m_a }))
        .collect();
    let result = json!({
        "kind": "sweep",
        "parameter": sw.parameter.as_str(),
        "task": sw.task,
        "points": table,
    });
    Ok(Outcome {
        spectrum: None,
        verdicts: None,
        sweep: Some((sw.parameter.as_str().to_string(), rows)),
        result,
        verdict_failed: false,
    })
}

