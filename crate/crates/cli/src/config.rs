//! Run configuration: strict JSON parsing followed by a validation pass that
//! reports every violation at once.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use surfint_core::coupling::{validate_coupling, RawRegion, SurfacePart};
use surfint_core::harness::{check_hypothesis, CaseId, ComparisonCase, Geometry};
use surfint_core::radial::OuterBc;
use surfint_core::{Complex64, Coupling, CouplingField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Interval,
    Sphere,
    CircleFem,
    RadialOracle,
    MInfinity,
    Compare,
    Certify,
    Sweep,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::Interval,
        Task::Sphere,
        Task::CircleFem,
        Task::RadialOracle,
        Task::MInfinity,
        Task::Compare,
        Task::Certify,
        Task::Sweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Interval => "interval",
            Task::Sphere => "sphere",
            Task::CircleFem => "circle-fem",
            Task::RadialOracle => "radial-oracle",
            Task::MInfinity => "m-infinity",
            Task::Compare => "compare",
            Task::Certify => "certify",
            Task::Sweep => "sweep",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown task {s:?}"))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionBlock {
    pub name: Option<String>,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub gamma: [f64; 2],
    /// Inferred from `beta` when absent.
    pub part: Option<SurfacePart>,
}

/// Either one region given inline or a list of `regions`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingBlock {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<[f64; 2]>,
    pub part: Option<SurfacePart>,
    pub regions: Option<Vec<RegionBlock>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    /// Interval half-length.
    pub d: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "R_out")]
    pub r_out: Option<f64>,
    pub dimension: Option<u8>,
    pub modes: Option<Vec<usize>>,
    pub outer_bc: Option<OuterBc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    /// Interval scan grid and bisection tolerance.
    pub grid: usize,
    pub tol: f64,
    pub max_refinements: usize,
    /// Radial cells inside `R`.
    pub n_grid: usize,
    pub extrapolate: bool,
    /// FEM interface mesh width, ladder depth and grading.
    pub h: f64,
    pub refinements: usize,
    pub growth: f64,
    pub h_max: f64,
    pub truncation_check: bool,
    pub eigen_count: usize,
    pub eigen_tol: f64,
    /// Dirichlet wall at this multiple of `R` for `certify`.
    pub count_r_out_factor: f64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self {
            grid: 2048,
            tol: 1e-13,
            max_refinements: 6,
            n_grid: 256,
            extrapolate: true,
            h: 0.1,
            refinements: 2,
            growth: 1.25,
            h_max: 0.5,
            truncation_check: true,
            eigen_count: 3,
            eigen_tol: 1e-8,
            count_r_out_factor: 40.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareGeometry {
    Interval,
    CircleFem,
    SphereRadial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Standard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    pub suite: Option<Suite>,
    pub case: Option<CaseId>,
    /// `α̃` or `β̃`, depending on the case.
    pub reference: Option<f64>,
    pub geometry: Option<CompareGeometry>,
    #[serde(default = "default_k_count")]
    pub k_count: usize,
}

fn default_k_count() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Alpha,
    Beta,
    GammaRe,
    GammaIm,
    D,
    #[serde(rename = "R")]
    R,
    /// `α R` at fixed `R`; sets `α = value / R`.
    #[serde(rename = "alpha_R")]
    AlphaR,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::Beta => "beta",
            SweepParameter::GammaRe => "gamma_re",
            SweepParameter::GammaIm => "gamma_im",
            SweepParameter::D => "d",
            SweepParameter::R => "R",
            SweepParameter::AlphaR => "alpha_R",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    /// Task evaluated at every point: interval, sphere, radial-oracle or circle-fem.
    pub task: Task,
    pub parameter: SweepParameter,
    pub range: [f64; 2],
    pub steps: usize,
}

impl SweepBlock {
    /// `steps` evenly spaced values including both ends.
    pub fn values(&self) -> Vec<f64> {
        let [lo, hi] = self.range;
        if self.steps <= 1 {
            return vec![lo];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| (lo * (n - i as f64) + hi * i as f64) / n)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
    pub formats: Option<Vec<Format>>,
}

/// A parsed configuration. Field presence is checked by [`RunConfig::validate`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Option<Task>,
    pub coupling: Option<CouplingBlock>,
    #[serde(default)]
    pub geometry: GeometryBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    pub compare: Option<CompareBlock>,
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub violations: Vec<String>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.violations.join("; "))
    }
}

impl std::error::Error for ValidationError {}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse(ParseError),
    Validation(ValidationError),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(e) => e.fmt(f),
            ConfigError::Validation(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<RunConfig, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates.
pub fn load_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config = parse_config(text).map_err(ConfigError::Parse)?;
    config.validate().map_err(ConfigError::Validation)?;
    Ok(config)
}

fn positive(v: &mut Vec<String>, name: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        v.push(format!("{name} must be positive and finite, got {x}"));
    }
}

impl RunConfig {
    /// SHA-256 of the canonical JSON form, so formatting does not matter.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn task(&self) -> Task {
        self.task.expect("validated config has a task")
    }

    pub fn formats(&self) -> Vec<Format> {
        self.output.formats.clone().unwrap_or_else(|| vec![Format::Csv, Format::Json])
    }

    fn raw_regions(&self) -> Vec<RawRegion> {
        let Some(c) = &self.coupling else { return Vec::new() };
        let region = |name: &str, alpha: f64, beta: f64, gamma: [f64; 2], part: Option<SurfacePart>| {
            let part = part.unwrap_or(if beta == 0.0 {
                SurfacePart::SigmaZero
            } else {
                SurfacePart::SigmaBeta
            });
            RawRegion::new(name, Complex64::new(alpha, 0.0), beta, Complex64::new(gamma[0], gamma[1]), part)
        };
        match &c.regions {
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let name = r.name.clone().unwrap_or_else(|| format!("region{i}"));
                    region(&name, r.alpha, r.beta, r.gamma, r.part)
                })
                .collect(),
            None => vec![region(
                "surface",
                c.alpha.unwrap_or(f64::NAN),
                c.beta.unwrap_or(f64::NAN),
                c.gamma.unwrap_or([0.0, 0.0]),
                c.part,
            )],
        }
    }

    pub fn field(&self) -> CouplingField {
        validate_coupling(&self.raw_regions()).expect("validated coupling")
    }

    pub fn coupling(&self) -> Coupling {
        self.field().uniform_coupling().expect("validated single-region coupling")
    }

    /// The comparison case of a single-case `compare` run.
    pub fn comparison_case(&self) -> Option<ComparisonCase> {
        let cmp = self.compare.as_ref()?;
        let id = cmp.case?;
        let g = &self.geometry;
        let geometry = match cmp.geometry? {
            CompareGeometry::Interval => Geometry::Interval { d: g.d? },
            CompareGeometry::CircleFem => Geometry::CircleFem {
                r: g.r?,
                r_out: g.r_out?,
                h: self.solver.h,
            },
            CompareGeometry::SphereRadial => Geometry::SphereRadial {
                r: g.r?,
                r_out: g.r_out?,
                n_grid: self.solver.n_grid,
            },
        };
        let c = self.coupling.as_ref()?;
        let gamma = c.gamma.unwrap_or([0.0, 0.0]);
        Some(ComparisonCase {
            id,
            coupling: Coupling::new(c.alpha?, c.beta?, Complex64::new(gamma[0], gamma[1])),
            reference: cmp.reference?,
            geometry,
            k_count: cmp.k_count,
        })
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut v = Vec::new();
        match self.task {
            None => v.push("task is required".into()),
            Some(task) => self.validate_task(task, &mut v),
        }
        let s = &self.solver;
        positive(&mut v, "solver.tol", s.tol);
        positive(&mut v, "solver.eigen_tol", s.eigen_tol);
        positive(&mut v, "solver.h", s.h);
        positive(&mut v, "solver.h_max", s.h_max);
        positive(&mut v, "solver.count_r_out_factor", s.count_r_out_factor);
        if s.grid < 2 {
            v.push(format!("solver.grid must be at least 2, got {}", s.grid));
        }
        if s.n_grid < surfint_core::radial::MIN_GRID {
            v.push(format!("solver.n_grid must be at least {}, got {}", surfint_core::radial::MIN_GRID, s.n_grid));
        }
        if s.eigen_count == 0 {
            v.push("solver.eigen_count must be at least 1".into());
        }
        if !(s.growth >= 1.0) {
            v.push(format!("solver.growth must be at least 1, got {}", s.growth));
        }
        if s.count_r_out_factor <= 1.0 {
            v.push(format!("solver.count_r_out_factor must exceed 1, got {}", s.count_r_out_factor));
        }
        if let Some(f) = &self.output.formats {
            if f.is_empty() {
                v.push("output.formats must not be empty".into());
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ValidationError { violations: v })
        }
    }

    fn validate_coupling_block(&self, v: &mut Vec<String>, single: bool) {
        let Some(c) = &self.coupling else {
            v.push("coupling is required".into());
            return;
        };
        match &c.regions {
            Some(list) => {
                if c.alpha.is_some() || c.beta.is_some() || c.gamma.is_some() || c.part.is_some() {
                    v.push("coupling: give either alpha/beta/gamma or regions, not both".into());
                }
                if list.is_empty() {
                    v.push("coupling.regions must not be empty".into());
                }
                if single && list.len() > 1 {
                    v.push("coupling.regions: this task needs a single uniform region".into());
                }
            }
            None => {
                if c.alpha.is_none() {
                    v.push("coupling.alpha is required".into());
                }
                if c.beta.is_none() {
                    v.push("coupling.beta is required".into());
                }
            }
        }
        let raw = self.raw_regions();
        if raw.iter().all(|r| r.alpha.re.is_finite() && r.beta.is_finite()) {
            if let Err(e) = validate_coupling(&raw) {
                v.push(format!("coupling: {e}"));
            }
        }
    }

    fn need<'a, T>(v: &mut Vec<String>, x: &'a Option<T>, name: &str) -> Option<&'a T> {
        if x.is_none() {
            v.push(format!("{name} is required"));
        }
        x.as_ref()
    }

    fn validate_task(&self, task: Task, v: &mut Vec<String>) {
        let g = &self.geometry;
        let radius_pair = |v: &mut Vec<String>| {
            let r = Self::need(v, &g.r, "geometry.R");
            let r_out = Self::need(v, &g.r_out, "geometry.R_out");
            if let Some(&r) = r {
                positive(v, "geometry.R", r);
                if let Some(&ro) = r_out {
                    if !(ro > r) {
                        v.push(format!("geometry.R_out = {ro} must exceed geometry.R = {r}"));
                    }
                }
            }
        };
        let dimension = |v: &mut Vec<String>| {
            if let Some(&d) = Self::need(v, &g.dimension, "geometry.dimension") {
                if d != 2 && d != 3 {
                    v.push(format!("geometry.dimension must be 2 or 3, got {d}"));
                }
            }
        };
        match task {
            Task::Interval => {
                self.validate_coupling_block(v, true);
                if let Some(&d) = Self::need(v, &g.d, "geometry.d") {
                    positive(v, "geometry.d", d);
                }
            }
            Task::Sphere => {
                self.validate_coupling_block(v, true);
                if let Some(&r) = Self::need(v, &g.r, "geometry.R") {
                    positive(v, "geometry.R", r);
                }
                if let Some(c) = &self.coupling {
                    if c.beta.is_some_and(|b| b != 0.0) || c.gamma.is_some_and(|g| g != [0.0, 0.0]) {
                        v.push("sphere: exact matching needs a δ coupling (beta = 0, gamma = [0, 0])".into());
                    }
                }
            }
            Task::CircleFem => {
                self.validate_coupling_block(v, false);
                radius_pair(v);
            }
            Task::RadialOracle => {
                self.validate_coupling_block(v, true);
                radius_pair(v);
                dimension(v);
            }
            Task::MInfinity => {
                self.validate_coupling_block(v, true);
                if let Some(c) = &self.coupling {
                    if c.alpha.is_some_and(|a| a < 0.0) || c.beta.is_some_and(|b| b < 0.0) {
                        v.push("m-infinity needs alpha >= 0 and beta >= 0".into());
                    }
                }
            }
            Task::Compare => self.validate_compare(v),
            Task::Certify => {
                self.validate_coupling_block(v, true);
                dimension(v);
                if let Some(&r) = Self::need(v, &g.r, "geometry.R") {
                    positive(v, "geometry.R", r);
                }
            }
            Task::Sweep => self.validate_sweep(v),
        }
    }

    fn validate_compare(&self, v: &mut Vec<String>) {
        let Some(cmp) = &self.compare else {
            v.push("compare is required".into());
            return;
        };
        if cmp.k_count == 0 {
            v.push("compare.k_count must be at least 1".into());
        }
        match (cmp.suite, cmp.case) {
            (Some(_), Some(_)) => v.push("compare: give either suite or case, not both".into()),
            (None, None) => v.push("compare.suite or compare.case is required".into()),
            (Some(_), None) => {
                for (name, set) in [("reference", cmp.reference.is_some()), ("geometry", cmp.geometry.is_some())] {
                    if set {
                        v.push(format!("compare.{name} is not used with a suite"));
                    }
                }
            }
            (None, Some(_)) => {
                self.validate_coupling_block(v, true);
                Self::need(v, &cmp.reference, "compare.reference");
                let g = &self.geometry;
                match Self::need(v, &cmp.geometry, "compare.geometry") {
                    Some(CompareGeometry::Interval) => {
                        Self::need(v, &g.d, "geometry.d");
                    }
                    Some(_) => {
                        Self::need(v, &g.r, "geometry.R");
                        Self::need(v, &g.r_out, "geometry.R_out");
                    }
                    None => {}
                }
                if v.is_empty() {
                    if let Some(case) = self.comparison_case() {
                        let check = check_hypothesis(&case);
                        for f in check.failures {
                            v.push(format!("compare hypothesis ({}): {f}", case.id.as_str()));
                        }
                    }
                }
            }
        }
    }

    fn validate_sweep(&self, v: &mut Vec<String>) {
        let Some(sw) = &self.sweep else {
            v.push("sweep is required".into());
            return;
        };
        let [lo, hi] = sw.range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            v.push(format!("sweep.range must satisfy lo <= hi, got [{lo}, {hi}]"));
        }
        if sw.steps == 0 {
            v.push("sweep.steps must be at least 1".into());
        }
        if sw.steps == 1 && lo != hi {
            v.push("sweep.steps = 1 needs a degenerate range".into());
        }
        match sw.task {
            Task::Interval | Task::Sphere | Task::RadialOracle | Task::CircleFem => {}
            other => {
                v.push(format!("sweep.task must be interval, sphere, radial-oracle or circle-fem, got {other}"));
                return;
            }
        }
        if matches!(sw.parameter, SweepParameter::D) && sw.task != Task::Interval {
            v.push("sweep.parameter d needs sweep.task = interval".into());
        }
        if matches!(sw.parameter, SweepParameter::R | SweepParameter::AlphaR) && sw.task == Task::Interval {
            v.push(format!("sweep.parameter {} needs a radial geometry", sw.parameter.as_str()));
        }
        if self.coupling.as_ref().is_some_and(|c| c.regions.is_some()) {
            v.push("sweep needs an inline single-region coupling".into());
        }
        // Check the first point with the inner task's rules.
        let mut first = self.clone();
        first.task = Some(sw.task);
        first.sweep = None;
        if let Some(point) = first.with_parameter(sw.parameter, lo) {
            point.validate_task(sw.task, v);
        }
    }

    /// A copy with one swept parameter replaced; `None` if the coupling is absent.
    pub fn with_parameter(&self, p: SweepParameter, value: f64) -> Option<RunConfig> {
        let mut c = self.clone();
        let coupling = c.coupling.get_or_insert_with(CouplingBlock::default);
        match p {
            SweepParameter::Alpha => coupling.alpha = Some(value),
            SweepParameter::Beta => coupling.beta = Some(value),
            SweepParameter::GammaRe => coupling.gamma.get_or_insert([0.0, 0.0])[0] = value,
            SweepParameter::GammaIm => coupling.gamma.get_or_insert([0.0, 0.0])[1] = value,
            SweepParameter::D => c.geometry.d = Some(value),
            SweepParameter::R => c.geometry.r = Some(value),
            SweepParameter::AlphaR => coupling.alpha = Some(value / c.geometry.r?),
        }
        Some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_interval_config() {
        let c = load_config(r#"{"task":"interval","coupling":{"alpha":2,"beta":0,"gamma":[0,0]},"geometry":{"d":10}}"#).unwrap();
        assert_eq!(c.task(), Task::Interval);
        assert_eq!(c.coupling(), Coupling::delta(2.0));
    }

    #[test]
    fn missing_half_length_is_named() {
        let err = load_config(r#"{"task":"interval","coupling":{"alpha":2,"beta":0,"gamma":[0,0]},"geometry":{}}"#).unwrap_err();
        let ConfigError::Validation(v) = err else { panic!("{err}") };
        assert!(v.violations.iter().any(|m| m.contains("geometry.d")), "{v}");
    }

    #[test]
    fn scalar_gamma_is_a_parse_error() {
        let err = parse_config("{\"task\":\"interval\",\n\"coupling\":{\"alpha\":2,\"beta\":0,\"gamma\":1}}").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.column > 0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(r#"{"task":"interval","geometry":{"d":1,"dd":2}}"#).unwrap_err();
        assert!(err.message.contains("dd"), "{err}");
    }

    #[test]
    fn all_violations_are_listed() {
        let err = load_config(r#"{"task":"circle-fem","solver":{"tol":-1,"eigen_count":0}}"#).unwrap_err();
        let ConfigError::Validation(v) = err else { panic!() };
        for needle in ["coupling", "geometry.R", "geometry.R_out", "solver.tol", "solver.eigen_count"] {
            assert!(v.violations.iter().any(|m| m.contains(needle)), "missing {needle}: {v}");
        }
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = parse_config(r#"{"task":"interval","geometry":{"d":10}}"#).unwrap();
        let b = parse_config("{ \"geometry\" : { \"d\" : 10.0 },\n \"task\" : \"interval\" }").unwrap();
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn sweep_values_hit_both_ends() {
        let s = SweepBlock {
            task: Task::Sphere,
            parameter: SweepParameter::AlphaR,
            range: [0.9, 1.1],
            steps: 21,
        };
        let v = s.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.9);
        assert_eq!(v[10], 1.0);
        assert_eq!(v[20], 1.1);
    }

    #[test]
    fn compare_hypothesis_is_validated() {
        let err = load_config(
            r#"{"task":"compare","coupling":{"alpha":0,"beta":1,"gamma":[1,0]},"geometry":{"d":5},
                "compare":{"case":"delta-prime-gamma","reference":1,"geometry":"interval"}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("γ ∉ iR"), "{err}");
    }
}
