//! Executable checks of the operator inequalities, the bound-state criteria
//! and the essential-spectrum constants, driving the three solvers.
//!
//! Comparison cases are identified by the shape of the coupling that is
//! compared against a reference δ (or δ′) interaction:
//!
//! | id                         | coupling                 | reference | hypothesis                     |
//! |----------------------------|--------------------------|-----------|--------------------------------|
//! | `delta-mixed`              | `diag(α, β)`             | δ, `α̃`    | `α̃ ≤ α`                        |
//! | `delta-mixed-flipped`      | `diag(α, β)`             | δ, `α̃`    | `α̃ ≤ 4/β`                      |
//! | `delta-prime-gamma`        | `(0, γ; −γ̄, β)`, `γ ∈ iR` | δ, `α̃`    | `α̃ ≤ (4 + |γ|²)/β`             |
//! | `delta-gamma`              | `(α, γ; −γ̄, 0)`, `γ ∈ iR` | δ, `α̃`    | `α̃ ≤ α/|1 + γ/2|²`             |
//! | `delta-prime-intermediate` | `(α, γ; −γ̄, 0)`          | δ′, `β̃`   | `α ≤ 4/β̃`                      |
//!
//! In the first four the coupling lies below the reference; in the last the
//! reference lies below the coupling. The unitary maps involved only change
//! the phases of the two traces, so spectra are compared directly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coupling::{m_infinity, Coupling, CouplingError, CouplingField, SurfacePart};
use crate::fem2d::{self, assemble, lowest_eigenpairs_with, EigenOptions, FemError, FemOptions};
use crate::interval::{m_interval, negative_spectrum_refined, IntervalError, IntervalProblem, ScanOptions};
use crate::radial::{assemble_all_modes, OuterBc, RadialError, RadialGeometry};
use crate::report::{Certificate, CertificateStatus, SpectrumReport};

/// Slack for interval comparisons (exact solver).
pub const INTERVAL_SLACK: f64 = 1e-10;
/// Slack for same-mesh FEM and same-grid radial comparisons.
pub const DISCRETE_SLACK: f64 = 1e-8;

/// Tolerance for the closed-form identities of [`essential_bound_check`].
pub const IDENTITY_TOL: f64 = 1e-12;

const IMAG_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("hypothesis fails: {}", .0.join("; "))]
    HypothesisFailed(Vec<String>),
    #[error("geometry unavailable: {0}")]
    GeometryUnavailable(String),
    #[error("no pinching case applies: {0}")]
    CaseInapplicable(String),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseId {
    DeltaMixed,
    DeltaMixedFlipped,
    DeltaPrimeGamma,
    DeltaGamma,
    DeltaPrimeIntermediate,
}

impl CaseId {
    pub const ALL: [CaseId; 5] = [
        CaseId::DeltaMixed,
        CaseId::DeltaMixedFlipped,
        CaseId::DeltaPrimeGamma,
        CaseId::DeltaGamma,
        CaseId::DeltaPrimeIntermediate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::DeltaMixed => "delta-mixed",
            CaseId::DeltaMixedFlipped => "delta-mixed-flipped",
            CaseId::DeltaPrimeGamma => "delta-prime-gamma",
            CaseId::DeltaGamma => "delta-gamma",
            CaseId::DeltaPrimeIntermediate => "delta-prime-intermediate",
        }
    }

    /// True when the reference operator is the lower side.
    pub fn reference_is_lower(self) -> bool {
        self == CaseId::DeltaPrimeIntermediate
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown case id {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    /// The 1-D model on `(−d, d)` with Neumann endpoints.
    Interval { d: f64 },
    /// Disk of radius `r` in a Neumann disk of radius `r_out`, P1 mesh of width `h`.
    CircleFem { r: f64, r_out: f64, h: f64 },
    /// Sphere of radius `r`, radial finite differences on `n_grid` interior cells.
    SphereRadial { r: f64, r_out: f64, n_grid: usize },
}

impl Geometry {
    pub fn label(&self) -> &'static str {
        match self {
            Geometry::Interval { .. } => "interval (1-D analogue)",
            Geometry::CircleFem { .. } => "circle-fem",
            Geometry::SphereRadial { .. } => "sphere-radial",
        }
    }

    pub fn slack(&self) -> f64 {
        match self {
            Geometry::Interval { .. } => INTERVAL_SLACK,
            _ => DISCRETE_SLACK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCase {
    pub id: CaseId,
    pub coupling: Coupling,
    /// `α̃` for the δ references, `β̃` for the δ′ reference.
    pub reference: f64,
    pub geometry: Geometry,
    pub k_count: usize,
}

impl ComparisonCase {
    pub fn reference_coupling(&self) -> Coupling {
        match self.id {
            CaseId::DeltaPrimeIntermediate => Coupling::delta_prime(self.reference),
            _ => Coupling::delta(self.reference),
        }
    }

    /// `(lower, upper)` in the ordering claimed for this case.
    pub fn ordered_pair(&self) -> (Coupling, Coupling) {
        if self.id.reference_is_lower() {
            (self.reference_coupling(), self.coupling)
        } else {
            (self.coupling, self.reference_coupling())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub failures: Vec<String>,
}

fn is_imaginary(g: Complex64) -> bool {
    g.re.abs() <= IMAG_TOL
}

pub fn check_hypothesis(case: &ComparisonCase) -> HypothesisCheck {
    let Coupling { alpha, beta, gamma } = case.coupling;
    let r = case.reference;
    let mut failures = Vec::new();
    let mut need = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };
    match case.id {
        CaseId::DeltaMixed | CaseId::DeltaMixedFlipped => {
            need(gamma == Complex64::new(0.0, 0.0), format!("γ = {gamma} must vanish"));
            need(alpha >= 0.0, format!("α = {alpha} < 0"));
            need(beta > 0.0, format!("β = {beta} must be positive"));
            if case.id == CaseId::DeltaMixed {
                need(r <= alpha, format!("α̃ = {r} > α = {alpha}"));
            } else if beta > 0.0 {
                need(r <= 4.0 / beta, format!("α̃ = {r} > 4/β = {}", 4.0 / beta));
            }
        }
        CaseId::DeltaPrimeGamma => {
            need(alpha == 0.0, format!("α = {alpha} must vanish"));
            need(beta > 0.0, format!("β = {beta} must be positive"));
            need(is_imaginary(gamma), "γ ∉ iR".into());
            if beta > 0.0 {
                let bound = (4.0 + gamma.norm_sqr()) / beta;
                need(r <= bound, format!("α̃ = {r} > (4 + |γ|²)/β = {bound}"));
            }
        }
        CaseId::DeltaGamma => {
            need(beta == 0.0, format!("β = {beta} must vanish"));
            need(is_imaginary(gamma), "γ ∉ iR".into());
            need(alpha >= 0.0, format!("α = {alpha} < 0"));
            let bound = alpha / (Complex64::new(1.0, 0.0) + gamma / 2.0).norm_sqr();
            need(r <= bound, format!("α̃ = {r} > α/|1 + γ/2|² = {bound}"));
        }
        CaseId::DeltaPrimeIntermediate => {
            need(beta == 0.0, format!("β = {beta} must vanish"));
            need(alpha >= 0.0, format!("α = {alpha} < 0"));
            need(r > 0.0, format!("β̃ = {r} must be positive"));
            if r > 0.0 {
                need(alpha <= 4.0 / r, format!("α = {alpha} > 4/β̃ = {}", 4.0 / r));
            }
        }
    }
    if case.k_count == 0 {
        failures.push("k_count must be at least 1".into());
    }
    HypothesisCheck {
        holds: failures.is_empty(),
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub case_id: Option<CaseId>,
    pub geometry: String,
    /// `λ_k` of the side claimed to be lower.
    pub lower: Vec<f64>,
    /// `λ_k` of the side claimed to be upper.
    pub upper: Vec<f64>,
    pub ordering_ok: bool,
    /// `min_k (upper_k − lower_k)` over informative pairs; `0` if none.
    pub margin: f64,
    pub tolerance: f64,
    pub diagnostics: Vec<String>,
}

/// Pads negative spectra to `k` values with zero: the compared quantity is
/// `min(λ_k, 0)`, which is all a negative-spectrum solver determines.
fn padded(mut values: Vec<f64>, k: usize) -> (Vec<f64>, usize) {
    let real = values.len().min(k);
    values.truncate(k);
    values.resize(k, 0.0);
    (values, real)
}

fn interval_lambdas(c: Coupling, d: f64, k: usize) -> Result<(Vec<f64>, usize), HarnessError> {
    let prob = IntervalProblem::new(c, d)?;
    let spec = negative_spectrum_refined(&prob, &ScanOptions::default(), 6)?;
    Ok(padded(spec.negative_eigenvalues, k))
}

fn sphere_lambdas(c: Coupling, r: f64, r_out: f64, n_grid: usize, k: usize) -> Result<(Vec<f64>, usize), HarnessError> {
    let geom = RadialGeometry::new(3, r, r_out, OuterBc::Neumann, 0)?;
    let report = assemble_all_modes(&geom, &CouplingField::uniform(c)?, n_grid)?;
    Ok(padded(report.negative_eigenvalues, k))
}

fn comparison_eigen_options() -> EigenOptions {
    EigenOptions {
        tol: 1e-10,
        ..EigenOptions::default()
    }
}

/// Compares `λ_k(lower) ≤ λ_k(upper)` for `k ≤ k_count` on one geometry.
pub fn compare_couplings(lower: Coupling, upper: Coupling, geometry: &Geometry, k_count: usize) -> Result<Verdict, HarnessError> {
    let mut diagnostics = Vec::new();
    let (lo, up, informative) = match *geometry {
        Geometry::Interval { d } => {
            if !(d > 0.0 && d.is_finite()) {
                return Err(HarnessError::GeometryUnavailable(format!("interval half-length {d}")));
            }
            let (lo, nl) = interval_lambdas(lower, d, k_count)?;
            let (up, nu) = interval_lambdas(upper, d, k_count)?;
            diagnostics.push(format!("negative eigenvalues: lower {nl}, upper {nu}; compared as min(λ_k, 0)"));
            (lo, up, nl.max(nu))
        }
        Geometry::SphereRadial { r, r_out, n_grid } => {
            if !(r > 0.0 && r_out > r) {
                return Err(HarnessError::GeometryUnavailable(format!("sphere R = {r}, R_out = {r_out}")));
            }
            let (lo, nl) = sphere_lambdas(lower, r, r_out, n_grid, k_count)?;
            let (up, nu) = sphere_lambdas(upper, r, r_out, n_grid, k_count)?;
            diagnostics.push(format!("negative eigenvalues: lower {nl}, upper {nu}; compared as min(λ_k, 0)"));
            (lo, up, nl.max(nu))
        }
        Geometry::CircleFem { r, r_out, h } => {
            let mesh = fem2d::ladder_base_mesh(r, r_out, h, &FemOptions::default())
                .map_err(|e| HarnessError::GeometryUnavailable(e.to_string()))?;
            let opts = comparison_eigen_options();
            let mut solve = |c: Coupling| -> Result<Vec<f64>, HarnessError> {
                let pencil = assemble(&CouplingField::uniform(c)?, &mesh)?;
                let (pairs, diag) = lowest_eigenpairs_with(&pencil, k_count, &opts)?;
                diagnostics.push(format!(
                    "{} dofs, {} solver, max residual {:e}",
                    pencil.size(),
                    diag.method,
                    diag.max_residual
                ));
                Ok(pairs.iter().map(|p| p.value).collect())
            };
            let lo = solve(lower)?;
            let up = solve(upper)?;
            let n = lo.len().min(up.len());
            diagnostics.push(format!("same mesh: {} vertices, {} triangles", mesh.vertices.len(), mesh.triangles.len()));
            (lo, up, n)
        }
    };
    let tolerance = geometry.slack();
    let margin = lo
        .iter()
        .zip(&up)
        .take(informative)
        .map(|(l, u)| u - l)
        .fold(f64::INFINITY, f64::min);
    let margin = if margin.is_finite() { margin } else { 0.0 };
    Ok(Verdict {
        case_id: None,
        geometry: geometry.label().into(),
        ordering_ok: margin >= -tolerance,
        lower: lo,
        upper: up,
        margin,
        tolerance,
        diagnostics,
    })
}

pub fn compare_spectra(case: &ComparisonCase) -> Result<Verdict, HarnessError> {
    let check = check_hypothesis(case);
    if !check.holds {
        return Err(HarnessError::HypothesisFailed(check.failures));
    }
    let (lower, upper) = case.ordered_pair();
    let mut verdict = compare_couplings(lower, upper, &case.geometry, case.k_count)?;
    verdict.case_id = Some(case.id);
    Ok(verdict)
}

/// Twenty hypothesis-satisfying cases: four per id, two on the interval and
/// two on a shared circle mesh, including the boundary-equality cases.
pub fn standard_suite() -> Vec<ComparisonCase> {
    let i = |x: f64| Complex64::new(0.0, x);
    let z = Complex64::new(0.0, 0.0);
    let interval = Geometry::Interval { d: 10.0 };
    let interval_short = Geometry::Interval { d: 3.0 };
    let circle = Geometry::CircleFem {
        r: 1.0,
        r_out: 4.0,
        h: 0.25,
    };
    let case = |id, coupling, reference, geometry| ComparisonCase {
        id,
        coupling,
        reference,
        geometry,
        k_count: 3,
    };
    vec![
        case(CaseId::DeltaMixed, Coupling::new(2.0, 1.0, z), 2.0, interval),
        case(CaseId::DeltaMixed, Coupling::new(1.5, 0.5, z), 0.7, interval_short),
        case(CaseId::DeltaMixed, Coupling::new(2.0, 1.0, z), 2.0, circle),
        case(CaseId::DeltaMixed, Coupling::new(1.0, 2.0, z), 0.5, circle),
        case(CaseId::DeltaMixedFlipped, Coupling::new(0.0, 2.0, z), 2.0, interval),
        case(CaseId::DeltaMixedFlipped, Coupling::new(3.0, 0.5, z), 5.0, interval_short),
        case(CaseId::DeltaMixedFlipped, Coupling::new(0.0, 1.0, z), 4.0, circle),
        case(CaseId::DeltaMixedFlipped, Coupling::new(1.0, 2.0, z), 1.5, circle),
        case(CaseId::DeltaPrimeGamma, Coupling::new(0.0, 2.0, i(2.0)), 4.0, interval),
        case(CaseId::DeltaPrimeGamma, Coupling::new(0.0, 1.0, i(-1.0)), 3.0, interval_short),
        case(CaseId::DeltaPrimeGamma, Coupling::new(0.0, 2.0, i(1.0)), 2.5, circle),
        case(CaseId::DeltaPrimeGamma, Coupling::new(0.0, 4.0, i(2.0)), 1.0, circle),
        case(CaseId::DeltaGamma, Coupling::new(2.0, 0.0, i(2.0)), 1.0, interval),
        case(CaseId::DeltaGamma, Coupling::new(3.0, 0.0, i(-1.0)), 1.5, interval_short),
        case(CaseId::DeltaGamma, Coupling::new(2.0, 0.0, i(2.0)), 1.0, circle),
        case(CaseId::DeltaGamma, Coupling::new(1.0, 0.0, i(1.0)), 0.5, circle),
        case(CaseId::DeltaPrimeIntermediate, Coupling::new(1.0, 0.0, Complex64::new(0.5, 0.0)), 4.0, interval),
        case(CaseId::DeltaPrimeIntermediate, Coupling::new(2.0, 0.0, Complex64::new(-0.3, 1.2)), 1.0, interval_short),
        case(CaseId::DeltaPrimeIntermediate, Coupling::new(1.0, 0.0, Complex64::new(0.5, 0.0)), 4.0, circle),
        case(CaseId::DeltaPrimeIntermediate, Coupling::new(0.5, 0.0, Complex64::new(1.0, 1.0)), 2.0, circle),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CompactGeometry {
    Circle { r: f64 },
    Sphere { r: f64 },
}

impl CompactGeometry {
    pub fn dimension(&self) -> u8 {
        match self {
            CompactGeometry::Circle { .. } => 2,
            CompactGeometry::Sphere { .. } => 3,
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            CompactGeometry::Circle { r } | CompactGeometry::Sphere { r } => r,
        }
    }

    pub fn measure(&self) -> f64 {
        match *self {
            CompactGeometry::Circle { r } => 2.0 * PI * r,
            CompactGeometry::Sphere { r } => 4.0 * PI * r * r,
        }
    }
}

/// Settings for the numeric count in [`bound_state_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountOptions {
    /// Outer radius as a multiple of `R`.
    pub r_out_factor: f64,
    pub n_grid: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            r_out_factor: 40.0,
            n_grid: 256,
        }
    }
}

fn predicted(criterion: &str, quantity: f64, prediction: &str, n: usize, holds: bool, detail: String) -> Certificate {
    Certificate {
        criterion: criterion.into(),
        status: if holds {
            CertificateStatus::Holds
        } else {
            CertificateStatus::Violated
        },
        quantity: Some(quantity),
        prediction: Some(prediction.into()),
        detail: format!("{detail}; numeric N = {n}"),
    }
}

/// Evaluates the compact-surface bound-state criteria for a uniform coupling
/// and cross-checks them against the eigenvalue count of the radial solver.
///
/// The count uses a Dirichlet wall at `r_out_factor · R`. A Neumann wall always
/// produces a negative eigenvalue for attractive couplings, whereas a Dirichlet
/// wall only raises eigenvalues, so a Dirichlet bound state is a bound state
/// of the unbounded problem.
pub fn bound_state_certificate(field: &CouplingField, geometry: &CompactGeometry, opts: &CountOptions) -> Result<SpectrumReport, HarnessError> {
    let c = field.uniform_coupling().ok_or(RadialError::NonUniformCoupling)?;
    let r = geometry.radius();
    let geom = RadialGeometry::new(geometry.dimension(), r, opts.r_out_factor * r, OuterBc::Dirichlet, 0)?;
    let mut report = assemble_all_modes(&geom, field, opts.n_grid)?;
    report.method = format!("radial-fd ({}-D, Dirichlet at R_out = {})", geometry.dimension(), geom.r_out);
    let n = report.bound_state_count;
    let one = Complex64::new(1.0, 0.0);
    let plus = (one + c.gamma / 2.0).norm_sqr();
    let minus = (one - c.gamma / 2.0).norm_sqr();
    let mut certs = Vec::new();

    const INTEGRAL: &str = "integral criterion (β ≠ 0 on Σ)";
    if c.part() == SurfacePart::SigmaBeta {
        let integral = geometry.measure() * (plus / c.beta + c.alpha / 4.0);
        if integral > 0.0 {
            certs.push(predicted(INTEGRAL, integral, "N ≥ 1", n, n >= 1, format!("∫(|1+γ/2|²/β + α/4) = {integral}")));
        } else {
            certs.push(Certificate::not_applicable(INTEGRAL, format!("integral {integral} ≤ 0, criterion silent")));
        }
    } else {
        certs.push(Certificate::not_applicable(INTEGRAL, "β = 0 on Σ"));
    }

    const PLANAR: &str = "planar existence (n = 2, β = 0, α ≥ α_min > 0)";
    if geometry.dimension() == 2 && c.part() == SurfacePart::SigmaZero && c.alpha > 0.0 {
        certs.push(predicted(PLANAR, c.alpha, "N ≥ 1", n, n >= 1, format!("α_min = {}", c.alpha)));
    } else {
        certs.push(Certificate::not_applicable(PLANAR, "needs n = 2, β ≡ 0 and α > 0"));
    }

    const NONEXIST: &str = "δ-comparison nonexistence (β = 0, 0 ≤ α ≤ α_max)";
    if c.part() == SurfacePart::SigmaZero && c.alpha >= 0.0 {
        let denom = plus.min(minus);
        let alpha_tilde = if c.alpha == 0.0 { 0.0 } else { c.alpha / denom };
        // N(δ, α̃) = 0 iff α̃R ≤ 1 on the sphere, iff α̃ ≤ 0 on the circle.
        let reference_empty = match geometry {
            CompactGeometry::Sphere { .. } => alpha_tilde * r <= 1.0,
            CompactGeometry::Circle { .. } => alpha_tilde <= 0.0,
        };
        if reference_empty {
            certs.push(predicted(NONEXIST, alpha_tilde, "N = 0", n, n == 0, format!("α̃ = {alpha_tilde}, α̃R = {}", alpha_tilde * r)));
        } else {
            certs.push(Certificate::not_applicable(
                NONEXIST,
                format!("α̃ = {alpha_tilde}: the reference δ operator has bound states"),
            ));
        }
    } else {
        certs.push(Certificate::not_applicable(NONEXIST, "needs β ≡ 0 and α ≥ 0"));
    }
    report.certificates = certs;
    report.tolerances.push(("r_out".into(), geom.r_out));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinchingCase {
    pub case: String,
    pub alpha_tilde: f64,
    /// `−α̃²/4`.
    pub delta_bottom: f64,
    pub gap: f64,
    pub identity_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialReport {
    pub m_a: f64,
    pub cases: Vec<PinchingCase>,
    /// `m_{A,d}` at the largest half-length used.
    pub interval_limit: f64,
    pub interval_d: f64,
    pub interval_gap: f64,
    pub notes: Vec<String>,
}

/// Half-length for the interval limit of `m_A`.
pub const ESSENTIAL_CHECK_D: f64 = 16.0;

/// Matches `m_A` against the bottom `−α̃²/4` of the δ operator whose
/// strength pinches it, in each case whose shape fits the coupling, and
/// against the interval ground state at large half-length.
pub fn essential_bound_check(alpha: f64, beta: f64, gamma: Complex64) -> Result<EssentialReport, HarnessError> {
    if alpha < 0.0 || beta < 0.0 {
        return Err(HarnessError::CaseInapplicable(format!("needs α, β ≥ 0, got {alpha}, {beta}")));
    }
    let m_a = m_infinity(alpha, beta, gamma)?;
    let mut cases = Vec::new();
    let mut notes = Vec::new();
    let mut push = |name: &str, alpha_tilde: f64| {
        let delta_bottom = -alpha_tilde * alpha_tilde / 4.0;
        let gap = (m_a - delta_bottom).abs();
        cases.push(PinchingCase {
            case: name.into(),
            alpha_tilde,
            delta_bottom,
            gap,
            identity_holds: gap <= IDENTITY_TOL * m_a.abs().max(1.0),
        });
    };
    let zero = gamma == Complex64::new(0.0, 0.0);
    if zero && beta > 0.0 {
        push("mixed (α̃ = 4/β)", 4.0 / beta);
        let ab = alpha * beta;
        notes.push(format!(
            "αβ = {ab}: the mixed-case identity m_A = −4/β² holds exactly when αβ ≤ 4, otherwise m_A = −α²/4"
        ));
        if alpha > 4.0 / beta {
            notes.push("α > 4/β: outside the mixed case, reported for comparison only".into());
        }
    }
    if alpha == 0.0 && beta > 0.0 && is_imaginary(gamma) {
        push("δ′ with γ ∈ iR (α̃ = (4 + |γ|²)/β)", (4.0 + gamma.norm_sqr()) / beta);
    }
    if beta == 0.0 && alpha > 0.0 && is_imaginary(gamma) {
        push("δ with γ ∈ iR (α̃ = α/|1 + γ/2|²)", alpha / (Complex64::new(1.0, 0.0) + gamma / 2.0).norm_sqr());
    }
    if cases.is_empty() {
        return Err(HarnessError::CaseInapplicable(format!(
            "(α, β, γ) = ({alpha}, {beta}, {gamma}) fits none of the pinching shapes"
        )));
    }
    let prob = IntervalProblem::new(Coupling::new(alpha, beta, gamma), ESSENTIAL_CHECK_D)?;
    if prob.is_degenerate() {
        notes.push("γ = 0 and αβ = 4: the interval limit converges slowly in d".into());
    }
    let interval_limit = m_interval(&prob)?;
    Ok(EssentialReport {
        m_a,
        cases,
        interval_limit,
        interval_d: ESSENTIAL_CHECK_D,
        interval_gap: (interval_limit - m_a).abs(),
        notes,
    })
}
