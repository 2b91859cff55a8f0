//! Rotation-invariant problems: the exact s-wave δ sphere and per-mode radial
//! finite differences for circles (2-D) and spheres (3-D).
//!
//! The finite-difference scheme discretises the radial energy
//!
//! ```text
//! 2-D:  ∫ |ψ'|² r + m² ∫ |ψ|²/r − R ⟨Θ ψ_Σ, ψ_Σ⟩
//! 3-D:  ∫ |u'|² + ℓ(ℓ+1) ∫ |u|²/r² − ⟨(Θ + diag(1/R, −1/R)) u_Σ, u_Σ⟩ − |u(R_out)|²/R_out
//! ```
//!
//! (`u = rψ`, last term only with a Neumann wall) with three-point stencils and
//! lumped mass, keeping two interface nodes for the inner and outer trace.
//! Its stationarity conditions are the second-order difference equation plus
//! the interface conditions `∂_{ν_i}ψ = (Θψ)_i`, `∂_{ν_e}ψ = (Θψ)_e` at `r = R`
//! (`∂_{ν_i}ψ = ψ'(R−)`, `∂_{ν_e}ψ = −ψ'(R+)`). On Σ₀ the trace constraint is
//! eliminated exactly. The pencil is Hermitian tridiagonal, so eigenvalues come
//! from Sturm bisection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coupling::{Coupling, CouplingField, SurfacePart};
use crate::report::{convergence_from_levels, Convergence, ConvergenceLevel, SpectrumReport};
use crate::roots::{bisect, RootBracket};

pub const MIN_GRID: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("n_grid must be at least {MIN_GRID}, got {0}")]
    GridTooSmall(usize),
    #[error("radial solvers need one coupling on the whole interface")]
    NonUniformCoupling,
    #[error("sphere matching needs a finite α̃ and R > 0")]
    InvalidMatchingInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBc {
    Neumann,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGeometry {
    pub dimension: u8,
    pub r: f64,
    pub r_out: f64,
    pub outer_bc: OuterBc,
    /// Angular index `m` (2-D) or `ℓ` (3-D).
    pub mode: usize,
}

impl RadialGeometry {
    pub fn new(dimension: u8, r: f64, r_out: f64, outer_bc: OuterBc, mode: usize) -> Result<Self, RadialError> {
        let g = Self {
            dimension,
            r,
            r_out,
            outer_bc,
            mode,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), RadialError> {
        if self.dimension != 2 && self.dimension != 3 {
            return Err(RadialError::InvalidGeometry(format!("dimension must be 2 or 3, got {}", self.dimension)));
        }
        if !(self.r > 0.0 && self.r.is_finite() && self.r_out > self.r && self.r_out.is_finite()) {
            return Err(RadialError::InvalidGeometry(format!(
                "need 0 < R < R_out, got R = {}, R_out = {}",
                self.r, self.r_out
            )));
        }
        Ok(())
    }

    pub fn with_mode(&self, mode: usize) -> Self {
        Self { mode, ..*self }
    }

    /// Angular multiplicity of the mode in the full operator.
    pub fn multiplicity(&self) -> usize {
        match (self.dimension, self.mode) {
            (_, 0) => 1,
            (2, _) => 2,
            (_, l) => 2 * l + 1,
        }
    }

    /// Exterior cells per interior cell, chosen so grid doubling is exact.
    fn exterior_ratio(&self) -> usize {
        (((self.r_out - self.r) / self.r).ceil() as usize).max(1)
    }
}

/// Result of the s-wave δ matching on a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereMatching {
    pub bound_state_count: usize,
    pub eigenvalue: Option<f64>,
    pub k: Option<f64>,
}

/// `φ(k) = α̃(1 − e^{−2kR})/k − 2`, whose positive zero gives `λ = −k²`.
fn sphere_phi(alpha_tilde: f64, r: f64, k: f64) -> f64 {
    -alpha_tilde * (-2.0 * k * r).exp_m1() / k - 2.0
}

/// Exact lowest (`ℓ = 0`) bound state of the δ-sphere on the unbounded exterior.
///
/// Matching `A sinh(kr)/r` inside with `B e^{−kr}/r` outside under trace
/// continuity and the jump `ψ'(R−) − ψ'(R+) = α̃ ψ(R)` gives
/// `α̃ (1 − e^{−2kR}) = 2k`. `φ` decreases from `2(α̃R − 1)` at `k = 0⁺`, so a
/// root exists iff `α̃R > 1` and lies in `(0, α̃/2]`.
pub fn sphere_swave_matching(alpha_tilde: f64, r: f64) -> Result<SphereMatching, RadialError> {
    if !(alpha_tilde.is_finite() && r > 0.0 && r.is_finite()) {
        return Err(RadialError::InvalidMatchingInput);
    }
    if 2.0 * (alpha_tilde * r - 1.0) <= 0.0 {
        return Ok(SphereMatching {
            bound_state_count: 0,
            eigenvalue: None,
            k: None,
        });
    }
    let f = |k: f64| if k == 0.0 { 2.0 * (alpha_tilde * r - 1.0) } else { sphere_phi(alpha_tilde, r, k) };
    let bracket = bisect(
        f,
        RootBracket {
            k_lo: 0.0,
            k_hi: 0.5 * alpha_tilde,
        },
        1e-14,
        2000,
    )
    .map_err(|_| RadialError::InvalidMatchingInput)?;
    let k = 0.5 * (bracket.k_lo + bracket.k_hi);
    Ok(SphereMatching {
        bound_state_count: 1,
        eigenvalue: Some(-k * k),
        k: Some(k),
    })
}

/// Locates the 0 → 1 transition of the s-wave count in `α̃ ∈ [lo, hi]` by
/// bisection on the count itself.
pub fn sphere_threshold(r: f64, lo: f64, hi: f64, tol: f64) -> Result<f64, RadialError> {
    let count = |a: f64| sphere_swave_matching(a, r).map(|m| m.bound_state_count);
    let (mut lo, mut hi) = (lo, hi);
    if count(lo)? != 0 || count(hi)? != 1 {
        return Err(RadialError::InvalidGeometry(format!("no 0 → 1 transition in [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid)? == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSpectrum {
    /// Ascending negative eigenvalues of this mode.
    pub negative_eigenvalues: Vec<f64>,
    pub n_grid: usize,
    pub h_inner: f64,
    pub h_outer: f64,
    pub unknowns: usize,
    /// Eigenvalues above `−zero_cutoff` are treated as zero.
    pub zero_cutoff: f64,
}

/// Hermitian tridiagonal pencil with diagonal mass.
#[derive(Debug, Clone)]
struct TridiagonalPencil {
    diag: Vec<f64>,
    off: Vec<Complex64>,
    mass: Vec<f64>,
}

impl TridiagonalPencil {
    /// Real symmetric `M^{−1/2} K M^{−1/2}` with off-diagonal phases removed.
    fn symmetric(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.diag.iter().zip(&self.mass).map(|(k, m)| k / m).collect();
        let e = self
            .off
            .iter()
            .enumerate()
            .map(|(j, b)| b.norm() / (self.mass[j] * self.mass[j + 1]).sqrt())
            .collect();
        (d, e)
    }
}

/// Number of eigenvalues strictly below `x` (Sturm sequence).
fn sturm_count(d: &[f64], e2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for j in 1..d.len() {
        let prev = if q == 0.0 { f64::EPSILON * (d[j - 1].abs() + 1.0) } else { q };
        q = d[j] - x - e2[j - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Negative eigenvalues of a symmetric tridiagonal matrix, ascending.
fn tridiagonal_negative_eigenvalues(d: &[f64], e: &[f64]) -> (Vec<f64>, f64) {
    let e2: Vec<f64> = e.iter().map(|x| x * x).collect();
    let norm = d
        .iter()
        .enumerate()
        .map(|(j, dj)| {
            let left = if j > 0 { e[j - 1] } else { 0.0 };
            let right = if j < e.len() { e[j] } else { 0.0 };
            dj.abs() + left + right
        })
        .fold(0.0, f64::max);
    let lower = d
        .iter()
        .enumerate()
        .map(|(j, dj)| {
            let left = if j > 0 { e[j - 1] } else { 0.0 };
            let right = if j < e.len() { e[j] } else { 0.0 };
            dj - left - right
        })
        .fold(f64::INFINITY, f64::min);
    let cutoff = 64.0 * f64::EPSILON * norm;
    let n_neg = sturm_count(d, &e2, -cutoff);
    let mut out = Vec::with_capacity(n_neg);
    for idx in 0..n_neg {
        let (mut lo, mut hi) = (lower.min(-cutoff) - 1.0, -cutoff);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * mid.abs() {
                break;
            }
            if sturm_count(d, &e2, mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    (out, cutoff)
}

fn assemble_pencil(geom: &RadialGeometry, coupling: &Coupling, n_grid: usize) -> (TridiagonalPencil, f64, f64) {
    let n_in = n_grid;
    let n_out = n_grid * geom.exterior_ratio();
    let h_in = geom.r / n_in as f64;
    let h_out = (geom.r_out - geom.r) / n_out as f64;
    let mode = geom.mode as f64;
    let two_d = geom.dimension == 2;
    let centrifugal = if two_d { mode * mode } else { mode * (mode + 1.0) };

    // Radii of all nodes: inner 0..=n_in (last is the inner trace), outer 0..=n_out.
    let radius_in = |j: usize| if j == n_in { geom.r } else { j as f64 * h_in };
    let radius_out = |j: usize| if j == n_out { geom.r_out } else { geom.r + j as f64 * h_out };

    let stiff = |a: f64, b: f64| if two_d { 0.5 * (a + b) / (b - a) } else { 1.0 / (b - a) };
    let mass_cell = |a: f64, b: f64| if two_d { 0.5 * (b * b - a * a) } else { b - a };
    let potential = |r: f64, len: f64| if r == 0.0 { 0.0 } else if two_d { centrifugal * len / r } else { centrifugal * len / (r * r) };

    let total = n_in + 1 + n_out + 1;
    let mut diag = vec![0.0; total];
    let mut mass = vec![0.0; total];
    let mut off = vec![Complex64::new(0.0, 0.0); total - 1];

    let add_segment = |i0: usize, a: f64, b: f64, diag: &mut [f64], mass: &mut [f64], off: &mut [Complex64]| {
        let s = stiff(a, b);
        diag[i0] += s;
        diag[i0 + 1] += s;
        off[i0] -= Complex64::new(s, 0.0);
        let mid = 0.5 * (a + b);
        mass[i0] += mass_cell(a, mid);
        mass[i0 + 1] += mass_cell(mid, b);
        diag[i0] += potential(a, mid - a);
        diag[i0 + 1] += potential(b, b - mid);
    };
    for j in 0..n_in {
        add_segment(j, radius_in(j), radius_in(j + 1), &mut diag, &mut mass, &mut off);
    }
    let e0 = n_in + 1;
    for j in 0..n_out {
        add_segment(e0 + j, radius_out(j), radius_out(j + 1), &mut diag, &mut mass, &mut off);
    }
    // The i–e link (index n_in) carries only the interface term.
    let theta = coupling.theta();
    let weight = if two_d { geom.r } else { 1.0 };
    let i_node = n_in;
    let e_node = e0;
    diag[i_node] -= weight * theta.get(0, 0).re;
    diag[e_node] -= weight * theta.get(1, 1).re;
    off[i_node] -= theta.get(0, 1) * weight;
    if !two_d {
        diag[i_node] -= 1.0 / geom.r;
        diag[e_node] += 1.0 / geom.r;
        if geom.outer_bc == OuterBc::Neumann {
            diag[total - 1] -= 1.0 / geom.r_out;
        }
    }

    let mut pencil = TridiagonalPencil { diag, off, mass };
    if coupling.part() == SurfacePart::SigmaZero {
        pencil = merge_constrained(pencil, i_node, coupling);
    }
    let drop_first = !two_d || geom.mode > 0;
    let drop_last = geom.outer_bc == OuterBc::Dirichlet;
    let end = pencil.diag.len() - usize::from(drop_last);
    let start = usize::from(drop_first);
    let pencil = TridiagonalPencil {
        diag: pencil.diag[start..end].to_vec(),
        mass: pencil.mass[start..end].to_vec(),
        off: pencil.off[start..end - 1].to_vec(),
    };
    (pencil, h_in, h_out)
}

/// Replaces the adjacent trace nodes `i`, `i+1` by one unknown `φ` with
/// `(f_i, f_e) = (a, b) φ` solving the Σ₀ constraint.
fn merge_constrained(p: TridiagonalPencil, i: usize, coupling: &Coupling) -> TridiagonalPencil {
    let (ci, ce) = coupling.trace_constraint();
    let one = Complex64::new(1.0, 0.0);
    let (a, b) = if ce.norm() >= ci.norm() { (one, ci / ce) } else { (ce / ci, one) };
    let e = i + 1;
    let link = p.off[i];
    let merged_diag = a.norm_sqr() * p.diag[i] + b.norm_sqr() * p.diag[e] + 2.0 * (a.conj() * link * b).re;
    let merged_mass = a.norm_sqr() * p.mass[i] + b.norm_sqr() * p.mass[e];
    let mut diag = Vec::with_capacity(p.diag.len() - 1);
    let mut mass = Vec::with_capacity(p.diag.len() - 1);
    diag.extend_from_slice(&p.diag[..i]);
    diag.push(merged_diag);
    diag.extend_from_slice(&p.diag[e + 1..]);
    mass.extend_from_slice(&p.mass[..i]);
    mass.push(merged_mass);
    mass.extend_from_slice(&p.mass[e + 1..]);
    let mut off = Vec::with_capacity(p.off.len() - 1);
    off.extend_from_slice(&p.off[..i.saturating_sub(1)]);
    if i > 0 {
        off.push(p.off[i - 1] * a);
    }
    if e < p.off.len() {
        off.push(b.conj() * p.off[e]);
        off.extend_from_slice(&p.off[e + 1..]);
    }
    TridiagonalPencil { diag, off, mass }
}

fn interface_coupling(field: &CouplingField) -> Result<Coupling, RadialError> {
    field.uniform_coupling().ok_or(RadialError::NonUniformCoupling)
}

/// Negative eigenvalues of one angular mode on a grid with `n_grid` interior cells.
pub fn radial_fd_spectrum(geom: &RadialGeometry, field: &CouplingField, n_grid: usize) -> Result<RadialSpectrum, RadialError> {
    geom.validate()?;
    if n_grid < MIN_GRID {
        return Err(RadialError::GridTooSmall(n_grid));
    }
    let coupling = interface_coupling(field)?;
    let (pencil, h_in, h_out) = assemble_pencil(geom, &coupling, n_grid);
    let (d, e) = pencil.symmetric();
    let (negative_eigenvalues, zero_cutoff) = tridiagonal_negative_eigenvalues(&d, &e);
    Ok(RadialSpectrum {
        negative_eigenvalues,
        n_grid,
        h_inner: h_in,
        h_outer: h_out,
        unknowns: d.len(),
        zero_cutoff,
    })
}

/// Runs `n, 2n, 4n` and extrapolates each eigenvalue present on all three grids.
pub fn radial_fd_extrapolated(geom: &RadialGeometry, field: &CouplingField, n_grid: usize) -> Result<Convergence, RadialError> {
    let levels = [n_grid, 2 * n_grid, 4 * n_grid]
        .into_iter()
        .map(|n| {
            radial_fd_spectrum(geom, field, n).map(|s| ConvergenceLevel {
                label: format!("n_grid={n}"),
                h: s.h_inner,
                eigenvalues: s.negative_eigenvalues,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(convergence_from_levels(levels))
}

/// Merges per-mode negative eigenvalues, repeated by angular multiplicity.
pub fn assemble_mode_sum(
    geom: &RadialGeometry,
    field: &CouplingField,
    modes: &[usize],
    n_grid: usize,
) -> Result<SpectrumReport, RadialError> {
    let mut all = Vec::new();
    let mut notes = Vec::new();
    for &mode in modes {
        let g = geom.with_mode(mode);
        let spec = radial_fd_spectrum(&g, field, n_grid)?;
        notes.push(format!("mode {mode}: {} negative, multiplicity {}", spec.negative_eigenvalues.len(), g.multiplicity()));
        for &lam in &spec.negative_eigenvalues {
            all.extend(std::iter::repeat_n(lam, g.multiplicity()));
        }
    }
    let mut report = SpectrumReport::new("radial-fd", all).with_tolerance("n_grid", n_grid as f64);
    report.notes = notes;
    Ok(report)
}

/// Modes `0, 1, 2, …` up to (excluding) the first mode without negative
/// eigenvalues; the centrifugal term is increasing in the mode index, so no
/// later mode contributes.
pub fn bound_modes(geom: &RadialGeometry, field: &CouplingField, n_grid: usize, max_mode: usize) -> Result<Vec<usize>, RadialError> {
    let mut modes = Vec::new();
    for mode in 0..=max_mode {
        if radial_fd_spectrum(&geom.with_mode(mode), field, n_grid)?.negative_eigenvalues.is_empty() {
            break;
        }
        modes.push(mode);
    }
    Ok(modes)
}

/// [`assemble_mode_sum`] over [`bound_modes`].
pub fn assemble_all_modes(geom: &RadialGeometry, field: &CouplingField, n_grid: usize) -> Result<SpectrumReport, RadialError> {
    let modes = bound_modes(geom, field, n_grid, 256)?;
    assemble_mode_sum(geom, field, &modes, n_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn field(alpha: f64, beta: f64, gamma: Complex64) -> CouplingField {
        CouplingField::uniform(Coupling::new(alpha, beta, gamma)).unwrap()
    }

    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn geometry_validation() {
        assert!(RadialGeometry::new(4, 1.0, 2.0, OuterBc::Neumann, 0).is_err());
        assert!(RadialGeometry::new(2, 1.0, 1.0, OuterBc::Neumann, 0).is_err());
        let g = RadialGeometry::new(3, 1.0, 5.0, OuterBc::Neumann, 2).unwrap();
        assert_eq!(g.multiplicity(), 5);
        assert_eq!(g.with_mode(1).multiplicity(), 3);
        let c = RadialGeometry::new(2, 1.0, 5.0, OuterBc::Neumann, 3).unwrap();
        assert_eq!(c.multiplicity(), 2);
        assert!(matches!(
            radial_fd_spectrum(&g, &field(1.0, 0.0, zero()), 32),
            Err(RadialError::GridTooSmall(32))
        ));
    }

    #[test]
    fn sphere_counts_near_threshold() {
        assert_eq!(sphere_swave_matching(0.99, 1.0).unwrap().bound_state_count, 0);
        let m = sphere_swave_matching(1.01, 1.0).unwrap();
        assert_eq!(m.bound_state_count, 1);
        assert!(m.eigenvalue.unwrap() < 0.0);
    }

    #[test]
    fn sphere_root_satisfies_matching() {
        let m = sphere_swave_matching(2.0, 1.0).unwrap();
        let k = m.k.unwrap();
        assert!((2.0 * (1.0 - (-2.0 * k).exp()) - 2.0 * k).abs() < 1e-12);
        // Large α̃R: k → α̃/2.
        let big = sphere_swave_matching(40.0, 1.0).unwrap();
        assert_relative_eq!(big.k.unwrap(), 20.0, max_relative = 1e-12);
    }

    #[test]
    fn threshold_bisection() {
        let t = sphere_threshold(1.0, 0.9, 1.1, 1e-12).unwrap();
        assert!((t - 1.0).abs() < 1e-10);
        let t2 = sphere_threshold(2.0, 0.45, 0.55, 1e-12).unwrap();
        assert!((t2 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn zero_coupling_has_no_negative_eigenvalue() {
        for dim in [2, 3] {
            let g = RadialGeometry::new(dim, 1.0, 8.0, OuterBc::Neumann, 0).unwrap();
            let s = radial_fd_spectrum(&g, &field(0.0, 0.0, zero()), 64).unwrap();
            assert!(s.negative_eigenvalues.is_empty(), "dim {dim}: {:?}", s.negative_eigenvalues);
        }
    }

    #[test]
    fn delta_prime_circle_binds() {
        let g = RadialGeometry::new(2, 1.0, 20.0, OuterBc::Neumann, 0).unwrap();
        let s = radial_fd_spectrum(&g, &field(0.0, 1.0, zero()), 128).unwrap();
        assert!(!s.negative_eigenvalues.is_empty());
    }

    #[test]
    fn sphere_fd_converges_to_matching() {
        let g = RadialGeometry::new(3, 1.0, 30.0, OuterBc::Neumann, 0).unwrap();
        let conv = radial_fd_extrapolated(&g, &field(2.0, 0.0, zero()), 256).unwrap();
        let exact = sphere_swave_matching(2.0, 1.0).unwrap().eigenvalue.unwrap();
        assert!((conv.extrapolated[0] - exact).abs() <= 1e-5, "{} vs {exact}", conv.extrapolated[0]);
        let order = conv.observed_order.unwrap();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn sigma_zero_with_gamma_matches_gamma_free_delta() {
        // On Σ₀ with real γ the constraint rescales the outer trace; the spectrum
        // still follows from the form and must be finite and ordered.
        let g = RadialGeometry::new(2, 1.0, 10.0, OuterBc::Neumann, 0).unwrap();
        for gamma in [Complex64::new(2.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 1.0)] {
            let s = radial_fd_spectrum(&g, &field(1.0, 0.0, gamma), 64).unwrap();
            assert!(s.negative_eigenvalues.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn mode_sum_multiplicities() {
        let g = RadialGeometry::new(2, 1.0, 10.0, OuterBc::Neumann, 0).unwrap();
        let f = field(6.0, 0.0, zero());
        let only0 = assemble_mode_sum(&g, &f, &[0], 64).unwrap();
        let direct = radial_fd_spectrum(&g, &f, 64).unwrap();
        assert_eq!(only0.negative_eigenvalues, direct.negative_eigenvalues);
        let m1 = radial_fd_spectrum(&g.with_mode(1), &f, 64).unwrap();
        assert!(!m1.negative_eigenvalues.is_empty());
        let both = assemble_mode_sum(&g, &f, &[0, 1], 64).unwrap();
        let lam = m1.negative_eigenvalues[0];
        assert_eq!(both.negative_eigenvalues.iter().filter(|&&x| x == lam).count(), 2);
        let all = assemble_all_modes(&g, &f, 64).unwrap();
        assert!(all.bound_state_count >= both.bound_state_count);
    }
}
