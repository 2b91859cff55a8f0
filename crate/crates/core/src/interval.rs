//! Exact negative spectrum of the one-dimensional model on `(−d, d)`.
//!
//! The operator acts as `−ψ''` on `(−d, 0) ∪ (0, d)` with Neumann conditions at
//! `±d` and the four-parameter point interaction at the origin:
//!
//! ```text
//! ψ'(0−) − ψ'(0+) = α/2 (ψ(0−) + ψ(0+)) + γ/2 (ψ'(0−) + ψ'(0+))
//! ψ(0−) − ψ(0+)   = −γ̄/2 (ψ(0−) + ψ(0+)) + β/2 (ψ'(0−) + ψ'(0+))
//! ```
//!
//! `λ = −k²` is an eigenvalue iff `g(k) = h(k) j(k)`. The scan works with the
//! rescaled function `F(k) = e^{−4kd}(g − hj)(k)`, which is overflow-free and
//! changes sign at every simple root.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coupling::{m_infinity, Coupling, CouplingError};
use crate::roots::{bisect, scan_sign_changes, RootBracket, RootError};

/// Tolerance for recognising `γ = 0 ∧ αβ = 4` from the inputs.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntervalError {
    #[error("half-length d must be positive and finite, got {0}")]
    InvalidHalfLength(f64),
    #[error("invalid scan options: {0}")]
    InvalidOptions(String),
    #[error("scan found {found} roots on {grid} cells but {expected} are predicted; refine the grid")]
    ScanTooCoarse { found: usize, expected: usize, grid: usize },
    #[error("bisection failed: {0}")]
    BracketFailure(#[from] RootError),
    #[error("k = {k} is not an eigenvalue (reduced matching defect {defect:e})")]
    NotAnEigenvalue { k: f64, defect: f64 },
    #[error("coupling: {0}")]
    Coupling(#[from] CouplingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalProblem {
    coupling: Coupling,
    d: f64,
}

impl IntervalProblem {
    pub fn new(coupling: Coupling, d: f64) -> Result<Self, IntervalError> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(IntervalError::InvalidHalfLength(d));
        }
        let finite = [coupling.alpha, coupling.beta, coupling.gamma.re, coupling.gamma.im]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(CouplingError::NotFinite {
                region: "interval".into(),
            }
            .into());
        }
        Ok(Self { coupling, d })
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn with_d(&self, d: f64) -> Result<Self, IntervalError> {
        Self::new(self.coupling, d)
    }

    /// `γ = 0` and `αβ = 4`: the zeros of `h` and `j` coincide.
    pub fn is_degenerate(&self) -> bool {
        let c = self.coupling;
        c.gamma.norm() <= DEGENERACY_TOL && (c.alpha * c.beta - 4.0).abs() <= DEGENERACY_TOL
    }
}

/// Raw factors of the spectral identity `g = h j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ghj {
    pub g: f64,
    pub h: f64,
    pub j: f64,
}

/// Unscaled `g, h, j`; overflows once `4kd` approaches the exponent range.
pub fn characteristic_ghj(k: f64, prob: &IntervalProblem) -> Ghj {
    let c = prob.coupling;
    let d = prob.d;
    let e2 = (2.0 * k * d).exp();
    let e4 = (4.0 * k * d).exp();
    Ghj {
        g: c.gamma.norm_sqr() * k * (1.0 - e4),
        h: h_factor(k, prob),
        j: e2 * (1.0 + 0.5 * c.beta * k) + e4 * (1.0 - 0.5 * c.beta * k),
    }
}

/// `h(k) = (−2α − 4k) e^{−2kd} − 2α + 4k`; bounded for all `k ≥ 0`.
pub fn h_factor(k: f64, prob: &IntervalProblem) -> f64 {
    let a = prob.coupling.alpha;
    (-2.0 * a - 4.0 * k) * (-2.0 * k * prob.d).exp() - 2.0 * a + 4.0 * k
}

/// Polynomial coefficients `(A, B, C)` of `F(k) = A e^{−4kd} + B e^{−2kd} + C`.
pub fn scaled_coefficients(k: f64, prob: &IntervalProblem) -> (f64, f64, f64) {
    let c = prob.coupling;
    let g2 = c.gamma.norm_sqr();
    let a = (c.alpha + 2.0 * k) * (2.0 + c.beta * k) + k * g2;
    let b = 4.0 * (c.alpha - c.beta * k * k);
    let cc = -(c.alpha - 2.0 * k) * (-2.0 + c.beta * k) - k * g2;
    (a, b, cc)
}

/// `F(k) = e^{−4kd} (g − h j)(k)`.
pub fn characteristic_scaled(k: f64, prob: &IntervalProblem) -> f64 {
    let (a, b, c) = scaled_coefficients(k, prob);
    let e2 = (-2.0 * k * prob.d).exp();
    a * e2 * e2 + b * e2 + c
}

/// Sum of the magnitudes of the monomials of `F(k)`, used for relative
/// residuals. Taken termwise because `C(k)` itself vanishes near the δ root.
pub fn characteristic_scale(k: f64, prob: &IntervalProblem) -> f64 {
    let c = prob.coupling;
    let (al, be, g2) = (c.alpha.abs(), c.beta.abs(), c.gamma.norm_sqr());
    let e2 = (-2.0 * k * prob.d).exp();
    // A and −C expand to 2α ± αβk ± 4k + 2βk² ± k|γ|².
    let ac = 2.0 * al + al * be * k + 4.0 * k + 2.0 * be * k * k + k * g2;
    let b = 4.0 * (al + be * k * k);
    ac * e2 * e2 + b * e2 + ac
}

/// The 4×4 matching system for `ψ₋ = A e^{−kx} + B e^{kx}`, `ψ₊ = C e^{−kx} + D e^{kx}`.
pub fn matching_matrix(k: f64, prob: &IntervalProblem) -> Matrix4<Complex64> {
    let c = prob.coupling;
    let one = Complex64::new(1.0, 0.0);
    let a2 = Complex64::new(c.alpha / 2.0, 0.0);
    let g = c.gamma / 2.0;
    let gb = c.gamma.conj() / 2.0;
    let bk = Complex64::new(c.beta * k / 2.0, 0.0);
    let kc = Complex64::new(k, 0.0);
    let ep = Complex64::new(k * (k * prob.d).exp(), 0.0);
    let em = Complex64::new(k * (-k * prob.d).exp(), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Matrix4::new(
        a2 + kc * (one - g),
        a2 - kc * (one - g),
        a2 - kc * (one + g),
        a2 + kc * (one + g),
        -bk - (one + gb),
        bk - (one + gb),
        -bk + (one - gb),
        bk + (one - gb),
        -ep,
        em,
        zero,
        zero,
        zero,
        zero,
        -em,
        ep,
    )
}

/// Determinant of the matching system, equal to `−½ e^{−2kd} k² (g − hj)(k)`.
pub fn determinant_oracle_complex(k: f64, prob: &IntervalProblem) -> Complex64 {
    matching_matrix(k, prob).determinant()
}

/// Real part of [`determinant_oracle_complex`]; the imaginary part is round-off.
pub fn determinant_oracle(k: f64, prob: &IntervalProblem) -> f64 {
    determinant_oracle_complex(k, prob).re
}

/// Number of negative eigenvalues predicted for `α, β ≥ 0`; `None` outside that regime.
pub fn expected_root_count(coupling: &Coupling) -> Option<usize> {
    let Coupling { alpha, beta, gamma } = *coupling;
    if !(alpha >= 0.0 && beta >= 0.0) {
        return None;
    }
    let degenerate = gamma.norm() <= DEGENERACY_TOL && (alpha * beta - 4.0).abs() <= DEGENERACY_TOL;
    Some(match (alpha > 0.0, beta > 0.0) {
        (false, false) => 0,
        (true, false) | (false, true) => 1,
        (true, true) if degenerate => 1,
        (true, true) => 2,
    })
}

/// Options for the sign-change scan of `F` on `(0, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Upper end of the scan; derived from the coupling when `None`.
    pub k_max: Option<f64>,
    pub grid: usize,
    /// Final bracket width in `k`.
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            k_max: None,
            grid: 2048,
            tol: 1e-13,
        }
    }
}

/// Default scan range: `2(√(−m_A) + 1)`, enlarged if needed to the a-priori bound
/// `k² ≤ θ² + θ/d` with `θ` the top eigenvalue of Θ_A.
pub fn default_k_max(prob: &IntervalProblem) -> f64 {
    let c = prob.coupling;
    let planar = m_infinity(c.alpha, c.beta, c.gamma)
        .map(|m| 2.0 * ((-m).sqrt() + 1.0))
        .unwrap_or(2.0);
    let theta = c.theta().eigenvalues().1.max(0.0);
    let apriori = (theta * theta + theta / prob.d).sqrt();
    planar.max(1.01 * apriori + 1e-9)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDiagnostics {
    pub k_max: f64,
    pub grid: usize,
    pub brackets: Vec<RootBracket>,
    /// `|F(k)| / scale(k)` at each root.
    pub residuals: Vec<f64>,
    pub expected_roots: Option<usize>,
    pub refinements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpectrum {
    /// Ascending `λ = −k²`.
    pub negative_eigenvalues: Vec<f64>,
    /// Roots `k`, in the same order as the eigenvalues (descending).
    pub ks: Vec<f64>,
    /// `min(0, λ₁)`.
    pub m_ad: f64,
    /// The `γ = 0 ∧ αβ = 4` coincidence was detected; its root is listed once.
    pub degenerate: bool,
    pub diagnostics: ScanDiagnostics,
}

impl IntervalSpectrum {
    pub fn count(&self) -> usize {
        self.negative_eigenvalues.len()
    }

    pub fn lowest(&self) -> Option<f64> {
        self.negative_eigenvalues.first().copied()
    }
}

/// Single scan + bisection pass at the given grid.
pub fn negative_spectrum(prob: &IntervalProblem, opts: &ScanOptions) -> Result<IntervalSpectrum, IntervalError> {
    if opts.grid < 2 {
        return Err(IntervalError::InvalidOptions(format!("grid must be >= 2, got {}", opts.grid)));
    }
    if !(opts.tol > 0.0) {
        return Err(IntervalError::InvalidOptions(format!("tol must be positive, got {}", opts.tol)));
    }
    let k_max = match opts.k_max {
        Some(k) if k > 0.0 && k.is_finite() => k,
        Some(k) => return Err(IntervalError::InvalidOptions(format!("k_max must be positive, got {k}"))),
        None => default_k_max(prob),
    };
    let degenerate = prob.is_degenerate();
    let alpha = prob.coupling.alpha;

    let roots = if degenerate {
        let f = |k: f64| h_factor(k, prob);
        refine_all(&f, scan_sign_changes(f, 0.0, k_max, opts.grid, Some(-4.0 * alpha)), opts.tol)?
    } else {
        let f = |k: f64| characteristic_scaled(k, prob);
        let at_zero = (alpha != 0.0).then_some(8.0 * alpha);
        refine_all(&f, scan_sign_changes(f, 0.0, k_max, opts.grid, at_zero), opts.tol)?
    };

    let mut ks: Vec<f64> = roots.iter().map(|b| 0.5 * (b.k_lo + b.k_hi)).collect();
    ks.retain(|&k| k > 0.0);
    ks.sort_by(|a, b| b.total_cmp(a));
    let residuals = ks
        .iter()
        .map(|&k| characteristic_scaled(k, prob).abs() / characteristic_scale(k, prob))
        .collect();
    let negative_eigenvalues: Vec<f64> = ks.iter().map(|k| -k * k).collect();
    let expected_roots = expected_root_count(&prob.coupling);
    if let Some(expected) = expected_roots {
        if ks.len() < expected {
            return Err(IntervalError::ScanTooCoarse {
                found: ks.len(),
                expected,
                grid: opts.grid,
            });
        }
    }
    let m_ad = negative_eigenvalues.first().copied().unwrap_or(0.0).min(0.0);
    Ok(IntervalSpectrum {
        negative_eigenvalues,
        ks,
        m_ad,
        degenerate,
        diagnostics: ScanDiagnostics {
            k_max,
            grid: opts.grid,
            brackets: roots,
            residuals,
            expected_roots,
            refinements: 0,
        },
    })
}

fn refine_all<F: Fn(f64) -> f64>(f: &F, brackets: Vec<RootBracket>, tol: f64) -> Result<Vec<RootBracket>, IntervalError> {
    brackets
        .into_iter()
        .map(|b| bisect(f, b, tol, 400).map_err(IntervalError::from))
        .collect()
}

/// Repeats [`negative_spectrum`] with a 4× finer grid while the scan is too coarse.
pub fn negative_spectrum_refined(
    prob: &IntervalProblem,
    opts: &ScanOptions,
    max_refinements: usize,
) -> Result<IntervalSpectrum, IntervalError> {
    let mut current = *opts;
    let mut refinements = 0;
    loop {
        match negative_spectrum(prob, &current) {
            Ok(mut spec) => {
                spec.diagnostics.refinements = refinements;
                return Ok(spec);
            }
            Err(IntervalError::ScanTooCoarse { .. }) if refinements < max_refinements => {
                current.grid *= 4;
                refinements += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// `m_{A,d} = min(0, λ₁(H_{A,d}))`.
pub fn m_interval(prob: &IntervalProblem) -> Result<f64, IntervalError> {
    Ok(negative_spectrum_refined(prob, &ScanOptions::default(), 6)?.m_ad)
}

/// `m_{A,d}` for the rescaled coupling `(α/n, γ; −γ̄, nβ)`.
pub fn m_interval_perturbed(prob: &IntervalProblem, n_tau: f64) -> Result<f64, IntervalError> {
    if !(n_tau > 0.0 && n_tau.is_finite()) {
        return Err(IntervalError::InvalidOptions(format!("n_tau must be positive, got {n_tau}")));
    }
    let c = prob.coupling;
    let scaled = IntervalProblem::new(Coupling::new(c.alpha / n_tau, n_tau * c.beta, c.gamma), prob.d)?;
    m_interval(&scaled)
}

/// Coefficients of a normalised eigenfunction at a root `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCoefficients {
    pub k: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl EigenCoefficients {
    pub fn eval(&self, x: f64) -> Complex64 {
        let (em, ep) = ((-self.k * x).exp(), (self.k * x).exp());
        if x < 0.0 {
            self.a * em + self.b * ep
        } else {
            self.c * em + self.d * ep
        }
    }

    /// `∫_{−d}^{d} |ψ|²`.
    pub fn norm_sqr(&self, half_length: f64) -> f64 {
        let k = self.k;
        let grow = (2.0 * k * half_length).exp_m1() / (2.0 * k);
        let decay = -(-2.0 * k * half_length).exp_m1() / (2.0 * k);
        let cross = 2.0 * half_length;
        self.a.norm_sqr() * grow
            + self.b.norm_sqr() * decay
            + cross * (self.a * self.b.conj()).re
            + self.c.norm_sqr() * decay
            + self.d.norm_sqr() * grow
            + cross * (self.c * self.d.conj()).re
    }

    /// Relative residuals of the two interface and two Neumann conditions.
    pub fn gpi_residuals(&self, prob: &IntervalProblem) -> [f64; 4] {
        let cpl = prob.coupling;
        let k = self.k;
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let psi_m = a + b;
        let psi_p = c + d;
        let dpsi_m = (b - a) * k;
        let dpsi_p = (d - c) * k;
        let g = cpl.gamma / 2.0;
        let gb = cpl.gamma.conj() / 2.0;
        let eq1_terms = [dpsi_m, -dpsi_p, -(psi_m + psi_p) * cpl.alpha / 2.0, -g * (dpsi_m + dpsi_p)];
        let eq2_terms = [psi_m, -psi_p, gb * (psi_m + psi_p), -(dpsi_m + dpsi_p) * cpl.beta / 2.0];
        let ekd = (k * prob.d).exp();
        let eq3_terms = [-a * k * ekd, b * k / ekd];
        let eq4_terms = [-c * k / ekd, d * k * ekd];
        let scale = [psi_m.norm(), psi_p.norm(), dpsi_m.norm(), dpsi_p.norm()]
            .into_iter()
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let rel = |terms: &[Complex64]| {
            let sum: Complex64 = terms.iter().sum();
            let mag: f64 = terms.iter().map(|t| t.norm()).sum();
            sum.norm() / mag.max(scale * f64::EPSILON)
        };
        [rel(&eq1_terms), rel(&eq2_terms), rel(&eq3_terms), rel(&eq4_terms)]
    }
}

/// Null vector of the matching system at a root, normalised in `L²(−d, d)`.
///
/// The Neumann rows fix `A = B e^{−2kd}` and `D = C e^{−2kd}`; the remaining 2×2
/// system for `(B, C)` is well scaled for every `kd`. Its ratio of singular
/// values, estimated as `|det| / ‖N‖²_F`, must be below `1e−8`.
pub fn eigenfunction_coefficients(k_root: f64, prob: &IntervalProblem) -> Result<EigenCoefficients, IntervalError> {
    if !(k_root > 0.0) {
        return Err(IntervalError::NotAnEigenvalue { k: k_root, defect: f64::INFINITY });
    }
    let m = matching_matrix(k_root, prob);
    let decay = Complex64::new((-2.0 * k_root * prob.d).exp(), 0.0);
    let reduced = [
        [m[(0, 0)] * decay + m[(0, 1)], m[(0, 2)] + m[(0, 3)] * decay],
        [m[(1, 0)] * decay + m[(1, 1)], m[(1, 2)] + m[(1, 3)] * decay],
    ];
    let row_norm = |r: &[Complex64; 2]| (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
    let n0 = row_norm(&reduced[0]);
    let n1 = row_norm(&reduced[1]);
    let det = reduced[0][0] * reduced[1][1] - reduced[0][1] * reduced[1][0];
    let entry_scale = (prob.coupling.alpha.abs() + k_root * (1.0 + prob.coupling.gamma.norm()))
        .max(1.0 + prob.coupling.beta.abs() * k_root);
    let frob = n0 * n0 + n1 * n1;
    let defect = if frob.sqrt() > 1e-10 * entry_scale { det.norm() / frob } else { 0.0 };
    if defect > 1e-8 {
        return Err(IntervalError::NotAnEigenvalue { k: k_root, defect });
    }
    let (b, c) = if n0.max(n1) <= 1e-10 * entry_scale {
        // Both reduced rows vanish: two-dimensional null space.
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else if n0 >= n1 {
        (-reduced[0][1], reduced[0][0])
    } else {
        (-reduced[1][1], reduced[1][0])
    };
    let mut coeffs = EigenCoefficients {
        k: k_root,
        a: b * decay,
        b,
        c,
        d: c * decay,
    };
    let pivot = if b.norm() >= c.norm() { b } else { c };
    let phase = pivot.conj() / pivot.norm();
    let scale = phase / coeffs.norm_sqr(prob.d).sqrt();
    coeffs.a *= scale;
    coeffs.b *= scale;
    coeffs.c *= scale;
    coeffs.d *= scale;
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn prob(alpha: f64, beta: f64, gamma: Complex64, d: f64) -> IntervalProblem {
        IntervalProblem::new(Coupling::new(alpha, beta, gamma), d).unwrap()
    }

    #[test]
    fn rejects_bad_half_length() {
        assert!(matches!(
            IntervalProblem::new(Coupling::delta(1.0), 0.0),
            Err(IntervalError::InvalidHalfLength(_))
        ));
        assert!(IntervalProblem::new(Coupling::delta(1.0), f64::NAN).is_err());
    }

    #[test]
    fn ghj_small_k_limits() {
        let p = prob(1.5, 0.7, c(0.3, -0.4), 2.0);
        let v = characteristic_ghj(1e-12, &p);
        assert!(v.g.abs() < 1e-10);
        assert_relative_eq!(v.h, -4.0 * 1.5, epsilon = 1e-9);
        assert_relative_eq!(v.j, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn ghj_delta_direct_substitution() {
        let p = prob(2.0, 0.0, c(0.0, 0.0), 5.0);
        let v = characteristic_ghj(1.0, &p);
        assert_relative_eq!(v.h, -8.0 * (-10.0f64).exp(), max_relative = 1e-6);
        assert_eq!(v.g, 0.0);
    }

    #[test]
    fn free_case_has_no_root() {
        // A = 4k, B = 0, C = −4k: F = 4k(e^{−4kd} − 1) < 0.
        let p = prob(0.0, 0.0, c(0.0, 0.0), 3.0);
        for k in [0.01, 0.3, 1.0, 7.0] {
            let expect = 4.0 * k * ((-4.0 * k * 3.0f64).exp() - 1.0);
            assert_relative_eq!(characteristic_scaled(k, &p), expect, max_relative = 1e-14);
        }
        let spec = negative_spectrum(&p, &ScanOptions::default()).unwrap();
        assert!(spec.negative_eigenvalues.is_empty());
        assert_eq!(spec.m_ad, 0.0);
        assert!(determinant_oracle(1.0, &prob(0.0, 0.0, c(0.0, 0.0), 1.0)).abs() > 1e-3);
    }

    #[test]
    fn planar_limit_of_c_coefficient() {
        let (alpha, beta, gamma) = (1.0, 1.0, c(0.0, 1.0));
        let det = alpha * beta + gamma.norm_sqr();
        let k0 = (4.0 + det + ((4.0 + det) * (4.0 + det) - 16.0 * alpha * beta).sqrt()) / (4.0 * beta);
        let (_, _, cc) = scaled_coefficients(k0, &prob(alpha, beta, gamma, 1.0));
        assert!(cc.abs() < 1e-12);
    }

    #[test]
    fn delta_case_single_root_near_one() {
        let p = prob(2.0, 0.0, c(0.0, 0.0), 10.0);
        let spec = negative_spectrum(&p, &ScanOptions::default()).unwrap();
        assert_eq!(spec.count(), 1);
        assert!((spec.ks[0] - 1.0).abs() <= 1e-8);
        assert!(spec.negative_eigenvalues[0] <= -1.0);
    }

    #[test]
    fn degenerate_case_collapses_to_h_root() {
        // The h root sits about α e^{−αd} above α/2, so d must be long for 1e−6.
        let p = prob(1.0, 4.0, c(0.0, 0.0), 20.0);
        assert!(p.is_degenerate());
        let m_a = m_infinity(1.0, 4.0, c(0.0, 0.0)).unwrap();
        assert_relative_eq!(m_a, -0.25, epsilon = 1e-15);
        let spec = negative_spectrum(&p, &ScanOptions::default()).unwrap();
        assert_eq!(spec.count(), 1);
        assert!(spec.degenerate);
        assert!(spec.m_ad <= m_a);
        assert!((spec.m_ad - m_a).abs() < 1e-6);
        // j vanishes at the same k.
        let k = spec.ks[0];
        let j_scaled = (1.0 + 2.0 * k) * (-2.0 * k * 20.0f64).exp() + (1.0 - 2.0 * k);
        assert!(j_scaled.abs() < 1e-12);
    }

    #[test]
    fn scan_too_coarse_and_refinement() {
        // Two roots with a small separation (αβ close to 4).
        let p = prob(1.0, 3.9, c(0.0, 0.0), 4.0);
        let coarse = ScanOptions { grid: 4, ..Default::default() };
        match negative_spectrum(&p, &coarse) {
            Err(IntervalError::ScanTooCoarse { expected: 2, .. }) => {}
            other => panic!("expected ScanTooCoarse, got {other:?}"),
        }
        let spec = negative_spectrum_refined(&p, &coarse, 8).unwrap();
        assert_eq!(spec.count(), 2);
        assert!(spec.diagnostics.refinements > 0);
    }

    #[test]
    fn rejects_bad_options() {
        let p = prob(1.0, 0.0, c(0.0, 0.0), 1.0);
        assert!(negative_spectrum(&p, &ScanOptions { grid: 1, ..Default::default() }).is_err());
        assert!(negative_spectrum(&p, &ScanOptions { tol: 0.0, ..Default::default() }).is_err());
        assert!(negative_spectrum(&p, &ScanOptions { k_max: Some(-1.0), ..Default::default() }).is_err());
    }

    #[test]
    fn m_interval_examples() {
        assert_eq!(m_interval(&prob(0.0, 0.0, c(0.0, 0.0), 2.5)).unwrap(), 0.0);
        let m = m_interval(&prob(2.0, 0.0, c(0.0, 0.0), 10.0)).unwrap();
        assert!(m <= -1.0 && m > -1.0 - 1e-6);
    }

    #[test]
    fn perturbed_examples() {
        let p = prob(1.0, 1.0, c(0.0, 1.0), 3.0);
        assert_eq!(m_interval_perturbed(&p, 1.0).unwrap(), m_interval(&p).unwrap());
        let base = m_interval(&p).unwrap();
        let gaps: Vec<f64> = [1.1, 1.01, 1.001]
            .iter()
            .map(|&n| (m_interval_perturbed(&p, n).unwrap() - base).abs())
            .collect();
        // Linear in n − 1: each step shrinks the gap about tenfold.
        assert!(gaps[1] < 0.2 * gaps[0] && gaps[2] < 0.2 * gaps[1]);
        let delta = prob(2.0, 0.0, c(0.0, 0.0), 10.0);
        assert_eq!(
            m_interval_perturbed(&delta, 2.0).unwrap(),
            m_interval(&prob(1.0, 0.0, c(0.0, 0.0), 10.0)).unwrap()
        );
        assert!(m_interval_perturbed(&delta, 0.0).is_err());
    }

    #[test]
    fn delta_eigenfunction_is_even() {
        let p = prob(2.0, 0.0, c(0.0, 0.0), 10.0);
        let spec = negative_spectrum(&p, &ScanOptions::default()).unwrap();
        let coeffs = eigenfunction_coefficients(spec.ks[0], &p).unwrap();
        assert!((coeffs.a - coeffs.d).norm() < 1e-10);
        assert!((coeffs.b - coeffs.c).norm() < 1e-10);
        assert_relative_eq!(coeffs.norm_sqr(10.0), 1.0, epsilon = 1e-12);
        for r in coeffs.gpi_residuals(&p) {
            assert!(r <= 1e-8, "residual {r}");
        }
    }

    #[test]
    fn eigenfunction_residuals_for_beta_root() {
        let p = prob(1.0, 1.0, c(0.5, 1.0), 3.0);
        let spec = negative_spectrum(&p, &ScanOptions::default()).unwrap();
        assert_eq!(spec.count(), 2);
        for &k in &spec.ks {
            let coeffs = eigenfunction_coefficients(k, &p).unwrap();
            for r in coeffs.gpi_residuals(&p) {
                assert!(r <= 1e-8, "residual {r} at k = {k}");
            }
            // Neumann endpoint residual against ‖(A, B)‖.
            let ekd = (k * 3.0f64).exp();
            let lhs = (-coeffs.a * k * ekd + coeffs.b * k / ekd).norm();
            assert!(lhs <= 1e-8 * (coeffs.a.norm_sqr() + coeffs.b.norm_sqr()).sqrt());
        }
    }

    #[test]
    fn non_root_is_rejected() {
        let p = prob(2.0, 0.0, c(0.0, 0.0), 10.0);
        assert!(matches!(
            eigenfunction_coefficients(0.5, &p),
            Err(IntervalError::NotAnEigenvalue { .. })
        ));
    }
}
