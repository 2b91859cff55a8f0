//! Interaction data `(α, β, γ)`, the boundary coupling matrix Θ and the
//! closed-form planar bound `m_A`.
//!
//! A surface interaction is described region by region. On `Σ_β` regions the
//! coefficient `β` is nonzero and the interface traces are free; on `Σ₀`
//! regions `β` vanishes and the traces are tied together by
//! `(1 + γ̄/2) f_i = (1 − γ̄/2) f_e`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lower clamp applied to the pointwise form bound so that it is strictly negative.
pub const ETA_CEILING: f64 = -1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("region `{region}`: alpha must be real, got imaginary part {imag}")]
    NonRealAlpha { region: String, imag: f64 },
    #[error("region `{region}` is marked Σ_β but beta = 0")]
    BetaZeroOnSigmaBeta { region: String },
    #[error("region `{region}` is marked Σ₀ but beta = {beta}")]
    BetaNonzeroOnSigmaZero { region: String, beta: f64 },
    #[error("region `{region}`: coefficient is not finite")]
    NotFinite { region: String },
    #[error("coupling field has no regions")]
    Empty,
    #[error("region index {0} out of range")]
    UnknownRegion(usize),
    #[error("m_infinity requires alpha >= 0 and beta >= 0 (got alpha = {alpha}, beta = {beta})")]
    OutsideDomain { alpha: f64, beta: f64 },
    #[error("negative discriminant {0} in the planar bound")]
    NegativeDiscriminant(f64),
}

/// Which part of the surface a region belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfacePart {
    /// `β ≠ 0`; both traces are independent.
    SigmaBeta,
    /// `β = 0`; traces satisfy the Σ₀ constraint.
    SigmaZero,
}

/// Constant interaction coefficients on one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: Complex64,
}

impl Coupling {
    pub fn new(alpha: f64, beta: f64, gamma: Complex64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// δ-interaction of strength `alpha`.
    pub fn delta(alpha: f64) -> Self {
        Self::new(alpha, 0.0, Complex64::new(0.0, 0.0))
    }

    /// δ′-interaction of strength `beta`.
    pub fn delta_prime(beta: f64) -> Self {
        Self::new(0.0, beta, Complex64::new(0.0, 0.0))
    }

    pub fn part(&self) -> SurfacePart {
        if self.beta == 0.0 {
            SurfacePart::SigmaZero
        } else {
            SurfacePart::SigmaBeta
        }
    }

    /// `det 𝒜 = αβ + |γ|²` for `𝒜 = (α γ; −γ̄ β)`.
    pub fn det_a(&self) -> f64 {
        self.alpha * self.beta + self.gamma.norm_sqr()
    }

    /// Θ_A at a point carrying these coefficients.
    pub fn theta(&self) -> ThetaMatrix {
        let q = Complex64::new(self.alpha / 4.0, 0.0);
        if self.part() == SurfacePart::SigmaZero {
            return ThetaMatrix {
                entries: [[q, q], [q, q]],
            };
        }
        let one = Complex64::new(1.0, 0.0);
        let half = self.gamma / 2.0;
        let inv_beta = 1.0 / self.beta;
        let t11 = (one + half).norm_sqr() * inv_beta;
        let t22 = (one - half).norm_sqr() * inv_beta;
        let t12 = (half.conj() - one) * (one + half) * inv_beta;
        let t21 = (half - one) * (one + half.conj()) * inv_beta;
        ThetaMatrix {
            entries: [
                [Complex64::new(t11, 0.0) + q, t12 + q],
                [t21 + q, Complex64::new(t22, 0.0) + q],
            ],
        }
    }

    /// Coefficients `(c_i, c_e)` of the trace constraint `c_i f_i = c_e f_e` on Σ₀.
    pub fn trace_constraint(&self) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let half = self.gamma.conj() / 2.0;
        (one + half, one - half)
    }

    fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.gamma.re.is_finite() && self.gamma.im.is_finite()
    }
}

/// One named region of the surface with its coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub coupling: Coupling,
    pub part: SurfacePart,
}

/// Raw per-region input before validation; `alpha` may carry an imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRegion {
    pub name: String,
    pub alpha: Complex64,
    pub beta: f64,
    pub gamma: Complex64,
    pub part: SurfacePart,
}

impl RawRegion {
    pub fn new(name: &str, alpha: Complex64, beta: f64, gamma: Complex64, part: SurfacePart) -> Self {
        Self {
            name: name.to_string(),
            alpha,
            beta,
            gamma,
            part,
        }
    }
}

/// Validated, piecewise-constant interaction data on a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingField {
    regions: Vec<Region>,
}

impl CouplingField {
    /// Single region covering the whole surface; the part is inferred from `beta`.
    pub fn uniform(coupling: Coupling) -> Result<Self, CouplingError> {
        let raw = RawRegion::new(
            "sigma",
            Complex64::new(coupling.alpha, 0.0),
            coupling.beta,
            coupling.gamma,
            coupling.part(),
        );
        validate_coupling(&[raw])
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, index: usize) -> Result<&Region, CouplingError> {
        self.regions.get(index).ok_or(CouplingError::UnknownRegion(index))
    }

    /// The common coupling if every region carries the same coefficients.
    pub fn uniform_coupling(&self) -> Option<Coupling> {
        let first = self.regions.first()?.coupling;
        self.regions.iter().all(|r| r.coupling == first).then_some(first)
    }
}

pub fn validate_coupling(raw: &[RawRegion]) -> Result<CouplingField, CouplingError> {
    if raw.is_empty() {
        return Err(CouplingError::Empty);
    }
    let mut regions = Vec::with_capacity(raw.len());
    for r in raw {
        if r.alpha.im != 0.0 {
            return Err(CouplingError::NonRealAlpha {
                region: r.name.clone(),
                imag: r.alpha.im,
            });
        }
        let coupling = Coupling::new(r.alpha.re, r.beta, r.gamma);
        if !coupling.is_finite() {
            return Err(CouplingError::NotFinite { region: r.name.clone() });
        }
        match r.part {
            SurfacePart::SigmaBeta if r.beta == 0.0 => {
                return Err(CouplingError::BetaZeroOnSigmaBeta { region: r.name.clone() })
            }
            SurfacePart::SigmaZero if r.beta != 0.0 => {
                return Err(CouplingError::BetaNonzeroOnSigmaZero {
                    region: r.name.clone(),
                    beta: r.beta,
                })
            }
            _ => {}
        }
        regions.push(Region {
            name: r.name.clone(),
            coupling,
            part: r.part,
        });
    }
    Ok(CouplingField { regions })
}

/// The 2×2 Hermitian boundary coupling acting on `(f_i, f_e)` traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl ThetaMatrix {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let e = &self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }

    /// `⟨Θ v, v⟩` in C² (real for Hermitian Θ).
    pub fn quadratic_form(&self, v: [Complex64; 2]) -> Complex64 {
        let w = self.apply(v);
        w[0] * v[0].conj() + w[1] * v[1].conj()
    }

    /// Maximum deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let e = &self.entries;
        (e[0][1] - e[1][0].conj())
            .norm()
            .max(e[0][0].im.abs())
            .max(e[1][1].im.abs())
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.hermitian_defect() == 0.0 && self.entries.iter().flatten().all(|z| z.im == 0.0)
    }

    /// Eigenvalues `(λ_min, λ_max)` of the Hermitian matrix.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let b = self.entries[0][1].norm();
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        (mean - radius, mean + radius)
    }
}

pub fn theta_matrix(field: &CouplingField, region: usize) -> Result<ThetaMatrix, CouplingError> {
    Ok(field.region(region)?.coupling.theta())
}

/// Pointwise lower bound `−⟨Θ v, v⟩ ≥ η |v|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormBound {
    pub eta: f64,
}

impl FormBound {
    pub fn holds_for(&self, theta: &ThetaMatrix, v: [Complex64; 2]) -> bool {
        let lhs = -theta.quadratic_form(v).re;
        let norm2 = v[0].norm_sqr() + v[1].norm_sqr();
        // Relative slack of a few ulps for the rounding in ⟨Θv, v⟩.
        let scale = norm2 * (theta.eigenvalues().1.abs() + self.eta.abs() + 1.0);
        lhs >= self.eta * norm2 - 8.0 * f64::EPSILON * scale
    }
}

pub fn form_lower_bound(field: &CouplingField) -> FormBound {
    let top = field
        .regions()
        .iter()
        .map(|r| r.coupling.theta().eigenvalues().1)
        .fold(f64::NEG_INFINITY, f64::max);
    FormBound {
        eta: (-top).min(ETA_CEILING),
    }
}

/// Closed-form bottom of the planar spectrum, restricted to `α, β ≥ 0`.
pub fn m_infinity(alpha: f64, beta: f64, gamma: Complex64) -> Result<f64, CouplingError> {
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(CouplingError::OutsideDomain { alpha, beta });
    }
    m_infinity_unchecked(alpha, beta, gamma)
}

/// The same closed form without the sign restriction on `α, β`.
pub fn m_infinity_unchecked(alpha: f64, beta: f64, gamma: Complex64) -> Result<f64, CouplingError> {
    let g2 = gamma.norm_sqr();
    if beta == 0.0 {
        let denom = 4.0 + g2;
        return Ok(-4.0 * alpha * alpha / (denom * denom));
    }
    let s = 4.0 + alpha * beta + g2;
    let disc = s * s - 16.0 * alpha * beta;
    if disc < 0.0 {
        return Err(CouplingError::NegativeDiscriminant(disc));
    }
    let top = s + disc.sqrt();
    Ok(-top * top / (16.0 * beta * beta))
}

/// `k₀ = sqrt(−m_A)`, the planar decay rate.
pub fn planar_decay_rate(alpha: f64, beta: f64, gamma: Complex64) -> Result<f64, CouplingError> {
    Ok((-m_infinity(alpha, beta, gamma)?).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validate_delta_and_delta_prime() {
        let field = validate_coupling(&[RawRegion::new("s", c(1.0, 0.0), 0.0, c(0.0, 0.0), SurfacePart::SigmaZero)]).unwrap();
        assert_eq!(field.regions()[0].part, SurfacePart::SigmaZero);
        let field = validate_coupling(&[RawRegion::new("s", c(0.0, 0.0), 2.0, c(0.0, 0.0), SurfacePart::SigmaBeta)]).unwrap();
        assert_eq!(field.uniform_coupling().unwrap().beta, 2.0);
    }

    #[test]
    fn validate_rejects_inconsistent_partition() {
        let err = validate_coupling(&[RawRegion::new("s", c(1.0, 0.0), 0.0, c(0.0, 0.0), SurfacePart::SigmaBeta)]).unwrap_err();
        assert!(matches!(err, CouplingError::BetaZeroOnSigmaBeta { .. }));
        let err = validate_coupling(&[RawRegion::new("s", c(1.0, 0.0), 1.0, c(0.0, 0.0), SurfacePart::SigmaZero)]).unwrap_err();
        assert!(matches!(err, CouplingError::BetaNonzeroOnSigmaZero { .. }));
        let err = validate_coupling(&[RawRegion::new("s", c(1.0, 0.5), 1.0, c(0.0, 0.0), SurfacePart::SigmaBeta)]).unwrap_err();
        assert!(matches!(err, CouplingError::NonRealAlpha { .. }));
        assert_eq!(validate_coupling(&[]).unwrap_err(), CouplingError::Empty);
    }

    #[test]
    fn theta_delta_prime() {
        let t = Coupling::delta_prime(2.0).theta();
        assert_eq!(t.entries, [[c(0.5, 0.0), c(-0.5, 0.0)], [c(-0.5, 0.0), c(0.5, 0.0)]]);
        assert!(t.is_real_symmetric());
    }

    #[test]
    fn theta_sigma_zero_is_quarter_alpha_ones() {
        let t = Coupling::new(4.0, 0.0, c(3.0, -7.0)).theta();
        for z in t.entries.iter().flatten() {
            assert_eq!(*z, c(1.0, 0.0));
        }
        let field = CouplingField::uniform(Coupling::new(4.0, 0.0, c(1.0, 1.0))).unwrap();
        assert_eq!(theta_matrix(&field, 0).unwrap(), t);
        assert_eq!(theta_matrix(&field, 1).unwrap_err(), CouplingError::UnknownRegion(1));
    }

    #[test]
    fn theta_imaginary_gamma() {
        // (1/β)|c1 v_i − c2 v_e|² with c1 = 1 + γ̄/2, c2 = 1 − γ̄/2 gives
        // [[|c1|², −c̄1 c2], [−c1 c̄2, |c2|²]] / β; for γ = 2i: [[2, −2i], [2i, 2]].
        let t = Coupling::new(0.0, 1.0, c(0.0, 2.0)).theta();
        assert_relative_eq!(t.get(0, 0).re, 2.0, epsilon = 1e-15);
        assert_relative_eq!(t.get(1, 1).re, 2.0, epsilon = 1e-15);
        assert!((t.get(0, 1) - c(0.0, -2.0)).norm() < 1e-15);
        assert!((t.get(1, 0) - c(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(t.hermitian_defect(), 0.0);
        assert!(!t.is_real_symmetric());
    }

    #[test]
    fn form_bound_examples() {
        let field = CouplingField::uniform(Coupling::delta_prime(2.0)).unwrap();
        assert_relative_eq!(form_lower_bound(&field).eta, -1.0, epsilon = 1e-15);
        let field = CouplingField::uniform(Coupling::delta(4.0)).unwrap();
        assert_relative_eq!(form_lower_bound(&field).eta, -2.0, epsilon = 1e-15);
        // Θ ≤ 0 is clamped to a small negative number.
        let field = CouplingField::uniform(Coupling::delta(-1.0)).unwrap();
        assert_eq!(form_lower_bound(&field).eta, ETA_CEILING);
    }

    #[test]
    fn m_infinity_examples() {
        assert_eq!(m_infinity(2.0, 0.0, c(0.0, 0.0)).unwrap(), -1.0);
        assert_eq!(m_infinity(0.0, 2.0, c(0.0, 0.0)).unwrap(), -1.0);
        assert_relative_eq!(m_infinity(3.0, 0.0, c(0.0, 2.0)).unwrap(), -9.0 / 16.0, epsilon = 1e-15);
        // γ = 0, αβ = 4: vanishing discriminant, m_A = −α²/4.
        assert_relative_eq!(m_infinity(1.0, 4.0, c(0.0, 0.0)).unwrap(), -0.25, epsilon = 1e-15);
        assert!(matches!(
            m_infinity(-1.0, 0.0, c(0.0, 0.0)),
            Err(CouplingError::OutsideDomain { .. })
        ));
        // (4 + αβ + |γ|²)² − 16αβ ≥ (αβ − 4)² for every real α, β.
        for (a, b) in [(-1.0, -1.0), (5.0, -0.5), (-4.0, 10.0), (2.0, 2.0)] {
            assert!(m_infinity_unchecked(a, b, c(0.0, 0.0)).is_ok());
        }
    }

    #[test]
    fn m_infinity_diverges_as_beta_vanishes() {
        let a = 1.0;
        let g = c(0.0, 0.5);
        let mut prev = m_infinity(a, 1e-1, g).unwrap();
        for beta in [1e-2, 1e-3, 1e-4] {
            let m = m_infinity(a, beta, g).unwrap();
            assert!(m < prev);
            let leading = -(4.0 + g.norm_sqr()).powi(2) / (4.0 * beta * beta);
            assert_relative_eq!(m / leading, 1.0, epsilon = 10.0 * beta);
            prev = m;
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coupling() -> impl Strategy<Value = Coupling> {
            (-4.0..4.0f64, prop_oneof![Just(0.0), -4.0..4.0f64], -3.0..3.0f64, -3.0..3.0f64)
                .prop_map(|(a, b, re, im)| Coupling::new(a, b, Complex64::new(re, im)))
        }

        fn vector() -> impl Strategy<Value = [Complex64; 2]> {
            (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
                .prop_map(|(a, b, x, y)| [Complex64::new(a, b), Complex64::new(x, y)])
        }

        proptest! {
            #[test]
            fn theta_is_hermitian(cpl in coupling(), v in vector()) {
                let th = cpl.theta();
                let size = th.entries.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
                prop_assert!(th.hermitian_defect() <= 4.0 * f64::EPSILON * size);
                prop_assert!(th.quadratic_form(v).im.abs() <= 16.0 * f64::EPSILON * size);
            }

            #[test]
            fn form_bound_holds(cpl in coupling(), v in vector()) {
                if let Ok(field) = CouplingField::uniform(cpl) {
                    let bound = form_lower_bound(&field);
                    prop_assert!(bound.holds_for(&cpl.theta(), v));
                }
            }

            #[test]
            fn m_infinity_is_phase_invariant(a in 0.0..4.0f64, b in 0.01..4.0f64, r in 0.0..3.0f64, phi in -3.1..3.1f64) {
                let m0 = m_infinity(a, b, Complex64::new(r, 0.0)).unwrap();
                let m1 = m_infinity(a, b, Complex64::from_polar(r, phi)).unwrap();
                prop_assert!((m0 - m1).abs() <= 1e-12 * m0.abs().max(1.0));
            }
        }
    }
}
