//! Result records shared by the solvers, the harness and the CLI.

use serde::{Deserialize, Serialize};

/// One rung of a refinement ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub label: String,
    /// Mesh width or grid spacing of this rung.
    pub h: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Convergence {
    pub levels: Vec<ConvergenceLevel>,
    /// Richardson estimates, one per eigenvalue present on every level.
    pub extrapolated: Vec<f64>,
    /// `|extrapolated − finest|`, a conservative error bar.
    pub error_bar: Vec<f64>,
    /// Observed order of the lowest eigenvalue, when three levels are available.
    pub observed_order: Option<f64>,
    /// Eigenvalue count agrees on the two finest rungs.
    pub count_stable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Holds,
    Violated,
    NotApplicable,
}

/// A criterion evaluated against a computed count or bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub criterion: String,
    pub status: CertificateStatus,
    /// Scalar the criterion is based on (an integral, a product αR, ...).
    pub quantity: Option<f64>,
    pub prediction: Option<String>,
    pub detail: String,
}

impl Certificate {
    pub fn not_applicable(criterion: &str, reason: impl Into<String>) -> Self {
        Self {
            criterion: criterion.to_string(),
            status: CertificateStatus::NotApplicable,
            quantity: None,
            prediction: None,
            detail: reason.into(),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.status == CertificateStatus::Violated
    }
}

/// Negative spectrum of one operator with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub method: String,
    /// Ascending, repeated according to multiplicity.
    pub negative_eigenvalues: Vec<f64>,
    pub bound_state_count: usize,
    pub convergence: Option<Convergence>,
    pub certificates: Vec<Certificate>,
    /// Named tolerances used by the run.
    pub tolerances: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl SpectrumReport {
    pub fn new(method: &str, mut negative_eigenvalues: Vec<f64>) -> Self {
        negative_eigenvalues.sort_by(f64::total_cmp);
        Self {
            method: method.to_string(),
            bound_state_count: negative_eigenvalues.len(),
            negative_eigenvalues,
            convergence: None,
            certificates: Vec::new(),
            tolerances: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn lowest(&self) -> Option<f64> {
        self.negative_eigenvalues.first().copied()
    }

    pub fn with_tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.push((name.to_string(), value));
        self
    }
}

/// Three-level Richardson estimate for errors `a h² + b h⁴`, levels `h, h/2, h/4`.
pub fn richardson3(coarse: f64, medium: f64, fine: f64) -> f64 {
    (64.0 * fine - 20.0 * medium + coarse) / 45.0
}

/// Two-level Richardson estimate for an `h²` error, levels `h, h/2`.
pub fn richardson2(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// `log₂` of successive difference ratios; `None` when the differences vanish.
pub fn observed_order(coarse: f64, medium: f64, fine: f64) -> Option<f64> {
    let d1 = coarse - medium;
    let d2 = medium - fine;
    (d1 != 0.0 && d2 != 0.0 && d1.signum() == d2.signum()).then(|| (d1 / d2).log2())
}

/// Builds a [`Convergence`] from levels ordered coarse to fine (ratio 2).
pub fn convergence_from_levels(levels: Vec<ConvergenceLevel>) -> Convergence {
    let n = levels.len();
    let common = levels.iter().map(|l| l.eigenvalues.len()).min().unwrap_or(0);
    let count_stable = n < 2 || levels[n - 1].eigenvalues.len() == levels[n - 2].eigenvalues.len();
    let mut extrapolated = Vec::with_capacity(common);
    let mut error_bar = Vec::with_capacity(common);
    for k in 0..common {
        let finest = levels[n - 1].eigenvalues[k];
        let est = match n {
            0 | 1 => finest,
            2 => richardson2(levels[0].eigenvalues[k], finest),
            _ => richardson3(levels[n - 3].eigenvalues[k], levels[n - 2].eigenvalues[k], finest),
        };
        extrapolated.push(est);
        error_bar.push((est - finest).abs());
    }
    let observed = (n >= 3 && common > 0)
        .then(|| observed_order(levels[n - 3].eigenvalues[0], levels[n - 2].eigenvalues[0], levels[n - 1].eigenvalues[0]))
        .flatten();
    Convergence {
        levels,
        extrapolated,
        error_bar,
        observed_order: observed,
        count_stable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_h2_and_h4() {
        let f = |h: f64| -1.0 + 0.3 * h * h - 2.0 * h.powi(4);
        let est = richardson3(f(0.1), f(0.05), f(0.025));
        assert!((est + 1.0).abs() < 1e-15);
        let g = |h: f64| 2.0 + 5.0 * h * h;
        assert!((richardson2(g(0.2), g(0.1)) - 2.0).abs() < 1e-14);
        let order = observed_order(g(0.2), g(0.1), g(0.05)).unwrap();
        assert!((order - 2.0).abs() < 1e-10);
    }

    #[test]
    fn report_sorts_eigenvalues() {
        let r = SpectrumReport::new("test", vec![-0.5, -2.0, -1.0]);
        assert_eq!(r.negative_eigenvalues, vec![-2.0, -1.0, -0.5]);
        assert_eq!(r.bound_state_count, 3);
        assert_eq!(r.lowest(), Some(-2.0));
    }
}
