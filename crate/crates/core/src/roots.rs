//! Sign-change scanning and bisection for scalar characteristic functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("bracket [{lo}, {hi}] has no sign change")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("bisection stalled after {iterations} iterations at width {width}")]
    Stalled { iterations: usize, width: f64 },
}

/// An interval `[k_lo, k_hi]` across which the function changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootBracket {
    pub k_lo: f64,
    pub k_hi: f64,
}

impl RootBracket {
    pub fn width(&self) -> f64 {
        self.k_hi - self.k_lo
    }
}

/// Uniform scan of `f` on `(lo, hi]` with `grid` cells.
///
/// When `value_at_lo` is given it is used as the function value at `lo`
/// itself; otherwise the scan starts at the first interior grid point.
/// Exact zeros on grid points are reported as degenerate brackets.
pub fn scan_sign_changes<F>(f: F, lo: f64, hi: f64, grid: usize, value_at_lo: Option<f64>) -> Vec<RootBracket>
where
    F: Fn(f64) -> f64,
{
    let step = (hi - lo) / grid as f64;
    let mut brackets = Vec::new();
    let (mut prev_k, mut prev_f, start) = match value_at_lo {
        Some(v) => (lo, v, 1),
        None => (lo + step, f(lo + step), 2),
    };
    if prev_f == 0.0 && value_at_lo.is_none() {
        brackets.push(RootBracket { k_lo: prev_k, k_hi: prev_k });
    }
    for i in start..=grid {
        let k = if i == grid { hi } else { lo + step * i as f64 };
        let fk = f(k);
        if fk == 0.0 {
            brackets.push(RootBracket { k_lo: k, k_hi: k });
        } else if prev_f != 0.0 && prev_f.signum() != fk.signum() {
            brackets.push(RootBracket { k_lo: prev_k, k_hi: k });
        }
        prev_k = k;
        prev_f = fk;
    }
    brackets
}

/// Bisection on a sign-change bracket until the width is at most `tol`.
pub fn bisect<F>(f: F, bracket: RootBracket, tol: f64, max_iter: usize) -> Result<RootBracket, RootError>
where
    F: Fn(f64) -> f64,
{
    let RootBracket { mut k_lo, mut k_hi } = bracket;
    if k_lo == k_hi {
        return Ok(bracket);
    }
    let mut f_lo = f(k_lo);
    let f_hi = f(k_hi);
    if f_lo == 0.0 {
        return Ok(RootBracket { k_lo, k_hi: k_lo });
    }
    if f_hi == 0.0 {
        return Ok(RootBracket { k_lo: k_hi, k_hi });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { lo: k_lo, hi: k_hi });
    }
    for _ in 0..max_iter {
        if k_hi - k_lo <= tol {
            return Ok(RootBracket { k_lo, k_hi });
        }
        let mid = 0.5 * (k_lo + k_hi);
        if mid <= k_lo || mid >= k_hi {
            // Adjacent floats: the bracket cannot shrink further.
            return Ok(RootBracket { k_lo, k_hi });
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(RootBracket { k_lo: mid, k_hi: mid });
        }
        if f_mid.signum() == f_lo.signum() {
            k_lo = mid;
            f_lo = f_mid;
        } else {
            k_hi = mid;
        }
    }
    Err(RootError::Stalled {
        iterations: max_iter,
        width: k_hi - k_lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_all_roots_of_a_cubic() {
        let f = |x: f64| (x - 0.5) * (x - 1.25) * (x - 2.0);
        let brackets = scan_sign_changes(f, 0.0, 3.0, 97, Some(f(0.0)));
        assert_eq!(brackets.len(), 3);
        let roots: Vec<f64> = brackets
            .iter()
            .map(|b| {
                let r = bisect(f, *b, 1e-14, 200).unwrap();
                0.5 * (r.k_lo + r.k_hi)
            })
            .collect();
        for (r, expect) in roots.iter().zip([0.5, 1.25, 2.0]) {
            assert!((r - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_grid_zero_is_reported_once() {
        let f = |x: f64| x - 1.0;
        let brackets = scan_sign_changes(f, 0.0, 2.0, 4, None);
        assert_eq!(brackets, vec![RootBracket { k_lo: 1.0, k_hi: 1.0 }]);
    }

    #[test]
    fn bisect_rejects_bracket_without_sign_change() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(
            bisect(f, RootBracket { k_lo: 0.0, k_hi: 1.0 }, 1e-12, 100),
            Err(RootError::NoSignChange { .. })
        ));
    }

    #[test]
    fn bisect_reports_stall() {
        let f = |x: f64| x - 0.3;
        assert!(matches!(
            bisect(f, RootBracket { k_lo: 0.0, k_hi: 1.0 }, 1e-15, 3),
            Err(RootError::Stalled { .. })
        ));
    }
}
