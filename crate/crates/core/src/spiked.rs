//! Closed-form spiked-covariance curves.
//!
//! For Σ = I + λ·Σ_{j≤r} v_j v_jᵀ and aspect ratio δ = (p − r)/n, the error
//! ‖Σ̂ − Σ‖_op and the spike overlap of its leading singular vector are
//! governed by
//!
//! ```text
//! H_δ(η) = (√(1+λη) + √(δ(1−η)))² − (1+λη),   η ∈ [0, 1],
//! ```
//!
//! whose maximum Ψ_δ and maximizer η_δ stay frozen at 2√δ + δ and 0 until
//! λ crosses 1 + √δ. The companion H̄_δ (without the subtracted 1+λη) gives
//! the classical top-eigenvalue picture with its transition at λ = √δ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// H_δ(η) in the expanded form 2√(δ(1+λη)(1−η)) + δ(1−η).
pub fn h_delta(delta: f64, lambda: f64, eta: f64) -> f64 {
    let one_minus = 1.0 - eta;
    2.0 * (delta * (1.0 + lambda * eta) * one_minus).max(0.0).sqrt() + delta * one_minus
}

/// H̄_δ(η) = (√(1+λη) + √(δ(1−η)))².
pub fn h_bar_delta(delta: f64, lambda: f64, eta: f64) -> f64 {
    let s = (1.0 + lambda * eta).sqrt() + (delta * (1.0 - eta)).max(0.0).sqrt();
    s * s
}

/// 1 + √δ, where the error-matrix transition happens.
pub fn transition_point(delta: f64) -> f64 {
    1.0 + delta.sqrt()
}

/// ζ = (λ+1)√δ/√(δ+4λ) and the bracket (λ − 1) − ζ.
///
/// For λ > 1 the bracket is rewritten as
/// 4λ((λ−1)² − δ) / (√(δ+4λ)·((λ−1)√(δ+4λ) + (λ+1)√δ)) with
/// (λ−1)² − δ = (λ−1−√δ)(λ−1+√δ), so it vanishes exactly at λ = 1 + √δ
/// instead of through cancellation.
fn zeta_and_bracket(delta: f64, lambda: f64) -> (f64, f64) {
    let root = (delta + 4.0 * lambda).sqrt();
    let sd = delta.sqrt();
    let zeta = (lambda + 1.0) * sd / root;
    let bracket = if lambda > 1.0 {
        let lm1 = lambda - 1.0;
        let diff_sq = (lm1 - sd) * (lm1 + sd);
        4.0 * lambda * diff_sq / (root * (lm1 * root + (lambda + 1.0) * sd))
    } else {
        (lambda - 1.0) - zeta
    };
    (zeta, bracket)
}

fn check_raw(delta: f64, lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "raw curves need λ > 0 (got {lambda}); use the clamped variants"
        )));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("δ must be ≥ 0 (got {delta})")));
    }
    Ok(())
}

/// Ψ_δ(λ) = (λ+1)/√(δ+4λ) · [2√δ + δ(√δ + √(δ+4λ))/(2λ)], evaluated as
/// 2ζ + δ(1 − η_δ(λ)).
pub fn psi(delta: f64, lambda: f64) -> Result<f64> {
    check_raw(delta, lambda)?;
    let (zeta, bracket) = zeta_and_bracket(delta, lambda);
    let eta = bracket / (2.0 * lambda);
    Ok(2.0 * zeta + delta * (1.0 - eta))
}

/// η_δ(λ) = [(λ − 1) − (λ+1)√δ/√(δ+4λ)] / (2λ).
pub fn eta(delta: f64, lambda: f64) -> Result<f64> {
    check_raw(delta, lambda)?;
    let (_, bracket) = zeta_and_bracket(delta, lambda);
    Ok(bracket / (2.0 * lambda))
}

fn clamp_lambda(delta: f64, lambda: f64) -> f64 {
    lambda.max(transition_point(delta))
}

/// Ψ_δ(λ ∨ (1+√δ)) = max_η H_δ(η). Non-decreasing in λ.
pub fn psi_clamped(delta: f64, lambda: f64) -> f64 {
    let l = clamp_lambda(delta, lambda);
    if l == transition_point(delta) {
        return 2.0 * delta.sqrt() + delta;
    }
    psi(delta, l).expect("clamped λ ≥ 1 is in the raw domain")
}

/// η_δ(λ ∨ (1+√δ)) = argmax_η H_δ(η). Non-decreasing in λ, in [0, 1].
pub fn eta_clamped(delta: f64, lambda: f64) -> f64 {
    let l = clamp_lambda(delta, lambda);
    if l == transition_point(delta) {
        return 0.0;
    }
    eta(delta, l).expect("clamped λ ≥ 1 is in the raw domain")
}

/// max_η H̄_δ(η) = (1 + δ/(λ∨√δ))(1 + λ∨√δ).
pub fn bbp_max(delta: f64, lambda: f64) -> f64 {
    let l = lambda.max(delta.sqrt());
    if l == 0.0 {
        return 1.0;
    }
    (1.0 + delta / l) * (1.0 + l)
}

/// argmax_η H̄_δ(η) = (1 − δ/λ²)₊/(1 + δ/λ); zero when λ ≤ √δ.
pub fn bbp_argmax(delta: f64, lambda: f64) -> f64 {
    if lambda <= delta.sqrt() || lambda == 0.0 {
        return 0.0;
    }
    (1.0 - delta / (lambda * lambda)).max(0.0) / (1.0 + delta / lambda)
}

/// All curves at one (δ, λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryCurves {
    pub delta: f64,
    pub lambda: f64,
    pub psi_clamped: f64,
    pub eta_clamped: f64,
    pub transition_point: f64,
    pub bbp_max: f64,
    pub bbp_argmax: f64,
}

impl TheoryCurves {
    pub fn new(delta: f64, lambda: f64) -> Self {
        Self {
            delta,
            lambda,
            psi_clamped: psi_clamped(delta, lambda),
            eta_clamped: eta_clamped(delta, lambda),
            transition_point: transition_point(delta),
            bbp_max: bbp_max(delta, lambda),
            bbp_argmax: bbp_argmax(delta, lambda),
        }
    }

    pub const CSV_HEADER: &'static str = "delta,lambda,psi,eta,bbp_max,bbp_argmax,transition";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.delta,
            self.lambda,
            self.psi_clamped,
            self.eta_clamped,
            self.bbp_max,
            self.bbp_argmax,
            self.transition_point
        )
    }
}

/// Grid check that η_* maximizes H_δ and that the quadratic decay bound
/// H(η) − H(η_*) ≤ −(2λ√(λδ)/(λ+1))(η − η_*)² holds away from η_*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxReport {
    pub delta: f64,
    pub lambda: f64,
    pub eta_star: f64,
    pub grid_argmax: f64,
    pub grid_max: f64,
    pub h_at_eta_star: f64,
    pub curvature_violations: Vec<f64>,
}

impl ArgmaxReport {
    pub fn argmax_error(&self) -> f64 {
        (self.grid_argmax - self.eta_star).abs()
    }

    pub fn ok(&self, argmax_tol: f64) -> bool {
        self.curvature_violations.is_empty() && self.argmax_error() <= argmax_tol
    }
}

pub const ARGMAX_GRID_POINTS: usize = 100_000;

/// Checks η_clamped against a 10⁵-point η grid. Requires λ > 1 + √δ.
pub fn argmax_consistency(delta: f64, lambda: f64) -> Result<ArgmaxReport> {
    if !(lambda > transition_point(delta)) {
        return Err(Error::InvalidArgument(format!(
            "interior maximizer needs λ > 1 + √δ = {}",
            transition_point(delta)
        )));
    }
    let eta_star = eta_clamped(delta, lambda);
    let h_star = h_delta(delta, lambda, eta_star);
    let curvature = 2.0 * lambda * (lambda * delta).sqrt() / (lambda + 1.0);
    let mut grid_argmax = 0.0;
    let mut grid_max = f64::NEG_INFINITY;
    let mut curvature_violations = Vec::new();
    let last = ARGMAX_GRID_POINTS - 1;
    for i in 0..=last {
        let e = i as f64 / last as f64;
        let h = h_delta(delta, lambda, e);
        if h > grid_max {
            grid_max = h;
            grid_argmax = e;
        }
        let d = e - eta_star;
        // Relative slack of a few ulps for rounding in H.
        let slack = 8.0 * f64::EPSILON * h_star.abs();
        if d.abs() >= 1e-3 && h - h_star > -curvature * d * d + slack {
            curvature_violations.push(e);
        }
    }
    Ok(ArgmaxReport {
        delta,
        lambda,
        eta_star,
        grid_argmax,
        grid_max,
        h_at_eta_star: h_star,
        curvature_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent evaluation of the displayed Ψ formula.
    fn psi_displayed(delta: f64, lambda: f64) -> f64 {
        let root = (delta + 4.0 * lambda).sqrt();
        (lambda + 1.0) / root
            * (2.0 * delta.sqrt() + (delta.sqrt() + root) / (2.0 * lambda) * delta)
    }

    fn eta_displayed(delta: f64, lambda: f64) -> f64 {
        ((lambda - 1.0) - (lambda + 1.0) / (delta + 4.0 * lambda).sqrt() * delta.sqrt())
            / (2.0 * lambda)
    }

    #[test]
    fn h_endpoints() {
        for (d, l) in [(1.0, 3.0), (0.3, 0.2), (4.0, 10.0)] {
            assert_relative_eq!(h_delta(d, l, 0.0), 2.0 * f64::sqrt(d) + d, epsilon = 1e-14);
            assert_eq!(h_delta(d, l, 1.0), 0.0);
            // Both forms of H agree.
            for e in [0.1, 0.5, 0.9] {
                let direct = h_bar_delta(d, l, e) - (1.0 + l * e);
                assert_relative_eq!(direct, h_delta(d, l, e), epsilon = 1e-12);
            }
        }
        assert!((h_delta(1.0, 3.0, 0.148433) - 3.07040).abs() < 1e-4);
    }

    #[test]
    fn transition_values() {
        assert_eq!(psi(1.0, 2.0).unwrap(), 3.0);
        assert_eq!(eta(1.0, 2.0).unwrap(), 0.0);
        for d in [0.1, 0.5, 2.0, 4.0] {
            let t = transition_point(d);
            assert!(eta(d, t).unwrap().abs() < 1e-12);
            assert_relative_eq!(psi(d, t).unwrap(), 2.0 * d.sqrt() + d, epsilon = 1e-12);
        }
    }

    #[test]
    fn known_values_at_delta_one_lambda_three() {
        assert!((psi(1.0, 3.0).unwrap() - 3.070368).abs() < 1e-6);
        assert!((eta(1.0, 3.0).unwrap() - 0.148433).abs() < 1e-6);
    }

    #[test]
    fn stable_form_matches_displayed_formulas() {
        for d in [0.1, 0.5, 1.0, 2.0, 4.0] {
            for l in [0.5, 1.5, 3.0, 7.0, 100.0] {
                assert_relative_eq!(psi(d, l).unwrap(), psi_displayed(d, l), max_relative = 1e-12);
                assert_relative_eq!(
                    eta(d, l).unwrap(),
                    eta_displayed(d, l),
                    epsilon = 1e-12,
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn raw_rejects_zero_lambda() {
        assert!(psi(1.0, 0.0).is_err());
        assert!(eta(1.0, 0.0).is_err());
    }

    #[test]
    fn clamped_examples() {
        assert_eq!(psi_clamped(1.0, 0.5), 3.0);
        assert_eq!(eta_clamped(1.0, 0.5), 0.0);
        let expected = (4.0 - 6.0 / 21f64.sqrt()) / 10.0;
        assert_relative_eq!(eta_clamped(1.0, 5.0), expected, epsilon = 1e-14);
        assert!((eta_clamped(1.0, 5.0) - 0.269069).abs() < 1e-6);
        for l in [0.0, 0.5, 1.0, 3.0, 100.0] {
            assert_eq!(psi_clamped(0.0, l), 0.0);
        }
    }

    #[test]
    fn grid_max_equals_psi_clamped() {
        for d in [0.1, 0.5, 1.0, 2.0, 4.0] {
            for l in [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 20.0] {
                let grid_max = (0..=ARGMAX_GRID_POINTS)
                    .map(|i| h_delta(d, l, i as f64 / ARGMAX_GRID_POINTS as f64))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!((grid_max - psi_clamped(d, l)).abs() <= 1e-6, "δ={d} λ={l}");
                if l > transition_point(d) {
                    assert_relative_eq!(
                        h_delta(d, l, eta_clamped(d, l)),
                        psi_clamped(d, l),
                        max_relative = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn monotone_in_lambda() {
        for d in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for i in 0..1000 {
                let l = 20.0 * i as f64 / 999.0;
                let cur = (psi_clamped(d, l), eta_clamped(d, l));
                assert!(cur.0 >= prev.0 && cur.1 >= prev.1, "δ={d} λ={l}");
                assert!((0.0..=1.0).contains(&cur.1));
                assert!(cur.0 >= 2.0 * d.sqrt() + d - 1e-12);
                prev = cur;
            }
        }
    }

    #[test]
    fn strong_signal_asymptotics() {
        for d in [0.5, 1.0, 4.0] {
            let l = 1e6;
            assert!((psi(d, l).unwrap() / (d * l).sqrt() - 1.0).abs() < 1e-2);
            assert!((eta(d, l).unwrap() - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn bbp_examples() {
        assert_eq!(bbp_argmax(4.0, 2.0), 0.0);
        assert_relative_eq!(bbp_max(1.0, 3.0), 16.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(bbp_argmax(1.0, 3.0), 2.0 / 3.0, epsilon = 1e-14);
        assert_eq!(bbp_max(1.0, 0.0), 4.0);
    }

    #[test]
    fn bbp_grid_agrees() {
        for (d, l) in [(1.0, 3.0), (0.5, 0.3), (2.0, 5.0)] {
            let (mut arg, mut best) = (0.0, f64::NEG_INFINITY);
            for i in 0..=ARGMAX_GRID_POINTS {
                let e = i as f64 / ARGMAX_GRID_POINTS as f64;
                let v = h_bar_delta(d, l, e);
                if v > best {
                    best = v;
                    arg = e;
                }
            }
            assert!((best - bbp_max(d, l)).abs() < 1e-6);
            assert!((arg - bbp_argmax(d, l)).abs() < 1e-4);
        }
    }

    #[test]
    fn transition_contrast() {
        let d = 1.0;
        let t = transition_point(d);
        let below: Vec<f64> = (0..50).map(|i| t * i as f64 / 49.0).collect();
        assert!(below.iter().all(|&l| psi_clamped(d, l) == psi_clamped(d, 0.0)));
        assert!(below.iter().all(|&l| eta_clamped(d, l) == 0.0));
        assert!(bbp_max(d, 1.5) > bbp_max(d, 1.0));
        assert!(below.iter().filter(|&&l| l > d.sqrt()).all(|&l| bbp_argmax(d, l) > 0.0));
    }

    #[test]
    fn argmax_consistency_cases() {
        let r = argmax_consistency(1.0, 3.0).unwrap();
        assert!(r.ok(1e-4), "{r:?}");
        assert!((r.grid_argmax - 0.148433).abs() < 1e-4);
        let r = argmax_consistency(1.0, 2.0 + 1e-6).unwrap();
        assert!(r.curvature_violations.is_empty());
        assert!(r.eta_star >= 0.0 && r.eta_star < 1e-5);
        let r = argmax_consistency(4.0, 10.0).unwrap();
        assert!(r.ok(1e-4));
        assert!(argmax_consistency(1.0, 1.5).is_err());
    }
}
