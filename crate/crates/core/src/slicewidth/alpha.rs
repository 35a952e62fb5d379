use serde::{Deserialize, Serialize};

use super::{reduce_to_groups, solve_width, GroupedWidthProblem};
use crate::covmodel::CovarianceSpec;
use crate::error::{Error, Result};
use crate::optim::golden_section_max;

/// Grid size and refinement tolerance for the supremum over α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSupOptions {
    pub grid_points: usize,
    pub tol: f64,
}

impl Default for AlphaSupOptions {
    fn default() -> Self {
        Self {
            grid_points: 129,
            tol: 1e-6,
        }
    }
}

/// Result of a supremum over α ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSup {
    pub value: f64,
    pub argmax_alpha: f64,
    /// Another grid-local maximum came within 1e-9 (relative) of the best one.
    pub tied_brackets: bool,
}

/// φ_h(α) = (α + x)² − α² with x = 𝒢(h;α)/√n, written as x(2α + x).
pub(crate) fn phi_objective(alpha: f64, x: f64) -> f64 {
    x * (2.0 * alpha + x)
}

/// sup_{α∈[0,1]} {(α + n^{-1/2}𝒢(h;α))² − α²} for a standardized spec.
pub fn phi_sup(spec: &CovarianceSpec, h: &[f64], n: usize) -> Result<AlphaSup> {
    let problem = reduce_to_groups(spec, h, 0.0)?;
    phi_sup_grouped(&problem, n, AlphaSupOptions::default())
}

/// [`phi_sup`] on already-reduced group data (the problem's own α is ignored).
pub fn phi_sup_grouped(
    problem: &GroupedWidthProblem,
    n: usize,
    options: AlphaSupOptions,
) -> Result<AlphaSup> {
    sup_over_alpha(problem, n, options, phi_objective)
}

/// Maximizes `objective(α, 𝒢(h;α)/√n)` over α ∈ [0, 1]: evaluate on a uniform
/// grid, then golden-section search on the bracket around the best grid point.
/// The returned value is never below the best grid value.
pub fn sup_over_alpha<F: Fn(f64, f64) -> f64>(
    problem: &GroupedWidthProblem,
    n: usize,
    options: AlphaSupOptions,
    objective: F,
) -> Result<AlphaSup> {
    Ok(AlphaGrid::evaluate(problem, n, options)?.refine(&objective))
}

/// Widths on the α grid, shared by every objective built on the same h.
pub(crate) struct AlphaGrid<'a> {
    problem: &'a GroupedWidthProblem,
    inv_sqrt_n: f64,
    options: AlphaSupOptions,
    alphas: Vec<f64>,
    scaled: Vec<f64>,
    mus: Vec<f64>,
}

impl<'a> AlphaGrid<'a> {
    pub(crate) fn evaluate(
        problem: &'a GroupedWidthProblem,
        n: usize,
        options: AlphaSupOptions,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if options.grid_points < 3 {
            return Err(Error::InvalidArgument("α grid needs at least 3 points".into()));
        }
        let inv_sqrt_n = 1.0 / (n as f64).sqrt();
        let count = options.grid_points;
        let mut alphas = Vec::with_capacity(count);
        let mut scaled = Vec::with_capacity(count);
        let mut mus = Vec::with_capacity(count);
        let mut hint = None;
        for i in 0..count {
            let alpha = i as f64 / (count - 1) as f64;
            let sol = solve_width(&problem.gammas, &problem.weights, alpha, hint)?;
            if sol.ball_active && sol.mu.is_finite() && alpha < 1.0 {
                hint = Some(sol.mu);
            }
            alphas.push(alpha);
            scaled.push(sol.value * inv_sqrt_n);
            mus.push(sol.mu);
        }
        Ok(Self {
            problem,
            inv_sqrt_n,
            options,
            alphas,
            scaled,
            mus,
        })
    }

    pub(crate) fn refine<F: Fn(f64, f64) -> f64>(&self, objective: &F) -> AlphaSup {
        let values: Vec<f64> = self
            .alphas
            .iter()
            .zip(&self.scaled)
            .map(|(&a, &x)| objective(a, x))
            .collect();
        let last = values.len() - 1;
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }

        let peak = values[best];
        let tie_floor = peak - 1e-9 * peak.abs().max(f64::MIN_POSITIVE);
        let tied_brackets = (0..=last).any(|i| {
            i.abs_diff(best) > 1
                && values[i] >= tie_floor
                && (i == 0 || values[i] >= values[i - 1])
                && (i == last || values[i] >= values[i + 1])
        });

        let lo = self.alphas[best.saturating_sub(1)];
        let hi = self.alphas[(best + 1).min(last)];
        let hint_mu = self.mus[best];
        let eval = |alpha: f64| -> f64 {
            let hint = (hint_mu > 0.0 && hint_mu.is_finite()).then_some(hint_mu);
            match solve_width(&self.problem.gammas, &self.problem.weights, alpha, hint) {
                Ok(sol) => objective(alpha, sol.value * self.inv_sqrt_n),
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let (alpha_ref, value_ref) = golden_section_max(eval, lo, hi, self.options.tol);
        if value_ref > peak {
            AlphaSup {
                value: value_ref,
                argmax_alpha: alpha_ref,
                tied_brackets,
            }
        } else {
            AlphaSup {
                value: peak,
                argmax_alpha: self.alphas[best],
                tied_brackets,
            }
        }
    }

    /// Objective evaluated at one extra α (solves one more width).
    pub(crate) fn evaluate_at<F: Fn(f64, f64) -> f64>(&self, alpha: f64, objective: &F) -> Result<f64> {
        let sol = solve_width(&self.problem.gammas, &self.problem.weights, alpha, None)?;
        Ok(objective(alpha, sol.value * self.inv_sqrt_n))
    }
}
