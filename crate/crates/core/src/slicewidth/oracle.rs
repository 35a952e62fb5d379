use super::GroupedWidthProblem;
use crate::error::{Error, Result};

/// Brute-force slice width for up to three eigenvalue groups.
///
/// Works in the budget coordinates a_k. One group: a₁ = α² is forced. Two
/// groups: a₂ runs over `grid_points` evenly spaced values of its exact
/// feasible interval and a₁ follows from the shell equation. Three groups:
/// a₃ runs over its feasible interval on the same grid and, for each value,
/// the remaining two-group problem is maximized at its clamped stationary
/// point. Accuracy is O(1/grid_points).
pub fn slice_width_oracle(problem: &GroupedWidthProblem, grid_points: usize) -> Result<f64> {
    problem.validate()?;
    let m = problem.num_groups();
    if m > 3 {
        return Err(Error::OracleTooManyGroups(m));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
    }
    let g = &problem.gammas;
    let b: Vec<f64> = g.iter().zip(&problem.weights).map(|(g, w)| g.sqrt() * w).collect();
    let alpha_sq = problem.alpha * problem.alpha;

    let value = match m {
        1 => b[0] * problem.alpha,
        2 => {
            let upper = feasible_upper(alpha_sq, 1.0, g[1]);
            (0..grid_points)
                .map(|i| {
                    let a2 = upper * i as f64 / (grid_points - 1) as f64;
                    let a1 = (alpha_sq - g[1] * a2).max(0.0);
                    b[0] * a1.sqrt() + b[1] * a2.sqrt()
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }
        _ => {
            let upper = feasible_upper(alpha_sq, 1.0, g[2]);
            (0..grid_points)
                .map(|i| {
                    let a3 = upper * i as f64 / (grid_points - 1) as f64;
                    let shell = (alpha_sq - g[2] * a3).max(0.0);
                    let ball = 1.0 - a3;
                    b[2] * a3.sqrt() + best_pair(b[0], b[1], g[1], shell, ball)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }
    };
    Ok(value)
}

/// Largest a_j for the lowest group given shell mass `shell` and ball budget
/// `ball`, with the top group (γ = 1) absorbing the rest of the shell.
fn feasible_upper(shell: f64, ball: f64, gamma: f64) -> f64 {
    let by_shell = shell / gamma;
    let by_ball = (ball - shell) / (1.0 - gamma);
    by_shell.min(by_ball).max(0.0)
}

/// max b₁√a₁ + b₂√a₂ s.t. a₁ + γ₂a₂ = shell, a₁ + a₂ ≤ ball, a ≥ 0.
fn best_pair(b1: f64, b2: f64, gamma2: f64, shell: f64, ball: f64) -> f64 {
    let upper = feasible_upper(shell, ball, gamma2);
    let denom = gamma2 * (b2 * b2 + b1 * b1 * gamma2);
    let stationary = if denom > 0.0 { b2 * b2 * shell / denom } else { 0.0 };
    let a2 = stationary.clamp(0.0, upper);
    let a1 = (shell - gamma2 * a2).max(0.0);
    b1 * a1.sqrt() + b2 * a2.sqrt()
}
