use serde::{Deserialize, Serialize};

use super::GroupedWidthProblem;
use crate::error::{Error, Result};
use crate::optim::safeguarded_newton;

const MAX_ROOT_ITERS: usize = 200;
const FEASIBILITY_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-8;

/// Optimal value of a slice-width problem with its dual certificate.
///
/// The dual is g(μ, ν) = Σ_k b_k²/(4(μ + νγ_k)) + μ + να² over μ ≥ 0 and
/// μ + νγ_k > 0; at the optimum the primal budgets are a_k = b_k²/(4(μ + νγ_k)²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthSolution {
    pub value: f64,
    /// Multiplier of the ball constraint Σa_k ≤ 1.
    pub mu: f64,
    /// Multiplier of the shell constraint Σγ_k a_k = α².
    pub nu: f64,
    /// Squared group coefficients a_k, one per group.
    pub budgets: Vec<f64>,
    pub dual_value: f64,
    pub duality_gap: f64,
    pub ball_active: bool,
}

/// Solves the slice-width problem and certifies the result.
pub fn slice_width(problem: &GroupedWidthProblem) -> Result<WidthSolution> {
    problem.validate()?;
    solve_width(&problem.gammas, &problem.weights, problem.alpha, None)
}

/// Dual data for one (γ, b, α) instance.
struct Dual<'a> {
    gammas: &'a [f64],
    b: Vec<f64>,
    alpha_sq: f64,
}

/// Inner solution for a fixed μ: s = μ + ν is the multiplier sum on the top
/// group, so every c_k = μ(1 − γ_k) + sγ_k stays positive for s > 0.
struct Inner {
    s: f64,
    ball: f64,
    d_ball: f64,
}

impl Dual<'_> {
    fn c(&self, k: usize, mu: f64, s: f64) -> f64 {
        let g = self.gammas[k];
        mu * (1.0 - g) + s * g
    }

    /// Σ_k γ_k b_k²/(4c_k²) − α² and its s-derivative.
    fn shell(&self, mu: f64, s: f64) -> (f64, f64) {
        let mut value = -self.alpha_sq;
        let mut deriv = 0.0;
        for (k, &bk) in self.b.iter().enumerate() {
            if bk == 0.0 {
                continue;
            }
            let g = self.gammas[k];
            let c = self.c(k, mu, s);
            let a = bk * bk / (4.0 * c * c);
            value += g * a;
            deriv -= 2.0 * g * g * a / c;
        }
        (value, deriv)
    }

    /// s at which Σγ_k b_k²/(4c_k²) = α² when μ = 0.
    fn s_at_zero_mu(&self) -> f64 {
        let total: f64 = self
            .b
            .iter()
            .zip(self.gammas)
            .map(|(bk, g)| bk * bk / g)
            .sum();
        total.sqrt() / (2.0 * self.alpha_sq.sqrt())
    }

    fn inner(&self, mu: f64) -> Inner {
        let s_hi = self.s_at_zero_mu();
        let s = if mu == 0.0 {
            s_hi
        } else if self.b[0] == 0.0 && self.shell(mu, 0.0).0 <= 0.0 {
            // Top group carries no weight; it only fills the remaining shell mass.
            0.0
        } else {
            safeguarded_newton(|s| self.shell(mu, s), 0.0, s_hi, 0.5 * s_hi, MAX_ROOT_ITERS).0
        };

        let mut ball = 0.0;
        let mut shell_mass = 0.0;
        let mut num = 0.0;
        let mut den = 0.0;
        let mut filler_curv = 0.0;
        for (k, &bk) in self.b.iter().enumerate() {
            if bk == 0.0 {
                continue;
            }
            let g = self.gammas[k];
            let c = self.c(k, mu, s);
            let a = bk * bk / (4.0 * c * c);
            ball += a;
            shell_mass += g * a;
            num += g * (1.0 - g) * a / c;
            den += g * g * a / c;
            filler_curv += (1.0 - g) * (1.0 - g) * a / c;
        }
        if s == 0.0 {
            let filler = (self.alpha_sq - shell_mass).max(0.0);
            Inner {
                s,
                ball: ball + filler,
                d_ball: -2.0 * filler_curv,
            }
        } else {
            let ds = -num / den;
            let mut d_ball = 0.0;
            for (k, &bk) in self.b.iter().enumerate() {
                if bk == 0.0 {
                    continue;
                }
                let g = self.gammas[k];
                let c = self.c(k, mu, s);
                let a = bk * bk / (4.0 * c * c);
                d_ball -= 2.0 * a / c * ((1.0 - g) + g * ds);
            }
            Inner { s, ball, d_ball }
        }
    }

    fn certify(&self, mu: f64, s: f64, ball_active: bool) -> Result<WidthSolution> {
        let m = self.b.len();
        let mut budgets = vec![0.0; m];
        let mut dual_value = mu * (1.0 - self.alpha_sq) + s * self.alpha_sq;
        for (k, &bk) in self.b.iter().enumerate() {
            if bk == 0.0 {
                continue;
            }
            let c = self.c(k, mu, s);
            budgets[k] = bk * bk / (4.0 * c * c);
            dual_value += bk * bk / (4.0 * c);
        }
        if self.b[0] == 0.0 {
            let shell_mass: f64 = budgets.iter().zip(self.gammas).map(|(a, g)| a * g).sum();
            budgets[0] = (self.alpha_sq - shell_mass).max(0.0);
        }
        let value: f64 = self.b.iter().zip(&budgets).map(|(bk, a)| bk * a.sqrt()).sum();
        let solution = WidthSolution {
            value,
            mu,
            nu: s - mu,
            duality_gap: dual_value - value,
            dual_value,
            budgets,
            ball_active,
        };
        check_certificate(&solution, self.gammas, self.alpha_sq)?;
        Ok(solution)
    }
}

fn check_certificate(sol: &WidthSolution, gammas: &[f64], alpha_sq: f64) -> Result<()> {
    let ball: f64 = sol.budgets.iter().sum();
    let shell: f64 = sol.budgets.iter().zip(gammas).map(|(a, g)| a * g).sum();
    if sol.budgets.iter().any(|&a| !(a >= 0.0)) {
        return Err(Error::DualNoConvergence("negative budget".into()));
    }
    if ball > 1.0 + FEASIBILITY_TOL {
        return Err(Error::DualNoConvergence(format!("ball constraint violated: {ball}")));
    }
    if (shell - alpha_sq).abs() > FEASIBILITY_TOL {
        return Err(Error::DualNoConvergence(format!(
            "shell constraint violated: {shell} vs {alpha_sq}"
        )));
    }
    if !(sol.duality_gap.abs() <= GAP_TOL * sol.value.max(1.0)) {
        return Err(Error::DualNoConvergence(format!(
            "duality gap {:.3e} at value {}",
            sol.duality_gap, sol.value
        )));
    }
    Ok(())
}

/// Width solver on raw group data. `mu_hint` warm-starts the ball multiplier
/// when a nearby α has just been solved.
pub(crate) fn solve_width(
    gammas: &[f64],
    weights: &[f64],
    alpha: f64,
    mu_hint: Option<f64>,
) -> Result<WidthSolution> {
    let m = gammas.len();
    let alpha_sq = alpha * alpha;
    let b: Vec<f64> = gammas.iter().zip(weights).map(|(g, w)| g.sqrt() * w).collect();

    if alpha == 0.0 {
        // Only t = 0 lies on the slice; a large ν drives the dual to 0.
        let spread: f64 = b.iter().zip(gammas).map(|(bk, g)| bk * bk / g).sum();
        let nu = 1e150 * spread.max(1.0);
        let dual_value: f64 = b.iter().zip(gammas).map(|(bk, g)| bk * bk / (4.0 * nu * g)).sum();
        return Ok(WidthSolution {
            value: 0.0,
            mu: 0.0,
            nu,
            budgets: vec![0.0; m],
            dual_value,
            duality_gap: dual_value,
            ball_active: false,
        });
    }

    if b.iter().all(|&x| x == 0.0) {
        let mut budgets = vec![0.0; m];
        budgets[0] = alpha_sq;
        return Ok(WidthSolution {
            value: 0.0,
            mu: 0.0,
            nu: 0.0,
            budgets,
            dual_value: 0.0,
            duality_gap: 0.0,
            ball_active: false,
        });
    }

    if alpha_sq >= 1.0 {
        // Unit shell: only the γ = 1 group reaches it, so a = e₁. The dual
        // infimum is approached as μ → ∞ with μ + ν = b₁/2.
        let tail: f64 = b
            .iter()
            .zip(gammas)
            .skip(1)
            .map(|(bk, g)| bk * bk / (1.0 - g))
            .sum();
        let mu = 1e12 * tail.max(1.0);
        let s = 0.5 * b[0];
        let mut dual_value = s;
        for (k, &bk) in b.iter().enumerate() {
            if bk == 0.0 {
                continue;
            }
            let g = gammas[k];
            dual_value += bk * bk / (4.0 * (mu * (1.0 - g) + s * g));
        }
        let mut budgets = vec![0.0; m];
        budgets[0] = 1.0;
        return Ok(WidthSolution {
            value: b[0],
            mu,
            nu: s - mu,
            budgets,
            dual_value,
            duality_gap: dual_value - b[0],
            ball_active: true,
        });
    }

    let dual = Dual {
        gammas,
        b,
        alpha_sq,
    };

    // Ball-inactive fast path: μ = 0 with ν in closed form.
    let at_zero = dual.inner(0.0);
    if at_zero.ball <= 1.0 {
        return dual.certify(0.0, at_zero.s, false);
    }

    // Ball active: Σa_k(μ) is decreasing in μ; bracket its crossing of 1.
    let scale: f64 = dual.b.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let mut lo = 0.0;
    let mut hi = mu_hint.filter(|h| *h > 0.0).unwrap_or(scale);
    loop {
        let st = dual.inner(hi);
        if st.ball < 1.0 {
            break;
        }
        lo = hi;
        hi *= 4.0;
        if !hi.is_finite() {
            return Err(Error::DualNoConvergence("could not bracket μ".into()));
        }
    }
    if let Some(h) = mu_hint {
        if h < hi && h > lo {
            if dual.inner(h).ball >= 1.0 {
                lo = h;
            } else {
                hi = h;
            }
        }
    }
    let start = mu_hint.unwrap_or(0.5 * (lo + hi));
    let (mu, converged) = safeguarded_newton(
        |mu| {
            let st = dual.inner(mu);
            (st.ball - 1.0, st.d_ball)
        },
        lo,
        hi,
        start,
        MAX_ROOT_ITERS,
    );
    let st = dual.inner(mu);
    match dual.certify(mu, st.s, true) {
        Ok(sol) => Ok(sol),
        Err(e) if !converged => Err(Error::DualNoConvergence(format!(
            "iteration cap reached ({e})"
        ))),
        Err(e) => Err(e),
    }
}
