//! Monte Carlo estimation of E_*(Σ) and of the F± functionals, plus the
//! closed-form envelope bounds.
//!
//! ```text
//! E_*(Σ) = E sup_{α∈[0,1]} {(α + n^{-1/2}𝒢_Σ(h;α))² − α²},   h ~ N(0, I_p)
//! F₊(h)  = ‖Σ‖_op · sup_α {(α + n^{-1/2}𝒢)² − α²}
//! F₋(h)  = ‖Σ‖_op · sup_α {α² − (α − n^{-1/2}𝒢)₊²}
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covmodel::{substream, CovarianceSpec};
use crate::error::{Error, Result};
use crate::slicewidth::{
    phi_objective, phi_sup_grouped, reduce_to_groups, sup_over_alpha, AlphaGrid, AlphaSupOptions,
    GroupedWidthProblem,
};
use crate::stats::MonteCarloEstimate;

/// 2·E|h₁| = 2√(2/π).
pub const TWO_ABS_GAUSSIAN_MEAN: f64 = 1.595_769_121_605_730_7;

/// Grouped problem for h whose coordinates in Σ's eigenbasis are `z`.
///
/// N(0, I_p) is rotation invariant, so the Monte Carlo draws z directly in
/// eigen-coordinates; the result never depends on the stored basis.
fn grouped_from_eigen_coords(std_spec: &CovarianceSpec, z: &[f64]) -> GroupedWidthProblem {
    let mut gammas = Vec::with_capacity(std_spec.num_groups());
    let mut weights = Vec::with_capacity(std_spec.num_groups());
    let mut start = 0;
    for (&g, &m) in std_spec.eigenvalues().iter().zip(std_spec.multiplicities()) {
        if g > 0.0 {
            gammas.push(g);
            weights.push(z[start..start + m].iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        start += m;
    }
    GroupedWidthProblem {
        gammas,
        weights,
        alpha: 0.0,
    }
}

fn check_reps(reps: usize, min: usize) -> Result<()> {
    if reps < min {
        return Err(Error::InvalidArgument(format!(
            "need at least {min} replicates, got {reps}"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

/// Per-replicate values of sup_α φ_h(α) on the standardized spec, replicate
/// i drawing h from substream (seed, i).
pub fn estar_samples(spec: &CovarianceSpec, n: usize, reps: usize, seed: u64) -> Result<Vec<f64>> {
    check_n(n)?;
    let std_spec = spec.standardize();
    let p = std_spec.p();
    (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            let problem = grouped_from_eigen_coords(&std_spec, &z);
            phi_sup_grouped(&problem, n, AlphaSupOptions::default()).map(|s| s.value)
        })
        .collect()
}

/// Monte Carlo estimate of E_*(Σ).
pub fn estimate_estar(spec: &CovarianceSpec, n: usize, reps: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check_reps(reps, 2)?;
    let values = estar_samples(spec, n, reps, seed)?;
    MonteCarloEstimate::from_values(&values, seed)
}

/// Monte Carlo estimate of E F₊(h) = ‖Σ‖_op · E_*(Σ).
pub fn estimate_f_plus(spec: &CovarianceSpec, n: usize, reps: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check_reps(reps, 2)?;
    let scale = spec.op_norm();
    let values: Vec<f64> = estar_samples(spec, n, reps, seed)?
        .into_iter()
        .map(|v| scale * v)
        .collect();
    MonteCarloEstimate::from_values(&values, seed)
}

fn f_minus_objective(alpha: f64, x: f64) -> f64 {
    if x <= alpha {
        x * (2.0 * alpha - x)
    } else {
        alpha * alpha
    }
}

fn grouped_for_h(spec: &CovarianceSpec, h: &[f64]) -> Result<(GroupedWidthProblem, f64)> {
    let std_spec = spec.standardize();
    Ok((reduce_to_groups(&std_spec, h, 0.0)?, spec.op_norm()))
}

/// F₊(h), with h in the original coordinates.
pub fn f_plus(spec: &CovarianceSpec, h: &[f64], n: usize) -> Result<f64> {
    check_n(n)?;
    let (problem, scale) = grouped_for_h(spec, h)?;
    Ok(scale * phi_sup_grouped(&problem, n, AlphaSupOptions::default())?.value)
}

/// F₋(h), with h in the original coordinates.
pub fn f_minus(spec: &CovarianceSpec, h: &[f64], n: usize) -> Result<f64> {
    check_n(n)?;
    let (problem, scale) = grouped_for_h(spec, h)?;
    Ok(scale * sup_over_alpha(&problem, n, AlphaSupOptions::default(), f_minus_objective)?.value)
}

/// (F₊(h), F₋(h)) from one shared set of width evaluations.
///
/// Pointwise in α the F₋ objective never exceeds the F₊ one, and F₊ is also
/// evaluated at F₋'s maximizer, so the returned pair satisfies F₋ ≤ F₊ in
/// floating point, not only in exact arithmetic.
pub fn f_pair(spec: &CovarianceSpec, h: &[f64], n: usize) -> Result<(f64, f64)> {
    check_n(n)?;
    let (problem, scale) = grouped_for_h(spec, h)?;
    let grid = AlphaGrid::evaluate(&problem, n, AlphaSupOptions::default())?;
    let plus = grid.refine(&phi_objective);
    let minus = grid.refine(&f_minus_objective);
    let plus_at_minus = grid.evaluate_at(minus.argmax_alpha, &phi_objective)?;
    Ok((scale * plus.value.max(plus_at_minus), scale * minus.value))
}

/// 2√(r(Σ)/n) + r(Σ)/n.
pub fn kl_upper_bound(spec: &CovarianceSpec, n: usize) -> f64 {
    let ratio = spec.effective_rank() / n as f64;
    2.0 * ratio.sqrt() + ratio
}

/// 2√(2/π)/√n, the explicit floor 2·E|h₁|/√n.
pub fn kl_lower_floor(n: usize) -> f64 {
    TWO_ABS_GAUSSIAN_MEAN / (n as f64).sqrt()
}

/// √(x/r(Σ)) + x/√(r(Σ)·(n ∨ r(Σ))), the relative fluctuation scale with
/// the universal constant set to 1.
pub fn relative_error_budget(spec: &CovarianceSpec, n: usize, x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!("x must be ≥ 1, got {x}")));
    }
    let r = spec.effective_rank();
    Ok((x / r).sqrt() + x / (r * (n as f64).max(r)).sqrt())
}

/// Slack constant applied to the Var(F±) bound.
pub const VARIANCE_SLACK: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceCheck {
    /// Sample variance of F₊ across replicates.
    pub variance: f64,
    /// VARIANCE_SLACK · ‖Σ‖²/n · (1 ∨ r(Σ)/n).
    pub bound: f64,
    pub f_plus: MonteCarloEstimate,
}

impl VarianceCheck {
    pub fn holds(&self) -> bool {
        self.variance <= self.bound
    }
}

pub fn variance_bound(spec: &CovarianceSpec, n: usize) -> f64 {
    let nf = n as f64;
    let op = spec.op_norm();
    VARIANCE_SLACK * op * op / nf * (spec.effective_rank() / nf).max(1.0)
}

pub fn variance_check(spec: &CovarianceSpec, n: usize, reps: usize, seed: u64) -> Result<VarianceCheck> {
    check_reps(reps, 100)?;
    let f_plus = estimate_f_plus(spec, n, reps, seed)?;
    Ok(VarianceCheck {
        variance: f_plus.variance(),
        bound: variance_bound(spec, n),
        f_plus,
    })
}
