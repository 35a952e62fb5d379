//! Gaussian widths over spherical slices of the standardized ellipsoid.
//!
//! For Σ̄ = Σ/‖Σ‖_op and a fixed vector h, the slice width is
//!
//! ```text
//! 𝒢(h; α) = sup { ⟨h, t⟩ : t ∈ Σ̄^{1/2}(B_p), ‖t‖ = α },   α ∈ [0, 1].
//! ```
//!
//! Writing t = Σ̄^{1/2}v, inside each eigengroup the objective only sees the
//! component of v along h's projection, so with a_k the squared norm of v's
//! k-th group component the problem becomes
//!
//! ```text
//! maximize Σ_k b_k √a_k   s.t.  a ≥ 0,  Σ_k a_k ≤ 1,  Σ_k γ_k a_k = α²,
//! ```
//!
//! with b_k = √γ_k · w_k and w_k = ‖projection of h onto group k‖. The
//! objective is concave and the feasible set a polytope; [`slice_width`]
//! solves it through its two-multiplier Lagrange dual and returns a
//! certified primal/dual pair.

mod alpha;
mod closed_form;
mod oracle;
mod solver;

pub use alpha::{phi_sup, phi_sup_grouped, sup_over_alpha, AlphaSup, AlphaSupOptions};
pub use closed_form::two_group_width_closed_form;
pub use oracle::slice_width_oracle;
pub use solver::{slice_width, WidthSolution};

pub(crate) use alpha::{phi_objective, AlphaGrid};
pub(crate) use solver::solve_width;

use serde::{Deserialize, Serialize};

use crate::covmodel::CovarianceSpec;
use crate::error::{Error, Result};

/// Slice-width instance after the rotation-invariant reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedWidthProblem {
    /// Distinct positive eigenvalues of Σ̄, strictly decreasing, γ₁ = 1.
    pub gammas: Vec<f64>,
    /// Norms of h's projections onto the matching eigengroups.
    pub weights: Vec<f64>,
    pub alpha: f64,
}

impl GroupedWidthProblem {
    pub fn new(gammas: Vec<f64>, weights: Vec<f64>, alpha: f64) -> Result<Self> {
        let problem = Self {
            gammas,
            weights,
            alpha,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() {
            return Err(Error::InvalidWidthProblem("no eigenvalue groups".into()));
        }
        if self.gammas.len() != self.weights.len() {
            return Err(Error::InvalidWidthProblem(format!(
                "{} groups but {} weights",
                self.gammas.len(),
                self.weights.len()
            )));
        }
        if self.gammas[0] != 1.0 {
            return Err(Error::InvalidWidthProblem(format!(
                "top eigenvalue must be exactly 1 (standardized), got {}",
                self.gammas[0]
            )));
        }
        if self.gammas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidWidthProblem(
                "eigenvalues must be strictly decreasing".into(),
            ));
        }
        if self.gammas.iter().any(|&g| !(g > 0.0)) {
            return Err(Error::InvalidWidthProblem(
                "zero eigenvalue groups must be dropped".into(),
            ));
        }
        if self.weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidWidthProblem(
                "weights must be finite and non-negative".into(),
            ));
        }
        check_alpha(self.alpha)
    }

    pub fn num_groups(&self) -> usize {
        self.gammas.len()
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            ..self.clone()
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(())
}

/// Projects h onto the eigengroups of a standardized spec. Groups with
/// eigenvalue zero are dropped: they add nothing to the objective or the
/// shell constraint and would only consume ball budget.
pub fn reduce_to_groups(spec: &CovarianceSpec, h: &[f64], alpha: f64) -> Result<GroupedWidthProblem> {
    check_alpha(alpha)?;
    if !spec.is_standardized() {
        return Err(Error::InvalidWidthProblem(format!(
            "spec must be standardized (top eigenvalue {})",
            spec.op_norm()
        )));
    }
    let norms = spec.group_norms(h)?;
    let (gammas, weights) = spec
        .eigenvalues()
        .iter()
        .zip(norms)
        .filter(|(&g, _)| g > 0.0)
        .map(|(&g, w)| (g, w))
        .unzip();
    Ok(GroupedWidthProblem {
        gammas,
        weights,
        alpha,
    })
}
