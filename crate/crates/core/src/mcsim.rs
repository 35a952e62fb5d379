//! Gaussian sample covariance simulation.
//!
//! Each replicate draws X_1..X_n ~ N(0, Σ), forms Σ̂ = n⁻¹ Σ X_i X_iᵀ and
//! records the extreme eigenvalues of Σ̂ − Σ, the leading eigenvector and its
//! energy on the spike subspace.

use std::io::Write;

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covmodel::{
    fast_symmetric_eig, fast_symmetric_eigenvalues, substream, symmetrize_upper, CovarianceSpec,
};
use crate::error::{Error, Result};
use crate::stats::MonteCarloEstimate;

/// Default relative tolerance under which λ₊ and λ₋ count as tied.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Which side of the spectrum attains ‖A‖_op.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignFlag {
    Plus,
    Minus,
    Tie,
}

impl SignFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            SignFlag::Plus => "plus",
            SignFlag::Minus => "minus",
            SignFlag::Tie => "tie",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    /// ‖Σ̂ − Σ‖_op = λ₊ ∨ λ₋.
    pub op_norm: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// ‖P_V v̂‖², only when a spike frame was supplied.
    pub proj_sq: Option<f64>,
    pub sign_flag: SignFlag,
    /// ‖Σ̂‖_op.
    pub top_eigval_sigma_hat: f64,
}

/// Extreme eigenpairs of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct ExtremeEigs {
    /// Largest eigenvalue.
    pub lambda_plus: f64,
    /// Minus the smallest eigenvalue.
    pub lambda_minus: f64,
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
}

impl ExtremeEigs {
    pub fn op_norm(&self) -> f64 {
        self.lambda_plus.max(self.lambda_minus)
    }

    /// Picks the eigenvector of the eigenvalue with the largest magnitude,
    /// preferring the λ₊ side when the two are within `tie_tol` (relative).
    pub fn leading(&self, tie_tol: f64) -> (&[f64], SignFlag) {
        let (lp, lm) = (self.lambda_plus, self.lambda_minus);
        let scale = lp.max(lm).max(1.0);
        if (lp - lm).abs() <= tie_tol * scale {
            (&self.v_plus, SignFlag::Tie)
        } else if lp > lm {
            (&self.v_plus, SignFlag::Plus)
        } else {
            (&self.v_minus, SignFlag::Minus)
        }
    }
}

/// Σ̂ = n⁻¹ Σ_i X_i X_iᵀ with X_i = Σ^{1/2} g_i. Rows are drawn in order, so
/// the matrix is a pure function of the stream state.
pub fn simulate_sample_cov<R: Rng + ?Sized>(spec: &CovarianceSpec, n: usize, rng: &mut R) -> Result<Mat<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let p = spec.p();
    let mut x = Mat::<f64>::zeros(n, p);
    let mut g = vec![0.0; p];
    for i in 0..n {
        for gj in g.iter_mut() {
            *gj = rng.sample(StandardNormal);
        }
        let row = spec.sqrt_apply(&g)?;
        for (j, v) in row.into_iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    let mut s = x.transpose() * &x;
    let inv_n = 1.0 / n as f64;
    for j in 0..p {
        for i in 0..=j {
            s[(i, j)] *= inv_n;
        }
    }
    symmetrize_upper(&mut s);
    Ok(s)
}

pub fn extreme_eigs(a: &Mat<f64>) -> Result<ExtremeEigs> {
    let eig = fast_symmetric_eig(a)?;
    let last = eig.eigenvalues.len() - 1;
    let column = |k: usize| (0..a.nrows()).map(|i| eig.eigenvectors[(i, k)]).collect::<Vec<_>>();
    Ok(ExtremeEigs {
        lambda_plus: eig.eigenvalues[0],
        lambda_minus: -eig.eigenvalues[last],
        v_plus: column(0),
        v_minus: column(last),
    })
}

pub fn leading_vector(a: &Mat<f64>, tie_tol: f64) -> Result<(Vec<f64>, SignFlag)> {
    let ext = extreme_eigs(a)?;
    let (v, flag) = ext.leading(tie_tol);
    Ok((v.to_vec(), flag))
}

/// Σ_j ⟨v, f_j⟩² over the columns of an orthonormal frame, clipped to [0, 1].
pub fn projection_sq(v: &[f64], frame: &Mat<f64>) -> Result<f64> {
    if frame.nrows() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: frame.nrows(),
            got: v.len(),
        });
    }
    let mut total = 0.0;
    for j in 0..frame.ncols() {
        let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * frame[(i, j)]).sum();
        total += dot * dot;
    }
    Ok(total.clamp(0.0, 1.0))
}

fn replicate(
    spec: &CovarianceSpec,
    sigma: &Mat<f64>,
    n: usize,
    seed: u64,
    index: u64,
    frame: Option<&Mat<f64>>,
) -> Result<ReplicationResult> {
    let mut rng = substream(seed, index);
    let sigma_hat = simulate_sample_cov(spec, n, &mut rng)?;
    let top = *fast_symmetric_eigenvalues(&sigma_hat)?
        .last()
        .expect("p ≥ 1");
    let diff = &sigma_hat - sigma;
    let ext = extreme_eigs(&diff)?;
    let (v, sign_flag) = ext.leading(DEFAULT_TIE_TOL);
    let proj_sq = frame.map(|f| projection_sq(v, f)).transpose()?;
    Ok(ReplicationResult {
        op_norm: ext.op_norm(),
        lambda_plus: ext.lambda_plus,
        lambda_minus: ext.lambda_minus,
        proj_sq,
        sign_flag,
        top_eigval_sigma_hat: top,
    })
}

/// Replicates plus index-order aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct ReplicationSummary {
    pub results: Vec<ReplicationResult>,
    pub op_norm: MonteCarloEstimate,
    pub lambda_plus: MonteCarloEstimate,
    pub lambda_minus: MonteCarloEstimate,
    pub proj_sq: Option<MonteCarloEstimate>,
    pub top_eigval_sigma_hat: MonteCarloEstimate,
}

impl ReplicationSummary {
    /// Fraction of replicates whose norm was attained on the λ₊ side (ties
    /// count as λ₊, matching the tie-break).
    pub fn plus_fraction(&self) -> f64 {
        let plus = self
            .results
            .iter()
            .filter(|r| r.sign_flag != SignFlag::Minus)
            .count();
        plus as f64 / self.results.len() as f64
    }
}

/// Runs `reps` replicates; replicate i uses substream (seed, i). When a spike
/// frame is given (p×r, orthonormal columns) proj_sq is recorded.
pub fn run_replications(
    spec: &CovarianceSpec,
    n: usize,
    reps: usize,
    seed: u64,
    frame: Option<&Mat<f64>>,
) -> Result<ReplicationSummary> {
    if reps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 replicates, got {reps}"
        )));
    }
    if let Some(f) = frame {
        if f.nrows() != spec.p() {
            return Err(Error::DimensionMismatch {
                expected: spec.p(),
                got: f.nrows(),
            });
        }
    }
    let sigma = spec.dense();
    let results: Vec<ReplicationResult> = (0..reps as u64)
        .into_par_iter()
        .map(|i| replicate(spec, &sigma, n, seed, i, frame))
        .collect::<Result<_>>()?;
    let field = |f: fn(&ReplicationResult) -> f64| {
        let values: Vec<f64> = results.iter().map(f).collect();
        MonteCarloEstimate::from_values(&values, seed)
    };
    let proj_sq = match frame {
        Some(_) => Some(field(|r| r.proj_sq.unwrap_or(f64::NAN))?),
        None => None,
    };
    Ok(ReplicationSummary {
        op_norm: field(|r| r.op_norm)?,
        lambda_plus: field(|r| r.lambda_plus)?,
        lambda_minus: field(|r| r.lambda_minus)?,
        top_eigval_sigma_hat: field(|r| r.top_eigval_sigma_hat)?,
        proj_sq,
        results,
    })
}

pub const REPLICATE_CSV_HEADER: &str = "rep,op_norm,lambda_plus,lambda_minus,proj_sq,sign_flag,top_eig";

/// One row per replicate; proj_sq is left empty when it was not recorded.
pub fn write_replicates_csv<W: Write>(results: &[ReplicationResult], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{REPLICATE_CSV_HEADER}")?;
    for (i, r) in results.iter().enumerate() {
        let proj = r.proj_sq.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{i},{},{},{},{proj},{},{}",
            r.op_norm,
            r.lambda_plus,
            r.lambda_minus,
            r.sign_flag.as_str(),
            r.top_eigval_sigma_hat
        )?;
    }
    Ok(())
}
