//! Monte Carlo result envelope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean and spread of a replicated estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub std_dev: f64,
    pub reps: usize,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Reduces replicate values in index order, so any schedule that produces
    /// the same slice yields the same bits.
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let reps = values.len();
        if reps < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 replicates, got {reps}"
            )));
        }
        let mean = compensated_sum(values.iter().copied()) / reps as f64;
        let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
        let std_dev = (ss / (reps - 1) as f64).sqrt();
        Ok(Self {
            mean,
            std_error: std_dev / (reps as f64).sqrt(),
            std_dev,
            reps,
            seed,
        })
    }

    pub fn variance(&self) -> f64 {
        self.std_dev * self.std_dev
    }

    /// |mean − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_error
    }
}

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
