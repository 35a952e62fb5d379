//! Covariance matrices in spectral form.
//!
//! A [`CovarianceSpec`] stores the distinct eigenvalues of Σ together with
//! their multiplicities and, optionally, an eigenbasis. Every width and
//! E_* computation downstream depends only on the spectrum and on the norms
//! of a vector's projections onto the eigengroups, so a dense p×p matrix is
//! only ever materialized by the simulator.

mod eig;
mod rng;

pub use eig::{fast_symmetric_eig, symmetric_eig, SymmetricEigenResult, JACOBI_MAX_SWEEPS};
pub(crate) use eig::fast_symmetric_eigenvalues;
pub use rng::{substream, RngStream};

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on max |QᵀQ − I| for a basis or spike frame to be accepted.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Relative tolerance (times λ₁) under which numeric eigenvalues are merged
/// into one group.
pub const GROUP_MERGE_TOL: f64 = 1e-9;

/// How the eigenvectors of Σ are laid out.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// Group k occupies a contiguous run of coordinates, in group order.
    Coordinate,
    /// Full p×p orthonormal matrix; columns grouped by eigenvalue in group order.
    Dense(Mat<f64>),
    /// Orthonormal p×k frame spanning the first eigengroup; the second (and
    /// last) group is its orthogonal complement. Used for spiked models, where
    /// completing the frame to a full basis would cost O(p³) for nothing.
    LeadingFrame(Mat<f64>),
}

/// Covariance Σ in spectral form.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSpec {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
    basis: Basis,
    p: usize,
}

impl CovarianceSpec {
    /// Builds a spec in the coordinate basis.
    pub fn new(eigenvalues: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidSpec("no eigenvalues".into()));
        }
        if eigenvalues.len() != multiplicities.len() {
            return Err(Error::InvalidSpec(format!(
                "{} eigenvalues but {} multiplicities",
                eigenvalues.len(),
                multiplicities.len()
            )));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("eigenvalues must be finite".into()));
        }
        if eigenvalues[0] <= 0.0 {
            return Err(Error::InvalidSpec("top eigenvalue must be positive".into()));
        }
        if let Some(w) = eigenvalues.windows(2).find(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSpec(format!(
                "eigenvalues must be strictly decreasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        if *eigenvalues.last().unwrap() < 0.0 {
            return Err(Error::InvalidSpec("eigenvalues must be non-negative".into()));
        }
        if multiplicities.iter().any(|&m| m == 0) {
            return Err(Error::InvalidSpec("multiplicities must be positive".into()));
        }
        let p = multiplicities.iter().sum();
        Ok(Self {
            eigenvalues,
            multiplicities,
            basis: Basis::Coordinate,
            p,
        })
    }

    pub fn identity(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        Self::new(vec![1.0], vec![p])
    }

    /// Groups a list of numeric eigenvalues (any order). Values within
    /// `GROUP_MERGE_TOL · λ₁` of the current group's leading value merge into it.
    pub fn from_spectrum(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpec("empty spectrum".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("eigenvalues must be finite".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let top = sorted[0];
        if top <= 0.0 {
            return Err(Error::InvalidSpec("top eigenvalue must be positive".into()));
        }
        let tol = GROUP_MERGE_TOL * top;
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<usize> = Vec::new();
        for v in sorted {
            match eigenvalues.last() {
                Some(&lead) if lead - v <= tol => *multiplicities.last_mut().unwrap() += 1,
                _ => {
                    eigenvalues.push(v);
                    multiplicities.push(1);
                }
            }
        }
        Self::new(eigenvalues, multiplicities)
    }

    /// Attaches a full orthonormal eigenbasis (columns grouped by eigenvalue).
    pub fn with_basis(mut self, basis: Mat<f64>) -> Result<Self> {
        if basis.nrows() != self.p || basis.ncols() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: basis.ncols().max(basis.nrows()),
            });
        }
        check_orthonormal(&basis)?;
        self.basis = Basis::Dense(basis);
        Ok(self)
    }

    /// Attaches an orthonormal frame for the first group of a two-group spec.
    pub fn with_leading_frame(mut self, frame: Mat<f64>) -> Result<Self> {
        if self.eigenvalues.len() > 2 {
            return Err(Error::InvalidSpec(
                "a leading frame only determines the basis for at most two groups".into(),
            ));
        }
        if frame.nrows() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: frame.nrows(),
            });
        }
        if frame.ncols() != self.multiplicities[0] {
            return Err(Error::DimensionMismatch {
                expected: self.multiplicities[0],
                got: frame.ncols(),
            });
        }
        check_orthonormal(&frame)?;
        self.basis = Basis::LeadingFrame(frame);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn num_groups(&self) -> usize {
        self.eigenvalues.len()
    }

    /// ‖Σ‖_op, the top eigenvalue.
    pub fn op_norm(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .map(|(&l, &m)| l * m as f64)
            .sum()
    }

    pub fn effective_rank(&self) -> f64 {
        effective_rank(self)
    }

    pub fn standardize(&self) -> Self {
        standardize(self)
    }

    pub fn is_standardized(&self) -> bool {
        self.eigenvalues[0] == 1.0
    }

    /// Coordinate ranges of each group in the coordinate basis.
    fn group_ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.multiplicities.iter().scan(0usize, |start, &m| {
            let r = *start..*start + m;
            *start += m;
            Some(r)
        })
    }

    /// Euclidean norms of the projections of `h` onto each eigengroup.
    pub fn group_norms(&self, h: &[f64]) -> Result<Vec<f64>> {
        self.check_len(h)?;
        let norms = match &self.basis {
            Basis::Coordinate => self.group_ranges().map(|r| norm(&h[r])).collect(),
            Basis::Dense(q) => {
                let coeffs = q_transpose_apply(q, h);
                self.group_ranges().map(|r| norm(&coeffs[r])).collect()
            }
            Basis::LeadingFrame(frame) => {
                let coeffs = q_transpose_apply(frame, h);
                let lead = norm(&coeffs);
                if self.eigenvalues.len() == 1 {
                    vec![lead]
                } else {
                    let proj = q_apply(frame, &coeffs);
                    let resid: Vec<f64> = h.iter().zip(&proj).map(|(a, b)| a - b).collect();
                    vec![lead, norm(&resid)]
                }
            }
        };
        Ok(norms)
    }

    /// Applies f(Σ) for a spectral function f given per group.
    fn apply_spectral(&self, x: &[f64], scale: &[f64]) -> Vec<f64> {
        match &self.basis {
            Basis::Coordinate => {
                let mut out = x.to_vec();
                for (r, &s) in self.group_ranges().zip(scale) {
                    out[r].iter_mut().for_each(|v| *v *= s);
                }
                out
            }
            Basis::Dense(q) => {
                let mut coeffs = q_transpose_apply(q, x);
                for (r, &s) in self.group_ranges().zip(scale) {
                    coeffs[r].iter_mut().for_each(|v| *v *= s);
                }
                q_apply(q, &coeffs)
            }
            Basis::LeadingFrame(frame) => {
                // s₂·x + (s₁ − s₂)·QQᵀx
                let s1 = scale[0];
                let s2 = scale.get(1).copied().unwrap_or(s1);
                let coeffs = q_transpose_apply(frame, x);
                let proj = q_apply(frame, &coeffs);
                x.iter()
                    .zip(&proj)
                    .map(|(&xi, &pi)| s2 * xi + (s1 - s2) * pi)
                    .collect()
            }
        }
    }

    /// Σ^{1/2} x.
    pub fn sqrt_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        sqrt_apply(self, x)
    }

    /// Σ x.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.apply_spectral(x, &self.eigenvalues))
    }

    /// Dense Σ. Only the simulator should need this.
    pub fn dense(&self) -> Mat<f64> {
        let p = self.p;
        match &self.basis {
            Basis::Coordinate => {
                let mut diag = Vec::with_capacity(p);
                for (&l, &m) in self.eigenvalues.iter().zip(&self.multiplicities) {
                    diag.extend(std::iter::repeat(l).take(m));
                }
                Mat::from_fn(p, p, |i, j| if i == j { diag[i] } else { 0.0 })
            }
            Basis::Dense(q) => {
                let mut scaled = q.clone();
                let mut col = 0;
                for (&l, &m) in self.eigenvalues.iter().zip(&self.multiplicities) {
                    for c in col..col + m {
                        for i in 0..p {
                            scaled[(i, c)] *= l;
                        }
                    }
                    col += m;
                }
                let mut s = &scaled * q.transpose();
                symmetrize_upper(&mut s);
                s
            }
            Basis::LeadingFrame(frame) => {
                let l1 = self.eigenvalues[0];
                let l2 = self.eigenvalues.get(1).copied().unwrap_or(l1);
                let mut s = frame * frame.transpose();
                for j in 0..p {
                    for i in 0..p {
                        s[(i, j)] *= l1 - l2;
                    }
                    s[(j, j)] += l2;
                }
                symmetrize_upper(&mut s);
                s
            }
        }
    }

    /// One draw of N(0, Σ).
    pub fn sample_gaussian<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        sample_gaussian(self, rng)
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// tr(Σ)/‖Σ‖_op, summed as Σ_k m_k·(λ_k/λ₁) so that it is bit-identical on Σ
/// and on its standardized form.
pub fn effective_rank(spec: &CovarianceSpec) -> f64 {
    let top = spec.op_norm();
    spec.eigenvalues
        .iter()
        .zip(&spec.multiplicities)
        .map(|(&l, &m)| m as f64 * (l / top))
        .sum()
}

/// Σ̄ = Σ/‖Σ‖_op; the top eigenvalue becomes exactly 1.
pub fn standardize(spec: &CovarianceSpec) -> CovarianceSpec {
    let top = spec.eigenvalues[0];
    let mut eigenvalues: Vec<f64> = spec.eigenvalues.iter().map(|&l| l / top).collect();
    eigenvalues[0] = 1.0;
    CovarianceSpec {
        eigenvalues,
        multiplicities: spec.multiplicities.clone(),
        basis: spec.basis.clone(),
        p: spec.p,
    }
}

/// Σ^{1/2} x, evaluated in the eigenbasis. For a leading-frame spec with
/// bottom eigenvalue 1 this is the rank-r update x + u·QQᵀx, u = √λ₁ − 1.
pub fn sqrt_apply(spec: &CovarianceSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.check_len(x)?;
    let roots: Vec<f64> = spec.eigenvalues.iter().map(|l| l.sqrt()).collect();
    Ok(spec.apply_spectral(x, &roots))
}

/// Σ^{1/2} g with g drawn coordinate-wise from the standard normal.
pub fn sample_gaussian<R: Rng + ?Sized>(spec: &CovarianceSpec, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = (0..spec.p).map(|_| rng.sample(StandardNormal)).collect();
    let roots: Vec<f64> = spec.eigenvalues.iter().map(|l| l.sqrt()).collect();
    spec.apply_spectral(&g, &roots)
}

/// Spiked model parameters: Σ = I + λ·Σ_{j≤r} v_j v_jᵀ observed with n samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikedParams {
    pub p: usize,
    pub n: usize,
    pub r: usize,
    pub lambda: f64,
}

impl SpikedParams {
    pub fn new(p: usize, n: usize, r: usize, lambda: f64) -> Result<Self> {
        let params = Self { p, n, r, lambda };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidSpiked("p must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidSpiked("n must be at least 1".into()));
        }
        if self.r == 0 || self.r > self.p {
            return Err(Error::InvalidSpiked(format!(
                "r = {} must lie in [1, p = {}]",
                self.r, self.p
            )));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidSpiked(format!(
                "lambda = {} must be finite and non-negative",
                self.lambda
            )));
        }
        Ok(())
    }

    /// δ = (p − r)/n.
    pub fn delta(&self) -> f64 {
        (self.p - self.r) as f64 / self.n as f64
    }
}

/// Builds I + λ·VVᵀ. Without a frame the spike occupies the first r coordinates.
pub fn build_spiked(params: &SpikedParams, frame: Option<&Mat<f64>>) -> Result<CovarianceSpec> {
    params.validate()?;
    let SpikedParams { p, r, lambda, .. } = *params;
    if let Some(f) = frame {
        if f.nrows() != p || f.ncols() != r {
            return Err(Error::DimensionMismatch {
                expected: p * r,
                got: f.nrows() * f.ncols(),
            });
        }
        check_orthonormal(f)?;
    }
    if lambda == 0.0 {
        return CovarianceSpec::identity(p);
    }
    let spec = if r == p {
        CovarianceSpec::new(vec![1.0 + lambda], vec![p])?
    } else {
        CovarianceSpec::new(vec![1.0 + lambda, 1.0], vec![r, p - r])?
    };
    match frame {
        Some(f) if r < p => spec.with_leading_frame(f.to_owned()),
        _ => Ok(spec),
    }
}

/// The first r coordinate vectors as a p×r frame.
pub fn coordinate_frame(p: usize, r: usize) -> Mat<f64> {
    Mat::from_fn(p, r, |i, j| if i == j { 1.0 } else { 0.0 })
}

/// max |QᵀQ − I| entrywise.
pub fn orthonormality_defect(q: &Mat<f64>) -> f64 {
    let gram = q.transpose() * q;
    let k = gram.nrows();
    let mut worst = 0.0f64;
    for j in 0..k {
        for i in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

fn check_orthonormal(q: &Mat<f64>) -> Result<()> {
    let defect = orthonormality_defect(q);
    if defect.is_nan() || defect > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    Ok(())
}

/// Copies the upper triangle onto the lower one.
pub(crate) fn symmetrize_upper(a: &mut Mat<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in j + 1..n {
            a[(i, j)] = a[(j, i)];
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn q_transpose_apply(q: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    (0..q.ncols())
        .map(|j| (0..q.nrows()).map(|i| q[(i, j)] * x[i]).sum())
        .collect()
}

fn q_apply(q: &Mat<f64>, c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; q.nrows()];
    for (j, &cj) in c.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += q[(i, j)] * cj;
        }
    }
    out
}

/// JSON form of a covariance: `{"eigenvalues":[...], "multiplicities":[...], "p":N}`,
/// with an optional row-major `"eigenbasis"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceJson {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenbasis: Option<Vec<Vec<f64>>>,
}

impl TryFrom<CovarianceJson> for CovarianceSpec {
    type Error = Error;

    fn try_from(json: CovarianceJson) -> Result<Self> {
        let spec = CovarianceSpec::new(json.eigenvalues, json.multiplicities)?;
        if spec.p != json.p {
            return Err(Error::InvalidSpec(format!(
                "multiplicities sum to {} but p = {}",
                spec.p, json.p
            )));
        }
        match json.eigenbasis {
            None => Ok(spec),
            Some(rows) => {
                if rows.len() != spec.p || rows.iter().any(|r| r.len() != spec.p) {
                    return Err(Error::InvalidSpec("eigenbasis must be p×p".into()));
                }
                let q = Mat::from_fn(spec.p, spec.p, |i, j| rows[i][j]);
                spec.with_basis(q)
            }
        }
    }
}

impl From<&CovarianceSpec> for CovarianceJson {
    fn from(spec: &CovarianceSpec) -> Self {
        let eigenbasis = match &spec.basis {
            Basis::Coordinate => None,
            Basis::Dense(q) => Some(
                (0..q.nrows())
                    .map(|i| (0..q.ncols()).map(|j| q[(i, j)]).collect())
                    .collect(),
            ),
            // Serialized densely; the frame form is an in-memory shortcut.
            Basis::LeadingFrame(_) => None,
        };
        Self {
            eigenvalues: spec.eigenvalues.clone(),
            multiplicities: spec.multiplicities.clone(),
            p: spec.p,
            eigenbasis,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn diag(values: &[f64]) -> CovarianceSpec {
        CovarianceSpec::from_spectrum(values).unwrap()
    }

    #[test]
    fn effective_rank_examples() {
        assert_eq!(CovarianceSpec::identity(10).unwrap().effective_rank(), 10.0);
        let spiked = build_spiked(&SpikedParams::new(100, 50, 1, 3.0).unwrap(), None).unwrap();
        assert_relative_eq!(spiked.effective_rank(), 25.75, epsilon = 1e-12);
        assert_relative_eq!(diag(&[4.0, 1.0]).effective_rank(), 1.25, epsilon = 1e-15);
    }

    #[test]
    fn standardize_examples() {
        let s = diag(&[4.0, 1.0]).standardize();
        assert_eq!(s.eigenvalues(), &[1.0, 0.25]);
        let id = CovarianceSpec::identity(5).unwrap();
        assert_eq!(id.standardize(), id);
        let spiked = build_spiked(&SpikedParams::new(10, 10, 2, 3.0).unwrap(), None)
            .unwrap()
            .standardize();
        assert_eq!(spiked.eigenvalues(), &[1.0, 0.25]);
        assert_eq!(spiked.multiplicities(), &[2, 8]);
    }

    #[test]
    fn build_spiked_examples() {
        let s = build_spiked(&SpikedParams::new(3, 5, 1, 3.0).unwrap(), None).unwrap();
        assert_eq!(s.eigenvalues(), &[4.0, 1.0]);
        assert_eq!(s.multiplicities(), &[1, 2]);
        let s = build_spiked(&SpikedParams::new(3, 5, 1, 0.0).unwrap(), None).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0]);
        assert_eq!(s.multiplicities(), &[3]);
        let s = build_spiked(&SpikedParams::new(4, 5, 2, 1.0).unwrap(), None).unwrap();
        assert_eq!(s.eigenvalues(), &[2.0, 1.0]);
        assert_eq!(s.multiplicities(), &[2, 2]);
    }

    #[test]
    fn build_spiked_rejects_bad_frame() {
        let mut frame = coordinate_frame(4, 2);
        frame[(0, 1)] = 0.1;
        let err = build_spiked(&SpikedParams::new(4, 5, 2, 1.0).unwrap(), Some(&frame));
        assert!(matches!(err, Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn spiked_params_validation() {
        assert!(SpikedParams::new(3, 5, 4, 1.0).is_err());
        assert!(SpikedParams::new(3, 0, 1, 1.0).is_err());
        assert!(SpikedParams::new(3, 5, 1, -1.0).is_err());
        assert_eq!(SpikedParams::new(101, 50, 1, 1.0).unwrap().delta(), 2.0);
    }

    #[test]
    fn sqrt_apply_examples() {
        let id = CovarianceSpec::identity(3).unwrap();
        assert_eq!(id.sqrt_apply(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);

        // u² + 2u = 3 ⇒ u = 1, so Σ^{1/2}e₁ = 2e₁.
        let frame = coordinate_frame(3, 1);
        let spiked =
            build_spiked(&SpikedParams::new(3, 3, 1, 3.0).unwrap(), Some(&frame)).unwrap();
        assert!(matches!(spiked.basis(), Basis::LeadingFrame(_)));
        let y = spiked.sqrt_apply(&[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(y[0], 2.0, epsilon = 1e-15);
        assert_eq!(&y[1..], &[0.0, 0.0]);

        let degenerate = CovarianceSpec::new(vec![4.0, 0.0], vec![1, 1]).unwrap();
        assert_eq!(degenerate.sqrt_apply(&[1.0, 1.0]).unwrap(), vec![2.0, 0.0]);
    }

    #[test]
    fn spec_validation() {
        assert!(CovarianceSpec::new(vec![1.0, 1.0], vec![1, 1]).is_err());
        assert!(CovarianceSpec::new(vec![0.0], vec![1]).is_err());
        assert!(CovarianceSpec::new(vec![1.0, -0.5], vec![1, 1]).is_err());
        assert!(CovarianceSpec::new(vec![1.0], vec![0]).is_err());
        assert!(CovarianceSpec::new(vec![2.0, 1.0], vec![1]).is_err());
    }

    #[test]
    fn from_spectrum_merges_near_duplicates() {
        let s = CovarianceSpec::from_spectrum(&[1.0, 3.0, 3.0 - 1e-12, 1.0 + 1e-10]).unwrap();
        assert_eq!(s.eigenvalues().len(), 2);
        assert_eq!(s.multiplicities(), &[2, 2]);
        assert_eq!(s.p(), 4);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let text = r#"{"eigenvalues":[4.0,1.0],"multiplicities":[1,2],"p":3}"#;
        let json: CovarianceJson = serde_json::from_str(text).unwrap();
        let spec = CovarianceSpec::try_from(json.clone()).unwrap();
        assert_eq!(CovarianceJson::from(&spec), json);

        let bad: CovarianceJson =
            serde_json::from_str(r#"{"eigenvalues":[4.0,1.0],"multiplicities":[1,2],"p":4}"#)
                .unwrap();
        assert!(CovarianceSpec::try_from(bad).is_err());
    }

    #[test]
    fn group_norms_in_every_basis() {
        let h = [1.0, 2.0, 2.0];
        let coord = CovarianceSpec::new(vec![4.0, 1.0], vec![1, 2]).unwrap();
        let w = coord.group_norms(&h).unwrap();
        assert_relative_eq!(w[0], 1.0);
        assert_relative_eq!(w[1], 8f64.sqrt());

        // Spike along (e₁+e₂)/√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let frame = Mat::from_fn(3, 1, |i, _| if i < 2 { s } else { 0.0 });
        let framed = coord.clone().with_leading_frame(frame).unwrap();
        let w = framed.group_norms(&h).unwrap();
        assert_relative_eq!(w[0], 3.0 * s, epsilon = 1e-14);
        assert_relative_eq!(w[0] * w[0] + w[1] * w[1], 9.0, epsilon = 1e-13);

        let q = Mat::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) | (1, 0) => s,
            (0, 1) => s,
            (1, 1) => -s,
            (2, 2) => 1.0,
            _ => 0.0,
        });
        let dense = coord.with_basis(q).unwrap();
        let w2 = dense.group_norms(&h).unwrap();
        assert_relative_eq!(w2[0], w[0], epsilon = 1e-14);
        assert_relative_eq!(w2[1], w[1], epsilon = 1e-14);
    }

    #[test]
    fn sampling_determinism() {
        let spec = CovarianceSpec::identity(4).unwrap();
        let mut a = substream(7, 0);
        let mut b = substream(7, 0);
        let x1 = spec.sample_gaussian(&mut a);
        let x2 = spec.sample_gaussian(&mut a);
        assert_ne!(x1, x2);
        assert_eq!(x1, spec.sample_gaussian(&mut b));
        let mut c = substream(7, 1);
        assert_ne!(x1, spec.sample_gaussian(&mut c));
    }

    #[test]
    fn empirical_covariance_of_identity() {
        let spec = CovarianceSpec::identity(4).unwrap();
        let mut rng = substream(11, 0);
        let n = 100_000;
        let mut acc = [[0.0f64; 4]; 4];
        for _ in 0..n {
            let x = spec.sample_gaussian(&mut rng);
            for i in 0..4 {
                for j in 0..4 {
                    acc[i][j] += x[i] * x[j];
                }
            }
        }
        for (i, row) in acc.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((v / n as f64 - target).abs() < 0.05, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn dense_matches_apply() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let frame = Mat::from_fn(3, 1, |i, _| if i < 2 { s } else { 0.0 });
        let spec = CovarianceSpec::new(vec![5.0, 2.0], vec![1, 2])
            .unwrap()
            .with_leading_frame(frame)
            .unwrap();
        let d = spec.dense();
        let x = [0.3, -1.2, 0.7];
        let y = spec.apply(&x).unwrap();
        for i in 0..3 {
            let di: f64 = (0..3).map(|j| d[(i, j)] * x[j]).sum();
            assert_relative_eq!(di, y[i], epsilon = 1e-14);
        }
    }

    fn random_spec() -> impl Strategy<Value = CovarianceSpec> {
        prop::collection::vec((0.01f64..10.0, 1usize..5), 1..6).prop_map(|groups| {
            let mut values = Vec::new();
            for (v, m) in groups {
                values.extend(std::iter::repeat(v).take(m));
            }
            CovarianceSpec::from_spectrum(&values).unwrap()
        })
    }

    proptest! {
        #[test]
        fn effective_rank_bounds_and_scale_invariance(spec in random_spec()) {
            let r = spec.effective_rank();
            prop_assert!(r >= 1.0 - 1e-12 && r <= spec.p() as f64 + 1e-12);
            prop_assert_eq!(r, spec.standardize().effective_rank());
        }

        #[test]
        fn sqrt_twice_is_sigma(spec in random_spec(), seed in 0u64..1000) {
            let mut rng = substream(seed, 0);
            let x: Vec<f64> = (0..spec.p()).map(|_| rng.sample(StandardNormal)).collect();
            let twice = spec.sqrt_apply(&spec.sqrt_apply(&x).unwrap()).unwrap();
            let direct = spec.apply(&x).unwrap();
            let scale = norm(&direct).max(1e-300);
            let diff: Vec<f64> = twice.iter().zip(&direct).map(|(a, b)| a - b).collect();
            prop_assert!(norm(&diff) <= 1e-10 * scale);
        }
    }
}
