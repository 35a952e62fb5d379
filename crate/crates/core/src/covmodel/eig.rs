use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

const JACOBI_OFF_TOL: f64 = 1e-14;
const SYMMETRY_TOL: f64 = 1e-12;

/// Full spectral decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigenResult {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column k is the unit eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Mat<f64>,
    /// max_k ‖A v_k − λ_k v_k‖ measured against the input.
    pub residual: f64,
}

impl SymmetricEigenResult {
    pub fn smallest(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn frobenius(a: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * a[(i, j)];
        }
    }
    s.sqrt()
}

fn check_symmetric(a: &Mat<f64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let fro = frobenius(a);
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..j {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if !fro.is_finite() || worst > SYMMETRY_TOL * fro {
        return Err(Error::NotSymmetric(worst));
    }
    Ok(fro)
}

/// Sorts descending, flips each vector so its largest-magnitude entry is
/// positive, and measures the residual against `a`.
fn finish(a: &Mat<f64>, values: Vec<f64>, vectors: Mat<f64>) -> SymmetricEigenResult {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = Mat::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    for j in 0..n {
        let mut pivot = 0;
        for i in 1..n {
            if eigenvectors[(i, j)].abs() > eigenvectors[(pivot, j)].abs() {
                pivot = i;
            }
        }
        if eigenvectors[(pivot, j)] < 0.0 {
            for i in 0..n {
                eigenvectors[(i, j)] = -eigenvectors[(i, j)];
            }
        }
    }
    let av = a * &eigenvectors;
    let mut residual = 0.0f64;
    for j in 0..n {
        let r: f64 = (0..n)
            .map(|i| {
                let d = av[(i, j)] - eigenvalues[j] * eigenvectors[(i, j)];
                d * d
            })
            .sum();
        residual = residual.max(r.sqrt());
    }
    SymmetricEigenResult {
        eigenvalues,
        eigenvectors,
        residual,
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over all (p, q) pairs with the Rutishauser rotation until the
/// off-diagonal Frobenius norm drops below `1e-14·‖A‖_F`, failing after
/// [`JACOBI_MAX_SWEEPS`] sweeps. Deterministic for a fixed input.
pub fn symmetric_eig(a: &Mat<f64>) -> Result<SymmetricEigenResult> {
    let fro = check_symmetric(a)?;
    let n = a.nrows();
    let mut m: Vec<f64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let tol = JACOBI_OFF_TOL * fro;

    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&m);
        if off <= tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A ← A J
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                // A ← Jᵀ A
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[i * n + j]);
    Ok(finish(a, values, vectors))
}

/// Same contract as [`symmetric_eig`], backed by faer's tridiagonal
/// eigensolver. Used by the simulator where p reaches the hundreds.
pub fn fast_symmetric_eig(a: &Mat<f64>) -> Result<SymmetricEigenResult> {
    check_symmetric(a)?;
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenFailed(format!("{e:?}")))?;
    let n = a.nrows();
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
    let u = evd.U();
    let vectors = Mat::from_fn(n, n, |i, j| u[(i, j)]);
    Ok(finish(a, values, vectors))
}

/// Eigenvalues only, ascending, via faer.
pub(crate) fn fast_symmetric_eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::EigenFailed(format!("{e:?}")))
}
