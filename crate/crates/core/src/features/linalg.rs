//! Dense symmetric eigenvalue problems by cyclic Jacobi rotations.

use crate::Real;
use thiserror::Error;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("matrix is not symmetric at ({i}, {j}): |a_ij - a_ji| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
}

/// Eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSpectrum<T> {
    values: Vec<T>,
}

impl<T: Real> SymmetricSpectrum<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn smallest(&self) -> Option<T> {
        self.values.first().copied()
    }

    pub fn largest(&self) -> Option<T> {
        self.values.last().copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Eigenpairs; `vectors[k]` belongs to `spectrum.values()[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen<T> {
    pub spectrum: SymmetricSpectrum<T>,
    pub vectors: Vec<Vec<T>>,
}

pub fn symmetric_eigenvalues<T: Real>(matrix: &[Vec<T>]) -> Result<SymmetricSpectrum<T>, LinalgError> {
    symmetric_eigen(matrix).map(|e| e.spectrum)
}

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below
/// `max(1e-12, 10·eps·‖A‖_F)`.
pub fn symmetric_eigen<T: Real>(matrix: &[Vec<T>]) -> Result<SymmetricEigen<T>, LinalgError> {
    let n = matrix.len();
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(LinalgError::NotSquare { row, len: r.len(), n });
        }
    }
    let sym_tol = T::lit(1e-12);
    for i in 0..n {
        for j in i + 1..n {
            let diff = (matrix[i][j] - matrix[j][i]).abs();
            if diff > sym_tol {
                return Err(LinalgError::NotSymmetric { i, j, diff: diff.as_f64() });
            }
        }
    }

    let mut a: Vec<Vec<T>> = matrix.to_vec();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();

    let frob = a.iter().flatten().map(|&x| x * x).sum::<T>().sqrt();
    let tol = T::lit(1e-12).max(T::lit(10.0) * T::epsilon() * frob);
    let two = T::lit(2.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<T>()
            .sqrt();
        if off < tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                // rotation angle zeroing a[p][q]
                let theta = (a[q][q] - a[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    Ok(SymmetricEigen { spectrum: SymmetricSpectrum { values }, vectors })
}
