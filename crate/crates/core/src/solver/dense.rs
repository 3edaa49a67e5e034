use faer::Mat;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseOperator;

/// Largest dimension accepted by the dense routines.
pub const DENSE_MAX_DIM: usize = 4096;

/// Full eigendecomposition with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct DenseEigen {
    pub values: Vec<f64>,
    dim: usize,
    /// Column-major eigenvectors, column `k` belongs to `values[k]`.
    vectors: Vec<f64>,
}

impl DenseEigen {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }
}

fn to_mat(op: &SparseOperator) -> Result<Mat<f64>> {
    let n = op.dim();
    if n == 0 || n > DENSE_MAX_DIM {
        return Err(Error::DimensionCap {
            dim: n,
            cap: DENSE_MAX_DIM,
        });
    }
    let mut a = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for (j, v) in op.row(i) {
            a[(i, j)] = v;
        }
    }
    Ok(a)
}

fn decompose(op: &SparseOperator) -> Result<(Vec<f64>, Mat<f64>)> {
    let a = to_mat(op)?;
    let eig = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        })?;
    let s = eig.S();
    let values: Vec<f64> = (0..op.dim()).map(|i| s[i]).collect();
    Ok((values, eig.U().to_owned()))
}

/// Sorted eigenvalues.
pub fn dense_spectrum(op: &SparseOperator) -> Result<Vec<f64>> {
    let mut values = to_mat(op)?
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| Error::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        })?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues and eigenvectors, ascending.
pub fn dense_eigen(op: &SparseOperator) -> Result<DenseEigen> {
    let (values, u) = decompose(op)?;
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend((0..n).map(|i| u[(i, k)]));
    }
    Ok(DenseEigen {
        values: order.iter().map(|&k| values[k]).collect(),
        dim: n,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spin_sx() {
        let op = SparseOperator::from_dense(2, &[0.0, 0.5, 0.5, 0.0], "sx").unwrap();
        let ev = dense_spectrum(&op).unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let a = [2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        let op = SparseOperator::from_dense(3, &a, "tri").unwrap();
        let eig = dense_eigen(&op).unwrap();
        for k in 0..3 {
            let v = eig.vector(k);
            let hv = op.apply(v).unwrap();
            for i in 0..3 {
                assert!((hv[i] - eig.values[k] * v[i]).abs() < 1e-12);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        assert!((eig.values[0] - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn size_cap() {
        let op = SparseOperator::from_diagonal(&vec![0.0; DENSE_MAX_DIM + 1], "big");
        assert!(matches!(dense_spectrum(&op), Err(Error::DimensionCap { .. })));
    }
}
