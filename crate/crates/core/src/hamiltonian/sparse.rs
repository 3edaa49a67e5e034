use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Real symmetric matrix in compressed-row form. Rows are sorted by column
/// and duplicate entries are summed at build time.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    model: String,
}

fn compress(mut row: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    row.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    out
}

impl SparseOperator {
    /// Builds the matrix row by row; `row(i, out)` pushes `(column, value)`
    /// pairs in any order. Rows are evaluated in parallel.
    pub fn from_row_fn<F>(dim: usize, model: impl Into<String>, row: F) -> Self
    where
        F: Fn(usize, &mut Vec<(usize, f64)>) + Sync,
    {
        let rows: Vec<Vec<(usize, f64)>> = (0..dim)
            .into_par_iter()
            .map(|i| {
                let mut buf = Vec::new();
                row(i, &mut buf);
                compress(buf)
            })
            .collect();
        Self::from_rows(dim, model, rows)
    }

    /// Fallible variant of [`SparseOperator::from_row_fn`].
    pub fn try_from_row_fn<F>(dim: usize, model: impl Into<String>, row: F) -> Result<Self>
    where
        F: Fn(usize, &mut Vec<(usize, f64)>) -> Result<()> + Sync,
    {
        let rows: Result<Vec<Vec<(usize, f64)>>> = (0..dim)
            .into_par_iter()
            .map(|i| {
                let mut buf = Vec::new();
                row(i, &mut buf)?;
                Ok(compress(buf))
            })
            .collect();
        Ok(Self::from_rows(dim, model, rows?))
    }

    fn from_rows(dim: usize, model: impl Into<String>, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for r in rows {
            for (c, v) in r {
                cols.push(c as u32);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            model: model.into(),
        }
    }

    pub fn from_diagonal(diag: &[f64], model: impl Into<String>) -> Self {
        Self::from_row_fn(diag.len(), model, |i, out| out.push((i, diag[i])))
    }

    /// Dense row-major input, used by tests and small fixtures.
    pub fn from_dense(dim: usize, a: &[f64], model: impl Into<String>) -> Result<Self> {
        if a.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: a.len(),
            });
        }
        Ok(Self::from_row_fn(dim, model, |i, out| {
            for j in 0..dim {
                if a[i * dim + j] != 0.0 {
                    out.push((j, a[i * dim + j]));
                }
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b]
            .iter()
            .zip(&self.vals[a..b])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.cols[a..b].binary_search(&(j as u32)) {
            Ok(k) => self.vals[a + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|H_ij - H_ji|` over the stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        (0..self.dim)
            .into_par_iter()
            .map(|i| self.row(i).map(|(j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: n,
            });
        }
        Ok(())
    }

    /// `y = H x`. Each row is summed sequentially, so the result does not
    /// depend on the thread count.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        y.par_iter_mut().enumerate().with_min_len(256).for_each(|(i, yi)| {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = 0.0;
            for k in a..b {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *yi = acc;
        });
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    pub fn apply_complex_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        y.par_iter_mut().enumerate().with_min_len(256).for_each(|(i, yi)| {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in a..b {
                acc += x[self.cols[k] as usize] * self.vals[k];
            }
            *yi = acc;
        });
        Ok(())
    }

    pub fn expectation(&self, v: &[f64]) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(hv.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    pub fn expectation_complex(&self, v: &[Complex64]) -> Result<f64> {
        let mut hv = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_complex_into(v, &mut hv)?;
        Ok(hv.iter().zip(v).map(|(a, b)| (b.conj() * a).re).sum())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &SparseOperator, factor: f64) -> Result<SparseOperator> {
        self.check_dim(other.dim)?;
        Ok(Self::from_row_fn(self.dim, self.model.clone(), |i, out| {
            out.extend(self.row(i));
            out.extend(other.row(i).map(|(j, v)| (j, factor * v)));
        }))
    }

    pub fn add_diagonal(&self, diag: &[f64]) -> Result<SparseOperator> {
        self.check_dim(diag.len())?;
        Ok(Self::from_row_fn(self.dim, self.model.clone(), |i, out| {
            out.extend(self.row(i));
            out.push((i, diag[i]));
        }))
    }

    pub fn scaled(&self, factor: f64) -> SparseOperator {
        let mut op = self.clone();
        op.vals.iter_mut().for_each(|v| *v *= factor);
        op
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.dim * self.dim];
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                a[i * self.dim + j] = v;
            }
        }
        a
    }

    /// Coordinate-list text export: a `# dim=<n> model=<name>` header and one
    /// `i j value` line per stored entry.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# dim={} model={}", self.dim, self.model)?;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SparseOperator {
        SparseOperator::from_dense(3, &[1.0, 2.0, 0.0, 2.0, -1.0, 0.5, 0.0, 0.5, 3.0], "sample").unwrap()
    }

    #[test]
    fn duplicates_are_summed() {
        let op = SparseOperator::from_row_fn(2, "dup", |i, out| {
            out.push((1 - i, 1.0));
            out.push((1 - i, 0.5));
            out.push((i, 0.0));
        });
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(0, 1), 1.5);
    }

    #[test]
    fn matvec_matches_dense() {
        let op = sample();
        let y = op.apply(&[1.0, -1.0, 2.0]).unwrap();
        assert_eq!(y, vec![-1.0, 4.0, 5.5]);
        assert_eq!(op.apply(&[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(op.apply(&[1.0]).is_err());
    }

    #[test]
    fn symmetry_check() {
        assert!(sample().is_symmetric(1e-12));
        let bad = SparseOperator::from_dense(2, &[0.0, 1.0, 0.0, 0.0], "bad").unwrap();
        assert_eq!(bad.max_asymmetry(), 1.0);
    }

    #[test]
    fn sums_and_scaling() {
        let op = sample();
        let twice = op.add_scaled(&op, 1.0).unwrap();
        assert_eq!(twice, op.scaled(2.0).with_model("sample"));
        let shifted = op.add_diagonal(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(shifted.diagonal(), vec![2.0, 0.0, 4.0]);
    }

    #[test]
    fn coo_export() {
        let mut buf = Vec::new();
        sample().write_coo(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# dim=3 model=sample\n"));
        assert_eq!(text.lines().count(), 1 + 7);
    }

    #[test]
    fn complex_expectation_is_real_part() {
        let op = sample();
        let v = [
            Complex64::new(0.5, 0.5),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.5, 0.0),
        ];
        let e = op.expectation_complex(&v).unwrap();
        let re: Vec<f64> = v.iter().map(|c| c.re).collect();
        let im: Vec<f64> = v.iter().map(|c| c.im).collect();
        let expected = op.expectation(&re).unwrap() + op.expectation(&im).unwrap();
        assert!((e - expected).abs() < 1e-15);
    }
}
