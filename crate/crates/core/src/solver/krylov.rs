use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseOperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KrylovOptions {
    /// Subspace size per exponential.
    pub krylov_dim: usize,
    /// Error budget per time step.
    pub tol: f64,
    /// Maximum bisection depth when a step misses the budget.
    pub max_splits: u32,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 20,
            tol: 1e-8,
            max_splits: 12,
        }
    }
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// One Krylov approximation of `exp(-i H dt) v`, with the standard
/// a-posteriori estimate `β_m |[exp(-i T dt)]_{m,1}| ‖v‖`.
fn krylov_step(op: &SparseOperator, v: &[Complex64], dt: f64, m: usize) -> Result<(Vec<Complex64>, f64)> {
    let n = v.len();
    let nv = cnorm(v);
    if nv == 0.0 {
        return Ok((v.to_vec(), 0.0));
    }
    let scale = op.norm_bound().max(1.0);
    let m = m.min(n);
    let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|z| z / nv).collect()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut tail = 0.0;
    for j in 0..m {
        op.apply_complex_into(&basis[j], &mut w)?;
        let a = cdot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = cdot(b, &w);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let b = cnorm(&w);
        if b < 1e-13 * scale {
            break;
        }
        if j + 1 == m {
            tail = b;
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    let k = alpha.len();
    let t = Mat::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = t
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::NoConvergence {
            iterations: k,
            residual: f64::NAN,
        })?;
    let (s, u) = (eig.S(), eig.U());
    // c = exp(-i T dt) e_1
    let c: Vec<Complex64> = (0..k)
        .map(|i| {
            (0..k)
                .map(|q| Complex64::from_polar(u[(i, q)] * u[(0, q)], -s[q] * dt))
                .sum()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (ci, bi) in c.iter().zip(&basis) {
        out.iter_mut().zip(bi).for_each(|(o, b)| *o += ci * b * nv);
    }
    Ok((out, tail * c[k - 1].norm() * nv))
}

/// `exp(-i H dt) v`, bisecting `dt` until every piece meets `opts.tol`.
/// Returns the propagated vector and the summed error estimate.
pub fn expm_multiply(
    op: &SparseOperator,
    v: &[Complex64],
    dt: f64,
    opts: &KrylovOptions,
) -> Result<(Vec<Complex64>, f64)> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: v.len(),
        });
    }
    let mut pieces = 1u32;
    loop {
        let h = dt / pieces as f64;
        let mut x = v.to_vec();
        let mut total = 0.0;
        let mut ok = true;
        for _ in 0..pieces {
            let (y, err) = krylov_step(op, &x, h, opts.krylov_dim)?;
            if err > opts.tol / pieces as f64 {
                ok = false;
                break;
            }
            total += err;
            x = y;
        }
        if ok {
            return Ok((x, total));
        }
        if pieces >= 1 << opts.max_splits {
            return Err(Error::StepError { t: dt, estimate: total });
        }
        pieces *= 2;
    }
}

/// Uniform time grid `t_k = t0 + k dt`, `k = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// Grid covering `[0, t_final]` with spacing at most `dt`.
    pub fn covering(t_final: f64, dt: f64) -> Result<Self> {
        if !(t_final >= 0.0) || !(dt > 0.0) {
            return Err(Error::InvalidParameter(
                "time grid needs t_final >= 0 and dt > 0".into(),
            ));
        }
        let steps = (t_final / dt).ceil().max(1.0) as usize;
        Ok(Self {
            t0: 0.0,
            dt: t_final / steps as f64,
            steps,
        })
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }
}

/// A Hamiltonian that depends on time.
pub trait OperatorFamily {
    fn dim(&self) -> usize;
    fn at(&self, t: f64) -> Result<SparseOperator>;
}

/// `t -> H` for a fixed operator.
pub struct Constant<'a>(pub &'a SparseOperator);

impl OperatorFamily for Constant<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn at(&self, _t: f64) -> Result<SparseOperator> {
        Ok(self.0.clone())
    }
}

/// `H(t) = diag + f(t) offdiag`.
pub struct LinearFamily<'a, F: Fn(f64) -> f64> {
    pub diagonal: &'a [f64],
    pub drive: &'a SparseOperator,
    pub amplitude: F,
}

impl<F: Fn(f64) -> f64> OperatorFamily for LinearFamily<'_, F> {
    fn dim(&self) -> usize {
        self.drive.dim()
    }

    fn at(&self, t: f64) -> Result<SparseOperator> {
        self.drive.scaled((self.amplitude)(t)).add_diagonal(self.diagonal)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    /// Largest per-step error estimate.
    pub max_step_error: f64,
}

/// Propagates `v0` across `grid` with the Hamiltonian frozen at the midpoint
/// of every step. `observe(k, t, state)` runs at every grid point, including
/// `t0`.
pub fn evolve_with<O, F>(
    family: &O,
    v0: &[Complex64],
    grid: &TimeGrid,
    opts: &KrylovOptions,
    mut observe: F,
) -> Result<(Vec<Complex64>, f64)>
where
    O: OperatorFamily + ?Sized,
    F: FnMut(usize, f64, &[Complex64]) -> Result<()>,
{
    if v0.len() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: v0.len(),
        });
    }
    let mut v = v0.to_vec();
    let mut worst: f64 = 0.0;
    observe(0, grid.t0, &v)?;
    for k in 0..grid.steps {
        let t = grid.time(k);
        let h = family.at(t + 0.5 * grid.dt)?;
        let (next, err) = expm_multiply(&h, &v, grid.dt, opts).map_err(|e| match e {
            Error::StepError { estimate, .. } => Error::StepError { t, estimate },
            other => other,
        })?;
        worst = worst.max(err);
        v = next;
        observe(k + 1, grid.time(k + 1), &v)?;
    }
    Ok((v, worst))
}

/// Propagates `v0` and keeps the state every `record_every` steps (and the
/// final one).
pub fn evolve<O: OperatorFamily + ?Sized>(
    family: &O,
    v0: &[Complex64],
    grid: &TimeGrid,
    opts: &KrylovOptions,
    record_every: usize,
) -> Result<Trajectory> {
    let every = record_every.max(1);
    let mut traj = Trajectory::default();
    let (_, worst) = evolve_with(family, v0, grid, opts, |k, t, v| {
        if k % every == 0 || k == grid.steps {
            traj.times.push(t);
            traj.states.push(v.to_vec());
        }
        Ok(())
    })?;
    traj.max_step_error = worst;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rabi_oscillation() {
        // H = -Ω σx: P_1(t) = sin^2(Ω t)
        let omega = 0.7;
        let op = SparseOperator::from_dense(2, &[0.0, -omega, -omega, 0.0], "rabi").unwrap();
        let grid = TimeGrid::covering(5.0, 0.05).unwrap();
        let traj = evolve(&Constant(&op), &[c(1.0), c(0.0)], &grid, &KrylovOptions::default(), 1).unwrap();
        for (t, v) in traj.times.iter().zip(&traj.states) {
            let p1 = v[1].norm_sqr();
            assert!((p1 - (omega * t).sin().powi(2)).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn eigenstate_only_acquires_phase() {
        let op = SparseOperator::from_dense(2, &[1.0, 0.5, 0.5, -1.0], "two").unwrap();
        let eig = crate::solver::dense_eigen(&op).unwrap();
        let v0: Vec<Complex64> = eig.vector(0).iter().map(|&x| c(x)).collect();
        let grid = TimeGrid::covering(3.0, 0.1).unwrap();
        let traj = evolve(&Constant(&op), &v0, &grid, &KrylovOptions::default(), 1).unwrap();
        for v in &traj.states {
            for i in 0..2 {
                assert!((v[i].norm_sqr() - v0[i].norm_sqr()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn large_step_is_split() {
        let n = 64;
        let mut a = vec![0.0; n * n];
        for i in 0..n - 1 {
            a[i * n + i + 1] = -3.0;
            a[(i + 1) * n + i] = -3.0;
        }
        let op = SparseOperator::from_dense(n, &a, "hop").unwrap();
        let mut v = vec![c(0.0); n];
        v[n / 2] = c(1.0);
        let opts = KrylovOptions {
            krylov_dim: 8,
            ..Default::default()
        };
        let (out, err) = expm_multiply(&op, &v, 2.0, &opts).unwrap();
        assert!(err < 1e-8);
        assert!((cnorm(&out) - 1.0).abs() < 1e-10);
        let strict = KrylovOptions {
            krylov_dim: 3,
            tol: 1e-14,
            max_splits: 1,
        };
        assert!(matches!(
            expm_multiply(&op, &v, 2.0, &strict),
            Err(Error::StepError { .. })
        ));
    }
}
