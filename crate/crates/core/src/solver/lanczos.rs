use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseOperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanczosOptions {
    /// Target residual `‖Hv - Ev‖`.
    pub tol: f64,
    /// Budget of matrix-vector products.
    pub max_iter: usize,
    pub seed: u64,
    /// Krylov dimension per restart cycle.
    pub krylov_dim: usize,
    /// Number of extra deflated solves used to count degenerate ground
    /// states (0 disables the count).
    pub degeneracy_probe: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
            seed: 0x5eed,
            krylov_dim: 80,
            degeneracy_probe: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Matrix-vector products spent.
    pub iterations: usize,
    /// Eigenvalues within `100 tol` of `energy`, when probed.
    pub degeneracy: Option<usize>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn project_out(w: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(w, b);
        axpy(w, -c, b);
    }
}

/// Lowest eigenpair of a symmetric tridiagonal matrix.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
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
    let eig = t.self_adjoint_eigen(faer::Side::Lower).expect("tridiagonal eigensolve");
    let s = eig.S();
    let u = eig.U();
    let mut best = 0;
    for i in 1..k {
        if s[i] < s[best] {
            best = i;
        }
    }
    (s[best], (0..k).map(|i| u[(i, best)]).collect())
}

/// Ground state by restarted Lanczos with full reorthogonalization.
/// The start vector is drawn from a ChaCha stream seeded with `opts.seed`,
/// so results are reproducible for a fixed seed and thread count.
pub fn ground_state(op: &SparseOperator, opts: &LanczosOptions) -> Result<GroundState> {
    let mut gs = lowest_deflated(op, opts, &[], opts.seed)?;
    if opts.degeneracy_probe > 0 {
        let threshold = 100.0 * opts.tol;
        let mut found = vec![gs.vector.clone()];
        while found.len() <= opts.degeneracy_probe && found.len() < op.dim() {
            let next = lowest_deflated(op, opts, &found, opts.seed.wrapping_add(found.len() as u64))?;
            if next.energy - gs.energy > threshold {
                break;
            }
            found.push(next.vector);
        }
        gs.degeneracy = Some(found.len());
    }
    Ok(gs)
}

/// The `count` lowest eigenpairs, obtained one at a time by deflation.
pub fn lowest_states(op: &SparseOperator, opts: &LanczosOptions, count: usize) -> Result<Vec<GroundState>> {
    let mut out: Vec<GroundState> = Vec::new();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for i in 0..count.min(op.dim()) {
        let gs = lowest_deflated(op, opts, &found, opts.seed.wrapping_add(i as u64))?;
        found.push(gs.vector.clone());
        out.push(gs);
    }
    Ok(out)
}

fn lowest_deflated(op: &SparseOperator, opts: &LanczosOptions, deflate: &[Vec<f64>], seed: u64) -> Result<GroundState> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    if deflate.len() >= n {
        return Err(Error::InvalidParameter("deflation exhausts the space".into()));
    }
    if opts.krylov_dim < 2 || !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(
            "krylov_dim must be at least 2 and tol positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_out(&mut v, deflate);
    project_out(&mut v, deflate);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let scale = op.norm_bound().max(1.0);
    let m = opts.krylov_dim.min(n - deflate.len());
    let mut matvecs = 0;
    let mut w = vec![0.0; n];
    loop {
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            op.apply_into(&basis[j], &mut w)?;
            matvecs += 1;
            project_out(&mut w, deflate);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            axpy(&mut w, -a, &basis[j]);
            if j > 0 {
                axpy(&mut w, -beta[j - 1], &basis[j - 1]);
            }
            // two passes of classical Gram-Schmidt keep the basis orthogonal
            for _ in 0..2 {
                project_out(&mut w, &basis);
                project_out(&mut w, deflate);
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-13 * scale {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let (_, s) = tridiagonal_lowest(&alpha, &beta[..alpha.len() - 1]);
        let mut x = vec![0.0; n];
        for (si, bi) in s.iter().zip(&basis) {
            axpy(&mut x, *si, bi);
        }
        project_out(&mut x, deflate);
        let nx = norm(&x);
        x.iter_mut().for_each(|xi| *xi /= nx);

        op.apply_into(&x, &mut w)?;
        matvecs += 1;
        project_out(&mut w, deflate);
        let energy = dot(&x, &w);
        axpy(&mut w, -energy, &x);
        let residual = norm(&w);
        if residual < opts.tol {
            return Ok(GroundState {
                energy,
                vector: x,
                residual,
                iterations: matvecs,
                degeneracy: None,
            });
        }
        if matvecs >= opts.max_iter || !residual.is_finite() {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual,
            });
        }
        v = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_xx(n: usize) -> SparseOperator {
        let mut a = vec![0.0; n * n];
        for i in 0..n - 1 {
            a[i * n + i + 1] = -1.0;
            a[(i + 1) * n + i] = -1.0;
        }
        SparseOperator::from_dense(n, &a, "hopping").unwrap()
    }

    #[test]
    fn hopping_chain_ground_energy() {
        let n = 300;
        let gs = ground_state(&chain_xx(n), &LanczosOptions::default()).unwrap();
        let exact = -2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((gs.energy - exact).abs() < 1e-10, "{} vs {exact}", gs.energy);
        assert!(gs.residual < 1e-10);
    }

    #[test]
    fn two_level() {
        let op = SparseOperator::from_dense(2, &[0.0, -1.0, -1.0, 0.0], "toy").unwrap();
        let gs = ground_state(&op, &LanczosOptions::default()).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-14);
        assert!((gs.vector[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degeneracy_is_counted() {
        let op = SparseOperator::from_diagonal(&[-1.0, 0.5, -1.0, 2.0, -1.0, 3.0], "diag");
        let opts = LanczosOptions {
            degeneracy_probe: 4,
            ..Default::default()
        };
        let gs = ground_state(&op, &opts).unwrap();
        assert_eq!(gs.degeneracy, Some(3));
        let states = lowest_states(&op, &LanczosOptions::default(), 4).unwrap();
        assert!((states[3].energy - 0.5).abs() < 1e-10);
    }

    #[test]
    fn seed_determinism() {
        let op = chain_xx(120);
        let opts = LanczosOptions::default();
        let a = ground_state(&op, &opts).unwrap();
        let b = ground_state(&op, &opts).unwrap();
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.vector, b.vector);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let op = chain_xx(400);
        let opts = LanczosOptions {
            max_iter: 5,
            krylov_dim: 4,
            ..Default::default()
        };
        assert!(matches!(ground_state(&op, &opts), Err(Error::NoConvergence { .. })));
    }
}
