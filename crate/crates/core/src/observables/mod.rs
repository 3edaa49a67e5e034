//! Correlations, structure factors, flippable counts and RVBS diagnostics
//! for real or complex state vectors over a dual-spin basis.
//!
//! Structure factors follow
//! `S_k[μ] = 4 / N^2 Σ_{p,p'} e^{i k (p - p')} <S^μ_p S^μ_p'>` with `N` the
//! number of dual spins, so `Σ_k S_k[μ] = 1` on the full momentum grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{Basis, NeighborTable};

/// State amplitude: `f64` for ground states, `Complex64` for evolution.
pub trait Amplitude: Copy + Send + Sync + 'static {
    fn to_complex(self) -> Complex64;

    /// `|a|^2`.
    fn weight(self) -> f64 {
        Complex64::norm_sqr(&self.to_complex())
    }
}

impl Amplitude for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn weight(self) -> f64 {
        self * self
    }
}

impl Amplitude for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    X,
    Z,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::X => "x",
            Component::Z => "z",
        }
    }
}

/// Sum over fixed-size chunks so the result does not depend on how the
/// thread pool splits the work.
fn chunked_sum<A: Amplitude, F>(states: &[u64], v: &[A], f: F) -> f64
where
    F: Fn(u64, A) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = states
        .par_chunks(CHUNK)
        .zip(v.par_chunks(CHUNK))
        .map(|(s, a)| s.iter().zip(a).map(|(&d, &x)| f(d, x)).sum())
        .collect();
    partial.iter().sum()
}

fn check<A: Amplitude>(v: &[A], basis: &Basis) -> Result<()> {
    if v.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: v.len(),
        });
    }
    if !basis.is_dual() {
        return Err(Error::BasisMismatch("observables need a dual-spin basis".into()));
    }
    Ok(())
}

fn check_site(basis: &Basis, p: usize) -> Result<()> {
    if p >= basis.spec().n_spins() {
        return Err(Error::InvalidParameter(format!("site {p} outside the lattice")));
    }
    Ok(())
}

fn sz(d: u64, p: usize) -> f64 {
    if d >> p & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

/// `<S^μ_p S^μ_p'>`. The x case pairs `c` with `c ^ p ^ p'`; partners
/// outside the basis contribute 0.
pub fn correlation<A: Amplitude>(v: &[A], basis: &Basis, mu: Component, p: usize, q: usize) -> Result<f64> {
    check(v, basis)?;
    check_site(basis, p)?;
    check_site(basis, q)?;
    let states = basis.states();
    Ok(match mu {
        Component::Z => states
            .iter()
            .zip(v)
            .map(|(&d, a)| a.weight() * sz(d, p) * sz(d, q))
            .sum(),
        Component::X => {
            if p == q {
                return Ok(0.25 * v.iter().map(|a| a.weight()).sum::<f64>());
            }
            let flip = (1u64 << p) | (1u64 << q);
            states
                .iter()
                .zip(v)
                .map(|(&d, a)| match basis.index_of(d ^ flip) {
                    Some(j) => 0.25 * (a.to_complex().conj() * v[j].to_complex()).re,
                    None => 0.0,
                })
                .sum()
        }
    })
}

/// Full `N x N` matrix of `<S^μ_p S^μ_p'>`, row-major.
pub fn correlation_matrix<A: Amplitude>(v: &[A], basis: &Basis, mu: Component) -> Result<Vec<f64>> {
    check(v, basis)?;
    let n = basis.spec().n_spins();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p..n).map(move |q| (p, q))).collect();
    let vals: Vec<f64> = pairs
        .par_iter()
        .map(|&(p, q)| correlation(v, basis, mu, p, q))
        .collect::<Result<_>>()?;
    let mut m = vec![0.0; n * n];
    for (&(p, q), c) in pairs.iter().zip(vals) {
        m[p * n + q] = c;
        m[q * n + p] = c;
    }
    Ok(m)
}

/// `<S^z_p>` for every site.
pub fn magnetization<A: Amplitude>(v: &[A], basis: &Basis) -> Result<Vec<f64>> {
    check(v, basis)?;
    let n = basis.spec().n_spins();
    let mut m = vec![0.0; n];
    for (&d, a) in basis.states().iter().zip(v) {
        let w = a.weight();
        for (p, mp) in m.iter_mut().enumerate() {
            *mp += w * sz(d, p);
        }
    }
    Ok(m)
}

fn phases(basis: &Basis, k: (f64, f64)) -> Vec<Complex64> {
    let spec = basis.spec();
    (0..spec.n_spins())
        .map(|p| {
            let (x, y) = spec.coords(p);
            Complex64::from_polar(1.0, k.0 * x as f64 + k.1 * y as f64)
        })
        .collect()
}

fn norm_factor(basis: &Basis) -> f64 {
    let n = basis.spec().n_spins() as f64;
    4.0 / (n * n)
}

/// `S_k[μ]` by the direct routes: a weighted sum of `|Σ_p e^{ikp} s_p|^2`
/// for z, and `‖Σ_p e^{ikp} S^x_p v‖^2` accumulated over flipped
/// configurations for x.
pub fn structure_factor<A: Amplitude>(v: &[A], basis: &Basis, mu: Component, k: (f64, f64)) -> Result<f64> {
    check(v, basis)?;
    let ph = phases(basis, k);
    let n = ph.len();
    let states = basis.states();
    let raw = match mu {
        Component::Z => chunked_sum(states, v, |d, a| {
            let m: Complex64 = (0..n).map(|p| ph[p] * sz(d, p)).sum();
            a.weight() * m.norm_sqr()
        }),
        Component::X => {
            // components of Σ_p e^{ikp} S^x_p v, keyed by flipped configuration
            let mut acc: Vec<(u64, Complex64)> = Vec::with_capacity(states.len() * n);
            for (&d, a) in states.iter().zip(v) {
                let a = a.to_complex();
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                acc.extend((0..n).map(|p| (d ^ (1 << p), ph[p] * a * 0.5)));
            }
            acc.par_sort_by_key(|e| e.0);
            let mut total = 0.0;
            let mut i = 0;
            while i < acc.len() {
                let mut z = acc[i].1;
                let mut j = i + 1;
                while j < acc.len() && acc[j].0 == acc[i].0 {
                    z += acc[j].1;
                    j += 1;
                }
                total += z.norm_sqr();
                i = j;
            }
            total
        }
    };
    Ok(norm_factor(basis) * raw)
}

/// `S_k[μ]` from a precomputed correlation matrix.
pub fn structure_factor_from_correlations(corr: &[f64], basis: &Basis, k: (f64, f64)) -> Result<f64> {
    let n = basis.spec().n_spins();
    if corr.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: corr.len(),
        });
    }
    let ph = phases(basis, k);
    let mut s = Complex64::new(0.0, 0.0);
    for p in 0..n {
        for q in 0..n {
            s += ph[p] * ph[q].conj() * corr[p * n + q];
        }
    }
    Ok(norm_factor(basis) * s.re)
}

/// Connected `S_k[z]`: `<S^z S^z>` replaced by `<S^z S^z> - <S^z><S^z>`.
pub fn structure_factor_connected<A: Amplitude>(v: &[A], basis: &Basis, k: (f64, f64)) -> Result<f64> {
    let raw = structure_factor(v, basis, Component::Z, k)?;
    let m = magnetization(v, basis)?;
    let ph = phases(basis, k);
    let mean: Complex64 = ph.iter().zip(&m).map(|(e, s)| e * s).sum();
    Ok(raw - norm_factor(basis) * mean.norm_sqr())
}

pub const K_ZERO: (f64, f64) = (0.0, 0.0);
pub const K_PI: (f64, f64) = (PI, PI);
pub const K_HALF_PI: (f64, f64) = (PI / 2.0, PI / 2.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFactorEntry {
    pub mu: Component,
    pub kx: f64,
    pub ky: f64,
    pub value: f64,
}

/// Structure factors at `(0,0)`, `(π,π)`, `(π/2,π/2)` and any extra
/// momenta, for both components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFactorReport {
    pub nx: usize,
    pub ny: usize,
    pub entries: Vec<StructureFactorEntry>,
}

impl StructureFactorReport {
    pub fn compute<A: Amplitude>(v: &[A], basis: &Basis, extra: &[(f64, f64)]) -> Result<Self> {
        let mut ks = vec![K_ZERO, K_PI, K_HALF_PI];
        ks.extend_from_slice(extra);
        let mut entries = Vec::with_capacity(2 * ks.len());
        for mu in [Component::Z, Component::X] {
            for &k in &ks {
                let value = structure_factor(v, basis, mu, k)?;
                entries.push(StructureFactorEntry {
                    mu,
                    kx: k.0,
                    ky: k.1,
                    value,
                });
            }
        }
        let spec = basis.spec();
        Ok(Self {
            nx: spec.nx,
            ny: spec.ny,
            entries,
        })
    }

    pub fn get(&self, mu: Component, k: (f64, f64)) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.mu == mu && (e.kx - k.0).abs() < 1e-12 && (e.ky - k.1).abs() < 1e-12)
            .map(|e| e.value)
    }

    fn require(&self, mu: Component, k: (f64, f64)) -> f64 {
        self.get(mu, k).expect("standard momenta are always present")
    }

    pub fn s00_z(&self) -> f64 {
        self.require(Component::Z, K_ZERO)
    }

    pub fn spipi_z(&self) -> f64 {
        self.require(Component::Z, K_PI)
    }

    pub fn spipi_x(&self) -> f64 {
        self.require(Component::X, K_PI)
    }

    pub fn n_sites(&self) -> usize {
        self.nx * self.ny
    }
}

/// `Σ_p <P_p>` where `P_p` projects on flippable plaquettes (generalized
/// blockade satisfied).
pub fn flippable_count<A: Amplitude>(v: &[A], basis: &Basis) -> Result<f64> {
    check(v, basis)?;
    let table = NeighborTable::new(*basis.spec());
    Ok(chunked_sum(basis.states(), v, |d, a| {
        a.weight() * table.flippable_count(d) as f64
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RvbsCriteria {
    /// Allowed `|S_ππ[z] / S_00[z] - 1|`.
    pub ratio_tol: f64,
    /// Required `S_ππ[x]` relative to its ferromagnetic value `1/N`.
    pub x_factor: f64,
}

impl Default for RvbsCriteria {
    fn default() -> Self {
        Self {
            ratio_tol: 0.1,
            x_factor: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RvbsDiagnostic {
    /// `S_ππ[z] / S_00[z]`, absent when `S_00[z] < 1e-12`.
    pub ratio: Option<f64>,
    pub x_peak: f64,
    /// `S_ππ[x]` of the fully polarized state, `1/N`.
    pub x_baseline: f64,
    pub verdict: bool,
}

pub fn rvbs_signature(report: &StructureFactorReport, criteria: &RvbsCriteria) -> RvbsDiagnostic {
    let s00 = report.s00_z();
    let ratio = (s00 >= 1e-12).then(|| report.spipi_z() / s00);
    let x_peak = report.spipi_x();
    let x_baseline = 1.0 / report.n_sites() as f64;
    let verdict =
        matches!(ratio, Some(r) if (r - 1.0).abs() < criteria.ratio_tol) && x_peak >= criteria.x_factor * x_baseline;
    RvbsDiagnostic {
        ratio,
        x_peak,
        x_baseline,
        verdict,
    }
}

/// `|<a|b>|^2`.
pub fn fidelity<A: Amplitude, B: Amplitude>(a: &[A], b: &[B]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let s: Complex64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.to_complex().conj() * y.to_complex())
        .sum();
    Ok(s.norm_sqr())
}

/// Copies a state on `sub` into the larger basis `full`.
pub fn embed<A: Amplitude>(v: &[A], sub: &Basis, full: &Basis) -> Result<Vec<Complex64>> {
    check(v, sub)?;
    let mut out = vec![Complex64::new(0.0, 0.0); full.dim()];
    for (&d, a) in sub.states().iter().zip(v) {
        let j = full
            .index_of(d)
            .ok_or_else(|| Error::BasisMismatch(format!("state {d:#x} missing from the target basis")))?;
        out[j] = a.to_complex();
    }
    Ok(out)
}
