//! Van der Waals couplings of decorated atom-pair arrays and the geometric
//! conditions that turn them into a generalized blockade.
//!
//! Every pair of atoms sitting at `p ± η/2` carries one pseudo spin. Lengths
//! are measured in units of the leg spacing `a_x = 1` and energies in units of
//! `C6 / a_x^6`; the `c6` arguments only rescale energies.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimal 3-vector for atom positions and separations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.4}, {:.4}, {:.4})", self.x, self.y, self.z)
    }
}

/// Numerical knobs shared by the geometry solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryOptions {
    /// Smallest admissible distance between two atoms, in units of `a_x`.
    pub min_separation: f64,
    /// Relative bracket width at which bisection stops.
    pub root_rel_tol: f64,
    /// Subset sums below `degeneracy_eps * max|A|` count as vanishing.
    pub degeneracy_eps: f64,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self {
            min_separation: 0.05,
            root_rel_tol: 1e-10,
            degeneracy_eps: 1e-6,
        }
    }
}

fn inv6(r: Vec3) -> f64 {
    let r2 = r.norm_sqr();
    1.0 / (r2 * r2 * r2)
}

fn guard(sep: Vec3, eta: Vec3, min: f64) -> Result<()> {
    for r in [sep, sep + eta, sep - eta] {
        let d = r.norm();
        if !(d >= min) {
            return Err(Error::DegenerateGeometry { distance: d, min });
        }
    }
    Ok(())
}

/// Ising coupling between two pair spins separated by `sep`:
/// `C6 (2/|sep|^6 - 1/|sep+η|^6 - 1/|sep-η|^6)`.
pub fn ising_coupling_a(sep: Vec3, eta: Vec3, c6: f64) -> Result<f64> {
    ising_coupling_a_with(sep, eta, c6, &GeometryOptions::default())
}

pub fn ising_coupling_a_with(sep: Vec3, eta: Vec3, c6: f64, opts: &GeometryOptions) -> Result<f64> {
    guard(sep, eta, opts.min_separation)?;
    Ok(c6 * (2.0 * inv6(sep) - inv6(sep + eta) - inv6(sep - eta)))
}

/// Single-spin field generated by a neighbour at `sep`:
/// `C6 (1/|sep+η|^6 - 1/|sep-η|^6)`.
pub fn onsite_coefficient_b(sep: Vec3, eta: Vec3, c6: f64) -> Result<f64> {
    onsite_coefficient_b_with(sep, eta, c6, &GeometryOptions::default())
}

pub fn onsite_coefficient_b_with(sep: Vec3, eta: Vec3, c6: f64, opts: &GeometryOptions) -> Result<f64> {
    guard(sep, eta, opts.min_separation)?;
    Ok(c6 * (inv6(sep + eta) - inv6(sep - eta)))
}

/// Laser parameters of the atom-level drive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Rabi frequency `Ω`.
    pub omega: f64,
    /// Laser detuning `Δ` (blue detuned: `Δ < 0`).
    pub detuning: f64,
    /// Ground-state energy offset `δ` between the two atoms of a pair.
    pub offset: f64,
}

impl DriveParams {
    /// True when `Ω·ratio ≤ -Δ` and `Ω·ratio ≤ C6/|η|^6`, i.e. the pair
    /// pseudo-spin description holds with the requested safety factor.
    pub fn regime_valid(&self, eta_norm: f64, c6: f64, ratio: f64) -> bool {
        let intra = c6 / eta_norm.powi(6);
        self.detuning < 0.0 && self.omega.abs() * ratio <= -self.detuning && self.omega.abs() * ratio <= intra
    }
}

/// Effective Rabi frequency of a pair pseudo spin,
/// `J = Ω² (1/Δ + |η|^6 / (C6 - Δ|η|^6))`.
pub fn effective_rabi(drive: &DriveParams, eta_norm: f64, c6: f64) -> Result<f64> {
    if drive.detuning == 0.0 {
        return Err(Error::InvalidParameter("detuning must be nonzero".into()));
    }
    let e6 = eta_norm.powi(6);
    let denom = c6 - drive.detuning * e6;
    if denom.abs() <= f64::EPSILON * c6.abs().max(1.0) {
        return Err(Error::RabiPole);
    }
    let w2 = drive.omega * drive.omega;
    Ok(w2 * (1.0 / drive.detuning + e6 / denom))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrayKind {
    /// Two-leg ladder, pairs oriented along the legs.
    Ladder,
    /// Rectangular array with the two checkerboard sublattices shifted by `d_y`
    /// and pairs tilted in the xz-plane.
    Square,
}

/// Placement of the atom pairs of a decorated array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairArrayGeometry {
    pub kind: ArrayKind,
    pub a_y: f64,
    pub d_y: f64,
    pub eta: Vec3,
    pub c6: f64,
}

impl PairArrayGeometry {
    pub fn ladder(eta_norm: f64, a_y: f64, c6: f64) -> Result<Self> {
        let g = Self {
            kind: ArrayKind::Ladder,
            a_y,
            d_y: 0.0,
            eta: Vec3::new(eta_norm, 0.0, 0.0),
            c6,
        };
        g.check()?;
        Ok(g)
    }

    pub fn square(eta_norm: f64, theta: f64, d_y: f64, a_y: f64, c6: f64) -> Result<Self> {
        let g = Self {
            kind: ArrayKind::Square,
            a_y,
            d_y,
            eta: Vec3::new(eta_norm * theta.cos(), 0.0, eta_norm * theta.sin()),
            c6,
        };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if !(self.eta.norm() > 0.0) {
            return Err(Error::InvalidParameter("|eta| must be positive".into()));
        }
        if !(self.a_y > 0.0) {
            return Err(Error::InvalidParameter("a_y must be positive".into()));
        }
        if self.d_y < 0.0 {
            return Err(Error::InvalidParameter("d_y must be non-negative".into()));
        }
        if self.eta.y != 0.0 {
            return Err(Error::InvalidParameter("eta must lie in the xz-plane".into()));
        }
        Ok(())
    }

    pub fn eta_norm(&self) -> f64 {
        self.eta.norm()
    }

    /// In-plane angle of `η` measured from x towards z.
    pub fn theta(&self) -> f64 {
        self.eta.z.atan2(self.eta.x)
    }

    /// Centre of the pair sitting on lattice site `(x, y)`.
    pub fn position(&self, x: i64, y: i64) -> Vec3 {
        let shift = if (x + y).rem_euclid(2) == 1 { self.d_y } else { 0.0 };
        Vec3::new(x as f64, y as f64 * self.a_y + shift, 0.0)
    }

    /// Separation `p - p'` between the pair at `from` and the pair at
    /// `from + offset`, i.e. the argument of `A(p - p', η)` seen from `from`.
    pub fn separation(&self, from: (i64, i64), offset: (i64, i64)) -> Vec3 {
        let p = self.position(from.0, from.1);
        let q = self.position(from.0 + offset.0, from.1 + offset.1);
        p - q
    }

    /// Ladder geometries store the rung partner at `+ŷ` for both legs.
    fn ladder_separation(&self, leg: i64, offset: (i64, i64)) -> Vec3 {
        let dy = if offset.1 == 0 {
            0.0
        } else if leg == 0 {
            -self.a_y
        } else {
            self.a_y
        };
        Vec3::new(-(offset.0 as f64), dy, 0.0)
    }
}

/// One entry of the neighbour coupling table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    /// Sublattice (checkerboard parity for square arrays, leg for ladders)
    /// of the reference spin.
    pub sublattice: u8,
    /// Neighbour order: 1 for nearest neighbours, 2 for diagonals.
    pub shell: u8,
    /// Lattice offset of the neighbour relative to the reference spin.
    pub offset: (i64, i64),
    /// Separation `p - p'` in units of `a_x`.
    pub separation: Vec3,
    pub a: f64,
    pub b: f64,
}

/// Lattice offsets of the `shell`-neighbours of a spin. Ladder rungs are
/// listed once: the physical array is a two-leg ladder.
pub fn neighbor_offsets(kind: ArrayKind, shell: u8) -> &'static [(i64, i64)] {
    match (kind, shell) {
        (ArrayKind::Ladder, 1) => &[(1, 0), (-1, 0), (0, 1)],
        (ArrayKind::Ladder, 2) => &[(1, 1), (-1, 1)],
        (ArrayKind::Square, 1) => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
        (ArrayKind::Square, 2) => &[(1, 1), (-1, 1), (-1, -1), (1, -1)],
        _ => &[],
    }
}

/// A and B values for all neighbours up to order `k_max` of every
/// inequivalent reference spin.
pub fn coupling_table(geom: &PairArrayGeometry, k_max: u8) -> Result<Vec<CouplingEntry>> {
    coupling_table_with(geom, k_max, &GeometryOptions::default())
}

pub fn coupling_table_with(geom: &PairArrayGeometry, k_max: u8, opts: &GeometryOptions) -> Result<Vec<CouplingEntry>> {
    if !(1..=2).contains(&k_max) {
        return Err(Error::InvalidParameter(format!(
            "neighbour order must be 1 or 2, got {k_max}"
        )));
    }
    let mut table = Vec::new();
    for sub in 0..2u8 {
        for shell in 1..=k_max {
            for &off in neighbor_offsets(geom.kind, shell) {
                let sep = match geom.kind {
                    ArrayKind::Ladder => geom.ladder_separation(sub as i64, off),
                    ArrayKind::Square => geom.separation((sub as i64, 0), off),
                };
                table.push(CouplingEntry {
                    sublattice: sub,
                    shell,
                    offset: off,
                    separation: sep,
                    a: ising_coupling_a_with(sep, geom.eta, geom.c6, opts)?,
                    b: onsite_coefficient_b_with(sep, geom.eta, geom.c6, opts)?,
                });
            }
        }
    }
    Ok(table)
}

/// Result of a blockade geometry solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockadeSolution {
    pub kind: ArrayKind,
    pub eta: f64,
    pub theta: f64,
    pub d_y: f64,
    pub a_y: f64,
    #[serde(rename = "G")]
    pub gap: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub c6: f64,
    pub couplings: Vec<CouplingEntry>,
}

impl BlockadeSolution {
    pub fn geometry(&self) -> PairArrayGeometry {
        PairArrayGeometry {
            kind: self.kind,
            a_y: self.a_y,
            d_y: self.d_y,
            eta: Vec3::new(self.eta * self.theta.cos(), 0.0, self.eta * self.theta.sin()),
            c6: self.c6,
        }
    }

    /// Nearest-neighbour couplings of the sublattice-0 reference spin.
    pub fn nearest_couplings(&self) -> Vec<f64> {
        self.couplings
            .iter()
            .filter(|c| c.sublattice == 0 && c.shell == 1)
            .map(|c| c.a)
            .collect()
    }
}

fn bisect<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs() {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Rung length that makes the three nearest-neighbour couplings of a ladder
/// sum to zero, `2A(x̂, η) = -A(a_y ŷ, η)`, with `η = |η| x̂`.
pub fn solve_ladder_geometry(eta_norm: f64, c6: f64) -> Result<BlockadeSolution> {
    solve_ladder_geometry_with(eta_norm, c6, &GeometryOptions::default())
}

pub fn solve_ladder_geometry_with(eta_norm: f64, c6: f64, opts: &GeometryOptions) -> Result<BlockadeSolution> {
    if !(eta_norm > 0.0 && eta_norm < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "ladder requires 0 < |eta| < 0.5, got {eta_norm}"
        )));
    }
    let eta = Vec3::new(eta_norm, 0.0, 0.0);
    let a_leg = ising_coupling_a_with(Vec3::new(1.0, 0.0, 0.0), eta, c6, opts)?;
    let objective =
        |a_y: f64| -> Result<f64> { Ok(2.0 * a_leg + ising_coupling_a_with(Vec3::new(0.0, a_y, 0.0), eta, c6, opts)?) };
    let a_y = bisect(objective, eta_norm + opts.min_separation, 1.0, opts.root_rel_tol)?;
    let geom = PairArrayGeometry::ladder(eta_norm, a_y, c6)?;
    let couplings = coupling_table_with(&geom, 2, opts)?;
    let diagonal = ising_coupling_a_with(Vec3::new(1.0, a_y, 0.0), eta, c6, opts)?;
    Ok(BlockadeSolution {
        kind: ArrayKind::Ladder,
        eta: eta_norm,
        theta: 0.0,
        d_y: 0.0,
        a_y,
        gap: -a_leg,
        lambda: 0.5 * diagonal,
        c6,
        couplings,
    })
}

/// Mean rung spacing of the sublattice-shifted square array for which the
/// four nearest-neighbour couplings cancel,
/// `-2A(x̂ + d_y ŷ, η) = A((a_y - d_y) ŷ, η) + A((a_y + d_y) ŷ, η)`.
pub fn solve_square_geometry(eta_norm: f64, theta: f64, d_y: f64, c6: f64) -> Result<BlockadeSolution> {
    solve_square_geometry_with(eta_norm, theta, d_y, c6, &GeometryOptions::default())
}

pub fn solve_square_geometry_with(
    eta_norm: f64,
    theta: f64,
    d_y: f64,
    c6: f64,
    opts: &GeometryOptions,
) -> Result<BlockadeSolution> {
    if !(eta_norm > 0.0) || d_y < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "square geometry requires |eta| > 0 and d_y >= 0 (got {eta_norm}, {d_y})"
        )));
    }
    let eta = Vec3::new(eta_norm * theta.cos(), 0.0, eta_norm * theta.sin());
    let a_side = ising_coupling_a_with(Vec3::new(1.0, d_y, 0.0), eta, c6, opts)?;
    let vertical = |a: f64| ising_coupling_a_with(Vec3::new(0.0, a, 0.0), eta, c6, opts);
    let objective = |a_y: f64| -> Result<f64> { Ok(2.0 * a_side + vertical(a_y - d_y)? + vertical(a_y + d_y)?) };
    let lo = eta_norm.max(d_y) + opts.min_separation;
    let a_y = bisect(objective, lo, 1.0, opts.root_rel_tol)?;

    let far = vertical(a_y + d_y)?;
    let near = vertical(a_y - d_y)?;
    let gap = far.min(0.5 * (near - far));

    let geom = PairArrayGeometry::square(eta_norm, theta, d_y, a_y, c6)?;
    let couplings = coupling_table_with(&geom, 2, opts)?;
    let nn: Vec<f64> = couplings
        .iter()
        .filter(|c| c.sublattice == 0 && c.shell == 1)
        .map(|c| c.a)
        .collect();
    validate_generalized_blockade_with(&nn, opts.degeneracy_eps)?;

    let diagonal = ising_coupling_a_with(Vec3::new(1.0, a_y, 0.0), eta, c6, opts)?;
    Ok(BlockadeSolution {
        kind: ArrayKind::Square,
        eta: eta_norm,
        theta,
        d_y,
        a_y,
        gap,
        lambda: diagonal,
        c6,
        couplings,
    })
}

/// Smallest `|Σ A|` over all nonempty proper subsets of the neighbour
/// couplings. This is the energy cost of the cheapest single-spin flip out of
/// a non-flippable neighbourhood.
pub fn validate_generalized_blockade(couplings: &[f64]) -> Result<f64> {
    validate_generalized_blockade_with(couplings, GeometryOptions::default().degeneracy_eps)
}

pub fn validate_generalized_blockade_with(couplings: &[f64], eps: f64) -> Result<f64> {
    let n = couplings.len();
    if n == 0 || n > 16 {
        return Err(Error::InvalidParameter(format!(
            "expected between 1 and 16 couplings, got {n}"
        )));
    }
    let scale = couplings.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let full = (1u32 << n) - 1;
    let mut gap = f64::INFINITY;
    for subset in 1..full {
        let sum: f64 = (0..n).filter(|i| subset >> i & 1 == 1).map(|i| couplings[i]).sum();
        if sum.abs() <= eps * scale {
            return Err(Error::BlockadeDegeneracy {
                subset: (0..n).filter(|i| subset >> i & 1 == 1).collect(),
                sum,
            });
        }
        gap = gap.min(sum.abs());
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Vec3 {
        Vec3::new(1.0, 0.0, 0.0)
    }

    // Direct evaluation of 1/|r|^6 sums, written independently of `inv6`.
    fn brute_a(sep: [f64; 3], eta: [f64; 3]) -> f64 {
        let d = |s: f64| {
            let v: Vec<f64> = (0..3).map(|i| sep[i] + s * eta[i]).collect();
            (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).powf(-3.0)
        };
        2.0 * d(0.0) - d(1.0) - d(-1.0)
    }

    #[test]
    fn a_vanishes_without_displacement() {
        assert_eq!(ising_coupling_a(x(), Vec3::default(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn a_leg_coupling_value() {
        let a = ising_coupling_a(x(), x() * 0.38, 1.0).unwrap();
        let expected = 2.0 - 1.38f64.powi(-6) - 0.62f64.powi(-6);
        assert!((a - expected).abs() < 1e-12);
        assert!((a + 15.75).abs() < 0.01, "{a}");
        assert!((a - brute_a([1.0, 0.0, 0.0], [0.38, 0.0, 0.0])).abs() < 1e-10);
    }

    #[test]
    fn diagonal_coupling_gives_lambda() {
        let a = ising_coupling_a(Vec3::new(1.0, 0.588, 0.0), x() * 0.38, 1.0).unwrap();
        assert!((a / 2.0 + 0.918).abs() < 0.005, "{}", a / 2.0);
    }

    #[test]
    fn b_values() {
        let perp = onsite_coefficient_b(Vec3::new(0.0, 0.7, 0.0), x() * 0.38, 1.0).unwrap();
        assert_eq!(perp, 0.0);
        let b = onsite_coefficient_b(x(), x() * 0.38, 1.0).unwrap();
        assert!((b - (1.38f64.powi(-6) - 0.62f64.powi(-6))).abs() < 1e-12);
        assert!((b + 17.46).abs() < 0.01, "{b}");
    }

    #[test]
    fn b_cancels_over_square_neighbours() {
        let sol = solve_square_geometry(0.5, 0.85, 0.07, 1.0).unwrap();
        for sub in 0..2 {
            let sum: f64 = sol
                .couplings
                .iter()
                .filter(|c| c.sublattice == sub && c.shell == 1)
                .map(|c| c.b)
                .sum();
            assert!(sum.abs() < 1e-12, "{sum}");
        }
    }

    #[test]
    fn collisions_are_rejected() {
        let err = ising_coupling_a(x() * 0.4, x() * 0.38, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry { .. }));
        let err = onsite_coefficient_b(x() * 0.39, x() * 0.38, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry { .. }));
    }

    #[test]
    fn effective_rabi_values() {
        let drive = DriveParams {
            omega: 0.0,
            detuning: -10.0,
            offset: 0.0,
        };
        assert_eq!(effective_rabi(&drive, 0.38, 1.0).unwrap(), 0.0);

        let drive = DriveParams {
            omega: 1.0,
            detuning: -10.0,
            offset: 0.0,
        };
        let j = effective_rabi(&drive, 0.38, 1.0).unwrap();
        assert!((j + 0.0971).abs() < 5e-5, "{j}");

        let j = effective_rabi(&drive, 1e-3, 1.0).unwrap();
        assert!((j + 0.1).abs() < 1e-12);

        let drive = DriveParams {
            omega: 1.0,
            detuning: 0.0,
            offset: 0.0,
        };
        assert!(effective_rabi(&drive, 0.38, 1.0).is_err());
        // C6 = Δ|η|^6 with Δ = 1, |η| = 1.
        let drive = DriveParams {
            omega: 1.0,
            detuning: 1.0,
            offset: 0.0,
        };
        assert!(matches!(effective_rabi(&drive, 1.0, 1.0), Err(Error::RabiPole)));
    }

    #[test]
    fn regime_flag() {
        let drive = DriveParams {
            omega: 1.0,
            detuning: -10.0,
            offset: 0.0,
        };
        assert!(drive.regime_valid(0.38, 1.0, 5.0));
        assert!(!drive.regime_valid(0.38, 1.0, 20.0));
        let red = DriveParams {
            detuning: 10.0,
            ..drive
        };
        assert!(!red.regime_valid(0.38, 1.0, 1.0));
    }

    #[test]
    fn ladder_defining_relation() {
        let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
        let eta = x() * 0.38;
        let leg = ising_coupling_a(x(), eta, 1.0).unwrap();
        let rung = ising_coupling_a(Vec3::new(0.0, sol.a_y, 0.0), eta, 1.0).unwrap();
        assert!((2.0 * leg + rung).abs() < 1e-9 * sol.gap);
        let nn = sol.nearest_couplings();
        assert_eq!(nn.len(), 3);
        assert!((validate_generalized_blockade(&nn).unwrap() - sol.gap).abs() < 1e-8);
    }

    #[test]
    fn ladder_table_offsets() {
        let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
        let first: Vec<_> = sol
            .couplings
            .iter()
            .filter(|c| c.sublattice == 0 && c.shell == 1)
            .collect();
        let offsets: Vec<_> = first.iter().map(|c| c.offset).collect();
        assert_eq!(offsets, vec![(1, 0), (-1, 0), (0, 1)]);
        let bsum: f64 = first.iter().map(|c| c.b).sum();
        assert!(bsum.abs() < 1e-12);
        assert_eq!(first[2].b, 0.0);
        for c in sol.couplings.iter().filter(|c| c.shell == 2) {
            assert!((c.a - 2.0 * sol.lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn table_is_symmetric_under_negation() {
        let sol = solve_square_geometry(0.5, 0.85, 0.07, 1.0).unwrap();
        let geom = sol.geometry();
        for c in &sol.couplings {
            let back = ising_coupling_a(-c.separation, geom.eta, 1.0).unwrap();
            assert!((back - c.a).abs() < 1e-12 * c.a.abs().max(1.0));
            let flipped = ising_coupling_a(c.separation, -geom.eta, 1.0).unwrap();
            assert!((flipped - c.a).abs() < 1e-12 * c.a.abs().max(1.0));
            let bneg = onsite_coefficient_b(-c.separation, geom.eta, 1.0).unwrap();
            assert!((bneg + c.b).abs() < 1e-12 * c.b.abs().max(1.0));
        }
    }

    #[test]
    fn blockade_validation() {
        let err = validate_generalized_blockade(&[1.0, 1.0, -1.0, -1.0]).unwrap_err();
        match err {
            Error::BlockadeDegeneracy { subset, .. } => assert_eq!(subset.len(), 2),
            e => panic!("unexpected {e:?}"),
        }
        let g = validate_generalized_blockade(&[-3.0, -3.0, 6.0]).unwrap();
        assert!((g - 3.0).abs() < 1e-15);
        assert!(validate_generalized_blockade(&[]).is_err());
    }

    #[test]
    fn square_without_shift_is_degenerate() {
        let err = solve_square_geometry(0.5, 0.85, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::BlockadeDegeneracy { .. }), "{err:?}");
    }

    #[test]
    fn ladder_bracket_without_root() {
        assert!(solve_ladder_geometry(0.6, 1.0).is_err());
    }

    #[test]
    fn k_max_range() {
        let g = PairArrayGeometry::ladder(0.38, 0.59, 1.0).unwrap();
        assert!(coupling_table(&g, 3).is_err());
        assert_eq!(coupling_table(&g, 1).unwrap().len(), 6);
    }

    #[test]
    fn json_record_field_names() {
        let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
        let v = serde_json::to_value(&sol).unwrap();
        for key in ["eta", "theta", "d_y", "a_y", "G", "Lambda", "couplings"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
