//! Diagonal add-ons (penalty, pinning, detuning) and the atom-level
//! Rydberg Hamiltonian used to validate the pair-spin description.

use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::gauge::{Basis, LatticeKind, LatticeSpec, Neighbor};
use crate::geometry::{DriveParams, Vec3};

/// Energy penalty scales used for the constrained ground states.
pub const PENALTY_DEFAULTS: [f64; 2] = [5.0, 10.0];

/// Number of forbidden patterns in a dual configuration.
///
/// Square and ladder lattices test every 2x2 block `(p, p+x, p+y, p+x+y)`
/// (blocks touching the frozen ring included) for `s_p ≠ s_{p+x+y}` and
/// `s_{p+x} ≠ s_{p+y}`, the patterns whose link image breaks the Gauss law.
/// Chains count neighbouring down pairs.
pub fn penalty_violations(spec: &LatticeSpec, d: u64) -> usize {
    let up = |nb: Neighbor| match nb {
        Neighbor::Spin(i) => d >> i & 1 == 1,
        Neighbor::FixedUp => true,
    };
    let (nx, ny) = (spec.nx as i64, spec.ny as i64);
    match spec.kind {
        LatticeKind::Chain => (0..nx - 1)
            .filter(|&x| !up(spec.neighbor_at(x, 0)) && !up(spec.neighbor_at(x + 1, 0)))
            .count(),
        LatticeKind::PeriodicLadder | LatticeKind::OpenSquare => {
            let (lo, hi_x, hi_y) = if spec.kind == LatticeKind::OpenSquare {
                (-1, nx, ny)
            } else {
                (0, nx, ny)
            };
            let mut count = 0;
            for y in lo..hi_y {
                for x in lo..hi_x {
                    let a = up(spec.neighbor_at(x, y));
                    let b = up(spec.neighbor_at(x + 1, y));
                    let c = up(spec.neighbor_at(x, y + 1));
                    let e = up(spec.neighbor_at(x + 1, y + 1));
                    if a != e && b != c {
                        count += 1;
                    }
                }
            }
            count
        }
    }
}

fn check_basis(op: &SparseOperator, basis: &Basis) -> Result<()> {
    if op.dim() != basis.dim() || !basis.is_dual() {
        return Err(Error::BasisMismatch(format!(
            "operator of dimension {} does not act on this basis",
            op.dim()
        )));
    }
    Ok(())
}

/// `H + E Σ (forbidden patterns)`.
pub fn add_penalty(op: &SparseOperator, basis: &Basis, e: f64) -> Result<SparseOperator> {
    check_basis(op, basis)?;
    let spec = *basis.spec();
    let diag: Vec<f64> = basis
        .states()
        .iter()
        .map(|&d| e * penalty_violations(&spec, d) as f64)
        .collect();
    op.add_diagonal(&diag)
}

/// Default pinning sites `(1,1), (2,1), (2,2)` in one-based lattice
/// coordinates.
pub fn default_pinning_sites(spec: &LatticeSpec) -> Vec<usize> {
    let mut sites = vec![spec.index(0, 0)];
    if spec.nx > 1 {
        sites.push(spec.index(1, 0));
        if spec.ny > 1 {
            sites.push(spec.index(1, 1));
        }
    }
    sites
}

/// `H + δ̃ Σ_{s ∈ sites} S^z_s`.
pub fn add_pinning(op: &SparseOperator, basis: &Basis, field: f64, sites: &[usize]) -> Result<SparseOperator> {
    check_basis(op, basis)?;
    let n = basis.spec().n_spins();
    if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
        return Err(Error::InvalidParameter(format!(
            "pinning site {bad} outside the lattice"
        )));
    }
    if field == 0.0 {
        return Ok(op.clone());
    }
    let diag: Vec<f64> = basis
        .states()
        .iter()
        .map(|&d| {
            sites
                .iter()
                .map(|&s| if d >> s & 1 == 1 { 0.5 } else { -0.5 })
                .sum::<f64>()
                * field
        })
        .collect();
    op.add_diagonal(&diag)
}

/// `H + δ Σ_p S^z_p`.
pub fn add_detuning(op: &SparseOperator, basis: &Basis, delta: f64) -> Result<SparseOperator> {
    let all: Vec<usize> = (0..basis.spec().n_spins()).collect();
    add_pinning(op, basis, delta, &all)
}

/// Largest number of pairs accepted by [`build_atom_level`].
pub const ATOM_LEVEL_MAX_PAIRS: usize = 4;

/// Atom-level Hamiltonian
/// `Σ_I [-Ω σ^x_I + Δ n_I] + Σ_{I<J} C6 n_I n_J / |r_I - r_J|^6`
/// for pairs centred at `centers` with atoms at `p ± η/2`. Atom `2i` sits at
/// `p_i + η/2` (pseudo spin up) and carries an extra `+δ/2 n`, atom `2i+1`
/// carries `-δ/2 n`. Bit `I` of a basis index marks atom `I` in the Rydberg
/// state.
pub fn build_atom_level(centers: &[Vec3], eta: Vec3, c6: f64, drive: &DriveParams) -> Result<SparseOperator> {
    let n_pairs = centers.len();
    if n_pairs == 0 || n_pairs > ATOM_LEVEL_MAX_PAIRS {
        return Err(Error::DimensionCap {
            dim: n_pairs,
            cap: ATOM_LEVEL_MAX_PAIRS,
        });
    }
    let atoms: Vec<Vec3> = centers.iter().flat_map(|&p| [p + eta * 0.5, p - eta * 0.5]).collect();
    let n = atoms.len();
    let mut v = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let r = (atoms[a] - atoms[b]).norm();
            if r < 1e-9 {
                return Err(Error::DegenerateGeometry { distance: r, min: 1e-9 });
            }
            v[a * n + b] = c6 / r.powi(6);
        }
    }
    let onsite: Vec<f64> = (0..n)
        .map(|a| drive.detuning + if a % 2 == 0 { 0.5 } else { -0.5 } * drive.offset)
        .collect();
    Ok(SparseOperator::from_row_fn(1 << n, "atom-level", |s, out| {
        let mut diag = 0.0;
        for a in 0..n {
            if s >> a & 1 == 1 {
                diag += onsite[a];
                for b in a + 1..n {
                    if s >> b & 1 == 1 {
                        diag += v[a * n + b];
                    }
                }
            }
            out.push((s ^ (1 << a), -drive.omega));
        }
        out.push((s, diag));
    }))
}

/// Atom-level index of a pair-spin configuration (one Rydberg atom per pair).
pub fn pair_state_index(spins: u64, n_pairs: usize) -> usize {
    (0..n_pairs)
        .map(|i| {
            if spins >> i & 1 == 1 {
                1usize << (2 * i)
            } else {
                1usize << (2 * i + 1)
            }
        })
        .sum()
}
