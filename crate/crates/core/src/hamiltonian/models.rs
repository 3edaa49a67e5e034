//! Model Hamiltonians in the dual and link bases.
//!
//! `S^z` eigenvalues are `±1/2` throughout. Constant energy offsets are
//! dropped, so absolute energies are only comparable within one builder.

use serde::{Deserialize, Serialize};

use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::gauge::{
    apply_plaquette, enumerate_sector, Basis, BasisKind, DualConfig, LatticeKind, LatticeSpec, LinkConfig, LinkLayout,
    Neighbor, NeighborTable,
};
use crate::geometry::{ArrayKind, BlockadeSolution};

fn require_dual(basis: &Basis, what: &str) -> Result<()> {
    if !basis.is_dual() {
        return Err(Error::BasisMismatch(format!("{what} needs a dual-spin basis")));
    }
    Ok(())
}

fn lookup(basis: &Basis, c: u64) -> Result<usize> {
    basis
        .index_of(c)
        .ok_or_else(|| Error::BasisMismatch(format!("state {c:#x} is not in the basis")))
}

fn collect_rows<F>(basis: &Basis, model: &str, row: F) -> Result<SparseOperator>
where
    F: Fn(u64, &mut Vec<(u64, f64)>) -> f64 + Sync,
{
    SparseOperator::try_from_row_fn(basis.dim(), model, |i, out| {
        let mut moves = Vec::new();
        let diag = row(basis.state(i), &mut moves);
        out.push((i, diag));
        for (c, v) in moves {
            out.push((lookup(basis, c)?, v));
        }
        Ok(())
    })
}

/// Original RK Hamiltonian on link configurations,
/// `H = -J Σ_p [(S_p + S_p†) - λ (S_p + S_p†)^2]`.
pub fn build_original_rk(basis: &Basis, layout: &LinkLayout, j: f64, lambda: f64) -> Result<SparseOperator> {
    if basis.kind() != BasisKind::Link || basis.spec() != &layout.spec {
        return Err(Error::BasisMismatch(
            "original RK needs a link basis of the same lattice".into(),
        ));
    }
    let n = layout.spec.n_spins();
    collect_rows(basis, "original-rk", |c, moves| {
        let mut diag = 0.0;
        for p in 0..n {
            if let Some(f) = apply_plaquette(layout, LinkConfig(c), p) {
                diag += j * lambda;
                moves.push((f.0, -j));
            }
        }
        diag
    })
}

/// Dual RK Hamiltonian `H = -J Σ_p (P^{↑…↑} + P^{↓…↓})(2 S^x_p - λ)`; chains
/// keep only the all-up projector.
pub fn build_dual_rk(basis: &Basis, j: f64, lambda: f64) -> Result<SparseOperator> {
    require_dual(basis, "dual RK")?;
    let spec = *basis.spec();
    let table = NeighborTable::new(spec);
    collect_rows(basis, "dual-rk", |d, moves| {
        let mut diag = 0.0;
        for p in 0..spec.n_spins() {
            if table.flippable(d, p) {
                diag += j * lambda;
                moves.push((d ^ (1 << p), -j));
            }
        }
        diag
    })
}

/// Blockade chain `H = J Σ_p P↑_{p-1} P↑_{p+1} (-2 S^x_p + λ)` on the sector
/// without neighbouring down spins (open ends count as up).
pub fn build_pxp_chain(n: usize, j: f64, lambda: f64) -> Result<(Basis, SparseOperator)> {
    let spec = LatticeSpec::chain(n)?;
    let basis = enumerate_sector(spec, DualConfig::all_up(&spec))?;
    let op = build_dual_rk(&basis, j, lambda)?.with_model("pxp-chain");
    Ok((basis, op))
}

/// `Σ_p (P^{same} - P^{alternating})`, the potential generated by the
/// next-nearest-neighbour couplings.
pub fn rk_potential(table: &NeighborTable, d: u64) -> f64 {
    (0..table.spec.n_spins())
        .map(|p| {
            let same = table.all_up(d, p) || table.all_down(d, p);
            let alt = table.alternating(d, p);
            same as i32 as f64 - alt as i32 as f64
        })
        .sum()
}

/// Rydberg RK Hamiltonian `H = -2J Σ_p (P^{↑…↑} + P^{↓…↓}) S^x_p + V2`,
/// `V2 = Λ Σ_p (P^{↑…↑} + P^{↓…↓} - P^{↑↓…} - P^{↓↑…})`, with neighbours
/// taken anticlockwise. Works on a sector or on the full space.
pub fn build_rydberg_rk(basis: &Basis, j: f64, big_lambda: f64) -> Result<SparseOperator> {
    require_dual(basis, "Rydberg RK")?;
    let spec = *basis.spec();
    if spec.kind == LatticeKind::Chain {
        return Err(Error::InvalidLattice(
            "the Rydberg RK model is defined on ladders and squares".into(),
        ));
    }
    let table = NeighborTable::new(spec);
    collect_rows(basis, "rydberg-rk", |d, moves| {
        for p in 0..spec.n_spins() {
            if table.flippable(d, p) {
                moves.push((d ^ (1 << p), -j));
            }
        }
        big_lambda * rk_potential(&table, d)
    })
}

/// Restriction of a dual operator that commutes with the global spin flip
/// to the flip-even subspace, in the basis `(|d> + |d̄>)/√2` with `d < d̄`.
/// Returns the representatives in basis order and the block. On periodic
/// ladders this block is the link-basis Hamiltonian.
pub fn flip_even_block(op: &SparseOperator, basis: &Basis) -> Result<(Vec<u64>, SparseOperator)> {
    require_dual(basis, "flip-even block")?;
    if op.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: op.dim(),
        });
    }
    let full = basis.spec().full_mask();
    let mut reps = Vec::with_capacity(basis.dim() / 2);
    for &d in basis.states() {
        if basis.index_of(d ^ full).is_none() {
            return Err(Error::BasisMismatch("basis is not closed under the global flip".into()));
        }
        if d < d ^ full {
            reps.push(d);
        }
    }
    let slot: std::collections::HashMap<u64, usize> = reps.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let rep_index = |d: u64| slot[&d.min(d ^ full)];
    let block = SparseOperator::try_from_row_fn(reps.len(), format!("{}-even", op.model()), |i, out| {
        let row = lookup(basis, reps[i])?;
        for (j, h) in op.row(row) {
            out.push((rep_index(basis.state(j)), h));
        }
        Ok(())
    })?;
    Ok((reps, block))
}

/// How the pair sum of the Ising terms is counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCounting {
    /// `Σ_p S_p Σ_{p'} [A S_{p'} + B]` taken literally: every pair of
    /// dynamical spins appears twice. The RK potential coefficients
    /// `Λ = A_diag / 2` (ladder) and `Λ = A_diag` (square) hold in this form.
    #[default]
    Ordered,
    /// Every pair once, as produced by the van der Waals energy of the atoms.
    Unordered,
}

/// Diagonal and transverse parts of the full pair-spin model
/// `Σ_p (-2J S^x_p + δ S^z_p) + V1 + V2` on all `2^N` configurations.
#[derive(Clone, Debug)]
pub struct EffectiveSpinModel {
    pub basis: Basis,
    /// `δ Σ S^z + V1 + V2` per configuration.
    pub diagonal: Vec<f64>,
    /// `-2 Σ_p S^x_p` (the transverse term at `J = 1`).
    pub transverse: SparseOperator,
}

impl EffectiveSpinModel {
    pub fn operator(&self, j: f64) -> Result<SparseOperator> {
        Ok(self
            .transverse
            .scaled(j)
            .add_diagonal(&self.diagonal)?
            .with_model("effective-spin"))
    }
}

fn geometry_kind(spec: &LatticeSpec) -> Result<ArrayKind> {
    match spec.kind {
        LatticeKind::PeriodicLadder => Ok(ArrayKind::Ladder),
        LatticeKind::OpenSquare => Ok(ArrayKind::Square),
        LatticeKind::Chain => Err(Error::InvalidLattice("no pair-array geometry for chains".into())),
    }
}

/// Ising energy `δ Σ S^z + V1 + V2` of one configuration, from the raw
/// coupling table (no projector shortcut). Frozen boundary spins of open
/// lattices are up and keep their bare couplings.
pub fn effective_diagonal(
    spec: &LatticeSpec,
    solution: &BlockadeSolution,
    delta: f64,
    counting: PairCounting,
    d: u64,
) -> f64 {
    let sigma = |nb: Neighbor| match nb {
        Neighbor::Spin(i) => {
            if d >> i & 1 == 1 {
                0.5
            } else {
                -0.5
            }
        }
        Neighbor::FixedUp => 0.5,
    };
    let mut e = 0.0;
    for p in 0..spec.n_spins() {
        let (x, y) = spec.coords(p);
        let sub = match spec.kind {
            LatticeKind::PeriodicLadder => y % 2,
            _ => (x + y) % 2,
        } as u8;
        let sp = sigma(Neighbor::Spin(p));
        let mut field = delta;
        for c in solution.couplings.iter().filter(|c| c.sublattice == sub) {
            let nb = spec.neighbor_at(x as i64 + c.offset.0, y as i64 + c.offset.1);
            let (fa, fb) = match (counting, nb) {
                (PairCounting::Ordered, _) => (1.0, 1.0),
                (PairCounting::Unordered, Neighbor::Spin(_)) => (0.5, 0.5),
                (PairCounting::Unordered, Neighbor::FixedUp) => (1.0, 0.5),
            };
            field += fa * c.a * sigma(nb) + fb * c.b;
        }
        e += sp * field;
    }
    e
}

/// Full pair-spin model over `2^N` states. The blockade is not imposed; it
/// emerges from the couplings of `solution`.
pub fn build_effective_spin_model(
    spec: LatticeSpec,
    solution: &BlockadeSolution,
    delta: f64,
    counting: PairCounting,
) -> Result<EffectiveSpinModel> {
    let kind = geometry_kind(&spec)?;
    if kind != solution.kind {
        return Err(Error::BasisMismatch(format!(
            "{:?} geometry does not fit a {} lattice",
            solution.kind,
            spec.kind.name()
        )));
    }
    let basis = Basis::full(spec)?;
    let n = spec.n_spins();
    let diagonal: Vec<f64> = basis
        .states()
        .iter()
        .map(|&d| effective_diagonal(&spec, solution, delta, counting, d))
        .collect();
    let transverse = SparseOperator::from_row_fn(basis.dim(), "transverse", |i, out| {
        for p in 0..n {
            out.push((i ^ (1 << p), -1.0));
        }
    });
    Ok(EffectiveSpinModel {
        basis,
        diagonal,
        transverse,
    })
}

pub fn build_effective_spin(
    spec: LatticeSpec,
    solution: &BlockadeSolution,
    j: f64,
    delta: f64,
) -> Result<(Basis, SparseOperator)> {
    let model = build_effective_spin_model(spec, solution, delta, PairCounting::Ordered)?;
    let op = model.operator(j)?;
    Ok((model.basis, op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::enumerate_link_sector;
    use crate::geometry::{solve_ladder_geometry, solve_square_geometry};

    fn sector(spec: LatticeSpec) -> Basis {
        enumerate_sector(spec, DualConfig::all_up(&spec)).unwrap()
    }

    #[test]
    fn single_plaquette_block() {
        let spec = LatticeSpec::open_square(1, 1).unwrap();
        let op = build_dual_rk(&sector(spec), 1.0, 0.0).unwrap();
        assert_eq!(op.to_dense(), vec![0.0, -1.0, -1.0, 0.0]);
        let layout = LinkLayout::new(spec).unwrap();
        let lb = enumerate_link_sector(&layout, layout.omega(), 16).unwrap();
        let op = build_original_rk(&lb, &layout, 1.0, 0.0).unwrap();
        assert_eq!(op.to_dense(), vec![0.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn builders_are_symmetric() {
        let spec = LatticeSpec::open_square(3, 2).unwrap();
        let b = sector(spec);
        assert!(build_dual_rk(&b, 1.0, 0.3).unwrap().is_symmetric(1e-12));
        assert!(build_rydberg_rk(&b, 1.0, -0.4).unwrap().is_symmetric(1e-12));
        let full = Basis::full(spec).unwrap();
        assert!(build_rydberg_rk(&full, 1.0, -0.4).unwrap().is_symmetric(1e-12));
    }

    #[test]
    fn basis_mismatch_detected() {
        let spec = LatticeSpec::open_square(2, 2).unwrap();
        let partial = Basis::from_states(spec, BasisKind::Dual, vec![spec.full_mask()]).unwrap();
        assert!(matches!(
            build_dual_rk(&partial, 1.0, 0.0),
            Err(Error::BasisMismatch(_))
        ));
        let layout = LinkLayout::new(spec).unwrap();
        assert!(build_original_rk(&sector(spec), &layout, 1.0, 0.0).is_err());
    }

    #[test]
    fn rydberg_kinetic_matches_dual_rk() {
        let spec = LatticeSpec::periodic_ladder(4).unwrap();
        let b = sector(spec);
        let rk = build_dual_rk(&b, 0.7, 0.0).unwrap();
        let ryd = build_rydberg_rk(&b, 0.7, 0.0).unwrap();
        assert_eq!(rk, ryd.with_model("dual-rk"));
    }

    #[test]
    fn pxp_two_sites() {
        let (b, op) = build_pxp_chain(2, 1.0, 0.0).unwrap();
        assert_eq!(b.dim(), 3);
        assert!(op.is_symmetric(0.0));
    }

    #[test]
    fn ladder_v2_equals_diagonal_ising() {
        // Ordered counting reproduces the projector potential exactly, up to
        // a constant: check on the full space with the rung and leg couplings
        // switched off.
        let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
        let mut only_diag = sol.clone();
        for c in only_diag.couplings.iter_mut() {
            if c.shell == 1 {
                c.a = 0.0;
                c.b = 0.0;
            }
        }
        let spec = LatticeSpec::periodic_ladder(6).unwrap();
        let table = NeighborTable::new(spec);
        let offset = effective_diagonal(&spec, &only_diag, 0.0, PairCounting::Ordered, spec.full_mask())
            - sol.lambda * rk_potential(&table, spec.full_mask());
        for d in [0u64, 0b1010_1100_0011, 0b0110_0101_1010, 0b1111_0000_1111] {
            let v2 = effective_diagonal(&spec, &only_diag, 0.0, PairCounting::Ordered, d);
            let rk = sol.lambda * rk_potential(&table, d);
            assert!((v2 - rk - offset).abs() < 1e-9, "{d:#b}");
        }
    }

    #[test]
    fn square_v2_equals_diagonal_ising() {
        let sol = solve_square_geometry(0.5, 0.85, 0.07, 1.0).unwrap();
        let mut only_diag = sol.clone();
        for c in only_diag.couplings.iter_mut() {
            if c.shell == 1 {
                c.a = 0.0;
                c.b = 0.0;
            }
            c.b = 0.0;
        }
        // single flips deep in the bulk, away from the frozen ring
        let spec = LatticeSpec::open_square(5, 5).unwrap();
        let table = NeighborTable::new(spec);
        let centre = spec.index(2, 2);
        for d in [
            spec.full_mask(),
            spec.full_mask() ^ (1 << spec.index(1, 1)) ^ (1 << spec.index(3, 2)),
        ] {
            let f = d ^ (1 << centre);
            let dv2 = effective_diagonal(&spec, &only_diag, 0.0, PairCounting::Ordered, f)
                - effective_diagonal(&spec, &only_diag, 0.0, PairCounting::Ordered, d);
            let drk = sol.lambda * (rk_potential(&table, f) - rk_potential(&table, d));
            assert!((dv2 - drk).abs() < 1e-9, "{dv2} vs {drk}");
        }
    }

    #[test]
    fn ladder_blockade_gap() {
        // At J = 0 with V2 and δ switched off, flipping a spin costs nothing
        // in a flippable environment and at least G otherwise (each pair
        // counted once).
        let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
        let mut nn = sol.clone();
        nn.couplings.retain(|c| c.shell == 1);
        let spec = LatticeSpec::periodic_ladder(4).unwrap();
        let table = NeighborTable::new(spec);
        let mut min_gap = f64::INFINITY;
        for d in 0..1u64 << spec.n_spins() {
            for p in 0..spec.n_spins() {
                let e0 = effective_diagonal(&spec, &nn, 0.0, PairCounting::Unordered, d);
                let e1 = effective_diagonal(&spec, &nn, 0.0, PairCounting::Unordered, d ^ (1 << p));
                if table.flippable(d, p) {
                    assert!((e1 - e0).abs() < 1e-9);
                } else {
                    min_gap = min_gap.min((e1 - e0).abs());
                }
            }
        }
        assert!((min_gap - sol.gap).abs() < 1e-9, "{min_gap} vs {}", sol.gap);
    }

    #[test]
    fn zero_rabi_is_diagonal() {
        let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
        let spec = LatticeSpec::periodic_ladder(4).unwrap();
        let (_, op) = build_effective_spin(spec, &sol, 0.0, 0.1).unwrap();
        assert!((0..op.dim()).all(|i| op.row(i).all(|(j, _)| j == i)));
    }

    #[test]
    fn ladder_links_are_flip_even() {
        let spec = LatticeSpec::periodic_ladder(4).unwrap();
        let dual = sector(spec);
        let layout = LinkLayout::new(spec).unwrap();
        let links = enumerate_link_sector(&layout, layout.omega(), 1 << 12).unwrap();
        let hd = build_dual_rk(&dual, 1.0, 0.3).unwrap();
        let (reps, even) = flip_even_block(&hd, &dual).unwrap();
        assert_eq!(reps.len(), links.dim());
        assert!(even.is_symmetric(1e-14));
        let a = crate::solver::dense_spectrum(&even).unwrap();
        let b = crate::solver::dense_spectrum(&build_original_rk(&links, &layout, 1.0, 0.3).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        let open = LatticeSpec::open_square(2, 2).unwrap();
        let b = sector(open);
        assert!(flip_even_block(&build_dual_rk(&b, 1.0, 0.0).unwrap(), &b).is_err());
    }
}
