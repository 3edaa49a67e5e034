//! Constrained bases: the sector reachable from a reference state, or the
//! full tensor-product space.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::dual::DualConfig;
use super::lattice::{LatticeSpec, NeighborTable};
use super::links::{apply_plaquette, LinkConfig, LinkLayout};
use crate::error::{Error, Result};

/// Default cap on enumerated sector sizes.
pub const DEFAULT_DIM_CAP: usize = 1 << 26;

/// Largest full space built explicitly.
pub const FULL_SPACE_MAX_SPINS: usize = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    /// Dual spin configurations reachable from the reference.
    Dual,
    /// Link configurations reachable from the reference.
    Link,
    /// All `2^N` dual spin configurations.
    Full,
}

impl BasisKind {
    pub(crate) fn code(self) -> u8 {
        match self {
            BasisKind::Dual => 0,
            BasisKind::Link => 1,
            BasisKind::Full => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(BasisKind::Dual),
            1 => Some(BasisKind::Link),
            2 => Some(BasisKind::Full),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Lookup {
    Identity,
    Map(HashMap<u64, usize>),
}

/// Ordered list of configurations with a config → index lookup. The reference
/// state is always at index 0 for enumerated sectors.
#[derive(Clone, Debug)]
pub struct Basis {
    spec: LatticeSpec,
    kind: BasisKind,
    states: Vec<u64>,
    lookup: Lookup,
}

impl Basis {
    /// All `2^N` dual configurations in numerical order.
    pub fn full(spec: LatticeSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_spins();
        if n > FULL_SPACE_MAX_SPINS {
            return Err(Error::DimensionCap {
                dim: usize::MAX,
                cap: 1 << FULL_SPACE_MAX_SPINS,
            });
        }
        Ok(Self {
            spec,
            kind: BasisKind::Full,
            states: (0..1u64 << n).collect(),
            lookup: Lookup::Identity,
        })
    }

    /// Basis from an explicit list of distinct states, in the given order.
    pub fn from_states(spec: LatticeSpec, kind: BasisKind, states: Vec<u64>) -> Result<Self> {
        if kind == BasisKind::Full {
            let full = Self::full(spec)?;
            if states != full.states {
                return Err(Error::BasisMismatch("full basis must list 0..2^N in order".into()));
            }
            return Ok(full);
        }
        let mut map = HashMap::with_capacity(states.len());
        for (i, &s) in states.iter().enumerate() {
            if map.insert(s, i).is_some() {
                return Err(Error::BasisMismatch(format!("duplicate state {s:#x}")));
            }
        }
        Ok(Self {
            spec,
            kind,
            states,
            lookup: Lookup::Map(map),
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> u64 {
        self.states[i]
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index_of(&self, c: u64) -> Option<usize> {
        match &self.lookup {
            Lookup::Identity => ((c as usize) < self.states.len()).then_some(c as usize),
            Lookup::Map(m) => m.get(&c).copied(),
        }
    }

    pub fn contains(&self, c: u64) -> bool {
        self.index_of(c).is_some()
    }

    /// True for bases whose configurations are dual spins.
    pub fn is_dual(&self) -> bool {
        self.kind != BasisKind::Link
    }
}

fn bfs<F>(reference: u64, n_moves: usize, cap: usize, step: F) -> Result<Vec<u64>>
where
    F: Fn(u64, usize) -> Option<u64>,
{
    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut order = vec![reference];
    seen.insert(reference, ());
    let mut queue = VecDeque::from([reference]);
    while let Some(c) = queue.pop_front() {
        for p in 0..n_moves {
            if let Some(next) = step(c, p) {
                if seen.insert(next, ()).is_none() {
                    if order.len() >= cap {
                        return Err(Error::DimensionCap {
                            dim: order.len() + 1,
                            cap,
                        });
                    }
                    order.push(next);
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(order)
}

/// Breadth-first closure of `reference` under the dual plaquette flips.
/// States appear in discovery order, neighbours of a state in increasing
/// plaquette index.
pub fn enumerate_sector(spec: LatticeSpec, reference: DualConfig) -> Result<Basis> {
    enumerate_sector_with_cap(spec, reference, DEFAULT_DIM_CAP)
}

pub fn enumerate_sector_with_cap(spec: LatticeSpec, reference: DualConfig, cap: usize) -> Result<Basis> {
    spec.validate()?;
    if reference.0 & !spec.full_mask() != 0 {
        return Err(Error::InvalidParameter(
            "reference sets bits outside the lattice".into(),
        ));
    }
    let table = NeighborTable::new(spec);
    let states = bfs(reference.0, spec.n_spins(), cap, |d, p| {
        table.flippable(d, p).then_some(d ^ (1 << p))
    })?;
    Basis::from_states(spec, BasisKind::Dual, states)
}

/// Breadth-first closure of a link configuration under the plaquette term.
pub fn enumerate_link_sector(layout: &LinkLayout, reference: LinkConfig, cap: usize) -> Result<Basis> {
    let states = bfs(reference.0, layout.spec.n_spins(), cap, |c, p| {
        apply_plaquette(layout, LinkConfig(c), p).map(|x| x.0)
    })?;
    Basis::from_states(layout.spec, BasisKind::Link, states)
}
