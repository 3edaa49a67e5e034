//! Lattice descriptions shared by the link and dual pictures.
//!
//! Dual spins live on plaquettes and are indexed row-major with x fastest,
//! `p = x + nx * y`. For the open square lattice only the `nx * ny` interior
//! plaquettes are dynamical; the surrounding ring of dual spins is frozen up.
//! The corresponding site lattice has `(nx + 1) x (ny + 1)` sites and
//! plaquette `(x, y)` has its lower-left corner on site `(x, y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of dynamical spins that fits in a configuration word.
pub const MAX_SPINS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    /// Open chain of `nx` dual spins (the one-dimensional blockade model).
    Chain,
    /// `nx x 2` plaquettes, periodic in both directions.
    PeriodicLadder,
    /// `nx x ny` interior plaquettes of an open square lattice.
    OpenSquare,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Chain => "chain",
            LatticeKind::PeriodicLadder => "periodic-ladder",
            LatticeKind::OpenSquare => "open-square",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            LatticeKind::Chain => 0,
            LatticeKind::PeriodicLadder => 1,
            LatticeKind::OpenSquare => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(LatticeKind::Chain),
            1 => Some(LatticeKind::PeriodicLadder),
            2 => Some(LatticeKind::OpenSquare),
            _ => None,
        }
    }
}

/// A neighbouring dual spin: either dynamical or part of the frozen boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighbor {
    Spin(usize),
    FixedUp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub nx: usize,
    pub ny: usize,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, nx: usize, ny: usize) -> Result<Self> {
        let spec = Self { kind, nx, ny };
        spec.validate()?;
        Ok(spec)
    }

    pub fn chain(n: usize) -> Result<Self> {
        Self::new(LatticeKind::Chain, n, 1)
    }

    pub fn periodic_ladder(nx: usize) -> Result<Self> {
        Self::new(LatticeKind::PeriodicLadder, nx, 2)
    }

    pub fn open_square(nx: usize, ny: usize) -> Result<Self> {
        Self::new(LatticeKind::OpenSquare, nx, ny)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLattice(msg));
        match self.kind {
            LatticeKind::Chain => {
                if self.ny != 1 || self.nx < 2 {
                    return bad(format!("chain needs ny = 1 and nx >= 2, got {}x{}", self.nx, self.ny));
                }
            }
            LatticeKind::PeriodicLadder => {
                if self.ny != 2 {
                    return bad(format!("periodic ladder needs ny = 2, got {}", self.ny));
                }
                if self.nx < 2 || !self.nx.is_multiple_of(2) {
                    return bad(format!(
                        "periodic ladder needs an even nx >= 2 for a consistent checkerboard, got {}",
                        self.nx
                    ));
                }
            }
            LatticeKind::OpenSquare => {
                if self.nx < 1 || self.ny < 1 {
                    return bad(format!("open square needs nx, ny >= 1, got {}x{}", self.nx, self.ny));
                }
            }
        }
        if self.n_spins() > MAX_SPINS {
            return bad(format!("{} dual spins exceed the {MAX_SPINS}-bit word", self.n_spins()));
        }
        Ok(())
    }

    /// Number of dynamical dual spins.
    pub fn n_spins(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x + self.nx * y
    }

    pub fn coords(&self, p: usize) -> (usize, usize) {
        (p % self.nx, p / self.nx)
    }

    /// True for plaquettes with `(-1)^(x+y) = -1`.
    pub fn is_odd(&self, p: usize) -> bool {
        let (x, y) = self.coords(p);
        (x + y) % 2 == 1
    }

    /// Mask with one bit per dynamical spin, i.e. the all-up configuration.
    pub fn full_mask(&self) -> u64 {
        let n = self.n_spins();
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// Dual spin at `(x, y)` allowing coordinates one step outside the
    /// interior; wraps on periodic directions.
    pub fn neighbor_at(&self, x: i64, y: i64) -> Neighbor {
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        match self.kind {
            LatticeKind::PeriodicLadder => {
                Neighbor::Spin(self.index(x.rem_euclid(nx) as usize, y.rem_euclid(ny) as usize))
            }
            LatticeKind::Chain | LatticeKind::OpenSquare => {
                if (0..nx).contains(&x) && (0..ny).contains(&y) {
                    Neighbor::Spin(self.index(x as usize, y as usize))
                } else {
                    Neighbor::FixedUp
                }
            }
        }
    }

    /// Nearest dual neighbours in anticlockwise order starting at `+x`.
    /// Ladders list `+x, +y, -x` (`+y` and `-y` coincide), chains `+x, -x`.
    pub fn neighbors(&self, p: usize) -> Vec<Neighbor> {
        let (x, y) = self.coords(p);
        let (x, y) = (x as i64, y as i64);
        let offsets: &[(i64, i64)] = match self.kind {
            LatticeKind::Chain => &[(1, 0), (-1, 0)],
            LatticeKind::PeriodicLadder => &[(1, 0), (0, 1), (-1, 0)],
            LatticeKind::OpenSquare => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
        };
        offsets
            .iter()
            .map(|&(dx, dy)| self.neighbor_at(x + dx, y + dy))
            .collect()
    }

    /// Momentum grid of the dual lattice, `2 pi (i / nx, j / ny)`.
    pub fn momentum_grid(&self) -> Vec<(f64, f64)> {
        let tau = std::f64::consts::TAU;
        let mut ks = Vec::with_capacity(self.n_spins());
        for j in 0..self.ny {
            for i in 0..self.nx {
                ks.push((tau * i as f64 / self.nx as f64, tau * j as f64 / self.ny as f64));
            }
        }
        ks
    }
}

impl std::fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}x{}", self.kind.name(), self.nx, self.ny)
    }
}

/// Precomputed neighbour masks for the blockade test in hot loops.
#[derive(Clone, Debug)]
pub struct NeighborTable {
    pub spec: LatticeSpec,
    /// Ordered neighbours of every spin.
    pub ordered: Vec<Vec<Neighbor>>,
    /// Bitmask of the distinct dynamical neighbours.
    pub masks: Vec<u64>,
    /// Whether a frozen boundary spin is among the neighbours.
    pub touches_boundary: Vec<bool>,
}

impl NeighborTable {
    pub fn new(spec: LatticeSpec) -> Self {
        let n = spec.n_spins();
        let mut ordered = Vec::with_capacity(n);
        let mut masks = Vec::with_capacity(n);
        let mut touches_boundary = Vec::with_capacity(n);
        for p in 0..n {
            let nb = spec.neighbors(p);
            let mut mask = 0u64;
            let mut fixed = false;
            for q in &nb {
                match *q {
                    Neighbor::Spin(i) => mask |= 1 << i,
                    Neighbor::FixedUp => fixed = true,
                }
            }
            ordered.push(nb);
            masks.push(mask);
            touches_boundary.push(fixed);
        }
        Self {
            spec,
            ordered,
            masks,
            touches_boundary,
        }
    }

    pub fn all_up(&self, d: u64, p: usize) -> bool {
        d & self.masks[p] == self.masks[p]
    }

    pub fn all_down(&self, d: u64, p: usize) -> bool {
        d & self.masks[p] == 0 && !self.touches_boundary[p]
    }

    /// Generalized blockade: the neighbours of `p` are uniformly up or
    /// uniformly down. Chains only admit the uniformly-up projector.
    pub fn flippable(&self, d: u64, p: usize) -> bool {
        match self.spec.kind {
            LatticeKind::Chain => self.all_up(d, p),
            _ => self.all_up(d, p) || self.all_down(d, p),
        }
    }

    pub fn flippable_count(&self, d: u64) -> usize {
        (0..self.spec.n_spins()).filter(|&p| self.flippable(d, p)).count()
    }

    /// Neighbours in alternating order, e.g. up-down-up on a ladder.
    pub fn alternating(&self, d: u64, p: usize) -> bool {
        let nb = &self.ordered[p];
        let bit = |q: &Neighbor| match *q {
            Neighbor::Spin(i) => d >> i & 1 == 1,
            Neighbor::FixedUp => true,
        };
        let first = bit(&nb[0]);
        nb.iter().enumerate().all(|(i, q)| bit(q) == (first ^ (i % 2 == 1)))
    }
}
