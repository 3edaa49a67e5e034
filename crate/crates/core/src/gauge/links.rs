//! Electric link configurations, the Gauss law and the plaquette operator.
//!
//! Link values are handled as `e = 2 S^z = ±1`. Horizontal link `(x, y)` joins
//! site `(x, y)` to `(x + 1, y)` and is the bottom edge of plaquette `(x, y)`;
//! vertical link `(x, y)` joins `(x, y)` to `(x, y + 1)` and is its left edge.
//! Horizontal links are stored first, each family row-major with x fastest.
//!
//! On the open square lattice the sites along the edge have fewer than four
//! links. The missing ones sit between two frozen boundary plaquettes, so their
//! values are those of the reference state `Ω` and they enter the Gauss law as
//! constants.

use serde::{Deserialize, Serialize};

use super::lattice::{LatticeKind, LatticeSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    X,
    Y,
}

/// Electric basis state, one bit per stored link (`1` ⇔ `S^z = +1/2`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkConfig(pub u64);

impl LinkConfig {
    pub fn bit(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn flip(self, i: usize) -> Self {
        LinkConfig(self.0 ^ (1 << i))
    }
}

/// Static background charges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChargeBackground {
    /// No charges, electric basis.
    #[default]
    Vacuum,
    /// `Q_s = (-1)^s`, checked in the dimer basis:
    /// `e_{s,x} + e_{s,y} + e_{s-x,x} + e_{s-y,y} + 2 (-1)^s Q_s = 0`.
    Staggered,
}

impl ChargeBackground {
    pub fn charge(self, x: i64, y: i64) -> i64 {
        match self {
            ChargeBackground::Vacuum => 0,
            ChargeBackground::Staggered => {
                if (x + y).rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// Index layout of the links of an open square or periodic ladder lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkLayout {
    pub spec: LatticeSpec,
    /// Sites along x and y.
    pub sx: usize,
    pub sy: usize,
    n_h: usize,
    n_v: usize,
}

fn sign(parity: i64) -> i8 {
    if parity.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl LinkLayout {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        spec.validate()?;
        let (nx, ny) = (spec.nx, spec.ny);
        let (sx, sy, n_h, n_v) = match spec.kind {
            LatticeKind::OpenSquare => (nx + 1, ny + 1, nx * (ny + 1), (nx + 1) * ny),
            LatticeKind::PeriodicLadder => (nx, 2, 2 * nx, 2 * nx),
            LatticeKind::Chain => {
                return Err(Error::InvalidLattice("chains have no link picture".into()));
            }
        };
        if n_h + n_v > 64 {
            return Err(Error::InvalidLattice(format!(
                "{} links exceed the 64-bit word",
                n_h + n_v
            )));
        }
        Ok(Self { spec, sx, sy, n_h, n_v })
    }

    pub fn n_links(&self) -> usize {
        self.n_h + self.n_v
    }

    pub fn n_sites(&self) -> usize {
        self.sx * self.sy
    }

    pub fn site_coords(&self, s: usize) -> (i64, i64) {
        ((s % self.sx) as i64, (s / self.sx) as i64)
    }

    fn periodic(&self) -> bool {
        self.spec.kind == LatticeKind::PeriodicLadder
    }

    /// Storage index of a link, `None` for the frozen links outside an open
    /// lattice.
    pub fn index(&self, dir: Dir, x: i64, y: i64) -> Option<usize> {
        let (nx, ny) = (self.spec.nx as i64, self.spec.ny as i64);
        if self.periodic() {
            let (x, y) = (x.rem_euclid(nx), y.rem_euclid(2));
            let base = if dir == Dir::X { 0 } else { self.n_h };
            return Some(base + (y * nx + x) as usize);
        }
        match dir {
            Dir::X if (0..nx).contains(&x) && (0..=ny).contains(&y) => Some((y * nx + x) as usize),
            Dir::Y if (0..=nx).contains(&x) && (0..ny).contains(&y) => Some(self.n_h + (y * (nx + 1) + x) as usize),
            _ => None,
        }
    }

    /// Direction and origin site of a stored link.
    pub fn link_coords(&self, i: usize) -> (Dir, i64, i64) {
        let nx = self.spec.nx;
        if i < self.n_h {
            (Dir::X, (i % nx) as i64, (i / nx) as i64)
        } else {
            let j = i - self.n_h;
            let w = if self.periodic() { nx } else { nx + 1 };
            (Dir::Y, (j % w) as i64, (j / w) as i64)
        }
    }

    /// Value `2 S^z` of the link in the reference state `Ω`.
    pub fn omega_value(&self, dir: Dir, x: i64, y: i64) -> i8 {
        match dir {
            Dir::X => -sign(x + y),
            Dir::Y => sign(x + y),
        }
    }

    /// The reference state `Ω` in which every plaquette is flippable.
    pub fn omega(&self) -> LinkConfig {
        let mut bits = 0u64;
        for i in 0..self.n_links() {
            let (dir, x, y) = self.link_coords(i);
            if self.omega_value(dir, x, y) > 0 {
                bits |= 1 << i;
            }
        }
        LinkConfig(bits)
    }

    /// `2 S^z` of any link, stored or frozen.
    pub fn value(&self, c: LinkConfig, dir: Dir, x: i64, y: i64) -> i8 {
        match self.index(dir, x, y) {
            Some(i) => {
                if c.bit(i) {
                    1
                } else {
                    -1
                }
            }
            None => self.omega_value(dir, x, y),
        }
    }

    /// Links of a plaquette in the order bottom, right, top, left.
    pub fn plaquette_links(&self, p: usize) -> [usize; 4] {
        let (x, y) = self.spec.coords(p);
        let (x, y) = (x as i64, y as i64);
        let get = |d, a, b| self.index(d, a, b).expect("plaquette edges are stored links");
        [
            get(Dir::X, x, y),
            get(Dir::Y, x + 1, y),
            get(Dir::X, x, y + 1),
            get(Dir::Y, x, y),
        ]
    }

    fn has_all_links(&self, x: i64, y: i64) -> bool {
        self.index(Dir::X, x, y).is_some()
            && self.index(Dir::Y, x, y).is_some()
            && self.index(Dir::X, x - 1, y).is_some()
            && self.index(Dir::Y, x, y - 1).is_some()
    }
}

/// Sites where the Gauss law fails; empty for physical configurations.
///
/// In staggered mode open lattices are only checked on sites carrying four
/// stored links, since the frozen links are defined by the vacuum reference.
pub fn check_gauss_law(layout: &LinkLayout, c: LinkConfig, bg: ChargeBackground) -> Vec<usize> {
    let mut bad = Vec::new();
    for s in 0..layout.n_sites() {
        let (x, y) = layout.site_coords(s);
        let out_x = layout.value(c, Dir::X, x, y) as i64;
        let out_y = layout.value(c, Dir::Y, x, y) as i64;
        let in_x = layout.value(c, Dir::X, x - 1, y) as i64;
        let in_y = layout.value(c, Dir::Y, x, y - 1) as i64;
        let ok = match bg {
            ChargeBackground::Vacuum => out_x + out_y - in_x - in_y == 0,
            ChargeBackground::Staggered => {
                if !layout.has_all_links(x, y) {
                    continue;
                }
                let stagger = if (x + y) % 2 == 0 { 1 } else { -1 };
                out_x + out_y + in_x + in_y + 2 * stagger * bg.charge(x, y) == 0
            }
        };
        if !ok {
            bad.push(s);
        }
    }
    bad
}

/// Four-link vertex patterns allowed by the single-site Gauss law at an even
/// site. Bits are ordered `(s,x), (s,y), (s-x,x), (s-y,y)`.
pub fn list_physical_vertex_configs(bg: ChargeBackground) -> Vec<u8> {
    let e = |pattern: u8, i: u8| if pattern >> i & 1 == 1 { 1i64 } else { -1 };
    (0u8..16)
        .filter(|&m| match bg {
            ChargeBackground::Vacuum => e(m, 0) + e(m, 1) - e(m, 2) - e(m, 3) == 0,
            ChargeBackground::Staggered => e(m, 0) + e(m, 1) + e(m, 2) + e(m, 3) + 2 * bg.charge(0, 0) == 0,
        })
        .collect()
}

/// The plaquette term `S_p + S_p†`: exchanges the two flippable patterns
/// (bottom, right down / top, left up and its reverse) and annihilates the
/// rest.
pub fn apply_plaquette(layout: &LinkLayout, c: LinkConfig, p: usize) -> Option<LinkConfig> {
    let [b, r, t, l] = layout.plaquette_links(p);
    let (vb, vr, vt, vl) = (c.bit(b), c.bit(r), c.bit(t), c.bit(l));
    if vb == vr && vt == vl && vb != vt {
        let mask = (1u64 << b) | (1 << r) | (1 << t) | (1 << l);
        Some(LinkConfig(c.0 ^ mask))
    } else {
        None
    }
}

pub fn is_flippable(layout: &LinkLayout, c: LinkConfig, p: usize) -> bool {
    apply_plaquette(layout, c, p).is_some()
}

/// Spin flip of the bottom-left links of every odd plaquette, which turns the
/// plaquette term into a ring exchange and `Ω` into a columnar state.
pub fn rotate_to_dimer_basis(layout: &LinkLayout, c: LinkConfig) -> LinkConfig {
    let mut bits = c.0;
    for i in 0..layout.n_links() {
        let (_, x, y) = layout.link_coords(i);
        if (x + y).rem_euclid(2) == 1 {
            bits ^= 1 << i;
        }
    }
    LinkConfig(bits)
}
