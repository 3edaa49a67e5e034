//! Dual plaquette spins and the map to electric links.
//!
//! With `s_p = 2 S^z_p = ±1` the duality reads
//! `e_{p,x} = -(-1)^p s_p s_{p-y}` and `e_{p,y} = (-1)^p s_p s_{p-x}`,
//! where `(-1)^p = (-1)^(x+y)`. The all-up dual state maps to `Ω`.

use serde::{Deserialize, Serialize};

use super::lattice::{LatticeKind, LatticeSpec, Neighbor, NeighborTable};
use super::links::{check_gauss_law, ChargeBackground, Dir, LinkConfig, LinkLayout};
use crate::error::{Error, Result};

/// Dual basis state, one bit per dynamical plaquette (`1` ⇔ up).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualConfig(pub u64);

impl DualConfig {
    pub fn all_up(spec: &LatticeSpec) -> Self {
        DualConfig(spec.full_mask())
    }

    pub fn up(self, p: usize) -> bool {
        self.0 >> p & 1 == 1
    }

    pub fn flip(self, p: usize) -> Self {
        DualConfig(self.0 ^ (1 << p))
    }

    /// `2 S^z` of a dual spin, frozen boundary spins included.
    pub fn spin(self, spec: &LatticeSpec, x: i64, y: i64) -> i8 {
        match spec.neighbor_at(x, y) {
            Neighbor::Spin(i) => {
                if self.up(i) {
                    1
                } else {
                    -1
                }
            }
            Neighbor::FixedUp => 1,
        }
    }
}

fn parity_sign(x: i64, y: i64) -> i8 {
    if (x + y).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Link configuration of a dual state.
///
/// The result satisfies the vacuum Gauss law exactly when no site is
/// surrounded by a pattern with both diagonal pairs anti-aligned; those are
/// the configurations removed by the penalty term. All states reachable from
/// the all-up reference are physical.
pub fn from_dual(layout: &LinkLayout, d: DualConfig) -> LinkConfig {
    let spec = &layout.spec;
    let mut bits = 0u64;
    for i in 0..layout.n_links() {
        let (dir, x, y) = layout.link_coords(i);
        let e = match dir {
            Dir::X => -parity_sign(x, y) * d.spin(spec, x, y) * d.spin(spec, x, y - 1),
            Dir::Y => parity_sign(x, y) * d.spin(spec, x, y) * d.spin(spec, x - 1, y),
        };
        if e > 0 {
            bits |= 1 << i;
        }
    }
    LinkConfig(bits)
}

fn mismatch_error(layout: &LinkLayout, c: LinkConfig) -> Error {
    let sites = check_gauss_law(layout, c, ChargeBackground::Vacuum);
    if !sites.is_empty() {
        return Error::NonPhysical { sites };
    }
    match layout.spec.kind {
        LatticeKind::PeriodicLadder => {
            Error::BoundaryIncompatible("configuration carries a winding around the ladder".into())
        }
        _ => Error::BoundaryIncompatible("boundary links disagree with the frozen dual ring".into()),
    }
}

/// Dual state of a physical link configuration, integrated column by column
/// from the frozen bottom boundary. On the periodic ladder the global `Z_2`
/// ambiguity is fixed by taking plaquette 0 up.
pub fn to_dual(layout: &LinkLayout, c: LinkConfig) -> Result<DualConfig> {
    let sites = check_gauss_law(layout, c, ChargeBackground::Vacuum);
    if !sites.is_empty() {
        return Err(Error::NonPhysical { sites });
    }
    let spec = layout.spec;
    let mut d = 0u64;
    let set = |d: &mut u64, x: usize, y: usize, up: bool| {
        if up {
            *d |= 1 << spec.index(x, y);
        }
    };
    match spec.kind {
        LatticeKind::OpenSquare => {
            for x in 0..spec.nx {
                let mut below = 1i8;
                for y in 0..spec.ny {
                    let (xi, yi) = (x as i64, y as i64);
                    let s = -parity_sign(xi, yi) * layout.value(c, Dir::X, xi, yi) * below;
                    set(&mut d, x, y, s > 0);
                    below = s;
                }
            }
        }
        LatticeKind::PeriodicLadder => {
            let mut left = 1i8;
            set(&mut d, 0, 0, true);
            for x in 1..spec.nx {
                let xi = x as i64;
                let s = parity_sign(xi, 0) * layout.value(c, Dir::Y, xi, 0) * left;
                set(&mut d, x, 0, s > 0);
                left = s;
            }
            for x in 0..spec.nx {
                let xi = x as i64;
                let below = if d >> spec.index(x, 0) & 1 == 1 { 1 } else { -1 };
                let s = -parity_sign(xi, 1) * layout.value(c, Dir::X, xi, 1) * below;
                set(&mut d, x, 1, s > 0);
            }
        }
        LatticeKind::Chain => unreachable!("link layouts reject chains"),
    }
    let d = DualConfig(d);
    if from_dual(layout, d) == c {
        Ok(d)
    } else {
        Err(mismatch_error(layout, c))
    }
}

/// Flip of dual spin `p` under the generalized blockade, `None` when its
/// neighbours are mixed.
pub fn apply_dual_plaquette(table: &NeighborTable, d: DualConfig, p: usize) -> Option<DualConfig> {
    table.flippable(d.0, p).then(|| d.flip(p))
}

/// Integer heights `H = 2h` on the plaquettes, with `e_{p,x} = H_p - H_{p-y}`
/// and `e_{p,y} = H_{p-x} - H_p`. The frozen ring carries the reference
/// pattern `H = 0` on even and `H = 1` on odd plaquettes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightField {
    pub spec: LatticeSpec,
    pub heights: Vec<i64>,
}

impl HeightField {
    /// Mod-2 identification with the dual spins: `p` is up iff
    /// `H_p - [p odd] ≡ 0 (mod 4)`.
    pub fn to_dual(&self) -> DualConfig {
        let mut bits = 0u64;
        for (p, &h) in self.heights.iter().enumerate() {
            let odd = self.spec.is_odd(p) as i64;
            if (h - odd).rem_euclid(4) == 0 {
                bits |= 1 << p;
            }
        }
        DualConfig(bits)
    }
}

pub fn height_field(layout: &LinkLayout, c: LinkConfig) -> Result<HeightField> {
    let spec = layout.spec;
    let (nx, ny) = (spec.nx as i64, spec.ny as i64);
    let reference = |x: i64, y: i64| (x + y).rem_euclid(2);
    let mut heights = vec![0i64; spec.n_spins()];
    let at = |h: &Vec<i64>, x: i64, y: i64| -> i64 {
        match spec.neighbor_at(x, y) {
            Neighbor::Spin(i) => h[i],
            Neighbor::FixedUp => reference(x, y),
        }
    };
    match spec.kind {
        LatticeKind::OpenSquare => {
            for y in 0..ny {
                for x in 0..nx {
                    let below = at(&heights, x, y - 1);
                    heights[spec.index(x as usize, y as usize)] = below + layout.value(c, Dir::X, x, y) as i64;
                }
            }
        }
        LatticeKind::PeriodicLadder => {
            for x in 1..nx {
                heights[spec.index(x as usize, 0)] =
                    heights[spec.index(x as usize - 1, 0)] - layout.value(c, Dir::Y, x, 0) as i64;
            }
            for x in 0..nx {
                heights[spec.index(x as usize, 1)] =
                    heights[spec.index(x as usize, 0)] + layout.value(c, Dir::X, x, 1) as i64;
            }
        }
        LatticeKind::Chain => unreachable!("link layouts reject chains"),
    }
    // Every link, frozen ones on the open boundary included, must be a height
    // difference; on the torus the wrap-around links test the winding.
    let (x0, x1, y0, y1) = match spec.kind {
        LatticeKind::OpenSquare => (-1, nx + 1, -1, ny + 1),
        _ => (0, nx, 0, ny),
    };
    for y in y0..y1 {
        for x in x0..x1 {
            let inside = |a: i64, b: i64| matches!(spec.neighbor_at(a, b), Neighbor::Spin(_));
            if x + 1 < x1 && (inside(x, y) || inside(x + 1, y) || spec.kind == LatticeKind::PeriodicLadder) {
                let e = layout.value(c, Dir::Y, x + 1, y) as i64;
                if at(&heights, x, y) - at(&heights, x + 1, y) != e {
                    return Err(mismatch_error(layout, c));
                }
            }
            if y + 1 < y1 && (inside(x, y) || inside(x, y + 1) || spec.kind == LatticeKind::PeriodicLadder) {
                let e = layout.value(c, Dir::X, x, y + 1) as i64;
                if at(&heights, x, y + 1) - at(&heights, x, y) != e {
                    return Err(mismatch_error(layout, c));
                }
            }
        }
    }
    if spec.kind == LatticeKind::PeriodicLadder {
        for y in 0..ny {
            let e = layout.value(c, Dir::Y, 0, y) as i64;
            if at(&heights, nx - 1, y) - at(&heights, 0, y) != e {
                return Err(mismatch_error(layout, c));
            }
        }
        for x in 0..nx {
            let e = layout.value(c, Dir::X, x, 0) as i64;
            if at(&heights, x, 0) - at(&heights, x, 1) != e {
                return Err(mismatch_error(layout, c));
            }
        }
    }
    Ok(HeightField { spec, heights })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(spec: LatticeSpec) -> LinkLayout {
        LinkLayout::new(spec).unwrap()
    }

    #[test]
    fn all_up_is_omega() {
        for spec in [
            LatticeSpec::open_square(3, 3).unwrap(),
            LatticeSpec::open_square(2, 4).unwrap(),
            LatticeSpec::periodic_ladder(6).unwrap(),
        ] {
            let l = layout(spec);
            let d = DualConfig::all_up(&spec);
            assert_eq!(from_dual(&l, d), l.omega());
            assert_eq!(to_dual(&l, l.omega()).unwrap(), d);
        }
    }

    #[test]
    fn single_dual_flip_flips_four_links() {
        let spec = LatticeSpec::open_square(3, 3).unwrap();
        let l = layout(spec);
        let up = DualConfig::all_up(&spec);
        for p in 0..spec.n_spins() {
            let diff = from_dual(&l, up).0 ^ from_dual(&l, up.flip(p)).0;
            let mut expected = 0u64;
            for i in l.plaquette_links(p) {
                expected |= 1 << i;
            }
            assert_eq!(diff, expected);
        }
    }

    #[test]
    fn ladder_global_flip_shares_image() {
        let spec = LatticeSpec::periodic_ladder(4).unwrap();
        let l = layout(spec);
        let d = DualConfig(0b1011_0110);
        let f = DualConfig(!d.0 & spec.full_mask());
        assert_eq!(from_dual(&l, d), from_dual(&l, f));
        let back = to_dual(&l, from_dual(&l, d));
        if check_gauss_law(&l, from_dual(&l, d), ChargeBackground::Vacuum).is_empty() {
            let back = back.unwrap();
            assert!(back == d || back == f);
            assert!(back.up(0));
        }
    }

    #[test]
    fn penalty_pattern_is_non_physical() {
        // plaquettes around interior site (1,1) of a 2x2 interior:
        // (1,1) up, (0,1) up, (0,0) down, (1,0) down
        let spec = LatticeSpec::open_square(2, 2).unwrap();
        let l = layout(spec);
        let d = DualConfig((1 << spec.index(1, 1)) | (1 << spec.index(0, 1)));
        let c = from_dual(&l, d);
        assert!(!check_gauss_law(&l, c, ChargeBackground::Vacuum).is_empty());
        assert!(matches!(to_dual(&l, c), Err(Error::NonPhysical { .. })));
    }

    #[test]
    fn winding_config_is_rejected() {
        // all links up on the torus: divergence free but a pure winding
        let spec = LatticeSpec::periodic_ladder(4).unwrap();
        let l = layout(spec);
        let c = LinkConfig((1u64 << l.n_links()) - 1);
        assert!(check_gauss_law(&l, c, ChargeBackground::Vacuum).is_empty());
        assert!(matches!(to_dual(&l, c), Err(Error::BoundaryIncompatible(_))));
        assert!(height_field(&l, c).is_err());
    }

    #[test]
    fn height_field_reference_and_flip() {
        let spec = LatticeSpec::open_square(3, 2).unwrap();
        let l = layout(spec);
        let h = height_field(&l, l.omega()).unwrap();
        for p in 0..spec.n_spins() {
            assert_eq!(h.heights[p], spec.is_odd(p) as i64);
        }
        let d = DualConfig::all_up(&spec).flip(spec.index(1, 1));
        let h = height_field(&l, from_dual(&l, d)).unwrap();
        assert_eq!(h.to_dual(), d);
        assert_eq!(h.heights[spec.index(1, 1)].abs(), 2);
    }

    #[test]
    fn height_field_rejects_violations() {
        let spec = LatticeSpec::open_square(2, 2).unwrap();
        let l = layout(spec);
        assert!(height_field(&l, l.omega().flip(0)).is_err());
    }

    #[test]
    fn dual_blockade_examples() {
        let spec = LatticeSpec::open_square(3, 3).unwrap();
        let t = NeighborTable::new(spec);
        let up = DualConfig::all_up(&spec);
        let centre = spec.index(1, 1);
        for p in 0..spec.n_spins() {
            assert!(apply_dual_plaquette(&t, up, p).is_some());
        }
        let one = apply_dual_plaquette(&t, up, centre).unwrap();
        for q in [spec.index(0, 1), spec.index(2, 1), spec.index(1, 0), spec.index(1, 2)] {
            assert!(apply_dual_plaquette(&t, one, q).is_none());
        }
        // all four neighbours of the centre flipped -> centre flippable (all down)
        let mut d = up;
        for q in [spec.index(0, 1), spec.index(2, 1), spec.index(1, 0), spec.index(1, 2)] {
            d = d.flip(q);
        }
        assert!(apply_dual_plaquette(&t, d, centre).is_some());
    }
}
