//! Link and dual-spin pictures of the spin-1/2 U(1) gauge theory.

mod dual;
mod lattice;
mod links;
mod sector;

pub use dual::{apply_dual_plaquette, from_dual, height_field, to_dual, DualConfig, HeightField};
pub use lattice::{LatticeKind, LatticeSpec, Neighbor, NeighborTable, MAX_SPINS};
pub use links::{
    apply_plaquette, check_gauss_law, is_flippable, list_physical_vertex_configs, rotate_to_dimer_basis,
    ChargeBackground, Dir, LinkConfig, LinkLayout,
};
pub use sector::{
    enumerate_link_sector, enumerate_sector, enumerate_sector_with_cap, Basis, BasisKind, DEFAULT_DIM_CAP,
    FULL_SPACE_MAX_SPINS,
};
