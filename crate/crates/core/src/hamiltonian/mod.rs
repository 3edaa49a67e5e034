//! Sparse model Hamiltonians over link, dual and full bases.

mod models;
mod sparse;
mod terms;

pub use models::{
    build_dual_rk, build_effective_spin, build_effective_spin_model, build_original_rk, build_pxp_chain,
    build_rydberg_rk, effective_diagonal, flip_even_block, rk_potential, EffectiveSpinModel, PairCounting,
};
pub use sparse::SparseOperator;
pub use terms::{
    add_detuning, add_penalty, add_pinning, build_atom_level, default_pinning_sites, pair_state_index,
    penalty_violations, ATOM_LEVEL_MAX_PAIRS, PENALTY_DEFAULTS,
};
