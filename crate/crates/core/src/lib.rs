//! Spin-1/2 U(1) lattice gauge theory in its dual plaquette-spin formulation,
//! and its realization with decorated Rydberg atom-pair arrays.
//!
//! The crate covers array geometry design ([`geometry`]), link and dual bases
//! ([`gauge`]), sparse model Hamiltonians ([`hamiltonian`]), eigensolvers and
//! time evolution ([`solver`]) and structure-factor diagnostics
//! ([`observables`]).

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod gauge;
pub mod geometry;
pub mod hamiltonian;
pub mod io;
pub mod observables;
pub mod solver;

pub use error::{Error, Result};
