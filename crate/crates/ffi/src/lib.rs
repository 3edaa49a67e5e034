//! C interface to `rydberg_rk`.
//!
//! Every fallible function returns an [`RkStatus`]; on failure the message
//! is kept per thread and can be copied out with [`rk_last_error`]. Bases
//! and operators are opaque handles released with their `_free` function.
//! Panics never cross the boundary; they are reported as
//! `RK_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rydberg_rk::gauge::{enumerate_sector, Basis, DualConfig, LatticeKind, LatticeSpec};
use rydberg_rk::geometry::{solve_ladder_geometry, solve_square_geometry, BlockadeSolution};
use rydberg_rk::hamiltonian::{add_detuning, build_dual_rk, build_rydberg_rk, SparseOperator};
use rydberg_rk::observables::{structure_factor, Component};
use rydberg_rk::solver::{ground_state, LanczosOptions};
use rydberg_rk::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidLattice = 3,
    Geometry = 4,
    Dimension = 5,
    NoConvergence = 6,
    BufferTooSmall = 7,
    Panic = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkLattice {
    Chain = 0,
    PeriodicLadder = 1,
    OpenSquare = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkComponent {
    X = 0,
    Z = 1,
}

/// Blockade geometry of a pair array, energies in units of `C6 / a_x^6`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RkGeometry {
    pub eta: f64,
    pub theta: f64,
    pub d_y: f64,
    pub a_y: f64,
    pub gap: f64,
    pub lambda: f64,
}

/// Opaque sector or full basis of dual spins.
pub struct RkBasis(Basis);

/// Opaque sparse Hermitian operator.
pub struct RkOperator(SparseOperator);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(err: &Error) -> RkStatus {
    match err {
        Error::InvalidLattice(_) => RkStatus::InvalidLattice,
        Error::InvalidParameter(_) | Error::Config(_) | Error::BasisMismatch(_) => RkStatus::InvalidArgument,
        Error::DegenerateGeometry { .. }
        | Error::NoRoot { .. }
        | Error::BlockadeDegeneracy { .. }
        | Error::RabiPole => RkStatus::Geometry,
        Error::DimensionCap { .. } | Error::DimensionMismatch { .. } => RkStatus::Dimension,
        Error::NoConvergence { .. } | Error::StepError { .. } => RkStatus::NoConvergence,
        _ => RkStatus::Internal,
    }
}

/// Runs `f`, recording errors and turning panics into a status.
fn guard<F: FnOnce() -> Result<(), (RkStatus, String)>>(f: F) -> RkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RkStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside rydberg_rk");
            RkStatus::Panic
        }
    }
}

fn lib<T>(r: rydberg_rk::Result<T>) -> Result<T, (RkStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (RkStatus, String) {
    (RkStatus::NullPointer, format!("{what} is NULL"))
}

fn geometry_out(sol: &BlockadeSolution) -> RkGeometry {
    RkGeometry {
        eta: sol.eta,
        theta: sol.theta,
        d_y: sol.d_y,
        a_y: sol.a_y,
        gap: sol.gap,
        lambda: sol.lambda,
    }
}

fn lattice_spec(kind: RkLattice, nx: usize, ny: usize) -> rydberg_rk::Result<LatticeSpec> {
    let kind = match kind {
        RkLattice::Chain => LatticeKind::Chain,
        RkLattice::PeriodicLadder => LatticeKind::PeriodicLadder,
        RkLattice::OpenSquare => LatticeKind::OpenSquare,
    };
    LatticeSpec::new(kind, nx, ny)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// without the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rk_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Solves the ladder blockade geometry for pair length `eta`.
///
/// # Safety
/// `out` must be NULL or point to a writable `RkGeometry`.
#[no_mangle]
pub unsafe extern "C" fn rk_solve_ladder_geometry(eta: f64, c6: f64, out: *mut RkGeometry) -> RkStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = geometry_out(&lib(solve_ladder_geometry(eta, c6))?);
        Ok(())
    })
}

/// Solves the square-lattice blockade geometry.
///
/// # Safety
/// `out` must be NULL or point to a writable `RkGeometry`.
#[no_mangle]
pub unsafe extern "C" fn rk_solve_square_geometry(
    eta: f64,
    theta: f64,
    d_y: f64,
    c6: f64,
    out: *mut RkGeometry,
) -> RkStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = geometry_out(&lib(solve_square_geometry(eta, theta, d_y, c6))?);
        Ok(())
    })
}

/// Enumerates the dual-spin sector reachable from the all-up state.
///
/// # Safety
/// `out` must be NULL or point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn rk_basis_sector(kind: RkLattice, nx: usize, ny: usize, out: *mut *mut RkBasis) -> RkStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = lib(lattice_spec(kind, nx, ny))?;
        let basis = lib(enumerate_sector(spec, DualConfig::all_up(&spec)))?;
        *out = Box::into_raw(Box::new(RkBasis(basis)));
        Ok(())
    })
}

/// All `2^N` dual configurations.
///
/// # Safety
/// `out` must be NULL or point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn rk_basis_full(kind: RkLattice, nx: usize, ny: usize, out: *mut *mut RkBasis) -> RkStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = lib(lattice_spec(kind, nx, ny))?;
        *out = Box::into_raw(Box::new(RkBasis(lib(Basis::full(spec))?)));
        Ok(())
    })
}

/// Number of basis states, 0 for NULL.
///
/// # Safety
/// `basis` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rk_basis_dim(basis: *const RkBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.0.dim())
}

/// Copies the configurations (bit `p` set = spin `p` up) into `buf`.
///
/// # Safety
/// `basis` must be a live handle; `buf` must point to `len` writable u64.
#[no_mangle]
pub unsafe extern "C" fn rk_basis_states(basis: *const RkBasis, buf: *mut u64, len: usize) -> RkStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let states = b.0.states();
        if len < states.len() {
            return Err((
                RkStatus::BufferTooSmall,
                format!("need {} entries, got {len}", states.len()),
            ));
        }
        ptr::copy_nonoverlapping(states.as_ptr(), buf, states.len());
        Ok(())
    })
}

/// # Safety
/// `basis` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rk_basis_free(basis: *mut RkBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

unsafe fn store_operator(
    out: *mut *mut RkOperator,
    op: impl FnOnce() -> rydberg_rk::Result<SparseOperator>,
) -> Result<(), (RkStatus, String)> {
    let out = out.as_mut().ok_or_else(|| null("out"))?;
    *out = Box::into_raw(Box::new(RkOperator(lib(op())?)));
    Ok(())
}

/// Dual RK Hamiltonian with coupling `j` and RK parameter `lambda`.
///
/// # Safety
/// `basis` must be a live handle; `out` must point to handle storage.
#[no_mangle]
pub unsafe extern "C" fn rk_operator_dual_rk(
    basis: *const RkBasis,
    j: f64,
    lambda: f64,
    out: *mut *mut RkOperator,
) -> RkStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        store_operator(out, || build_dual_rk(&b.0, j, lambda))
    })
}

/// Rydberg RK Hamiltonian with flip amplitude `j` and potential `big_lambda`.
///
/// # Safety
/// `basis` must be a live handle; `out` must point to handle storage.
#[no_mangle]
pub unsafe extern "C" fn rk_operator_rydberg_rk(
    basis: *const RkBasis,
    j: f64,
    big_lambda: f64,
    out: *mut *mut RkOperator,
) -> RkStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        store_operator(out, || build_rydberg_rk(&b.0, j, big_lambda))
    })
}

/// New operator `op + delta Σ_p S^z_p`.
///
/// # Safety
/// `op` and `basis` must be live handles; `out` must point to handle storage.
#[no_mangle]
pub unsafe extern "C" fn rk_operator_add_detuning(
    op: *const RkOperator,
    basis: *const RkBasis,
    delta: f64,
    out: *mut *mut RkOperator,
) -> RkStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        store_operator(out, || add_detuning(&op.0, &b.0, delta))
    })
}

/// Matrix dimension, 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rk_operator_dim(op: *const RkOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// Stored nonzeros, 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rk_operator_nnz(op: *const RkOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.nnz())
}

/// `y = H x` for vectors of length `len` (the operator dimension).
///
/// # Safety
/// `x` must point to `len` readable and `y` to `len` writable doubles that do
/// not overlap.
#[no_mangle]
pub unsafe extern "C" fn rk_operator_apply(op: *const RkOperator, x: *const f64, y: *mut f64, len: usize) -> RkStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        if x.is_null() || y.is_null() {
            return Err(null("vector"));
        }
        if len != op.0.dim() {
            return Err((
                RkStatus::Dimension,
                format!("length {len} does not match dimension {}", op.0.dim()),
            ));
        }
        let x = std::slice::from_raw_parts(x, len);
        let y = std::slice::from_raw_parts_mut(y, len);
        lib(op.0.apply_into(x, y))
    })
}

/// # Safety
/// `op` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rk_operator_free(op: *mut RkOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Lowest eigenpair by restarted Lanczos. `tol <= 0` and `max_iter == 0`
/// select the defaults. The vector is written when `vector` is not NULL,
/// in which case `len` must equal the operator dimension.
///
/// # Safety
/// `op` must be a live handle; `energy` must be writable; `vector` must be
/// NULL or point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rk_ground_state(
    op: *const RkOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
    energy: *mut f64,
    vector: *mut f64,
    len: usize,
) -> RkStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let energy = energy.as_mut().ok_or_else(|| null("energy"))?;
        if !vector.is_null() && len != op.0.dim() {
            return Err((
                RkStatus::Dimension,
                format!("length {len} does not match dimension {}", op.0.dim()),
            ));
        }
        let mut opts = LanczosOptions {
            seed,
            ..LanczosOptions::default()
        };
        if tol > 0.0 {
            opts.tol = tol;
        }
        if max_iter > 0 {
            opts.max_iter = max_iter;
        }
        let gs = lib(ground_state(&op.0, &opts))?;
        *energy = gs.energy;
        if !vector.is_null() {
            ptr::copy_nonoverlapping(gs.vector.as_ptr(), vector, len);
        }
        Ok(())
    })
}

/// Structure factor `S_k[mu]` of the real state `v` at `k = (kx, ky)`.
///
/// # Safety
/// `basis` must be a live handle, `v` must point to `len` readable doubles
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rk_structure_factor(
    basis: *const RkBasis,
    v: *const f64,
    len: usize,
    mu: RkComponent,
    kx: f64,
    ky: f64,
    out: *mut f64,
) -> RkStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if v.is_null() {
            return Err(null("v"));
        }
        let v = std::slice::from_raw_parts(v, len);
        let mu = match mu {
            RkComponent::X => Component::X,
            RkComponent::Z => Component::Z,
        };
        *out = lib(structure_factor(v, &b.0, mu, (kx, ky)))?;
        Ok(())
    })
}
