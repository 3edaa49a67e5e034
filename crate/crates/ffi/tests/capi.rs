use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use rydberg_rk_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let n = unsafe { rk_last_error(buf.as_mut_ptr(), buf.len()) };
    if n == 0 {
        return String::new();
    }
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(rk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn ladder_geometry() {
    let mut g = RkGeometry::default();
    assert_eq!(unsafe { rk_solve_ladder_geometry(0.38, 1.0, &mut g) }, RkStatus::Ok);
    assert!((g.a_y - 0.59).abs() / 0.59 < 0.02);
    assert!(g.gap > 0.0 && g.lambda < 0.0);
    assert_eq!(
        unsafe { rk_solve_ladder_geometry(0.38, 1.0, ptr::null_mut()) },
        RkStatus::NullPointer
    );
    assert!(last_error().contains("NULL"));
    assert_eq!(
        unsafe { rk_solve_ladder_geometry(-1.0, 1.0, &mut g) },
        RkStatus::InvalidArgument
    );
    assert!(!last_error().is_empty());
}

#[test]
fn square_geometry() {
    let mut g = RkGeometry::default();
    assert_eq!(
        unsafe { rk_solve_square_geometry(0.5, 0.85, 0.07, 1.0, &mut g) },
        RkStatus::Ok
    );
    assert!((g.a_y - 0.88).abs() / 0.88 < 0.01);
}

#[test]
fn rk_point_through_handles() {
    unsafe {
        let mut basis = ptr::null_mut();
        assert_eq!(rk_basis_sector(RkLattice::OpenSquare, 3, 3, &mut basis), RkStatus::Ok);
        let dim = rk_basis_dim(basis);
        assert_eq!(dim, 64);
        let mut states = vec![0u64; dim];
        assert_eq!(rk_basis_states(basis, states.as_mut_ptr(), 3), RkStatus::BufferTooSmall);
        assert_eq!(rk_basis_states(basis, states.as_mut_ptr(), dim), RkStatus::Ok);
        assert!(states.contains(&0x1ff));

        let mut op = ptr::null_mut();
        assert_eq!(rk_operator_dual_rk(basis, 1.0, 1.0, &mut op), RkStatus::Ok);
        assert_eq!(rk_operator_dim(op), dim);
        assert!(rk_operator_nnz(op) > dim);

        let mut e = f64::NAN;
        let mut v = vec![0.0; dim];
        assert_eq!(
            rk_ground_state(op, 0.0, 0, 1, &mut e, v.as_mut_ptr(), dim),
            RkStatus::Ok
        );
        assert!(e.abs() < 1e-10);
        let amp = 1.0 / (dim as f64).sqrt();
        assert!(v.iter().all(|x| (x.abs() - amp).abs() < 1e-8));

        let mut hv = vec![0.0; dim];
        assert_eq!(rk_operator_apply(op, v.as_ptr(), hv.as_mut_ptr(), dim), RkStatus::Ok);
        assert!(hv.iter().all(|x| x.abs() < 1e-9));
        assert_eq!(
            rk_operator_apply(op, v.as_ptr(), hv.as_mut_ptr(), dim - 1),
            RkStatus::Dimension
        );

        let mut s = 0.0;
        assert_eq!(
            rk_structure_factor(basis, v.as_ptr(), dim, RkComponent::Z, 0.0, 0.0, &mut s),
            RkStatus::Ok
        );
        assert!(s > 0.0 && s <= 1.0);
        assert_eq!(
            rk_structure_factor(basis, v.as_ptr(), 5, RkComponent::Z, 0.0, 0.0, &mut s),
            RkStatus::Dimension
        );

        let mut shifted = ptr::null_mut();
        assert_eq!(rk_operator_add_detuning(op, basis, 0.5, &mut shifted), RkStatus::Ok);
        let mut e2 = 0.0;
        assert_eq!(
            rk_ground_state(shifted, 0.0, 0, 1, &mut e2, ptr::null_mut(), 0),
            RkStatus::Ok
        );
        // variational bound from the undetuned ground state
        assert_eq!(
            rk_operator_apply(shifted, v.as_ptr(), hv.as_mut_ptr(), dim),
            RkStatus::Ok
        );
        let bound: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        assert!(e2 <= bound + 1e-10);
        assert!((e2 - e).abs() > 1e-6);

        rk_operator_free(shifted);
        rk_operator_free(op);
        rk_basis_free(basis);
        rk_basis_free(ptr::null_mut());
        rk_operator_free(ptr::null_mut());
    }
}

#[test]
fn bad_lattice_is_reported() {
    let mut basis = ptr::null_mut();
    let st = unsafe { rk_basis_sector(RkLattice::PeriodicLadder, 3, 2, &mut basis) };
    assert_eq!(st, RkStatus::InvalidLattice);
    assert!(basis.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { rk_basis_dim(ptr::null()) }, 0);
}

#[test]
fn rydberg_rk_on_full_space() {
    unsafe {
        let mut basis = ptr::null_mut();
        assert_eq!(rk_basis_full(RkLattice::PeriodicLadder, 2, 2, &mut basis), RkStatus::Ok);
        assert_eq!(rk_basis_dim(basis), 16);
        let mut op = ptr::null_mut();
        assert_eq!(rk_operator_rydberg_rk(basis, 1.0, -0.5, &mut op), RkStatus::Ok);
        assert_eq!(rk_operator_dim(op), 16);
        rk_operator_free(op);
        rk_basis_free(basis);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rydberg_rk.h");
    let text = std::fs::read_to_string(&header).expect("header generated by the build script");
    for name in [
        "rk_version",
        "rk_last_error",
        "rk_basis_sector",
        "rk_ground_state",
        "rk_structure_factor",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler, syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
