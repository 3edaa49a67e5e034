//! Library results against independent brute-force computations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rydberg_rk::gauge::*;
use rydberg_rk::geometry::*;
use rydberg_rk::hamiltonian::*;
use rydberg_rk::observables::*;
use rydberg_rk::solver::*;

fn sector(spec: LatticeSpec) -> Basis {
    enumerate_sector(spec, DualConfig::all_up(&spec)).unwrap()
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Spin at lattice coordinates, frozen boundary up, ladders periodic.
fn spin_at(spec: &LatticeSpec, d: u64, x: i64, y: i64) -> bool {
    let (nx, ny) = (spec.nx as i64, spec.ny as i64);
    match spec.kind {
        LatticeKind::PeriodicLadder => {
            let (x, y) = (x.rem_euclid(nx), y.rem_euclid(ny));
            d >> (x + nx * y) & 1 == 1
        }
        _ => {
            if x < 0 || y < 0 || x >= nx || y >= ny {
                true
            } else {
                d >> (x + nx * y) & 1 == 1
            }
        }
    }
}

fn brute_flippable(spec: &LatticeSpec, d: u64, p: usize) -> bool {
    let (x, y) = ((p % spec.nx) as i64, (p / spec.nx) as i64);
    let nbs: Vec<bool> = match spec.kind {
        LatticeKind::Chain => vec![spin_at(spec, d, x - 1, 0), spin_at(spec, d, x + 1, 0)],
        _ => [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .map(|&(dx, dy)| spin_at(spec, d, x + dx, y + dy))
            .collect(),
    };
    nbs.iter().all(|&b| b) || (spec.kind != LatticeKind::Chain && nbs.iter().all(|&b| !b))
}

#[test]
fn dual_rk_matches_dense_construction() {
    for spec in [
        LatticeSpec::open_square(3, 2).unwrap(),
        LatticeSpec::periodic_ladder(4).unwrap(),
        LatticeSpec::chain(7).unwrap(),
    ] {
        let n = 1usize << spec.n_spins();
        let (j, lambda) = (0.7, -0.4);
        let mut dense = vec![0.0; n * n];
        for d in 0..n {
            for p in 0..spec.n_spins() {
                if brute_flippable(&spec, d as u64, p) {
                    dense[d * n + d] += j * lambda;
                    dense[d * n + (d ^ 1 << p)] -= j;
                }
            }
        }
        let op = build_dual_rk(&Basis::full(spec).unwrap(), j, lambda).unwrap();
        assert_eq!(op.to_dense(), dense, "{spec}");
    }
}

#[test]
fn structure_factor_against_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in [
        LatticeSpec::open_square(3, 2).unwrap(),
        LatticeSpec::periodic_ladder(4).unwrap(),
    ] {
        let basis = sector(spec);
        let v = random_state(basis.dim(), &mut rng);
        let n = spec.n_spins();
        // dense vector on all 2^N configurations
        let mut full = vec![0.0; 1 << n];
        for (i, &d) in basis.states().iter().enumerate() {
            full[d as usize] = v[i];
        }
        let sz = |d: usize, p: usize| if d >> p & 1 == 1 { 0.5 } else { -0.5 };
        for k in spec.momentum_grid() {
            let mut sz_sum = 0.0;
            let mut sx_sum = 0.0;
            for p in 0..n {
                for q in 0..n {
                    let (xp, yp) = ((p % spec.nx) as f64, (p / spec.nx) as f64);
                    let (xq, yq) = ((q % spec.nx) as f64, (q / spec.nx) as f64);
                    let phase = (k.0 * (xp - xq) + k.1 * (yp - yq)).cos();
                    let zz: f64 = (0..1 << n).map(|d| full[d] * full[d] * sz(d, p) * sz(d, q)).sum();
                    let xx: f64 = (0..1 << n)
                        .map(|d| 0.25 * full[d] * full[d ^ (1 << p) ^ (1 << q)])
                        .sum();
                    sz_sum += phase * zz;
                    sx_sum += phase * xx;
                }
            }
            let norm = 4.0 / (n * n) as f64;
            let z = structure_factor(&v, &basis, Component::Z, k).unwrap();
            let x = structure_factor(&v, &basis, Component::X, k).unwrap();
            assert!(
                (z - norm * sz_sum).abs() < 1e-12,
                "{spec} {k:?}: {z} vs {}",
                norm * sz_sum
            );
            assert!(
                (x - norm * sx_sum).abs() < 1e-12,
                "{spec} {k:?}: {x} vs {}",
                norm * sx_sum
            );
        }
    }
}

#[test]
fn flippable_count_against_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in [
        LatticeSpec::open_square(3, 3).unwrap(),
        LatticeSpec::periodic_ladder(6).unwrap(),
        LatticeSpec::chain(9).unwrap(),
    ] {
        let basis = sector(spec);
        let v = random_state(basis.dim(), &mut rng);
        let direct: f64 = basis
            .states()
            .iter()
            .zip(&v)
            .map(|(&d, a)| a * a * (0..spec.n_spins()).filter(|&p| brute_flippable(&spec, d, p)).count() as f64)
            .sum();
        assert!((flippable_count(&v, &basis).unwrap() - direct).abs() < 1e-12);
    }
}

/// Two-pair atom-level energies in the one-excitation-per-pair subspace
/// decompose as `c + b1 S1 + b2 S2 + A S1 S2` with the library's A and B.
#[test]
fn two_pair_energies_match_couplings() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let sep = Vec3::new(rng.gen_range(0.8..2.0), rng.gen_range(-1.5..1.5), 0.0);
        let theta: f64 = rng.gen_range(0.0..1.5);
        let eta = Vec3::new(theta.cos(), 0.0, theta.sin()) * rng.gen_range(0.2..0.45);
        let offset = rng.gen_range(-0.3..0.3);
        let drive = DriveParams {
            omega: 0.0,
            detuning: -3.0,
            offset,
        };
        let op = build_atom_level(&[Vec3::new(0.0, 0.0, 0.0), sep * -1.0], eta, 1.0, &drive).unwrap();
        let diag = op.diagonal();
        let e = |s1: u64, s2: u64| diag[pair_state_index(s1 | s2 << 1, 2)];
        let (uu, ud, du, dd) = (e(1, 1), e(1, 0), e(0, 1), e(0, 0));
        let a = uu + dd - ud - du;
        let b1 = (uu + ud - du - dd) / 2.0;
        let b2 = (uu + du - ud - dd) / 2.0;
        // pair 1 at the origin sees pair 2 at p - p' = sep
        let a_lib = ising_coupling_a(sep, eta, 1.0).unwrap();
        assert!((a - a_lib).abs() < 1e-10 * a_lib.abs().max(1.0), "{a} vs {a_lib}");
        let b12 = onsite_coefficient_b(sep, eta, 1.0).unwrap();
        let b21 = onsite_coefficient_b(sep * -1.0, eta, 1.0).unwrap();
        assert!(
            (b1 - (offset + b12 / 2.0)).abs() < 1e-10 * b12.abs().max(1.0),
            "{b1} vs {}",
            offset + b12 / 2.0
        );
        assert!(
            (b2 - (offset + b21 / 2.0)).abs() < 1e-10 * b21.abs().max(1.0),
            "{b2} vs {}",
            offset + b21 / 2.0
        );
    }
}

/// The unordered pair-spin diagonal of a ladder equals the van der Waals
/// energy of the excited atoms summed over leg, rung and diagonal bonds,
/// up to a constant.
#[test]
fn ladder_diagonal_matches_atom_positions() {
    let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
    let nx = 4i64;
    let spec = LatticeSpec::periodic_ladder(nx as usize).unwrap();
    let model = build_effective_spin_model(spec, &sol, 0.0, PairCounting::Unordered).unwrap();
    let ordered = build_effective_spin_model(spec, &sol, 0.0, PairCounting::Ordered).unwrap();
    let atom = |d: u64, x: i64, y: i64| {
        let up = d >> (x.rem_euclid(nx) + nx * y) & 1 == 1;
        let shift = if up { 0.5 * sol.eta } else { -0.5 * sol.eta };
        (x as f64 + shift, y as f64 * sol.a_y)
    };
    let mut bonds = Vec::new();
    for x in 0..nx {
        for y in 0..2 {
            bonds.push(((x, y), (x + 1, y)));
        }
        bonds.push(((x, 0), (x, 1)));
        bonds.push(((x, 0), (x + 1, 1)));
        bonds.push(((x, 0), (x - 1, 1)));
    }
    let energy = |d: u64| -> f64 {
        bonds
            .iter()
            .map(|&((x1, y1), (x2, y2))| {
                let (a, b) = (atom(d, x1, y1), atom(d, x2, y2));
                ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).powi(-3)
            })
            .sum()
    };
    let c = energy(0) - model.diagonal[0];
    for (i, &d) in model.basis.states().iter().enumerate() {
        let e = energy(d) - c;
        assert!(
            (e - model.diagonal[i]).abs() < 1e-9,
            "state {d:#b}: {e} vs {}",
            model.diagonal[i]
        );
        // ordered counting doubles every pair term
        assert!((ordered.diagonal[i] - 2.0 * model.diagonal[i]).abs() < 1e-9);
    }
}

fn dense_propagator_step(h: &SparseOperator, v: &[Complex64], dt: f64) -> Vec<Complex64> {
    let eig = dense_eigen(h).unwrap();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for k in 0..eig.dim() {
        let u = eig.vector(k);
        let c: Complex64 = u.iter().zip(v).map(|(a, b)| b * a).sum();
        let c = c * Complex64::from_polar(1.0, -eig.values[k] * dt);
        for (o, a) in out.iter_mut().zip(u) {
            *o += c * a;
        }
    }
    out
}

#[test]
fn small_ladder_sweep_against_dense_propagation() {
    let sol = solve_ladder_geometry(0.38, 1.0).unwrap();
    let spec = LatticeSpec::periodic_ladder(4).unwrap();
    let delta = 0.1;
    let pulse = PulseSpec {
        dt: Some(0.02),
        ..PulseSpec::sine_quarter(1.0, 3.0)
    };
    let opts = SweepOptions {
        record_every: 50,
        ..SweepOptions::default()
    };
    let (rows, report) = adiabatic_sweep(spec, &sol, &pulse, delta, &opts).unwrap();

    let model = build_effective_spin_model(spec, &sol, delta, PairCounting::Ordered).unwrap();
    let sec = sector(spec);
    // lowest diagonal configuration inside the sector
    let start = sec
        .states()
        .iter()
        .copied()
        .min_by(|&a, &b| model.diagonal[a as usize].total_cmp(&model.diagonal[b as usize]))
        .unwrap();
    assert_eq!(report.initial_state, start);
    let mut v = vec![Complex64::new(0.0, 0.0); model.basis.dim()];
    v[start as usize] = Complex64::new(1.0, 0.0);
    let steps = report.steps;
    let dt = pulse.t_final / steps as f64;
    assert!((dt - report.dt).abs() < 1e-15);
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        v = dense_propagator_step(&model.operator(pulse.amplitude(t)).unwrap(), &v, dt);
    }
    let expect = StructureFactorReport::compute(&v, &model.basis, &[]).unwrap();
    for (a, b) in expect.entries.iter().zip(&report.final_structure.entries) {
        assert!((a.value - b.value).abs() < 1e-9, "{a:?} vs {b:?}");
    }

    let target = add_detuning(&build_rydberg_rk(&sec, 1.0, sol.lambda).unwrap(), &sec, delta).unwrap();
    let eig = dense_eigen(&target).unwrap();
    let gs = embed(eig.vector(0), &sec, &model.basis).unwrap();
    let f = fidelity(&gs, &v).unwrap();
    assert!(
        (f - report.final_fidelity).abs() < 1e-8,
        "{f} vs {}",
        report.final_fidelity
    );
    assert_eq!(rows.last().unwrap().t, pulse.t_final);
}

#[test]
fn pxp_ground_energy_matches_dense() {
    for n in [6, 10, 14] {
        let (_, op) = build_pxp_chain(n, 1.0, 0.3).unwrap();
        let dense = dense_spectrum(&op).unwrap()[0];
        let lz = ground_state(&op, &LanczosOptions::default()).unwrap().energy;
        assert!((dense - lz).abs() < 1e-9);
    }
}
