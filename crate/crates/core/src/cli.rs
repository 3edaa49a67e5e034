//! Batch experiment runner behind the `rydberg-rk` binary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ModelConfig, ModelKind, SpaceKind};
use crate::error::{Error, Result};
use crate::gauge::{
    apply_dual_plaquette, apply_plaquette, check_gauss_law, enumerate_link_sector, enumerate_sector, from_dual,
    list_physical_vertex_configs, to_dual, Basis, BasisKind, ChargeBackground, DualConfig, LatticeKind, LatticeSpec,
    LinkConfig, LinkLayout, NeighborTable, DEFAULT_DIM_CAP,
};
use crate::hamiltonian::{
    add_detuning, add_penalty, add_pinning, build_dual_rk, build_original_rk, build_rydberg_rk, default_pinning_sites,
    flip_even_block, SparseOperator,
};
use crate::io::{self, GeometryRecord, Provenance, SectorSummary, SweepRow};
use crate::observables::{flippable_count, rvbs_signature, StructureFactorReport};
use crate::solver::{adiabatic_sweep, dense_spectrum, ground_state, SweepOptions, DENSE_MAX_DIM};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rydberg-rk",
    version,
    about = "Dual RK gauge theory and Rydberg pair-array experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the blockade geometry of a pair array.
    Geometry(CommonArgs),
    /// Enumerate a constrained sector and write it to disk.
    Sector(CommonArgs),
    /// Ground-state sweep over a λ grid.
    Sweep(CommonArgs),
    /// Adiabatic pulse on the pair-spin model.
    Evolve(CommonArgs),
    /// Duality, Gauss-law, Hermiticity and spectrum checks.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment manifest (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed (overrides `seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (overrides `threads`).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Leave the generation time out of every output.
    #[arg(long)]
    pub no_timestamp: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Geometry(_) => "geometry",
            Command::Sector(_) => "sector",
            Command::Sweep(_) => "sweep",
            Command::Evolve(_) => "evolve",
            Command::Verify(_) => "verify",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Geometry(a) | Command::Sector(a) | Command::Sweep(a) | Command::Evolve(a) | Command::Verify(a) => {
                a
            }
        }
    }
}

/// Exit code for a library error: configuration and input problems map to
/// 2, everything else is numerical.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidLattice(_)
        | Error::InvalidParameter(_)
        | Error::Format(_)
        | Error::Io(_)
        | Error::BasisMismatch(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Everything a command needs after the manifest is loaded.
pub struct Context {
    pub config: ExperimentConfig,
    pub base: PathBuf,
    pub out: PathBuf,
    pub prov: Provenance,
}

impl Context {
    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        std::fs::create_dir_all(&self.out)?;
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }
}

fn prepare(cmd: &Command) -> Result<Context> {
    let args = cmd.args();
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(t) = args.threads {
        config.threads = Some(t);
    }
    if let Some(seed) = config.seed {
        config.solver.seed = seed;
    }
    config.validate_for(cmd.name())?;
    if let Some(t) = config.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let out = args
        .out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| PathBuf::from("."));
    let prov = Provenance::new(config.hash(), !args.no_timestamp);
    Ok(Context {
        config,
        base,
        out,
        prov,
    })
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let ctx = match prepare(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Geometry(_) => run_geometry(&ctx),
        Command::Sector(_) => run_sector(&ctx),
        Command::Sweep(_) => run_sweep(&ctx),
        Command::Evolve(_) => run_evolve(&ctx),
        Command::Verify(_) => run_verify(&ctx),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run_geometry(ctx: &Context) -> Result<i32> {
    let sol = ctx.config.geometry()?.solve(&ctx.base)?;
    let record = GeometryRecord {
        solution: sol.clone(),
        config_sha256: None,
    };
    io::write_json(ctx.create("geometry.json")?, &ctx.prov, &record)?;
    println!(
        "{:?} array: |eta| = {:.4}, theta = {:.4}, d_y = {:.4} -> a_y = {:.6}, G = {:.6}, Lambda = {:.6} (C6/a_x^6)",
        sol.kind, sol.eta, sol.theta, sol.d_y, sol.a_y, sol.gap, sol.lambda
    );
    Ok(EXIT_OK)
}

fn sector_for(spec: LatticeSpec) -> Result<Basis> {
    enumerate_sector(spec, DualConfig::all_up(&spec))
}

pub fn run_sector(ctx: &Context) -> Result<i32> {
    let spec = ctx.config.lattice_spec()?;
    let basis = sector_for(spec)?;
    io::write_sector(ctx.create("sector.bin")?, &basis)?;
    io::write_json(ctx.create("sector.json")?, &ctx.prov, &SectorSummary::of(&basis))?;
    if let Some(model) = &ctx.config.model {
        if model.export_operator {
            let problem = Problem::new(spec, model)?;
            let op = problem.operator(0.0)?;
            let mut w = ctx.create("operator.coo")?;
            writeln!(w, "# config_sha256 {}", ctx.prov.config_hash)?;
            op.write_coo(&mut w)?;
        }
    }
    println!("{spec}: sector dimension {}", basis.dim());
    Ok(EXIT_OK)
}

/// A model with everything but λ fixed.
struct Problem<'a> {
    model: &'a ModelConfig,
    /// Basis the operator acts on.
    basis: Basis,
    /// Dual basis for observables (equal to `basis` unless links are used).
    dual: Basis,
    layout: Option<LinkLayout>,
}

impl<'a> Problem<'a> {
    fn new(spec: LatticeSpec, model: &'a ModelConfig) -> Result<Self> {
        match model.kind {
            ModelKind::OriginalRk => {
                let layout = LinkLayout::new(spec)?;
                let basis = enumerate_link_sector(&layout, layout.omega(), DEFAULT_DIM_CAP)?;
                let states = basis
                    .states()
                    .iter()
                    .map(|&c| to_dual(&layout, LinkConfig(c)).map(|d| d.0))
                    .collect::<Result<Vec<_>>>()?;
                let dual = Basis::from_states(spec, BasisKind::Dual, states)?;
                Ok(Self {
                    model,
                    basis,
                    dual,
                    layout: Some(layout),
                })
            }
            _ => {
                let basis = match model.space {
                    SpaceKind::Sector => sector_for(spec)?,
                    SpaceKind::Full => Basis::full(spec)?,
                };
                Ok(Self {
                    model,
                    dual: basis.clone(),
                    basis,
                    layout: None,
                })
            }
        }
    }

    fn operator(&self, lambda: f64) -> Result<SparseOperator> {
        let m = self.model;
        let op = match m.kind {
            ModelKind::OriginalRk => build_original_rk(&self.basis, self.layout.as_ref().unwrap(), m.j, lambda)?,
            ModelKind::DualRk => build_dual_rk(&self.basis, m.j, lambda)?,
            ModelKind::RydbergRk => build_rydberg_rk(&self.basis, m.j, lambda * m.j)?,
        };
        // diagonal add-ons act on dual spins; link states share the dual order
        let mut op = op;
        if m.penalty != 0.0 {
            op = add_penalty(&op, &self.dual, m.penalty * m.j)?;
        }
        if m.pinning != 0.0 {
            let sites = m
                .pinning_sites
                .clone()
                .unwrap_or_else(|| default_pinning_sites(self.dual.spec()));
            op = add_pinning(&op, &self.dual, m.pinning * m.j, &sites)?;
        }
        if m.delta != 0.0 {
            op = add_detuning(&op, &self.dual, m.delta)?;
        }
        Ok(op)
    }
}

pub fn run_sweep(ctx: &Context) -> Result<i32> {
    let cfg = &ctx.config;
    let spec = cfg.lattice_spec()?;
    let model = cfg.model()?;
    let lambdas = cfg.lambda.as_ref().expect("validated").points()?;
    let problem = Problem::new(spec, model)?;
    let points: Vec<Result<(SweepRow, StructureFactorReport)>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let op = problem.operator(lambda)?;
            let gs = ground_state(&op, &cfg.solver)?;
            let rep = StructureFactorReport::compute(&gs.vector, &problem.dual, &[])?;
            let flippable = flippable_count(&gs.vector, &problem.dual)?;
            let row = SweepRow {
                lambda,
                energy: gs.energy,
                s00_z: rep.s00_z(),
                spipi_z: rep.spipi_z(),
                spipi_x: rep.spipi_x(),
                flippable,
            };
            Ok((row, rep))
        })
        .collect();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut failures = 0;
    for (lambda, p) in lambdas.iter().zip(points) {
        match p {
            Ok((row, rep)) => {
                let verdict = rvbs_signature(&rep, &cfg.rvbs).verdict;
                println!(
                    "lambda = {lambda:>8.4}  E0 = {:>14.8}  S00z = {:.5}  Spipiz = {:.5}  Spipix = {:.5}  rvbs = {verdict}",
                    row.energy, row.s00_z, row.spipi_z, row.spipi_x
                );
                rows.push(row);
                reports.push((*lambda, rep));
            }
            Err(e) => {
                eprintln!("warning: lambda = {lambda}: {e}");
                failures += 1;
            }
        }
    }
    io::write_sweep_csv(ctx.create("sweep.csv")?, &ctx.prov, &rows)?;
    io::write_report_csv(ctx.create("structure_factors.csv")?, &ctx.prov, &reports)?;
    Ok(if failures > 0 { EXIT_NUMERICAL } else { EXIT_OK })
}

pub fn run_evolve(ctx: &Context) -> Result<i32> {
    let cfg = &ctx.config;
    let spec = cfg.lattice_spec()?;
    let sol = cfg.geometry()?.solve(&ctx.base)?;
    let pulse_cfg = cfg.pulse.as_ref().expect("validated");
    let opts = SweepOptions {
        krylov: pulse_cfg.krylov,
        lanczos: cfg.solver,
        record_every: pulse_cfg.record_every,
        rvbs: cfg.rvbs,
    };
    let (rows, report) = adiabatic_sweep(spec, &sol, &pulse_cfg.spec(), pulse_cfg.delta, &opts)?;
    io::write_trajectory_csv(ctx.create("trajectory.csv")?, &ctx.prov, &rows)?;
    io::write_json(ctx.create("report.json")?, &ctx.prov, &report)?;
    println!(
        "final: S00z = {:.5}  Spipiz = {:.5}  Spipix = {:.5}  fidelity = {:.5}  rvbs = {}",
        report.final_structure.s00_z(),
        report.final_structure.spipi_z(),
        report.final_structure.spipi_x(),
        report.final_fidelity,
        report.rvbs.verdict
    );
    Ok(EXIT_OK)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn default_verify_lattices() -> Vec<LatticeSpec> {
    let mut v = Vec::new();
    for (nx, ny) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (2, 3), (3, 3)] {
        v.push(LatticeSpec::open_square(nx, ny).unwrap());
    }
    for nx in [2, 4, 6] {
        v.push(LatticeSpec::periodic_ladder(nx).unwrap());
    }
    v
}

/// Exhaustive count of link configurations obeying the vacuum Gauss law.
fn gauss_filtered_count(layout: &LinkLayout) -> Option<usize> {
    let n = layout.n_links();
    if n > 24 {
        return None;
    }
    Some(
        (0..1u64 << n)
            .into_par_iter()
            .filter(|&c| check_gauss_law(layout, LinkConfig(c), ChargeBackground::Vacuum).is_empty())
            .count(),
    )
}

/// Runs the invariant suite on `spec`, appending one result per check.
pub fn verify_lattice(spec: LatticeSpec, lambdas: &[f64], tol: f64, out: &mut Vec<CheckResult>) -> Result<()> {
    let mut push = |name: String, passed: bool, detail: String| out.push(CheckResult { name, passed, detail });
    let layout = LinkLayout::new(spec)?;
    let dual = sector_for(spec)?;
    let table = NeighborTable::new(spec);
    let full = spec.full_mask();
    let ladder = spec.kind == LatticeKind::PeriodicLadder;

    let mut bad_gauss = 0;
    let mut bad_round = 0;
    let mut bad_intertwine = 0;
    for &d in dual.states() {
        let c = from_dual(&layout, DualConfig(d));
        if !check_gauss_law(&layout, c, ChargeBackground::Vacuum).is_empty() {
            bad_gauss += 1;
        }
        match to_dual(&layout, c) {
            Ok(back) if back.0 == d || (ladder && back.0 == d ^ full) => {}
            _ => bad_round += 1,
        }
        for p in 0..spec.n_spins() {
            let a = apply_dual_plaquette(&table, DualConfig(d), p).map(|x| from_dual(&layout, x));
            let b = apply_plaquette(&layout, c, p);
            if a != b {
                bad_intertwine += 1;
            }
        }
    }
    push(
        format!("{spec}: dual states are physical"),
        bad_gauss == 0,
        format!("{bad_gauss} violations"),
    );
    push(
        format!("{spec}: duality round trip"),
        bad_round == 0,
        format!("{bad_round} mismatches"),
    );
    push(
        format!("{spec}: plaquette intertwining"),
        bad_intertwine == 0,
        format!("{bad_intertwine} mismatches"),
    );

    let links = enumerate_link_sector(&layout, layout.omega(), DEFAULT_DIM_CAP)?;
    let expected = if ladder { dual.dim() / 2 } else { dual.dim() };
    push(
        format!("{spec}: link and dual sector sizes"),
        links.dim() == expected,
        format!("links {}, dual {}", links.dim(), dual.dim()),
    );
    if !ladder {
        if let Some(count) = gauss_filtered_count(&layout) {
            push(
                format!("{spec}: sector equals Gauss-law count"),
                count == dual.dim(),
                format!("gauss {count}, sector {}", dual.dim()),
            );
        }
    }

    for &lambda in lambdas {
        let hd = build_dual_rk(&dual, 1.0, lambda)?;
        let ho = build_original_rk(&links, &layout, 1.0, lambda)?;
        let asym = hd.max_asymmetry().max(ho.max_asymmetry());
        push(
            format!("{spec}: Hermiticity at lambda = {lambda}"),
            asym <= 1e-12,
            format!("max asymmetry {asym:e}"),
        );
        if dual.dim() <= DENSE_MAX_DIM {
            // ladders: d and its global flip are one link state, so the link
            // spectrum is the flip-even block of the dual one
            let ed = if ladder {
                dense_spectrum(&flip_even_block(&hd, &dual)?.1)?
            } else {
                dense_spectrum(&hd)?
            };
            let eo = dense_spectrum(&ho)?;
            let diff = if ed.len() == eo.len() {
                ed.iter().zip(&eo).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            push(
                format!("{spec}: spectrum equivalence at lambda = {lambda}"),
                diff <= tol,
                format!("max |dE| {diff:e}"),
            );
        }
    }
    Ok(())
}

pub fn run_verify(ctx: &Context) -> Result<i32> {
    let vcfg = ctx.config.verify.clone().unwrap_or_default();
    let lattices = match &vcfg.lattices {
        Some(list) => list.iter().map(|l| l.spec()).collect::<Result<Vec<_>>>()?,
        None => default_verify_lattices(),
    };
    let mut checks = Vec::new();
    let patterns = list_physical_vertex_configs(ChargeBackground::Vacuum);
    checks.push(CheckResult {
        name: "vacuum vertex patterns".into(),
        passed: patterns.len() == 6,
        detail: format!("{} of 16", patterns.len()),
    });
    for spec in lattices {
        if spec.kind == LatticeKind::Chain {
            return Err(Error::Config("verify needs ladder or square lattices".into()));
        }
        verify_lattice(spec, &vcfg.lambdas, vcfg.spectrum_tol, &mut checks)?;
    }
    let passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    io::write_json(ctx.create("verify.json")?, &ctx.prov, &VerifyReport { passed, checks })?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}
