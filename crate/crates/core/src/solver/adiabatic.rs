use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::krylov::{cnorm, evolve_with, KrylovOptions, LinearFamily, TimeGrid};
use super::lanczos::{ground_state, LanczosOptions};
use crate::error::{Error, Result};
use crate::gauge::{enumerate_sector, Basis, DualConfig, LatticeSpec};
use crate::geometry::BlockadeSolution;
use crate::hamiltonian::{
    add_detuning, build_effective_spin_model, build_rydberg_rk, EffectiveSpinModel, PairCounting, SparseOperator,
};
use crate::observables::{embed, fidelity, rvbs_signature, RvbsCriteria, RvbsDiagnostic, StructureFactorReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    /// `J(t) = J sin(π t / (2 t_f))`.
    #[default]
    SineQuarter,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    #[serde(default)]
    pub shape: PulseShape,
    pub j: f64,
    pub t_final: f64,
    /// Time step; `0.01 / |J|` when absent.
    #[serde(default)]
    pub dt: Option<f64>,
}

impl PulseSpec {
    pub fn sine_quarter(j: f64, t_final: f64) -> Self {
        Self {
            shape: PulseShape::SineQuarter,
            j,
            t_final,
            dt: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pulse t_final must be positive, got {}",
                self.t_final
            )));
        }
        if !(self.j != 0.0) || !self.j.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pulse amplitude must be finite and nonzero, got {}",
                self.j
            )));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::InvalidParameter(format!("pulse dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::SineQuarter => self.j * (FRAC_PI_2 * t.clamp(0.0, self.t_final) / self.t_final).sin(),
        }
    }

    pub fn step(&self) -> f64 {
        self.dt.unwrap_or(0.01 / self.j.abs())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        self.validate()?;
        TimeGrid::covering(self.t_final, self.step())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub krylov: KrylovOptions,
    pub lanczos: LanczosOptions,
    /// Observables are recorded every this many steps (and at the end).
    pub record_every: usize,
    pub rvbs: RvbsCriteria,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            krylov: KrylovOptions::default(),
            lanczos: LanczosOptions::default(),
            record_every: 100,
            rvbs: RvbsCriteria::default(),
        }
    }
}

/// One trajectory line: time, pulse value, `<H(t)>`, structure factors and
/// the overlap with the ground state of `H(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub j_t: f64,
    pub energy: f64,
    pub s00_z: f64,
    pub spipi_z: f64,
    pub spipi_x: f64,
    pub fidelity_instantaneous: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Initial product configuration (ground state at `J = 0`).
    pub initial_state: u64,
    pub steps: usize,
    pub dt: f64,
    pub final_structure: StructureFactorReport,
    pub rvbs: RvbsDiagnostic,
    pub final_fidelity: f64,
    pub max_step_error: f64,
    /// Largest `|‖v(t)‖ - 1|` over recorded times.
    pub max_norm_drift: f64,
}

/// Evolves under `H(t) = diag + J(t) transverse` of the full pair-spin
/// `model`, starting from the lowest diagonal configuration of `sector`.
/// `target(J)` is the emergent Hamiltonian on `sector`; its ground state,
/// embedded in the full space, is the reference for the instantaneous
/// fidelity.
pub fn sweep_model<F>(
    model: &EffectiveSpinModel,
    sector: &Basis,
    target: F,
    pulse: &PulseSpec,
    opts: &SweepOptions,
) -> Result<(Vec<TrajectoryRow>, SweepReport)>
where
    F: Fn(f64) -> Result<SparseOperator>,
{
    let grid = pulse.grid()?;
    let basis = &model.basis;
    let diag = &model.diagonal;
    let on_sector: Vec<usize> = sector
        .states()
        .iter()
        .map(|&s| {
            basis
                .index_of(s)
                .ok_or_else(|| Error::BasisMismatch("sector state outside the model basis".into()))
        })
        .collect::<Result<_>>()?;
    let lowest = on_sector.iter().map(|&i| diag[i]).fold(f64::INFINITY, f64::min);
    let minima: Vec<usize> = on_sector
        .iter()
        .copied()
        .filter(|&i| diag[i] - lowest < 1e-12)
        .collect();
    if minima.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "J = 0 reference state is {}-fold degenerate; add a detuning",
            minima.len()
        )));
    }
    let start = minima[0];
    let mut v0 = vec![Complex64::new(0.0, 0.0); basis.dim()];
    v0[start] = Complex64::new(1.0, 0.0);

    let family = LinearFamily {
        diagonal: diag,
        drive: &model.transverse,
        amplitude: |t| pulse.amplitude(t),
    };
    let every = opts.record_every.max(1);
    let mut rows = Vec::new();
    let mut drift: f64 = 0.0;
    let mut last_fidelity = f64::NAN;
    let (v, worst) = evolve_with(&family, &v0, &grid, &opts.krylov, |k, t, v| {
        drift = drift.max((cnorm(v) - 1.0).abs());
        if k % every != 0 && k != grid.steps {
            return Ok(());
        }
        let j_t = pulse.amplitude(t);
        let energy = model.operator(j_t)?.expectation_complex(v)?;
        let sf = StructureFactorReport::compute(v, basis, &[])?;
        let gs = ground_state(&target(j_t)?, &opts.lanczos)?;
        last_fidelity = fidelity(&embed(&gs.vector, sector, basis)?, v)?;
        rows.push(TrajectoryRow {
            t,
            j_t,
            energy,
            s00_z: sf.s00_z(),
            spipi_z: sf.spipi_z(),
            spipi_x: sf.spipi_x(),
            fidelity_instantaneous: last_fidelity,
        });
        Ok(())
    })?;
    let final_structure = StructureFactorReport::compute(&v, basis, &[])?;
    let rvbs = rvbs_signature(&final_structure, &opts.rvbs);
    let report = SweepReport {
        initial_state: basis.state(start),
        steps: grid.steps,
        dt: grid.dt,
        final_structure,
        rvbs,
        final_fidelity: last_fidelity,
        max_step_error: worst,
        max_norm_drift: drift,
    };
    Ok((rows, report))
}

/// Adiabatic preparation on a pair array: evolves the pair-spin model with
/// detuning `delta` from the ferromagnetic reference selected by `delta`,
/// and tracks the Rydberg RK ground state on the sector of the all-up
/// configuration.
pub fn adiabatic_sweep(
    spec: LatticeSpec,
    solution: &BlockadeSolution,
    pulse: &PulseSpec,
    delta: f64,
    opts: &SweepOptions,
) -> Result<(Vec<TrajectoryRow>, SweepReport)> {
    let model = build_effective_spin_model(spec, solution, delta, PairCounting::Ordered)?;
    let sector = enumerate_sector(spec, DualConfig::all_up(&spec))?;
    let target = |j: f64| add_detuning(&build_rydberg_rk(&sector, j, solution.lambda)?, &sector, delta);
    sweep_model(&model, &sector, target, pulse, opts)
}
