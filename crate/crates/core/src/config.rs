//! Experiment manifests: a versioned TOML schema with unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gauge::{LatticeKind, LatticeSpec};
use crate::geometry::{solve_ladder_geometry, solve_square_geometry, ArrayKind, BlockadeSolution};
use crate::observables::RvbsCriteria;
use crate::solver::{KrylovOptions, LanczosOptions, PulseShape, PulseSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Optional guard: the subcommand this manifest was written for.
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub lattice: Option<LatticeConfig>,
    #[serde(default)]
    pub geometry: Option<GeometryConfig>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub lambda: Option<LambdaGrid>,
    #[serde(default)]
    pub solver: LanczosOptions,
    #[serde(default)]
    pub rvbs: RvbsCriteria,
    #[serde(default)]
    pub pulse: Option<PulseConfig>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub kind: LatticeKind,
    pub nx: usize,
    #[serde(default = "one")]
    pub ny: usize,
}

fn one() -> usize {
    1
}

impl LatticeConfig {
    pub fn spec(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.kind, self.nx, self.ny)
    }
}

/// Either solver inputs or a previously written solution file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default)]
    pub array: Option<ArrayKind>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub d_y: Option<f64>,
    #[serde(default = "unit")]
    pub c6: f64,
    /// Path to a geometry JSON produced by the `geometry` command, relative
    /// to the config file.
    #[serde(default)]
    pub file: Option<PathBuf>,
}

fn unit() -> f64 {
    1.0
}

impl GeometryConfig {
    /// Solves the geometry, or loads it when `file` is set.
    pub fn solve(&self, base: &Path) -> Result<BlockadeSolution> {
        if let Some(file) = &self.file {
            let path = base.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read geometry file {}: {e}", path.display())))?;
            let record: crate::io::GeometryRecord = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("malformed geometry file {}: {e}", path.display())))?;
            return Ok(record.solution);
        }
        let eta = self
            .eta
            .ok_or_else(|| Error::Config("geometry.eta is required".into()))?;
        match self
            .array
            .ok_or_else(|| Error::Config("geometry.array is required".into()))?
        {
            ArrayKind::Ladder => {
                if self.theta.is_some() || self.d_y.is_some() {
                    return Err(Error::Config("ladder geometry takes no theta or d_y".into()));
                }
                solve_ladder_geometry(eta, self.c6)
            }
            ArrayKind::Square => {
                let theta = self
                    .theta
                    .ok_or_else(|| Error::Config("geometry.theta is required".into()))?;
                let d_y = self
                    .d_y
                    .ok_or_else(|| Error::Config("geometry.d_y is required".into()))?;
                solve_square_geometry(eta, theta, d_y, self.c6)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Link-basis RK Hamiltonian.
    OriginalRk,
    /// Dual plaquette-spin RK Hamiltonian (chains give the PXP model).
    DualRk,
    /// Rydberg RK model with `Λ = λ J` taken from the grid.
    RydbergRk,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    /// Sector reachable from the all-up reference.
    #[default]
    Sector,
    /// All `2^N` dual configurations, constraint imposed by `penalty`.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default = "unit")]
    pub j: f64,
    #[serde(default)]
    pub space: SpaceKind,
    /// Penalty energy in units of `J`; full space only.
    #[serde(default)]
    pub penalty: f64,
    /// Pinning field in units of `J`.
    #[serde(default)]
    pub pinning: f64,
    /// Zero-based pinned sites; the default three when absent.
    #[serde(default)]
    pub pinning_sites: Option<Vec<usize>>,
    /// Uniform detuning `δ Σ S^z`.
    #[serde(default)]
    pub delta: f64,
    /// Write the operator in coordinate form next to the sector.
    #[serde(default)]
    pub export_operator: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum LambdaGrid {
    Values { values: Vec<f64> },
    Range { start: f64, stop: f64, steps: usize },
}

impl LambdaGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            LambdaGrid::Values { values } => values.clone(),
            LambdaGrid::Range { start, stop, steps } => match *steps {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if pts.is_empty() {
            return Err(Error::Config("lambda grid is empty".into()));
        }
        if pts.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("lambda grid contains non-finite values".into()));
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    #[serde(default)]
    pub shape: PulseShape,
    /// Final amplitude `J`.
    pub j: f64,
    /// Sweep duration in units of `1/J`.
    pub t_final: f64,
    /// Time step in units of `1/J`.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Detuning `δ`.
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_record")]
    pub record_every: usize,
    #[serde(default)]
    pub krylov: KrylovOptions,
}

fn default_record() -> usize {
    100
}

impl PulseConfig {
    pub fn spec(&self) -> PulseSpec {
        let unit = 1.0 / self.j.abs();
        PulseSpec {
            shape: self.shape,
            j: self.j,
            t_final: self.t_final * unit,
            dt: self.dt.map(|d| d * unit),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Lattices to check; a built-in list when absent.
    #[serde(default)]
    pub lattices: Option<Vec<LatticeConfig>>,
    #[serde(default = "default_verify_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_spectrum_tol")]
    pub spectrum_tol: f64,
}

fn default_verify_lambdas() -> Vec<f64> {
    vec![-1.0, 0.0, 0.5, 1.0]
}

fn default_spectrum_tol() -> f64 {
    1e-10
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            lattices: None,
            lambdas: default_verify_lambdas(),
            spectrum_tol: default_spectrum_tol(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        self.lattice
            .as_ref()
            .ok_or_else(|| Error::Config("[lattice] section is required".into()))?
            .spec()
    }

    pub fn model(&self) -> Result<&ModelConfig> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::Config("[model] section is required".into()))
    }

    pub fn geometry(&self) -> Result<&GeometryConfig> {
        self.geometry
            .as_ref()
            .ok_or_else(|| Error::Config("[geometry] section is required".into()))
    }

    /// Checks the cross-section constraints of `command`.
    pub fn validate_for(&self, command: &str) -> Result<()> {
        if let Some(c) = &self.command {
            if c != command {
                return Err(Error::Config(format!("config is for `{c}`, not `{command}`")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        match command {
            "geometry" => {
                self.geometry()?;
            }
            "sector" => {
                self.lattice_spec()?;
            }
            "sweep" => {
                let spec = self.lattice_spec()?;
                let model = self.model()?;
                self.lambda
                    .as_ref()
                    .ok_or_else(|| Error::Config("[lambda] grid is required".into()))?
                    .points()?;
                check_model(&spec, model)?;
            }
            "evolve" => {
                let spec = self.lattice_spec()?;
                if spec.kind == LatticeKind::Chain {
                    return Err(Error::Config("evolve needs a ladder or square lattice".into()));
                }
                self.geometry()?;
                let pulse = self
                    .pulse
                    .as_ref()
                    .ok_or_else(|| Error::Config("[pulse] section is required".into()))?;
                pulse.spec().validate()?;
            }
            "verify" => {}
            other => return Err(Error::Config(format!("unknown command `{other}`"))),
        }
        Ok(())
    }
}

fn check_model(spec: &LatticeSpec, model: &ModelConfig) -> Result<()> {
    if !(model.j.is_finite() && model.j != 0.0) {
        return Err(Error::Config("model.j must be finite and nonzero".into()));
    }
    if model.penalty < 0.0 {
        return Err(Error::Config("model.penalty must be non-negative".into()));
    }
    match (model.kind, spec.kind) {
        (ModelKind::OriginalRk, LatticeKind::Chain) => {
            return Err(Error::Config("original-rk needs a ladder or square lattice".into()))
        }
        (ModelKind::RydbergRk, LatticeKind::Chain) => {
            return Err(Error::Config("rydberg-rk needs a ladder or square lattice".into()))
        }
        _ => {}
    }
    if model.kind == ModelKind::OriginalRk && model.space == SpaceKind::Full {
        return Err(Error::Config("original-rk is only built on the link sector".into()));
    }
    if model.space == SpaceKind::Sector && model.penalty != 0.0 {
        return Err(Error::Config("penalty applies to the full space only".into()));
    }
    Ok(())
}
