//! Result files: CSV tables with provenance comments, geometry JSON and the
//! binary sector format.
//!
//! Sector files start with a 16-byte header (`b"RKSB"`, format version as
//! u16, basis kind u8, lattice kind u8, `nx` u32, `ny` u32, little endian)
//! followed by one u64 configuration per state.

use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{Basis, BasisKind, LatticeKind, LatticeSpec};
use crate::geometry::BlockadeSolution;
use crate::observables::StructureFactorReport;
use crate::solver::TrajectoryRow;

const SECTOR_MAGIC: &[u8; 4] = b"RKSB";
const SECTOR_VERSION: u16 = 1;

/// Provenance written at the top of every output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    /// Unix seconds; omitted when `None` so repeated runs are byte-identical.
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(config_hash: String, with_timestamp: bool) -> Self {
        let timestamp = with_timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self { config_hash, timestamp }
    }

    fn write_comments<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "# rydberg-rk {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# config_sha256 {}", self.config_hash)?;
        if let Some(t) = self.timestamp {
            writeln!(w, "# generated_unix {t}")?;
        }
        Ok(())
    }
}

/// One row of a λ sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub energy: f64,
    pub s00_z: f64,
    pub spipi_z: f64,
    pub spipi_x: f64,
    pub flippable: f64,
}

pub const SWEEP_HEADER: &str = "lambda,E0,S00z,Spipiz,Spipix,flippable";
pub const TRAJECTORY_HEADER: &str = "t,J_t,energy,S00z,Spipiz,Spipix,fidelity_instantaneous";
pub const REPORT_HEADER: &str = "lambda,mu,kx,ky,value";

pub fn write_sweep_csv<W: Write>(mut w: W, prov: &Provenance, rows: &[SweepRow]) -> std::io::Result<()> {
    prov.write_comments(&mut w)?;
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.lambda, r.energy, r.s00_z, r.spipi_z, r.spipi_x, r.flippable
        )?;
    }
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(mut w: W, prov: &Provenance, rows: &[TrajectoryRow]) -> std::io::Result<()> {
    prov.write_comments(&mut w)?;
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.t, r.j_t, r.energy, r.s00_z, r.spipi_z, r.spipi_x, r.fidelity_instantaneous
        )?;
    }
    Ok(())
}

/// Long-format structure-factor table, one line per `(λ, μ, k)`.
pub fn write_report_csv<W: Write>(
    mut w: W,
    prov: &Provenance,
    reports: &[(f64, StructureFactorReport)],
) -> std::io::Result<()> {
    prov.write_comments(&mut w)?;
    writeln!(w, "{REPORT_HEADER}")?;
    for (lambda, rep) in reports {
        for e in &rep.entries {
            writeln!(w, "{},{},{},{},{}", lambda, e.mu.name(), e.kx, e.ky, e.value)?;
        }
    }
    Ok(())
}

/// JSON value with the provenance fields merged in at the top level.
pub fn with_provenance<T: Serialize>(prov: &Provenance, value: &T) -> Result<serde_json::Value> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Format(e.to_string()))?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Error::Format("only JSON objects carry provenance".into()))?;
    obj.insert("config_sha256".into(), prov.config_hash.clone().into());
    obj.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    if let Some(t) = prov.timestamp {
        obj.insert("generated_unix".into(), t.into());
    }
    Ok(v)
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, prov: &Provenance, value: &T) -> Result<()> {
    let v = with_provenance(prov, value)?;
    serde_json::to_writer_pretty(&mut w, &v).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

/// Geometry file contents: the solution plus provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryRecord {
    #[serde(flatten)]
    pub solution: BlockadeSolution,
    #[serde(default)]
    pub config_sha256: Option<String>,
}

pub fn write_sector<W: Write>(mut w: W, basis: &Basis) -> Result<()> {
    let spec = basis.spec();
    w.write_all(SECTOR_MAGIC)?;
    w.write_all(&SECTOR_VERSION.to_le_bytes())?;
    w.write_all(&[basis.kind().code(), spec.kind.code()])?;
    w.write_all(&(spec.nx as u32).to_le_bytes())?;
    w.write_all(&(spec.ny as u32).to_le_bytes())?;
    for &s in basis.states() {
        w.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_sector<R: Read>(mut r: R) -> Result<Basis> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)
        .map_err(|_| Error::Format("sector file shorter than its header".into()))?;
    if &head[0..4] != SECTOR_MAGIC {
        return Err(Error::Format("not a sector file".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != SECTOR_VERSION {
        return Err(Error::Format(format!("unsupported sector format version {version}")));
    }
    let kind = BasisKind::from_code(head[6]).ok_or_else(|| Error::Format("unknown basis kind".into()))?;
    let lattice = LatticeKind::from_code(head[7]).ok_or_else(|| Error::Format("unknown lattice kind".into()))?;
    let nx = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(head[12..16].try_into().unwrap()) as usize;
    let spec = LatticeSpec::new(lattice, nx, ny)?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() % 8 != 0 {
        return Err(Error::Format("truncated sector body".into()));
    }
    let states = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Basis::from_states(spec, kind, states)
}

/// Short description of a sector for JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub lattice: LatticeKind,
    pub nx: usize,
    pub ny: usize,
    pub basis: BasisKind,
    pub dim: usize,
    pub reference: u64,
}

impl SectorSummary {
    pub fn of(basis: &Basis) -> Self {
        let spec = basis.spec();
        Self {
            lattice: spec.kind,
            nx: spec.nx,
            ny: spec.ny,
            basis: basis.kind(),
            dim: basis.dim(),
            reference: basis.states().first().copied().unwrap_or(0),
        }
    }
}
