//! On-disk trajectory archives.
//!
//! ```text
//! <dir>/manifest.json
//! <dir>/ledger.csv                 m,t,E_m,d_m,k_m (one row per time step)
//! <dir>/snapshots/step_NNNNNN.bin  f64 LE, node-major, 3 components per node
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hfss_core::fields::GateReport;
use hfss_core::selection::{AdmissibilityReport, Discounted, Transcript};
use hfss_core::vec3::Vec3;
use hfss_core::{BallMesh, SchemeConfig, Trajectory};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliResult, Failure};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshInfo {
    pub resolution: usize,
    pub node_count: usize,
    /// SHA-256 of the resolution and the node coordinates.
    pub sha256: String,
}

impl MeshInfo {
    pub fn of(mesh: &BallMesh) -> Self {
        Self { resolution: mesh.resolution(), node_count: mesh.node_count(), sha256: mesh_hash(mesh) }
    }

    pub fn snapshot_bytes(&self) -> usize {
        self.node_count * 24
    }
}

pub fn mesh_hash(mesh: &BallMesh) -> String {
    let mut h = Sha256::new();
    h.update((mesh.resolution() as u64).to_le_bytes());
    h.update((mesh.node_count() as u64).to_le_bytes());
    for x in mesh.coords() {
        for c in x {
            h.update(c.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub functional: String,
    pub value: Discounted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub version: u32,
    pub experiment: ExperimentConfig,
    /// Position of the scheme in `experiment.schemes`.
    pub member: usize,
    pub scheme: SchemeConfig,
    pub tag: String,
    pub mesh: MeshInfo,
    pub dt: f64,
    pub steps: usize,
    pub stored_steps: Vec<usize>,
    pub ledger_tolerance: f64,
    pub projection_defect: f64,
    /// Enumeration whose functionals are listed in `functionals`.
    pub enumeration: String,
    pub admissibility: Option<AdmissibilityReport>,
    pub gate: Option<GateReport>,
    pub functionals: Vec<FunctionalValue>,
    /// Present when this trajectory was produced by selection.
    pub transcript: Option<Transcript>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LedgerRow {
    m: usize,
    t: f64,
    #[serde(rename = "E_m")]
    energy: f64,
    #[serde(rename = "d_m")]
    dissipation: Option<f64>,
    #[serde(rename = "k_m")]
    kinetic: Option<f64>,
}

pub fn snapshot_name(step: usize) -> String {
    format!("step_{step:06}.bin")
}

pub fn encode_field(values: &[Vec3]) -> Vec<u8> {
    values.iter().flatten().flat_map(|c| c.to_le_bytes()).collect()
}

pub fn decode_field(bytes: &[u8], nodes: usize) -> Option<Vec<Vec3>> {
    if bytes.len() != nodes * 24 {
        return None;
    }
    let f = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    Some((0..nodes).map(|k| [f(3 * k), f(3 * k + 1), f(3 * k + 2)]).collect())
}

/// Writes `traj` into `dir`, which must not exist yet.
pub fn write_trajectory(dir: &Path, manifest: &TrajectoryManifest, traj: &Trajectory) -> CliResult<()> {
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    for (step, field) in traj.snapshots() {
        fs::write(snaps.join(snapshot_name(step)), encode_field(field.values()))?;
    }
    let mut w = csv::Writer::from_path(dir.join("ledger.csv")).map_err(csv_io)?;
    for m in 0..=traj.steps() {
        w.serialize(LedgerRow {
            m,
            t: traj.time(m),
            energy: traj.energies()[m],
            dissipation: traj.dissipation().get(m).copied(),
            kinetic: traj.kinetic().get(m).copied(),
        })
        .map_err(csv_io)?;
    }
    w.flush()?;
    write_json(&dir.join("manifest.json"), manifest)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

pub struct LoadedArchive {
    pub manifest: TrajectoryManifest,
    pub trajectory: Trajectory,
}

pub fn read_trajectory(dir: &Path) -> CliResult<LoadedArchive> {
    let corrupt = |what: String| Failure::corrupt(dir, what);
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: TrajectoryManifest = serde_json::from_str(&text).map_err(|e| corrupt(format!("manifest: {e}")))?;
    if manifest.version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported version {}", manifest.version)));
    }
    let mesh = Arc::new(BallMesh::new(manifest.mesh.resolution).map_err(|e| corrupt(e.to_string()))?);
    if MeshInfo::of(&mesh) != manifest.mesh {
        return Err(corrupt("mesh hash does not match the recorded resolution".into()));
    }

    let mut snapshots = Vec::with_capacity(manifest.stored_steps.len());
    for &step in &manifest.stored_steps {
        let path = dir.join("snapshots").join(snapshot_name(step));
        let bytes = fs::read(&path)?;
        let values = decode_field(&bytes, mesh.node_count()).ok_or_else(|| {
            corrupt(format!("{} has {} bytes, expected {}", path.display(), bytes.len(), manifest.mesh.snapshot_bytes()))
        })?;
        snapshots.push((step, values));
    }

    let mut energy = Vec::new();
    let mut dissipation = Vec::new();
    let mut kinetic = Vec::new();
    let mut r = csv::Reader::from_path(dir.join("ledger.csv")).map_err(csv_io)?;
    for (i, row) in r.deserialize::<LedgerRow>().enumerate() {
        let row = row.map_err(|e| corrupt(format!("ledger: {e}")))?;
        if row.m != i {
            return Err(corrupt(format!("ledger row {i} is labelled m={}", row.m)));
        }
        energy.push(row.energy);
        if i < manifest.steps {
            dissipation.push(row.dissipation.ok_or_else(|| corrupt(format!("ledger row {i} lacks d_m")))?);
            kinetic.push(row.kinetic.ok_or_else(|| corrupt(format!("ledger row {i} lacks k_m")))?);
        }
    }
    if energy.len() != manifest.steps + 1 {
        return Err(corrupt(format!("ledger has {} rows for {} steps", energy.len(), manifest.steps)));
    }
    let trajectory = Trajectory::from_parts(
        mesh,
        manifest.tag.clone(),
        manifest.scheme.clone(),
        snapshots,
        energy,
        dissipation,
        kinetic,
        manifest.ledger_tolerance,
        manifest.projection_defect,
    )
    .map_err(|e| corrupt(e.to_string()))?;
    Ok(LoadedArchive { manifest, trajectory })
}

/// A sibling directory that becomes `target` on [`Staging::commit`] and is
/// removed if dropped uncommitted.
pub struct Staging {
    path: PathBuf,
    target: PathBuf,
    committed: bool,
}

impl Staging {
    pub fn new(target: &Path) -> CliResult<Self> {
        let name = target
            .file_name()
            .ok_or_else(|| Failure::Validation(format!("output path {} has no final component", target.display())))?;
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent)?;
        let path = parent.join(format!(".{}.partial-{}", name.to_string_lossy(), std::process::id()));
        if path.exists() {
            fs::remove_dir_all(&path)?;
        }
        fs::create_dir_all(&path)?;
        Ok(Self { path, target: target.to_path_buf(), committed: false })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Replaces any previous archive at the target.
    pub fn commit(mut self) -> CliResult<()> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target)?;
        }
        fs::rename(&self.path, &self.target)?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.path);
        }
    }
}
