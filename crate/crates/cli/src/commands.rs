use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hfss_core::fields::GateReport;
use hfss_core::flow::{constant_trajectory, run_flow};
use hfss_core::selection::{
    admissible, build_ensemble, default_distinctness_threshold, select_from, semigroup_grid, trajectories_differ,
    Candidate, ItemReport, Selection, SemigroupPoint, Transcript,
};
use hfss_core::{Functional, Scheme, SchemeConfig, SelectionConfig, Trajectory};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::archive::{self, FunctionalValue, MeshInfo, Staging, TrajectoryManifest, FORMAT_VERSION};
use crate::config::{ExperimentConfig, Resolved};
use crate::error::{CliResult, Failure};

/// Manifest of an ensemble or selection run; member archives live in subdirectories.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub command: String,
    pub experiment: ExperimentConfig,
    pub mesh: MeshInfo,
    pub candidates: Vec<Candidate>,
    pub gate: Option<GateReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub selections: Vec<SelectionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinct: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberEntry {
    pub id: usize,
    pub tag: String,
    pub archive: String,
    pub functionals: Vec<FunctionalValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub enumeration: String,
    pub selected: usize,
    pub archive: String,
    pub transcript: Transcript,
}

fn run_scheme(r: &Resolved, cfg: &SchemeConfig) -> CliResult<(Trajectory, Option<GateReport>)> {
    Ok(match cfg.scheme {
        Scheme::Constant => {
            let (t, g) = constant_trajectory(&r.datum, cfg)?;
            (t, Some(g))
        }
        _ => (run_flow(&r.datum, cfg)?, None),
    })
}

/// Functionals of the first enumeration, then any new ones from the second.
fn all_functionals(r: &Resolved) -> Vec<Functional> {
    let mut seen = std::collections::HashSet::new();
    r.selections
        .iter()
        .flat_map(|s| s.functionals.iter())
        .filter(|f| seen.insert(f.label()))
        .cloned()
        .collect()
}

fn functional_values(fs: &[Functional], traj: &Trajectory) -> CliResult<Vec<FunctionalValue>> {
    fs.par_iter()
        .map(|f| Ok(FunctionalValue { functional: f.label(), value: f.evaluate(traj)? }))
        .collect()
}

fn trajectory_manifest(
    r: &Resolved,
    member: usize,
    traj: &Trajectory,
    gate: Option<GateReport>,
    functionals: Vec<FunctionalValue>,
    transcript: Option<Transcript>,
) -> CliResult<TrajectoryManifest> {
    let sel = &r.selections[0];
    Ok(TrajectoryManifest {
        version: FORMAT_VERSION,
        experiment: r.config.clone(),
        member,
        scheme: traj.config().clone(),
        tag: traj.tag().to_string(),
        mesh: MeshInfo::of(&r.mesh),
        dt: traj.dt(),
        steps: traj.steps(),
        stored_steps: traj.stored_steps().collect(),
        ledger_tolerance: traj.ledger_tolerance(),
        projection_defect: traj.projection_defect(),
        enumeration: transcript.as_ref().map_or_else(|| sel.enumeration.clone(), |t| t.enumeration.clone()),
        admissibility: Some(admissible(traj, &r.datum, &sel.tolerances)?),
        gate,
        functionals,
        transcript,
    })
}

pub fn simulate(r: &Resolved) -> CliResult<serde_json::Value> {
    if r.schemes.len() != 1 {
        return Err(Failure::Validation(format!("simulate runs one scheme, got {}", r.schemes.len())));
    }
    let out = r.out()?;
    let (traj, gate) = run_scheme(r, &r.schemes[0])?;
    let values = functional_values(&all_functionals(r), &traj)?;
    let manifest = trajectory_manifest(r, 0, &traj, gate, values, None)?;
    let stage = Staging::new(&out)?;
    archive::write_trajectory(stage.path(), &manifest, &traj)?;
    stage.commit()?;
    Ok(json!({
        "command": "simulate",
        "out": out,
        "scheme": traj.tag(),
        "steps": traj.steps(),
        "stored": traj.stored_count(),
        "energy_initial": traj.energies()[0],
        "energy_final": traj.energies()[traj.steps()],
        "admissible": manifest.admissibility.as_ref().is_some_and(|a| a.passed()),
    }))
}

pub fn ensemble(r: &Resolved) -> CliResult<serde_json::Value> {
    r.validate_rates()?;
    let out = r.out()?;
    let ens = build_ensemble(&r.datum, &r.schemes, &r.selections[0].tolerances)?;
    let fs = all_functionals(r);
    let stage = Staging::new(&out)?;
    let members: Vec<MemberEntry> = ens
        .set
        .members()
        .par_iter()
        .map(|m| {
            let values = functional_values(&fs, &m.trajectory)?;
            let gate = (m.trajectory.config().scheme == Scheme::Constant).then(|| ens.gate.clone()).flatten();
            let manifest = trajectory_manifest(r, m.id, &m.trajectory, gate, values.clone(), None)?;
            let rel = format!("members/{}", m.id);
            archive::write_trajectory(&stage.path().join(&rel), &manifest, &m.trajectory)?;
            Ok(MemberEntry { id: m.id, tag: m.trajectory.tag().to_string(), archive: rel, functionals: values })
        })
        .collect::<CliResult<_>>()?;
    let manifest = RunManifest {
        version: FORMAT_VERSION,
        command: "ensemble".into(),
        experiment: r.config.clone(),
        mesh: MeshInfo::of(&r.mesh),
        candidates: ens.candidates.clone(),
        gate: ens.gate.clone(),
        members,
        selections: Vec::new(),
        distinct: None,
    };
    archive::write_json(&stage.path().join("manifest.json"), &manifest)?;
    stage.commit()?;
    Ok(json!({
        "command": "ensemble",
        "out": out,
        "members": ens.set.ids(),
        "gate_passed": ens.gate.as_ref().map(|g| g.passed),
    }))
}

pub fn select(r: &Resolved) -> CliResult<serde_json::Value> {
    r.validate_rates()?;
    let out = r.out()?;
    let ens = build_ensemble(&r.datum, &r.schemes, &r.selections[0].tolerances)?;
    let picks: Vec<Selection> =
        r.selections.iter().map(|sel| select_from(&ens.set, sel)).collect::<hfss_core::Result<_>>()?;
    let distinct = (picks.len() == 2).then(|| {
        trajectories_differ(&picks[0].trajectory, &picks[1].trajectory, default_distinctness_threshold(&r.datum))
    });
    let fs = all_functionals(r);
    let stage = Staging::new(&out)?;
    let selections: Vec<SelectionEntry> = picks
        .par_iter()
        .enumerate()
        .map(|(k, pick)| {
            let values = functional_values(&fs, &pick.trajectory)?;
            let gate = (pick.trajectory.config().scheme == Scheme::Constant).then(|| ens.gate.clone()).flatten();
            let manifest =
                trajectory_manifest(r, pick.id(), &pick.trajectory, gate, values, Some(pick.transcript.clone()))?;
            let rel = format!("selections/{k}");
            archive::write_trajectory(&stage.path().join(&rel), &manifest, &pick.trajectory)?;
            Ok(SelectionEntry {
                enumeration: pick.transcript.enumeration.clone(),
                selected: pick.id(),
                archive: rel,
                transcript: pick.transcript.clone(),
            })
        })
        .collect::<CliResult<_>>()?;
    let manifest = RunManifest {
        version: FORMAT_VERSION,
        command: "select".into(),
        experiment: r.config.clone(),
        mesh: MeshInfo::of(&r.mesh),
        candidates: ens.candidates.clone(),
        gate: ens.gate.clone(),
        members: Vec::new(),
        selections,
        distinct,
    };
    archive::write_json(&stage.path().join("manifest.json"), &manifest)?;
    stage.commit()?;
    Ok(json!({
        "command": "select",
        "out": out,
        "candidates": ens.set.ids(),
        "selected": picks.iter().map(Selection::id).collect::<Vec<_>>(),
        "distinct": distinct,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Norm,
    Trace,
    FiniteEnergy,
    Energy,
    WeakForm,
    Semigroup,
}

impl Check {
    pub const ALL: [Check; 6] =
        [Check::Norm, Check::Trace, Check::FiniteEnergy, Check::Energy, Check::WeakForm, Check::Semigroup];
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    pub worst: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn from_item(check: Check, item: &ItemReport) -> Self {
        Self { check, passed: item.passed, worst: item.worst, threshold: item.threshold, detail: item.detail.clone() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub archive: PathBuf,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub semigroup: Vec<SemigroupPoint>,
}

pub fn verify(dir: &Path, checks: &[Check]) -> CliResult<VerifyReport> {
    let loaded = archive::read_trajectory(dir)?;
    let (manifest, traj) = (&loaded.manifest, &loaded.trajectory);
    let r = manifest.experiment.clone().resolve()?;
    if MeshInfo::of(&r.mesh) != manifest.mesh {
        return Err(Failure::corrupt(dir, "config echo describes a different mesh"));
    }
    let mut sel = SelectionConfig::from_enumeration(&r.datum, &manifest.enumeration)?;
    sel.delta = r.config.selection.delta;
    let report = admissible(traj, &r.datum, &sel.tolerances)?;

    let checks = if checks.is_empty() { &Check::ALL[..] } else { checks };
    let mut results = Vec::new();
    let mut points = Vec::new();
    for &c in checks {
        results.push(match c {
            Check::Norm => CheckResult::from_item(c, &report.constraint),
            Check::Trace => CheckResult::from_item(c, &report.initial_and_trace),
            Check::FiniteEnergy => CheckResult::from_item(c, &report.finite_energy),
            Check::Energy => CheckResult::from_item(c, &report.energy_inequality),
            Check::WeakForm => CheckResult::from_item(c, &report.weak_form),
            Check::Semigroup => {
                points = semigroup_points(&r, manifest, traj, &sel)?;
                let worst = points.iter().fold(0.0f64, |w, p| w.max(p.error));
                let threshold = default_distinctness_threshold(&r.datum);
                CheckResult {
                    check: c,
                    passed: worst <= threshold,
                    worst,
                    threshold,
                    detail: format!("{} restarts over the dense prefix", points.len()),
                }
            }
        });
    }
    Ok(VerifyReport {
        archive: dir.to_path_buf(),
        passed: results.iter().all(|c| c.passed),
        checks: results,
        semigroup: points,
    })
}

/// Restarts at every dense-prefix step `m` and compares at the final step.
/// Restarts need at least ten steps left, the shortest valid horizon.
fn semigroup_points(
    r: &Resolved,
    manifest: &TrajectoryManifest,
    traj: &Trajectory,
    sel: &SelectionConfig,
) -> CliResult<Vec<SemigroupPoint>> {
    let (cfgs, transcript) = match &manifest.transcript {
        Some(t) => (r.schemes.clone(), t.clone()),
        None => (
            vec![manifest.scheme.clone()],
            Transcript {
                enumeration: sel.enumeration.clone(),
                candidates: vec![0],
                rounds: Vec::new(),
                selected: 0,
            },
        ),
    };
    let first = Selection { trajectory: traj.clone(), transcript };
    let last = traj.steps();
    let top = traj.dense_prefix().min(manifest.scheme.dense_prefix);
    let pairs: Vec<(usize, usize)> = (0..=top).take_while(|m| m + 10 <= last).map(|m| (m, last - m)).collect();
    Ok(semigroup_grid(&first, &cfgs, sel, &pairs)?)
}
