//! Candidate weak solutions of the harmonic map heat flow and of the
//! Landau–Lifshitz flow, together with their energy ledgers.
//!
//! All schemes are explicit and keep the boundary band frozen at the initial
//! datum. A [`Trajectory`] stores its energy and dissipation for every time step
//! but only a subset of snapshots: a dense prefix `0..=P` followed by every
//! `stride`-th step and the final step.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    self, default_gate_threshold, gate_test_fields, weak_harmonic_gate, DirectorField, GateReport, NORM_GATE,
};
use crate::mesh::BallMesh;
use crate::vec3::{self, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ProjectionExplicit,
    Penalized,
    Constant,
    LandauLifshitz,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::ProjectionExplicit => "projection-explicit",
            Scheme::Penalized => "penalized",
            Scheme::Constant => "constant",
            Scheme::LandauLifshitz => "landau-lifshitz",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Scheme> {
        match tag {
            "projection-explicit" | "projection" => Some(Scheme::ProjectionExplicit),
            "penalized" => Some(Scheme::Penalized),
            "constant" => Some(Scheme::Constant),
            "landau-lifshitz" | "ll" => Some(Scheme::LandauLifshitz),
            _ => None,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub horizon: f64,
    /// Ginzburg–Landau length, penalized scheme only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Gilbert damping, Landau–Lifshitz only.
    #[serde(default)]
    pub damping: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_dense_prefix")]
    pub dense_prefix: usize,
    /// Weak-harmonicity gate for the constant scheme; `10 h^2 ||a||_{H^1}` if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_threshold: Option<f64>,
    /// Energy ledger tolerance; `10 dt E_0` if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger_tolerance: Option<f64>,
}

fn default_stride() -> usize {
    1
}

fn default_dense_prefix() -> usize {
    16
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, dt: f64, horizon: f64) -> Self {
        Self {
            scheme,
            dt,
            horizon,
            epsilon: None,
            damping: 0.0,
            stride: default_stride(),
            dense_prefix: default_dense_prefix(),
            gate_threshold: None,
            ledger_tolerance: None,
        }
    }

    pub fn projection(dt: f64, horizon: f64) -> Self {
        Self::new(Scheme::ProjectionExplicit, dt, horizon)
    }

    pub fn penalized(dt: f64, horizon: f64, epsilon: f64) -> Self {
        Self { epsilon: Some(epsilon), ..Self::new(Scheme::Penalized, dt, horizon) }
    }

    pub fn constant(dt: f64, horizon: f64) -> Self {
        Self::new(Scheme::Constant, dt, horizon)
    }

    pub fn landau_lifshitz(dt: f64, horizon: f64, damping: f64) -> Self {
        Self { damping, ..Self::new(Scheme::LandauLifshitz, dt, horizon) }
    }

    pub fn with_storage(mut self, stride: usize, dense_prefix: usize) -> Self {
        self.stride = stride;
        self.dense_prefix = dense_prefix;
        self
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Largest stable explicit step on `mesh` for this scheme.
    pub fn stability_limit(&self, mesh: &BallMesh) -> f64 {
        let h2 = mesh.spacing() * mesh.spacing();
        match self.scheme {
            Scheme::LandauLifshitz => h2 / 6.0 * 1f64.min(1.0 / self.damping.max(f64::MIN_POSITIVE)),
            _ => h2 / 6.0,
        }
    }

    pub fn validate(&self, mesh: &BallMesh) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 10.0 * self.dt) || !self.horizon.is_finite() {
            return Err(Error::Config(format!(
                "horizon {} must be at least 10 dt = {}",
                self.horizon,
                10.0 * self.dt
            )));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if self.scheme != Scheme::Constant {
            let limit = self.stability_limit(mesh);
            if self.dt > limit * (1.0 + 1e-12) {
                return Err(Error::Config(format!("dt {} exceeds the stability limit {limit}", self.dt)));
            }
        }
        match self.scheme {
            Scheme::Penalized => {
                let eps = self
                    .epsilon
                    .ok_or_else(|| Error::Config("penalized scheme needs epsilon".into()))?;
                if !(eps >= 2.0 * mesh.spacing() * (1.0 - 1e-12)) {
                    return Err(Error::Config(format!("epsilon {eps} must be at least 2h = {}", 2.0 * mesh.spacing())));
                }
            }
            Scheme::LandauLifshitz if !(self.damping >= 0.0) || !self.damping.is_finite() => {
                return Err(Error::Config(format!("damping must be >= 0, got {}", self.damping)));
            }
            _ => {}
        }
        if let Some(tol) = self.ledger_tolerance {
            if !(tol >= 0.0) {
                return Err(Error::Config(format!("ledger tolerance must be >= 0, got {tol}")));
            }
        }
        Ok(())
    }

    /// Weight converting `||∂_t u||^2` into the energy dissipation rate.
    pub fn dissipation_weight(&self) -> f64 {
        match self.scheme {
            Scheme::LandauLifshitz => self.damping / (1.0 + self.damping * self.damping),
            _ => 1.0,
        }
    }

    fn stores(&self, step: usize, last: usize) -> bool {
        step <= self.dense_prefix || step.is_multiple_of(self.stride) || step == last
    }
}

/// A discrete path `t -> u(t)` with its energy ledger.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub(crate) mesh: Arc<BallMesh>,
    pub(crate) tag: String,
    pub(crate) config: SchemeConfig,
    pub(crate) dt: f64,
    pub(crate) steps: usize,
    pub(crate) snapshots: Vec<(usize, Arc<Vec<Vec3>>)>,
    pub(crate) energy: Vec<f64>,
    pub(crate) dissipation: Vec<f64>,
    /// `||u_{m+1} - u_m||^2 / dt`, the unweighted kinetic increment.
    pub(crate) kinetic: Vec<f64>,
    pub(crate) ledger_tolerance: f64,
    pub(crate) projection_defect: f64,
}

impl PartialEq for Trajectory {
    fn eq(&self, other: &Self) -> bool {
        self.mesh.resolution() == other.mesh.resolution()
            && self.dt == other.dt
            && self.steps == other.steps
            && self.energy == other.energy
            && self.dissipation == other.dissipation
            && self.snapshots.len() == other.snapshots.len()
            && self
                .snapshots
                .iter()
                .zip(&other.snapshots)
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1)
    }
}

impl Trajectory {
    /// Assembles a trajectory from parts, e.g. when reading an archive.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        mesh: Arc<BallMesh>,
        tag: impl Into<String>,
        config: SchemeConfig,
        snapshots: Vec<(usize, Vec<Vec3>)>,
        energy: Vec<f64>,
        dissipation: Vec<f64>,
        kinetic: Vec<f64>,
        ledger_tolerance: f64,
        projection_defect: f64,
    ) -> Result<Self> {
        let steps = dissipation.len();
        if energy.len() != steps + 1 || kinetic.len() != steps {
            return Err(Error::Config(format!(
                "ledger has {} energies for {} steps",
                energy.len(),
                steps
            )));
        }
        let mut prev = None;
        for (step, values) in &snapshots {
            mesh.check_len(values.len())?;
            if *step > steps || prev.is_some_and(|p| p >= *step) {
                return Err(Error::Config(format!("snapshot steps must increase within 0..={steps}")));
            }
            prev = Some(*step);
        }
        if snapshots.first().map(|s| s.0) != Some(0) {
            return Err(Error::Storage(0));
        }
        Ok(Self {
            dt: config.dt,
            mesh,
            tag: tag.into(),
            config,
            steps,
            snapshots: snapshots.into_iter().map(|(s, v)| (s, Arc::new(v))).collect(),
            energy,
            dissipation,
            kinetic,
            ledger_tolerance,
            projection_defect,
        })
    }

    pub fn mesh(&self) -> &Arc<BallMesh> {
        &self.mesh
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn energies(&self) -> &[f64] {
        &self.energy
    }

    pub fn dissipation(&self) -> &[f64] {
        &self.dissipation
    }

    pub fn kinetic(&self) -> &[f64] {
        &self.kinetic
    }

    pub fn ledger_tolerance(&self) -> f64 {
        self.ledger_tolerance
    }

    /// Largest `| |w| - 1 |` seen before projection (penalized scheme only).
    pub fn projection_defect(&self) -> f64 {
        self.projection_defect
    }

    pub fn stored_steps(&self) -> impl Iterator<Item = usize> + '_ {
        self.snapshots.iter().map(|s| s.0)
    }

    pub fn stored_count(&self) -> usize {
        self.snapshots.len()
    }

    /// Largest `P` such that every step `0..=P` is stored.
    pub fn dense_prefix(&self) -> usize {
        let mut p = 0;
        for (i, (step, _)) in self.snapshots.iter().enumerate() {
            if *step != i {
                break;
            }
            p = i;
        }
        p
    }

    pub fn is_stored(&self, step: usize) -> bool {
        self.position(step).is_some()
    }

    fn position(&self, step: usize) -> Option<usize> {
        self.snapshots.binary_search_by_key(&step, |s| s.0).ok()
    }

    pub fn snapshot(&self, step: usize) -> Result<DirectorField> {
        let i = self.position(step).ok_or(Error::Storage(step))?;
        Ok(DirectorField::from_parts(self.mesh.clone(), self.snapshots[i].1.clone()))
    }

    pub(crate) fn snapshot_values(&self, step: usize) -> Option<&[Vec3]> {
        self.position(step).map(|i| self.snapshots[i].1.as_slice())
    }

    pub fn snapshots(&self) -> impl Iterator<Item = (usize, DirectorField)> + '_ {
        self.snapshots
            .iter()
            .map(|(s, v)| (*s, DirectorField::from_parts(self.mesh.clone(), v.clone())))
    }

    pub fn initial(&self) -> DirectorField {
        DirectorField::from_parts(self.mesh.clone(), self.snapshots[0].1.clone())
    }

    pub fn terminal(&self) -> DirectorField {
        let last = self.snapshots.last().expect("trajectory has a snapshot");
        DirectorField::from_parts(self.mesh.clone(), last.1.clone())
    }

    /// Replaces the snapshot at `step`. Intended for fault-injection tests.
    pub fn replace_snapshot(&mut self, step: usize, values: Vec<Vec3>) -> Result<()> {
        self.mesh.check_len(values.len())?;
        let i = self.position(step).ok_or(Error::Storage(step))?;
        self.snapshots[i].1 = Arc::new(values);
        Ok(())
    }

    /// Overwrites one ledger energy. Intended for fault-injection tests.
    pub fn set_energy(&mut self, step: usize, value: f64) -> Result<()> {
        let slot = self
            .energy
            .get_mut(step)
            .ok_or_else(|| Error::IndexOutOfRange(format!("energy step {step}")))?;
        *slot = value;
        Ok(())
    }
}

fn check_datum(a: &DirectorField) -> Result<()> {
    a.check_unit_norm(NORM_GATE)
}

pub(crate) fn projection_step_raw(
    mesh: &BallMesh,
    u: &[Vec3],
    dt: f64,
    tau: &mut [Vec3],
    out: &mut [Vec3],
) -> Result<()> {
    fields::tension_raw(mesh, u, tau);
    for &node in mesh.interior() {
        let v = vec3::add(u[node], vec3::scale(tau[node], dt));
        let n = vec3::norm(v);
        if !(n >= 0.5) {
            return Err(Error::StepSize { node, norm: n });
        }
        out[node] = vec3::scale(v, 1.0 / n);
    }
    for &b in mesh.trace_nodes() {
        out[b] = u[b];
    }
    Ok(())
}

pub(crate) fn penalized_step_raw(
    mesh: &BallMesh,
    w: &[Vec3],
    dt: f64,
    epsilon: f64,
    lap: &mut [Vec3],
    out: &mut [Vec3],
) -> Result<()> {
    mesh.laplacian_into(w, lap);
    let k = 1.0 / (epsilon * epsilon);
    for &node in mesh.interior() {
        let c = w[node];
        let relax = vec3::scale(c, k * (1.0 - vec3::norm_sq(c)));
        let v = vec3::add(c, vec3::scale(vec3::add(lap[node], relax), dt));
        let n = vec3::norm(v);
        if !(n <= 2.0) {
            return Err(Error::Instability { node, norm: n });
        }
        out[node] = v;
    }
    for &b in mesh.trace_nodes() {
        out[b] = w[b];
    }
    Ok(())
}

pub(crate) fn landau_lifshitz_step_raw(
    mesh: &BallMesh,
    u: &[Vec3],
    dt: f64,
    damping: f64,
    lap: &mut [Vec3],
    out: &mut [Vec3],
) -> Result<()> {
    mesh.laplacian_into(u, lap);
    for &node in mesh.interior() {
        let c = u[node];
        let prec = vec3::cross(c, lap[node]);
        let damp = vec3::cross(c, prec);
        let rhs = vec3::sub(prec, vec3::scale(damp, damping));
        let v = vec3::add(c, vec3::scale(rhs, dt));
        let n = vec3::norm(v);
        if !(n >= 0.5) {
            return Err(Error::StepSize { node, norm: n });
        }
        out[node] = vec3::scale(v, 1.0 / n);
    }
    for &b in mesh.trace_nodes() {
        out[b] = u[b];
    }
    Ok(())
}

fn stability_check(mesh: &BallMesh, dt: f64, limit: f64) -> Result<()> {
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Config(format!("dt {dt} outside (0, {limit}]")));
    }
    let _ = mesh;
    Ok(())
}

/// One explicit step of the heat flow followed by renormalization.
pub fn step_projection(u: &DirectorField, dt: f64) -> Result<DirectorField> {
    check_datum(u)?;
    let mesh = u.mesh();
    stability_check(mesh, dt, mesh.spacing().powi(2) / 6.0)?;
    let mut tau = vec![[0.0; 3]; mesh.node_count()];
    let mut out = vec![[0.0; 3]; mesh.node_count()];
    projection_step_raw(mesh, u.values(), dt, &mut tau, &mut out)?;
    Ok(DirectorField::from_parts(mesh.clone(), Arc::new(out)))
}

/// One explicit Ginzburg–Landau step; the result is only approximately unit.
pub fn step_penalized(
    mesh: &BallMesh,
    w: &[Vec3],
    dt: f64,
    epsilon: f64,
) -> Result<Vec<Vec3>> {
    mesh.check_len(w.len())?;
    stability_check(mesh, dt, mesh.spacing().powi(2) / 6.0)?;
    if !(epsilon >= 2.0 * mesh.spacing() * (1.0 - 1e-12)) {
        return Err(Error::Config(format!("epsilon {epsilon} below 2h")));
    }
    let mut lap = vec![[0.0; 3]; w.len()];
    let mut out = vec![[0.0; 3]; w.len()];
    penalized_step_raw(mesh, w, dt, epsilon, &mut lap, &mut out)?;
    Ok(out)
}

/// One explicit step of `∂_t u = u × Δu - λ u × (u × Δu)` with renormalization.
pub fn step_landau_lifshitz(u: &DirectorField, dt: f64, damping: f64) -> Result<DirectorField> {
    check_datum(u)?;
    let mesh = u.mesh();
    let cfg = SchemeConfig::landau_lifshitz(dt, 10.0 * dt, damping);
    stability_check(mesh, dt, cfg.stability_limit(mesh))?;
    let mut lap = vec![[0.0; 3]; mesh.node_count()];
    let mut out = vec![[0.0; 3]; mesh.node_count()];
    landau_lifshitz_step_raw(mesh, u.values(), dt, damping, &mut lap, &mut out)?;
    Ok(DirectorField::from_parts(mesh.clone(), Arc::new(out)))
}

fn project_interior(mesh: &BallMesh, w: &[Vec3], out: &mut [Vec3]) -> f64 {
    let mut defect: f64 = 0.0;
    for &node in mesh.interior() {
        let n = vec3::norm(w[node]);
        defect = defect.max((n - 1.0).abs());
        out[node] = vec3::scale(w[node], 1.0 / n);
    }
    for &b in mesh.trace_nodes() {
        out[b] = w[b];
    }
    defect
}

fn squared_rate(mesh: &BallMesh, a: &[Vec3], b: &[Vec3], dt: f64) -> f64 {
    let d = mesh.l2_distance(a, b);
    d * d / dt
}

/// Runs the configured scheme from `a` up to the horizon.
pub fn run_flow(a: &DirectorField, cfg: &SchemeConfig) -> Result<Trajectory> {
    let mesh = a.mesh().clone();
    cfg.validate(&mesh)?;
    check_datum(a)?;
    if cfg.scheme == Scheme::Constant {
        return constant_trajectory(a, cfg).map(|(t, _)| t);
    }
    let steps = cfg.steps();
    let dt = cfg.dt;
    let weight = cfg.dissipation_weight();
    let n = mesh.node_count();

    let mut energy = Vec::with_capacity(steps + 1);
    let mut dissipation = Vec::with_capacity(steps);
    let mut kinetic = Vec::with_capacity(steps);
    let mut snapshots = vec![(0usize, a.shared_values().clone())];
    energy.push(fields::energy_raw(&mesh, a.values()));

    // `state` is the evolving variable, `shown` its sphere-valued view.
    let mut state = a.values().to_vec();
    let mut shown = state.clone();
    let mut next = vec![[0.0; 3]; n];
    let mut next_shown = vec![[0.0; 3]; n];
    let mut scratch = vec![[0.0; 3]; n];
    let mut projection_defect: f64 = 0.0;

    for step in 1..=steps {
        match cfg.scheme {
            Scheme::ProjectionExplicit => projection_step_raw(&mesh, &state, dt, &mut scratch, &mut next)?,
            Scheme::LandauLifshitz => {
                landau_lifshitz_step_raw(&mesh, &state, dt, cfg.damping, &mut scratch, &mut next)?
            }
            Scheme::Penalized => {
                let eps = cfg.epsilon.expect("validated");
                penalized_step_raw(&mesh, &state, dt, eps, &mut scratch, &mut next)?
            }
            Scheme::Constant => unreachable!(),
        }
        if cfg.scheme == Scheme::Penalized {
            projection_defect = projection_defect.max(project_interior(&mesh, &next, &mut next_shown));
        } else {
            next_shown.copy_from_slice(&next);
        }
        let k = squared_rate(&mesh, &next_shown, &shown, dt);
        kinetic.push(k);
        dissipation.push(weight * k);
        energy.push(fields::energy_raw(&mesh, &next_shown));
        if let Some(node) = next_shown.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFinite { node });
        }
        std::mem::swap(&mut state, &mut next);
        std::mem::swap(&mut shown, &mut next_shown);
        if cfg.stores(step, steps) {
            snapshots.push((step, Arc::new(shown.clone())));
        }
    }

    let ledger_tolerance = cfg.ledger_tolerance.unwrap_or(10.0 * dt * energy[0]);
    Ok(Trajectory {
        mesh,
        tag: cfg.scheme.tag().to_string(),
        config: cfg.clone(),
        dt,
        steps,
        snapshots,
        energy,
        dissipation,
        kinetic,
        ledger_tolerance,
        projection_defect,
    })
}

/// The path `u(t) = a`, admitted only when `a` passes the weak-harmonicity gate.
pub fn constant_trajectory(a: &DirectorField, cfg: &SchemeConfig) -> Result<(Trajectory, GateReport)> {
    let mesh = a.mesh().clone();
    check_datum(a)?;
    if !(cfg.dt > 0.0) || !(cfg.horizon >= 10.0 * cfg.dt) || cfg.stride == 0 {
        return Err(Error::Config(format!("invalid time grid dt={} horizon={}", cfg.dt, cfg.horizon)));
    }
    let threshold = match cfg.gate_threshold {
        Some(t) => t,
        None => default_gate_threshold(a)?,
    };
    let report = weak_harmonic_gate(a, &gate_test_fields(&mesh), threshold)?;
    if !report.passed {
        return Err(Error::NotWeaklyHarmonic {
            residual: report.max_normalized_residual,
            threshold: report.threshold,
        });
    }
    let steps = cfg.steps();
    let e0 = fields::energy_raw(&mesh, a.values());
    let shared = a.shared_values().clone();
    let snapshots = (0..=steps)
        .filter(|&s| cfg.stores(s, steps))
        .map(|s| (s, shared.clone()))
        .collect();
    let traj = Trajectory {
        mesh,
        tag: Scheme::Constant.tag().to_string(),
        config: SchemeConfig { scheme: Scheme::Constant, ..cfg.clone() },
        dt: cfg.dt,
        steps,
        snapshots,
        energy: vec![e0; steps + 1],
        dissipation: vec![0.0; steps],
        kinetic: vec![0.0; steps],
        ledger_tolerance: cfg.ledger_tolerance.unwrap_or(10.0 * cfg.dt * e0),
        projection_defect: 0.0,
    };
    Ok((traj, report))
}

/// `E_{m+s} + Σ_{r=m}^{m+s-1} d_r - E_m`; admissible when `<= ε_E`.
pub fn energy_inequality_check(traj: &Trajectory, m: usize, s: usize) -> Result<f64> {
    let end = m
        .checked_add(s)
        .filter(|&e| e <= traj.steps)
        .ok_or_else(|| Error::IndexOutOfRange(format!("m={m}, s={s} beyond {} steps", traj.steps)))?;
    let spent: f64 = traj.dissipation[m..end].iter().sum();
    Ok(traj.energy[end] + spent - traj.energy[m])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalitySweep {
    pub worst_residual: f64,
    pub worst_start: usize,
    pub worst_length: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Worst energy-inequality residual over every pair `(m, s)` of ledger steps,
/// `t = 0` included.
pub fn energy_inequality_sweep(traj: &Trajectory) -> InequalitySweep {
    // S_n = E_n + D_n with D_n the accumulated dissipation; residual(m, n) = S_n - S_m.
    let mut acc = 0.0;
    let mut best_start = 0;
    let mut min_s = traj.energy[0];
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = (0, 0);
    for n in 0..=traj.steps {
        if n > 0 {
            acc += traj.dissipation[n - 1];
        }
        let s = traj.energy[n] + acc;
        if s < min_s {
            min_s = s;
            best_start = n;
        }
        let r = s - min_s;
        if r > worst {
            worst = r;
            worst_at = (best_start, n - best_start);
        }
    }
    InequalitySweep {
        worst_residual: worst,
        worst_start: worst_at.0,
        worst_length: worst_at.1,
        tolerance: traj.ledger_tolerance,
        passed: worst <= traj.ledger_tolerance,
    }
}
