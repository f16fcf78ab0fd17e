//! Discrete checks that a trajectory is a global weak solution.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fields::{self, gate_test_fields, h1_seminorm, DirectorField};
use crate::flow::{energy_inequality_sweep, Trajectory};
use crate::mesh::VectorField;
use crate::vec3::{self, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Nodewise `| |u| - 1 |`.
    pub norm: f64,
    /// Energy ledger tolerance; the trajectory's own `10 dt E_0` if unset.
    pub ledger: Option<f64>,
    /// Normalized weak-form defect; see [`default_weak_defect_threshold`].
    pub weak_defect: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { norm: 1e-12, ledger: None, weak_defect: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub passed: bool,
    pub worst: f64,
    pub threshold: f64,
    pub detail: String,
}

impl ItemReport {
    fn new(worst: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { passed: worst <= threshold, worst, threshold, detail: detail.into() }
    }
}

/// One entry per item i) to v).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub constraint: ItemReport,
    pub initial_and_trace: ItemReport,
    pub finite_energy: ItemReport,
    pub weak_form: ItemReport,
    pub energy_inequality: ItemReport,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.items().iter().all(|(_, r)| r.passed)
    }

    pub fn items(&self) -> [(&'static str, &ItemReport); 5] {
        [
            ("constraint", &self.constraint),
            ("initial-and-trace", &self.initial_and_trace),
            ("finite-energy", &self.finite_energy),
            ("weak-form", &self.weak_form),
            ("energy-inequality", &self.energy_inequality),
        ]
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.items().iter().filter(|(_, r)| !r.passed).map(|(n, _)| *n).collect()
    }
}

/// `(dt + Δs_max) max(1, sqrt(2 E_0))` with `Δs_max` the widest gap between
/// stored snapshots.
///
/// The explicit schemes miss the time-integrated weak form by `O(dt)` and the
/// trapezoid over stored snapshots adds `O(Δs^2)`, both relative to the
/// energy scale. A flow of a different equation, such as precession-dominated
/// Landau–Lifshitz, leaves an `O(1)` defect and fails.
pub fn default_weak_defect_threshold(traj: &Trajectory) -> f64 {
    let steps: Vec<usize> = traj.stored_steps().collect();
    let widest = steps.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(1).max(1);
    let e0 = traj.energies()[0];
    (1 + widest) as f64 * traj.dt() * (2.0 * e0).sqrt().max(1.0)
}

/// Runs items i) to v) with the gate test fields as weak-form tests.
pub fn admissible(traj: &Trajectory, a: &DirectorField, tol: &Tolerances) -> Result<AdmissibilityReport> {
    let tests = gate_test_fields(a.mesh());
    admissible_with_tests(traj, a, tol, &tests)
}

pub fn admissible_with_tests(
    traj: &Trajectory,
    a: &DirectorField,
    tol: &Tolerances,
    tests: &[VectorField],
) -> Result<AdmissibilityReport> {
    fields::ensure_same_mesh(traj.mesh(), a.mesh())?;
    let mesh = traj.mesh().as_ref();
    for (i, eta) in tests.iter().enumerate() {
        fields::check_test_vanishes(mesh, i, eta)?;
    }
    let ledger_tol = tol.ledger.unwrap_or(traj.ledger_tolerance());

    Ok(AdmissibilityReport {
        constraint: check_constraint(traj, tol.norm),
        initial_and_trace: check_initial_and_trace(traj, a),
        finite_energy: check_finite_energy(traj, ledger_tol),
        weak_form: check_weak_form(traj, tests, tol.weak_defect.unwrap_or_else(|| default_weak_defect_threshold(traj)))?,
        energy_inequality: {
            let sweep = energy_inequality_sweep(traj);
            ItemReport::new(
                sweep.worst_residual,
                ledger_tol,
                format!("worst at m={} s={}", sweep.worst_start, sweep.worst_length),
            )
        },
    })
}

fn check_constraint(traj: &Trajectory, tol: f64) -> ItemReport {
    let mut worst: f64 = 0.0;
    let mut at = 0;
    for (step, values) in &traj.snapshots {
        for &node in traj.mesh.interior().iter().chain(traj.mesh.trace_nodes()) {
            let d = (vec3::norm(values[node]) - 1.0).abs();
            let d = if d.is_nan() { f64::INFINITY } else { d };
            if d > worst {
                worst = d;
                at = *step;
            }
        }
    }
    ItemReport::new(worst, tol, format!("worst at step {at}"))
}

fn check_initial_and_trace(traj: &Trajectory, a: &DirectorField) -> ItemReport {
    let mesh = traj.mesh.as_ref();
    let mut worst: f64 = 0.0;
    let mut detail = String::from("exact");
    let first = &traj.snapshots[0];
    if first.0 != 0 {
        return ItemReport::new(f64::INFINITY, 0.0, "initial snapshot missing");
    }
    for n in 0..mesh.node_count() {
        let d = vec3::norm(vec3::sub(first.1[n], a.values()[n]));
        if first.1[n] != a.values()[n] {
            worst = worst.max(d.max(f64::MIN_POSITIVE));
            detail = format!("initial datum differs at node {n}");
        }
    }
    for (step, values) in &traj.snapshots {
        for &b in mesh.trace_nodes() {
            if values[b] != a.values()[b] {
                let d = vec3::norm(vec3::sub(values[b], a.values()[b]));
                worst = worst.max(d.max(f64::MIN_POSITIVE));
                detail = format!("band node {b} moved at step {step}");
            }
        }
    }
    ItemReport::new(worst, 0.0, detail)
}

/// Bounded energy plus the discrete `C([0,T]; L^2)` modulus
/// `||u_k - u_j|| <= sqrt((t_k - t_j) Σ ||δu||^2/dt)` between consecutive stored
/// snapshots, which follows from Cauchy–Schwarz for an honest ledger.
fn check_finite_energy(traj: &Trajectory, ledger_tol: f64) -> ItemReport {
    let e0 = traj.energy[0];
    if let Some(m) = traj.energy.iter().position(|e| !e.is_finite()) {
        return ItemReport::new(f64::INFINITY, 0.0, format!("non-finite energy at step {m}"));
    }
    let excess = traj.energy.iter().map(|&e| e - e0).fold(0.0, f64::max);
    let mut worst = excess - ledger_tol;
    let mut detail = format!("max energy excess {excess:.3e}");
    for w in traj.snapshots.windows(2) {
        let (j, k) = (w[0].0, w[1].0);
        let dist = traj.mesh.l2_distance(&w[0].1, &w[1].1);
        // Summed per window: prefix differences cancel once the motion is slow.
        let spent: f64 = traj.kinetic[j..k].iter().sum();
        let budget = ((k - j) as f64 * traj.dt * spent).sqrt();
        // Each per-step difference carries an absolute rounding error near 1e-16.
        let over = dist - (budget * (1.0 + 1e-9) + 1e-14 * (1 + k - j) as f64);
        if over > worst {
            worst = over;
            detail = format!("tightest L2 modulus between steps {j} and {k}");
        }
    }
    // Reported as a margin: passing means `worst <= 0`.
    ItemReport::new(worst, 0.0, detail)
}

/// `W_η(t_k) = <u_k - u_0, η> - ∫_0^{t_k} <τ(u), η> dt`, trapezoid over stored
/// snapshots, normalized by `|η|_{H^1} (1 + t_k)`.
fn check_weak_form(traj: &Trajectory, tests: &[VectorField], threshold: f64) -> Result<ItemReport> {
    let mesh = traj.mesh.as_ref();
    let sizes: Vec<f64> = tests.iter().map(|t| h1_seminorm(mesh, t)).collect::<Result<_>>()?;
    let u0 = traj.snapshots[0].1.clone();
    let mut tau = vec![[0.0; 3]; mesh.node_count()];
    let mut integral = vec![0.0; tests.len()];
    let mut prev: Option<(f64, Vec<f64>)> = None;
    let mut worst: f64 = 0.0;
    let mut detail = String::from("no tests");
    for (step, values) in &traj.snapshots {
        let t = traj.time(*step);
        fields::tension_raw(mesh, values, &mut tau);
        let pairing: Vec<f64> = tests.iter().map(|eta| mesh.inner(&tau, eta)).collect();
        if let Some((tp, pp)) = &prev {
            for i in 0..tests.len() {
                integral[i] += 0.5 * (t - tp) * (pairing[i] + pp[i]);
            }
        }
        let diff: Vec<Vec3> = values.iter().zip(u0.iter()).map(|(a, b)| vec3::sub(*a, *b)).collect();
        for (i, eta) in tests.iter().enumerate() {
            if sizes[i] == 0.0 {
                continue;
            }
            let w = (mesh.inner(&diff, eta) - integral[i]).abs() / (sizes[i] * (1.0 + t));
            if w > worst || w.is_nan() {
                worst = if w.is_nan() { f64::INFINITY } else { w };
                detail = format!("worst for test {i} at step {step}");
            }
        }
        prev = Some((t, pairing));
    }
    Ok(ItemReport::new(worst, threshold, detail))
}
