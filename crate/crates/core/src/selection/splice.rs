//! Restart plumbing: tails of trajectories and splicing two of them together.

use crate::error::{Error, Result};
use crate::fields::DirectorField;
use crate::flow::{energy_inequality_check, Trajectory};

use super::admissibility::{admissible, Tolerances};

/// The tail `s -> u(t_m + s)` as a trajectory starting at `u(t_m)`.
pub fn shift(u: &Trajectory, m: usize) -> Result<Trajectory> {
    if m > u.steps || !u.is_stored(m) {
        return Err(Error::Storage(m));
    }
    if m == 0 {
        return Ok(u.clone());
    }
    let mut config = u.config.clone();
    config.horizon = (u.steps - m) as f64 * u.dt;
    Ok(Trajectory {
        mesh: u.mesh.clone(),
        tag: u.tag.clone(),
        config,
        dt: u.dt,
        steps: u.steps - m,
        snapshots: u
            .snapshots
            .iter()
            .filter(|(s, _)| *s >= m)
            .map(|(s, v)| (s - m, v.clone()))
            .collect(),
        energy: u.energy[m..].to_vec(),
        dissipation: u.dissipation[m..].to_vec(),
        kinetic: u.kinetic[m..].to_vec(),
        ledger_tolerance: u.ledger_tolerance,
        projection_defect: u.projection_defect,
    })
}

/// `w(s) = u(s)` for `s <= t_m` and `v(s - t_m)` afterwards.
///
/// Requires `u(t_m)` stored and bit-identical to `v(0)`, matching time steps,
/// and the energy inequality of `u` on `[0, t_m]`.
pub fn concatenate(u: &Trajectory, v: &Trajectory, m: usize) -> Result<Trajectory> {
    if u.mesh.resolution() != v.mesh.resolution() {
        return Err(Error::MeshMismatch { left: u.mesh.resolution(), right: v.mesh.resolution() });
    }
    let splice = u.snapshot_values(m).ok_or(Error::Storage(m))?;
    if m > u.steps {
        return Err(Error::Storage(m));
    }
    if u.dt != v.dt {
        return Err(Error::Concatenation(format!("time steps differ: {} vs {}", u.dt, v.dt)));
    }
    let start = v.snapshot_values(0).ok_or(Error::Storage(0))?;
    if splice != start {
        return Err(Error::Concatenation(format!("restart datum differs from u at step {m}")));
    }
    let prefix = energy_inequality_check(u, 0, m)?;
    if prefix > u.ledger_tolerance {
        return Err(Error::Concatenation(format!(
            "energy inequality fails on [0, t_{m}]: residual {prefix:.3e}"
        )));
    }
    if m == 0 {
        return Ok(v.clone());
    }

    let mut snapshots: Vec<_> = u.snapshots.iter().filter(|(s, _)| *s <= m).cloned().collect();
    snapshots.extend(v.snapshots.iter().filter(|(s, _)| *s > 0).map(|(s, x)| (s + m, x.clone())));
    let mut energy = u.energy[..=m].to_vec();
    energy.extend_from_slice(&v.energy[1..]);
    let mut dissipation = u.dissipation[..m].to_vec();
    dissipation.extend_from_slice(&v.dissipation);
    let mut kinetic = u.kinetic[..m].to_vec();
    kinetic.extend_from_slice(&v.kinetic);

    let tag = if u.tag == v.tag { u.tag.clone() } else { format!("{}+{}", u.tag, v.tag) };
    let mut config = u.config.clone();
    config.horizon = (m + v.steps) as f64 * u.dt;
    Ok(Trajectory {
        mesh: u.mesh.clone(),
        tag,
        config,
        dt: u.dt,
        steps: m + v.steps,
        snapshots,
        energy,
        dissipation,
        kinetic,
        ledger_tolerance: u.ledger_tolerance.max(v.ledger_tolerance),
        projection_defect: u.projection_defect.max(v.projection_defect),
    })
}

/// [`concatenate`] followed by a full admissibility check against `a`.
pub fn concatenate_checked(
    u: &Trajectory,
    v: &Trajectory,
    m: usize,
    a: &DirectorField,
    tol: &Tolerances,
) -> Result<Trajectory> {
    let w = concatenate(u, v, m)?;
    let report = admissible(&w, a, tol)?;
    if !report.passed() {
        return Err(Error::Concatenation(format!(
            "spliced trajectory is not admissible: {}",
            report.failures().join(", ")
        )));
    }
    Ok(w)
}
