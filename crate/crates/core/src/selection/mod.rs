//! Solution sets, refinement by discounted functionals, and the selected semiflow.
//!
//! An ensemble of candidate weak solutions is generated from the configured
//! schemes, filtered by [`admissible`], and then narrowed by folding
//! [`refine`] over an ordered list of functionals `(λ_k, φ_k)`. The lowest id
//! among the survivors is the selected trajectory. Because every scheme is a
//! deterministic step map and the constant path is admitted only at weakly
//! harmonic data, restarting the selection from a selected state reproduces
//! the selected tail, which [`semigroup_check`] measures.

mod admissibility;
mod discount;
mod splice;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{gate_test_fields, make_aligned_probe, DirectorField, GateReport, ProbeFamily, ProbeFunctional};
use crate::flow::{constant_trajectory, run_flow, Scheme, SchemeConfig, Trajectory};

pub use admissibility::{
    admissible, admissible_with_tests, default_weak_defect_threshold, AdmissibilityReport, ItemReport, Tolerances,
};
pub use discount::{discounted_functional, discounted_integral, refine_mask, Discounted};
pub use splice::{concatenate, concatenate_checked, shift};

/// Smallest admissible `λ T`; keeps the tail bound `e^{-λT}/λ` near `2e-9`.
pub const MIN_RATE_HORIZON: f64 = 20.0;

/// One discounted functional `I_{λ,φ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub rate: f64,
    pub probe: ProbeFunctional,
}

impl Functional {
    pub fn new(rate: f64, probe: ProbeFunctional) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidRate(rate));
        }
        Ok(Self { rate, probe })
    }

    pub fn label(&self) -> String {
        let p = self.probe.label();
        let signed = if p.starts_with('-') { p.to_string() } else { format!("+{p}") };
        format!("λ={}:{}", self.rate, signed)
    }

    pub fn evaluate(&self, traj: &Trajectory) -> Result<Discounted> {
        discounted_functional(traj, self.rate, &self.probe)
    }

    pub fn negated(&self) -> Self {
        Self { rate: self.rate, probe: self.probe.negated() }
    }
}

#[derive(Debug, Clone)]
pub struct SelectionConfig {
    pub functionals: Vec<Functional>,
    /// Relative tie tolerance.
    pub delta: f64,
    /// Enumeration spec this list was built from, for the record.
    pub enumeration: String,
    pub tolerances: Tolerances,
}

pub const DEFAULT_DELTA: f64 = 1e-9;
pub const DEFAULT_RATES: [f64; 2] = [1.0, 2.0];
pub const DEFAULT_PROBE_DEGREE: u32 = 2;

impl SelectionConfig {
    pub fn new(functionals: Vec<Functional>, delta: f64) -> Result<Self> {
        let cfg = Self { functionals, delta, enumeration: "custom".into(), tolerances: Tolerances::default() };
        cfg.validate(None)?;
        Ok(cfg)
    }

    /// `λ ∈ {1, 2}` crossed with the signed monomial probes, reordered by `spec`.
    ///
    /// `spec` is a comma-separated list applied left to right:
    /// `reverse`, `flip` (negate every probe), `shuffle:<seed>`, and
    /// `aligned` / `-aligned`, which put `(λ=1, ±φ_a)` with the aligned probe
    /// of `a` first. An empty spec or `default` keeps the base order.
    pub fn from_enumeration(a: &DirectorField, spec: &str) -> Result<Self> {
        let family = ProbeFamily::monomial(a.mesh(), DEFAULT_PROBE_DEGREE)?;
        let mut functionals = Vec::with_capacity(DEFAULT_RATES.len() * family.len() + 1);
        for rate in DEFAULT_RATES {
            for p in family.probes() {
                functionals.push(Functional::new(rate, p.clone())?);
            }
        }
        for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token {
                "default" => {}
                "reverse" => functionals.reverse(),
                "flip" => functionals = functionals.iter().map(Functional::negated).collect(),
                "aligned" | "+aligned" => functionals.insert(0, Functional::new(1.0, make_aligned_probe(a)?)?),
                "-aligned" => functionals.insert(0, Functional::new(1.0, make_aligned_probe(a)?.negated())?),
                other => {
                    let seed = other
                        .strip_prefix("shuffle:")
                        .and_then(|s| s.parse::<u64>().ok())
                        .ok_or_else(|| Error::Config(format!("unknown enumeration token '{other}'")))?;
                    functionals.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                }
            }
        }
        Ok(Self {
            functionals,
            delta: DEFAULT_DELTA,
            enumeration: if spec.trim().is_empty() { "default".into() } else { spec.trim().to_string() },
            tolerances: Tolerances::default(),
        })
    }

    /// Checks `δ > 0`, `λ_k > 0` and, when a horizon is given, `λ_k T >= 20`.
    pub fn validate(&self, horizon: Option<f64>) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!("tie tolerance must be positive, got {}", self.delta)));
        }
        for f in &self.functionals {
            if !(f.rate > 0.0) || !f.rate.is_finite() {
                return Err(Error::InvalidRate(f.rate));
            }
            if let Some(t) = horizon {
                if f.rate * t < MIN_RATE_HORIZON * (1.0 - 1e-12) {
                    return Err(Error::Config(format!(
                        "rate {} with horizon {t} gives λT = {} < {MIN_RATE_HORIZON}",
                        f.rate,
                        f.rate * t
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<String> {
        self.functionals.iter().map(Functional::label).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Member {
    pub id: usize,
    pub trajectory: Trajectory,
}

/// A finite, non-empty set of admissible trajectories from one datum.
#[derive(Debug, Clone)]
pub struct SolutionSet {
    datum: DirectorField,
    members: Vec<Member>,
}

impl SolutionSet {
    /// Members must share mesh, time step and step count, and start at `datum`.
    pub fn new(datum: DirectorField, members: Vec<Member>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptySolutionSet)?;
        let (dt, steps) = (first.trajectory.dt(), first.trajectory.steps());
        for m in &members {
            let t = &m.trajectory;
            crate::fields::ensure_same_mesh(t.mesh(), datum.mesh())?;
            if t.dt() != dt || t.steps() != steps {
                return Err(Error::Config(format!("member {} is on a different time grid", m.id)));
            }
            if t.snapshot_values(0) != Some(datum.values()) {
                return Err(Error::Config(format!("member {} does not start at the datum", m.id)));
            }
        }
        if members.windows(2).any(|w| w[0].id >= w[1].id) {
            return Err(Error::Config("member ids must increase".into()));
        }
        Ok(Self { datum, members })
    }

    pub fn from_trajectories(datum: DirectorField, trajectories: Vec<Trajectory>) -> Result<Self> {
        let members = trajectories.into_iter().enumerate().map(|(id, trajectory)| Member { id, trajectory }).collect();
        Self::new(datum, members)
    }

    pub fn datum(&self) -> &DirectorField {
        &self.datum
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.id).collect()
    }

    pub fn horizon(&self) -> f64 {
        self.members[0].trajectory.horizon()
    }

    pub fn get(&self, id: usize) -> Option<&Trajectory> {
        self.members.iter().find(|m| m.id == id).map(|m| &m.trajectory)
    }

    /// `I_{λ,φ}` of every member, in member order.
    pub fn evaluate(&self, f: &Functional) -> Result<Vec<Discounted>> {
        self.members.par_iter().map(|m| f.evaluate(&m.trajectory)).collect()
    }
}

/// Keeps the members whose `I_{λ,φ}` is maximal up to `δ` and the
/// truncation and quadrature bounds. Order is preserved; never empty.
pub fn refine(set: &SolutionSet, rate: f64, phi: &ProbeFunctional, delta: f64) -> Result<SolutionSet> {
    let f = Functional::new(rate, phi.clone())?;
    Ok(refine_round(set, &f, delta)?.0)
}

fn refine_round(set: &SolutionSet, f: &Functional, delta: f64) -> Result<(SolutionSet, RefinementRound)> {
    let values = set.evaluate(f)?;
    let mask = refine_mask(&values, delta);
    let survivors: Vec<Member> =
        set.members.iter().zip(&mask).filter(|(_, &keep)| keep).map(|(m, _)| m.clone()).collect();
    let round = RefinementRound {
        functional: f.label(),
        values: set.members.iter().zip(&values).map(|(m, v)| (m.id, *v)).collect(),
        survivors: survivors.iter().map(|m| m.id).collect(),
    };
    Ok((SolutionSet { datum: set.datum.clone(), members: survivors }, round))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRound {
    pub functional: String,
    pub values: Vec<(usize, Discounted)>,
    pub survivors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub enumeration: String,
    pub candidates: Vec<usize>,
    pub rounds: Vec<RefinementRound>,
    pub selected: usize,
}

/// Outcome of building and filtering one candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: usize,
    pub scheme: Scheme,
    pub admitted: bool,
    pub admissibility: Option<AdmissibilityReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub set: SolutionSet,
    pub candidates: Vec<Candidate>,
    pub gate: Option<GateReport>,
}

fn check_grid(cfgs: &[SchemeConfig]) -> Result<(f64, usize)> {
    let first = cfgs.first().ok_or_else(|| Error::Config("at least one scheme is required".into()))?;
    for c in cfgs {
        if c.dt != first.dt || c.steps() != first.steps() {
            return Err(Error::Config("all schemes of an ensemble must share dt and horizon".into()));
        }
    }
    Ok((first.dt, first.steps()))
}

/// Runs every scheme from `a` and keeps the admissible outputs. Ids follow
/// the order of `cfgs`; a constant scheme whose gate fails is recorded but
/// not admitted.
pub fn build_ensemble(a: &DirectorField, cfgs: &[SchemeConfig], tol: &Tolerances) -> Result<Ensemble> {
    check_grid(cfgs)?;
    for c in cfgs {
        c.validate(a.mesh())?;
    }
    let tests = gate_test_fields(a.mesh());
    let outcomes: Vec<Result<(Trajectory, Option<GateReport>)>> = cfgs
        .par_iter()
        .map(|c| match c.scheme {
            Scheme::Constant => constant_trajectory(a, c).map(|(t, g)| (t, Some(g))),
            _ => run_flow(a, c).map(|t| (t, None)),
        })
        .collect();

    let mut gate = None;
    let mut candidates = Vec::new();
    let mut members = Vec::new();
    for (id, (cfg, outcome)) in cfgs.iter().zip(outcomes).enumerate() {
        match outcome {
            Ok((traj, g)) => {
                if g.is_some() {
                    gate = g;
                }
                let report = admissible_with_tests(&traj, a, tol, &tests)?;
                let admitted = report.passed();
                candidates.push(Candidate {
                    id,
                    scheme: cfg.scheme,
                    admitted,
                    admissibility: Some(report),
                    error: None,
                });
                if admitted {
                    members.push(Member { id, trajectory: traj });
                }
            }
            Err(e @ Error::NotWeaklyHarmonic { residual, threshold }) => {
                gate = Some(GateReport { max_normalized_residual: residual, threshold, passed: false });
                candidates.push(Candidate {
                    id,
                    scheme: cfg.scheme,
                    admitted: false,
                    admissibility: None,
                    error: Some(e.to_string()),
                });
            }
            Err(e) if e.class() == crate::error::ErrorClass::Numerical => candidates.push(Candidate {
                id,
                scheme: cfg.scheme,
                admitted: false,
                admissibility: None,
                error: Some(e.to_string()),
            }),
            Err(e) => return Err(e),
        }
    }
    if members.is_empty() {
        return Err(Error::EmptySolutionSet);
    }
    Ok(Ensemble { set: SolutionSet::new(a.clone(), members)?, candidates, gate })
}

#[derive(Debug, Clone)]
pub struct Selection {
    pub trajectory: Trajectory,
    pub transcript: Transcript,
}

impl Selection {
    pub fn id(&self) -> usize {
        self.transcript.selected
    }
}

/// Folds refinement over `sel.functionals`, stopping once a single member is left.
pub fn select_from(set: &SolutionSet, sel: &SelectionConfig) -> Result<Selection> {
    sel.validate(None)?;
    let mut current = set.clone();
    let mut rounds = Vec::new();
    for f in &sel.functionals {
        if current.len() <= 1 {
            break;
        }
        let (next, round) = refine_round(&current, f, sel.delta)?;
        rounds.push(round);
        current = next;
    }
    let chosen = current.members.first().ok_or(Error::EmptySolutionSet)?;
    Ok(Selection {
        trajectory: chosen.trajectory.clone(),
        transcript: Transcript {
            enumeration: sel.enumeration.clone(),
            candidates: set.ids(),
            rounds,
            selected: chosen.id,
        },
    })
}

/// The selection map `a -> u(a, ·)` restricted to the generated ensemble.
pub fn select(a: &DirectorField, cfgs: &[SchemeConfig], sel: &SelectionConfig) -> Result<Selection> {
    let (dt, steps) = check_grid(cfgs)?;
    sel.validate(Some(steps as f64 * dt))?;
    let ensemble = build_ensemble(a, cfgs, &sel.tolerances)?;
    select_from(&ensemble.set, sel)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupPoint {
    pub m: usize,
    pub s: usize,
    pub error: f64,
    pub first_selected: usize,
    pub restart_selected: usize,
}

fn restart_configs(cfgs: &[SchemeConfig], remaining: usize) -> Vec<SchemeConfig> {
    cfgs.iter()
        .map(|c| SchemeConfig { horizon: remaining as f64 * c.dt, ..c.clone() })
        .collect()
}

/// `||u(a, t_m + t_s) - u(u(a, t_m), t_s)||_{L^2}` with both sides selected.
pub fn semigroup_check(
    a: &DirectorField,
    cfgs: &[SchemeConfig],
    sel: &SelectionConfig,
    m: usize,
    s: usize,
) -> Result<f64> {
    let first = select(a, cfgs, sel)?;
    Ok(semigroup_grid(&first, cfgs, sel, &[(m, s)])?[0].error)
}

/// Evaluates the semigroup defect for every `(m, s)` from an existing selection.
/// Restarts are independent and run in parallel; the restart horizon is
/// `T - t_m` and `λT >= 20` is only enforced for the original horizon.
pub fn semigroup_grid(
    first: &Selection,
    cfgs: &[SchemeConfig],
    sel: &SelectionConfig,
    pairs: &[(usize, usize)],
) -> Result<Vec<SemigroupPoint>> {
    let traj = &first.trajectory;
    let dense = traj.dense_prefix();
    for &(m, s) in pairs {
        if m > dense {
            return Err(Error::IndexOutOfRange(format!("m={m} is outside the dense prefix 0..={dense}")));
        }
        if m + s > traj.steps() {
            return Err(Error::IndexOutOfRange(format!("m+s={} beyond {} steps", m + s, traj.steps())));
        }
        if !traj.is_stored(m + s) {
            return Err(Error::Storage(m + s));
        }
    }
    pairs
        .par_iter()
        .map(|&(m, s)| {
            let x = traj.snapshot(m + s)?;
            let restart = traj.snapshot(m)?;
            let second = if m == 0 {
                let ensemble = build_ensemble(&restart, cfgs, &sel.tolerances)?;
                select_from(&ensemble.set, sel)?
            } else {
                let cfgs = restart_configs(cfgs, traj.steps() - m);
                let ensemble = build_ensemble(&restart, &cfgs, &sel.tolerances)?;
                select_from(&ensemble.set, sel)?
            };
            let y = second.trajectory.snapshot(s)?;
            Ok(SemigroupPoint {
                m,
                s,
                error: x.l2_distance(&y),
                first_selected: first.id(),
                restart_selected: second.id(),
            })
        })
        .collect()
}

/// Whether two enumerations select different trajectories from the same ensemble.
///
/// Distinct means an `L^2` distance above `threshold` at some step stored in both.
pub fn enumeration_distinctness(
    a: &DirectorField,
    cfgs: &[SchemeConfig],
    first: &SelectionConfig,
    second: &SelectionConfig,
) -> Result<bool> {
    let (dt, steps) = check_grid(cfgs)?;
    first.validate(Some(steps as f64 * dt))?;
    second.validate(Some(steps as f64 * dt))?;
    let ensemble = build_ensemble(a, cfgs, &first.tolerances)?;
    let x = select_from(&ensemble.set, first)?;
    let y = select_from(&ensemble.set, second)?;
    Ok(trajectories_differ(&x.trajectory, &y.trajectory, default_distinctness_threshold(a)))
}

/// `1e-8 ||a||_{L^2}`, the comparability threshold for selected trajectories.
pub fn default_distinctness_threshold(a: &DirectorField) -> f64 {
    1e-8 * a.l2_norm()
}

pub fn trajectories_differ(x: &Trajectory, y: &Trajectory, threshold: f64) -> bool {
    x.stored_steps().any(|step| match (x.snapshot_values(step), y.snapshot_values(step)) {
        (Some(u), Some(v)) => x.mesh().l2_distance(u, v) > threshold,
        _ => false,
    })
}
