use std::sync::Arc;

use hfss_core::fields::make_aligned_probe;
use hfss_core::flow::{constant_trajectory, run_flow};
use hfss_core::maps;
use hfss_core::selection::{
    admissible, build_ensemble, concatenate, concatenate_checked, discounted_functional, discounted_integral,
    enumeration_distinctness, refine_mask, select, select_from, semigroup_check, shift, Discounted, Functional,
    SelectionConfig, Tolerances,
};
use hfss_core::{BallMesh, DirectorField, Error, SchemeConfig, Trajectory};
use proptest::prelude::*;

fn mesh(n: usize) -> Arc<BallMesh> {
    Arc::new(BallMesh::new(n).unwrap())
}

fn dt_for(m: &BallMesh) -> f64 {
    m.spacing().powi(2) / 7.0
}

fn same_on_common_steps(x: &Trajectory, y: &Trajectory) -> bool {
    x.steps() == y.steps()
        && x.energies() == y.energies()
        && x.stored_steps().filter(|&s| y.is_stored(s)).all(|s| x.snapshot(s).unwrap() == y.snapshot(s).unwrap())
}

#[test]
fn projection_flow_and_harmonic_constant_path_are_admissible() {
    let m = mesh(12);
    let dt = dt_for(&m);
    let u = maps::twisted(m.clone()).unwrap();
    let t = run_flow(&u, &SchemeConfig::projection(dt, 0.3)).unwrap();
    assert!(admissible(&t, &u, &Tolerances::default()).unwrap().passed());

    let gc = maps::great_circle(m.clone()).unwrap();
    let (c, _) = constant_trajectory(&gc, &SchemeConfig::constant(dt, 0.3)).unwrap();
    assert!(admissible(&c, &gc, &Tolerances::default()).unwrap().passed());
}

#[test]
fn perturbed_band_fails_item_two_only() {
    let m = mesh(12);
    let dt = dt_for(&m);
    let u = maps::twisted(m.clone()).unwrap();
    let mut t = run_flow(&u, &SchemeConfig::projection(dt, 0.3)).unwrap();
    let mut values = t.snapshot(5).unwrap().values().to_vec();
    let b = m.trace_nodes()[0];
    values[b] = [values[b][1], values[b][2], values[b][0]];
    t.replace_snapshot(5, values).unwrap();
    let report = admissible(&t, &u, &Tolerances::default()).unwrap();
    assert!(!report.initial_and_trace.passed);
    assert!(report.constraint.passed);
    assert!(report.energy_inequality.passed);
}

#[test]
fn broken_norm_fails_item_one() {
    let m = mesh(8);
    let dt = dt_for(&m);
    let u = maps::twisted(m.clone()).unwrap();
    let mut t = run_flow(&u, &SchemeConfig::projection(dt, 20.0 * dt)).unwrap();
    let mut values = t.snapshot(3).unwrap().values().to_vec();
    let n = m.interior()[4];
    values[n] = [values[n][0] * 1.01, values[n][1] * 1.01, values[n][2] * 1.01];
    t.replace_snapshot(3, values).unwrap();
    let report = admissible(&t, &u, &Tolerances::default()).unwrap();
    assert_eq!(report.failures()[0], "constraint");
}

#[test]
fn landau_lifshitz_is_not_a_heat_flow_solution() {
    let m = mesh(12);
    let dt = dt_for(&m) / 2.0;
    let u = maps::twisted(m.clone()).unwrap();
    let t = run_flow(&u, &SchemeConfig::landau_lifshitz(dt, 0.3, 0.0)).unwrap();
    let report = admissible(&t, &u, &Tolerances::default()).unwrap();
    assert!(!report.weak_form.passed, "{report:?}");
}

#[test]
fn admissibility_rejects_mesh_mismatch() {
    let m = mesh(8);
    let u = maps::twisted(m.clone()).unwrap();
    let t = run_flow(&u, &SchemeConfig::projection(dt_for(&m), 0.2)).unwrap();
    let other = maps::twisted(mesh(10)).unwrap();
    assert!(matches!(admissible(&t, &other, &Tolerances::default()), Err(Error::MeshMismatch { .. })));
}

#[test]
fn splice_identities() {
    let m = mesh(10);
    let dt = dt_for(&m);
    let u = maps::twisted(m.clone()).unwrap();
    let cfg = SchemeConfig::projection(dt, 60.0 * dt);
    let flow = run_flow(&u, &cfg).unwrap();

    // concatenate(u, shift(u, m), m) = u
    for k in [0, 1, 7, 16] {
        let w = concatenate(&flow, &shift(&flow, k).unwrap(), k).unwrap();
        assert_eq!(w, flow);
    }

    // restarting the deterministic step map reproduces the flow bit-exactly
    let k = 9;
    let restart_cfg = SchemeConfig { horizon: (60 - k) as f64 * dt, ..cfg.clone() };
    let restarted = run_flow(&flow.snapshot(k).unwrap(), &restart_cfg).unwrap();
    let w = concatenate_checked(&flow, &restarted, k, &u, &Tolerances::default()).unwrap();
    assert!(same_on_common_steps(&w, &flow));
    assert_eq!(w.terminal(), flow.terminal());
}

#[test]
fn splice_at_zero_returns_the_second_path() {
    let m = mesh(12);
    let dt = dt_for(&m);
    let gc = maps::great_circle(m.clone()).unwrap();
    let (c, _) = constant_trajectory(&gc, &SchemeConfig::constant(dt, 40.0 * dt)).unwrap();
    let p = run_flow(&gc, &SchemeConfig::projection(dt, 40.0 * dt)).unwrap();
    assert_eq!(concatenate(&c, &p, 0).unwrap(), p);
}

#[test]
fn splice_errors() {
    let m = mesh(8);
    let dt = dt_for(&m);
    let u = maps::twisted(m.clone()).unwrap();
    let flow = run_flow(&u, &SchemeConfig::projection(dt, 60.0 * dt).with_storage(10, 4)).unwrap();
    let other = run_flow(&maps::great_circle(m.clone()).unwrap(), &SchemeConfig::projection(dt, 20.0 * dt)).unwrap();
    assert!(matches!(concatenate(&flow, &other, 3), Err(Error::Concatenation(_))));
    assert!(matches!(concatenate(&flow, &other, 7), Err(Error::Storage(7))));
    assert!(matches!(shift(&flow, 7), Err(Error::Storage(7))));
}

#[test]
fn shift_examples() {
    let m = mesh(12);
    let dt = dt_for(&m);
    let gc = maps::great_circle(m.clone()).unwrap();
    let (c, _) = constant_trajectory(&gc, &SchemeConfig::constant(dt, 30.0 * dt)).unwrap();
    let s = shift(&c, 4).unwrap();
    assert_eq!(s.steps(), 26);
    assert!(s.snapshots().all(|(_, f)| f == gc));
    assert_eq!(shift(&c, 0).unwrap(), c);

    let u = maps::twisted(m.clone()).unwrap();
    let t = run_flow(&u, &SchemeConfig::projection(dt, 30.0 * dt)).unwrap();
    let s = shift(&t, 5).unwrap();
    assert_eq!(s.energies(), &t.energies()[5..]);
    assert_eq!(s.dissipation(), &t.dissipation()[5..]);
    assert_eq!(s.initial(), t.snapshot(5).unwrap());
}

#[test]
fn concatenation_keeps_functionals_additive() {
    let m = mesh(10);
    let dt = dt_for(&m);
    let u = maps::twisted(m.clone()).unwrap();
    let flow = run_flow(&u, &SchemeConfig::projection(dt, 80.0 * dt)).unwrap();
    let k = 12;
    let gc_cfg = SchemeConfig::projection(dt, (80 - k) as f64 * dt);
    let tail = run_flow(&flow.snapshot(k).unwrap(), &gc_cfg).unwrap();
    let w = concatenate(&flow, &tail, k).unwrap();
    let phi = make_aligned_probe(&u).unwrap();
    let whole = discounted_functional(&w, 1.5, &phi).unwrap();
    let later = discounted_functional(&tail, 1.5, &phi).unwrap();
    let times: Vec<f64> = (0..=k).map(|s| flow.time(s)).collect();
    let vals: Vec<f64> = (0..=k).map(|s| phi.evaluate(&flow.snapshot(s).unwrap()).unwrap()).collect();
    let head = discounted_integral(&times, &vals, 1.5).unwrap();
    let rebuilt = head.value + (-1.5 * flow.time(k)).exp() * later.value;
    assert!((whole.value - rebuilt).abs() <= whole.quadrature_error + head.quadrature_error + later.quadrature_error);
}

#[test]
fn discounted_limits() {
    let times: Vec<f64> = (0..=400).map(|i| i as f64 * 0.25).collect();
    let d = discounted_integral(&times, &vec![0.6; times.len()], 0.5).unwrap();
    assert!((d.value - 0.6 / 0.5).abs() < 1e-12);
    assert!(d.tail_bound < 1e-20);
    assert!(matches!(discounted_integral(&times, &times, 0.0), Err(Error::InvalidRate(_))));
}

#[test]
fn selection_config_rules() {
    let m = mesh(8);
    let a = maps::great_circle(m.clone()).unwrap();
    let base = SelectionConfig::from_enumeration(&a, "").unwrap();
    assert_eq!(base.functionals.len(), 120);
    let aligned = SelectionConfig::from_enumeration(&a, "aligned").unwrap();
    assert_eq!(aligned.functionals.len(), 121);
    assert_eq!(aligned.functionals[0].label(), "λ=1:+aligned");
    let flipped = SelectionConfig::from_enumeration(&a, "-aligned").unwrap();
    assert_eq!(flipped.functionals[0].label(), "λ=1:-aligned");

    let s1 = SelectionConfig::from_enumeration(&a, "shuffle:7").unwrap();
    let s2 = SelectionConfig::from_enumeration(&a, "shuffle:7").unwrap();
    assert_eq!(s1.labels(), s2.labels());
    let mut sorted = s1.labels();
    sorted.sort();
    let mut expect = base.labels();
    expect.sort();
    assert_eq!(sorted, expect);
    assert_ne!(s1.labels(), base.labels());

    let rev = SelectionConfig::from_enumeration(&a, "reverse").unwrap();
    assert_eq!(rev.labels().first(), base.labels().last());
    assert!(SelectionConfig::from_enumeration(&a, "sideways").is_err());

    assert!(base.validate(Some(20.0)).is_ok());
    assert!(matches!(base.validate(Some(10.0)), Err(Error::Config(_))));
    assert!(SelectionConfig::new(vec![], 0.0).is_err());
    assert!(Functional::new(-1.0, make_aligned_probe(&a).unwrap()).is_err());
}

fn harmonic_setup(n: usize) -> (DirectorField, Vec<SchemeConfig>) {
    let m = mesh(n);
    let dt = dt_for(&m);
    let a = maps::equator(m.clone()).unwrap();
    let cfgs = vec![
        SchemeConfig::constant(dt, 20.0).with_storage(100, 4),
        SchemeConfig::projection(dt, 20.0).with_storage(100, 4),
    ];
    (a, cfgs)
}

#[test]
fn aligned_probe_decides_between_constant_and_dissipative_paths() {
    let (a, cfgs) = harmonic_setup(12);
    let plus = SelectionConfig::from_enumeration(&a, "aligned").unwrap();
    let minus = SelectionConfig::from_enumeration(&a, "-aligned").unwrap();
    let ensemble = build_ensemble(&a, &cfgs, &plus.tolerances).unwrap();
    assert_eq!(ensemble.set.ids(), vec![0, 1]);
    assert_eq!(select_from(&ensemble.set, &plus).unwrap().id(), 0);
    assert_eq!(select_from(&ensemble.set, &minus).unwrap().id(), 1);
    assert!(enumeration_distinctness(&a, &cfgs, &plus, &minus).unwrap());
    assert!(!enumeration_distinctness(&a, &cfgs, &plus, &plus).unwrap());
    assert_eq!(semigroup_check(&a, &cfgs, &minus, 0, 100).unwrap(), 0.0);
    assert_eq!(semigroup_check(&a, &cfgs, &minus, 3, ensemble.set.members()[1].trajectory.steps() - 3).unwrap(), 0.0);
}

#[test]
fn singleton_ensembles_ignore_the_enumeration() {
    let m = mesh(10);
    let dt = dt_for(&m);
    let a = maps::twisted(m.clone()).unwrap();
    let cfgs = vec![SchemeConfig::projection(dt, 20.0).with_storage(200, 4)];
    let plus = SelectionConfig::from_enumeration(&a, "aligned").unwrap();
    let minus = SelectionConfig::from_enumeration(&a, "-aligned").unwrap();
    let x = select(&a, &cfgs, &plus).unwrap();
    let y = select(&a, &cfgs, &minus).unwrap();
    assert_eq!(x.trajectory, y.trajectory);
    assert!(x.transcript.rounds.is_empty());
    assert!(!enumeration_distinctness(&a, &cfgs, &plus, &minus).unwrap());
}

#[test]
fn non_harmonic_datum_drops_the_constant_path() {
    let m = mesh(24);
    let dt = m.spacing().powi(2) / 6.5;
    let a = maps::twisted(m.clone()).unwrap();
    let cfgs = vec![SchemeConfig::constant(dt, 0.2), SchemeConfig::projection(dt, 0.2)];
    let ensemble = build_ensemble(&a, &cfgs, &Tolerances::default()).unwrap();
    assert_eq!(ensemble.set.ids(), vec![1]);
    assert!(!ensemble.gate.unwrap().passed);
    assert!(ensemble.candidates[0].error.is_some());
}

#[test]
fn all_inadmissible_is_an_empty_solution_set() {
    let m = mesh(12);
    let dt = dt_for(&m) / 2.0;
    let a = maps::twisted(m.clone()).unwrap();
    let cfgs = vec![SchemeConfig::landau_lifshitz(dt, 0.3, 0.0)];
    assert!(matches!(build_ensemble(&a, &cfgs, &Tolerances::default()), Err(Error::EmptySolutionSet)));
}

#[test]
fn selection_is_deterministic() {
    let (a, cfgs) = harmonic_setup(10);
    let sel = SelectionConfig::from_enumeration(&a, "shuffle:3").unwrap();
    let x = select(&a, &cfgs, &sel).unwrap();
    let y = select(&a, &cfgs, &sel).unwrap();
    assert_eq!(x.trajectory, y.trajectory);
    assert_eq!(x.transcript, y.transcript);
}

fn discounted(value: f64, q: f64) -> Discounted {
    Discounted { value, tail_bound: 1e-12, quadrature_error: q, rate: 1.0, horizon: 20.0 }
}

proptest! {
    #[test]
    fn refine_mask_is_idempotent_and_never_empty(
        values in proptest::collection::vec((-2.0f64..2.0, 0.0f64..1e-3), 1..8),
        delta in 1e-12f64..1e-2,
    ) {
        let ds: Vec<Discounted> = values.iter().map(|&(v, q)| discounted(v, q)).collect();
        let mask = refine_mask(&ds, delta);
        prop_assert!(mask.iter().any(|&k| k));
        let kept: Vec<Discounted> = ds.iter().zip(&mask).filter(|(_, &k)| k).map(|(d, _)| *d).collect();
        let again = refine_mask(&kept, delta);
        prop_assert!(again.iter().all(|&k| k));
    }
}
