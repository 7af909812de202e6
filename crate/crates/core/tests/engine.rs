mod common;

use altproj_core::constructions::{
    build_ell2_construction, ell2_schedule, example_unbounded_schedule, example_unstable_schedule,
    stable_scenario, Ell2Params, ScenarioSpec,
};
use altproj_core::engine::{run_classical, run_perturbed, RunConfig, Runner, TerminalStatus, Trace};
use altproj_core::sets::SetDescriptor;
use altproj_core::Point;
use common::*;
use proptest::prelude::*;

fn assert_fejer(t: &Trace) {
    let mut prev = t.start.norm();
    for r in &t.records {
        let tol = 1e-12 * prev.max(1.0);
        assert!(r.norm_a <= r.norm_b + tol && r.norm_b <= prev + tol, "n = {}", r.n);
        prev = r.norm_a;
    }
}

#[test]
fn block_ends_grow_monotonically() {
    let t = run_perturbed(&example_unbounded_schedule(6, 1_000_000).unwrap(), &RunConfig::new(p(&[0.0, 0.0]), 10_000_000))
        .unwrap();
    assert_eq!(t.status, TerminalStatus::ScheduleCompleted);
    for w in t.block_ends.windows(2) {
        assert!(w[1].block == w[0].block + 1);
        assert!(w[1].end_n > w[0].end_n);
        assert!(w[1].norm_a > w[0].norm_a);
    }

    let c = build_ell2_construction(&Ell2Params { d: 4, h_max: 3, ..Ell2Params::default() }).unwrap();
    let cfg = RunConfig::new(c.start_point(), c.total_len() as usize).with_stride(1000);
    let t = run_perturbed(&ell2_schedule(&c).unwrap(), &cfg).unwrap();
    let norms: Vec<f64> = t.block_ends.iter().map(|e| e.norm_a).collect();
    assert_eq!(norms.len(), 3);
    assert!(norms.windows(2).all(|w| w[1] > w[0]));
    assert!(norms.iter().enumerate().all(|(i, n)| n * n > 2f64.powi(i as i32 + 1)));
}

#[test]
fn origin_containing_runs_are_fejer() {
    let sc = stable_scenario(&ScenarioSpec::InteriorIntersection {}, 0.5).unwrap();
    assert_fejer(&run_perturbed(&sc.schedule(), &RunConfig::new(sc.default_start.clone(), 2000)).unwrap());
    let ball = SetDescriptor::ball(p(&[0.5, 0.0]), 1.0).unwrap();
    let half = SetDescriptor::halfspace(p(&[1.0, 1.0]), 0.2).unwrap();
    assert_fejer(&run_classical(&ball, &half, &RunConfig::new(p(&[4.0, 3.0]), 500)).unwrap());
}

fn resumed_matches(schedule: altproj_core::engine::Schedule, cfg: RunConfig, frac: f64) {
    let full = Runner::new(schedule.clone(), cfg.clone()).unwrap().run().unwrap();
    let index = ((full.records.len() - 1) as f64 * frac) as usize;
    let resumed = Runner::resume(schedule, cfg, &full, index).unwrap().run().unwrap();
    assert_eq!(resumed.to_csv_string(&[]), full.to_csv_string(&[]));
    assert_eq!(resumed.status, full.status);
    assert_eq!(resumed.block_ends.len(), full.block_ends.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn resume_reproduces_the_run(frac in 0.0f64..1.0) {
        resumed_matches(example_unstable_schedule(5, 10_000).unwrap(), RunConfig::new(p(&[0.0, 0.0]), 50_000), frac);
        let sc = stable_scenario(&ScenarioSpec::TangentDisc {}, 1.0).unwrap();
        resumed_matches(sc.schedule(), RunConfig::new(sc.default_start.clone(), 300), frac);
    }

    #[test]
    fn subspace_pairs_shrink(phi in 0.05f64..1.5, x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let axis = SetDescriptor::span(2, &[p(&[1.0, 0.0])]).unwrap();
        let line = SetDescriptor::span(2, &[p(&[phi.cos(), phi.sin()])]).unwrap();
        let t = run_classical(&axis, &line, &RunConfig::new(Point::new(vec![x, y]).unwrap(), 20)).unwrap();
        assert_fejer(&t);
    }
}
