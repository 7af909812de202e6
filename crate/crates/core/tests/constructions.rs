use altproj_core::constructions::{
    build_ell2_construction, example_unstable_bodies, run_ell2, run_example_unbounded_lines,
    run_example_unstable, stable_scenario, unbounded_line, Ell2Params, ScenarioSpec,
};
use altproj_core::engine::{run_classical, RunConfig, TerminalStatus};
use altproj_core::variational::{aw_distance, AwMode};
use altproj_core::Point;
use proptest::prelude::*;

#[test]
fn small_ell2_construction_runs_to_its_closed_form() {
    let params = Ell2Params { d: 4, h_max: 3, ..Ell2Params::default() };
    let c = build_ell2_construction(&params).unwrap();
    assert!(c.verify().iter().all(|ch| ch.holds));
    let run = run_ell2(&c, 50, 1000, 9).unwrap();
    assert!(run.max_rel_err() < 1e-9);
    for (i, n2) in run.block_end_norm_sq.iter().enumerate() {
        assert!(*n2 > 2f64.powi(i as i32 + 1));
    }
}

#[test]
fn ell2_params_reject_unknown_fields() {
    let ok: Ell2Params = serde_json::from_str(r#"{"d": 5, "H": 2, "ratio": 0.5}"#).unwrap();
    assert_eq!((ok.d, ok.h_max), (5, 2));
    assert!(serde_json::from_str::<Ell2Params>(r#"{"d": 5, "H": 2, "ratio": 0.5, "x": 1}"#).is_err());
}

#[test]
fn planar_bodies_contain_the_origin() {
    for k in 1..6 {
        let bodies = example_unstable_bodies(k).unwrap();
        let origin = Point::zeros(2);
        assert!(bodies.a.membership(&origin, 1e-12).unwrap());
        assert!(bodies.c.dim() == 2 && bodies.d.dim() == 2 && bodies.b.dim() == 2);
    }
    let t = run_example_unstable(4, 10_000).unwrap();
    assert_eq!(t.status, TerminalStatus::ScheduleCompleted);
}

#[test]
fn lines_pass_through_their_intercepts() {
    for k in 1..5 {
        let line = unbounded_line(k).unwrap();
        let k = k as f64;
        assert!(line.membership(&Point::new(vec![0.0, 1.0 / k]).unwrap(), 1e-12).unwrap());
        assert!(line.membership(&Point::new(vec![k, 0.0]).unwrap(), 1e-12).unwrap());
    }
    let t = run_example_unbounded_lines(3, 100_000).unwrap();
    assert_eq!(t.blocks_completed(), 3);
}

#[test]
fn scenario_specs_deserialize() {
    let spec: ScenarioSpec =
        serde_json::from_str(r#"{"kind": "transversal_subspaces", "phi": 1.0, "psi": 0.5}"#).unwrap();
    let sc = stable_scenario(&spec, 0.5).unwrap();
    assert_eq!(sc.default_start.dim(), 4);
    assert!(serde_json::from_str::<ScenarioSpec>(r#"{"kind": "tangent_disc", "extra": 1}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tail_coordinates_grow_within_each_block(h in 1usize..=4, frac in 0.0f64..1.0) {
        let c = build_ell2_construction(&Ell2Params::default()).unwrap();
        let t = ((c.blocks[h - 1].len - 1) as f64 * frac) as u64;
        let (now, next) = (c.closed_form(h, t), c.closed_form(h, t + 1));
        for n in h..c.d {
            prop_assert!(next[n] > now[n], "h={h} t={t} n={}", n + 1);
            prop_assert!(next[n] < (1.0 + c.blocks[h - 1].m) * c.blocks[h - 1].alpha_in[n]);
        }
    }
}

#[test]
fn limit_pair_fixes_a_common_point_in_one_step() {
    let bodies = example_unstable_bodies(1).unwrap();
    let start = Point::new(vec![0.0, 0.2]).unwrap();
    let t = run_classical(&bodies.a, &bodies.b, &RunConfig::new(start, 3)).unwrap();
    assert_eq!(t.records[0].a, Point::zeros(2));
    assert!(t.records.iter().all(|r| r.a == Point::zeros(2)));
}

#[test]
fn perturbed_bodies_approach_the_limits() {
    let mut last = f64::INFINITY;
    for h in 1..6 {
        let bodies = example_unstable_bodies(2 * h).unwrap();
        let est = aw_distance(&bodies.c, &bodies.a, 2.0, 1000, 1).unwrap();
        let mirror = aw_distance(&bodies.d, &bodies.b, 2.0, 1000, 1).unwrap();
        assert!((est.h_n - mirror.h_n).abs() < 1e-12);
        assert!(est.h_n < last);
        last = est.h_n;
    }
}

#[test]
fn lines_approach_the_axis_exactly() {
    let axis = altproj_core::constructions::x_axis();
    let mut last = f64::INFINITY;
    for k in 1..8 {
        let est = aw_distance(&unbounded_line(k).unwrap(), &axis, 2.0, 0, 0).unwrap();
        assert_eq!(est.mode, AwMode::Exact);
        assert!(est.h_n < last);
        last = est.h_n;
    }
}
