//! Experiment instances: the planar counterexamples, the `ℓ₂` unbounded construction and
//! stable scenarios.

mod ell2;
mod planar;
mod scenarios;

pub use ell2::{
    a_sequence, build_ell2_construction, default_start, ell2_aw_certificate, ell2_schedule, run_ell2,
    AwCertificate, Checkpoint, ConditionCheck, Ell2Block, Ell2Construction, Ell2Params, Ell2Run,
    DEFAULT_BLOCK_BUDGET,
};
pub use planar::{
    example_unbounded_schedule, example_unstable_bodies, example_unstable_schedule,
    run_example_unbounded_lines, run_example_unstable, unbounded_line, unstable_target, x_axis,
    UnstableBodies,
};
pub use scenarios::{stable_scenario, ScenarioSpec, StableScenario};
