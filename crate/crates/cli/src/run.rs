//! `altproj run`: iterate a configured schedule and write its trace.

use altproj_core::constructions::{
    build_ell2_construction, ell2_aw_certificate, example_unbounded_schedule, example_unstable_schedule,
    run_ell2, stable_scenario,
};
use altproj_core::engine::{run_classical, run_perturbed, RunConfig, Schedule, TerminalStatus, Trace};
use altproj_core::variational::aw_distance;
use altproj_core::Point;
use anyhow::{bail, ensure, Context, Result};
use serde_json::{json, Value};

use crate::config::{Experiment, Perturbed, DEFAULT_MAX_ITER};
use crate::output::Ctx;

pub struct RunOutcome {
    pub trace: Trace,
    /// Kind-specific report fields.
    pub extra: Value,
    /// Kind-specific summary text.
    pub note: Option<String>,
}

impl RunOutcome {
    fn plain(trace: Trace) -> Self {
        RunOutcome {
            trace,
            extra: Value::Null,
            note: None,
        }
    }
}

fn run_config(ctx: &Ctx, start: Point, default_max_iter: usize) -> RunConfig {
    RunConfig::new(start, ctx.max_iter.unwrap_or(default_max_iter)).with_stride(ctx.config.record_stride)
}

fn with_options(mut cfg: RunConfig, target: Option<&Point>, stop_residual: Option<f64>) -> RunConfig {
    cfg.target = target.cloned();
    cfg.stop_residual = stop_residual;
    cfg
}

pub fn perturbed_schedule(p: &Perturbed) -> Result<Schedule> {
    ensure!(p.delta.is_finite() && p.delta >= 0.0, "perturbed.delta: must be finite and nonnegative");
    ensure!(p.decay.is_finite() && p.decay >= 0.0, "perturbed.decay: must be finite and nonnegative");
    p.a.translated(&p.shift_a).context("perturbed.shift_a")?;
    p.b.translated(&p.shift_b).context("perturbed.shift_b")?;
    let (a, b, sa, sb) = (p.a.clone(), p.b.clone(), p.shift_a.clone(), p.shift_b.clone());
    let (delta, decay) = (p.delta, p.decay);
    Ok(Schedule::per_step(move |n| {
        let s = delta * (n as f64).powf(-decay);
        Ok((a.translated(&sa.scaled(s))?, b.translated(&sb.scaled(s))?))
    }))
}

pub fn execute(ctx: &Ctx) -> Result<RunOutcome> {
    match &ctx.config.experiment {
        Experiment::Classical(c) => {
            let cfg = with_options(run_config(ctx, c.start.clone(), DEFAULT_MAX_ITER), c.target.as_ref(), c.stop_residual);
            Ok(RunOutcome::plain(run_classical(&c.a, &c.b, &cfg)?))
        }
        Experiment::Perturbed(p) => {
            let cfg = with_options(run_config(ctx, p.start.clone(), DEFAULT_MAX_ITER), p.target.as_ref(), p.stop_residual);
            Ok(RunOutcome::plain(run_perturbed(&perturbed_schedule(p)?, &cfg)?))
        }
        Experiment::Example44(b) => {
            let schedule = example_unstable_schedule(b.blocks, b.max_block_len)?;
            let cfg = run_config(ctx, Point::zeros(2), b.blocks.saturating_mul(b.max_block_len));
            Ok(RunOutcome::plain(run_perturbed(&schedule, &cfg)?))
        }
        Experiment::Example51(b) => {
            let schedule = example_unbounded_schedule(b.blocks, b.max_block_len)?;
            let cfg = run_config(ctx, Point::zeros(2), b.blocks.saturating_mul(b.max_block_len));
            let trace = run_perturbed(&schedule, &cfg)?;
            let norms: Vec<f64> = trace.block_ends.iter().map(|e| e.norm_a).collect();
            for (i, n) in norms.iter().enumerate() {
                let k = (i + 1) as f64;
                ensure!(*n > k / 2.0, "block-end norm {n} of block {} does not exceed k/2", i + 1);
            }
            Ok(RunOutcome {
                note: Some(format!("block_end_norms={norms:?}")),
                extra: json!({ "block_end_norms": norms }),
                trace,
            })
        }
        Experiment::Ell2(e) => run_ell2_experiment(ctx, e),
        Experiment::StableScenario(s) => {
            let sc = stable_scenario(&s.scenario, s.delta)?;
            let start = s.start.clone().unwrap_or_else(|| sc.default_start.clone());
            let cfg = with_options(run_config(ctx, start, DEFAULT_MAX_ITER), sc.limit.as_ref(), s.stop_residual);
            let trace = run_perturbed(&sc.schedule(), &cfg)?;
            Ok(RunOutcome {
                extra: json!({ "limit": sc.limit, "origin_in_pairs": sc.origin_in_pairs }),
                note: None,
                trace,
            })
        }
        Experiment::Probe(_) => bail!("probe experiments run with the `probe` subcommand"),
    }
}

fn run_ell2_experiment(ctx: &Ctx, e: &crate::config::Ell2) -> Result<RunOutcome> {
    let c = build_ell2_construction(&e.construction)?;
    c.validate()?;
    if let Some(m) = ctx.max_iter {
        ensure!(
            m as u64 >= c.total_len(),
            "max_iter {m} is below the total block length {} of the construction",
            c.total_len()
        );
    }
    let run = run_ell2(&c, e.checkpoints, ctx.config.record_stride, ctx.seed)?;
    for (i, n2) in run.block_end_norm_sq.iter().enumerate() {
        let h = i + 1;
        ensure!(*n2 > 2f64.powi(h as i32), "block-end growth: ‖a‖² = {n2} does not exceed 2^{h}");
    }
    let certs = ell2_aw_certificate(&c, &e.radii);
    let b = c.set_b();
    let mut sampled = Vec::with_capacity(certs.len());
    for cert in &certs {
        let est = aw_distance(&c.graph(cert.h)?, &b, cert.radius, 2000, ctx.seed.wrapping_add(cert.h as u64))?;
        sampled.push(est);
    }
    let note = format!(
        "block_end_norm_sq={:?} max_rel_err={:.3e}",
        run.block_end_norm_sq,
        run.max_rel_err()
    );
    Ok(RunOutcome {
        extra: json!({
            "construction": c,
            "block_end_norm_sq": run.block_end_norm_sq,
            "max_norm": run.max_norm,
            "checkpoints": run.checkpoints,
            "max_rel_err": run.max_rel_err(),
            "certificates": certs,
            "sampled_aw": sampled,
        }),
        note: Some(note),
        trace: run.trace,
    })
}

/// Exit code for a finished run.
pub fn exit_code(status: TerminalStatus) -> u8 {
    match status {
        TerminalStatus::ScheduleExhausted => 2,
        _ => 0,
    }
}

pub fn cmd_run(ctx: &Ctx) -> Result<u8> {
    let outcome = execute(ctx)?;
    let t = &outcome.trace;
    let paths = ctx.write_trace(t)?;
    let last = t.last();
    let summary = format!(
        "status={} steps={} blocks_completed={} norm_a={:e} norm_b={:e}",
        t.status.as_str(),
        t.steps,
        t.blocks_completed(),
        last.map_or(t.start.norm(), |r| r.norm_a),
        last.map_or(f64::NAN, |r| r.norm_b),
    );
    let report = json!({
        "status": t.status,
        "steps": t.steps,
        "blocks_completed": t.blocks_completed(),
        "final_norm_a": last.map(|r| r.norm_a),
        "final_norm_b": last.map(|r| r.norm_b),
        "block_ends": t.block_ends,
        "details": outcome.extra,
    });
    let report_path = ctx.write_report(&report)?;
    match &outcome.note {
        Some(note) => ctx.say(format!("{summary} {note}")),
        None => ctx.say(summary),
    }
    for p in paths.iter().chain(std::iter::once(&report_path)) {
        ctx.say(format!("wrote {}", p.display()));
    }
    Ok(exit_code(t.status))
}

