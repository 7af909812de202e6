//! `altproj probe`: variational diagnostics, reported as JSON.

use altproj_core::constructions::example_unstable_bodies;
use altproj_core::variational::{
    aw_distance, check_cos_separation_in, check_fact_norms, eventual_containment_probe, omega_angle,
    random_orthonormal_basis, separation_constants, strongly_exposes_probe, AngleReport, COS_SEPARATION_DIM,
};
use altproj_core::Point;
use anyhow::{bail, Result};
use serde_json::{json, Value};

use crate::config::{Experiment, ProbeSpec};
use crate::output::Ctx;

fn angles(u: &[Point], v: &[Point], m: Option<f64>) -> Result<(Value, Vec<String>)> {
    let rep: AngleReport = omega_angle(u, v)?;
    let mut lines = vec![format!("omega={} principal_cosines={:?}", rep.omega, rep.principal_cosines)];
    let separation = match m {
        Some(m) => {
            let s = separation_constants(m, rep.omega)?;
            lines.push(format!("separation eps={} eta={}", s.eps, s.eta));
            Some(s)
        }
        None => None,
    };
    Ok((json!({ "angles": rep, "separation": separation }), lines))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Runs the configured probe; returns the report body and the lines to print.
pub fn execute(ctx: &Ctx) -> Result<(&'static str, Value, Vec<String>)> {
    let Experiment::Probe(spec) = &ctx.config.experiment else {
        bail!("experiment kind `{}` runs with the `run` subcommand", ctx.config.experiment.kind());
    };
    let seed = ctx.seed;
    let (body, lines) = match spec {
        ProbeSpec::Omega(p) => angles(&p.u_basis, &p.v_basis, p.m)?,
        ProbeSpec::OmegaRandom(p) => {
            let u = random_orthonormal_basis(p.dim, p.u_dim, seed)?;
            let v = random_orthonormal_basis(p.dim, p.v_dim, seed.wrapping_add(1))?;
            let (mut body, lines) = angles(&u, &v, p.m)?;
            body["u_basis"] = json!(u);
            body["v_basis"] = json!(v);
            (body, lines)
        }
        ProbeSpec::Exposure(p) => {
            let probe = strongly_exposes_probe(&p.set, &p.f, &p.alphas, p.samples, seed)?;
            let mut lines = vec!["alpha,eps_of_alpha,ratio,slice_diam".to_string()];
            for i in 0..probe.alphas.len() {
                lines.push(format!(
                    "{},{},{},{}",
                    probe.alphas[i], probe.eps_of_alpha[i], probe.ratios[i], probe.slice_diams[i]
                ));
            }
            // Ratios indexed by decreasing α.
            let mut by_alpha: Vec<(f64, f64)> = probe.alphas.iter().copied().zip(probe.ratios.iter().copied()).collect();
            by_alpha.sort_by(|a, b| b.0.total_cmp(&a.0));
            let ratios: Vec<f64> = by_alpha.iter().map(|x| x.1).collect();
            let decreasing = strictly_decreasing(&ratios);
            lines.push(format!("ratios strictly decreasing as alpha decreases: {decreasing}"));
            (json!({ "probe": probe, "ratios_decreasing": decreasing }), lines)
        }
        ProbeSpec::Aw(p) => {
            let mut estimates = Vec::with_capacity(p.radii.len());
            let mut lines = vec!["N,h_N,mode".to_string()];
            for (i, &r) in p.radii.iter().enumerate() {
                let est = aw_distance(&p.a, &p.c, r, p.samples, seed.wrapping_add(i as u64))?;
                lines.push(format!("{r},{},{:?}", est.h_n, est.mode));
                estimates.push(est);
            }
            (json!({ "estimates": estimates }), lines)
        }
        ProbeSpec::AwUnstableFamily(p) => {
            let mut rows = Vec::with_capacity(p.max_k);
            let mut lines = vec!["k,h,h_N(C_k;A),h_N(D_k;B)".to_string()];
            let mut by_h: Vec<f64> = Vec::new();
            for k in 1..=p.max_k {
                let bodies = example_unstable_bodies(k)?;
                let upper = aw_distance(&bodies.c, &bodies.a, p.radius, 2000, seed)?;
                let lower = aw_distance(&bodies.d, &bodies.b, p.radius, 2000, seed)?;
                let h = k.div_ceil(2);
                lines.push(format!("{k},{h},{},{}", upper.h_n, lower.h_n));
                if k % 2 == 0 {
                    by_h.push(upper.h_n);
                }
                rows.push(json!({ "k": k, "h": h, "upper": upper, "lower": lower }));
            }
            let decreasing = strictly_decreasing(&by_h);
            lines.push(format!("h_N(C_2h; A) strictly decreasing in h: {decreasing}"));
            (json!({ "radius": p.radius, "pairs": rows, "decreasing_in_h": decreasing }), lines)
        }
        ProbeSpec::Containment(p) => {
            let rep = eventual_containment_probe(&p.sets, &p.target, p.samples, seed)?;
            let lines = vec![format!(
                "contained={:?} first_suffix_index={:?}",
                rep.contained, rep.first_suffix_index
            )];
            (json!({ "report": rep }), lines)
        }
        ProbeSpec::Facts(p) => {
            if p.norms.is_none() && p.cos_separation.is_none() {
                bail!("facts probe: set `norms`, `cos_separation`, or both");
            }
            let mut body = json!({});
            let mut lines = Vec::new();
            if let Some(f) = &p.norms {
                let v = check_fact_norms(&f.set, f.eps, f.k, f.trials, seed)?;
                lines.push(format!("norms: max_violation={v} over {} trials", f.trials));
                body["norms"] = json!({ "max_violation": v, "trials": f.trials, "eps": f.eps, "k": f.k });
            }
            if let Some(f) = &p.cos_separation {
                let dim = f.dim.unwrap_or(COS_SEPARATION_DIM);
                let v = check_cos_separation_in(dim, f.theta1, f.theta2, f.trials, seed)?;
                lines.push(format!("cos_separation: max_violation={v} over {} trials", f.trials));
                body["cos_separation"] = json!({
                    "max_violation": v, "trials": f.trials, "theta1": f.theta1, "theta2": f.theta2, "dim": dim
                });
            }
            (body, lines)
        }
    };
    Ok((spec.kind(), body, lines))
}

pub fn cmd_probe(ctx: &Ctx) -> Result<u8> {
    let (kind, body, lines) = execute(ctx)?;
    let path = ctx.write_report(&json!({ "probe": kind, "result": body }))?;
    for l in lines {
        ctx.say(l);
    }
    ctx.say(format!("wrote {}", path.display()));
    Ok(0)
}
