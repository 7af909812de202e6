//! `altproj validate`: build every instance, check its invariants, run nothing long.

use altproj_core::constructions::{
    build_ell2_construction, ell2_aw_certificate, example_unstable_bodies, stable_scenario, unbounded_line,
};
use altproj_core::sets::SetDescriptor;
use altproj_core::variational::{check_cos_separation_in, check_fact_norms, omega_angle, COS_SEPARATION_DIM};
use altproj_core::Point;
use anyhow::{anyhow, bail, ensure, Result};

use crate::config::{Experiment, ProbeSpec};
use crate::output::Ctx;
use crate::run::perturbed_schedule;

#[derive(Default)]
struct Ledger {
    entries: Vec<(bool, String, String)>,
}

impl Ledger {
    fn record(&mut self, condition: impl Into<String>, outcome: Result<String>) {
        match outcome {
            Ok(detail) => self.entries.push((true, condition.into(), detail)),
            Err(e) => self.entries.push((false, condition.into(), format!("{e:#}"))),
        }
    }

    fn first_failure(&self) -> Option<&str> {
        self.entries.iter().find(|e| !e.0).map(|e| e.1.as_str())
    }
}

fn same_dim(items: &[(&str, usize)]) -> Result<String> {
    let d = items[0].1;
    for (name, dim) in items {
        ensure!(*dim == d, "{name} has dimension {dim}, expected {d}");
    }
    Ok(format!("all in R^{d}"))
}

fn describe(s: &SetDescriptor) -> Result<String> {
    Ok(format!("{} in R^{}", s.kind_name(), s.dim()))
}

fn positive(name: &str, v: f64) -> Result<String> {
    ensure!(v > 0.0 && v.is_finite(), "{name} = {v} must be positive");
    Ok(format!("{name} = {v}"))
}

fn check_sets(l: &mut Ledger, a: &SetDescriptor, b: &SetDescriptor, start: &Point, target: Option<&Point>) {
    l.record("set a", describe(a));
    l.record("set b", describe(b));
    let mut dims = vec![("a", a.dim()), ("b", b.dim()), ("start", start.dim())];
    if let Some(t) = target {
        dims.push(("target", t.dim()));
    }
    l.record("dimensions", same_dim(&dims));
}

fn check_probe(l: &mut Ledger, spec: &ProbeSpec, seed: u64) {
    match spec {
        ProbeSpec::Omega(p) => {
            l.record("orthonormal bases", omega_angle(&p.u_basis, &p.v_basis).map(|r| format!("omega = {}", r.omega)).map_err(Into::into));
            if let Some(m) = p.m {
                l.record("separation M", (|| {
                    ensure!(m > 0.0 && m < 1.0, "M = {m} must lie in (0, 1)");
                    Ok(format!("M = {m}"))
                })());
            }
        }
        ProbeSpec::OmegaRandom(p) => l.record("subspace dimensions", (|| {
            ensure!(p.u_dim >= 1 && p.u_dim <= p.dim && p.v_dim >= 1 && p.v_dim <= p.dim, "need 1 ≤ u_dim, v_dim ≤ dim");
            Ok(format!("{} and {} in R^{}", p.u_dim, p.v_dim, p.dim))
        })()),
        ProbeSpec::Exposure(p) => {
            l.record("set", describe(&p.set));
            l.record("alphas", (|| {
                ensure!(!p.alphas.is_empty() && p.alphas.iter().all(|a| *a > 0.0 && *a < 1.0), "alphas must lie in (0, 1)");
                Ok(format!("{:?}", p.alphas))
            })());
            l.record("functional", (|| {
                ensure!(p.f.dim() == p.set.dim(), "f has dimension {}, set {}", p.f.dim(), p.set.dim());
                ensure!(p.f.norm() > 0.0, "f must be nonzero");
                Ok(format!("support point {:?}", p.set.support_point(&p.f.normalized()?)?.coords()))
            })());
        }
        ProbeSpec::Aw(p) => {
            l.record("set a", describe(&p.a));
            l.record("set c", describe(&p.c));
            l.record("dimensions", same_dim(&[("a", p.a.dim()), ("c", p.c.dim())]));
            for r in &p.radii {
                l.record("radius", positive("N", *r));
            }
        }
        ProbeSpec::AwUnstableFamily(p) => {
            l.record("radius", positive("N", p.radius));
            l.record("vertex exactness", bodies(p.max_k));
        }
        ProbeSpec::Containment(p) => {
            for (i, s) in p.sets.iter().enumerate() {
                l.record(format!("set {i}"), describe(s));
            }
            let probe_dim = p.sets.first().map(SetDescriptor::dim);
            l.record("target", (|| {
                // A one-sample run checks the target's own preconditions.
                let rep = altproj_core::variational::eventual_containment_probe(&p.sets, &p.target, 1, seed)?;
                Ok(format!("{} sets in R^{}", rep.contained.len(), probe_dim.unwrap_or(0)))
            })());
        }
        ProbeSpec::Facts(p) => {
            if let Some(f) = &p.norms {
                l.record("inner ball eps*B in set", check_fact_norms(&f.set, f.eps, f.k, 1, seed).map(|_| format!("eps = {}", f.eps)).map_err(Into::into));
            }
            if let Some(f) = &p.cos_separation {
                let dim = f.dim.unwrap_or(COS_SEPARATION_DIM);
                l.record("angles", check_cos_separation_in(dim, f.theta1, f.theta2, 1, seed).map(|_| format!("0 < {} < {} < pi/2", f.theta1, f.theta2)).map_err(Into::into));
            }
            if p.norms.is_none() && p.cos_separation.is_none() {
                l.record("facts", Err(anyhow!("set `norms`, `cos_separation`, or both")));
            }
        }
    }
}

fn bodies(max_k: usize) -> Result<String> {
    ensure!(max_k >= 1, "need at least one pair");
    for k in 1..=max_k {
        example_unstable_bodies(k)?;
    }
    Ok(format!("C_k, D_k for k = 1..={max_k}"))
}

fn build_ledger(ctx: &Ctx) -> Ledger {
    let mut l = Ledger::default();
    l.record("schema", Ok(format!("experiment kind {}", ctx.config.experiment.kind())));
    l.record("record_stride", Ok(format!("{}", ctx.config.record_stride)));
    if let Some(m) = ctx.max_iter {
        l.record("max_iter", (|| {
            ensure!(m >= 1, "max_iter must be at least 1");
            Ok(format!("{m}"))
        })());
    }
    match &ctx.config.experiment {
        Experiment::Classical(c) => {
            check_sets(&mut l, &c.a, &c.b, &c.start, c.target.as_ref());
            if let Some(t) = c.stop_residual {
                l.record("stop_residual", positive("stop_residual", t));
            }
        }
        Experiment::Perturbed(p) => {
            check_sets(&mut l, &p.a, &p.b, &p.start, p.target.as_ref());
            l.record("shifts", same_dim(&[("a", p.a.dim()), ("shift_a", p.shift_a.dim()), ("shift_b", p.shift_b.dim())]));
            l.record("perturbation family", (|| {
                perturbed_schedule(p)?;
                Ok(format!("delta = {}, decay = {}", p.delta, p.decay))
            })());
        }
        Experiment::Example44(b) => {
            l.record("blocks", (|| {
                ensure!(b.blocks >= 2 && b.max_block_len >= 1, "need blocks ≥ 2 and max_block_len ≥ 1");
                Ok(format!("{} blocks, at most {} steps each", b.blocks, b.max_block_len))
            })());
            l.record("vertex exactness", bodies(b.blocks));
        }
        Experiment::Example51(b) => {
            l.record("blocks", (|| {
                ensure!(b.blocks >= 1 && b.max_block_len >= 1, "need blocks ≥ 1 and max_block_len ≥ 1");
                Ok(format!("{} blocks, at most {} steps each", b.blocks, b.max_block_len))
            })());
            l.record("line incidence", (|| {
                for k in 1..=b.blocks {
                    unbounded_line(k)?;
                }
                Ok(format!("lines k = 1..={}", b.blocks))
            })());
        }
        Experiment::Ell2(e) => match build_ell2_construction(&e.construction) {
            Ok(c) => {
                for ch in c.verify() {
                    let condition = match ch.h {
                        0 => ch.condition.clone(),
                        h => format!("{} h={h}", ch.condition),
                    };
                    let outcome = if ch.holds { Ok(ch.detail) } else { Err(anyhow!(ch.detail)) };
                    l.record(condition, outcome);
                }
                l.record("block budget", (|| {
                    if let Some(m) = ctx.max_iter {
                        ensure!(m as u64 >= c.total_len(), "max_iter {m} below total block length {}", c.total_len());
                    }
                    let lens: Vec<u64> = c.blocks.iter().map(|b| b.len).collect();
                    Ok(format!("N_h = {lens:?}, total {}", c.total_len()))
                })());
                let certs = ell2_aw_certificate(&c, &e.radii);
                for r in &e.radii {
                    let bounds: Vec<f64> = certs.iter().filter(|x| x.radius == *r).map(|x| x.bound).collect();
                    l.record(format!("certificate decreasing N={r}"), (|| {
                        ensure!(bounds.windows(2).all(|w| w[1] < w[0]), "bounds {bounds:?}");
                        Ok(format!("{bounds:?}"))
                    })());
                }
            }
            Err(err) => l.record("construction", Err(err.into())),
        },
        Experiment::StableScenario(s) => match stable_scenario(&s.scenario, s.delta) {
            Ok(sc) => {
                l.record("pairs", sc.pair(1).map(|(a, b)| format!("A_1: {}, B_1: {}", a.kind_name(), b.kind_name())).map_err(Into::into));
                let start = s.start.clone().unwrap_or_else(|| sc.default_start.clone());
                l.record("dimensions", same_dim(&[("a", sc.a.dim()), ("b", sc.b.dim()), ("start", start.dim())]));
                l.record("origin in every pair", Ok(format!("{}", sc.origin_in_pairs)));
            }
            Err(err) => l.record("scenario", Err(err.into())),
        },
        Experiment::Probe(spec) => check_probe(&mut l, spec, ctx.seed),
    }
    l
}

pub fn cmd_validate(ctx: &Ctx) -> Result<u8> {
    let ledger = build_ledger(ctx);
    for (ok, condition, detail) in &ledger.entries {
        // Failures are always shown, even with --quiet.
        let line = format!("{} {condition}: {detail}", if *ok { "ok  " } else { "FAIL" });
        if *ok {
            ctx.say(line);
        } else {
            println!("{line}");
        }
    }
    if let Some(condition) = ledger.first_failure() {
        bail!("validation failed: {condition}");
    }
    ctx.say(format!("{} checks passed", ledger.entries.len()));
    Ok(0)
}
