//! Truncated `ℓ₂` construction: two subspaces of `ℝ^d × ℝ^d` with trivial intersection,
//! `A = {(x, 0)}` and `B = {(x, Dx)}` with `D = diag(a_n)`, `a_n = ratioⁿ`, and graphs
//! `C_h = {(x, b^h + D^h x)}` converging to `B` along which the iterates grow without bound.
//!
//! Coordinates are 1-based in the documentation (`n = 1..d`) and 0-based in storage.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{run_perturbed_with, Block, RunConfig, Schedule, Trace};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::SetDescriptor;

/// Default hard cap on a single block length `N_h`.
pub const DEFAULT_BLOCK_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ell2Params {
    pub d: usize,
    #[serde(rename = "H")]
    pub h_max: usize,
    pub ratio: f64,
    /// `α_n > 0` with `Σ α_n² < 1`; `None` uses [`default_start`].
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    /// Position of `(1 + M_h)²` inside its feasibility interval, on a log scale.
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default = "default_budget")]
    pub block_budget: u64,
}

fn default_slack() -> f64 {
    0.5
}

fn default_budget() -> u64 {
    DEFAULT_BLOCK_BUDGET
}

impl Default for Ell2Params {
    fn default() -> Self {
        Ell2Params {
            d: 8,
            h_max: 4,
            ratio: 0.5,
            start: None,
            slack: default_slack(),
            block_budget: default_budget(),
        }
    }
}

/// `α_n ∝ 2⁻ⁿ`, scaled to norm `0.9`.
pub fn default_start(d: usize) -> Vec<f64> {
    let raw: Vec<f64> = (1..=d).map(|n| 0.5f64.powi(n as i32)).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.iter().map(|x| 0.9 * x / norm).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ell2Block {
    pub h: usize,
    /// `S_h = Σ_{n>h} (α_n^{h−1,N_{h−1}})²`.
    pub tail_before: f64,
    #[serde(rename = "M_h")]
    pub m: f64,
    #[serde(rename = "N_h")]
    pub len: u64,
    pub theta: Vec<f64>,
    pub b: Vec<f64>,
    /// `α^{h−1,N_{h−1}}`, the iterate entering the block.
    pub alpha_in: Vec<f64>,
    /// `ln α^{h−1,N_{h−1}}`, kept separately because the head coordinates underflow.
    pub log_alpha_in: Vec<f64>,
    /// `α^{h,N_h}`.
    pub alpha_out: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ell2Construction {
    pub d: usize,
    #[serde(rename = "H")]
    pub h_max: usize,
    pub ratio: f64,
    pub slack: f64,
    pub start: Vec<f64>,
    pub blocks: Vec<Ell2Block>,
}

/// One checked inequality of the construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub h: usize,
    pub holds: bool,
    pub detail: String,
}

/// Per-coordinate data of the closed forms for block `h`.
struct BlockRates {
    h: usize,
    m: f64,
    /// `ln(1 + a_n²/M²)` for `n > h`, `ln(1 + a_n²)` for `n ≤ h`.
    log_rate: Vec<f64>,
}

impl BlockRates {
    fn new(a: &[f64], h: usize, m: f64) -> Self {
        let log_rate = a
            .iter()
            .enumerate()
            .map(|(i, an)| if i + 1 > h { (an * an / (m * m)).ln_1p() } else { (an * an).ln_1p() })
            .collect();
        BlockRates { h, m, log_rate }
    }

    /// `α_n^{h,t} / α_n^{h−1,N_{h−1}}`: `(1 + M) − M·q^{−t}` for `n > h`, `(1 + a_n²)^{−t}` for `n ≤ h`.
    fn factor(&self, i: usize, t: f64) -> f64 {
        let decay = (-t * self.log_rate[i]).exp();
        if i + 1 > self.h {
            (1.0 + self.m) - self.m * decay
        } else {
            decay
        }
    }

    fn log_factor(&self, i: usize, t: f64) -> f64 {
        if i + 1 > self.h {
            self.factor(i, t).ln()
        } else {
            -t * self.log_rate[i]
        }
    }

    /// `(Σ_{n≤h}, Σ_{n>h})` of `(α_n^{h,t})²`.
    fn sums(&self, alpha_in: &[f64], t: f64) -> (f64, f64) {
        let (mut head, mut tail) = (0.0, 0.0);
        for (i, a) in alpha_in.iter().enumerate() {
            let v = (a * self.factor(i, t)).powi(2);
            if i + 1 > self.h {
                tail += v;
            } else {
                head += v;
            }
        }
        (head, tail)
    }
}

fn pow2(h: usize) -> f64 {
    2f64.powi(h as i32)
}

/// Smallest `N ≥ lo` in `[lo, budget]` with `pred(N)`, assuming `pred` is monotone there.
fn first_true(lo: u64, budget: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if pred(lo) {
        return Some(lo);
    }
    let mut step = 1u64;
    let mut below = lo;
    loop {
        let probe = lo.saturating_add(step).min(budget);
        if pred(probe) {
            let (mut l, mut r) = (below, probe);
            while r - l > 1 {
                let mid = l + (r - l) / 2;
                if pred(mid) {
                    r = mid;
                } else {
                    l = mid;
                }
            }
            return Some(r);
        }
        if probe == budget {
            return None;
        }
        below = probe;
        step = step.saturating_mul(2);
    }
}

impl Ell2Construction {
    /// `a_n = ratioⁿ` for `n = 1..d`.
    pub fn a(&self) -> Vec<f64> {
        a_sequence(self.d, self.ratio)
    }

    fn rates(&self, h: usize) -> BlockRates {
        BlockRates::new(&self.a(), h, self.blocks[h - 1].m)
    }

    /// `α^{h,t}` for block `h ∈ 1..=H` and `t ≥ 0` (`t = 0` gives the iterate entering the block).
    pub fn closed_form(&self, h: usize, t: u64) -> Vec<f64> {
        let blk = &self.blocks[h - 1];
        let rates = self.rates(h);
        blk.alpha_in
            .iter()
            .enumerate()
            .map(|(i, a)| a * rates.factor(i, t as f64))
            .collect()
    }

    /// Number of iterations of blocks `1..=h`.
    pub fn block_end(&self, h: usize) -> u64 {
        self.blocks[..h].iter().map(|b| b.len).sum()
    }

    pub fn total_len(&self) -> u64 {
        self.block_end(self.blocks.len())
    }

    /// `(h, t)` with global iteration `n = block_end(h − 1) + t`, `1 ≤ t ≤ N_h`.
    pub fn locate(&self, n: u64) -> Option<(usize, u64)> {
        let mut start = 0;
        for blk in &self.blocks {
            if n > start && n <= start + blk.len {
                return Some((blk.h, n - start));
            }
            start += blk.len;
        }
        None
    }

    /// `K = max_h max(1/M_h, (1 + M_h)/M_h)`.
    pub fn k_constant(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (1.0 / b.m).max((1.0 + b.m) / b.m))
            .fold(0.0, f64::max)
    }

    /// Every inequality of the construction, re-derived from the stored block data.
    pub fn verify(&self) -> Vec<ConditionCheck> {
        let a = self.a();
        let k = self.k_constant();
        let mut out = Vec::new();
        let mut push = |condition: &str, h: usize, holds: bool, detail: String| {
            out.push(ConditionCheck {
                condition: condition.into(),
                h,
                holds,
                detail,
            })
        };
        push(
            "start",
            0,
            self.start.iter().all(|x| *x > 0.0) && self.start.iter().map(|x| x * x).sum::<f64>() < 1.0,
            format!("‖α‖² = {}", self.start.iter().map(|x| x * x).sum::<f64>()),
        );
        push(
            "feasibility H < d",
            0,
            self.h_max < self.d && self.blocks.len() == self.h_max,
            format!("H = {}, d = {}, blocks = {}", self.h_max, self.d, self.blocks.len()),
        );
        for blk in &self.blocks {
            let h = blk.h;
            let (lo, hi) = (pow2(h), pow2(h) + h as f64);
            let tail_prev: f64 = blk.alpha_in.iter().skip(h).map(|x| x * x).sum();
            let mid = (1.0 + blk.m).powi(2) * tail_prev;
            push("tail window", h, hi > mid && mid > lo, format!("{hi} > {mid} > {lo}"));

            let mut encoded = true;
            for i in 0..self.d {
                let (b_want, th_want) = if i < h {
                    (0.0, a[i])
                } else {
                    (blk.alpha_in[i] * a[i] * (1.0 + blk.m) / blk.m, -a[i] / blk.m)
                };
                encoded &= blk.b[i] == b_want && blk.theta[i] == th_want;
            }
            push("block encoding", h, encoded, "b^h and θ^h match their defining cases".into());

            let head: f64 = blk.alpha_out.iter().take(h).map(|x| x * x).sum();
            let tail: f64 = blk.alpha_out.iter().skip(h).map(|x| x * x).sum();
            let total = head + tail;
            push(
                "growth window",
                h,
                hi > total && total >= tail && tail > lo,
                format!("{hi} > {total} ≥ {tail} > {lo}"),
            );

            let rates = self.rates(h);
            let positive = (0..self.d).all(|i| {
                let log_out = blk.log_alpha_in[i] + rates.log_factor(i, blk.len as f64);
                blk.log_alpha_in[i].is_finite() && log_out.is_finite() && rates.factor(i, 0.0) > 0.0
            });
            push("positivity", h, positive, "ln α^{h,t}_n finite for t = 0 and t = N_h".into());

            let m_lower = pow2(h) / (pow2(h - 1) + h as f64 - 1.0);
            let lhs = (1.0 + blk.m).powi(2);
            push("M_h lower bound", h, lhs > m_lower, format!("(1+M_h)² = {lhs} > {m_lower}"));

            let b_norm = blk.b.iter().map(|x| x * x).sum::<f64>().sqrt();
            let b_bound = k * self.ratio.powi(h as i32) * (pow2(h - 1) + h as f64 - 1.0).sqrt();
            push("‖b^h‖ bound", h, b_norm <= b_bound, format!("{b_norm} ≤ {b_bound}"));
        }
        out
    }

    /// The first failed check as an error.
    pub fn validate(&self) -> Result<()> {
        match self.verify().into_iter().find(|c| !c.holds) {
            None => Ok(()),
            Some(c) => Err(Error::Construction {
                condition: format!("{} (h = {})", c.condition, c.h),
                detail: c.detail,
            }),
        }
    }

    /// `A = {(x, 0)}` in `ℝ^{2d}`.
    pub fn set_a(&self) -> SetDescriptor {
        let basis = (0..self.d).map(|i| Point::basis(2 * self.d, i)).collect();
        SetDescriptor::ortho_subspace(2 * self.d, basis).expect("coordinate basis is orthonormal")
    }

    /// `B = {(x, Dx)}`.
    pub fn set_b(&self) -> SetDescriptor {
        SetDescriptor::diagonal_graph(self.a(), vec![0.0; self.d]).expect("finite diagonal")
    }

    /// `C_h = {(x, b^h + D^h x)}`.
    pub fn graph(&self, h: usize) -> Result<SetDescriptor> {
        let blk = &self.blocks[h - 1];
        SetDescriptor::diagonal_graph(blk.theta.clone(), blk.b.clone())
    }

    /// `(α, 0) ∈ ℝ^{2d}`.
    pub fn start_point(&self) -> Point {
        let mut coords = self.start.clone();
        coords.resize(2 * self.d, 0.0);
        Point::new(coords).expect("finite start")
    }
}

pub fn a_sequence(d: usize, ratio: f64) -> Vec<f64> {
    (1..=d).map(|n| ratio.powi(n as i32)).collect()
}

/// Builds blocks `h = 1..=H`: `M_h` at the log-scale `slack` point of the interval allowed by
/// the tail window, and `N_h` as the least length satisfying the growth window.
pub fn build_ell2_construction(params: &Ell2Params) -> Result<Ell2Construction> {
    let Ell2Params {
        d,
        h_max,
        ratio,
        slack,
        block_budget,
        ..
    } = *params;
    if h_max == 0 || h_max >= d {
        return Err(Error::Precondition(format!("need 1 ≤ H < d, got H = {h_max}, d = {d}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Precondition(format!("ratio {ratio} must lie in (0, 1)")));
    }
    if !(slack > 0.0 && slack < 1.0) {
        return Err(Error::Precondition(format!("slack {slack} must lie in (0, 1)")));
    }
    let start = params.start.clone().unwrap_or_else(|| default_start(d));
    if start.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: start.len(),
        });
    }
    let norm_sq: f64 = start.iter().map(|x| x * x).sum();
    if !start.iter().all(|x| x.is_finite() && *x > 0.0) || norm_sq >= 1.0 {
        return Err(Error::Precondition("start must be positive with ‖start‖ < 1".into()));
    }
    let a = a_sequence(d, ratio);
    let mut alpha = start.clone();
    let mut log_alpha: Vec<f64> = start.iter().map(|x| x.ln()).collect();
    let mut blocks = Vec::with_capacity(h_max);
    for h in 1..=h_max {
        let (lo, hi) = (pow2(h), pow2(h) + h as f64);
        let s: f64 = alpha.iter().skip(h).map(|x| x * x).sum();
        if !(s > 0.0) {
            return Err(Error::Construction {
                condition: format!("tail window (h = {h})"),
                detail: format!("tail sum S_h = {s} leaves no room for M_h"),
            });
        }
        let log_g = lo.ln() + slack * (hi / lo).ln() - s.ln();
        let m = (0.5 * log_g).exp() - 1.0;
        let mid = (1.0 + m).powi(2) * s;
        if !(m > 0.0 && hi > mid && mid > lo) {
            return Err(Error::Construction {
                condition: format!("tail window (h = {h})"),
                detail: format!("M_h = {m} gives (1+M_h)²·S_h = {mid}, outside ({lo}, {hi})"),
            });
        }
        let rates = BlockRates::new(&a, h, m);
        let tail_ok = |n: u64| rates.sums(&alpha, n as f64).1 > lo;
        let n_low = first_true(1, block_budget, tail_ok).ok_or_else(|| Error::Construction {
            condition: format!("growth window (h = {h})"),
            detail: format!(
                "N_h exceeds the budget {block_budget}: tail sum {} falls short of {lo}",
                rates.sums(&alpha, block_budget as f64).1
            ),
        })?;
        let both_ok = |n: u64| {
            let (head, tail) = rates.sums(&alpha, n as f64);
            tail > lo && head + tail < hi
        };
        let len = first_true(n_low, block_budget, both_ok).ok_or_else(|| Error::Construction {
            condition: format!("growth window (h = {h})"),
            detail: format!("no N_h ≤ {block_budget} brings the full sum below {hi}"),
        })?;
        let mut theta = vec![0.0; d];
        let mut b = vec![0.0; d];
        for i in 0..d {
            if i < h {
                theta[i] = a[i];
            } else {
                theta[i] = -a[i] / m;
                b[i] = alpha[i] * a[i] * (1.0 + m) / m;
            }
        }
        let alpha_out: Vec<f64> = (0..d).map(|i| alpha[i] * rates.factor(i, len as f64)).collect();
        let log_out: Vec<f64> = (0..d)
            .map(|i| log_alpha[i] + rates.log_factor(i, len as f64))
            .collect();
        blocks.push(Ell2Block {
            h,
            tail_before: s,
            m,
            len,
            theta,
            b,
            alpha_in: alpha.clone(),
            log_alpha_in: log_alpha.clone(),
            alpha_out: alpha_out.clone(),
        });
        alpha = alpha_out;
        log_alpha = log_out;
    }
    let c = Ell2Construction {
        d,
        h_max,
        ratio,
        slack,
        start,
        blocks,
    };
    c.validate()?;
    Ok(c)
}

/// Block `h` runs on `(A, C_h)` for `N_h` iterations.
pub fn ell2_schedule(c: &Ell2Construction) -> Result<Schedule> {
    let a = c.set_a();
    let blocks = (1..=c.blocks.len())
        .map(|h| {
            let len = usize::try_from(c.blocks[h - 1].len)
                .map_err(|_| Error::Precondition("block length exceeds usize".into()))?;
            Ok(Block {
                a: a.clone(),
                b: c.graph(h)?,
                len,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Schedule::blocks(blocks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AwCertificate {
    pub h: usize,
    #[serde(rename = "N")]
    pub radius: f64,
    /// `‖D − D^h‖ = max_n |a_n − θ^h_n|`.
    pub operator_gap: f64,
    pub b_norm: f64,
    /// `N‖D − D^h‖ + ‖b^h‖ ≥ h_N(C_h, B)`.
    pub bound: f64,
}

/// Upper bounds on `h_N(C_h, B)` for every block and every radius in `radii`.
pub fn ell2_aw_certificate(c: &Ell2Construction, radii: &[f64]) -> Vec<AwCertificate> {
    let a = c.a();
    let mut out = Vec::with_capacity(radii.len() * c.blocks.len());
    for &radius in radii {
        for blk in &c.blocks {
            let operator_gap = a
                .iter()
                .zip(&blk.theta)
                .map(|(an, th)| (an - th).abs())
                .fold(0.0, f64::max);
            let b_norm = blk.b.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.push(AwCertificate {
                h: blk.h,
                radius,
                operator_gap,
                b_norm,
                bound: radius * operator_gap + b_norm,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub h: usize,
    pub t: u64,
    /// `‖a_n − (α^{h,t}, 0)‖ / ‖α^{h,t}‖`.
    pub rel_err: f64,
}

#[derive(Clone, Debug)]
pub struct Ell2Run {
    pub trace: Trace,
    pub checkpoints: Vec<Checkpoint>,
    /// `‖a_N‖²` at the end of each block.
    pub block_end_norm_sq: Vec<f64>,
    /// `max_n ‖a_n‖` over the whole run.
    pub max_norm: f64,
}

impl Ell2Run {
    pub fn max_rel_err(&self) -> f64 {
        self.checkpoints.iter().map(|c| c.rel_err).fold(0.0, f64::max)
    }
}

/// Runs the engine under [`ell2_schedule`] from `(α, 0)` and compares the iterates with the closed
/// forms at `n_checkpoints` random iterations plus every block end.
pub fn run_ell2(c: &Ell2Construction, n_checkpoints: usize, record_stride: usize, rng_seed: u64) -> Result<Ell2Run> {
    let total = c.total_len();
    let total_usize =
        usize::try_from(total).map_err(|_| Error::Precondition("run length exceeds usize".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut wanted: BTreeMap<u64, (usize, u64)> = BTreeMap::new();
    for i in sample(&mut rng, total_usize, n_checkpoints.min(total_usize)).iter() {
        let n = i as u64 + 1;
        wanted.insert(n, c.locate(n).expect("n within the run"));
    }
    for h in 1..=c.blocks.len() {
        let n = c.block_end(h);
        wanted.insert(n, (h, c.blocks[h - 1].len));
    }
    let d = c.d;
    let mut checkpoints = Vec::with_capacity(wanted.len());
    let mut block_end_norm_sq = Vec::with_capacity(c.blocks.len());
    let ends: Vec<u64> = (1..=c.blocks.len()).map(|h| c.block_end(h)).collect();
    let mut max_norm = 0.0f64;
    let schedule = ell2_schedule(c)?;
    let cfg = RunConfig::new(c.start_point(), total_usize).with_stride(record_stride.max(1));
    let trace = run_perturbed_with(&schedule, &cfg, |step| {
        let n = step.n as u64;
        max_norm = max_norm.max(step.a.norm());
        if let Some(&(h, t)) = wanted.get(&n) {
            let cf = c.closed_form(h, t);
            let err: f64 = (0..2 * d)
                .map(|i| step.a[i] - if i < d { cf[i] } else { 0.0 })
                .map(|e| e * e)
                .sum::<f64>()
                .sqrt();
            let scale = cf.iter().map(|x| x * x).sum::<f64>().sqrt();
            checkpoints.push(Checkpoint {
                n,
                h,
                t,
                rel_err: err / scale,
            });
        }
        if ends.binary_search(&n).is_ok() {
            block_end_norm_sq.push(step.a.norm_sq());
        }
    })?;
    Ok(Ell2Run {
        trace,
        checkpoints,
        block_end_norm_sq,
        max_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Ell2Construction {
        build_ell2_construction(&Ell2Params {
            d: 5,
            h_max: 2,
            ..Ell2Params::default()
        })
        .unwrap()
    }

    #[test]
    fn default_start_has_norm_point_nine() {
        let s = default_start(8);
        assert!((s.iter().map(|x| x * x).sum::<f64>().sqrt() - 0.9).abs() < 1e-15);
        assert!(s.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn conditions_hold_and_encoding_is_exact() {
        let c = small();
        assert!(c.verify().iter().all(|ch| ch.holds));
        for blk in &c.blocks {
            assert!(blk.b[..blk.h].iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn block_length_is_minimal() {
        let c = small();
        for blk in &c.blocks {
            let rates = BlockRates::new(&c.a(), blk.h, blk.m);
            assert!(rates.sums(&blk.alpha_in, (blk.len - 1) as f64).1 <= pow2(blk.h));
        }
    }

    #[test]
    fn closed_form_matches_one_projection_step() {
        let c = small();
        let h = 2;
        let g = c.graph(h).unwrap();
        let a_set = c.set_a();
        let mut x = Point::new({
            let mut v = c.closed_form(h, 0);
            v.resize(2 * c.d, 0.0);
            v
        })
        .unwrap();
        for t in 1..=5 {
            x = a_set.project(&g.project(&x).unwrap()).unwrap();
            let cf = c.closed_form(h, t);
            for i in 0..c.d {
                assert!((x[i] - cf[i]).abs() <= 1e-14 * cf[i].abs().max(1e-300));
            }
        }
    }

    #[test]
    fn infeasible_shapes_are_rejected() {
        let bad = Ell2Params {
            d: 3,
            h_max: 3,
            ..Ell2Params::default()
        };
        assert!(build_ell2_construction(&bad).is_err());
        let tight = Ell2Params {
            block_budget: 10,
            ..Ell2Params::default()
        };
        assert!(matches!(build_ell2_construction(&tight), Err(Error::Construction { .. })));
    }

    #[test]
    fn locate_inverts_block_end() {
        let c = small();
        assert_eq!(c.locate(1), Some((1, 1)));
        assert_eq!(c.locate(c.block_end(1)), Some((1, c.blocks[0].len)));
        assert_eq!(c.locate(c.block_end(1) + 1), Some((2, 1)));
        assert_eq!(c.locate(c.total_len() + 1), None);
    }
}
