//! Classical and perturbed alternating projections:
//! `b_n = P_{B_n}(a_{n−1})`, `a_n = P_{A_n}(b_n)`.

mod schedule;
mod trace;

pub use schedule::{Adaptive, Block, BudgetPolicy, PairGenerator, PerStep, Schedule, SwitchPredicate};
pub use trace::{AdvanceReason, BlockEnd, Record, TerminalStatus, Trace, CSV_HEADER};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::SetDescriptor;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub start: Point,
    pub max_iter: usize,
    /// Halt once `‖a_n − a_{n−1}‖` drops below this value.
    pub stop_residual: Option<f64>,
    /// Log every `record_stride`-th iteration (and always the last one).
    pub record_stride: usize,
    pub target: Option<Point>,
}

impl RunConfig {
    pub fn new(start: Point, max_iter: usize) -> Self {
        RunConfig {
            start,
            max_iter,
            stop_residual: None,
            record_stride: 1,
            target: None,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_stop_residual(mut self, tol: f64) -> Self {
        self.stop_residual = Some(tol);
        self
    }

    pub fn with_target(mut self, target: Point) -> Self {
        self.target = Some(target);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::Precondition("max_iter must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Precondition("record_stride must be at least 1".into()));
        }
        if let Some(t) = &self.target {
            t.check_dim(self.start.dim())?;
        }
        Ok(())
    }
}

/// The data of one computed iteration, passed to observers.
#[derive(Debug)]
pub struct Step<'a> {
    pub n: usize,
    pub block: usize,
    pub a_prev: &'a Point,
    pub b: &'a Point,
    pub a: &'a Point,
}

/// Resumable iteration state. Cloning a runner forks the run.
#[derive(Clone, Debug)]
pub struct Runner {
    schedule: Schedule,
    cfg: RunConfig,
    n: usize,
    a: Point,
    block: usize,
    in_block: usize,
    pair: Option<(SetDescriptor, SetDescriptor)>,
    records: Vec<Record>,
    block_ends: Vec<BlockEnd>,
    status: Option<TerminalStatus>,
}

impl Runner {
    pub fn new(schedule: Schedule, cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let a = cfg.start.clone();
        Ok(Runner {
            schedule,
            cfg,
            n: 0,
            a,
            block: 1,
            in_block: 0,
            pair: None,
            records: Vec::new(),
            block_ends: Vec::new(),
            status: None,
        })
    }

    /// Restarts from `trace.records[index]`, reconstructing the block position from the trace's
    /// block boundaries. Continuing reproduces the original run from that point on.
    pub fn resume(schedule: Schedule, cfg: RunConfig, trace: &Trace, index: usize) -> Result<Self> {
        cfg.validate()?;
        let rec = trace
            .records
            .get(index)
            .ok_or_else(|| Error::Precondition(format!("trace has no record {index}")))?;
        let block_ends: Vec<BlockEnd> = trace
            .block_ends
            .iter()
            .filter(|e| e.end_n <= rec.n)
            .cloned()
            .collect();
        let (block, block_start) = match schedule {
            Schedule::PerStep(_) => (rec.n + 1, rec.n),
            _ => (block_ends.len() + 1, block_ends.last().map_or(0, |e| e.end_n)),
        };
        let mut runner = Runner {
            schedule,
            cfg,
            n: rec.n,
            a: rec.a.clone(),
            block,
            in_block: rec.n - block_start,
            pair: None,
            records: trace.records[..=index].to_vec(),
            block_ends,
            status: None,
        };
        runner.status = runner.schedule_status_after_block_end();
        Ok(runner)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn current(&self) -> &Point {
        &self.a
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn status(&self) -> Option<TerminalStatus> {
        self.status
    }

    fn schedule_status_after_block_end(&self) -> Option<TerminalStatus> {
        let done = self.block - 1;
        match &self.schedule {
            Schedule::Blocks(blocks) if done >= blocks.len() => Some(TerminalStatus::ScheduleCompleted),
            Schedule::Adaptive(ad) if ad.max_blocks.is_some_and(|m| done >= m) => {
                Some(TerminalStatus::ScheduleCompleted)
            }
            _ => None,
        }
    }

    fn record(&self, b: &Point, res_a: f64) -> Record {
        Record {
            n: self.n,
            block: self.block_of_last_step(),
            a: self.a.clone(),
            b: b.clone(),
            norm_a: self.a.norm(),
            norm_b: b.norm(),
            gap_ab: self.a.dist(b),
            res_a,
            dist_target: self.cfg.target.as_ref().map(|t| self.a.dist(t)),
        }
    }

    fn block_of_last_step(&self) -> usize {
        if matches!(self.schedule, Schedule::PerStep(_)) {
            return self.n;
        }
        match self.block_ends.last() {
            Some(e) if e.end_n == self.n => e.block,
            _ => self.block,
        }
    }

    fn end_block(&mut self, reason: AdvanceReason) {
        self.block_ends.push(BlockEnd {
            block: self.block,
            end_n: self.n,
            norm_a: self.a.norm(),
            reason,
        });
        self.block += 1;
        self.in_block = 0;
        self.pair = None;
        if let Some(s) = self.schedule_status_after_block_end() {
            self.status = Some(s);
        }
    }

    /// Computes one iteration. Returns `false` once the run has terminated.
    pub fn step_with<F: FnMut(&Step<'_>)>(&mut self, observer: &mut F) -> Result<bool> {
        if self.status.is_some() {
            return Ok(false);
        }
        if self.n >= self.cfg.max_iter {
            self.status = Some(TerminalStatus::MaxIter);
            return Ok(false);
        }
        let n = self.n + 1;
        if self.pair.is_none() {
            let pair = self.schedule.block_pair(self.block).map_err(|e| match e {
                Error::ScheduleExhausted { .. } => Error::ScheduleExhausted { n },
                other => other,
            })?;
            if pair.0.dim() != self.a.dim() || pair.1.dim() != self.a.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.a.dim(),
                    found: if pair.0.dim() != self.a.dim() { pair.0.dim() } else { pair.1.dim() },
                });
            }
            self.pair = Some(pair);
        }
        let (set_a, set_b) = self.pair.as_ref().expect("pair resolved above");
        let wrap = |e: Error| Error::Projection {
            n,
            source: Box::new(e),
        };
        let b = set_b.project(&self.a).map_err(wrap)?;
        let a = set_a.project(&b).map_err(wrap)?;
        let res_a = a.dist(&self.a);
        observer(&Step {
            n,
            block: self.block,
            a_prev: &self.a,
            b: &b,
            a: &a,
        });
        self.n = n;
        self.a = a;
        self.in_block += 1;

        match &self.schedule {
            Schedule::Constant { .. } => {}
            Schedule::Blocks(blocks) => {
                if self.in_block >= blocks[self.block - 1].len {
                    self.end_block(AdvanceReason::BlockLength);
                }
            }
            Schedule::PerStep(_) => {
                self.block += 1;
                self.pair = None;
            }
            Schedule::Adaptive(ad) => {
                if (ad.predicate)(self.block, &self.a) {
                    self.end_block(AdvanceReason::Predicate);
                } else if self.in_block >= ad.max_block_len {
                    match ad.on_budget {
                        BudgetPolicy::Halt => self.status = Some(TerminalStatus::ScheduleExhausted),
                        BudgetPolicy::Advance => self.end_block(AdvanceReason::Budget),
                    }
                }
            }
        }
        if self.status.is_none() {
            if self.cfg.stop_residual.is_some_and(|tol| res_a < tol) {
                self.status = Some(TerminalStatus::ResidualMet);
            } else if self.n >= self.cfg.max_iter {
                self.status = Some(TerminalStatus::MaxIter);
            }
        }
        if n.is_multiple_of(self.cfg.record_stride) || self.status.is_some() {
            let rec = self.record(&b, res_a);
            self.records.push(rec);
        }
        Ok(self.status.is_none())
    }

    pub fn run_with<F: FnMut(&Step<'_>)>(mut self, mut observer: F) -> Result<Trace> {
        while self.step_with(&mut observer)? {}
        Ok(self.into_trace())
    }

    pub fn run(self) -> Result<Trace> {
        self.run_with(|_| {})
    }

    /// Trace of everything computed so far.
    pub fn into_trace(self) -> Trace {
        Trace {
            start: self.cfg.start,
            records: self.records,
            block_ends: self.block_ends,
            status: self.status.unwrap_or(TerminalStatus::MaxIter),
            steps: self.n,
        }
    }
}

/// Runs `b_n = P_{B_n}(a_{n−1})`, `a_n = P_{A_n}(b_n)` under `schedule`.
pub fn run_perturbed(schedule: &Schedule, cfg: &RunConfig) -> Result<Trace> {
    Runner::new(schedule.clone(), cfg.clone())?.run()
}

/// [`run_perturbed`] with a callback on every iteration (logged or not).
pub fn run_perturbed_with<F: FnMut(&Step<'_>)>(
    schedule: &Schedule,
    cfg: &RunConfig,
    observer: F,
) -> Result<Trace> {
    Runner::new(schedule.clone(), cfg.clone())?.run_with(observer)
}

/// Von Neumann's method on the fixed pair `(A, B)`.
pub fn run_classical(a: &SetDescriptor, b: &SetDescriptor, cfg: &RunConfig) -> Result<Trace> {
    run_perturbed(&Schedule::constant(a.clone(), b.clone()), cfg)
}

/// The pair and block used at iteration `n`, given the trace of iterations `1..n`. Adaptive
/// schedules are resolved from the block boundaries recorded in the trace.
pub fn resolve_pair(
    schedule: &Schedule,
    n: usize,
    trace_so_far: &Trace,
) -> Result<(SetDescriptor, SetDescriptor, usize)> {
    if n == 0 {
        return Err(Error::Precondition("iteration indices start at 1".into()));
    }
    match schedule {
        Schedule::Constant { a, b } => Ok((a.clone(), b.clone(), 1)),
        Schedule::Blocks(blocks) => {
            let mut end = 0;
            for (i, blk) in blocks.iter().enumerate() {
                end += blk.len;
                if n <= end {
                    return Ok((blk.a.clone(), blk.b.clone(), i + 1));
                }
            }
            Err(Error::ScheduleExhausted { n })
        }
        Schedule::Adaptive(ad) => {
            if n > trace_so_far.steps + 1 {
                return Err(Error::Precondition(format!(
                    "trace covers iterations up to {}, cannot resolve {n}",
                    trace_so_far.steps
                )));
            }
            let ends = &trace_so_far.block_ends;
            let k = 1 + ends.iter().filter(|e| e.end_n < n).count();
            let exhausted = n == trace_so_far.steps + 1
                && trace_so_far.status == TerminalStatus::ScheduleExhausted;
            if exhausted || ad.max_blocks.is_some_and(|m| k > m) {
                return Err(Error::ScheduleExhausted { n });
            }
            let (a, b) = (ad.pairs)(k)?;
            Ok((a, b, k))
        }
        Schedule::PerStep(ps) => {
            let (a, b) = (ps.pairs)(n)?;
            Ok((a, b, n))
        }
    }
}
