//! Rules assigning a pair `(A_n, B_n)` to every iteration index.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::SetDescriptor;

/// Generates the pair for block `k` (1-based).
pub type PairGenerator = Arc<dyn Fn(usize) -> Result<(SetDescriptor, SetDescriptor)> + Send + Sync>;

/// Decides, from the block index and the latest `a_n`, whether block `k` is finished.
pub type SwitchPredicate = Arc<dyn Fn(usize, &Point) -> bool + Send + Sync>;

#[derive(Clone, Debug)]
pub struct Block {
    pub a: SetDescriptor,
    pub b: SetDescriptor,
    pub len: usize,
}

/// What an adaptive schedule does when a block reaches `max_block_len` without its predicate
/// firing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetPolicy {
    /// Stop the run with status `schedule_exhausted`.
    Halt,
    /// Move on to the next block and record the reason.
    Advance,
}

#[derive(Clone)]
pub struct Adaptive {
    pub pairs: PairGenerator,
    pub predicate: SwitchPredicate,
    pub max_block_len: usize,
    /// Number of blocks after which the schedule is complete; `None` runs until `max_iter`.
    pub max_blocks: Option<usize>,
    pub on_budget: BudgetPolicy,
}

impl fmt::Debug for Adaptive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Adaptive")
            .field("max_block_len", &self.max_block_len)
            .field("max_blocks", &self.max_blocks)
            .field("on_budget", &self.on_budget)
            .finish_non_exhaustive()
    }
}

/// A fresh pair at every iteration; block `k` is iteration `k` and no boundaries are stored.
#[derive(Clone)]
pub struct PerStep {
    pub pairs: PairGenerator,
}

impl fmt::Debug for PerStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerStep").finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum Schedule {
    Constant { a: SetDescriptor, b: SetDescriptor },
    Blocks(Vec<Block>),
    Adaptive(Adaptive),
    PerStep(PerStep),
}

impl Schedule {
    pub fn constant(a: SetDescriptor, b: SetDescriptor) -> Self {
        Schedule::Constant { a, b }
    }

    pub fn blocks(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Precondition("block schedule needs at least one block".into()));
        }
        if let Some(i) = blocks.iter().position(|b| b.len == 0) {
            return Err(Error::Precondition(format!("block {} has length 0", i + 1)));
        }
        Ok(Schedule::Blocks(blocks))
    }

    pub fn adaptive(
        pairs: PairGenerator,
        predicate: SwitchPredicate,
        max_block_len: usize,
        max_blocks: Option<usize>,
        on_budget: BudgetPolicy,
    ) -> Result<Self> {
        if max_block_len == 0 {
            return Err(Error::Precondition("max_block_len must be at least 1".into()));
        }
        if max_blocks == Some(0) {
            return Err(Error::Precondition("max_blocks must be at least 1".into()));
        }
        Ok(Schedule::Adaptive(Adaptive {
            pairs,
            predicate,
            max_block_len,
            max_blocks,
            on_budget,
        }))
    }

    /// One pair per iteration: `(A_n, B_n) = family(n)`.
    pub fn per_step<F>(family: F) -> Self
    where
        F: Fn(usize) -> Result<(SetDescriptor, SetDescriptor)> + Send + Sync + 'static,
    {
        Schedule::PerStep(PerStep {
            pairs: Arc::new(family),
        })
    }

    /// Pair of block `k` (1-based).
    pub(crate) fn block_pair(&self, k: usize) -> Result<(SetDescriptor, SetDescriptor)> {
        match self {
            Schedule::Constant { a, b } => Ok((a.clone(), b.clone())),
            Schedule::Blocks(blocks) => blocks
                .get(k - 1)
                .map(|blk| (blk.a.clone(), blk.b.clone()))
                .ok_or(Error::ScheduleExhausted { n: k }),
            Schedule::Adaptive(ad) => (ad.pairs)(k),
            Schedule::PerStep(ps) => (ps.pairs)(k),
        }
    }

    /// Total length of a block schedule.
    pub fn total_len(&self) -> Option<usize> {
        match self {
            Schedule::Blocks(blocks) => Some(blocks.iter().map(|b| b.len).sum()),
            _ => None,
        }
    }
}
