//! Iteration logs and their CSV / JSON encodings.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

pub const CSV_HEADER: &str = "n,block,res_a,norm_a,norm_b,gap_ab,dist_target";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    MaxIter,
    ResidualMet,
    /// An adaptive block hit its length budget without its predicate firing.
    ScheduleExhausted,
    /// A finite block schedule ran through all of its blocks.
    ScheduleCompleted,
}

impl TerminalStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalStatus::MaxIter => "max_iter",
            TerminalStatus::ResidualMet => "residual_met",
            TerminalStatus::ScheduleExhausted => "schedule_exhausted",
            TerminalStatus::ScheduleCompleted => "schedule_completed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvanceReason {
    Predicate,
    BlockLength,
    Budget,
}

/// One logged iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub block: usize,
    pub a: Point,
    pub b: Point,
    pub norm_a: f64,
    pub norm_b: f64,
    /// `‖a_n − b_n‖`.
    pub gap_ab: f64,
    /// `‖a_n − a_{n−1}‖`.
    pub res_a: f64,
    pub dist_target: Option<f64>,
}

/// Last iteration of a block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEnd {
    pub block: usize,
    pub end_n: usize,
    pub norm_a: f64,
    pub reason: AdvanceReason,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub start: Point,
    pub records: Vec<Record>,
    pub block_ends: Vec<BlockEnd>,
    pub status: TerminalStatus,
    /// Index of the last computed iteration.
    pub steps: usize,
}

impl Trace {
    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    /// Final `a_n` (the start if no step was taken).
    pub fn final_a(&self) -> &Point {
        self.records.last().map_or(&self.start, |r| &r.a)
    }

    pub fn blocks_completed(&self) -> usize {
        self.block_ends.len()
    }

    /// Writes the CSV encoding. Each of `comments` becomes a leading `# ` line.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{CSV_HEADER}")?;
        let mut buf = ryu::Buffer::new();
        for r in &self.records {
            write!(w, "{},{}", r.n, r.block)?;
            for v in [r.res_a, r.norm_a, r.norm_b, r.gap_ab] {
                write!(w, ",{}", buf.format(v))?;
            }
            match r.dist_target {
                Some(v) => writeln!(w, ",{}", buf.format(v))?,
                None => writeln!(w, ",")?,
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self, comments: &[String]) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out, comments).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("CSV output is ASCII")
    }

    /// Full-precision JSON including coordinates.
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }
}
