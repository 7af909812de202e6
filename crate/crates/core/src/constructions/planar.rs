//! The two planar counterexamples: bodies whose perturbed iterates oscillate between two
//! points, and lines whose perturbed iterates are unbounded.

use std::sync::Arc;

use crate::engine::{run_perturbed, BudgetPolicy, RunConfig, Schedule, Trace};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::SetDescriptor;

fn p2(x: f64, y: f64) -> Point {
    Point::new(vec![x, y]).expect("finite coordinates")
}

/// The limit bodies `A`, `B` together with the `k`-th perturbed pair `(C_k, D_k)`.
#[derive(Clone, Debug)]
pub struct UnstableBodies {
    pub a: SetDescriptor,
    pub b: SetDescriptor,
    pub c: SetDescriptor,
    pub d: SetDescriptor,
}

fn mirrored(points: &[Point]) -> Vec<Point> {
    points.iter().map(|q| p2(q[0], -q[1])).collect()
}

/// Distinct points of `points`, in first-seen order.
fn dedup(points: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for q in points {
        if !out.iter().any(|o| o == q) {
            out.push(q.clone());
        }
    }
    out
}

/// Hull of `points`, checked to have exactly the listed (deduplicated) points as vertices.
fn exact_polygon(points: &[Point]) -> Result<SetDescriptor> {
    let listed = dedup(points);
    let set = SetDescriptor::polygon(&listed)?;
    let SetDescriptor::Polygon2D(poly) = &set else {
        unreachable!("polygon constructor returns a polygon")
    };
    let exact = poly.vertices().len() == listed.len()
        && listed.iter().all(|q| poly.vertices().iter().any(|v| v == q));
    if !exact {
        return Err(Error::Construction {
            condition: "vertex exactness".into(),
            detail: format!("hull of {listed:?} has vertices {:?}", poly.vertices()),
        });
    }
    Ok(set)
}

/// Upper vertex lists: `C_{2h} = conv{(1,1),(−1,1),(1,1/h),(−1,0)}`,
/// `C_{2h−1} = conv{(1,1),(−1,1),(1,0),(−1,1/h)}`; the lower sets are their mirror images.
pub fn example_unstable_bodies(k: usize) -> Result<UnstableBodies> {
    if k == 0 {
        return Err(Error::Precondition("block index k must be at least 1".into()));
    }
    let top = [p2(1.0, 1.0), p2(-1.0, 1.0), p2(1.0, 0.0), p2(-1.0, 0.0)];
    let c_pts = if k.is_multiple_of(2) {
        let h = (k / 2) as f64;
        [p2(1.0, 1.0), p2(-1.0, 1.0), p2(1.0, 1.0 / h), p2(-1.0, 0.0)]
    } else {
        let h = k.div_ceil(2) as f64;
        [p2(1.0, 1.0), p2(-1.0, 1.0), p2(1.0, 0.0), p2(-1.0, 1.0 / h)]
    };
    Ok(UnstableBodies {
        a: exact_polygon(&top)?,
        b: exact_polygon(&mirrored(&top))?,
        c: exact_polygon(&c_pts)?,
        d: exact_polygon(&mirrored(&c_pts))?,
    })
}

/// Point whose half-ball ends block `k`: `(1, 0)` for odd `k`, `(−1, 0)` for even `k`.
pub fn unstable_target(k: usize) -> Point {
    if k % 2 == 1 {
        p2(1.0, 0.0)
    } else {
        p2(-1.0, 0.0)
    }
}

/// Block `k` runs on `(C_k, D_k)` until the iterate is within `1/2` of [`unstable_target`].
pub fn example_unstable_schedule(n_blocks: usize, max_block_len: usize) -> Result<Schedule> {
    Schedule::adaptive(
        Arc::new(|k| {
            let bodies = example_unstable_bodies(k)?;
            Ok((bodies.c, bodies.d))
        }),
        Arc::new(|k, a| a.dist(&unstable_target(k)) < 0.5),
        max_block_len,
        Some(n_blocks),
        BudgetPolicy::Halt,
    )
}

/// Runs [`example_unstable_schedule`] from `(0, 0)`, logging every iterate. A predicate that never
/// fires within `max_block_len` shows up as status `schedule_exhausted`.
pub fn run_example_unstable(n_blocks: usize, max_block_len: usize) -> Result<Trace> {
    if n_blocks < 2 {
        return Err(Error::Precondition("at least two blocks are needed".into()));
    }
    let schedule = example_unstable_schedule(n_blocks, max_block_len)?;
    let cfg = RunConfig::new(Point::zeros(2), n_blocks.saturating_mul(max_block_len));
    run_perturbed(&schedule, &cfg)
}

/// The `k`-th line `{(x, 1/k − x/k²)}`, through `(0, 1/k)` and `(k, 0)`.
pub fn unbounded_line(k: usize) -> Result<SetDescriptor> {
    if k == 0 {
        return Err(Error::Precondition("line index k must be at least 1".into()));
    }
    let kf = k as f64;
    let (p, q) = (p2(0.0, 1.0 / kf), p2(kf, 0.0));
    let line = SetDescriptor::line_through(&p, &q)?;
    for r in [&p, &q] {
        let off = line.distance(r)?;
        if off > 1e-12 * kf {
            return Err(Error::Construction {
                condition: "line incidence".into(),
                detail: format!("line {k} misses {r:?} by {off:e}"),
            });
        }
    }
    Ok(line)
}

/// The x-axis, which is both limit sets and every `A_n`.
pub fn x_axis() -> SetDescriptor {
    SetDescriptor::span(2, &[p2(1.0, 0.0)]).expect("unit vector spans a line")
}

/// Block `k` runs on `(x-axis, line k)` until `‖a_n‖ > k/2`.
pub fn example_unbounded_schedule(n_blocks: usize, max_block_len: usize) -> Result<Schedule> {
    Schedule::adaptive(
        Arc::new(|k| Ok((x_axis(), unbounded_line(k)?))),
        Arc::new(|k, a| a.norm() > k as f64 / 2.0),
        max_block_len,
        Some(n_blocks),
        BudgetPolicy::Halt,
    )
}

/// Runs [`example_unbounded_schedule`] from `(0, 0)`, logging every iterate.
pub fn run_example_unbounded_lines(n_blocks: usize, max_block_len: usize) -> Result<Trace> {
    if n_blocks == 0 {
        return Err(Error::Precondition("at least one block is needed".into()));
    }
    let schedule = example_unbounded_schedule(n_blocks, max_block_len)?;
    let cfg = RunConfig::new(Point::zeros(2), n_blocks.saturating_mul(max_block_len));
    run_perturbed(&schedule, &cfg)
}
