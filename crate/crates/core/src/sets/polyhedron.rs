//! Polyhedra `{x : ⟨a_i, x⟩ ≤ b_i}`: cyclic Dykstra projection and low-dimensional vertex
//! enumeration.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_CYCLES: usize = 100_000;

/// Half-width of the bounding box used to detect unbounded directions during vertex enumeration.
const ENUM_BOX: f64 = 1e8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub a: Point,
    pub b: f64,
}

impl Constraint {
    fn violation(&self, x: &Point) -> f64 {
        self.a.dot(x) - self.b
    }

    fn project(&self, x: &Point) -> Point {
        let v = self.violation(x);
        if v <= 0.0 {
            x.clone()
        } else {
            x.axpy(-v / self.a.norm_sq(), &self.a)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyhedron")]
pub struct Polyhedron {
    constraints: Vec<Constraint>,
    witness: Point,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolyhedron {
    constraints: Vec<Constraint>,
    witness: Point,
}

impl TryFrom<RawPolyhedron> for Polyhedron {
    type Error = Error;

    fn try_from(raw: RawPolyhedron) -> Result<Self> {
        Polyhedron::new(raw.constraints, raw.witness)
    }
}

impl Polyhedron {
    /// `witness` must satisfy every constraint (within `1e-12` relative slack).
    pub fn new(constraints: Vec<Constraint>, witness: Point) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::InvalidSet("polyhedron needs at least one constraint".into()));
        }
        for (i, c) in constraints.iter().enumerate() {
            c.a.check_dim(witness.dim())?;
            if c.a.norm() == 0.0 {
                return Err(Error::InvalidSet(format!("constraint {i} has a zero normal")));
            }
            if !c.b.is_finite() {
                return Err(Error::InvalidSet(format!("constraint {i} has a non-finite bound")));
            }
            if c.violation(&witness) > 1e-12 * (1.0 + c.b.abs()) {
                return Err(Error::InvalidSet(format!(
                    "witness violates constraint {i} by {:e}",
                    c.violation(&witness)
                )));
            }
        }
        Ok(Polyhedron {
            constraints,
            witness,
        })
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn witness(&self) -> &Point {
        &self.witness
    }

    pub fn dim(&self) -> usize {
        self.witness.dim()
    }

    /// Largest normalized constraint violation (0 when feasible).
    pub fn max_violation(&self, x: &Point) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.violation(x) / c.a.norm())
            .fold(0.0, f64::max)
    }

    pub fn satisfies(&self, x: &Point, slack: f64) -> bool {
        self.constraints
            .iter()
            .all(|c| c.violation(x) <= slack * c.a.norm())
    }

    pub fn translated(&self, v: &Point) -> Result<Self> {
        v.check_dim(self.dim())?;
        Ok(Polyhedron {
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    a: c.a.clone(),
                    b: c.b + c.a.dot(v),
                })
                .collect(),
            witness: &self.witness + v,
        })
    }

    pub fn project(&self, x: &Point) -> Result<Point> {
        self.project_dykstra(x, DEFAULT_TOL, DEFAULT_MAX_CYCLES)
    }

    /// Cyclic Dykstra over the halfspaces, stopped when a full cycle moves the iterate and the
    /// correction vectors by less than `tol`. The result is then polished onto the affine hull of
    /// the detected active constraints when that candidate passes the KKT check.
    pub fn project_dykstra(&self, x: &Point, tol: f64, max_cycles: usize) -> Result<Point> {
        x.check_dim(self.dim())?;
        if !(tol > 0.0) {
            return Err(Error::Precondition("Dykstra tolerance must be positive".into()));
        }
        if self.satisfies(x, 0.0) {
            return Ok(x.clone());
        }
        let m = self.constraints.len();
        let mut iterate = x.clone();
        let mut corrections = vec![Point::zeros(x.dim()); m];
        let mut displacement = f64::INFINITY;
        for _ in 0..max_cycles {
            let start = iterate.clone();
            let mut correction_change = 0.0;
            for (c, p) in self.constraints.iter().zip(corrections.iter_mut()) {
                let y = &iterate + p;
                let next = c.project(&y);
                let new_p = &y - &next;
                correction_change += new_p.dist(p);
                *p = new_p;
                iterate = next;
            }
            displacement = iterate.dist(&start);
            if displacement < tol && correction_change < tol {
                return Ok(self.polish(x, iterate, &corrections));
            }
        }
        Err(Error::DykstraNotConverged {
            cycles: max_cycles,
            residual: displacement,
            last: iterate,
        })
    }

    fn polish(&self, x: &Point, approx: Point, corrections: &[Point]) -> Point {
        let scale = 1.0 + approx.norm();
        let near_active: Vec<usize> = (0..self.constraints.len())
            .filter(|&i| {
                let c = &self.constraints[i];
                c.violation(&approx).abs() <= 1e-7 * c.a.norm() * scale
            })
            .collect();
        let with_correction: Vec<usize> = near_active
            .iter()
            .copied()
            .filter(|&i| corrections[i].norm() > 0.0)
            .collect();
        for active in [&with_correction, &near_active] {
            if let Some(y) = self.kkt_candidate(x, active) {
                if y.dist(&approx) <= 1e-6 * scale {
                    return y;
                }
            }
        }
        approx
    }

    /// Projection of `x` onto `{⟨a_i, y⟩ = b_i, i ∈ active}`, returned only when it is feasible
    /// with nonnegative multipliers, i.e. when it is the projection onto the polyhedron.
    fn kkt_candidate(&self, x: &Point, active: &[usize]) -> Option<Point> {
        if active.is_empty() || active.len() > x.dim() {
            return None;
        }
        let k = active.len();
        let gram = DMatrix::from_fn(k, k, |r, c| {
            self.constraints[active[r]]
                .a
                .dot(&self.constraints[active[c]].a)
        });
        let rhs = DVector::from_fn(k, |r, _| self.constraints[active[r]].violation(x));
        let lambda = gram.cholesky()?.solve(&rhs);
        if lambda.iter().any(|l| *l < -1e-12) {
            return None;
        }
        let mut y = x.clone();
        for (r, &i) in active.iter().enumerate() {
            y = y.axpy(-lambda[r], &self.constraints[i].a);
        }
        let slack = 1e-12 * (1.0 + y.norm());
        self.satisfies(&y, slack).then_some(y)
    }

    /// Vertices of the polyhedron intersected with the box `[-half, half]^d`, for `d ≤ 3`.
    fn boxed_vertices(&self, half: f64) -> Result<Vec<Point>> {
        let d = self.dim();
        if d > 3 {
            return Err(Error::Unsupported(format!(
                "vertex enumeration is limited to d <= 3 (got d = {d}); use sampled probes"
            )));
        }
        let mut rows: Vec<(Vec<f64>, f64)> = self
            .constraints
            .iter()
            .map(|c| (c.a.coords().to_vec(), c.b))
            .collect();
        for j in 0..d {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            rows.push((e.clone(), half));
            e[j] = -1.0;
            rows.push((e, half));
        }
        let mut out = Vec::new();
        for combo in combinations(rows.len(), d) {
            let a = DMatrix::from_fn(d, d, |r, c| rows[combo[r]].0[c]);
            let b = DVector::from_fn(d, |r, _| rows[combo[r]].1);
            let Some(sol) = a.lu().solve(&b) else { continue };
            if sol.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let v = Point::from_vec_unchecked(sol.iter().copied().collect());
            let slack = 1e-9 * (1.0 + v.norm());
            let in_box = v.coords().iter().all(|c| c.abs() <= half * (1.0 + 1e-12));
            if in_box && self.satisfies(&v, slack) {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Maximum of `f` over the boxed polyhedron and the mean of the maximizing vertices. The
    /// direction is bounded iff doubling the box leaves the maximum unchanged.
    fn support_vertex(&self, f: &Point) -> Result<(f64, Point)> {
        f.check_dim(self.dim())?;
        let best = |half: f64| -> Result<(f64, Point)> {
            let vertices = self.boxed_vertices(half)?;
            let sup = vertices
                .iter()
                .map(|v| v.dot(f))
                .fold(f64::NEG_INFINITY, f64::max);
            if !sup.is_finite() {
                return Err(Error::InvalidSet("polyhedron has no vertices".into()));
            }
            let tol = 1e-9 * (1.0 + sup.abs());
            let face: Vec<&Point> = vertices.iter().filter(|v| v.dot(f) >= sup - tol).collect();
            let mean = face
                .iter()
                .fold(Point::zeros(self.dim()), |acc, v| acc.axpy(1.0 / face.len() as f64, v));
            Ok((sup, mean))
        };
        let (sup, point) = best(ENUM_BOX)?;
        let (sup2, _) = best(2.0 * ENUM_BOX)?;
        if (sup2 - sup).abs() > 1e-6 * (1.0 + sup.abs()) {
            return Err(Error::Unbounded);
        }
        Ok((sup, point))
    }

    pub fn support_value(&self, f: &Point) -> Result<f64> {
        Ok(self.support_vertex(f)?.0)
    }

    pub fn support_point(&self, f: &Point) -> Result<Point> {
        Ok(self.support_vertex(f)?.1)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn halfspaces(rows: &[(&[f64], f64)], witness: &[f64]) -> Polyhedron {
        let cons = rows
            .iter()
            .map(|(a, b)| Constraint { a: p(a), b: *b })
            .collect();
        Polyhedron::new(cons, p(witness)).unwrap()
    }

    #[test]
    fn single_constraint_matches_halfspace() {
        let poly = halfspaces(&[(&[1.0, 0.0], 0.0)], &[-1.0, 0.0]);
        let y = poly.project(&p(&[2.0, 3.0])).unwrap();
        assert!(y.dist(&p(&[0.0, 3.0])) < 1e-12);
    }

    #[test]
    fn orthant_corner() {
        // Both faces are active at the projection.
        let poly = halfspaces(&[(&[1.0, 0.0], 0.0), (&[0.0, 1.0], 0.0)], &[-1.0, -1.0]);
        let y = poly.project(&p(&[1.0, 1.0])).unwrap();
        assert!(y.dist(&p(&[0.0, 0.0])) < 1e-12);
    }

    #[test]
    fn feasible_point_unchanged() {
        let poly = halfspaces(&[(&[1.0, 1.0], 1.0), (&[-1.0, 0.0], 1.0)], &[0.0, 0.0]);
        let x = p(&[0.2, 0.3]);
        assert_eq!(poly.project(&x).unwrap(), x);
    }

    #[test]
    fn witness_is_checked() {
        let cons = vec![Constraint { a: p(&[1.0, 0.0]), b: 0.0 }];
        assert!(Polyhedron::new(cons, p(&[1.0, 0.0])).is_err());
        let cons = vec![Constraint { a: p(&[0.0, 0.0]), b: 0.0 }];
        assert!(Polyhedron::new(cons, p(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_last_iterate() {
        // Two nearly parallel faces meeting at a sharp wedge converge slowly.
        let poly = halfspaces(&[(&[1.0, 1e-3], 0.0), (&[-1.0, 1e-3], 0.0)], &[0.0, -1.0]);
        match poly.project_dykstra(&p(&[0.0, 50.0]), 1e-14, 3) {
            Err(Error::DykstraNotConverged { cycles, last, .. }) => {
                assert_eq!(cycles, 3);
                assert_eq!(last.dim(), 2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn support_by_vertex_enumeration() {
        let square = halfspaces(
            &[
                (&[1.0, 0.0], 1.0),
                (&[-1.0, 0.0], 1.0),
                (&[0.0, 1.0], 1.0),
                (&[0.0, -1.0], 1.0),
            ],
            &[0.0, 0.0],
        );
        assert!((square.support_value(&p(&[1.0, 2.0])).unwrap() - 3.0).abs() < 1e-9);
        let strip = halfspaces(&[(&[1.0, 0.0], 1.0), (&[-1.0, 0.0], 1.0)], &[0.0, 0.0]);
        assert!((strip.support_value(&p(&[1.0, 0.0])).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(strip.support_value(&p(&[0.0, 1.0])), Err(Error::Unbounded)));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}
