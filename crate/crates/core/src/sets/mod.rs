//! Projectable convex sets.
//!
//! Every kind except [`SetDescriptor::ShiftedConvexCone`] has an exact or certified-iterative
//! metric projection. All projections satisfy the variational characterization
//! `⟨x − P(x), y − P(x)⟩ ≤ 0` for every `y` in the set.
//!
//! The JSON encoding is internally tagged by `"kind"`, e.g.
//! `{"kind": "halfspace", "a": [1.0, 0.0], "b": 0.0}`. Decoding validates the same invariants as
//! the constructors.

mod kinds;
pub mod polygon;
pub mod polyhedron;
pub mod sampling;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cone_contains, ConeKind, ConeSpec, Point};

pub use kinds::{AffineSubspace, Ball, DiagonalAffineGraph, Halfspace, Hyperplane, NonnegOrthant, OrthoSubspace};
pub use polygon::Polygon2D;
pub use polyhedron::{Constraint, Polyhedron};

/// Tolerance on Gram matrices of orthonormal bases.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescriptor {
    Halfspace(Halfspace),
    Hyperplane(Hyperplane),
    Ball(Ball),
    #[serde(rename = "polygon2d")]
    Polygon2D(Polygon2D),
    OrthoSubspace(OrthoSubspace),
    AffineSubspace(AffineSubspace),
    NonnegOrthant(NonnegOrthant),
    Polyhedron(Polyhedron),
    DiagonalAffineGraph(DiagonalAffineGraph),
    ShiftedConvexCone(ShiftedConvexCone),
}

/// A shifted convex cone `C(f, α) − λx₀`; membership only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawShiftedCone")]
pub struct ShiftedConvexCone {
    cone: ConeSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShiftedCone {
    cone: ConeSpec,
}

impl TryFrom<RawShiftedCone> for ShiftedConvexCone {
    type Error = Error;

    fn try_from(raw: RawShiftedCone) -> Result<Self> {
        ShiftedConvexCone::new(raw.cone)
    }
}

impl ShiftedConvexCone {
    pub fn new(cone: ConeSpec) -> Result<Self> {
        if cone.kind() != ConeKind::C {
            return Err(Error::InvalidSet(
                "only C-kind cones are convex sets".into(),
            ));
        }
        Ok(ShiftedConvexCone { cone })
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }
}

impl SetDescriptor {
    pub fn halfspace(a: Point, b: f64) -> Result<Self> {
        Ok(SetDescriptor::Halfspace(Halfspace::new(a, b)?))
    }

    pub fn hyperplane(a: Point, b: f64) -> Result<Self> {
        Ok(SetDescriptor::Hyperplane(Hyperplane::new(a, b)?))
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Ok(SetDescriptor::Ball(Ball::new(center, radius)?))
    }

    pub fn polygon(vertices: &[Point]) -> Result<Self> {
        Ok(SetDescriptor::Polygon2D(Polygon2D::new(vertices)?))
    }

    pub fn ortho_subspace(dim: usize, basis: Vec<Point>) -> Result<Self> {
        Ok(SetDescriptor::OrthoSubspace(OrthoSubspace::new(dim, basis)?))
    }

    /// Subspace spanned by arbitrary (independent) vectors, orthonormalized here.
    pub fn span(dim: usize, vectors: &[Point]) -> Result<Self> {
        Ok(SetDescriptor::OrthoSubspace(OrthoSubspace::new(
            dim,
            orthonormalize(vectors)?,
        )?))
    }

    pub fn affine_subspace(anchor: Point, basis: Vec<Point>) -> Result<Self> {
        Ok(SetDescriptor::AffineSubspace(AffineSubspace::new(anchor, basis)?))
    }

    /// Line through two distinct points.
    pub fn line_through(p: &Point, q: &Point) -> Result<Self> {
        let dir = (q - p).normalized()?;
        SetDescriptor::affine_subspace(p.clone(), vec![dir])
    }

    pub fn nonneg_orthant(dim: usize) -> Result<Self> {
        Ok(SetDescriptor::NonnegOrthant(NonnegOrthant::new(dim)?))
    }

    pub fn polyhedron(constraints: Vec<Constraint>, witness: Point) -> Result<Self> {
        Ok(SetDescriptor::Polyhedron(Polyhedron::new(constraints, witness)?))
    }

    pub fn diagonal_graph(theta: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        Ok(SetDescriptor::DiagonalAffineGraph(DiagonalAffineGraph::new(
            theta, offset,
        )?))
    }

    pub fn shifted_cone(cone: ConeSpec) -> Result<Self> {
        Ok(SetDescriptor::ShiftedConvexCone(ShiftedConvexCone::new(cone)?))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SetDescriptor::Halfspace(_) => "halfspace",
            SetDescriptor::Hyperplane(_) => "hyperplane",
            SetDescriptor::Ball(_) => "ball",
            SetDescriptor::Polygon2D(_) => "polygon2d",
            SetDescriptor::OrthoSubspace(_) => "ortho_subspace",
            SetDescriptor::AffineSubspace(_) => "affine_subspace",
            SetDescriptor::NonnegOrthant(_) => "nonneg_orthant",
            SetDescriptor::Polyhedron(_) => "polyhedron",
            SetDescriptor::DiagonalAffineGraph(_) => "diagonal_affine_graph",
            SetDescriptor::ShiftedConvexCone(_) => "shifted_convex_cone",
        }
    }

    /// Ambient dimension (`2d` for a diagonal graph).
    pub fn dim(&self) -> usize {
        match self {
            SetDescriptor::Halfspace(s) => s.a().dim(),
            SetDescriptor::Hyperplane(s) => s.a().dim(),
            SetDescriptor::Ball(s) => s.center().dim(),
            SetDescriptor::Polygon2D(_) => 2,
            SetDescriptor::OrthoSubspace(s) => s.dim(),
            SetDescriptor::AffineSubspace(s) => s.anchor().dim(),
            SetDescriptor::NonnegOrthant(s) => s.dim(),
            SetDescriptor::Polyhedron(s) => s.dim(),
            SetDescriptor::DiagonalAffineGraph(s) => 2 * s.theta().len(),
            SetDescriptor::ShiftedConvexCone(s) => s.cone().dim(),
        }
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        x.check_dim(self.dim())
    }

    /// Metric projection onto the set.
    pub fn project(&self, x: &Point) -> Result<Point> {
        self.check_dim(x)?;
        Ok(match self {
            SetDescriptor::Halfspace(s) => s.project(x),
            SetDescriptor::Hyperplane(s) => s.project(x),
            SetDescriptor::Ball(s) => s.project(x),
            SetDescriptor::Polygon2D(s) => s.project(x),
            SetDescriptor::OrthoSubspace(s) => s.project(x),
            SetDescriptor::AffineSubspace(s) => s.project(x),
            SetDescriptor::NonnegOrthant(s) => s.project(x),
            SetDescriptor::Polyhedron(s) => s.project(x)?,
            SetDescriptor::DiagonalAffineGraph(s) => s.project(x),
            SetDescriptor::ShiftedConvexCone(_) => {
                return Err(Error::UnsupportedProjection("shifted_convex_cone"))
            }
        })
    }

    /// `dist(x, S)`, exact for every projectable kind.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        Ok(x.dist(&self.project(x)?))
    }

    /// Whether `dist(x, S) ≤ tol`. For the cone kind the defining inequality is tested with
    /// tolerance `tol` instead.
    pub fn membership(&self, x: &Point, tol: f64) -> Result<bool> {
        self.check_dim(x)?;
        match self {
            SetDescriptor::ShiftedConvexCone(s) => cone_contains(s.cone(), x, tol),
            SetDescriptor::Polyhedron(s) => {
                if s.satisfies(x, 0.0) {
                    return Ok(true);
                }
                // Each violated face gives a lower bound on the distance.
                if s.max_violation(x) > tol {
                    return Ok(false);
                }
                Ok(self.distance(x)? <= tol)
            }
            _ => Ok(self.distance(x)? <= tol),
        }
    }

    /// `sup_{x ∈ S} ⟨f, x⟩` where an exact formula exists.
    pub fn support_value(&self, f: &Point) -> Result<f64> {
        self.check_dim(f)?;
        if f.norm() == 0.0 {
            return Err(Error::ZeroVector("support functional"));
        }
        match self {
            SetDescriptor::Ball(s) => Ok(s.center().dot(f) + s.radius() * f.norm()),
            SetDescriptor::Polygon2D(s) => Ok(s.support_value(f)),
            SetDescriptor::Polyhedron(s) => s.support_value(f),
            SetDescriptor::Halfspace(s) => s.support_value(f),
            SetDescriptor::Hyperplane(s) => s.support_value(f),
            SetDescriptor::OrthoSubspace(s) => s.support_value(f),
            SetDescriptor::AffineSubspace(s) => s.support_value(f),
            SetDescriptor::NonnegOrthant(_) => {
                if f.coords().iter().all(|c| *c <= 0.0) {
                    Ok(0.0)
                } else {
                    Err(Error::Unbounded)
                }
            }
            SetDescriptor::DiagonalAffineGraph(s) => s.support_value(f),
            SetDescriptor::ShiftedConvexCone(_) => Err(Error::Unsupported(
                "no exact support value for shifted cones; use sampled probes".into(),
            )),
        }
    }

    /// A maximizer of `⟨f, ·⟩` over the set, for bounded kinds.
    pub fn support_point(&self, f: &Point) -> Result<Point> {
        self.check_dim(f)?;
        match self {
            SetDescriptor::Ball(s) => Ok(s.center().axpy(s.radius(), &f.normalized()?)),
            SetDescriptor::Polygon2D(s) => Ok(s.support_point(f)),
            SetDescriptor::Polyhedron(s) => s.support_point(f),
            other => Err(Error::Unsupported(format!(
                "support point not available for {}; use sampled probes",
                other.kind_name()
            ))),
        }
    }

    /// `S + v`.
    pub fn translated(&self, v: &Point) -> Result<SetDescriptor> {
        self.check_dim(v)?;
        Ok(match self {
            SetDescriptor::Halfspace(s) => SetDescriptor::halfspace(s.a().clone(), s.b() + s.a().dot(v))?,
            SetDescriptor::Hyperplane(s) => SetDescriptor::hyperplane(s.a().clone(), s.b() + s.a().dot(v))?,
            SetDescriptor::Ball(s) => SetDescriptor::ball(s.center() + v, s.radius())?,
            SetDescriptor::Polygon2D(s) => SetDescriptor::Polygon2D(s.translated(v)?),
            SetDescriptor::OrthoSubspace(s) => {
                SetDescriptor::affine_subspace(v.clone(), s.basis().to_vec())?
            }
            SetDescriptor::AffineSubspace(s) => {
                SetDescriptor::affine_subspace(s.anchor() + v, s.basis().to_vec())?
            }
            SetDescriptor::NonnegOrthant(s) => {
                let cons = (0..s.dim())
                    .map(|i| Constraint {
                        a: Point::basis(s.dim(), i).scaled(-1.0),
                        b: -v[i],
                    })
                    .collect();
                SetDescriptor::polyhedron(cons, v.clone())?
            }
            SetDescriptor::Polyhedron(s) => SetDescriptor::Polyhedron(s.translated(v)?),
            SetDescriptor::DiagonalAffineGraph(s) => SetDescriptor::DiagonalAffineGraph(s.translated(v)?),
            SetDescriptor::ShiftedConvexCone(_) => {
                return Err(Error::Unsupported("translating a shifted cone".into()))
            }
        })
    }

    /// Enlarges the set by `r ≥ 0` where that stays within the same kind (balls and halfspaces).
    pub fn inflated(&self, r: f64) -> Result<SetDescriptor> {
        match self {
            SetDescriptor::Ball(s) => SetDescriptor::ball(s.center().clone(), s.radius() + r),
            SetDescriptor::Halfspace(s) => {
                SetDescriptor::halfspace(s.a().clone(), s.b() + r * s.a().norm())
            }
            other => Err(Error::Unsupported(format!("inflating {}", other.kind_name()))),
        }
    }

    /// Affine description `(anchor, orthonormal basis)` for flat kinds.
    pub(crate) fn affine_parts(&self) -> Option<(Point, Vec<Point>)> {
        match self {
            SetDescriptor::OrthoSubspace(s) => Some((Point::zeros(s.dim()), s.basis().to_vec())),
            SetDescriptor::AffineSubspace(s) => {
                // Closest point to the origin as the anchor.
                let anchor = s.project(&Point::zeros(s.anchor().dim()));
                Some((anchor, s.basis().to_vec()))
            }
            SetDescriptor::Hyperplane(s) if s.a().dim() == 2 => {
                let n = s.a();
                let anchor = n.scaled(s.b() / n.norm_sq());
                let dir = Point::from_vec_unchecked(vec![-n[1], n[0]]).normalized().ok()?;
                Some((anchor, vec![dir]))
            }
            _ => None,
        }
    }
}

/// Gram–Schmidt (twice, for stability) on independent vectors.
pub fn orthonormalize(vectors: &[Point]) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                w = w.axpy(-w.dot(q), q);
            }
        }
        let n = w.norm();
        if n <= 1e-12 * (1.0 + v.norm()) {
            return Err(Error::InvalidSet("vectors are linearly dependent".into()));
        }
        out.push(w.scaled(1.0 / n));
    }
    Ok(out)
}

/// Checks that `basis` has the right dimension and a Gram matrix within
/// [`ORTHONORMAL_TOL`] of the identity.
pub fn check_orthonormal(basis: &[Point], dim: usize) -> Result<()> {
    for (i, u) in basis.iter().enumerate() {
        u.check_dim(dim)?;
        for (j, v) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            if (u.dot(v) - target).abs() > ORTHONORMAL_TOL {
                return Err(Error::InvalidSet(format!(
                    "basis is not orthonormal: <e{i}, e{j}> = {}",
                    u.dot(v)
                )));
            }
        }
    }
    Ok(())
}

/// Points of `S` with `⟨f, ·⟩ ≥ sup f(S) − alpha`. The first point is always on the supporting
/// face.
pub fn slice_sample(
    set: &SetDescriptor,
    f: &Point,
    alpha: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<Vec<Point>> {
    if !(alpha > 0.0) {
        return Err(Error::Precondition("slice depth must be positive".into()));
    }
    let sup = set.support_value(f)?;
    let level = sup - alpha;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = n_samples.max(1);
    let points = match set {
        SetDescriptor::Ball(ball) => sampling::ball_cap(ball, f, level, n, &mut rng),
        SetDescriptor::Polygon2D(poly) => {
            let verts = poly.clip_above(f, level);
            let mut pts = vec![poly.support_point(f)];
            pts.extend(verts.iter().cloned());
            pts.extend(sampling::convex_combinations(&verts, n.saturating_sub(pts.len()), &mut rng));
            pts
        }
        _ => {
            let top = set.support_point(f).or_else(|_| {
                // Face not computable: fall back to the best of a large sample.
                let pool = sampling::sample_members(set, 4 * n, 10.0, &mut rng)?;
                pool.into_iter()
                    .max_by(|a, b| a.dot(f).total_cmp(&b.dot(f)))
                    .ok_or_else(|| Error::SamplingFailed("empty sample pool".into()))
            })?;
            let mut pts = vec![top.clone()];
            for q in sampling::sample_members(set, n, 10.0, &mut rng)? {
                let gap = sup - q.dot(f);
                let t = if gap <= alpha { 1.0 } else { alpha / gap };
                pts.push(top.axpy(t, &(&q - &top)));
            }
            pts
        }
    };
    let tol = 1e-9 * (1.0 + sup.abs());
    let kept: Vec<Point> = points.into_iter().filter(|p| p.dot(f) >= level - tol).collect();
    if kept.is_empty() {
        return Err(Error::SamplingFailed("slice sampler produced no points".into()));
    }
    Ok(kept)
}

/// Largest pairwise distance of a finite point set.
pub fn diameter(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(p.dist(q));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn example_a() -> SetDescriptor {
        SetDescriptor::polygon(&[p(&[1.0, 1.0]), p(&[-1.0, 1.0]), p(&[1.0, 0.0]), p(&[-1.0, 0.0])])
            .unwrap()
    }

    #[test]
    fn projection_examples() {
        let h = SetDescriptor::halfspace(p(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(h.project(&p(&[2.0, 3.0])).unwrap(), p(&[0.0, 3.0]));
        assert_eq!(example_a().project(&p(&[0.0, -1.0])).unwrap(), p(&[0.0, 0.0]));
        let k = SetDescriptor::nonneg_orthant(2).unwrap();
        assert_eq!(k.project(&p(&[-1.0, 2.0])).unwrap(), p(&[0.0, 2.0]));
        let g = SetDescriptor::diagonal_graph(vec![0.5], vec![0.2]).unwrap();
        let y = g.project(&p(&[1.0, 0.0])).unwrap();
        assert!((y[0] - 0.72).abs() < 1e-15);
        assert!((y[1] - (0.2 + 0.5 * 0.72)).abs() < 1e-15);
    }

    #[test]
    fn cone_kind_has_no_projection() {
        let cone = ConeSpec::new(&p(&[0.0, 1.0]), 0.5, 0.0, ConeKind::C).unwrap();
        let s = SetDescriptor::shifted_cone(cone).unwrap();
        assert!(matches!(
            s.project(&p(&[1.0, 1.0])),
            Err(Error::UnsupportedProjection(_))
        ));
        assert!(s.membership(&p(&[0.0, 1.0]), 0.0).unwrap());
        assert!(!s.membership(&p(&[1.0, 0.0]), 0.0).unwrap());
    }

    #[test]
    fn membership_examples() {
        let b = SetDescriptor::ball(Point::zeros(2), 1.0).unwrap();
        assert!(b.membership(&p(&[0.5, 0.0]), 0.0).unwrap());
        let hp = SetDescriptor::hyperplane(p(&[0.0, 1.0]), 0.0).unwrap();
        assert!(hp.membership(&p(&[7.0, 1e-12]), 1e-9).unwrap());
        let strip = SetDescriptor::polyhedron(
            vec![
                Constraint { a: p(&[1.0, 0.0]), b: 1.0 },
                Constraint { a: p(&[-1.0, 0.0]), b: 1.0 },
            ],
            Point::zeros(2),
        )
        .unwrap();
        assert!(!strip.membership(&p(&[2.0, 0.0]), 0.5).unwrap());
        assert!(strip.membership(&p(&[2.0, 0.0]), 1.0 + 1e-12).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b = SetDescriptor::ball(Point::zeros(2), 1.0).unwrap();
        assert!(matches!(
            b.project(&p(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_constructors_rejected() {
        assert!(SetDescriptor::halfspace(Point::zeros(2), 1.0).is_err());
        assert!(SetDescriptor::ball(Point::zeros(2), 0.0).is_err());
        assert!(SetDescriptor::ortho_subspace(2, vec![p(&[1.0, 1.0])]).is_err());
        assert!(SetDescriptor::diagonal_graph(vec![1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn support_value_examples() {
        let b = SetDescriptor::ball(p(&[0.0, 1.0]), 1.0).unwrap();
        assert_eq!(b.support_value(&p(&[0.0, -1.0])).unwrap(), 0.0);
        assert_eq!(example_a().support_value(&p(&[0.0, 1.0])).unwrap(), 1.0);
        assert_eq!(example_a().support_value(&p(&[0.0, -1.0])).unwrap(), 0.0);
        let h = SetDescriptor::halfspace(p(&[0.0, 2.0]), 1.0).unwrap();
        assert_eq!(h.support_value(&p(&[0.0, 1.0])).unwrap(), 0.5);
        assert!(matches!(h.support_value(&p(&[1.0, 0.0])), Err(Error::Unbounded)));
        let cone = ConeSpec::new(&p(&[0.0, 1.0]), 0.5, 0.0, ConeKind::C).unwrap();
        assert!(matches!(
            SetDescriptor::shifted_cone(cone).unwrap().support_value(&p(&[0.0, 1.0])),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn slice_of_whole_ball() {
        let b = SetDescriptor::ball(p(&[0.0, 1.0]), 1.0).unwrap();
        let pts = slice_sample(&b, &p(&[0.0, 1.0]), 2.0, 400, 1).unwrap();
        assert!((diameter(&pts) - 2.0).abs() < 1e-2);
    }

    #[test]
    fn slice_of_ball_shrinks() {
        let b = SetDescriptor::ball(p(&[0.0, 1.0]), 1.0).unwrap();
        for alpha in [0.1, 0.01, 0.001] {
            let pts = slice_sample(&b, &p(&[0.0, 1.0]), alpha, 400, 2).unwrap();
            let chord = 2.0 * (2.0 * alpha - alpha * alpha).sqrt();
            let diam = diameter(&pts);
            assert!(diam <= chord + 1e-12, "{diam} > {chord}");
            assert!(diam >= 0.99 * chord);
        }
    }

    #[test]
    fn polygon_slice_respects_level() {
        let pts = slice_sample(&example_a(), &p(&[0.0, 1.0]), 0.5, 200, 3).unwrap();
        assert!(pts.iter().all(|q| q[1] >= 0.5 - 1e-12));
        assert!((diameter(&pts) - (4.0f64 + 0.25).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn generic_slice_on_polyhedron() {
        let square = SetDescriptor::polyhedron(
            vec![
                Constraint { a: p(&[1.0, 0.0]), b: 1.0 },
                Constraint { a: p(&[-1.0, 0.0]), b: 0.0 },
                Constraint { a: p(&[0.0, 1.0]), b: 1.0 },
                Constraint { a: p(&[0.0, -1.0]), b: 0.0 },
            ],
            p(&[0.5, 0.5]),
        )
        .unwrap();
        let f = p(&[1.0, 1.0]).normalized().unwrap();
        let pts = slice_sample(&square, &f, 0.1, 300, 4).unwrap();
        let sup = 2f64.sqrt();
        assert!(pts.iter().all(|q| q.dot(&f) >= sup - 0.1 - 1e-9));
        assert!(diameter(&pts) <= 0.2 + 1e-9);
    }

    #[test]
    fn translation_moves_points() {
        let v = p(&[0.5, -2.0]);
        let sets = [
            SetDescriptor::halfspace(p(&[1.0, 2.0]), 0.3).unwrap(),
            SetDescriptor::ball(p(&[0.0, 1.0]), 1.0).unwrap(),
            example_a(),
            SetDescriptor::span(2, &[p(&[1.0, 1.0])]).unwrap(),
            SetDescriptor::nonneg_orthant(2).unwrap(),
        ];
        let x = p(&[3.0, -1.0]);
        for s in &sets {
            let t = s.translated(&v).unwrap();
            let lhs = t.project(&(&x + &v)).unwrap();
            let rhs = &s.project(&x).unwrap() + &v;
            assert!(lhs.dist(&rhs) < 1e-12, "{}", s.kind_name());
        }
        let g = SetDescriptor::diagonal_graph(vec![0.5, -2.0], vec![0.1, 0.2]).unwrap();
        let v4 = p(&[0.3, -0.1, 1.0, 2.0]);
        let x4 = p(&[1.0, 2.0, 3.0, 4.0]);
        let lhs = g.translated(&v4).unwrap().project(&(&x4 + &v4)).unwrap();
        let rhs = &g.project(&x4).unwrap() + &v4;
        assert!(lhs.dist(&rhs) < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let cone = ConeSpec::new(&p(&[0.0, 1.0]), 0.25, 0.1, ConeKind::C).unwrap();
        let sets = vec![
            SetDescriptor::halfspace(p(&[0.1, 1.0 / 3.0]), 0.7).unwrap(),
            example_a(),
            SetDescriptor::diagonal_graph(vec![0.25, -1.0 / 7.0], vec![1e-17, 0.0]).unwrap(),
            SetDescriptor::shifted_cone(cone).unwrap(),
            SetDescriptor::span(3, &[p(&[1.0, 2.0, 3.0]), p(&[0.0, 1.0, -1.0])]).unwrap(),
        ];
        for s in sets {
            let text = serde_json::to_string(&s).unwrap();
            let back: SetDescriptor = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s, "{text}");
        }
    }

    #[test]
    fn json_decoding_validates() {
        let bad = r#"{"kind":"halfspace","a":[0.0,0.0],"b":1.0}"#;
        assert!(serde_json::from_str::<SetDescriptor>(bad).is_err());
        let unknown = r#"{"kind":"ball","center":[0.0],"radius":1.0,"extra":1}"#;
        assert!(serde_json::from_str::<SetDescriptor>(unknown).is_err());
        let poly = r#"{"kind":"polygon2d","vertices":[[1,1],[-1,1],[1,0],[-1,0]]}"#;
        let s: SetDescriptor = serde_json::from_str(poly).unwrap();
        assert_eq!(s, example_a());
    }
}
