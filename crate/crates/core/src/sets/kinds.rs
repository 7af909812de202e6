//! Closed-form set kinds.

use serde::{Deserialize, Serialize};

use super::{check_orthonormal, orthonormalize};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Relative tolerance for deciding that a functional is parallel to a normal.
const PARALLEL_TOL: f64 = 1e-12;

/// `f = t·a` for some `t`; returns `t`.
fn parallel_factor(f: &Point, a: &Point) -> Option<f64> {
    let t = f.dot(a) / a.norm_sq();
    let resid = f.axpy(-t, a).norm();
    (resid <= PARALLEL_TOL * f.norm()).then_some(t)
}

fn project_flat(anchor: &Point, basis: &[Point], x: &Point) -> Point {
    let mut out = anchor.coords().to_vec();
    for u in basis {
        let c: f64 = x
            .coords()
            .iter()
            .zip(anchor.coords())
            .zip(u.coords())
            .map(|((xi, ai), ui)| (xi - ai) * ui)
            .sum();
        for (o, ui) in out.iter_mut().zip(u.coords()) {
            *o += c * ui;
        }
    }
    Point::from_vec_unchecked(out)
}

/// `{x : ⟨a, x⟩ ≤ b}` with `a ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct Halfspace {
    a: Point,
    b: f64,
}

/// `{x : ⟨a, x⟩ = b}` with `a ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct Hyperplane {
    a: Point,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinear {
    a: Point,
    b: f64,
}

impl TryFrom<RawLinear> for Halfspace {
    type Error = Error;

    fn try_from(raw: RawLinear) -> Result<Self> {
        Halfspace::new(raw.a, raw.b)
    }
}

impl TryFrom<RawLinear> for Hyperplane {
    type Error = Error;

    fn try_from(raw: RawLinear) -> Result<Self> {
        Hyperplane::new(raw.a, raw.b)
    }
}

fn check_linear(a: &Point, b: f64) -> Result<()> {
    if a.dim() == 0 {
        return Err(Error::InvalidSet("empty normal vector".into()));
    }
    if a.norm() == 0.0 {
        return Err(Error::ZeroVector("normal vector"));
    }
    if !b.is_finite() {
        return Err(Error::InvalidSet("offset must be finite".into()));
    }
    Ok(())
}

impl Halfspace {
    pub fn new(a: Point, b: f64) -> Result<Self> {
        check_linear(&a, b)?;
        Ok(Halfspace { a, b })
    }

    pub fn a(&self) -> &Point {
        &self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn project(&self, x: &Point) -> Point {
        let excess = self.a.dot(x) - self.b;
        if excess <= 0.0 {
            x.clone()
        } else {
            x.axpy(-excess / self.a.norm_sq(), &self.a)
        }
    }

    pub(crate) fn support_value(&self, f: &Point) -> Result<f64> {
        match parallel_factor(f, &self.a) {
            Some(t) if t > 0.0 => Ok(t * self.b),
            _ => Err(Error::Unbounded),
        }
    }
}

impl Hyperplane {
    pub fn new(a: Point, b: f64) -> Result<Self> {
        check_linear(&a, b)?;
        Ok(Hyperplane { a, b })
    }

    pub fn a(&self) -> &Point {
        &self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn project(&self, x: &Point) -> Point {
        let excess = self.a.dot(x) - self.b;
        x.axpy(-excess / self.a.norm_sq(), &self.a)
    }

    pub(crate) fn support_value(&self, f: &Point) -> Result<f64> {
        parallel_factor(f, &self.a)
            .map(|t| t * self.b)
            .ok_or(Error::Unbounded)
    }
}

/// Closed ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall")]
pub struct Ball {
    center: Point,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBall {
    center: Point,
    radius: f64,
}

impl TryFrom<RawBall> for Ball {
    type Error = Error;

    fn try_from(raw: RawBall) -> Result<Self> {
        Ball::new(raw.center, raw.radius)
    }
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if center.dim() == 0 {
            return Err(Error::InvalidSet("ball in dimension 0".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSet(format!("ball radius {radius} must be positive")));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn project(&self, x: &Point) -> Point {
        let rel = x - &self.center;
        let n = rel.norm();
        if n <= self.radius {
            x.clone()
        } else {
            self.center.axpy(self.radius / n, &rel)
        }
    }
}

/// Linear subspace with an orthonormal basis (possibly empty, giving `{0}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrthoSubspace")]
pub struct OrthoSubspace {
    dim: usize,
    basis: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrthoSubspace {
    dim: usize,
    basis: Vec<Point>,
}

impl TryFrom<RawOrthoSubspace> for OrthoSubspace {
    type Error = Error;

    fn try_from(raw: RawOrthoSubspace) -> Result<Self> {
        OrthoSubspace::new(raw.dim, raw.basis)
    }
}

impl OrthoSubspace {
    pub fn new(dim: usize, basis: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet("subspace of a 0-dimensional space".into()));
        }
        check_orthonormal(&basis, dim)?;
        Ok(OrthoSubspace { dim, basis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    pub fn project(&self, x: &Point) -> Point {
        project_flat(&Point::zeros(self.dim), &self.basis, x)
    }

    pub(crate) fn support_value(&self, f: &Point) -> Result<f64> {
        if self.project(f).norm() <= PARALLEL_TOL * f.norm() {
            Ok(0.0)
        } else {
            Err(Error::Unbounded)
        }
    }
}

/// `anchor + span(basis)` with an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAffine")]
pub struct AffineSubspace {
    anchor: Point,
    basis: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAffine {
    anchor: Point,
    basis: Vec<Point>,
}

impl TryFrom<RawAffine> for AffineSubspace {
    type Error = Error;

    fn try_from(raw: RawAffine) -> Result<Self> {
        AffineSubspace::new(raw.anchor, raw.basis)
    }
}

impl AffineSubspace {
    pub fn new(anchor: Point, basis: Vec<Point>) -> Result<Self> {
        if anchor.dim() == 0 {
            return Err(Error::InvalidSet("affine subspace in dimension 0".into()));
        }
        check_orthonormal(&basis, anchor.dim())?;
        Ok(AffineSubspace { anchor, basis })
    }

    /// `anchor + span(vectors)` for arbitrary independent vectors.
    pub fn spanned(anchor: Point, vectors: &[Point]) -> Result<Self> {
        AffineSubspace::new(anchor, orthonormalize(vectors)?)
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    pub fn project(&self, x: &Point) -> Point {
        project_flat(&self.anchor, &self.basis, x)
    }

    pub(crate) fn support_value(&self, f: &Point) -> Result<f64> {
        let along = project_flat(&Point::zeros(f.dim()), &self.basis, f);
        if along.norm() <= PARALLEL_TOL * f.norm() {
            Ok(f.dot(&self.anchor))
        } else {
            Err(Error::Unbounded)
        }
    }
}

/// `{x : x_i ≥ 0 ∀i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrthant")]
pub struct NonnegOrthant {
    dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrthant {
    dim: usize,
}

impl TryFrom<RawOrthant> for NonnegOrthant {
    type Error = Error;

    fn try_from(raw: RawOrthant) -> Result<Self> {
        NonnegOrthant::new(raw.dim)
    }
}

impl NonnegOrthant {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet("orthant in dimension 0".into()));
        }
        Ok(NonnegOrthant { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn project(&self, x: &Point) -> Point {
        Point::from_vec_unchecked(x.coords().iter().map(|c| c.max(0.0)).collect())
    }
}

/// `{(x, offset + Dx)} ⊂ ℝ^{2d}` with `D = diag(theta)`, on packed product points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct DiagonalAffineGraph {
    theta: Vec<f64>,
    offset: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    theta: Vec<f64>,
    offset: Vec<f64>,
}

impl TryFrom<RawGraph> for DiagonalAffineGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        DiagonalAffineGraph::new(raw.theta, raw.offset)
    }
}

impl DiagonalAffineGraph {
    pub fn new(theta: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidSet("graph over a 0-dimensional space".into()));
        }
        if theta.len() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.len(),
                found: offset.len(),
            });
        }
        if let Some(index) = theta.iter().chain(&offset).position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(DiagonalAffineGraph { theta, offset })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// `sup_n |θ_n|`, the operator norm of `D`.
    pub fn operator_norm(&self) -> f64 {
        self.theta.iter().fold(0.0, |m, t| m.max(t.abs()))
    }

    /// First-factor coordinate of the projection of `(α, β)` in coordinate `n`.
    #[inline]
    pub fn project_coord(&self, n: usize, alpha: f64, beta: f64) -> f64 {
        let t = self.theta[n];
        (alpha + t * (beta - self.offset[n])) / (1.0 + t * t)
    }

    pub fn project(&self, x: &Point) -> Point {
        let d = self.theta.len();
        let c = x.coords();
        let mut out = vec![0.0; 2 * d];
        for n in 0..d {
            let xn = self.project_coord(n, c[n], c[d + n]);
            out[n] = xn;
            out[d + n] = self.offset[n] + self.theta[n] * xn;
        }
        Point::from_vec_unchecked(out)
    }

    /// Bounded only for functionals `(g, h)` with `g + Dh = 0`.
    pub(crate) fn support_value(&self, f: &Point) -> Result<f64> {
        let d = self.theta.len();
        let c = f.coords();
        let scale = f.norm();
        let mut value = 0.0;
        for n in 0..d {
            if (c[n] + self.theta[n] * c[d + n]).abs() > PARALLEL_TOL * scale {
                return Err(Error::Unbounded);
            }
            value += c[d + n] * self.offset[n];
        }
        Ok(value)
    }

    /// `graph + (v₁, v₂)` is the graph with offset `offset + v₂ − D v₁`.
    pub fn translated(&self, v: &Point) -> Result<Self> {
        let d = self.theta.len();
        v.check_dim(2 * d)?;
        let c = v.coords();
        let offset = (0..d)
            .map(|n| self.offset[n] + c[d + n] - self.theta[n] * c[n])
            .collect();
        DiagonalAffineGraph::new(self.theta.clone(), offset)
    }
}
