//! Dense vectors, angles, the cones `C(f, α)` / `V(f, α)` and the ℓ₂ product space `X ⊕₂ X`.

use std::ops::{Add, Index, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking unit-norm and duality constraints on cone data.
const UNIT_TOL: f64 = 1e-12;

/// A point of the finite-dimensional Hilbert space `ℝ^d`. Coordinates are always finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Point(coords))
    }

    /// Builds a point from coordinates already known to be finite (results of arithmetic on
    /// finite inputs). Debug builds still check.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()), "non-finite coordinates");
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector of `ℝ^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> Point {
        Point::from_vec_unchecked(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + s·dir`.
    pub fn axpy(&self, s: f64, dir: &Point) -> Point {
        debug_assert_eq!(self.dim(), dir.dim());
        Point::from_vec_unchecked(self.0.iter().zip(&dir.0).map(|(a, d)| a + s * d).collect())
    }

    /// Unit vector in the direction of `self`.
    pub fn normalized(&self) -> Result<Point> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector("normalize"));
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// Standard Gaussian vector.
    pub fn gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Point {
        Point((0..dim).map(|_| rng.sample(StandardNormal)).collect())
    }

    /// Uniformly distributed unit vector.
    pub fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Point {
        loop {
            let g = Point::gaussian(dim, rng);
            let n = g.norm();
            if n > 1e-12 {
                return g.scaled(1.0 / n);
            }
        }
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Point {
    type Output = Point;

    fn add(self, rhs: &Point) -> Point {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Point {
    type Output = Point;

    fn sub(self, rhs: &Point) -> Point {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &Point {
    type Output = Point;

    fn mul(self, s: f64) -> Point {
        self.scaled(s)
    }
}

impl Neg for &Point {
    type Output = Point;

    fn neg(self) -> Point {
        self.scaled(-1.0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn same_dim(u: &Point, v: &Point) -> Result<()> {
    v.check_dim(u.dim())
}

/// Euclidean inner product `⟨u, v⟩`.
pub fn inner(u: &Point, v: &Point) -> Result<f64> {
    same_dim(u, v)?;
    Ok(u.dot(v))
}

/// `cos(u, v) = ⟨u, v⟩ / (‖u‖‖v‖)`, clamped to `[-1, 1]`.
pub fn cos_angle(u: &Point, v: &Point) -> Result<f64> {
    same_dim(u, v)?;
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector("cos_angle"));
    }
    Ok((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// An element `(first, second)` of `Z = X ⊕₂ X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub first: Point,
    pub second: Point,
}

impl ProductPoint {
    pub fn new(first: Point, second: Point) -> Result<Self> {
        same_dim(&first, &second)?;
        Ok(ProductPoint { first, second })
    }

    pub fn norm_sq(&self) -> f64 {
        self.first.norm_sq() + self.second.norm_sq()
    }
}

/// Concatenates the two factors into a point of `ℝ^{2d}`.
pub fn pack(p: &ProductPoint) -> Point {
    let mut v = Vec::with_capacity(2 * p.first.dim());
    v.extend_from_slice(p.first.coords());
    v.extend_from_slice(p.second.coords());
    Point::from_vec_unchecked(v)
}

/// Splits a point of `ℝ^{2d}` into its two factors.
pub fn unpack(q: &Point) -> Result<ProductPoint> {
    if !q.dim().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: q.dim() + 1,
            found: q.dim(),
        });
    }
    let (a, b) = q.coords().split_at(q.dim() / 2);
    Ok(ProductPoint {
        first: Point::from_vec_unchecked(a.to_vec()),
        second: Point::from_vec_unchecked(b.to_vec()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeKind {
    /// `C(f, α) = {x : f(x) ≥ α‖x‖}` (convex).
    C,
    /// `V(f, α) = {x : f(x) ≤ α‖x‖}` (closed, not convex).
    V,
}

/// A shifted cone. `C` cones are shifted as `C(f, α) − λ·x₀`, `V` cones as `V(f, α) + λ·x₀`.
///
/// The functional `f` is stored as its unit Riesz vector and `x₀` (`direction`) must satisfy
/// `f(x₀) = 1`; in a Hilbert space this forces `x₀ = riesz`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCone")]
pub struct ConeSpec {
    riesz: Point,
    alpha: f64,
    shift: f64,
    direction: Point,
    kind: ConeKind,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCone {
    riesz: Point,
    alpha: f64,
    #[serde(default)]
    shift: f64,
    #[serde(default)]
    direction: Option<Point>,
    kind: ConeKind,
}

impl TryFrom<RawCone> for ConeSpec {
    type Error = Error;

    fn try_from(raw: RawCone) -> Result<Self> {
        let direction = match raw.direction {
            Some(d) => d,
            None => raw.riesz.normalized()?,
        };
        ConeSpec::with_direction(raw.riesz, raw.alpha, raw.shift, direction, raw.kind)
    }
}

impl ConeSpec {
    /// Cone for the functional represented by `f` (normalized here) with `x₀ = f/‖f‖`.
    pub fn new(f: &Point, alpha: f64, shift: f64, kind: ConeKind) -> Result<Self> {
        let riesz = f.normalized()?;
        let direction = riesz.clone();
        ConeSpec::with_direction(riesz, alpha, shift, direction, kind)
    }

    pub fn with_direction(
        riesz: Point,
        alpha: f64,
        shift: f64,
        direction: Point,
        kind: ConeKind,
    ) -> Result<Self> {
        same_dim(&riesz, &direction)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidCone(format!("alpha {alpha} outside (0,1)")));
        }
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::InvalidCone(format!("shift {shift} must be finite and >= 0")));
        }
        if (riesz.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidCone("riesz vector must have unit norm".into()));
        }
        if (riesz.dot(&direction) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidCone("f(direction) must equal 1".into()));
        }
        Ok(ConeSpec {
            riesz,
            alpha,
            shift,
            direction,
            kind,
        })
    }

    pub fn riesz(&self) -> &Point {
        &self.riesz
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn direction(&self) -> &Point {
        &self.direction
    }

    pub fn kind(&self) -> ConeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.riesz.dim()
    }

    /// Same cone with a different shift.
    pub fn with_shift(&self, shift: f64) -> Result<Self> {
        ConeSpec::with_direction(
            self.riesz.clone(),
            self.alpha,
            shift,
            self.direction.clone(),
            self.kind,
        )
    }

    /// Draws a point of the cone. `boundary` places it on the cone's boundary surface; otherwise
    /// the point is spread through the cone. Only `C` cones are supported (V cones are sampled by
    /// rejection by callers).
    pub fn sample_c<R: Rng + ?Sized>(&self, scale: f64, boundary: bool, rng: &mut R) -> Point {
        debug_assert_eq!(self.kind, ConeKind::C);
        let d = self.dim();
        let f = &self.riesz;
        // f(y) = s and ‖y‖ = s·√(1+r²); membership needs r ≤ √(1/α² − 1).
        let r_max = (1.0 / (self.alpha * self.alpha) - 1.0).sqrt();
        let r = if boundary {
            r_max
        } else {
            r_max * rng.random::<f64>()
        };
        let s = scale * rng.random::<f64>();
        let perp = if d > 1 {
            loop {
                let g = Point::gaussian(d, rng);
                let g = g.axpy(-g.dot(f), f);
                let n = g.norm();
                if n > 1e-12 {
                    break g.scaled(1.0 / n);
                }
            }
        } else {
            Point::zeros(d)
        };
        let y = f.axpy(r, &perp).scaled(s);
        // The cone is C(f, α) − λx₀.
        y.axpy(-self.shift, &self.direction)
    }
}

/// Membership in a shifted cone, with a tolerance on the defining inequality.
pub fn cone_contains(spec: &ConeSpec, x: &Point, tol: f64) -> Result<bool> {
    same_dim(spec.riesz(), x)?;
    Ok(match spec.kind {
        ConeKind::C => {
            let y = x.axpy(spec.shift, &spec.direction);
            spec.riesz.dot(&y) >= spec.alpha * y.norm() - tol
        }
        ConeKind::V => {
            let y = x.axpy(-spec.shift, &spec.direction);
            spec.riesz.dot(&y) <= spec.alpha * y.norm() + tol
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn inner_products() {
        assert_eq!(inner(&p(&[1.0, 0.0]), &p(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(inner(&p(&[1.0, 2.0]), &p(&[3.0, 4.0])).unwrap(), 11.0);
        assert!(matches!(
            inner(&p(&[1.0]), &p(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Point::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn cosine_cases() {
        let c = cos_angle(&p(&[1.0, 0.0]), &p(&[1.0, 1.0])).unwrap();
        assert!((c - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let u = p(&[0.3, -1.7, 2.2]);
        assert_eq!(cos_angle(&u, &u).unwrap(), 1.0);
        assert_eq!(cos_angle(&p(&[1.0, 0.0]), &p(&[-1.0, 0.0])).unwrap(), -1.0);
        assert!(matches!(
            cos_angle(&p(&[0.0, 0.0]), &p(&[1.0, 0.0])),
            Err(Error::ZeroVector(_))
        ));
    }

    #[test]
    fn cone_membership_examples() {
        let e2 = p(&[0.0, 1.0]);
        let c = ConeSpec::new(&e2, 0.5, 0.0, ConeKind::C).unwrap();
        let v = ConeSpec::new(&e2, 0.5, 0.0, ConeKind::V).unwrap();
        assert!(cone_contains(&c, &p(&[0.0, 1.0]), 0.0).unwrap());
        assert!(!cone_contains(&c, &p(&[1.0, 0.0]), 0.0).unwrap());
        assert!(cone_contains(&v, &p(&[1.0, 0.0]), 0.0).unwrap());
        // 0 belongs to both unshifted cones.
        assert!(cone_contains(&c, &Point::zeros(2), 0.0).unwrap());
        assert!(cone_contains(&v, &Point::zeros(2), 0.0).unwrap());
    }

    #[test]
    fn cone_shift_conventions() {
        let e2 = p(&[0.0, 1.0]);
        // C(f, α) − λx₀ contains −λx₀ (its apex) but not a bit further down.
        let c = ConeSpec::new(&e2, 0.5, 0.3, ConeKind::C).unwrap();
        assert!(cone_contains(&c, &p(&[0.0, -0.3]), 1e-12).unwrap());
        assert!(!cone_contains(&c, &p(&[0.0, -0.31]), 0.0).unwrap());
        // V(f, α) + εx₀ contains εx₀ and everything below it.
        let v = ConeSpec::new(&e2, 0.5, 0.3, ConeKind::V).unwrap();
        assert!(cone_contains(&v, &p(&[0.0, 0.3]), 1e-12).unwrap());
        assert!(cone_contains(&v, &p(&[0.0, -5.0]), 0.0).unwrap());
        assert!(!cone_contains(&v, &p(&[0.0, 0.5]), 0.0).unwrap());
    }

    #[test]
    fn cone_validation() {
        let e2 = p(&[0.0, 1.0]);
        assert!(ConeSpec::new(&e2, 1.0, 0.0, ConeKind::C).is_err());
        assert!(ConeSpec::new(&e2, 0.0, 0.0, ConeKind::C).is_err());
        assert!(ConeSpec::new(&e2, 0.5, -1.0, ConeKind::C).is_err());
        assert!(ConeSpec::new(&Point::zeros(2), 0.5, 0.0, ConeKind::C).is_err());
        assert!(ConeSpec::with_direction(e2.clone(), 0.5, 0.0, p(&[1.0, 0.0]), ConeKind::C).is_err());
        // f is normalized at construction.
        let c = ConeSpec::new(&p(&[0.0, 3.0]), 0.5, 0.0, ConeKind::C).unwrap();
        assert_eq!(c.riesz(), &e2);
    }

    #[test]
    fn cone_samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = p(&[1.0, 2.0, -0.5]);
        for shift in [0.0, 0.4] {
            let c = ConeSpec::new(&f, 0.6, shift, ConeKind::C).unwrap();
            for i in 0..500 {
                let x = c.sample_c(3.0, i % 2 == 0, &mut rng);
                assert!(cone_contains(&c, &x, 1e-12).unwrap());
            }
        }
    }

    #[test]
    fn pack_examples() {
        let pp = ProductPoint::new(p(&[1.0, 2.0]), p(&[3.0, 4.0])).unwrap();
        assert_eq!(pack(&pp), p(&[1.0, 2.0, 3.0, 4.0]));
        let pp = ProductPoint::new(p(&[3.0, 0.0]), p(&[4.0, 0.0])).unwrap();
        assert_eq!(pack(&pp).norm(), 5.0);
        assert!(unpack(&p(&[1.0, 2.0, 3.0])).is_err());
    }

    fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1e3..1e3f64, d)
    }

    proptest! {
        #[test]
        fn pack_round_trip(a in vec_strategy(4), b in vec_strategy(4)) {
            let pp = ProductPoint::new(p(&a), p(&b)).unwrap();
            let q = pack(&pp);
            prop_assert!((q.norm_sq() - pp.norm_sq()).abs() <= 1e-9 * (1.0 + pp.norm_sq()));
            prop_assert_eq!(unpack(&q).unwrap(), pp);
        }

        #[test]
        fn cauchy_schwarz(a in vec_strategy(5), b in vec_strategy(5)) {
            let (u, v) = (p(&a), p(&b));
            prop_assert!(inner(&u, &v).unwrap().abs() <= u.norm() * v.norm() * (1.0 + 1e-15) + 1e-12);
        }

        #[test]
        fn self_inner_is_norm_sq(a in vec_strategy(6)) {
            let u = p(&a);
            prop_assert_eq!(inner(&u, &u).unwrap(), u.norm_sq());
        }
    }
}
