//! Localized excesses `e_N(A, C) = sup{dist(a, C) : a ∈ A, ‖a‖ ≤ N}` and
//! `h_N = max(e_N(A, C), e_N(C, A))`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::{sampling, SetDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AwMode {
    Exact,
    /// Supremum over finitely many sampled points: a lower bound of the true value.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AwEstimate {
    #[serde(rename = "N")]
    pub n: f64,
    pub e_a_to_c: f64,
    pub e_c_to_a: f64,
    pub h_n: f64,
    pub n_samples: usize,
    pub mode: AwMode,
    pub seed: Option<u64>,
}

impl AwEstimate {
    fn new(n: f64, e_a_to_c: f64, e_c_to_a: f64, n_samples: usize, mode: AwMode, seed: Option<u64>) -> Self {
        AwEstimate {
            n,
            e_a_to_c,
            e_c_to_a,
            h_n: e_a_to_c.max(e_c_to_a),
            n_samples,
            mode,
            seed,
        }
    }
}

/// `h_N(A, C)`: exact where a closed form is known, sampled otherwise.
pub fn aw_distance(
    a: &SetDescriptor,
    c: &SetDescriptor,
    n: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<AwEstimate> {
    check_radius(n)?;
    if a.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: c.dim(),
        });
    }
    if let (Some(ac), Some(ca)) = (exact_excess(a, c, n)?, exact_excess(c, a, n)?) {
        return Ok(AwEstimate::new(n, ac, ca, 0, AwMode::Exact, None));
    }
    aw_distance_sampled(a, c, n, n_samples, rng_seed)
}

/// Sampled `h_N(A, C)`, regardless of whether a closed form exists.
pub fn aw_distance_sampled(
    a: &SetDescriptor,
    c: &SetDescriptor,
    n: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<AwEstimate> {
    check_radius(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let ac = sampled_excess(a, c, n, n_samples, &mut rng)?;
    let ca = sampled_excess(c, a, n, n_samples, &mut rng)?;
    Ok(AwEstimate::new(n, ac, ca, n_samples, AwMode::Sampled, Some(rng_seed)))
}

fn check_radius(n: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Precondition(format!("radius N = {n} must be positive")));
    }
    Ok(())
}

fn sampled_excess<R: rand::Rng + ?Sized>(
    from: &SetDescriptor,
    to: &SetDescriptor,
    n: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let pts = match sampling::sample_in_ball(from, n, n_samples.max(1), rng) {
        Ok(p) => p,
        // `A ∩ N·B` empty: the excess is a supremum over the empty set.
        Err(Error::SamplingFailed(_)) if meets_ball(from, n) == Some(false) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let mut worst = 0.0f64;
    for p in &pts {
        worst = worst.max(to.distance(p)?);
    }
    Ok(worst)
}

fn meets_ball(s: &SetDescriptor, n: f64) -> Option<bool> {
    s.distance(&Point::zeros(s.dim())).ok().map(|d| d <= n)
}

/// Extreme points of `S ∩ N·B` when that set is a polytope we can list.
fn polytope_in_ball(s: &SetDescriptor, n: f64) -> Option<Vec<Point>> {
    match s {
        SetDescriptor::Polygon2D(poly) if poly.vertices().iter().all(|v| v.norm() <= n) => {
            Some(poly.vertices().to_vec())
        }
        _ => {
            let (anchor, basis) = s.affine_parts()?;
            match basis.len() {
                0 => Some(if anchor.norm() <= n { vec![anchor] } else { vec![] }),
                1 => {
                    // `anchor` is the point closest to the origin, so the chord is symmetric.
                    let r2 = n * n - anchor.norm_sq();
                    if r2 < 0.0 {
                        return Some(vec![]);
                    }
                    let r = r2.sqrt();
                    Some(vec![anchor.axpy(r, &basis[0]), anchor.axpy(-r, &basis[0])])
                }
                _ => None,
            }
        }
    }
}

/// `e_N(A, C)` in closed form, or `None`.
fn exact_excess(a: &SetDescriptor, c: &SetDescriptor, n: f64) -> Result<Option<f64>> {
    if a == c {
        return Ok(Some(0.0));
    }
    if matches!(c, SetDescriptor::ShiftedConvexCone(_)) {
        return Ok(None);
    }
    // dist(·, C) is convex, so its maximum over a polytope sits at a vertex.
    if let Some(vertices) = polytope_in_ball(a, n) {
        let mut worst = 0.0f64;
        for v in &vertices {
            worst = worst.max(c.distance(v)?);
        }
        return Ok(Some(worst));
    }
    match (a, c) {
        (SetDescriptor::Halfspace(ha), SetDescriptor::Halfspace(hc)) => {
            let (ua, uc) = (ha.a().scaled(1.0 / ha.a().norm()), hc.a().scaled(1.0 / hc.a().norm()));
            if ua.dist(&uc) > 1e-12 {
                return Ok(None);
            }
            let (ca, cc) = (ha.b() / ha.a().norm(), hc.b() / hc.a().norm());
            if ca < -n {
                return Ok(Some(0.0));
            }
            Ok(Some((ca.min(n) - cc).max(0.0)))
        }
        (SetDescriptor::Hyperplane(ha), SetDescriptor::Hyperplane(hc)) => {
            let (ua, uc) = (ha.a().scaled(1.0 / ha.a().norm()), hc.a().scaled(1.0 / hc.a().norm()));
            let (ca, cc) = (ha.b() / ha.a().norm(), hc.b() / hc.a().norm());
            let gap = if ua.dist(&uc) <= 1e-12 {
                (ca - cc).abs()
            } else if ua.dist(&uc.scaled(-1.0)) <= 1e-12 {
                (ca + cc).abs()
            } else {
                return Ok(None);
            };
            Ok(Some(if ca.abs() <= n { gap } else { 0.0 }))
        }
        (SetDescriptor::OrthoSubspace(u), SetDescriptor::OrthoSubspace(v)) => {
            Ok(Some(n * residual_operator_norm(u.basis(), v.basis(), u.dim())))
        }
        _ => Ok(None),
    }
}

/// `‖(I − P_V) Q_U‖₂` for orthonormal bases `Q_U`, `Q_V`.
fn residual_operator_norm(u: &[Point], v: &[Point], dim: usize) -> f64 {
    if u.is_empty() {
        return 0.0;
    }
    let m = DMatrix::from_fn(dim, u.len(), |r, col| {
        let q = &u[col];
        let proj: f64 = v.iter().map(|w| w.dot(q) * w[r]).sum();
        q[r] - proj
    });
    m.singular_values().iter().fold(0.0f64, |acc, s| acc.max(*s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn parallel_halfspaces() {
        let a = SetDescriptor::halfspace(p(&[0.0, 1.0]), 0.0).unwrap();
        let c = SetDescriptor::halfspace(p(&[0.0, 1.0]), 0.1).unwrap();
        for n in [1.0, 2.0, 8.0] {
            let est = aw_distance(&a, &c, n, 0, 0).unwrap();
            assert_eq!(est.mode, AwMode::Exact);
            assert!((est.h_n - 0.1).abs() < 1e-15);
            assert_eq!(est.e_a_to_c, 0.0);
        }
    }

    #[test]
    fn identical_sets() {
        let b = SetDescriptor::ball(p(&[0.0, 1.0]), 1.0).unwrap();
        assert_eq!(aw_distance(&b, &b, 3.0, 10, 1).unwrap().h_n, 0.0);
    }

    #[test]
    fn lines_by_chord_endpoints() {
        let axis = SetDescriptor::span(2, &[p(&[1.0, 0.0])]).unwrap();
        let tilted = SetDescriptor::span(2, &[p(&[1.0, 0.1])]).unwrap();
        let n = 4.0;
        let exact = aw_distance(&axis, &tilted, n, 0, 0).unwrap();
        let sin = 0.1 / (1.0f64 + 0.01).sqrt();
        assert!((exact.h_n - n * sin).abs() < 1e-12);
        let sampled = aw_distance_sampled(&axis, &tilted, n, 400, 3).unwrap();
        assert!(sampled.h_n <= exact.h_n + 1e-9);
        assert!(sampled.h_n > 0.99 * exact.h_n);
    }

    #[test]
    fn subspace_operator_norm_matches_lines() {
        let u = SetDescriptor::span(3, &[p(&[1.0, 0.0, 0.0]), p(&[0.0, 1.0, 0.0])]).unwrap();
        let v = SetDescriptor::span(3, &[p(&[1.0, 0.0, 0.0]), p(&[0.0, 0.6, 0.8])]).unwrap();
        let est = aw_distance(&u, &v, 2.0, 0, 0).unwrap();
        assert!((est.h_n - 2.0 * 0.8).abs() < 1e-12);
    }

    #[test]
    fn halfspace_far_from_ball_has_zero_excess() {
        let a = SetDescriptor::halfspace(p(&[0.0, -1.0]), -5.0).unwrap();
        let c = SetDescriptor::halfspace(p(&[0.0, -1.0]), -6.0).unwrap();
        let est = aw_distance(&a, &c, 2.0, 0, 0).unwrap();
        assert_eq!(est.e_a_to_c, 0.0);
    }
}
