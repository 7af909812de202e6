//! Monte Carlo checks of two elementary inequalities used by the stability arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{cone_contains, cos_angle, ConeKind, ConeSpec, Point};
use crate::sets::SetDescriptor;

/// Ambient dimension used by [`check_cos_separation`].
pub const COS_SEPARATION_DIM: usize = 5;

/// Points on the `eps`-sphere used to confirm `eps·B ⊆ C`.
const INNER_BALL_SAMPLES: usize = 512;

fn inner_ball_contained(c: &SetDescriptor, eps: f64, rng: &mut ChaCha8Rng) -> Result<bool> {
    if let SetDescriptor::Polygon2D(poly) = c {
        return Ok(poly.edge_offsets_from_origin().iter().all(|o| *o >= eps));
    }
    let d = c.dim();
    for _ in 0..INNER_BALL_SAMPLES {
        if !c.membership(&Point::random_unit(d, rng).scaled(eps), 1e-12)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `max_x ‖x − P_C x‖ − (K/ε)(‖x‖ − ‖P_C x‖)` over random `x ∈ K·B`, for a set `C ⊇ ε·B`.
pub fn check_fact_norms(
    c: &SetDescriptor,
    eps: f64,
    k: f64,
    n_trials: usize,
    rng_seed: u64,
) -> Result<f64> {
    if !(eps > 0.0 && k > 0.0) || n_trials == 0 {
        return Err(Error::Precondition("need eps > 0, K > 0 and at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    if !inner_ball_contained(c, eps, &mut rng)? {
        return Err(Error::Precondition(format!("the ball of radius {eps} is not inside C")));
    }
    let d = c.dim();
    let mu = k / eps;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n_trials {
        let r = if i % 2 == 0 {
            k * rng.random::<f64>().powf(1.0 / d as f64)
        } else {
            eps + (k - eps) * rng.random::<f64>()
        };
        let x = Point::random_unit(d, &mut rng).scaled(r);
        let y = c.project(&x)?;
        worst = worst.max(x.dist(&y) - mu * (x.norm() - y.norm()));
    }
    Ok(worst)
}

/// `max cos(x, y) − cos(θ₂ − θ₁)` over random nonzero `x ∈ C(θ₂)`, `y ∈ V(θ₁)` in
/// [`COS_SEPARATION_DIM`] dimensions, where `C(θ) = C(f, sin θ)` and `V(θ) = V(f, sin θ)`.
pub fn check_cos_separation(theta1: f64, theta2: f64, n_trials: usize, rng_seed: u64) -> Result<f64> {
    check_cos_separation_in(COS_SEPARATION_DIM, theta1, theta2, n_trials, rng_seed)
}

pub fn check_cos_separation_in(
    dim: usize,
    theta1: f64,
    theta2: f64,
    n_trials: usize,
    rng_seed: u64,
) -> Result<f64> {
    use std::f64::consts::FRAC_PI_2;
    if !(0.0 < theta1 && theta1 < theta2 && theta2 < FRAC_PI_2) {
        return Err(Error::Precondition("need 0 < theta1 < theta2 < pi/2".into()));
    }
    if dim < 2 || n_trials == 0 {
        return Err(Error::Precondition("need dim >= 2 and at least one trial".into()));
    }
    let x0 = Point::basis(dim, 0);
    let c_cone = ConeSpec::new(&x0, theta2.sin(), 0.0, ConeKind::C)?;
    let v_cone = ConeSpec::new(&x0, theta1.sin(), 0.0, ConeKind::V)?;
    let bound = (theta2 - theta1).cos();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n_trials {
        let x = loop {
            let x = c_cone.sample_c(1.0, i % 2 == 0, &mut rng);
            if x.norm() > 1e-9 {
                break x;
            }
        };
        let y = sample_v(&x0, theta1.sin(), i % 3 == 0, &mut rng);
        debug_assert!(cone_contains(&c_cone, &x, 1e-12)?);
        debug_assert!(cone_contains(&v_cone, &y, 1e-12)?);
        worst = worst.max(cos_angle(&x, &y)? - bound);
    }
    Ok(worst)
}

/// Nonzero point of `V(f, s)` with `f = x₀`: `cos(y, x₀)` uniform in `[−1, s]`, or equal to `s`.
fn sample_v<R: Rng + ?Sized>(x0: &Point, s: f64, boundary: bool, rng: &mut R) -> Point {
    let d = x0.dim();
    let c = if boundary { s } else { -1.0 + (s + 1.0) * rng.random::<f64>() };
    let w = loop {
        let g = Point::gaussian(d, rng);
        let g = g.axpy(-g.dot(x0), x0);
        let n = g.norm();
        if n > 1e-12 {
            break g.scaled(1.0 / n);
        }
    };
    let scale = 0.01 + rng.random::<f64>();
    x0.scaled(c).axpy((1.0 - c * c).max(0.0).sqrt(), &w).scaled(scale)
}
