//! Cone-shift function `ε(α) = inf{λ ≥ 0 : A ⊂ C(f, α) − λx₀}` and slice diameters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConeKind, ConeSpec, Point};
use crate::sets::{diameter, sampling, slice_sample, SetDescriptor};

/// Radius of the window sampled by [`epsilon_alpha`] on unbounded sets.
pub const DEFAULT_EPS_RADIUS: f64 = 10.0;

/// Absolute bisection tolerance on each `λ_a`.
const LAMBDA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExposureProbe {
    pub alphas: Vec<f64>,
    pub eps_of_alpha: Vec<f64>,
    pub slice_diams: Vec<f64>,
    pub ratios: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub mode: super::AwMode,
}

/// Smallest `λ ≥ 0` with `f(a) + λ ≥ α‖a + λx₀‖`. The left minus right side is strictly
/// increasing in `λ` (slope at least `1 − α`), so bisection applies.
pub fn lambda_for_point(a: &Point, f: &Point, x0: &Point, alpha: f64) -> f64 {
    let g = |lam: f64| f.dot(a) + lam - alpha * a.axpy(lam, x0).norm();
    if g(0.0) >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0f64.max(a.norm());
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    while hi - lo > LAMBDA_TOL {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn check_cone_data(f: &Point, x0: &Point, alpha: f64) -> Result<()> {
    // Validates ‖f‖ = 1, f(x₀) = 1 and α ∈ (0, 1).
    ConeSpec::with_direction(f.clone(), alpha, 0.0, x0.clone(), ConeKind::C).map(|_| ())
}

/// Sampled lower estimate of `ε(α)` over `A ∩ DEFAULT_EPS_RADIUS·B`.
///
/// The caller passes `A` already oriented so that `0 ∈ A` and `f(0) = inf f(A)`.
pub fn epsilon_alpha(
    set: &SetDescriptor,
    f: &Point,
    x0: &Point,
    alpha: f64,
    n_boundary: usize,
    rng_seed: u64,
) -> Result<f64> {
    epsilon_alpha_within(set, f, x0, alpha, n_boundary, rng_seed, DEFAULT_EPS_RADIUS)
}

/// [`epsilon_alpha`] restricted to the ball of the given radius.
pub fn epsilon_alpha_within(
    set: &SetDescriptor,
    f: &Point,
    x0: &Point,
    alpha: f64,
    n_boundary: usize,
    rng_seed: u64,
    radius: f64,
) -> Result<f64> {
    let pts = eps_sample_points(set, n_boundary, rng_seed, radius)?;
    epsilon_over_points(&pts, f, x0, alpha)
}

fn eps_sample_points(set: &SetDescriptor, n: usize, seed: u64, radius: f64) -> Result<Vec<Point>> {
    let d = set.dim();
    if !set.membership(&Point::zeros(d), 1e-9)? {
        return Err(Error::Precondition("the set must contain the origin".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sampling::sample_in_ball(set, radius, n.max(1), &mut rng)
}

/// `sup_a λ_a` over an explicit point list.
pub fn epsilon_over_points(pts: &[Point], f: &Point, x0: &Point, alpha: f64) -> Result<f64> {
    check_cone_data(f, x0, alpha)?;
    let mut worst = 0.0f64;
    for a in pts {
        let lam = lambda_for_point(a, f, x0, alpha);
        if !lam.is_finite() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(lam);
    }
    Ok(worst)
}

/// Slice diameters of `A` along `f` and the cone-shift ratios `ε(α)/α` of the translated set
/// `A − a` with functional `−f`, where `a` is the point exposed by `f`.
pub fn strongly_exposes_probe(
    set: &SetDescriptor,
    f: &Point,
    alphas: &[f64],
    n_samples: usize,
    rng_seed: u64,
) -> Result<ExposureProbe> {
    if alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::Precondition("alphas must lie in (0, 1)".into()));
    }
    let unit = f.normalized()?;
    let top = set.support_point(&unit)?;
    let shifted = set.translated(&top.scaled(-1.0))?;
    let g = unit.scaled(-1.0);
    // One sample set for every α keeps the estimates monotone in α.
    let pts = eps_sample_points(&shifted, n_samples, rng_seed, DEFAULT_EPS_RADIUS)?;
    let mut probe = ExposureProbe {
        alphas: alphas.to_vec(),
        eps_of_alpha: Vec::with_capacity(alphas.len()),
        slice_diams: Vec::with_capacity(alphas.len()),
        ratios: Vec::with_capacity(alphas.len()),
        n_samples,
        seed: rng_seed,
        mode: super::AwMode::Sampled,
    };
    for (i, &alpha) in alphas.iter().enumerate() {
        let eps = epsilon_over_points(&pts, &g, &g, alpha)?;
        let slice = slice_sample(set, &unit, alpha, n_samples, rng_seed.wrapping_add(i as u64 + 1))?;
        probe.eps_of_alpha.push(eps);
        probe.ratios.push(eps / alpha);
        probe.slice_diams.push(diameter(&slice));
    }
    Ok(probe)
}
