//! Boundary-biased sampling of points in convex sets.
//!
//! Most samples are projections of Gaussian points drawn around the set at log-uniform scales,
//! which puts them on the boundary; a fraction are convex combinations of earlier samples, which
//! fills the interior.

use rand::Rng;

use super::{Ball, SetDescriptor};
use crate::error::{Error, Result};
use crate::geometry::{ConeKind, Point};

/// Smallest Gaussian scale relative to the requested one.
const MIN_SCALE_FRACTION: f64 = 1e-3;

/// Fraction of samples drawn as interior convex combinations.
const INTERIOR_FRACTION: f64 = 0.2;

fn log_uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

/// Random convex combinations of `verts`, with weights from exponential spacings.
pub fn convex_combinations<R: Rng + ?Sized>(verts: &[Point], n: usize, rng: &mut R) -> Vec<Point> {
    if verts.is_empty() {
        return Vec::new();
    }
    let d = verts[0].dim();
    (0..n)
        .map(|_| {
            let w: Vec<f64> = verts
                .iter()
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect();
            let total: f64 = w.iter().sum();
            verts
                .iter()
                .zip(&w)
                .fold(Point::zeros(d), |acc, (v, wi)| acc.axpy(wi / total, v))
        })
        .collect()
}

/// Points of `ball` with `⟨f, x⟩ ≥ level`: the top point, points of the rim `⟨f, x⟩ = level` (or
/// of a great sphere when the cap contains the centre), and uniform interior fill.
pub fn ball_cap<R: Rng + ?Sized>(
    ball: &Ball,
    f: &Point,
    level: f64,
    n: usize,
    rng: &mut R,
) -> Vec<Point> {
    let d = f.dim();
    let u = f.scaled(1.0 / f.norm());
    let c = ball.center();
    let r = ball.radius();
    // Signed height of the cutting plane above the centre, along u.
    let h = ((level / f.norm()) - c.dot(&u)).clamp(-r, r);
    let random_perp = |rng: &mut R| -> Option<Point> {
        if d < 2 {
            return None;
        }
        loop {
            let g = Point::gaussian(d, rng);
            let g = g.axpy(-g.dot(&u), &u);
            let gn = g.norm();
            if gn > 1e-12 {
                return Some(g.scaled(1.0 / gn));
            }
        }
    };
    let mut pts = vec![c.axpy(r, &u)];
    // Widest cross-section of the cap.
    let h_wide = h.max(0.0);
    let rho_wide = (r * r - h_wide * h_wide).max(0.0).sqrt();
    let n_rim = (n / 2).max(2);
    for _ in 0..n_rim {
        match random_perp(rng) {
            Some(w) => {
                pts.push(c.axpy(h_wide, &u).axpy(rho_wide, &w));
                pts.push(c.axpy(h_wide, &u).axpy(-rho_wide, &w));
            }
            None => pts.push(c.axpy(h_wide, &u)),
        }
    }
    for _ in 0..n.saturating_sub(pts.len()) {
        let t = h + (r - h) * rng.random::<f64>();
        let rho = (r * r - t * t).max(0.0).sqrt() * rng.random::<f64>().sqrt();
        let base = c.axpy(t, &u);
        pts.push(match random_perp(rng) {
            Some(w) => base.axpy(rho, &w),
            None => base,
        });
    }
    pts
}

/// `n` members of `set`, concentrated near its boundary and within roughly `scale` of its point
/// closest to the origin.
pub fn sample_members<R: Rng + ?Sized>(
    set: &SetDescriptor,
    n: usize,
    scale: f64,
    rng: &mut R,
) -> Result<Vec<Point>> {
    let d = set.dim();
    let mut out: Vec<Point> = Vec::with_capacity(n);
    match set {
        SetDescriptor::ShiftedConvexCone(s) => {
            debug_assert_eq!(s.cone().kind(), ConeKind::C);
            for i in 0..n {
                let sc = log_uniform(MIN_SCALE_FRACTION * scale, scale, rng);
                out.push(s.cone().sample_c(sc, i % 2 == 0, rng));
            }
            return Ok(out);
        }
        SetDescriptor::Polygon2D(poly) => {
            out.extend(poly.vertices().iter().take(n).cloned());
        }
        SetDescriptor::Ball(ball) => {
            for i in 0..n {
                let w = Point::random_unit(d, rng);
                let t = if i % 3 == 2 {
                    rng.random::<f64>().powf(1.0 / d as f64)
                } else {
                    1.0
                };
                out.push(ball.center().axpy(t * ball.radius(), &w));
            }
            return Ok(out);
        }
        _ => {}
    }
    let anchor = set.project(&Point::zeros(d))?;
    while out.len() < n {
        if out.len() >= 2 && rng.random::<f64>() < INTERIOR_FRACTION {
            let i = rng.random_range(0..out.len());
            let j = rng.random_range(0..out.len());
            let t = rng.random::<f64>();
            let q = out[i].axpy(t, &(&out[j] - &out[i]));
            out.push(q);
            continue;
        }
        let sc = log_uniform(MIN_SCALE_FRACTION * scale, scale, rng);
        let g = anchor.axpy(sc, &Point::random_unit(d, rng));
        out.push(set.project(&g)?);
    }
    Ok(out)
}

/// Point where the segment from `inside` (norm ≤ radius) to `outside` (norm > radius) meets the
/// sphere of the given radius.
pub fn segment_sphere_exit(inside: &Point, outside: &Point, radius: f64) -> Point {
    let dir = outside - inside;
    let a = dir.norm_sq();
    let b = inside.dot(&dir);
    let c = inside.norm_sq() - radius * radius;
    // Positive root of a t² + 2 b t + c = 0; c ≤ 0 so the root lies in [0, 1].
    let disc = (b * b - a * c).max(0.0);
    let t = if b >= 0.0 {
        -c / (b + disc.sqrt())
    } else {
        (disc.sqrt() - b) / a
    };
    inside.axpy(t.clamp(0.0, 1.0), &dir)
}

/// `n` members of `set ∩ radius·ball`, with samples outside the ball pulled back to the sphere
/// along the segment from the point of `set` nearest the origin.
pub fn sample_in_ball<R: Rng + ?Sized>(
    set: &SetDescriptor,
    radius: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    let d = set.dim();
    let anchor = match set {
        SetDescriptor::ShiftedConvexCone(_) => None,
        _ => Some(set.project(&Point::zeros(d))?),
    };
    let raw = sample_members(set, n, 2.0 * radius, rng)?;
    match anchor {
        Some(anchor) => {
            if anchor.norm() > radius {
                return Err(Error::SamplingFailed(format!(
                    "set does not meet the ball of radius {radius}"
                )));
            }
            let mut out = vec![anchor.clone()];
            out.extend(raw.into_iter().map(|q| {
                if q.norm() <= radius {
                    q
                } else {
                    segment_sphere_exit(&anchor, &q, radius)
                }
            }));
            Ok(out)
        }
        None => {
            let kept: Vec<Point> = raw.into_iter().filter(|q| q.norm() <= radius).collect();
            if kept.is_empty() {
                return Err(Error::SamplingFailed(format!(
                    "no samples inside the ball of radius {radius}"
                )));
            }
            Ok(kept)
        }
    }
}
