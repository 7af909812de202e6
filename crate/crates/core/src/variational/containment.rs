//! Containment of sets in shifted cones and in the subspace neighbourhoods
//! `W(ε) = {w : ∃u ∈ W∖{0}, cos(u, w) ≥ 1 − ε} ∪ εB`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cone_contains, ConeSpec, Point};
use crate::sets::{check_orthonormal, sampling, SetDescriptor};

/// Radius of the window in which containment of unbounded sets is tested.
pub const CONTAINMENT_WINDOW: f64 = 10.0;

/// Tolerance on the defining inequality of a cone.
pub const CONE_TOL: f64 = 1e-9;

/// Slack on `cos(u*, w) ≥ 1 − ε` absorbing rounding in the norm ratio.
const WSET_COS_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContainmentTarget {
    Cone { cone: ConeSpec },
    WSet { basis: Vec<Point>, eps: f64 },
}

impl ContainmentTarget {
    fn dim(&self) -> Option<usize> {
        match self {
            ContainmentTarget::Cone { cone } => Some(cone.dim()),
            ContainmentTarget::WSet { basis, .. } => basis.first().map(Point::dim),
        }
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        match self {
            ContainmentTarget::Cone { cone } => cone_contains(cone, x, CONE_TOL),
            ContainmentTarget::WSet { basis, eps } => Ok(wset_contains(x, basis, *eps)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub contained: Vec<bool>,
    /// First index `i` with `contained[j]` for every `j ≥ i`; `None` if the last set fails.
    pub first_suffix_index: Option<usize>,
    pub n_samples: usize,
    pub seed: u64,
}

/// Whether `w ∈ W(ε)` for `W = span(basis)` (orthonormal), using the norm-matched closest point
/// `u* = ‖w‖·P_W w / ‖P_W w‖`, for which `‖u* − w‖² = 2‖w‖²(1 − cos(P_W w, w))`.
pub fn wset_contains(w: &Point, basis: &[Point], eps: f64) -> bool {
    let nw = w.norm();
    if nw <= eps {
        return true;
    }
    let proj_norm_sq: f64 = basis.iter().map(|u| u.dot(w).powi(2)).sum();
    if proj_norm_sq == 0.0 {
        return false;
    }
    proj_norm_sq.sqrt() / nw >= 1.0 - eps - WSET_COS_TOL
}

/// Candidate points of `set` near where containment in `target` is most likely to fail.
fn probe_points<R: rand::Rng + ?Sized>(
    set: &SetDescriptor,
    target: &ContainmentTarget,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    let d = set.dim();
    let mut pts = sampling::sample_members(set, n, CONTAINMENT_WINDOW, rng)?;
    if !matches!(set, SetDescriptor::ShiftedConvexCone(_)) {
        pts.push(set.project(&Point::zeros(d))?);
        // Projections of points along the cone axis / subspace directions.
        let axes: Vec<Point> = match target {
            ContainmentTarget::Cone { cone } => vec![cone.direction().clone()],
            ContainmentTarget::WSet { basis, .. } => basis.clone(),
        };
        for axis in &axes {
            for k in -40..=16 {
                let t = 2f64.powf(k as f64 / 4.0);
                for s in [t, -t] {
                    pts.push(set.project(&axis.scaled(s))?);
                }
            }
        }
    }
    Ok(pts)
}

/// For each set, whether its (boundary-biased) samples all lie in `target`.
pub fn eventual_containment_probe(
    sets: &[SetDescriptor],
    target: &ContainmentTarget,
    n_samples: usize,
    rng_seed: u64,
) -> Result<ContainmentReport> {
    if let ContainmentTarget::WSet { basis, eps } = target {
        if !(*eps > 0.0 && *eps < 1.0) {
            return Err(Error::Precondition(format!("W(eps) needs eps in (0,1), got {eps}")));
        }
        if basis.is_empty() {
            return Err(Error::Precondition("W(eps) needs a nonempty basis".into()));
        }
        check_orthonormal(basis, basis[0].dim())?;
    }
    let mut contained = Vec::with_capacity(sets.len());
    for (i, set) in sets.iter().enumerate() {
        if let Some(d) = target.dim() {
            if d != set.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: set.dim(),
                });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.wrapping_add(i as u64));
        let mut ok = true;
        for x in probe_points(set, target, n_samples, &mut rng)? {
            if !target.contains(&x)? {
                ok = false;
                break;
            }
        }
        contained.push(ok);
    }
    let first_suffix_index = match contained.iter().rposition(|c| !c) {
        None if contained.is_empty() => None,
        None => Some(0),
        Some(i) if i + 1 < contained.len() => Some(i + 1),
        Some(_) => None,
    };
    Ok(ContainmentReport {
        contained,
        first_suffix_index,
        n_samples,
        seed: rng_seed,
    })
}
