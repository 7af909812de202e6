//! Principal angles between subspaces and the separation constants derived from them.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::check_orthonormal;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    /// `Ω = sup{⟨a, b⟩ : a ∈ V ∩ S, b ∈ U ∩ S}`.
    pub omega: f64,
    /// Cosines of the principal angles, in decreasing order.
    pub principal_cosines: Vec<f64>,
}

/// Principal cosines are the singular values of the cross-Gram matrix `(⟨u_i, v_j⟩)`.
pub fn omega_angle(u_basis: &[Point], v_basis: &[Point]) -> Result<AngleReport> {
    if u_basis.is_empty() || v_basis.is_empty() {
        return Err(Error::Precondition("both bases must be nonempty".into()));
    }
    let d = u_basis[0].dim();
    check_orthonormal(u_basis, d)?;
    check_orthonormal(v_basis, d)?;
    let g = DMatrix::from_fn(u_basis.len(), v_basis.len(), |i, j| u_basis[i].dot(&v_basis[j]));
    let mut cosines: Vec<f64> = g
        .singular_values()
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    Ok(AngleReport {
        omega: cosines[0],
        principal_cosines: cosines,
    })
}

/// Orthonormal basis of a uniformly random `k`-dimensional subspace of `ℝ^dim`: the Q factor of a
/// Gaussian matrix.
pub fn random_orthonormal_basis(dim: usize, k: usize, rng_seed: u64) -> Result<Vec<Point>> {
    if k == 0 || k > dim {
        return Err(Error::Precondition(format!("subspace dimension {k} must lie in 1..={dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let g = DMatrix::from_fn(dim, k, |_, _| StandardNormal.sample(&mut rng));
    let q = g.qr().q();
    Ok((0..k)
        .map(|j| Point::from_vec_unchecked(q.column(j).iter().copied().collect()))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationConstants {
    pub eps: f64,
    pub eta: f64,
}

/// `(M/(M − ε))² · (Ω + 15√ε / M²)`.
pub fn separation_lhs(m: f64, omega: f64, eps: f64) -> f64 {
    (m / (m - eps)).powi(2) * (omega + 15.0 * eps.sqrt() / (m * m))
}

/// `η = (Ω + 1)/2` and the largest `ε < M` found by bisection with
/// `separation_lhs(M, Ω, ε) ≤ η`.
pub fn separation_constants(m: f64, omega: f64) -> Result<SeparationConstants> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Precondition(format!("M = {m} must lie in (0, 1)")));
    }
    if !(0.0..1.0).contains(&omega) {
        return Err(Error::Precondition(format!("omega = {omega} must lie in [0, 1)")));
    }
    let eta = 0.5 * (omega + 1.0);
    // The left side increases from Ω < η at ε = 0 to +∞ as ε → M.
    let (mut lo, mut hi) = (0.0, m);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if separation_lhs(m, omega, mid) <= eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo <= 1e-12 {
        return Err(Error::Infeasible(format!(
            "no admissible eps above 1e-12 for M = {m}, omega = {omega}"
        )));
    }
    debug_assert!(separation_lhs(m, omega, lo) <= eta);
    Ok(SeparationConstants { eps: lo, eta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn random_bases_are_orthonormal() {
        let b = random_orthonormal_basis(6, 3, 4).unwrap();
        check_orthonormal(&b, 6).unwrap();
        assert_eq!(b, random_orthonormal_basis(6, 3, 4).unwrap());
        assert!(random_orthonormal_basis(3, 4, 0).is_err());
    }

    #[test]
    fn lines_in_plane() {
        for phi in [0.3f64, 1.0, 2.5] {
            let r = omega_angle(&[p(&[1.0, 0.0])], &[p(&[phi.cos(), phi.sin()])]).unwrap();
            assert!((r.omega - phi.cos().abs()).abs() < 1e-15);
        }
        let r = omega_angle(&[p(&[1.0, 0.0])], &[p(&[0.0, 1.0])]).unwrap();
        assert_eq!(r.omega, 0.0);
    }

    #[test]
    fn rejects_non_orthonormal() {
        assert!(omega_angle(&[p(&[1.0, 1.0])], &[p(&[1.0, 0.0])]).is_err());
    }

    #[test]
    fn separation_shrinks_as_omega_grows() {
        let mut prev = f64::INFINITY;
        for omega in [0.0, 0.5, 0.9, 0.99] {
            let c = separation_constants(0.5, omega).unwrap();
            assert!(separation_lhs(0.5, omega, c.eps) <= c.eta);
            assert!(c.eps < prev);
            prev = c.eps;
        }
    }
}
