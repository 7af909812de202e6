//! Stable couples `(A, B)` with perturbation families `A_n → A`, `B_n → B` of size `δ_n = δ/n`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{PairGenerator, Schedule};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::{Constraint, SetDescriptor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    /// Disc of radius 1 centred at `(0, 1)` and the halfplane `x₂ ≤ 0`, touching at the origin,
    /// where `f = (0, −1)` strongly exposes the disc. `A_n = A + δ_n e₂`, `B_n = B − δ_n e₂`.
    TangentDisc {},
    /// Disc of radius 2 at the origin and `x₁ ≤ 1`; `A_n` is translated by `δ_n (1, 1)/√2` and
    /// `B_n = {x₁ ≤ 1 + δ_n}`. Requires `δ ≤ 1` so that every pair contains the origin.
    InteriorIntersection {},
    /// `U = span(e₁, e₂)` and `V = span((cos φ, 0, sin φ, 0), (0, cos ψ, 0, sin ψ))` in `ℝ⁴`;
    /// `A_n = U + δ_n e₃`, `B_n = V + δ_n e₄`.
    TransversalSubspaces { phi: f64, psi: f64 },
    /// Nonnegative orthant `K` and `B = {⟨a_i, x⟩ ≤ b_i}` with every `b_i > 0`.
    InequalitySystem { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    /// `K` and `B = {⟨a, x⟩ ≤ b}` with `a ∉ K⁻`.
    InequalityOutsidePolar { normal: Vec<f64>, offset: f64 },
    /// `K` and `B = {⟨a, x⟩ ≤ 0}` with `a ∈ int K⁻`.
    InequalityInteriorPolar { normal: Vec<f64> },
}

#[derive(Clone)]
pub struct StableScenario {
    pub spec: ScenarioSpec,
    pub a: SetDescriptor,
    pub b: SetDescriptor,
    /// `δ` in `δ_n = δ/n`.
    pub delta: f64,
    /// `(A_n, B_n)` for `n ≥ 1`.
    pub family: PairGenerator,
    /// `c` with `h_N(A_n, A), h_N(B_n, B) ≤ c·δ_n` for every `N`, where known.
    pub aw_constant: Option<f64>,
    /// Common limit of the iterates when `A ∩ B` is a single point.
    pub limit: Option<Point>,
    /// `r` with `r·B ⊆ A_n ∩ B_n` for every `n`, when the pairs share an interior ball at 0.
    pub inner_radius: Option<f64>,
    /// Whether every `A_n ∩ B_n` contains the origin.
    pub origin_in_pairs: bool,
    pub default_start: Point,
}

impl std::fmt::Debug for StableScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StableScenario")
            .field("spec", &self.spec)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

impl StableScenario {
    pub fn delta_n(&self, n: usize) -> f64 {
        self.delta / n as f64
    }

    pub fn pair(&self, n: usize) -> Result<(SetDescriptor, SetDescriptor)> {
        (self.family)(n)
    }

    /// `(A_n, B_n)` at every iteration `n`.
    pub fn schedule(&self) -> Schedule {
        let family = Arc::clone(&self.family);
        Schedule::per_step(move |n| family(n))
    }
}

fn point(v: &[f64]) -> Result<Point> {
    Point::new(v.to_vec())
}

fn check_normal(v: &[f64]) -> Result<Point> {
    let p = point(v)?;
    if p.norm() == 0.0 {
        return Err(Error::ZeroVector("constraint normal"));
    }
    Ok(p)
}

/// Builds the scenario with perturbation scale `delta > 0`.
pub fn stable_scenario(spec: &ScenarioSpec, delta: f64) -> Result<StableScenario> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Precondition(format!("perturbation scale {delta} must be positive")));
    }
    let dn = move |n: usize| delta / n as f64;
    let scenario = match spec {
        ScenarioSpec::TangentDisc {} => {
            let e2 = point(&[0.0, 1.0])?;
            let a = SetDescriptor::ball(e2.clone(), 1.0)?;
            let b = SetDescriptor::halfspace(e2.clone(), 0.0)?;
            let (a0, e) = (a.clone(), e2.clone());
            let family: PairGenerator = Arc::new(move |n| {
                let d = dn(n);
                Ok((a0.translated(&e.scaled(d))?, SetDescriptor::halfspace(e.clone(), -d)?))
            });
            StableScenario {
                spec: spec.clone(),
                a,
                b,
                delta,
                family,
                aw_constant: Some(1.0),
                limit: Some(Point::zeros(2)),
                inner_radius: None,
                origin_in_pairs: false,
                default_start: point(&[2.0, 3.0])?,
            }
        }
        ScenarioSpec::InteriorIntersection {} => {
            if delta > 1.0 {
                return Err(Error::Infeasible(format!(
                    "delta = {delta} > 1 lets B_1 or A_1 exclude a ball around the origin"
                )));
            }
            let e1 = point(&[1.0, 0.0])?;
            let a = SetDescriptor::ball(Point::zeros(2), 2.0)?;
            let b = SetDescriptor::halfspace(e1.clone(), 1.0)?;
            let dir = point(&[std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2])?;
            let a0 = a.clone();
            let family: PairGenerator = Arc::new(move |n| {
                let d = dn(n);
                Ok((a0.translated(&dir.scaled(d))?, SetDescriptor::halfspace(e1.clone(), 1.0 + d)?))
            });
            StableScenario {
                spec: spec.clone(),
                a,
                b,
                delta,
                family,
                aw_constant: Some(1.0),
                limit: None,
                // A_n ⊇ (2 − δ)B and B_n ⊇ B.
                inner_radius: Some((2.0 - delta).min(1.0)),
                origin_in_pairs: true,
                default_start: point(&[5.0, 3.0])?,
            }
        }
        ScenarioSpec::TransversalSubspaces { phi, psi } => {
            if phi.sin().abs() < 1e-8 || psi.sin().abs() < 1e-8 {
                return Err(Error::Infeasible("U ∩ V ≠ {0} when sin φ or sin ψ vanishes".into()));
            }
            let u = SetDescriptor::span(4, &[Point::basis(4, 0), Point::basis(4, 1)])?;
            let v = SetDescriptor::span(
                4,
                &[
                    point(&[phi.cos(), 0.0, phi.sin(), 0.0])?,
                    point(&[0.0, psi.cos(), 0.0, psi.sin()])?,
                ],
            )?;
            let (ua, va) = (u.clone(), v.clone());
            let family: PairGenerator = Arc::new(move |n| {
                let d = dn(n);
                Ok((
                    affine_translate(&ua, &Point::basis(4, 2).scaled(d))?,
                    affine_translate(&va, &Point::basis(4, 3).scaled(d))?,
                ))
            });
            StableScenario {
                spec: spec.clone(),
                a: u,
                b: v,
                delta,
                family,
                aw_constant: Some(1.0),
                limit: Some(Point::zeros(4)),
                inner_radius: None,
                origin_in_pairs: false,
                default_start: point(&[1.0, -2.0, 0.5, 1.5])?,
            }
        }
        ScenarioSpec::InequalitySystem { normals, offsets } => {
            if normals.is_empty() || normals.len() != offsets.len() {
                return Err(Error::Precondition("need matching, nonempty normals and offsets".into()));
            }
            if let Some(bi) = offsets.iter().find(|b| !(**b > 0.0)) {
                return Err(Error::Infeasible(format!("every offset must be positive, got {bi}")));
            }
            let dim = normals[0].len();
            let normals: Vec<Point> = normals.iter().map(|v| check_normal(v)).collect::<Result<_>>()?;
            let offsets = offsets.clone();
            let system = move |shift: f64| -> Result<SetDescriptor> {
                let cons = normals
                    .iter()
                    .zip(&offsets)
                    .map(|(a, b)| Constraint {
                        a: a.clone(),
                        b: b + shift,
                    })
                    .collect();
                SetDescriptor::polyhedron(cons, Point::zeros(dim))
            };
            let b = system(0.0)?;
            let family = orthant_family(dim, delta, system)?;
            inequality_scenario(spec, dim, delta, b, family, None)?
        }
        ScenarioSpec::InequalityOutsidePolar { normal, offset } => {
            let a = check_normal(normal)?;
            if a.coords().iter().all(|x| *x <= 0.0) {
                return Err(Error::Infeasible("a lies in the polar cone K⁻".into()));
            }
            if a.coords().iter().all(|x| *x >= 0.0) && *offset < 0.0 {
                return Err(Error::Infeasible("K ∩ {⟨a, x⟩ ≤ b} is empty for a ≥ 0, b < 0".into()));
            }
            let dim = a.dim();
            let c = 1.0 / a.norm();
            let b = SetDescriptor::halfspace(a.clone(), *offset)?;
            let off = *offset;
            let family = orthant_family(dim, delta, move |s| SetDescriptor::halfspace(a.clone(), off + s))?;
            inequality_scenario(spec, dim, delta, b, family, Some(c.max(1.0)))?
        }
        ScenarioSpec::InequalityInteriorPolar { normal } => {
            let a = check_normal(normal)?;
            if !a.coords().iter().all(|x| *x < 0.0) {
                return Err(Error::Infeasible("a must lie in int K⁻: every component negative".into()));
            }
            let dim = a.dim();
            let c = 1.0 / a.norm();
            let b = SetDescriptor::halfspace(a.clone(), 0.0)?;
            let family = orthant_family(dim, delta, move |s| SetDescriptor::halfspace(a.clone(), s))?;
            inequality_scenario(spec, dim, delta, b, family, Some(c.max(1.0)))?
        }
    };
    Ok(scenario)
}

/// Translate of a linear or affine subspace, kept as an affine subspace.
fn affine_translate(s: &SetDescriptor, v: &Point) -> Result<SetDescriptor> {
    let (anchor, basis) = s
        .affine_parts()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a flat", s.kind_name())))?;
    SetDescriptor::affine_subspace(&anchor + v, basis)
}

/// `A_n = K − δ_n·1/√d` and `B_n = relaxed(δ_n)`.
fn orthant_family<F>(dim: usize, delta: f64, relaxed: F) -> Result<PairGenerator>
where
    F: Fn(f64) -> Result<SetDescriptor> + Send + Sync + 'static,
{
    let k = SetDescriptor::nonneg_orthant(dim)?;
    let dir = Point::new(vec![-1.0 / (dim as f64).sqrt(); dim])?;
    Ok(Arc::new(move |n| {
        let d = delta / n as f64;
        Ok((k.translated(&dir.scaled(d))?, relaxed(d)?))
    }))
}

fn inequality_scenario(
    spec: &ScenarioSpec,
    dim: usize,
    delta: f64,
    b: SetDescriptor,
    family: PairGenerator,
    aw_constant: Option<f64>,
) -> Result<StableScenario> {
    let start: Vec<f64> = (0..dim).map(|i| if i % 2 == 0 { -2.0 } else { 3.0 }).collect();
    Ok(StableScenario {
        spec: spec.clone(),
        a: SetDescriptor::nonneg_orthant(dim)?,
        b,
        delta,
        family,
        aw_constant,
        limit: None,
        inner_radius: None,
        origin_in_pairs: matches!(spec, ScenarioSpec::InequalitySystem { .. })
            || matches!(spec, ScenarioSpec::InequalityInteriorPolar { .. })
            || matches!(spec, ScenarioSpec::InequalityOutsidePolar { offset, .. } if *offset >= 0.0),
        default_start: Point::new(start)?,
    })
}
