//! Variational quantities: localized set distances, cone containment, exposure, angles.

mod angles;
mod aw;
mod containment;
mod exposure;
mod facts;

pub use angles::{omega_angle, random_orthonormal_basis, separation_constants, separation_lhs, AngleReport, SeparationConstants};
pub use aw::{aw_distance, aw_distance_sampled, AwEstimate, AwMode};
pub use containment::{
    eventual_containment_probe, wset_contains, ContainmentReport, ContainmentTarget, CONE_TOL,
    CONTAINMENT_WINDOW,
};
pub use exposure::{
    epsilon_alpha, epsilon_alpha_within, epsilon_over_points, lambda_for_point,
    strongly_exposes_probe, ExposureProbe, DEFAULT_EPS_RADIUS,
};
pub use facts::{check_cos_separation, check_cos_separation_in, check_fact_norms, COS_SEPARATION_DIM};
