//! Effective-potential analysis of central-force motion.
//!
//! Bound motion with angular momentum l reduces to one radial degree of
//! freedom in the effective potential W(u) = l^2/(2 m f^2) + V(u). This
//! module locates circular orbits and turning points, computes apsidal
//! angles by endpoint-regularized quadrature, checks the closure identities
//! that single out the generalized Kepler and oscillator potentials, and
//! classifies surfaces by how many central potentials close every bounded
//! orbit.

mod apsidal;
mod bertrand;
mod effective;
mod orbits;

pub use apsidal::{
    abel_identity_check, apsidal_angle, best_rational, closure_check, radial_period,
    small_oscillation_apsidal, ApsidalResult, RationalApprox,
};
pub use bertrand::{
    bertrand_classify, beta_quartic, first_order_condition_residual, small_oscillation_beta,
    w_derivative_identities_check, Admissible, BertrandReport, QuarticRoots, QuarticSample,
};
pub use effective::{
    circular_momentum_squared, circular_orbits, energy_grid, global_minimum, turning_points,
    turning_points_around, CircularOrbit, CriticalKind, EffectiveProfile,
};
pub use orbits::{
    analytic_orbit_grav, analytic_orbit_harm, trajectory_equation_residual, GravOrbit, HarmOrbit,
};
