//! Central-force dynamics on surfaces of revolution.
//!
//! The crate models a particle of mass m moving on a surface of revolution
//! under a central potential V(u), where u is arclength along the profile
//! curve. It provides:
//!
//! - surface families (constant curvature, torus, parsed custom profiles)
//!   with Gaussian curvature, the invariant h(u) = -f f'' + f'^2, the
//!   antiderivative theta of 1/f^2 and the R^3 embedding ([`geometry`]);
//! - the generalized gravitational potential a*theta(u) and oscillator
//!   potential k/theta(u)^2, plus parsed custom potentials ([`potentials`]);
//! - a reduced symplectic integrator, with the central-projection map that
//!   carries planar trajectories onto constant-h surfaces ([`dynamics`]);
//! - effective-potential analysis: circular orbits, turning points, apsidal
//!   angles, closure detection, and the classification of surfaces by how
//!   many central potentials close every bounded orbit ([`analysis`]);
//! - JSON specs for surfaces and potentials shared by the CLI and the
//!   browser demo ([`schema`]).

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod numeric;
pub mod potentials;
pub mod schema;

pub use error::{Error, Result};
pub use geometry::{catalog, EmbeddedPoint, SurfaceClass, SurfaceOfRevolution};
pub use potentials::CentralPotential;
