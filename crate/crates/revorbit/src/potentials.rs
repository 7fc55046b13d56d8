//! Central potentials V(u) on a surface of revolution.
//!
//! The generalized gravitational potential V1 = a theta(u) solves the
//! Laplace-Beltrami equation on the surface; the generalized oscillator is
//! V2 = k / theta(u)^2. Both bind to the surface's pinned theta, so their
//! first two derivatives come out in closed form:
//!
//!   V1' = a / f^2            V1'' = -2 a f' / f^3
//!   V2' = -2k theta'/theta^3 V2'' from theta' = 1/f^2, theta'' = -2f'/f^3

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::SurfaceOfRevolution;
use std::sync::Arc;

/// theta magnitudes below this are treated as the oscillator's singular ring.
const THETA_ZERO_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum CentralPotential {
    Gravitational {
        a: f64,
        surface: Arc<SurfaceOfRevolution>,
    },
    Harmonic {
        k: f64,
        surface: Arc<SurfaceOfRevolution>,
    },
    Custom {
        v: Box<Expr>,
        d1: Box<Expr>,
        d2: Box<Expr>,
        source: String,
    },
}

impl CentralPotential {
    /// V1 = a theta(u), a > 0.
    pub fn gravitational(a: f64, surface: &Arc<SurfaceOfRevolution>) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gravitational constant a must be positive, got {a}"
            )));
        }
        Ok(CentralPotential::Gravitational {
            a,
            surface: Arc::clone(surface),
        })
    }

    /// V2 = k / theta(u)^2, k > 0.
    pub fn harmonic(k: f64, surface: &Arc<SurfaceOfRevolution>) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "oscillator constant k must be positive, got {k}"
            )));
        }
        Ok(CentralPotential::Harmonic {
            k,
            surface: Arc::clone(surface),
        })
    }

    /// A potential parsed from an expression in u, with V' and V'' taken
    /// from the expression tree.
    pub fn custom(expr: &str) -> Result<Self> {
        let v = Expr::parse(expr)?;
        let d1 = v.diff();
        let d2 = d1.diff();
        Ok(CentralPotential::Custom {
            v: Box::new(v),
            d1: Box::new(d1),
            d2: Box::new(d2),
            source: expr.to_string(),
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CentralPotential::Gravitational { .. } => "gravitational",
            CentralPotential::Harmonic { .. } => "harmonic",
            CentralPotential::Custom { .. } => "custom",
        }
    }

    fn theta_checked(surface: &SurfaceOfRevolution, u: f64) -> Result<f64> {
        let theta = surface.theta(u)?;
        if theta.abs() <= THETA_ZERO_EPS {
            return Err(Error::ThetaZero { u });
        }
        Ok(theta)
    }

    pub fn v(&self, u: f64) -> Result<f64> {
        match self {
            CentralPotential::Gravitational { a, surface } => Ok(a * surface.theta(u)?),
            CentralPotential::Harmonic { k, surface } => {
                let theta = Self::theta_checked(surface, u)?;
                Ok(k / (theta * theta))
            }
            CentralPotential::Custom { v, .. } => v.eval(u),
        }
    }

    pub fn dv(&self, u: f64) -> Result<f64> {
        match self {
            CentralPotential::Gravitational { a, surface } => {
                let f = surface.radius(u)?;
                Ok(a / (f * f))
            }
            CentralPotential::Harmonic { k, surface } => {
                let theta = Self::theta_checked(surface, u)?;
                let t1 = surface.theta_d1(u)?;
                Ok(-2.0 * k * t1 / (theta * theta * theta))
            }
            CentralPotential::Custom { d1, .. } => d1.eval(u),
        }
    }

    pub fn d2v(&self, u: f64) -> Result<f64> {
        match self {
            CentralPotential::Gravitational { a, surface } => {
                let f = surface.radius(u)?;
                Ok(-2.0 * a * surface.df(u)? / (f * f * f))
            }
            CentralPotential::Harmonic { k, surface } => {
                let theta = Self::theta_checked(surface, u)?;
                let t1 = surface.theta_d1(u)?;
                let t2 = surface.theta_d2(u)?;
                let t4 = theta * theta * theta * theta;
                Ok(-2.0 * k * (t2 * theta - 3.0 * t1 * t1) / t4)
            }
            CentralPotential::Custom { d2, .. } => d2.eval(u),
        }
    }

    /// Residual of the Laplace-Beltrami operator applied to V:
    /// (1/f^2) d/du (f^2 V') = V'' + 2 (f'/f) V'.
    pub fn laplace_beltrami_residual(
        &self,
        surface: &SurfaceOfRevolution,
        u: f64,
    ) -> Result<f64> {
        let f = surface.radius(u)?;
        Ok(self.d2v(u)? + 2.0 * surface.df(u)? / f * self.dv(u)?)
    }
}
