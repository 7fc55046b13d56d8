use crate::error::{Error, Result};
use crate::geometry::{SurfaceOfRevolution, B_SQUARED_EPS};
use crate::potentials::CentralPotential;
use std::sync::Arc;

fn require_positive_b2(surface: &SurfaceOfRevolution) -> Result<f64> {
    match surface.b_squared {
        Some(b2) if b2 > B_SQUARED_EPS => Ok(b2),
        _ => Err(Error::NonConstantH),
    }
}

/// Conic trajectory of the generalized Kepler potential on a constant-h
/// surface: rho(phi) = (1 + e cos(b (phi - phi0))) / p with rho = -theta(u)
/// and semi-latus rectum p = b^2 l^2 / (a m).
#[derive(Debug, Clone)]
pub struct GravOrbit {
    surface: Arc<SurfaceOfRevolution>,
    pub semi_latus: f64,
    pub eccentricity: f64,
    pub b: f64,
    pub phi0: f64,
}

pub fn analytic_orbit_grav(
    surface: &Arc<SurfaceOfRevolution>,
    a: f64,
    l: f64,
    m: f64,
    eccentricity: f64,
    phi0: f64,
) -> Result<GravOrbit> {
    let b2 = require_positive_b2(surface)?;
    if !(a > 0.0 && m > 0.0 && eccentricity >= 0.0) {
        return Err(Error::InvalidParameter(
            "need a > 0, m > 0, e >= 0".to_string(),
        ));
    }
    Ok(GravOrbit {
        surface: Arc::clone(surface),
        semi_latus: b2 * l * l / (a * m),
        eccentricity,
        b: b2.sqrt(),
        phi0,
    })
}

impl GravOrbit {
    pub fn rho(&self, phi: f64) -> f64 {
        (1.0 + self.eccentricity * (self.b * (phi - self.phi0)).cos()) / self.semi_latus
    }

    /// u(phi) = theta^{-1}(-rho(phi)); fails with a range error where the
    /// conic leaves the surface chart.
    pub fn u(&self, phi: f64) -> Result<f64> {
        self.surface.invert_theta(-self.rho(phi))
    }
}

/// Centered-ellipse trajectory of the generalized oscillator:
/// rho^2(phi) = h_int/b^2 + eta cos(2 b (phi - phi0)).
#[derive(Debug, Clone)]
pub struct HarmOrbit {
    surface: Arc<SurfaceOfRevolution>,
    pub h_int: f64,
    pub eta: f64,
    pub b: f64,
    pub phi0: f64,
}

pub fn analytic_orbit_harm(
    surface: &Arc<SurfaceOfRevolution>,
    k: f64,
    l: f64,
    m: f64,
    h_int: f64,
    phi0: f64,
) -> Result<HarmOrbit> {
    let b2 = require_positive_b2(surface)?;
    if !(k > 0.0 && m > 0.0 && h_int > 0.0) {
        return Err(Error::InvalidParameter(
            "need k > 0, m > 0, h_int > 0".to_string(),
        ));
    }
    let eta_squared = h_int * h_int / (b2 * b2) - 2.0 * k * m / (l * l * b2);
    if eta_squared < 0.0 {
        return Err(Error::ComplexEta { eta_squared });
    }
    Ok(HarmOrbit {
        surface: Arc::clone(surface),
        h_int,
        eta: eta_squared.sqrt(),
        b: b2.sqrt(),
        phi0,
    })
}

impl HarmOrbit {
    pub fn rho_squared(&self, phi: f64) -> f64 {
        self.h_int / (self.b * self.b) + self.eta * (2.0 * self.b * (phi - self.phi0)).cos()
    }

    pub fn rho(&self, phi: f64) -> f64 {
        self.rho_squared(phi).max(0.0).sqrt()
    }

    pub fn u(&self, phi: f64) -> Result<f64> {
        self.surface.invert_theta(-self.rho(phi))
    }
}

/// Max residual of the trajectory equation
///   rho'' + b^2 rho + (m/l^2) dV/d rho = 0
/// over a phi grid, with rho'' from a five-point central stencil and
/// dV/d rho = -f(u)^2 V'(u) at u = theta^{-1}(-rho).
pub fn trajectory_equation_residual(
    surface: &Arc<SurfaceOfRevolution>,
    potential: &CentralPotential,
    l: f64,
    m: f64,
    rho: &dyn Fn(f64) -> f64,
    phi_range: (f64, f64),
    grid_step: f64,
) -> Result<f64> {
    let b2 = require_positive_b2(surface)?;
    let (lo, hi) = phi_range;
    let n = ((hi - lo) / grid_step).round().max(8.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut worst = 0.0_f64;
    for i in 2..n.saturating_sub(1) {
        let phi = lo + h * i as f64;
        let r = rho(phi);
        let second = crate::numeric::fd_second(&|x: f64| Some(rho(x)), phi, h)
            .expect("total closure");
        let u = surface.invert_theta(-r)?;
        let dv_drho = -surface.f(u)? * surface.f(u)? * potential.dv(u)?;
        let residual = second + b2 * r + m / (l * l) * dv_drho;
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}
