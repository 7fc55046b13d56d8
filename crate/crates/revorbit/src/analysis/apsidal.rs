use super::effective::{
    global_minimum, turning_points, turning_points_around, CircularOrbit, EffectiveProfile,
};
use crate::error::{Error, Result};
use crate::numeric;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Absolute tolerance for the apsidal quadratures.
const APSIDAL_QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    pub p: i64,
    pub q: i64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ApsidalResult {
    pub energy: f64,
    pub l: f64,
    pub u1: f64,
    pub u2: f64,
    pub delta_phi: f64,
    pub beta: f64,
    pub closure: Option<RationalApprox>,
}

/// Integrate weight(u) / sqrt((2/m)(E - W(u))) over one radial half-swing,
/// doubled. The substitution u = u1 + (u2 - u1) sin^2(theta) removes the
/// inverse-square-root endpoint singularities before quadrature.
fn radial_quadrature(
    eff: &EffectiveProfile,
    u1: f64,
    u2: f64,
    energy: f64,
    weight: impl Fn(f64) -> Option<f64>,
) -> Result<f64> {
    let span = u2 - u1;
    let two_over_m = 2.0 / eff.m;
    let integrand = |theta: f64| {
        let s = theta.sin();
        let u = u1 + span * s * s;
        let w = match eff.w(u) {
            Ok(w) => w,
            Err(_) => return f64::NAN,
        };
        let gap = energy - w;
        if gap <= 0.0 {
            // only reachable within rounding of the endpoints
            return 0.0;
        }
        let num = match weight(u) {
            Some(v) => v,
            None => return f64::NAN,
        };
        num * span * (2.0 * theta).sin() / (two_over_m * gap).sqrt()
    };
    let v = 2.0 * numeric::integrate(&integrand, 0.0, 0.5 * PI, APSIDAL_QUAD_TOL)?;
    if !v.is_finite() {
        return Err(Error::QuadratureFailure {
            tol: APSIDAL_QUAD_TOL,
            estimate: f64::INFINITY,
        });
    }
    Ok(v)
}

/// Azimuthal advance over a complete radial oscillation at energy E:
/// delta_phi = 2 * integral of (l / (m f^2)) du / sqrt((2/m)(E - W)).
pub fn apsidal_angle(eff: &EffectiveProfile, energy: f64) -> Result<ApsidalResult> {
    let (u1, u2) = turning_points(eff, energy)?;
    if u1 >= u2 {
        return Err(Error::InvalidParameter(format!(
            "energy {energy} gives degenerate turning points; no radial oscillation"
        )));
    }
    let l = eff.l;
    let m = eff.m;
    let surface = &eff.surface;
    let delta_phi = radial_quadrature(eff, u1, u2, energy, |u| {
        surface.f(u).ok().map(|f| l / (m * f * f))
    })?;
    Ok(ApsidalResult {
        energy,
        l,
        u1,
        u2,
        delta_phi,
        beta: 2.0 * PI / delta_phi,
        closure: closure_check(delta_phi, 1e-6, 64),
    })
}

/// Period of the radial oscillation at energy E.
pub fn radial_period(eff: &EffectiveProfile, energy: f64) -> Result<f64> {
    let (u1, u2) = turning_points(eff, energy)?;
    if u1 >= u2 {
        return Err(Error::InvalidParameter(
            "degenerate turning points have no radial period".to_string(),
        ));
    }
    radial_quadrature(eff, u1, u2, energy, |_| Some(1.0))
}

/// Continued-fraction convergents of x with denominators up to q_max.
fn convergents(x: f64, q_max: i64) -> Vec<(i64, i64)> {
    let mut result = Vec::new();
    let (mut h_prev, mut h) = (1_i64, x.floor() as i64);
    let (mut k_prev, mut k) = (0_i64, 1_i64);
    result.push((h, k));
    let mut frac = x - x.floor();
    for _ in 0..40 {
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i64;
        let h_next = match a.checked_mul(h).and_then(|v| v.checked_add(h_prev)) {
            Some(v) => v,
            None => break,
        };
        let k_next = match a.checked_mul(k).and_then(|v| v.checked_add(k_prev)) {
            Some(v) => v,
            None => break,
        };
        if k_next > q_max {
            break;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        result.push((h, k));
    }
    result
}

/// First continued-fraction convergent p/q of delta_phi / 2 pi with
/// q <= q_max and |delta_phi/2pi - p/q| <= tol, if any.
pub fn closure_check(delta_phi: f64, tol: f64, q_max: i64) -> Option<RationalApprox> {
    let x = delta_phi / (2.0 * PI);
    for (p, q) in convergents(x, q_max) {
        let residual = (x - p as f64 / q as f64).abs();
        if residual <= tol {
            return Some(RationalApprox { p, q, residual });
        }
    }
    None
}

/// Best rational approximation p/q to x among convergents with q <= q_max,
/// reported with its residual. Used for the "is beta rational" note: a tiny
/// residual is evidence of closure, never a proof of rationality.
pub fn best_rational(x: f64, q_max: i64) -> RationalApprox {
    convergents(x, q_max)
        .into_iter()
        .map(|(p, q)| RationalApprox {
            p,
            q,
            residual: (x - p as f64 / q as f64).abs(),
        })
        .min_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap())
        .expect("convergents list is never empty")
}

/// Residual of the closure identity
///   integral over [u1(E), u2(E)] of ds/f^2 = 2 sqrt(2m)/(l beta) sqrt(|E - W0|),
/// maximized over the supplied energies. For closing potentials the
/// identity holds for every bound energy; for non-closing potentials the
/// residual grows as E leaves W0.
pub fn abel_identity_check(
    eff: &EffectiveProfile,
    circular: &CircularOrbit,
    beta: f64,
    energies: &[f64],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &energy in energies {
        let (u1, u2) = turning_points_around(eff, circular.u0, energy)?;
        let surface = &eff.surface;
        let integrand = |s: f64| match surface.f(s) {
            Ok(f) if f > 0.0 => 1.0 / (f * f),
            _ => f64::NAN,
        };
        let lhs = numeric::integrate(&integrand, u1, u2, 1e-11)?;
        if !lhs.is_finite() {
            return Err(Error::SingularPoint { u: u1 });
        }
        let rhs = 2.0 * (2.0 * eff.m).sqrt() / (eff.l * beta)
            * (energy - circular.energy).abs().sqrt();
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Apsidal angle in the limit of small radial oscillations about the
/// minimum, from the curvature of the well.
pub fn small_oscillation_apsidal(eff: &EffectiveProfile) -> Result<f64> {
    let minimum = global_minimum(eff)?;
    let f = eff.surface.radius(minimum.u0)?;
    let d2w = eff.d2w(minimum.u0)?;
    if d2w <= 0.0 {
        return Err(Error::DegenerateCircular(
            "W'' <= 0 at the minimum".to_string(),
        ));
    }
    // omega_r = sqrt(W''/m), omega_phi = l/(m f^2): delta_phi = 2 pi omega_phi / omega_r
    Ok(2.0 * PI * eff.l / (f * f * (eff.m * d2w).sqrt()))
}
