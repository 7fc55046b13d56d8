use crate::error::{Error, Result};
use crate::geometry::SurfaceOfRevolution;
use crate::numeric;
use crate::potentials::CentralPotential;
use std::sync::Arc;

/// Cells used when scanning W' for critical points.
const SCAN_CELLS: usize = 2048;

/// The effective radial potential W(u) = l^2/(2 m f(u)^2) + V(u) with
/// closed-form first and second derivatives.
#[derive(Debug, Clone)]
pub struct EffectiveProfile {
    pub surface: Arc<SurfaceOfRevolution>,
    pub potential: Arc<CentralPotential>,
    pub l: f64,
    pub m: f64,
}

impl EffectiveProfile {
    pub fn new(
        surface: &Arc<SurfaceOfRevolution>,
        potential: &Arc<CentralPotential>,
        l: f64,
        m: f64,
    ) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {m}"
            )));
        }
        Ok(EffectiveProfile {
            surface: Arc::clone(surface),
            potential: Arc::clone(potential),
            l,
            m,
        })
    }

    pub fn w(&self, u: f64) -> Result<f64> {
        let f = self.surface.radius(u)?;
        Ok(self.l * self.l / (2.0 * self.m * f * f) + self.potential.v(u)?)
    }

    /// W' = -l^2 f'/(m f^3) + V'.
    pub fn dw(&self, u: f64) -> Result<f64> {
        let f = self.surface.radius(u)?;
        let df = self.surface.df(u)?;
        Ok(-self.l * self.l * df / (self.m * f * f * f) + self.potential.dv(u)?)
    }

    /// W'' = -l^2 (f'' f - 3 f'^2)/(m f^4) + V''.
    pub fn d2w(&self, u: f64) -> Result<f64> {
        let f = self.surface.radius(u)?;
        let df = self.surface.df(u)?;
        let d2f = self.surface.d2f(u)?;
        Ok(-self.l * self.l * (d2f * f - 3.0 * df * df) / (self.m * f * f * f * f)
            + self.potential.d2v(u)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Minimum,
    Maximum,
    Degenerate,
}

#[derive(Debug, Clone, Copy)]
pub struct CircularOrbit {
    pub u0: f64,
    pub l: f64,
    pub energy: f64,
    pub kind: CriticalKind,
}

/// All critical points of W in the sample window, found by a sign-change
/// scan of W' refined by bisection and labelled by the sign of W''.
/// An empty list means no circular orbit was found; that outcome is
/// reported, not an error.
pub fn circular_orbits(eff: &EffectiveProfile) -> Result<Vec<CircularOrbit>> {
    let (a, b) = eff.surface.domain.sample_window();
    let dw = |u: f64| eff.dw(u).ok();
    let roots = numeric::scan_roots(&dw, a, b, SCAN_CELLS);
    let mut orbits = Vec::with_capacity(roots.len());
    for u0 in roots {
        let energy = eff.w(u0)?;
        let d2 = eff.d2w(u0)?;
        let tol = 1e-8 * (1.0 + energy.abs());
        let kind = if d2.abs() <= tol {
            CriticalKind::Degenerate
        } else if d2 > 0.0 {
            CriticalKind::Minimum
        } else {
            CriticalKind::Maximum
        };
        orbits.push(CircularOrbit {
            u0,
            l: eff.l,
            energy,
            kind,
        });
    }
    Ok(orbits)
}

/// The angular momentum that makes u0 a circular orbit:
/// l^2 = m f^3(u0) V'(u0) / f'(u0).
pub fn circular_momentum_squared(
    surface: &SurfaceOfRevolution,
    potential: &CentralPotential,
    u0: f64,
    m: f64,
) -> Result<f64> {
    let f = surface.radius(u0)?;
    let df = surface.df(u0)?;
    if df == 0.0 {
        return Err(Error::DegenerateCircular(format!(
            "f'(u0) = 0 at u0 = {u0}"
        )));
    }
    let l2 = m * f * f * f * potential.dv(u0)? / df;
    if l2 < 0.0 {
        return Err(Error::DegenerateCircular(format!(
            "m f^3 V'/f' = {l2} < 0 at u0 = {u0}: no circular orbit there"
        )));
    }
    Ok(l2)
}

/// The stable circular orbit with the lowest energy (ties broken toward
/// smaller u0).
pub fn global_minimum(eff: &EffectiveProfile) -> Result<CircularOrbit> {
    circular_orbits(eff)?
        .into_iter()
        .filter(|c| c.kind == CriticalKind::Minimum)
        .min_by(|a, b| {
            a.energy
                .partial_cmp(&b.energy)
                .unwrap()
                .then(a.u0.partial_cmp(&b.u0).unwrap())
        })
        .ok_or_else(|| {
            Error::DegenerateCircular("effective potential has no minimum".to_string())
        })
}

/// The two roots of W(u) = E bracketing the global minimum.
pub fn turning_points(eff: &EffectiveProfile, energy: f64) -> Result<(f64, f64)> {
    let minimum = global_minimum(eff)?;
    turning_points_around(eff, minimum.u0, energy)
}

/// Roots of W(u) = E nearest to the critical point u0, one on each side.
/// Works for minima (E > W(u0), an oscillation) and maxima (E < W(u0),
/// the barrier crossed by the Abel integral).
pub fn turning_points_around(
    eff: &EffectiveProfile,
    u0: f64,
    energy: f64,
) -> Result<(f64, f64)> {
    let w0 = eff.w(u0)?;
    let gap = energy - w0;
    if gap.abs() <= 4.0 * f64::EPSILON * (1.0 + energy.abs()) {
        return Ok((u0, u0));
    }
    let (a, b) = eff.surface.domain.sample_window();
    let start_sign = gap > 0.0;
    if !start_sign {
        // below the critical value is only meaningful around a maximum
        if eff.d2w(u0)? > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "energy {energy} lies below the minimum W(u0) = {w0}"
            )));
        }
    }

    let u1 = march_for_root(eff, u0, a, eff.surface.domain.lo_kind, energy, start_sign, "inner")?;
    let u2 = march_for_root(eff, u0, b, eff.surface.domain.hi_kind, energy, start_sign, "outer")?;
    Ok((u1, u2))
}

/// Walk from u0 toward `end` until W - E changes sign, then bisect. When
/// the domain is infinite on that side the march continues past the sample
/// window in doubling segments, so bound orbits larger than the window are
/// still resolved.
fn march_for_root(
    eff: &EffectiveProfile,
    u0: f64,
    end: f64,
    end_kind: crate::geometry::EndpointKind,
    energy: f64,
    start_positive: bool,
    side: &'static str,
) -> Result<f64> {
    let value = |u: f64| eff.w(u).ok().map(|w| energy - w);
    let signed = |x: f64| value(x).map(|v| if start_positive { v } else { -v });
    let mut prev = u0;
    let mut seg_start = u0;
    let mut seg_end = end;
    for _segment in 0..40 {
        let step = (seg_end - seg_start) / SCAN_CELLS as f64;
        for i in 1..=SCAN_CELLS {
            let u = seg_start + step * i as f64;
            match value(u) {
                Some(v) => {
                    if (v > 0.0) != start_positive || v == 0.0 {
                        return Ok(numeric::bisect(&signed, prev, u));
                    }
                    prev = u;
                }
                // evaluation failed (pole or singular ring): the well is
                // open on this side at this energy
                None => return Err(Error::Unbound { side }),
            }
        }
        if !matches!(end_kind, crate::geometry::EndpointKind::Infinite) {
            break;
        }
        let width = (seg_end - seg_start) * 2.0;
        seg_start = seg_end;
        seg_end += width;
    }
    Err(Error::Unbound { side })
}

/// Logarithmically spaced energies above the minimum, up to 0.9 times the
/// confining barrier. The barrier is the smaller of the two largest W
/// values seen on either side of the minimum within the sample window.
pub fn energy_grid(eff: &EffectiveProfile, minimum: &CircularOrbit, n: usize) -> Result<Vec<f64>> {
    let (a, b) = eff.surface.domain.sample_window();
    let w0 = minimum.energy;
    let mut left = f64::NEG_INFINITY;
    let mut right = f64::NEG_INFINITY;
    let grid = 513;
    for i in 0..grid {
        let u = a + (b - a) * i as f64 / (grid - 1) as f64;
        if let Ok(w) = eff.w(u) {
            if u < minimum.u0 {
                left = left.max(w);
            } else if u > minimum.u0 {
                right = right.max(w);
            }
        }
    }
    let barrier = left.min(right);
    if !barrier.is_finite() || barrier <= w0 {
        return Err(Error::Unbound { side: "both" });
    }
    let span = barrier - w0;
    let lo = 1e-3 * span;
    let hi = 0.9 * span;
    let count = n.max(2);
    Ok((0..count)
        .map(|j| {
            let t = j as f64 / (count - 1) as f64;
            w0 + lo * (hi / lo).powf(t)
        })
        .collect())
}
