//! Surfaces of revolution described by a unit-speed profile curve.
//!
//! A surface is the rotation of the profile (f(u), 0, g(u)) about the z
//! axis, with u arclength along the profile so that f'(u)^2 + g'(u)^2 = 1.
//! Everything downstream — curvature, the invariant h(u) = -f f'' + f'^2,
//! the antiderivative theta of 1/f^2, and the embedding — is derived from
//! f and its first three derivatives.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tolerance for deciding that h(u) is identically constant.
pub const TOL_H: f64 = 1e-9;
/// Absolute tolerance used when integrating theta and g.
pub const QUAD_TOL: f64 = 1e-10;
/// |b^2| below this counts as the degenerate b = 0 family.
pub const B_SQUARED_EPS: f64 = 1e-12;

const H_CHECK_SEED: u64 = 0x5eed_b2c0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointKind {
    Closed,
    Open,
    Infinite,
}

#[derive(Debug, Clone, Copy)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_kind: EndpointKind,
    pub hi_kind: EndpointKind,
}

impl Domain {
    fn finite(lo: f64, hi: f64) -> Self {
        Domain {
            lo,
            hi,
            lo_kind: EndpointKind::Closed,
            hi_kind: EndpointKind::Closed,
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        let lo_ok = match self.lo_kind {
            EndpointKind::Closed => u >= self.lo,
            EndpointKind::Open => u > self.lo,
            EndpointKind::Infinite => true,
        };
        let hi_ok = match self.hi_kind {
            EndpointKind::Closed => u <= self.hi,
            EndpointKind::Open => u < self.hi,
            EndpointKind::Infinite => true,
        };
        lo_ok && hi_ok
    }

    pub fn interior_contains(&self, u: f64) -> bool {
        let lo_ok = matches!(self.lo_kind, EndpointKind::Infinite) || u > self.lo;
        let hi_ok = matches!(self.hi_kind, EndpointKind::Infinite) || u < self.hi;
        lo_ok && hi_ok && u.is_finite()
    }

    /// Deterministic interior reference point: the midpoint for finite
    /// domains, one unit inside the finite end for half-infinite ones.
    pub fn reference(&self) -> f64 {
        match (self.lo_kind, self.hi_kind) {
            (EndpointKind::Infinite, EndpointKind::Infinite) => 0.0,
            (EndpointKind::Infinite, _) => self.hi - 1.0,
            (_, EndpointKind::Infinite) => self.lo + 1.0,
            _ => 0.5 * (self.lo + self.hi),
        }
    }

    /// Finite window used for grids, scans and random sampling. Infinite
    /// ends are truncated four units from the reference point and both
    /// ends are inset by 1% of the span: near a pole f -> 0 and the
    /// 1/f^2 terms amplify rounding past any absolute tolerance.
    pub fn sample_window(&self) -> (f64, f64) {
        let r = self.reference();
        let a = if matches!(self.lo_kind, EndpointKind::Infinite) {
            r - 4.0
        } else {
            self.lo
        };
        let b = if matches!(self.hi_kind, EndpointKind::Infinite) {
            r + 4.0
        } else {
            self.hi
        };
        let inset = 1e-2 * (b - a);
        (a + inset, b - inset)
    }

    fn g_base(&self) -> f64 {
        if !matches!(self.lo_kind, EndpointKind::Infinite) {
            self.lo
        } else if !matches!(self.hi_kind, EndpointKind::Infinite) {
            self.hi
        } else {
            self.reference()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceClass {
    Spherical,
    Hyperboloidal,
    Toroidal,
    Paraboloidal,
}

impl std::fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SurfaceClass::Spherical => "Spherical",
            SurfaceClass::Hyperboloidal => "Hyperboloidal",
            SurfaceClass::Toroidal => "Toroidal",
            SurfaceClass::Paraboloidal => "Paraboloidal",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ThetaForm {
    /// Theta pinned to -f'/(b^2 f), the antiderivative that exists exactly
    /// when h is a nonzero constant b^2.
    ClosedForm,
    /// Quadrature of 1/f^2 from `u_ref` plus an additive constant.
    Quadrature { u_ref: f64, constant: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EmbeddedPoint {
    pub fn distance(&self, other: &EmbeddedPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

#[derive(Debug, Clone)]
enum ProfileKind {
    /// K > 0: f = c1 cos(s u) + c2 sin(s u); K < 0: f = c1 e^{s u} + c2 e^{-s u};
    /// K = 0: f = c1 u + c2 (s = sqrt|K|).
    ConstantCurvature { curvature: f64, c1: f64, c2: f64 },
    /// f = major + minor cos(u / minor), u in [0, 2 pi minor].
    Torus { major: f64, minor: f64 },
    /// Parsed profile with pre-differentiated trees for f', f'', f'''.
    Custom {
        f: Box<Expr>,
        d1: Box<Expr>,
        d2: Box<Expr>,
        d3: Box<Expr>,
    },
}

#[derive(Debug, Clone)]
pub struct SurfaceOfRevolution {
    profile: ProfileKind,
    pub domain: Domain,
    pub class: SurfaceClass,
    pub theta_form: ThetaForm,
    pub b_squared: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct ConstancyCheck {
    pub constant: bool,
    pub mean: f64,
    pub spread: f64,
}

impl SurfaceOfRevolution {
    // ----- profile evaluation -------------------------------------------

    pub fn f(&self, u: f64) -> Result<f64> {
        match &self.profile {
            ProfileKind::ConstantCurvature { curvature, c1, c2 } => {
                Ok(const_curv_f(*curvature, *c1, *c2, u, 0))
            }
            ProfileKind::Torus { major, minor } => Ok(major + minor * (u / minor).cos()),
            ProfileKind::Custom { f, .. } => f.eval(u),
        }
    }

    pub fn df(&self, u: f64) -> Result<f64> {
        match &self.profile {
            ProfileKind::ConstantCurvature { curvature, c1, c2 } => {
                Ok(const_curv_f(*curvature, *c1, *c2, u, 1))
            }
            ProfileKind::Torus { minor, .. } => Ok(-(u / minor).sin()),
            ProfileKind::Custom { d1, .. } => d1.eval(u),
        }
    }

    pub fn d2f(&self, u: f64) -> Result<f64> {
        match &self.profile {
            ProfileKind::ConstantCurvature { curvature, c1, c2 } => {
                Ok(const_curv_f(*curvature, *c1, *c2, u, 2))
            }
            ProfileKind::Torus { minor, .. } => Ok(-(u / minor).cos() / minor),
            ProfileKind::Custom { d2, .. } => d2.eval(u),
        }
    }

    pub fn d3f(&self, u: f64) -> Result<f64> {
        match &self.profile {
            ProfileKind::ConstantCurvature { curvature, c1, c2 } => {
                Ok(const_curv_f(*curvature, *c1, *c2, u, 3))
            }
            ProfileKind::Torus { minor, .. } => Ok((u / minor).sin() / (minor * minor)),
            ProfileKind::Custom { d3, .. } => d3.eval(u),
        }
    }

    /// The built-in torus profile is periodic and the surface closed, so
    /// every finite u is valid; the stored domain is one period.
    fn is_periodic(&self) -> bool {
        matches!(self.profile, ProfileKind::Torus { .. })
    }

    fn check_interior(&self, u: f64) -> Result<()> {
        if self.domain.interior_contains(u) || (self.is_periodic() && u.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain {
                u,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    fn check_in_domain(&self, u: f64) -> Result<()> {
        if self.domain.contains(u) || (self.is_periodic() && u.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain {
                u,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    /// f(u) with the domain-interior and positivity checks most operations
    /// share.
    pub fn radius(&self, u: f64) -> Result<f64> {
        self.check_interior(u)?;
        let fv = self.f(u)?;
        if fv <= 0.0 {
            return Err(Error::SingularPoint { u });
        }
        Ok(fv)
    }

    // ----- curvature and the h invariant --------------------------------

    /// Gaussian curvature K = -f''/f.
    pub fn gaussian_curvature(&self, u: f64) -> Result<f64> {
        let fv = self.radius(u)?;
        Ok(-self.d2f(u)? / fv)
    }

    /// h(u) = -f(u) f''(u) + f'(u)^2.
    pub fn h(&self, u: f64) -> Result<f64> {
        self.check_interior(u)?;
        let fv = self.f(u)?;
        let d1 = self.df(u)?;
        let d2 = self.d2f(u)?;
        Ok(-fv * d2 + d1 * d1)
    }

    /// h'(u) = f' f'' - f f'''.
    pub fn h_prime(&self, u: f64) -> Result<f64> {
        self.check_interior(u)?;
        Ok(self.df(u)? * self.d2f(u)? - self.f(u)? * self.d3f(u)?)
    }

    /// Samples h on a uniform grid over the sample window and reports
    /// whether max - min stays below TOL_H * (1 + |mean|).
    pub fn h_constancy(&self, grid: usize) -> Result<ConstancyCheck> {
        let (a, b) = self.domain.sample_window();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let n = grid.max(2);
        for i in 0..n {
            let u = a + (b - a) * i as f64 / (n - 1) as f64;
            let h = self.h(u)?;
            min = min.min(h);
            max = max.max(h);
            sum += h;
        }
        let mean = sum / n as f64;
        Ok(ConstancyCheck {
            constant: max - min <= TOL_H * (1.0 + mean.abs()),
            mean,
            spread: max - min,
        })
    }

    /// Verifies the stored b^2 against h(u) on 512 uniform plus 512
    /// seeded-random points.
    pub fn validate_b_squared(&self, seed: u64) -> Result<()> {
        let b2 = match self.b_squared {
            Some(v) => v,
            None => return Ok(()),
        };
        let (a, b) = self.domain.sample_window();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for i in 0..1024 {
            let u = if i < 512 {
                a + (b - a) * i as f64 / 511.0
            } else {
                rng.gen_range(a..b)
            };
            worst = worst.max((self.h(u)? - b2).abs());
        }
        if worst > TOL_H * (1.0 + b2.abs()) {
            return Err(Error::InvalidSurface(format!(
                "stored b^2 = {b2} deviates from h(u) by {worst:.3e}"
            )));
        }
        Ok(())
    }

    // ----- theta ----------------------------------------------------------

    /// The antiderivative of 1/f^2 used by both generalized potentials.
    pub fn theta(&self, u: f64) -> Result<f64> {
        let fv = self.radius(u)?;
        match self.theta_form {
            ThetaForm::ClosedForm => {
                let b2 = self.b_squared.expect("closed-form theta requires b^2");
                Ok(-self.df(u)? / (b2 * fv))
            }
            ThetaForm::Quadrature { u_ref, constant } => {
                let integrand = |s: f64| match self.f(s) {
                    Ok(fs) if fs > 0.0 => 1.0 / (fs * fs),
                    _ => f64::NAN,
                };
                let v = numeric::integrate(&integrand, u_ref, u, QUAD_TOL)?;
                if !v.is_finite() {
                    return Err(Error::SingularPoint { u });
                }
                Ok(v + constant)
            }
        }
    }

    /// theta'(u) = 1/f^2.
    pub fn theta_d1(&self, u: f64) -> Result<f64> {
        let fv = self.radius(u)?;
        Ok(1.0 / (fv * fv))
    }

    /// theta''(u) = -2 f'/f^3.
    pub fn theta_d2(&self, u: f64) -> Result<f64> {
        let fv = self.radius(u)?;
        Ok(-2.0 * self.df(u)? / (fv * fv * fv))
    }

    /// Replace the additive constant of a quadrature-form theta.
    pub fn set_theta_constant(&mut self, constant: f64) -> Result<()> {
        match &mut self.theta_form {
            ThetaForm::Quadrature { constant: c, .. } => {
                *c = constant;
                Ok(())
            }
            ThetaForm::ClosedForm => Err(Error::InvalidParameter(
                "theta is pinned in closed form on constant-h surfaces".into(),
            )),
        }
    }

    /// Invert the strictly increasing theta on the surface domain. The
    /// bracket starts at the sample window and expands outward: doubling
    /// toward infinite ends, geometrically approaching finite ends (where
    /// theta may still diverge at a pole).
    pub fn invert_theta(&self, target: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.domain.sample_window();
        let r = self.domain.reference();
        let theta_at = |u: f64| self.theta(u).ok();

        let mut lo_val = theta_at(lo);
        for step in 0.. {
            match lo_val {
                Some(v) if v <= target => break,
                _ if step > 200 => return Err(Error::Range { value: target }),
                _ => {}
            }
            lo = if matches!(self.domain.lo_kind, EndpointKind::Infinite) {
                r - 2.0 * (r - lo)
            } else {
                let gap = lo - self.domain.lo;
                if gap < 4.0 * f64::EPSILON * (1.0 + self.domain.lo.abs()) {
                    return Err(Error::Range { value: target });
                }
                self.domain.lo + 0.25 * gap
            };
            lo_val = theta_at(lo);
        }
        let mut hi_val = theta_at(hi);
        for step in 0.. {
            match hi_val {
                Some(v) if v >= target => break,
                _ if step > 200 => return Err(Error::Range { value: target }),
                _ => {}
            }
            hi = if matches!(self.domain.hi_kind, EndpointKind::Infinite) {
                r + 2.0 * (hi - r)
            } else {
                let gap = self.domain.hi - hi;
                if gap < 4.0 * f64::EPSILON * (1.0 + self.domain.hi.abs()) {
                    return Err(Error::Range { value: target });
                }
                self.domain.hi - 0.25 * gap
            };
            hi_val = theta_at(hi);
        }
        Ok(numeric::bisect(
            &|u| self.theta(u).ok().map(|v| v - target),
            lo,
            hi,
        ))
    }

    // ----- embedding ------------------------------------------------------

    /// g(u) = sign * integral of sqrt(1 - f'^2) from the domain base point.
    pub fn g(&self, u: f64, sign: Sign) -> Result<f64> {
        self.check_in_domain(u)?;
        let base = self.domain.g_base();
        let integrand = |s: f64| match self.df(s) {
            Ok(d) => {
                let w = 1.0 - d * d;
                if w < -1e-9 {
                    f64::NAN
                } else {
                    w.max(0.0).sqrt()
                }
            }
            Err(_) => f64::NAN,
        };
        let v = numeric::integrate(&integrand, base, u, QUAD_TOL)?;
        if !v.is_finite() {
            return Err(Error::NonEmbeddable { u });
        }
        Ok(sign.factor() * v)
    }

    /// The point (f cos phi, f sin phi, g) in R^3.
    pub fn embed(&self, u: f64, phi: f64) -> Result<EmbeddedPoint> {
        self.check_in_domain(u)?;
        let fv = self.f(u)?;
        let z = self.g(u, Sign::Plus)?;
        Ok(EmbeddedPoint {
            x: fv * phi.cos(),
            y: fv * phi.sin(),
            z,
        })
    }

    // ----- constructors ---------------------------------------------------

    /// The constant-curvature families: trigonometric for K > 0,
    /// exponential for K < 0, linear for K = 0, with the domain clipped to
    /// the maximal interval where f > 0 and f'^2 <= 1.
    pub fn constant_curvature(curvature: f64, c1: f64, c2: f64) -> Result<Self> {
        let (domain, class, b_squared) = if curvature > 0.0 {
            positive_curvature_domain(curvature, c1, c2)?
        } else if curvature < 0.0 {
            negative_curvature_domain(curvature, c1, c2)?
        } else {
            flat_domain(c1, c2)?
        };

        let theta_form = if b_squared.abs() > B_SQUARED_EPS {
            ThetaForm::ClosedForm
        } else {
            ThetaForm::Quadrature {
                u_ref: domain.reference(),
                constant: 0.0,
            }
        };

        let surface = SurfaceOfRevolution {
            profile: ProfileKind::ConstantCurvature { curvature, c1, c2 },
            domain,
            class,
            theta_form,
            b_squared: Some(b_squared),
        };
        surface.validate_b_squared(H_CHECK_SEED)?;
        Ok(surface)
    }

    /// Torus of revolution with f = major + minor cos(u/minor); the u/minor
    /// argument keeps the profile unit speed for any minor radius.
    pub fn torus(major: f64, minor: f64) -> Result<Self> {
        if !(minor > 0.0) || !(major > minor) {
            return Err(Error::InvalidSurface(format!(
                "torus requires major > minor > 0, got major = {major}, minor = {minor}"
            )));
        }
        let domain = Domain::finite(0.0, 2.0 * std::f64::consts::PI * minor);
        Ok(SurfaceOfRevolution {
            profile: ProfileKind::Torus { major, minor },
            domain,
            class: SurfaceClass::Toroidal,
            theta_form: ThetaForm::Quadrature {
                u_ref: std::f64::consts::PI * minor,
                constant: 0.0,
            },
            b_squared: None,
        })
    }

    /// Build a surface from a parsed profile expression on [c, d], clipping
    /// to the maximal valid interval around the midpoint and classifying by
    /// endpoint behaviour.
    pub fn custom(f_expr: &str, domain: (f64, f64)) -> Result<Self> {
        let (c, d) = domain;
        if !(c.is_finite() && d.is_finite() && c < d) {
            return Err(Error::InvalidSurface(format!(
                "custom surface domain [{c}, {d}] must be finite and nonempty"
            )));
        }
        let f = Expr::parse(f_expr)?;
        let d1 = f.diff();
        let d2 = d1.diff();
        let d3 = d2.diff();

        let valid = |u: f64| -> bool {
            match (f.eval(u), d1.eval(u)) {
                (Ok(fv), Ok(dv)) => fv > 0.0 && dv * dv <= 1.0 + 1e-12,
                _ => false,
            }
        };

        let mid = 0.5 * (c + d);
        if !valid(mid) {
            return Err(Error::InvalidSurface(format!(
                "profile `{f_expr}` is not positive unit-speed at the domain midpoint {mid}"
            )));
        }

        // March outward from the midpoint on a fine grid, then refine the
        // first invalid crossing on each side.
        let cells = 4096;
        let step = (d - c) / cells as f64;
        let mut lo = c;
        let mut u = mid;
        while u - step >= c - 0.5 * step {
            let next = (u - step).max(c);
            if !valid(next) {
                lo = refine_boundary(u, next, &valid);
                break;
            }
            u = next;
            if u <= c {
                break;
            }
        }
        let mut hi = d;
        u = mid;
        while u + step <= d + 0.5 * step {
            let next = (u + step).min(d);
            if !valid(next) {
                hi = refine_boundary(u, next, &valid);
                break;
            }
            u = next;
            if u >= d {
                break;
            }
        }

        let domain = Domain::finite(lo, hi);
        let f_lo = f.eval(lo).unwrap_or(0.0);
        let f_hi = f.eval(hi).unwrap_or(0.0);
        let d_lo = d1.eval(lo).unwrap_or(f64::NAN);
        let d_hi = d1.eval(hi).unwrap_or(f64::NAN);
        let scale = 1.0 + f_lo.abs().max(f_hi.abs());
        let tol = 1e-9 * scale;
        let class = if f_lo.abs() <= tol && f_hi.abs() <= tol {
            SurfaceClass::Spherical
        } else if f_lo.abs() <= tol || f_hi.abs() <= tol {
            SurfaceClass::Paraboloidal
        } else if (f_lo - f_hi).abs() <= tol && (d_lo - d_hi).abs() <= tol {
            SurfaceClass::Toroidal
        } else {
            SurfaceClass::Hyperboloidal
        };

        let mut surface = SurfaceOfRevolution {
            profile: ProfileKind::Custom {
                f: Box::new(f),
                d1: Box::new(d1),
                d2: Box::new(d2),
                d3: Box::new(d3),
            },
            domain,
            class,
            theta_form: ThetaForm::Quadrature {
                u_ref: domain.reference(),
                constant: 0.0,
            },
            b_squared: None,
        };

        // Detected constant h pins theta in closed form, exactly as for the
        // built-in constant-curvature families.
        let check = surface.h_constancy(512)?;
        if check.constant {
            surface.b_squared = Some(check.mean);
            if check.mean.abs() > B_SQUARED_EPS {
                surface.theta_form = ThetaForm::ClosedForm;
            }
            surface.validate_b_squared(H_CHECK_SEED)?;
        }
        Ok(surface)
    }
}

fn const_curv_f(curvature: f64, c1: f64, c2: f64, u: f64, order: u8) -> f64 {
    if curvature > 0.0 {
        let s = curvature.sqrt();
        let (sin, cos) = (s * u).sin_cos();
        match order {
            0 => c1 * cos + c2 * sin,
            1 => s * (-c1 * sin + c2 * cos),
            2 => -curvature * (c1 * cos + c2 * sin),
            _ => -curvature * s * (-c1 * sin + c2 * cos),
        }
    } else if curvature < 0.0 {
        let s = (-curvature).sqrt();
        let ep = (s * u).exp();
        let em = (-s * u).exp();
        match order {
            0 => c1 * ep + c2 * em,
            1 => s * (c1 * ep - c2 * em),
            2 => s * s * (c1 * ep + c2 * em),
            _ => s * s * s * (c1 * ep - c2 * em),
        }
    } else {
        match order {
            0 => c1 * u + c2,
            1 => c1,
            _ => 0.0,
        }
    }
}

fn positive_curvature_domain(k: f64, c1: f64, c2: f64) -> Result<(Domain, SurfaceClass, f64)> {
    let s = k.sqrt();
    let amp = (c1 * c1 + c2 * c2).sqrt();
    if amp == 0.0 {
        return Err(Error::InvalidSurface("profile is identically zero".into()));
    }
    // f = amp * sin(s u + delta); positive on the branch (0, pi).
    let delta = c1.atan2(c2);
    let b_squared = k * amp * amp;
    if s * amp <= 1.0 + 1e-12 {
        let lo = -delta / s;
        let hi = (std::f64::consts::PI - delta) / s;
        Ok((Domain::finite(lo, hi), SurfaceClass::Spherical, b_squared))
    } else {
        // |f'| <= 1 only near the apex: clip to |cos(s u + delta)| <= 1/(s amp)
        let angle = (1.0 / (s * amp)).acos();
        let lo = (angle - delta) / s;
        let hi = (std::f64::consts::PI - angle - delta) / s;
        Ok((
            Domain::finite(lo, hi),
            SurfaceClass::Hyperboloidal,
            b_squared,
        ))
    }
}

fn flat_domain(c1: f64, c2: f64) -> Result<(Domain, SurfaceClass, f64)> {
    if c1.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidSurface(format!(
            "linear profile slope {c1} exceeds unit speed everywhere"
        )));
    }
    if c1 == 0.0 {
        if c2 <= 0.0 {
            return Err(Error::InvalidSurface("cylinder radius must be positive".into()));
        }
        let domain = Domain {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_kind: EndpointKind::Infinite,
            hi_kind: EndpointKind::Infinite,
        };
        return Ok((domain, SurfaceClass::Hyperboloidal, 0.0));
    }
    let zero = -c2 / c1;
    let domain = if c1 > 0.0 {
        Domain {
            lo: zero,
            hi: f64::INFINITY,
            lo_kind: EndpointKind::Closed,
            hi_kind: EndpointKind::Infinite,
        }
    } else {
        Domain {
            lo: f64::NEG_INFINITY,
            hi: zero,
            lo_kind: EndpointKind::Infinite,
            hi_kind: EndpointKind::Closed,
        }
    };
    Ok((domain, SurfaceClass::Paraboloidal, c1 * c1))
}

fn negative_curvature_domain(k: f64, c1: f64, c2: f64) -> Result<(Domain, SurfaceClass, f64)> {
    let s = (-k).sqrt();
    let b_squared = 4.0 * k * c1 * c2;
    if c1 == 0.0 && c2 == 0.0 {
        return Err(Error::InvalidSurface("profile is identically zero".into()));
    }
    if c1 < 0.0 && c2 < 0.0 {
        return Err(Error::InvalidSurface("profile is negative everywhere".into()));
    }

    let domain_class = if c1 >= 0.0 && c2 >= 0.0 {
        // positive everywhere; clip |f'| <= 1
        if c1 > 0.0 && c2 > 0.0 {
            let disc = (1.0 + 4.0 * s * s * c1 * c2).sqrt();
            let x_hi = (1.0 + disc) / (2.0 * s * c1);
            let x_lo = (-1.0 + disc) / (2.0 * s * c1);
            (
                Domain::finite(x_lo.ln() / s, x_hi.ln() / s),
                SurfaceClass::Hyperboloidal,
            )
        } else if c1 > 0.0 {
            // f = c1 e^{s u}: the pseudosphere family
            let hi = (1.0 / (s * c1)).ln() / s;
            (
                Domain {
                    lo: f64::NEG_INFINITY,
                    hi,
                    lo_kind: EndpointKind::Infinite,
                    hi_kind: EndpointKind::Closed,
                },
                SurfaceClass::Hyperboloidal,
            )
        } else {
            let lo = (s * c2).ln() / s;
            (
                Domain {
                    lo,
                    hi: f64::INFINITY,
                    lo_kind: EndpointKind::Closed,
                    hi_kind: EndpointKind::Infinite,
                },
                SurfaceClass::Hyperboloidal,
            )
        }
    } else {
        // mixed signs: f has a single zero; the surface meets the axis there
        // with slope |f'| = b, so it embeds only when b < 1.
        let b = b_squared.sqrt();
        if !(b < 1.0 - 1e-12) {
            return Err(Error::InvalidSurface(format!(
                "profile touches the axis with slope b = {b:.6} >= 1; clip interval is empty"
            )));
        }
        let disc = (1.0 - b_squared).sqrt();
        if c1 < 0.0 {
            // f > 0 for u < u_zero
            let u_zero = (c2 / -c1).ln() / (2.0 * s);
            let x = (1.0 - disc) / (2.0 * s * -c1);
            (
                Domain::finite(x.ln() / s, u_zero),
                SurfaceClass::Paraboloidal,
            )
        } else {
            // f > 0 for u > u_zero
            let u_zero = (-c2 / c1).ln() / (2.0 * s);
            let x = (1.0 + disc) / (2.0 * s * c1);
            (
                Domain::finite(u_zero, x.ln() / s),
                SurfaceClass::Paraboloidal,
            )
        }
    };

    let (domain, class) = domain_class;
    if !(domain.lo < domain.hi) {
        return Err(Error::InvalidSurface(
            "clip interval for unit speed is empty".into(),
        ));
    }
    Ok((domain, class, b_squared))
}

fn refine_boundary(good: f64, bad: f64, valid: &impl Fn(f64) -> bool) -> f64 {
    let mut good = good;
    let mut bad = bad;
    for _ in 0..80 {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if valid(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Stock surfaces used throughout the tests, CLI and demo.
pub mod catalog {
    use super::*;

    /// Unit sphere: f = sin u on [0, pi], b^2 = 1.
    pub fn sphere() -> SurfaceOfRevolution {
        SurfaceOfRevolution::constant_curvature(1.0, 0.0, 1.0).expect("unit sphere is valid")
    }

    /// Euclidean plane in polar form: f = u on [0, inf), b^2 = 1.
    pub fn plane() -> SurfaceOfRevolution {
        SurfaceOfRevolution::constant_curvature(0.0, 1.0, 0.0).expect("plane is valid")
    }

    /// Torus with f = 2 + cos u.
    pub fn torus() -> SurfaceOfRevolution {
        SurfaceOfRevolution::torus(2.0, 1.0).expect("standard torus is valid")
    }

    /// Pseudosphere: f = e^u on (-inf, 0], b^2 = 0.
    pub fn pseudosphere() -> SurfaceOfRevolution {
        SurfaceOfRevolution::constant_curvature(-1.0, 1.0, 0.0).expect("pseudosphere is valid")
    }

    /// Spindle with K = 1 and b = 1/2: f = sin(u)/2 on [0, pi]. Bound orbits
    /// of the generalized Kepler potential wind around it twice.
    pub fn spindle_half() -> SurfaceOfRevolution {
        SurfaceOfRevolution::constant_curvature(1.0, 0.0, 0.5).expect("spindle is valid")
    }

    /// The K = -1 horn with c1 = -1/2, c2 = 1/8 (b = 1/2).
    pub fn horn_half() -> SurfaceOfRevolution {
        SurfaceOfRevolution::constant_curvature(-1.0, -0.5, 0.125).expect("horn is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;
    use std::f64::consts::PI;

    // Independent adaptive Simpson oracle for cross-checking quadrature.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let mid = 0.5 * (a + b);
            let left = simpson_rule(f, a, mid);
            let right = simpson_rule(f, mid, b);
            if depth > 40 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, mid, left, 0.5 * tol, depth + 1)
                    + recurse(f, mid, b, right, 0.5 * tol, depth + 1)
            }
        }
        recurse(f, a, b, simpson_rule(f, a, b), tol, 0)
    }

    #[test]
    fn gaussian_curvature_examples() {
        assert!((sphere().gaussian_curvature(PI / 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(plane().gaussian_curvature(2.0).unwrap().abs() < 1e-12);
        // torus: K = cos u / (2 + cos u), so K(0) = 1/3
        assert!((torus().gaussian_curvature(0.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(
            sphere().gaussian_curvature(5.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn h_examples() {
        assert!((sphere().h(0.7).unwrap() - 1.0).abs() < 1e-12);
        assert!((plane().h(3.3).unwrap() - 1.0).abs() < 1e-12);
        // torus: h(u) = 1 + 2 cos u, so h(pi/2) = 1
        assert!((torus().h(PI / 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((torus().h(0.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn theta_closed_form_examples() {
        assert!(sphere().theta(PI / 2.0).unwrap().abs() < 1e-12);
        assert!((sphere().theta(PI / 4.0).unwrap() + 1.0).abs() < 1e-12); // -cot(pi/4)
        assert!((plane().theta(2.0).unwrap() + 0.5).abs() < 1e-12); // -1/u
    }

    #[test]
    fn theta_quadrature_matches_simpson_oracle() {
        let t = torus();
        let got = t.theta(PI / 2.0 + 0.3).unwrap() - t.theta(PI / 2.0).unwrap();
        let oracle = simpson(
            &|s: f64| 1.0 / (2.0 + s.cos()).powi(2),
            PI / 2.0,
            PI / 2.0 + 0.3,
            1e-13,
        );
        assert!((got - oracle).abs() < 1e-9, "got {got}, oracle {oracle}");
    }

    #[test]
    fn theta_derivative_matches_one_over_f_squared() {
        for s in [sphere(), torus(), spindle_half(), horn_half()] {
            let (a, b) = s.domain.sample_window();
            for i in 1..20 {
                let u = a + (b - a) * i as f64 / 20.0;
                let h = 1e-4 * (b - a);
                let theta = |x: f64| s.theta(x).ok();
                let fd = numeric::fd_first(&theta, u, h).unwrap();
                let expected = s.theta_d1(u).unwrap();
                assert!(
                    (fd - expected).abs() / expected.abs() < 1e-8,
                    "dtheta/du mismatch at u={u}: fd={fd} expected={expected}"
                );
            }
        }
    }

    #[test]
    fn profile_g_examples() {
        // sphere: integral of |sin| from 0 to pi/2 is 1
        assert!((sphere().g(PI / 2.0, Sign::Plus).unwrap() - 1.0).abs() < 1e-9);
        assert!((sphere().g(PI / 2.0, Sign::Minus).unwrap() + 1.0).abs() < 1e-9);
        // plane: f' = 1 everywhere, so g = 0
        assert!(plane().g(5.0, Sign::Plus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn profile_g_matches_simpson_oracle() {
        let s = SurfaceOfRevolution::constant_curvature(1.0, 0.625, 0.375).unwrap();
        let (_, b) = s.domain.sample_window();
        let u = 0.5 * (s.domain.lo + b);
        let got = s.g(u, Sign::Plus).unwrap();
        let df = |x: f64| s.df(x).unwrap();
        let oracle = simpson(
            &|x: f64| (1.0 - df(x) * df(x)).max(0.0).sqrt(),
            s.domain.lo,
            u,
            1e-13,
        );
        assert!((got - oracle).abs() < 1e-9, "got {got}, oracle {oracle}");
    }

    #[test]
    fn constant_curvature_construction() {
        let s = sphere();
        assert_eq!(s.class, SurfaceClass::Spherical);
        assert!(s.domain.lo.abs() < 1e-12 && (s.domain.hi - PI).abs() < 1e-12);
        assert!((s.b_squared.unwrap() - 1.0).abs() < 1e-12);

        let p = plane();
        assert_eq!(p.class, SurfaceClass::Paraboloidal);
        assert!((p.b_squared.unwrap() - 1.0).abs() < 1e-12);

        let s = SurfaceOfRevolution::constant_curvature(1.0, 0.625, 0.375).unwrap();
        assert!((s.b_squared.unwrap() - 17.0 / 32.0).abs() < 1e-12);
        let (a, b) = s.domain.sample_window();
        for i in 0..100 {
            let u = a + (b - a) * i as f64 / 99.0;
            assert!((s.h(u).unwrap() - 17.0 / 32.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_curvature_families() {
        let ps = pseudosphere();
        assert!((ps.b_squared.unwrap()).abs() < 1e-15);
        assert!((ps.domain.hi - 0.0).abs() < 1e-12);
        assert!(matches!(ps.domain.lo_kind, EndpointKind::Infinite));
        for u in [-3.0, -2.0, -1.0, -0.3] {
            assert!((ps.h(u).unwrap()).abs() < 1e-12);
            assert!((ps.gaussian_curvature(u).unwrap() + 1.0).abs() < 1e-12);
        }

        let horn = horn_half();
        assert!((horn.b_squared.unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(horn.class, SurfaceClass::Paraboloidal);
        // f > 0 inside, f -> 0 at the axis end u_zero = -ln 2
        assert!((horn.domain.hi + 2.0_f64.ln()).abs() < 1e-9);
        assert!(horn.f(-1.0).unwrap() > 0.0);

        // catenoid: constant negative h
        let cat = SurfaceOfRevolution::constant_curvature(-1.0, 0.5, 0.5).unwrap();
        assert!((cat.b_squared.unwrap() + 1.0).abs() < 1e-12);
        assert!((cat.f(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((cat.domain.hi - 1.0_f64.asinh()).abs() < 1e-12);
    }

    #[test]
    fn invalid_surfaces_are_rejected() {
        // hyperbolic plane f = sinh u: embeddable only at a single point
        assert!(matches!(
            SurfaceOfRevolution::constant_curvature(-1.0, 0.5, -0.5),
            Err(Error::InvalidSurface(_))
        ));
        // slope 2 line is not unit speed anywhere
        assert!(matches!(
            SurfaceOfRevolution::constant_curvature(0.0, 2.0, 0.0),
            Err(Error::InvalidSurface(_))
        ));
        assert!(matches!(
            SurfaceOfRevolution::constant_curvature(1.0, 0.0, 0.0),
            Err(Error::InvalidSurface(_))
        ));
        assert!(SurfaceOfRevolution::torus(1.0, 2.0).is_err());
    }

    #[test]
    fn clipped_positive_curvature_barrel() {
        // f = 2 cos u clips to |u| <= pi/6 where |f'| = 1
        let s = SurfaceOfRevolution::constant_curvature(1.0, 2.0, 0.0).unwrap();
        assert_eq!(s.class, SurfaceClass::Hyperboloidal);
        assert!((s.domain.lo + PI / 6.0).abs() < 1e-12);
        assert!((s.domain.hi - PI / 6.0).abs() < 1e-12);
        assert!((s.b_squared.unwrap() - 4.0).abs() < 1e-12);
        assert!((s.df(s.domain.hi).unwrap().abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embed_examples() {
        let s = sphere();
        let p = s.embed(PI / 2.0, 0.0).unwrap();
        assert!((p.x - 1.0).abs() < 1e-9 && p.y.abs() < 1e-12 && (p.z - 1.0).abs() < 1e-9);

        let t = torus();
        let p = t.embed(0.0, PI / 2.0).unwrap();
        assert!(p.x.abs() < 1e-12 && (p.y - 3.0).abs() < 1e-12 && p.z.abs() < 1e-12);

        let a = t.embed(1.0, 0.7).unwrap();
        let b = t.embed(1.0, 0.7 + 2.0 * PI).unwrap();
        assert!(a.distance(&b) < 1e-12);
    }

    #[test]
    fn custom_surface_classification_and_theta_pinning() {
        let t = SurfaceOfRevolution::custom("2+cos(u)", (0.0, 2.0 * PI)).unwrap();
        assert_eq!(t.class, SurfaceClass::Toroidal);
        assert!(t.b_squared.is_none());

        let s = SurfaceOfRevolution::custom("sin(u)", (0.0, PI)).unwrap();
        assert_eq!(s.class, SurfaceClass::Spherical);
        let b2 = s.b_squared.expect("constant h should be detected");
        assert!((b2 - 1.0).abs() < 1e-9);
        assert!(matches!(s.theta_form, ThetaForm::ClosedForm));
        assert!((s.theta(PI / 4.0).unwrap() + 1.0).abs() < 1e-9);

        // clipping: sinh-like profile only valid where |f'| <= 1
        let c = SurfaceOfRevolution::custom("2*u*u + 0.1", (-2.0, 2.0)).unwrap();
        assert!((c.df(c.domain.hi).unwrap() - 1.0).abs() < 1e-9);
        assert!((c.df(c.domain.lo).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn stored_second_derivatives_match_finite_differences() {
        let surfaces = [sphere(), plane(), torus(), pseudosphere(), horn_half()];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in &surfaces {
            let (a, b) = s.domain.sample_window();
            for _ in 0..100 {
                let u: f64 = rng.gen_range(a..b);
                let h = 1e-4 * (1.0 + u.abs());
                let fd = (s.f(u + h).unwrap() - 2.0 * s.f(u).unwrap() + s.f(u - h).unwrap())
                    / (h * h);
                let exact = s.d2f(u).unwrap();
                let scale = 1.0_f64.max(exact.abs());
                assert!(
                    (fd - exact).abs() / scale < 1e-6,
                    "f'' mismatch at u={u}: fd={fd} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn proposition_two_both_directions() {
        // constant h: f'/f + b^2 theta = 0 identically (closed-form theta)
        for s in [sphere(), spindle_half(), horn_half()] {
            let b2 = s.b_squared.unwrap();
            let (a, b) = s.domain.sample_window();
            for i in 0..64 {
                let u = a + (b - a) * i as f64 / 63.0;
                let residual = s.df(u).unwrap() / s.f(u).unwrap() + b2 * s.theta(u).unwrap();
                assert!(residual.abs() < 1e-8, "residual {residual} at u={u}");
            }
        }

        // torus: f'/f + c theta is non-constant for every constant c
        let t = torus();
        let (a, b) = t.domain.sample_window();
        for c in [-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0] {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for i in 0..64 {
                let u = a + (b - a) * i as f64 / 63.0;
                let r = t.df(u).unwrap() / t.f(u).unwrap() + c * t.theta(u).unwrap();
                min = min.min(r);
                max = max.max(r);
            }
            assert!(max - min > 1e-3, "residual unexpectedly constant for c={c}");
        }
    }

    #[test]
    fn invert_theta_round_trips() {
        for s in [sphere(), plane(), torus(), spindle_half()] {
            let (a, b) = s.domain.sample_window();
            for i in 1..10 {
                let u = a + (b - a) * i as f64 / 10.0;
                let target = s.theta(u).unwrap();
                let back = s.invert_theta(target).unwrap();
                assert!(
                    (back - u).abs() < 1e-9,
                    "invert_theta round trip failed: u={u} back={back}"
                );
            }
        }
        // theta is bounded on the torus, so a large target is not attained
        assert!(matches!(torus().invert_theta(10.0), Err(Error::Range { .. })));
        // on the sphere theta diverges at the poles: even extreme targets
        // are attained by points close to the axis
        let u = sphere().invert_theta(-1e6).unwrap();
        assert!((sphere().theta(u).unwrap() + 1e6).abs() < 1e-3);
    }

    #[test]
    fn theta_constant_is_adjustable_only_for_quadrature_form() {
        let mut t = torus();
        t.set_theta_constant(2.5).unwrap();
        let v = t.theta(PI).unwrap();
        assert!((v - 2.5).abs() < 1e-12); // integral from u_ref = pi vanishes
        assert!(sphere().set_theta_constant(1.0).is_err());
    }
}
