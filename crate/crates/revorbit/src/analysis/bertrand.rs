use super::apsidal::best_rational;
use super::effective::{CircularOrbit, CriticalKind, EffectiveProfile};
use crate::error::{Error, Result};
use crate::geometry::{SurfaceOfRevolution, B_SQUARED_EPS, TOL_H};
use crate::numeric;
use crate::potentials::CentralPotential;
use serde::Serialize;

/// Grid used for h-constancy and constant-root detection.
const CLASSIFY_GRID: usize = 1024;

/// Residual of the first-order closure condition at a circular orbit:
///   V''(u0)/V'(u0) - [ (beta^2 - 3 f'(u0)^2)/(f'(u0) f(u0)) + f''(u0)/f'(u0) ].
/// Zero for every closing potential; for V1 this forces h = beta^2 and for
/// V2 it forces h = beta^2 / 4.
pub fn first_order_condition_residual(
    surface: &SurfaceOfRevolution,
    potential: &CentralPotential,
    u0: f64,
    beta: f64,
) -> Result<f64> {
    let f = surface.radius(u0)?;
    let df = surface.df(u0)?;
    let d2f = surface.d2f(u0)?;
    let dv = potential.dv(u0)?;
    if dv == 0.0 || df == 0.0 {
        return Err(Error::DegenerateCircular(format!(
            "V'(u0) = {dv}, f'(u0) = {df} at u0 = {u0}"
        )));
    }
    let lhs = potential.d2v(u0)? / dv;
    let rhs = (beta * beta - 3.0 * df * df) / (df * f) + d2f / df;
    Ok(lhs - rhs)
}

/// The beta implied by the first-order condition at u0, i.e. the
/// small-oscillation value beta^2 = f' f (V''/V' - f''/f') + 3 f'^2.
pub fn small_oscillation_beta(
    surface: &SurfaceOfRevolution,
    potential: &CentralPotential,
    u0: f64,
) -> Result<f64> {
    let f = surface.radius(u0)?;
    let df = surface.df(u0)?;
    let d2f = surface.d2f(u0)?;
    let dv = potential.dv(u0)?;
    if dv == 0.0 || df == 0.0 {
        return Err(Error::DegenerateCircular(format!(
            "V'(u0) = {dv}, f'(u0) = {df} at u0 = {u0}"
        )));
    }
    let beta_sq = df * f * (potential.d2v(u0)? / dv - d2f / df) + 3.0 * df * df;
    if beta_sq <= 0.0 {
        return Err(Error::DegenerateCircular(format!(
            "beta^2 = {beta_sq} <= 0: nearby orbits do not oscillate"
        )));
    }
    Ok(beta_sq.sqrt())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuarticRoots {
    pub z1: f64,
    pub z2: f64,
    pub real: bool,
}

/// Roots of the closure quartic in z = beta^2,
///   z^2 - 5 h(u) z + 4 h(u)^2 + 3 f(u) f'(u) h'(u) = 0.
/// On constant-h surfaces the roots are exactly {b^2, 4 b^2}. Complex
/// pairs are flagged, not raised; both entries then carry the real part.
pub fn beta_quartic(surface: &SurfaceOfRevolution, u: f64) -> Result<QuarticRoots> {
    let h = surface.h(u)?;
    let hp = surface.h_prime(u)?;
    let f = surface.f(u)?;
    let df = surface.df(u)?;
    let c = 4.0 * h * h + 3.0 * f * df * hp;
    let disc = 25.0 * h * h - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        Ok(QuarticRoots {
            z1: 0.5 * (5.0 * h - s),
            z2: 0.5 * (5.0 * h + s),
            real: true,
        })
    } else {
        Ok(QuarticRoots {
            z1: 2.5 * h,
            z2: 2.5 * h,
            real: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Admissible {
    V1,
    V2,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuarticSample {
    pub u: f64,
    pub z1: f64,
    pub z2: f64,
    pub real: bool,
}

/// Outcome of classifying a surface by its closed-orbit potentials.
#[derive(Debug, Clone, Serialize)]
pub struct BertrandReport {
    pub h_constant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_squared: Option<f64>,
    /// b^2 = 0: no bounded orbits accompany the circular ones, so the
    /// closure machinery does not apply (e.g. the pseudosphere).
    pub degenerate: bool,
    pub roots: Vec<QuarticSample>,
    pub constant_roots: Vec<f64>,
    pub admissible: Vec<Admissible>,
    pub beta: Vec<f64>,
    pub rational: Vec<RationalNote>,
}

pub type RationalNote = super::apsidal::RationalApprox;

impl BertrandReport {
    pub fn verdict(&self) -> String {
        if self.degenerate {
            return format!(
                "Degenerate (b^2 = {:.3e}): no bounded non-circular orbits",
                self.b_squared.unwrap_or(0.0)
            );
        }
        match self.admissible.len() {
            0 => "no central potential closes all bounded orbits".to_string(),
            1 => format!(
                "one closing potential: V2 with beta = {:.6}",
                self.beta[0]
            ),
            _ => format!(
                "two closing potentials: V1 (beta = {:.6}) and V2 (beta = {:.6})",
                self.beta[0], self.beta[1]
            ),
        }
    }
}

fn branch_constancy(values: &[Option<f64>]) -> Option<f64> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for v in values {
        let v = (*v)?; // a complex point disqualifies the branch
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    let mean = sum / values.len() as f64;
    (max - min <= TOL_H * (1.0 + mean.abs())).then_some(mean)
}

/// Classify the surface: two closing potentials iff h is constant and
/// positive, at most one (the oscillator) if a quartic root is constant
/// while h is not, none otherwise.
pub fn bertrand_classify(surface: &SurfaceOfRevolution) -> Result<BertrandReport> {
    let (a, b) = surface.domain.sample_window();
    let mut roots = Vec::with_capacity(CLASSIFY_GRID);
    let mut h_min = f64::INFINITY;
    let mut h_max = f64::NEG_INFINITY;
    let mut h_sum = 0.0;
    for i in 0..CLASSIFY_GRID {
        let u = a + (b - a) * i as f64 / (CLASSIFY_GRID - 1) as f64;
        let h = surface.h(u)?;
        h_min = h_min.min(h);
        h_max = h_max.max(h);
        h_sum += h;
        let q = beta_quartic(surface, u)?;
        roots.push(QuarticSample {
            u,
            z1: q.z1,
            z2: q.z2,
            real: q.real,
        });
    }
    let h_mean = h_sum / CLASSIFY_GRID as f64;
    let h_constant = h_max - h_min <= TOL_H * (1.0 + h_mean.abs());

    let mut report = BertrandReport {
        h_constant,
        b_squared: h_constant.then_some(h_mean),
        degenerate: false,
        roots,
        constant_roots: Vec::new(),
        admissible: Vec::new(),
        beta: Vec::new(),
        rational: Vec::new(),
    };

    if h_constant {
        let b2 = h_mean;
        if b2.abs() <= B_SQUARED_EPS {
            report.degenerate = true;
        } else if b2 > 0.0 {
            report.constant_roots = vec![b2, 4.0 * b2];
            report.admissible = vec![Admissible::V1, Admissible::V2];
            report.beta = vec![b2.sqrt(), 2.0 * b2.sqrt()];
            report.rational = report.beta.iter().map(|&x| best_rational(x, 64)).collect();
        }
        // constant negative h: the quartic roots are negative, no real beta
        return Ok(report);
    }

    let lower: Vec<Option<f64>> = report
        .roots
        .iter()
        .map(|s| s.real.then_some(s.z1))
        .collect();
    let upper: Vec<Option<f64>> = report
        .roots
        .iter()
        .map(|s| s.real.then_some(s.z2))
        .collect();
    for branch in [lower, upper] {
        if let Some(mean) = branch_constancy(&branch) {
            if mean > B_SQUARED_EPS {
                report.constant_roots.push(mean);
            }
        }
    }
    if let Some(&z) = report.constant_roots.first() {
        report.admissible = vec![Admissible::V2];
        report.beta = vec![z.sqrt()];
        report.rational = vec![best_rational(z.sqrt(), 64)];
    }
    Ok(report)
}

/// Compare the closed-form W'', W''', W'''' at a circular orbit against
/// finite differences of the effective potential. Returns the three
/// relative residuals. `beta` must satisfy the first-order condition at
/// u0 (as V1 and V2 do on constant-h surfaces).
pub fn w_derivative_identities_check(
    eff: &EffectiveProfile,
    circular: &CircularOrbit,
    beta: f64,
) -> Result<[f64; 3]> {
    if circular.kind != CriticalKind::Minimum {
        return Err(Error::DegenerateCircular(
            "derivative identities hold at a stable circular orbit".to_string(),
        ));
    }
    let surface = &eff.surface;
    let potential = &eff.potential;
    let u0 = circular.u0;
    let f = surface.radius(u0)?;
    let df = surface.df(u0)?;
    let d2f = surface.d2f(u0)?;
    let d3f = surface.d3f(u0)?;
    let dv = potential.dv(u0)?;
    if df == 0.0 || dv == 0.0 {
        return Err(Error::DegenerateCircular(format!(
            "V'(u0) = {dv}, f'(u0) = {df} at u0 = {u0}"
        )));
    }
    let b2 = beta * beta;

    let w2 = dv / (df * f) * b2;
    let w3 = dv * ((b2 / (df * df) - 7.0) / (f * f) + d2f / (df * df * f)) * b2;
    let w4 = dv / (df * f * f * f)
        * (b2 * b2 / (df * df) - 12.0 * b2 - f * f * d2f * d2f / (df * df) - 20.0 * d2f * f
            + 2.0 * d3f * f * f / df
            + 47.0 * df * df)
        * b2;

    let (a, b) = surface.domain.sample_window();
    let h = (1e-3 * (1.0 + u0.abs())).min((u0 - a).min(b - u0) / 3.0);
    let w_fn = |u: f64| eff.w(u).ok();
    let d2w_fn = |u: f64| eff.d2w(u).ok();

    let w2_fd = numeric::fd_second(&w_fn, u0, h)
        .ok_or_else(|| Error::DegenerateCircular("W not evaluable near u0".to_string()))?;
    let w3_fd = numeric::fd_first(&d2w_fn, u0, h)
        .ok_or_else(|| Error::DegenerateCircular("W'' not evaluable near u0".to_string()))?;
    let w4_fd = numeric::fd_second(&d2w_fn, u0, h)
        .ok_or_else(|| Error::DegenerateCircular("W'' not evaluable near u0".to_string()))?;

    let rel = |closed: f64, fd: f64| (closed - fd).abs() / 1.0_f64.max(closed.abs());
    Ok([rel(w2, w2_fd), rel(w3, w3_fd), rel(w4, w4_fd)])
}
