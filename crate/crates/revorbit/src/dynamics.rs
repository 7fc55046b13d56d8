//! Hamiltonian motion on a surface of revolution.
//!
//! H = p_u^2/(2m) + p_phi^2/(2 m f(u)^2) + V(u). The angle phi is cyclic,
//! so p_phi is conserved and the radial motion reduces to one degree of
//! freedom in the effective potential W(u). The integrator is a leapfrog
//! on that reduced system: p_phi stays constant bitwise, and phi is
//! advanced with the midpoint radius of each drift, keeping the scheme
//! second order.

use crate::analysis::EffectiveProfile;
use crate::error::{Error, Result};
use crate::geometry::{SurfaceOfRevolution, B_SQUARED_EPS};
use crate::potentials::CentralPotential;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub u: f64,
    pub phi: f64,
    pub p_u: f64,
    pub p_phi: f64,
    pub m: f64,
}

/// A solution that reached the domain boundary (or a potential singularity)
/// in finite time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularEnd {
    pub t: f64,
    pub u: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub e0: f64,
    pub l: f64,
    /// |H - E0| at each sample.
    pub drift_log: Vec<f64>,
    pub singular_end: Option<SingularEnd>,
}

impl Trajectory {
    pub fn max_drift(&self) -> f64 {
        self.drift_log.iter().cloned().fold(0.0, f64::max)
    }

    pub fn last(&self) -> &PhaseState {
        self.samples.last().expect("trajectory has at least the initial state")
    }
}

/// H(state) = p_u^2/2m + p_phi^2/(2 m f^2) + V(u).
pub fn hamiltonian(
    state: &PhaseState,
    surface: &SurfaceOfRevolution,
    potential: &CentralPotential,
) -> Result<f64> {
    let f = surface.radius(state.u)?;
    Ok(state.p_u * state.p_u / (2.0 * state.m)
        + state.p_phi * state.p_phi / (2.0 * state.m * f * f)
        + potential.v(state.u)?)
}

/// Right-hand side of Hamilton's equations:
/// (du/dt, dphi/dt, dp_u/dt, dp_phi/dt).
pub fn eom(
    state: &PhaseState,
    surface: &SurfaceOfRevolution,
    potential: &CentralPotential,
) -> Result<[f64; 4]> {
    let f = surface.radius(state.u)?;
    let df = surface.df(state.u)?;
    Ok([
        state.p_u / state.m,
        state.p_phi / (state.m * f * f),
        state.p_phi * state.p_phi * df / (state.m * f * f * f) - potential.dv(state.u)?,
        0.0,
    ])
}

/// Leapfrog integration of the reduced radial system. Terminates early with
/// a `SingularEnd` record when the motion reaches the domain boundary; that
/// outcome is part of the trajectory, not an error.
pub fn integrate(
    surface: &Arc<SurfaceOfRevolution>,
    potential: &Arc<CentralPotential>,
    init: PhaseState,
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let eff = EffectiveProfile::new(surface, potential, init.p_phi, init.m)?;
    let e0 = hamiltonian(&init, surface, potential)?;
    let m = init.m;
    let l = init.p_phi;
    let drift_budget = 1e-3 * 1.0_f64.max(e0.abs());

    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut drift_log = Vec::with_capacity(n_steps + 1);
    samples.push(init);
    drift_log.push(0.0);

    let mut u = init.u;
    let mut phi = init.phi;
    let mut p_u = init.p_u;
    let mut h_prev = e0;
    let mut force = -eff.dw(u)?;
    let mut singular_end = None;

    let ok_at = |u: f64| surface.domain.interior_contains(u) && eff.dw(u).is_ok();

    for step in 0..n_steps {
        let p_half = p_u + 0.5 * dt * force;
        let du = dt * p_half / m;
        let u_new = u + du;

        if !ok_at(u_new) {
            // the drift is linear in time: bisect the step fraction down to
            // the last valid point and record the boundary time
            let mut alpha_ok = 0.0;
            let mut alpha_bad = 1.0;
            for _ in 0..60 {
                let alpha = 0.5 * (alpha_ok + alpha_bad);
                if ok_at(u + alpha * du) {
                    alpha_ok = alpha;
                } else {
                    alpha_bad = alpha;
                }
            }
            singular_end = Some(SingularEnd {
                t: init.t + dt * step as f64 + alpha_ok * dt,
                u: u + alpha_bad * du,
            });
            break;
        }

        let u_mid = u + 0.5 * du;
        let f_mid = surface.radius(u_mid)?;
        phi += dt * l / (m * f_mid * f_mid);

        let force_new = -eff.dw(u_new)?;
        let p_new = p_half + 0.5 * dt * force_new;
        let t = init.t + dt * (step + 1) as f64;

        let w_new = eff.w(u_new)?;
        let h = p_new * p_new / (2.0 * m) + w_new;
        if (h - h_prev).abs() > drift_budget {
            // Regular motion keeps W <= E. W far below E0 means the kinetic
            // energy blew up against an attracting singularity: a collision
            // end, not a step-size problem.
            if w_new < e0 - 10.0 * (1.0 + e0.abs()) {
                singular_end = Some(SingularEnd { t, u: u_new });
                break;
            }
            return Err(Error::StepTooLarge {
                t,
                drift: (h - h_prev).abs(),
            });
        }

        u = u_new;
        p_u = p_new;
        force = force_new;
        h_prev = h;
        samples.push(PhaseState {
            t,
            u,
            phi,
            p_u,
            p_phi: l,
            m,
        });
        drift_log.push((h - e0).abs());
    }

    Ok(Trajectory {
        samples,
        e0,
        l,
        drift_log,
        singular_end,
    })
}

/// A planar central-force state in polar coordinates (mass 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarState {
    pub tau: f64,
    pub r: f64,
    pub psi: f64,
    pub dr_dtau: f64,
    pub dpsi_dtau: f64,
}

/// View a trajectory on the plane surface (f = u) as planar polar states.
pub fn planar_states(traj: &Trajectory) -> Vec<PlanarState> {
    traj.samples
        .iter()
        .map(|s| PlanarState {
            tau: s.t,
            r: s.u,
            psi: s.phi,
            dr_dtau: s.p_u / s.m,
            dpsi_dtau: s.p_phi / (s.m * s.u * s.u),
        })
        .collect()
}

/// Map a planar trajectory onto a constant-h surface through the central
/// projection r = -1/theta(u), phi = psi, with time reparametrized by
/// dtau = (f theta)^{-2} dt. The (u, phi) trace is the contract; the clock
/// is rebuilt by cumulative quadrature of dt = (f theta)^2 dtau.
pub fn appell_map(
    surface: &Arc<SurfaceOfRevolution>,
    planar: &[PlanarState],
) -> Result<Trajectory> {
    match surface.b_squared {
        Some(b2) if b2.abs() > B_SQUARED_EPS => {}
        _ => return Err(Error::NonConstantH),
    }
    let mut samples = Vec::with_capacity(planar.len());
    let mut t = 0.0;
    let mut rate_prev = 0.0;
    for (i, p) in planar.iter().enumerate() {
        if !(p.r > 0.0) {
            return Err(Error::Range { value: p.r });
        }
        let u = surface.invert_theta(-1.0 / p.r)?;
        let f = surface.radius(u)?;
        let theta = surface.theta(u)?;
        let rate = (f * theta) * (f * theta);
        if i > 0 {
            let dtau = p.tau - planar[i - 1].tau;
            t += 0.5 * (rate_prev + rate) * dtau;
        }
        rate_prev = rate;
        samples.push(PhaseState {
            t,
            u,
            phi: p.psi,
            p_u: p.dr_dtau,
            p_phi: p.r * p.r * p.dpsi_dtau,
            m: 1.0,
        });
    }
    let l = samples.first().map(|s| s.p_phi).unwrap_or(0.0);
    Ok(Trajectory {
        samples,
        e0: f64::NAN,
        l,
        drift_log: Vec::new(),
        singular_end: None,
    })
}

/// Apsidal angle measured from a trajectory: the phi advance between
/// alternate sign changes of p_u (one full radial cycle), averaged over
/// all complete cycles. None if fewer than two cycles were seen.
pub fn apsidal_from_trajectory(traj: &Trajectory) -> Option<f64> {
    let mut crossings = Vec::new();
    for pair in traj.samples.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.p_u == 0.0 {
            crossings.push(a.phi);
        } else if a.p_u * b.p_u < 0.0 {
            let alpha = a.p_u / (a.p_u - b.p_u);
            crossings.push(a.phi + alpha * (b.phi - a.phi));
        }
    }
    if crossings.len() < 3 {
        return None;
    }
    let advances: Vec<f64> = crossings.windows(3).map(|w| w[2] - w[0]).collect();
    Some(advances.iter().sum::<f64>() / advances.len() as f64)
}

/// Render a trajectory as CSV with 17-significant-digit columns
/// t,u,phi,p_u,p_phi,E and optionally the embedded x,y,z.
pub fn trajectory_csv(
    traj: &Trajectory,
    surface: &SurfaceOfRevolution,
    potential: &CentralPotential,
    embed: bool,
) -> Result<String> {
    let mut out = String::with_capacity(traj.samples.len() * 140);
    out.push_str(if embed {
        "t,u,phi,p_u,p_phi,E,x,y,z\n"
    } else {
        "t,u,phi,p_u,p_phi,E\n"
    });
    for s in &traj.samples {
        let energy = hamiltonian(s, surface, potential)?;
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t, s.u, s.phi, s.p_u, s.p_phi, energy
        ));
        if embed {
            let p = surface.embed(s.u, s.phi)?;
            out.push_str(&format!(",{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z));
        }
        out.push('\n');
    }
    Ok(out)
}
