//! Cross-module invariants: quadrature-vs-integration agreement,
//! energy independence of the apsidal angle for closing potentials, and
//! the scaling/limit identities tying circular orbits to beta.

use revorbit::analysis::{
    self, apsidal_angle, circular_momentum_squared, energy_grid, global_minimum,
    small_oscillation_beta, EffectiveProfile,
};
use revorbit::catalog;
use revorbit::dynamics::{self, PhaseState};
use revorbit::{CentralPotential, SurfaceOfRevolution};
use std::f64::consts::PI;
use std::sync::Arc;

fn grav(s: &Arc<SurfaceOfRevolution>, a: f64) -> Arc<CentralPotential> {
    Arc::new(CentralPotential::gravitational(a, s).unwrap())
}

fn harm(s: &Arc<SurfaceOfRevolution>, k: f64) -> Arc<CentralPotential> {
    Arc::new(CentralPotential::harmonic(k, s).unwrap())
}

#[test]
fn quadrature_and_integration_agree_on_apsidal_angle() {
    // (surface, potential, l): one V1 and one V2 case per family
    let sphere = Arc::new(catalog::sphere());
    let spindle = Arc::new(catalog::spindle_half());
    let plane = Arc::new(catalog::plane());
    let cases: Vec<(Arc<SurfaceOfRevolution>, Arc<CentralPotential>, f64)> = vec![
        (Arc::clone(&sphere), grav(&sphere, 1.0), 1.0),
        (Arc::clone(&sphere), harm(&sphere, 0.5), 1.0),
        (Arc::clone(&spindle), grav(&spindle, 1.0), 0.8),
        (Arc::clone(&plane), harm(&plane, 0.5), 1.0),
    ];
    for (s, p, l) in cases {
        let eff = EffectiveProfile::new(&s, &p, l, 1.0).unwrap();
        let minimum = global_minimum(&eff).unwrap();
        let energy = minimum.energy + 0.2 * (1.0 + minimum.energy.abs());
        let quad = apsidal_angle(&eff, energy).unwrap().delta_phi;

        let (_, u2) = analysis::turning_points(&eff, energy).unwrap();
        let init = PhaseState {
            t: 0.0,
            u: u2,
            phi: 0.0,
            p_u: 0.0,
            p_phi: l,
            m: 1.0,
        };
        // enough steps for several radial cycles
        let period = analysis::radial_period(&eff, energy).unwrap();
        let dt = 2e-4;
        let steps = (6.0 * period / dt) as usize;
        let traj = dynamics::integrate(&s, &p, init, dt, steps).unwrap();
        let measured = dynamics::apsidal_from_trajectory(&traj).expect("cycles");
        assert!(
            (measured - quad).abs() < 1e-5,
            "{} on {:?}: measured {measured} vs quadrature {quad}",
            p.kind_name(),
            s.class
        );
    }
}

#[test]
fn apsidal_angle_is_energy_independent_for_closing_potentials() {
    let sphere = Arc::new(catalog::sphere());
    let spindle = Arc::new(catalog::spindle_half());
    let cases: Vec<(Arc<SurfaceOfRevolution>, Arc<CentralPotential>)> = vec![
        (Arc::clone(&sphere), grav(&sphere, 1.0)),
        (Arc::clone(&sphere), harm(&sphere, 0.5)),
        (Arc::clone(&spindle), grav(&spindle, 1.0)),
        (Arc::clone(&spindle), harm(&spindle, 0.3)),
    ];
    for (s, p) in cases {
        let eff = EffectiveProfile::new(&s, &p, 0.9, 1.0).unwrap();
        let minimum = global_minimum(&eff).unwrap();
        let energies = energy_grid(&eff, &minimum, 10).unwrap();
        let angles: Vec<f64> = energies
            .iter()
            .map(|e| apsidal_angle(&eff, *e).unwrap().delta_phi)
            .collect();
        let min = angles.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(
            max - min <= 1e-6,
            "{} on {:?}: delta_phi spread {}",
            p.kind_name(),
            s.class,
            max - min
        );
    }
}

#[test]
fn apsidal_angle_varies_for_non_closing_potentials() {
    // V = u^4 on the plane has a stable circular orbit but no closure
    let plane = Arc::new(catalog::plane());
    let p = Arc::new(CentralPotential::custom("u^4").unwrap());
    let eff = EffectiveProfile::new(&plane, &p, 1.0, 1.0).unwrap();
    let minimum = global_minimum(&eff).unwrap();
    let energies = energy_grid(&eff, &minimum, 10).unwrap();
    let angles: Vec<f64> = energies
        .iter()
        .map(|e| apsidal_angle(&eff, *e).unwrap().delta_phi)
        .collect();
    let min = angles.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(max - min > 1e-3, "spread {}", max - min);
}

#[test]
fn scaling_the_potential_rescales_l_but_not_u0_or_beta() {
    let plane = Arc::new(catalog::plane());
    let sphere = Arc::new(catalog::sphere());
    for (s, u0) in [(plane, 1.3), (sphere, 0.7)] {
        let base = grav(&s, 1.0);
        let scaled = grav(&s, 3.7);
        let l2_base = circular_momentum_squared(&s, &base, u0, 1.0).unwrap();
        let l2_scaled = circular_momentum_squared(&s, &scaled, u0, 1.0).unwrap();
        assert!(
            (l2_scaled / l2_base - 3.7).abs() < 1e-10,
            "l^2 must scale linearly with the potential"
        );

        // u0 remains a critical point with the rescaled momentum
        let eff = EffectiveProfile::new(&s, &scaled, l2_scaled.sqrt(), 1.0).unwrap();
        assert!(eff.dw(u0).unwrap().abs() < 1e-10);

        // and the small-oscillation beta is unchanged
        let beta_base = small_oscillation_beta(&s, &base, u0).unwrap();
        let beta_scaled = small_oscillation_beta(&s, &scaled, u0).unwrap();
        assert!((beta_base - beta_scaled).abs() < 1e-10);
    }
}

#[test]
fn quadrature_beta_matches_first_order_beta_near_the_minimum() {
    let sphere = Arc::new(catalog::sphere());
    let plane = Arc::new(catalog::plane());
    let cases: Vec<(Arc<SurfaceOfRevolution>, Arc<CentralPotential>)> = vec![
        (Arc::clone(&sphere), grav(&sphere, 1.0)),
        (Arc::clone(&plane), harm(&plane, 0.5)),
        // non-closing potential: beta is irrational but the limit still holds
        (
            Arc::clone(&plane),
            Arc::new(CentralPotential::custom("u^4").unwrap()),
        ),
    ];
    for (s, p) in cases {
        let eff = EffectiveProfile::new(&s, &p, 1.0, 1.0).unwrap();
        let minimum = global_minimum(&eff).unwrap();
        let beta_condition = small_oscillation_beta(&s, &p, minimum.u0).unwrap();
        let near = apsidal_angle(&eff, minimum.energy + 1e-4 * (1.0 + minimum.energy.abs()))
            .unwrap();
        assert!(
            (near.beta - beta_condition).abs() < 1e-4,
            "{}: quadrature beta {} vs first-order beta {}",
            p.kind_name(),
            near.beta,
            beta_condition
        );
    }
}

#[test]
fn appell_equivalence_on_a_non_sphere_surface() {
    // planar Kepler ellipse mapped onto the b = 1/2 spindle matches direct
    // integration of the same generalized potential
    let plane = Arc::new(catalog::plane());
    let plane_p = grav(&plane, 1.0);
    let init = PhaseState {
        t: 0.0,
        u: 2.0,
        phi: 0.0,
        p_u: 0.0,
        p_phi: 1.0,
        m: 1.0,
    };
    let dt = 2e-4;
    let planar_traj = dynamics::integrate(&plane, &plane_p, init, dt, 40_000).unwrap();
    let planar = dynamics::planar_states(&planar_traj);

    let spindle = Arc::new(catalog::spindle_half());
    let mapped = dynamics::appell_map(&spindle, &planar).unwrap();

    let spindle_p = grav(&spindle, 1.0);
    let u0 = spindle.invert_theta(-0.5).unwrap();
    let direct_init = PhaseState {
        t: 0.0,
        u: u0,
        phi: 0.0,
        p_u: 0.0,
        p_phi: 1.0,
        m: 1.0,
    };
    let direct = dynamics::integrate(&spindle, &spindle_p, direct_init, dt, 40_000).unwrap();

    // compare u(phi) on a common grid
    let phi_hi = mapped
        .samples
        .last()
        .unwrap()
        .phi
        .min(direct.samples.last().unwrap().phi);
    let u_at = |traj: &dynamics::Trajectory, phi: f64| {
        let idx = traj.samples.partition_point(|s| s.phi < phi);
        let (s0, s1) = (&traj.samples[idx - 1], &traj.samples[idx.min(traj.samples.len() - 1)]);
        if s1.phi == s0.phi {
            return s0.u;
        }
        s0.u + (phi - s0.phi) / (s1.phi - s0.phi) * (s1.u - s0.u)
    };
    let mut worst = 0.0_f64;
    for i in 1..64 {
        let phi = phi_hi * i as f64 / 64.0;
        worst = worst.max((u_at(&mapped, phi) - u_at(&direct, phi)).abs());
    }
    assert!(worst < 1e-6, "spindle trace deviation {worst}");
}

#[test]
fn closed_orbit_state_recurrence_on_the_sphere() {
    // V1 closes after one radial period, V2 after two
    let sphere = Arc::new(catalog::sphere());
    for (p, cycles) in [(grav(&sphere, 1.0), 1.0), (harm(&sphere, 0.5), 2.0)] {
        let eff = EffectiveProfile::new(&sphere, &p, 1.0, 1.0).unwrap();
        let minimum = global_minimum(&eff).unwrap();
        let energy = minimum.energy + 0.15 * (1.0 + minimum.energy.abs());
        let (_, u2) = analysis::turning_points(&eff, energy).unwrap();
        let period = cycles * analysis::radial_period(&eff, energy).unwrap();
        let n = (period / 2e-4).round() as usize;
        let dt = period / n as f64;
        let init = PhaseState {
            t: 0.0,
            u: u2,
            phi: 0.0,
            p_u: 0.0,
            p_phi: 1.0,
            m: 1.0,
        };
        let traj = dynamics::integrate(&sphere, &p, init, dt, n).unwrap();
        let end = traj.last();
        let dphi = (end.phi - init.phi).rem_euclid(2.0 * PI);
        let dphi = dphi.min(2.0 * PI - dphi);
        assert!(
            (end.u - init.u).abs() < 1e-5 && (end.p_u - init.p_u).abs() < 1e-5 && dphi < 1e-5,
            "{}: recurrence error du={:.2e} dpu={:.2e} dphi={:.2e}",
            p.kind_name(),
            (end.u - init.u).abs(),
            (end.p_u - init.p_u).abs(),
            dphi
        );
    }
}
