use std::f64::consts::PI;

use arcmarkov::equilibrium::{equilibrium_oracle, solve_tau, ArcSystem, OracleOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_system(rng: &mut ChaCha8Rng, m: usize) -> ArcSystem {
    loop {
        let mut e: Vec<f64> = (0..2 * m).map(|_| rng.random_range(-3.0..3.0)).collect();
        e.sort_by(f64::total_cmp);
        if e.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return ArcSystem::new(e).unwrap();
        }
    }
}

#[test]
fn symmetric_two_arcs() {
    let (a, b) = (0.4, 2.1);
    let eq = solve_tau(&ArcSystem::new(vec![-b, -a, a, b]).unwrap()).unwrap();
    // gap zeros at 0 and pi
    assert!(eq.tau[0].abs() < 1e-10, "{:?}", eq.tau);
    assert!((eq.tau[1] - PI).abs() < 1e-10);
    assert!(eq.residuals.iter().all(|r| r.abs() < 1e-10));
    for t in [0.5, 1.0, 1.7, 2.05] {
        let (p, q) = (eq.density(t).unwrap(), eq.density(-t).unwrap());
        assert!((p - q).abs() < 1e-12);
    }
    let masses = eq.arc_masses();
    assert!((masses[0] - 0.5).abs() < 1e-10 && (masses[1] - 0.5).abs() < 1e-10);
}

#[test]
fn single_arc_density_matches_closed_form() {
    for th in [PI / 6.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        let eq = solve_tau(&ArcSystem::new(vec![-th, th]).unwrap()).unwrap();
        for i in 1..25 {
            let t = -th + 2.0 * th * i as f64 / 25.0;
            let s = (th / 2.0).sin().powi(2) - (t / 2.0).sin().powi(2);
            let closed = (t / 2.0).cos() / (2.0 * PI * s.sqrt());
            assert!((eq.density(t).unwrap() - closed).abs() < 1e-10 * closed);
        }
        let f = eq.omega_endpoint(th).unwrap();
        let closed = (1.0 / (th / 2.0).tan()).sqrt() / (2.0 * PI);
        assert!((f.omega_limit - closed).abs() < 1e-12 * closed);
        assert!(f.relative_discrepancy() < 1e-6);
        assert!((f.markov_m - 1.0 / (th / 2.0).tan()).abs() < 1e-12 * f.markov_m);
    }
}

#[test]
fn random_systems_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let arcs = random_system(&mut rng, 1 + i % 4);
        let eq = solve_tau(&arcs).unwrap();
        assert!(eq.residuals.iter().all(|r| r.abs() < 1e-10));
        assert!((eq.total_mass() - 1.0).abs() < 1e-8, "{arcs:?} {}", eq.total_mass());
        for &a in arcs.endpoints() {
            let f = eq.omega_endpoint(a).unwrap();
            assert!(f.omega_limit > 0.0);
            assert!(f.relative_discrepancy() < 1e-6, "{arcs:?} at {a}: {f:?}");
        }
    }
}

#[test]
fn rotation_equivariance() {
    let arcs = ArcSystem::new(vec![-2.0, -0.5, 0.3, 1.9]).unwrap();
    let eq = solve_tau(&arcs).unwrap();
    let phi = 0.37;
    let rot = solve_tau(&arcs.rotated(phi).unwrap()).unwrap();
    for (t, s) in eq.tau.iter().zip(&rot.tau) {
        assert!((t + phi - s).abs() < 1e-10);
    }
    for (&a, &b) in arcs.endpoints().iter().zip(rot.arcs.endpoints()) {
        let (x, y) = (eq.omega_endpoint(a).unwrap(), rot.omega_endpoint(b).unwrap());
        assert!((x.omega_limit - y.omega_limit).abs() < 1e-10);
    }
}

#[test]
fn omega_monotone_in_the_set() {
    // arcs sharing the right endpoint 1.0 and growing to the left
    let mut prev = f64::INFINITY;
    for l in [0.8, 0.5, 0.0, -0.7, -1.5, -2.5] {
        let eq = solve_tau(&ArcSystem::new(vec![l, 1.0]).unwrap()).unwrap();
        let om = eq.omega_endpoint(1.0).unwrap().omega_limit;
        assert!(om <= prev + 1e-14);
        prev = om;
    }
    // adding a second arc on the far side
    let one = solve_tau(&ArcSystem::new(vec![-0.5, 1.0]).unwrap()).unwrap();
    let two = solve_tau(&ArcSystem::new(vec![-2.5, -1.5, -0.5, 1.0]).unwrap()).unwrap();
    assert!(two.omega_endpoint(1.0).unwrap().omega_limit <= one.omega_endpoint(1.0).unwrap().omega_limit);
}

#[test]
fn oracle_single_arc_histogram() {
    let th = PI / 2.0;
    let eq = solve_tau(&ArcSystem::new(vec![-th, th]).unwrap()).unwrap();
    let est = equilibrium_oracle(
        &eq.arcs,
        &OracleOptions { n_points: 500, ..Default::default() },
    )
    .unwrap();
    let mut l1 = 0.0;
    for &(lo, hi, d) in &est.histogram {
        // exact bin mass through the arcsine substitution t = 2 asin(s sin(th/2))
        let k = (th / 2.0).sin();
        let u = |t: f64| ((t / 2.0).sin() / k).clamp(-1.0, 1.0).asin();
        let mass = (u(hi) - u(lo)) / PI;
        l1 += (d * (hi - lo) - mass).abs();
    }
    assert!(l1 < 0.05, "L1 error {l1}");
}

#[test]
fn oracle_symmetric_two_arc_masses() {
    let arcs = ArcSystem::new(vec![-2.1, -0.4, 0.4, 2.1]).unwrap();
    let est = equilibrium_oracle(&arcs, &OracleOptions::default()).unwrap();
    assert!((est.arc_masses[0] - 0.5).abs() < 0.02);
    assert!((est.arc_masses[1] - 0.5).abs() < 0.02);
}

#[test]
fn oracle_validates_generic_two_arc_tau() {
    let arcs = ArcSystem::new(vec![-2.0, -0.5, 0.3, 1.9]).unwrap();
    let eq = solve_tau(&arcs).unwrap();
    let est = equilibrium_oracle(&arcs, &OracleOptions { n_points: 500, ..Default::default() }).unwrap();
    let masses = eq.arc_masses();
    for (m, o) in masses.iter().zip(&est.arc_masses) {
        assert!((m - o).abs() < 0.01, "{masses:?} vs {:?}", est.arc_masses);
    }
    // pointwise away from the endpoints, smoothing the spacing estimate
    // over a few neighbours
    let mut worst: f64 = 0.0;
    for (arc, (l, r)) in arcs.arcs().enumerate() {
        let pts = &est.points[arc];
        for w in pts.windows(9).step_by(4) {
            let t = 0.5 * (w[0] + w[8]);
            if t - l < 0.2 * (r - l) || r - t < 0.2 * (r - l) {
                continue;
            }
            let est_d = 8.0 / (500.0 * (w[8] - w[0]));
            let d = eq.density(t).unwrap();
            worst = worst.max((est_d - d).abs() / d);
        }
    }
    assert!(worst < 0.07, "worst relative deviation {worst}");
}
