use std::f64::consts::PI;

use arcmarkov::composition::{chebyshev, compose_derivative};
use arcmarkov::equilibrium::{solve_tau, ArcSystem};
use arcmarkov::poly::sup_norm;
use arcmarkov::tset::{analyze_admissible, single_interval_u, two_interval_u};
use arcmarkov::TrigPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn endpoint_identity_single_interval() {
    for th in [PI / 6.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        let d = analyze_admissible(&single_interval_u(th)).unwrap();
        let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
        let a = d.e_set.intervals()[0].1;
        let rep = d.endpoint_derivative_identity(&eq, a).unwrap();
        let exact = 2.0 / (th / 2.0).tan();
        assert!((rep.u_prime_abs - exact).abs() < 1e-10 * exact);
        assert!(rep.relative_discrepancy < 1e-8, "{rep:?}");
    }
}

#[test]
fn endpoint_identity_two_intervals() {
    for (c, h, phi) in [(0.2, 0.5, 0.0), (-0.1, 0.6, 0.0), (0.2, 0.5, 0.3)] {
        let u = two_interval_u(c, h).shifted(phi);
        let d = analyze_admissible(&u).unwrap();
        assert_eq!(d.e_set.len(), 2);
        let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
        for &a in &d.e_set.endpoints() {
            let rep = d.endpoint_derivative_identity(&eq, a).unwrap();
            assert!(rep.relative_discrepancy < 1e-6, "{rep:?}");
        }
    }
    // closed-form check of c = 0.2, h = 0.5
    let d = analyze_admissible(&two_interval_u(0.2, 0.5)).unwrap();
    let a = d.e_set.intervals()[1].1;
    assert!((d.u.eval_derivative(a, 1).abs() - 7.6315).abs() < 1e-4);
}

#[test]
fn branch_partition_and_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for u in [single_interval_u(1.2), two_interval_u(0.2, 0.5), two_interval_u(0.2, 0.5).shifted(-0.4)] {
        let d = analyze_admissible(&u).unwrap();
        // branches tile the T-set
        let total: f64 = d.branch_intervals.iter().map(|(l, r)| r - l).sum();
        assert!((total - d.e_set.measure()).abs() < 1e-10);
        for &(l, r) in &d.branch_intervals {
            let (ul, ur) = (d.u.eval(l), d.u.eval(r));
            assert!((ul.abs() - 1.0).abs() < 1e-9 && (ur.abs() - 1.0).abs() < 1e-9 && ul * ur < 0.0);
        }
        for _ in 0..200 {
            let comp = d.e_set.intervals()[rng.random_range(0..d.e_set.len())];
            let t = rng.random_range(comp.0..comp.1);
            for j in 0..d.branch_count() {
                let tj = d.branch_inverse(j, t).unwrap();
                assert!((d.u.eval(tj) - d.u.eval(t)).abs() < 1e-12);
                assert!((d.branch_inverse(j, tj).unwrap() - tj).abs() < 1e-12);
            }
            let own = d.branch_of(t).unwrap();
            assert!((d.branch_inverse(own, t).unwrap() - t).abs() < 1e-12);
        }
    }
}

#[test]
fn extremal_sequence_is_chebyshev_of_u() {
    let d = analyze_admissible(&single_interval_u(2.0)).unwrap();
    assert_eq!(d.extremal_sequence(1), d.u);
    for l in [2, 5, 9] {
        let t = d.extremal_sequence(l);
        assert_eq!(t.degree(), l);
        let s = sup_norm(&t, &d.e_set);
        assert!((s.value - 1.0).abs() < 1e-10);
        for i in 0..=200 {
            let x = -2.0 + 4.0 * i as f64 / 200.0;
            let y = (l as f64 * d.u.eval(x).clamp(-1.0, 1.0).acos()).cos();
            assert!((t.eval(x) - y).abs() < 1e-10);
            assert!((d.extremal_derivative(l, x, 0).unwrap() - y).abs() < 1e-10);
        }
        // chain rule at the endpoint
        let th: f64 = 2.0;
        let want = (l * l) as f64 * 2.0 / (th / 2.0).tan();
        assert!((t.eval_derivative(th, 1).abs() - want).abs() < 1e-9 * want);
        let via = compose_derivative(&chebyshev(l), &d.u, th, 1).unwrap();
        assert!((via.abs() - want).abs() < 1e-9 * want);
    }
}

#[test]
fn symmetrization_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = analyze_admissible(&two_interval_u(0.2, 0.5)).unwrap();
    let v = TrigPoly::new(
        (0..7).map(|_| rng.random_range(-1.0..1.0)).collect(),
        (0..7).map(|j| if j == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }).collect(),
        false,
    )
    .unwrap();
    let s = d.symmetrize(&v);
    let p = s.as_polynomial_of_u(4).unwrap();
    for _ in 0..100 {
        let y: f64 = rng.random_range(-1.0..1.0);
        let pts: Vec<f64> = (0..d.branch_count()).map(|j| d.branch_point(j, y).unwrap()).collect();
        let vals: Vec<f64> = pts.iter().map(|&t| s.eval(t).unwrap()).collect();
        for v in &vals {
            assert!((v - vals[0]).abs() < 1e-10);
        }
        assert!((p.eval(y) - vals[0]).abs() < 1e-10);
    }
    // V = P(U) gives 2N P(U)
    let vu = d.extremal_sequence(3);
    let s = d.symmetrize(&vu);
    for t in [0.9, 1.2, -1.5] {
        let want = 4.0 * vu.eval(t);
        assert!((s.eval(t).unwrap() - want).abs() < 1e-10);
    }
}
