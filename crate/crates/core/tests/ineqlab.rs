use std::f64::consts::{FRAC_PI_2, PI};

use arcmarkov::composition::{chebyshev_derivative_at_one_exact, double_factorial_odd};
use arcmarkov::equilibrium::{solve_tau, ArcSystem};
use arcmarkov::ineqlab::{
    algebraic_circle_check, bernstein_interior_check, calibrate_slack, corpus, discrepancy_decreasing, markov_endpoint_check,
    markov_sharpness_scan, markov_upper_bound_suite, reports_to_csv, rough_markov_check, scale_separation,
    split_on_circle, symmetrization_experiment, trig_to_algebraic, BoundKind, CircleMode, ConvergenceRow,
    ConvergenceTable, CorpusOptions, IneqError, InequalityReport, Slack, SuiteFixture, SymmetrizationOptions,
    FROZEN_SLACK_C,
};
use arcmarkov::poly::{ComplexPoly, IntervalSet, TrigPoly};
use arcmarkov::tset::{analyze_admissible, single_interval_u, two_interval_u, TSetDescriptor};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn single(th: f64) -> (TSetDescriptor, f64) {
    let d = analyze_admissible(&single_interval_u(th)).unwrap();
    let a = d.e_set.intervals()[0].1;
    (d, a)
}

fn two() -> (TSetDescriptor, f64) {
    let d = analyze_admissible(&two_interval_u(0.2, 0.5)).unwrap();
    let a = d.e_set.intervals()[1].1;
    (d, a)
}

#[test]
fn rough_markov_examples() {
    let e = IntervalSet::single(-FRAC_PI_2, FRAC_PI_2).unwrap();
    for n in [3, 10, 25] {
        let t = TrigPoly::harmonic(n, 1.0, 0.0);
        let r = rough_markov_check(&t, &e, 1).unwrap();
        assert!((r.ratio - 1.0 / n as f64).abs() < 1e-12, "{r:?}");
        let r0 = rough_markov_check(&t, &e, 0).unwrap();
        assert!((r0.ratio - 1.0).abs() < 1e-14);
    }
    // bounded constant over a fixed family
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let e = IntervalSet::single(-1.0, 1.3).unwrap();
    let worst = (5..=50)
        .step_by(5)
        .map(|n| {
            let t = TrigPoly::new(
                (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect(),
                (0..=n).map(|j| if j == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }).collect(),
                false,
            )
            .unwrap();
            rough_markov_check(&t, &e, 2).unwrap().ratio
        })
        .fold(0.0, f64::max);
    assert!(worst < 10.0, "{worst}");
}

#[test]
fn exactness_anchor_single_interval() {
    for th in [1.0, 2.0, 2.5] {
        let (d, a) = single(th);
        let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
        let rho = d.e_set.max_interval_condition_rho(a).unwrap();
        // coefficient form of T_l o U cancels badly for large l; the scan
        // below covers those through the Chebyshev recurrence
        for l in [2, 3, 4] {
            let t = d.extremal_sequence(l);
            let r = markov_endpoint_check(&t, &d.e_set, a, rho, 1, &eq).unwrap();
            assert!((r.point_ratio.unwrap() - 1.0).abs() < 1e-9, "th {th} l {l}: {r:?}");
            assert!(r.ratio >= r.point_ratio.unwrap() - 1e-12);
        }
        let table = markov_sharpness_scan(&d, a, 1, &[2, 4, 8, 16, 32]).unwrap();
        for row in &table.rows {
            assert!((row.ratio - 1.0).abs() < 1e-9);
        }
    }
}

/// `|T_l''(-1) U'(a)^2 + T_l'(-1) U''(a)|` from exact Chebyshev data and the
/// coefficients of `U`.
#[test]
fn scan_matches_exact_second_derivative() {
    for (d, a) in [single(2.0), two()] {
        let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
        let omega = eq.omega_endpoint(a).unwrap().omega_limit;
        let ls = [3, 6, 12, 24];
        let table = markov_sharpness_scan(&d, a, 2, &ls).unwrap();
        let y = d.u.eval(a).round();
        let (u1, u2) = (d.u.eval_derivative(a, 1), d.u.eval_derivative(a, 2));
        for (row, &l) in table.rows.iter().zip(&ls) {
            // T_l^{(j)}(-1) = (-1)^{l+j} T_l^{(j)}(1)
            let s = |j: usize| if y > 0.0 { 1.0 } else { (-1f64).powi((l + j) as i32) };
            let t1 = s(1) * chebyshev_derivative_at_one_exact(l, 1).unwrap() as f64;
            let t2 = s(2) * chebyshev_derivative_at_one_exact(l, 2).unwrap() as f64;
            let exact = (t2 * u1 * u1 + t1 * u2).abs();
            let n = (l * d.degree()) as f64;
            let factor = (8.0 * PI * PI * omega * omega * n * n).powi(2) / double_factorial_odd(2) as f64;
            assert!((row.ratio - exact / factor).abs() < 1e-9, "l {l}: {} vs {}", row.ratio, exact / factor);
        }
    }
}

#[test]
fn sharpness_scans_converge() {
    for (d, a) in [single(2.0), two()] {
        for k in [2, 3] {
            let table = markov_sharpness_scan(&d, a, k, &[2, 4, 8, 16, 32, 64]).unwrap();
            assert!(table.monotone_after_second);
            for r in table.rows.iter().filter(|r| r.n >= 64) {
                assert!(r.ratio >= 0.99, "{r:?}");
            }
        }
    }
    let (d, a) = single(2.0);
    let t = markov_sharpness_scan(&d, a, 2, &[4, 8, 16, 32, 64]).unwrap();
    assert!(t.final_ratio().unwrap() >= 0.995);
}

#[test]
fn bernstein_density_closed_form() {
    let th: f64 = 2.0;
    let (d, _) = single(th);
    let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
    let t = d.extremal_sequence(5);
    for i in 1..=25 {
        let t0 = -th + 2.0 * th * i as f64 / 26.0;
        let r = bernstein_interior_check(&t, &d.e_set, t0, 1, &eq).unwrap();
        let closed = (t0 / 2.0).cos() / ((th / 2.0).sin().powi(2) - (t0 / 2.0).sin().powi(2)).sqrt();
        let factor = r.theoretical / (r.degree * arcmarkov::poly::sup_norm(&t, &d.e_set).value);
        assert!((factor - closed).abs() < 1e-8 * closed, "t0 {t0}: {factor} vs {closed}");
        assert!(r.ratio <= 1.0 + 1e-9);
    }
    // at a zero of U: |T'| = l |U'| for T = T_l o U with l odd
    let t0 = d.u.clone();
    let zero = (0..2000)
        .map(|i| -th + 2.0 * th * i as f64 / 2000.0)
        .min_by(|x, y| t0.eval(*x).abs().total_cmp(&t0.eval(*y).abs()))
        .unwrap();
    let r = bernstein_interior_check(&t, &d.e_set, zero, 1, &eq).unwrap();
    assert!(r.ratio <= 1.0 + 1e-6);
    assert!(matches!(
        bernstein_interior_check(&t, &d.e_set, th - 1e-4, 1, &eq),
        Err(IneqError::NotInterior(..))
    ));
}

#[test]
fn riesz_case_on_a_near_full_circle() {
    let e = IntervalSet::single(-3.13, 3.13).unwrap();
    let eq = solve_tau(&ArcSystem::from_intervals(&e)).unwrap();
    for k in 1..=3 {
        let t = TrigPoly::harmonic(12, 1.0, 0.0);
        // |d^k cos(12 t)| peaks where the phase puts it at 12^k
        let t0 = if k % 2 == 1 { FRAC_PI_2 / 12.0 } else { 0.0 };
        let r = bernstein_interior_check(&t, &e, t0, k, &eq).unwrap();
        assert!((r.measured - 12f64.powi(k as i32)).abs() < 1e-9 * r.measured);
        assert!(r.ratio < 1.0 && r.ratio > 0.99, "{r:?}");
    }
}

#[test]
fn interior_and_endpoint_exponents() {
    for (d, a, e0) in [(single(2.0).0, single(2.0).1, (-1.0, 1.0)), (two().0, two().1, (1.0, 1.6))] {
        for k in [1usize, 2] {
            let s = scale_separation(&d, a, e0, k, &[16, 32, 64, 128, 256]).unwrap();
            assert!((s.interior_slope / k as f64 - 1.0).abs() < 0.05, "{s:?}");
            assert!((s.endpoint_slope / (2 * k) as f64 - 1.0).abs() < 0.05, "{s:?}");
        }
    }
}

#[test]
fn split_on_circle_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for deg in [4, 7, 12] {
        let c: Vec<Complex64> = (0..=deg)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let p = ComplexPoly::new(c).unwrap();
        let (re, im, n) = split_on_circle(&p);
        assert_eq!(n % 2, 0);
        for _ in 0..50 {
            let t: f64 = rng.random_range(-PI..PI);
            let z = Complex64::from_polar(1.0, t);
            let w = p.eval(z) * Complex64::from_polar(1.0, -(n as f64) * t / 2.0);
            assert!((w.re - re.eval(t)).abs() < 1e-12 && (w.im - im.eval(t)).abs() < 1e-12);
        }
    }
    // lift of a trig polynomial has modulus |T| on the circle
    let t = TrigPoly::new(vec![0.3, -1.0, 0.5], vec![0.0, 2.0, -0.25], false).unwrap();
    let p = trig_to_algebraic(&t).unwrap();
    for i in 0..20 {
        let s = -3.0 + 0.3 * i as f64;
        assert!((p.eval(Complex64::from_polar(1.0, s)).norm() - t.eval(s).abs()).abs() < 1e-13);
    }
}

#[test]
fn algebraic_checks() {
    let (d, a) = two();
    let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
    let rho = d.e_set.max_interval_condition_rho(a).unwrap();
    // z^n on a proper subset: well below the endpoint factor
    for n in [8, 20] {
        let p = ComplexPoly::monomial(n);
        let r = algebraic_circle_check(&p, &d.e_set, CircleMode::Endpoint { a, rho, k: 1 }, &eq).unwrap();
        assert!((r.point_measured.unwrap() - n as f64).abs() < 1e-9);
        assert!(r.ratio < 0.5, "{r:?}");
    }
    // k = 1 interior on a near-full arc with z^n: ratio -> 1
    let e = IntervalSet::single(-3.13, 3.13).unwrap();
    let eq_full = solve_tau(&ArcSystem::from_intervals(&e)).unwrap();
    let r = algebraic_circle_check(&ComplexPoly::monomial(16), &e, CircleMode::Interior { t0: 0.0, k: 1 }, &eq_full).unwrap();
    assert!(r.ratio < 1.0 && r.ratio > 0.999, "{r:?}");
    // odd degree is padded
    let r = algebraic_circle_check(&ComplexPoly::monomial(15), &e, CircleMode::Interior { t0: 0.0, k: 1 }, &eq_full).unwrap();
    assert_eq!(r.degree, 16.0);
    // endpoint sharpness through the lift of T_l o U
    let (d1, a1) = single(2.0);
    let eq1 = solve_tau(&ArcSystem::from_intervals(&d1.e_set)).unwrap();
    let rho1 = d1.e_set.max_interval_condition_rho(a1).unwrap();
    // |d/dt (e^{ilt} T(t))| = sqrt(T'^2 + l^2 T^2) and |T(a)| = 1
    for l in [2, 4, 8, 16] {
        let t = d1.extremal_sequence(l);
        let p = trig_to_algebraic(&t).unwrap();
        let r = algebraic_circle_check(&p, &d1.e_set, CircleMode::Endpoint { a: a1, rho: rho1, k: 1 }, &eq1).unwrap();
        let dt = t.eval_derivative(a1, 1);
        let want = (1.0 + (l * l) as f64 / (dt * dt)).sqrt();
        // the coefficient form of T_16 o U carries ~1e-8 cancellation error
        assert!((r.point_ratio.unwrap() - want).abs() < 1e-7, "l {l}: {:?} vs {want}", r.point_ratio);
    }
}

#[test]
fn interval_condition_is_enforced() {
    let (d, a) = two();
    let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
    let t = d.extremal_sequence(3);
    let big = d.e_set.max_interval_condition_rho(a).unwrap() * 1.01;
    assert!(matches!(
        markov_endpoint_check(&t, &d.e_set, a, big, 1, &eq),
        Err(IneqError::IntervalConditionViolated { .. })
    ));
    // a left endpoint does not satisfy the right-sided condition
    let left = d.e_set.intervals()[1].0;
    assert!(markov_sharpness_scan(&d, left, 1, &[2]).is_err());
}

#[test]
fn upper_bound_suite_on_the_corpus() {
    let (d1, a1) = single(2.0);
    let (d2, a2) = two();
    let entries = corpus(&CorpusOptions::default(), &[d1.clone(), d2.clone()]);
    assert!(entries.iter().filter(|c| c.source.starts_with("random#")).count() == 200);
    for c in &entries {
        let n = c.poly.degree();
        assert!((8..=64).contains(&n), "{} has degree {n}", c.source);
    }
    // seeded
    assert_eq!(entries, corpus(&CorpusOptions::default(), &[d1.clone(), d2.clone()]));
    let fixtures = [
        SuiteFixture {
            name: "single".into(),
            set: d1.e_set.clone(),
            endpoint: a1,
        },
        SuiteFixture {
            name: "two".into(),
            set: d2.e_set.clone(),
            endpoint: a2,
        },
    ];
    let suite = markov_upper_bound_suite(&fixtures, &entries, &[1, 2, 3], Slack::default()).unwrap();
    assert_eq!(suite.reports.len(), 2 * 3 * entries.len());
    assert!(suite.pass(), "max excess {}", suite.max_excess());
    let csv = reports_to_csv(&suite.reports);
    assert_eq!(csv.lines().count(), suite.reports.len() + 1);
}

#[test]
fn frozen_slack_covers_its_calibration() {
    let c = calibrate_slack(&[single(2.0), two()], &[1, 2, 3], 8, 64).unwrap();
    assert!(c > 0.0 && c <= FROZEN_SLACK_C, "{c}");
    assert!((Slack::default().at(64.0) - FROZEN_SLACK_C / 8.0).abs() < 1e-15);
}

#[test]
fn convergence_table_invariants() {
    let set = IntervalSet::single(-1.0, 1.0).unwrap();
    let row = |n, ratio| ConvergenceRow { l: n, n, ratio };
    let t = ConvergenceTable::new(BoundKind::MarkovEndpoint, set.clone(), 1.0, 2, vec![row(8, 0.9), row(2, 0.5), row(4, 0.95)]).unwrap();
    assert_eq!(t.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![2, 4, 8]);
    assert!(t.monotone_after_second);
    assert!(ConvergenceTable::new(BoundKind::MarkovEndpoint, set, 1.0, 2, vec![row(2, 0.1), row(2, 0.2)]).is_err());
    let json = serde_json::to_string(&t).unwrap();
    assert_eq!(serde_json::from_str::<ConvergenceTable>(&json).unwrap(), t);
    assert_eq!(t.to_csv().lines().count(), 4);
}

#[test]
fn report_json_round_trip() {
    let (d, a) = single(2.0);
    let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set)).unwrap();
    let r = markov_endpoint_check(&d.extremal_sequence(4), &d.e_set, a, 0.5, 2, &eq).unwrap();
    let back: InequalityReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn symmetrization_along_the_ladder() {
    let (d, a) = single(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in [1usize, 2] {
        let mut ladder = Vec::new();
        for n in [64usize, 128, 256] {
            let t = TrigPoly::new(
                (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect(),
                (0..=n).map(|j| if j == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }).collect(),
                false,
            )
            .unwrap();
            let r = symmetrization_experiment(&d, &t, a, k, &SymmetrizationOptions::default()).unwrap();
            assert!(r.inflation < 0.05, "{r:?}");
            assert!(r.level_set_deviation < 1e-10 && r.polynomial_residual < 1e-10, "{r:?}");
            ladder.push(r);
        }
        assert!(discrepancy_decreasing(&ladder), "{ladder:?}");
    }
    // the literal degree floor(sqrt(n)) is far too small for the factor
    let t = d.extremal_sequence(64);
    let opts = SymmetrizationOptions {
        l_degree_factor: 1,
        ..Default::default()
    };
    assert!(matches!(
        symmetrization_experiment(&d, &t, a, 1, &opts),
        Err(IneqError::FastDecay(_))
    ));
}
