use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{Context, Result};
use arcmarkov::composition::compose_derivative;
use arcmarkov::equilibrium::solve_tau;
use arcmarkov::fastdecay::{construct_fd_algebraic, construct_fd_trig, DecayFit, FastDecaySpec};
use arcmarkov::ineqlab::{
    bernstein_interior_check, corpus, discrepancy_decreasing, markov_sharpness_scan, markov_upper_bound_suite,
    reports_to_csv, symmetrization_experiment, CorpusOptions, Slack, SuiteFixture, SymmetrizationOptions,
    SymmetrizationReport, INTERIOR_MARGIN,
};
use arcmarkov::tset::{analyze_admissible, single_interval_u, two_interval_u};
use arcmarkov::{AlgPoly, ArcSystem, FastDecayResult, FastDecaySpecAlg, FastDecaySpecTrig, TSetDescriptor, TrigPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{
    BernsteinArgs, Command, EqArgs, FaaArgs, FdArgs, MarkovArgs, Preset, SymArgs, TSetArgs, TSetCmd, Tolerances,
};
use crate::config::{config_error, InputDigest};

/// Everything a command produces. The caller picks one of the two renderings.
pub struct Report {
    pub json: Value,
    pub csv: String,
    /// Failed assertions, one message each.
    pub failures: Vec<String>,
    pub inputs: Vec<InputDigest>,
}

impl Report {
    fn new(json: Value, csv: String, failures: Vec<String>) -> Self {
        Self {
            json,
            csv,
            failures,
            inputs: Vec::new(),
        }
    }
}

/// Extremal sequences stay within this many ULP-scale units of an endpoint
/// given on the command line.
const ENDPOINT_SNAP: f64 = 1e-9;

/// Smallest degree the envelope is asserted at; below it the finite-degree
/// ratios say nothing about the limit.
const ENVELOPE_MIN_DEGREE: usize = 8;

pub fn execute(cmd: &Command, seed: u64, tol: &Tolerances) -> Result<Report> {
    match cmd {
        Command::EqMeasure(a) => eq_measure(a, tol),
        Command::Tset(a) => tset(a, tol),
        Command::Fastdecay(a) => fastdecay(a),
        Command::VerifyMarkov(a) => verify_markov(a, seed, tol),
        Command::VerifyBernstein(a) => verify_bernstein(a, seed, tol),
        Command::Symmetrize(a) => symmetrize(a, seed, tol),
        Command::Faa(a) => faa(a, seed, tol),
    }
}

fn eq_measure(a: &EqArgs, tol: &Tolerances) -> Result<Report> {
    let arcs = ArcSystem::new(a.arcs.0.clone())?;
    let eq = solve_tau(&arcs)?;
    let mass = eq.total_mass();
    let mut failures = Vec::new();
    if (mass - 1.0).abs() > tol.mass_tol {
        failures.push(format!("total mass {mass} differs from 1 by more than {}", tol.mass_tol));
    }
    let endpoint = a.endpoint.map(|t| eq.omega_endpoint(t)).transpose()?;
    if let Some(f) = endpoint {
        if f.relative_discrepancy() > tol.omega_tol {
            failures.push(format!(
                "endpoint constant paths disagree: limit {} vs extrapolated {}",
                f.omega_limit, f.omega_extrapolated
            ));
        }
    }
    let json = json!({
        "arcs": arcs.endpoints(),
        "tau": eq.tau,
        "residuals": eq.residuals,
        "total_mass": mass,
        "arc_masses": eq.arc_masses(),
        "endpoint": endpoint,
    });
    Ok(Report::new(json, eq.density_csv(a.per_arc), failures))
}

/// The selected T-set and the endpoint `a`.
fn load_tset(a: &TSetArgs) -> Result<(TSetDescriptor, f64)> {
    let u = if a.u_cos.is_empty() {
        let u = match a.tset {
            Preset::Single => single_interval_u(a.theta0),
            Preset::Two => two_interval_u(a.c, a.h),
        };
        u.shifted(a.shift)
    } else {
        let n = a.u_cos.len().max(a.u_sin.len());
        let (mut c, mut s) = (a.u_cos.clone(), a.u_sin.clone());
        c.resize(n, 0.0);
        s.resize(n, 0.0);
        TrigPoly::new(c, s, false)?
    };
    let d = analyze_admissible(&u)?;
    let ends = d.e_set.endpoints();
    let last = *ends.last().ok_or_else(|| config_error("empty T-set"))?;
    let a = match a.endpoint {
        None => last,
        Some(t) => *ends
            .iter()
            .find(|&&e| (e - t).abs() <= ENDPOINT_SNAP)
            .ok_or_else(|| config_error(format!("{t} is not an endpoint of the T-set {:?}", d.e_set.intervals())))?,
    };
    Ok((d, a))
}

fn tset(a: &TSetCmd, tol: &Tolerances) -> Result<Report> {
    let (d, _) = load_tset(&a.set)?;
    let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set))?;
    let ids = d
        .e_set
        .endpoints()
        .into_iter()
        .map(|e| d.endpoint_derivative_identity(&eq, e))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("endpoint,u_prime_abs,omega,predicted,relative_discrepancy\n");
    let mut failures = Vec::new();
    for r in &ids {
        let _ = writeln!(
            csv,
            "{:?},{:?},{:?},{:?},{:?}",
            r.endpoint, r.u_prime_abs, r.omega, r.predicted, r.relative_discrepancy
        );
        if r.relative_discrepancy > tol.omega_tol {
            failures.push(format!(
                "endpoint identity at {}: |U'| = {} vs {}",
                r.endpoint, r.u_prime_abs, r.predicted
            ));
        }
    }
    let json = json!({
        "degree": d.degree(),
        "extremal_separation": d.extremal_separation(),
        "descriptor": d,
        "endpoint_identity": ids,
    });
    Ok(Report::new(json, csv, failures))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpecFile {
    Algebraic(FastDecaySpecAlg),
    Trigonometric(FastDecaySpecTrig),
}

impl SpecFile {
    fn degree(&self) -> usize {
        match self {
            Self::Algebraic(s) => s.degree,
            Self::Trigonometric(s) => s.degree,
        }
    }

    fn construct(&self, m: usize) -> Result<FastDecayResult> {
        Ok(match self {
            Self::Algebraic(s) => construct_fd_algebraic(&s.with_degree(m))?,
            Self::Trigonometric(s) => construct_fd_trig(&s.with_degree(m))?,
        })
    }
}

fn fastdecay(a: &FdArgs) -> Result<Report> {
    let bytes = std::fs::read(&a.spec).map_err(|e| config_error(format!("cannot read spec {}: {e}", a.spec.display())))?;
    let spec: SpecFile =
        serde_json::from_slice(&bytes).map_err(|e| config_error(format!("invalid spec {}: {e}", a.spec.display())))?;
    if !a.ladder.is_empty() && a.ladder.len() < 4 {
        return Err(config_error("a decay ladder needs at least 4 degrees"));
    }
    let degrees = if a.ladder.is_empty() { vec![spec.degree()] } else { a.ladder.clone() };
    let results: Vec<Result<FastDecayResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = degrees.iter().map(|&m| s.spawn({ let spec = &spec; move || spec.construct(m) })).collect();
        handles.into_iter().map(|h| h.join().expect("build thread panicked")).collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut failures = Vec::new();
    let mut csv = String::from("degree,property,measured,bound,margin,pass\n");
    for r in &results {
        for c in &r.report.checks {
            let _ = writeln!(
                csv,
                "{},{},{:?},{:?},{:?},{}",
                r.degree,
                c.property,
                c.measured,
                c.bound,
                c.margin(),
                c.pass
            );
        }
        let failing = r.report.failing();
        if !failing.is_empty() {
            failures.push(format!("m = {}: failed {}", r.degree, failing.join(", ")));
        }
    }
    let fit = (!a.ladder.is_empty()).then(|| DecayFit::from_results(&results));
    if let Some(f) = &fit {
        if !f.pass() {
            failures.push(format!(
                "decay fit: slope {}, monotone {}, relative residual {}, rate {}",
                f.slope, f.monotone, f.relative_residual, f.delta_hat
            ));
        }
    }
    let json = json!({ "builds": results, "fit": fit });
    let mut rep = Report::new(json, csv, failures);
    rep.inputs.push(InputDigest::of(&a.spec, &bytes));
    Ok(rep)
}

fn verify_markov(a: &MarkovArgs, seed: u64, tol: &Tolerances) -> Result<Report> {
    let (d, end) = load_tset(&a.set)?;
    let slack = Slack { c: tol.slack_c };
    let mut failures = Vec::new();
    if a.suite {
        let opts = CorpusOptions {
            seed,
            random: a.corpus_size,
            ..Default::default()
        };
        let entries = corpus(&opts, std::slice::from_ref(&d));
        let fixture = SuiteFixture {
            name: format!("{:?}", a.set.tset).to_lowercase(),
            set: d.e_set.clone(),
            endpoint: end,
        };
        let orders: Vec<usize> = (1..=a.k).collect();
        let suite = markov_upper_bound_suite(&[fixture], &entries, &orders, slack)?;
        for &i in &suite.violations {
            let r = &suite.reports[i];
            failures.push(format!(
                "{} (k = {}, n = {}): ratio {} above 1 + slack",
                r.source,
                r.order,
                r.degree,
                r.headline_ratio()
            ));
        }
        let json = json!({
            "slack": suite.slack,
            "checks": suite.reports.len(),
            "violations": suite.violations.len(),
            "max_excess": suite.max_excess(),
            "reports": suite.reports,
        });
        return Ok(Report::new(json, reports_to_csv(&suite.reports), failures));
    }
    if a.l.is_empty() {
        return Err(config_error("verify-markov needs --l or --suite"));
    }
    let table = markov_sharpness_scan(&d, end, a.k, &a.l)?;
    for r in &table.rows {
        if r.n >= ENVELOPE_MIN_DEGREE && !slack.admits(r.ratio, r.n as f64) {
            failures.push(format!("l = {}: ratio {} above 1 + slack({})", r.l, r.ratio, r.n));
        }
        if let Some(x) = a.expect_ratio {
            if (r.ratio - x).abs() > tol.ratio_tol {
                failures.push(format!("l = {}: ratio {} differs from {x} by more than {}", r.l, r.ratio, tol.ratio_tol));
            }
        }
    }
    let json = serde_json::to_value(&table)?;
    Ok(Report::new(json, table.to_csv(), failures))
}

fn random_trig(rng: &mut ChaCha8Rng, n: usize) -> TrigPoly {
    let cos = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sin = (0..=n).map(|j| if j == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }).collect();
    TrigPoly::new(cos, sin, false).expect("finite coefficients")
}

fn verify_bernstein(a: &BernsteinArgs, seed: u64, tol: &Tolerances) -> Result<Report> {
    let (d, _) = load_tset(&a.set)?;
    let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set))?;
    let (t, source) = match a.random_degree {
        Some(n) => (random_trig(&mut ChaCha8Rng::seed_from_u64(seed), n), format!("random:{n}")),
        None => (d.extremal_sequence(a.l), format!("extremal:{}", a.l)),
    };
    let slack = Slack { c: tol.slack_c };
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for &(lo, hi) in d.e_set.intervals() {
        for i in 1..=a.points {
            let t0 = lo + (hi - lo) * i as f64 / (a.points + 1) as f64;
            if t0 - lo < INTERIOR_MARGIN || hi - t0 < INTERIOR_MARGIN {
                continue;
            }
            let mut r = bernstein_interior_check(&t, &d.e_set, t0, a.k, &eq)?;
            r.source = source.clone();
            if !slack.admits(r.ratio, r.degree) {
                failures.push(format!("t = {t0}: ratio {} above 1 + slack", r.ratio));
            }
            reports.push(r);
        }
    }
    if reports.is_empty() {
        return Err(config_error("no interior grid point"));
    }
    let json = serde_json::to_value(&reports)?;
    Ok(Report::new(json, reports_to_csv(&reports), failures))
}

fn symmetrize(a: &SymArgs, seed: u64, tol: &Tolerances) -> Result<Report> {
    if a.n.is_empty() {
        return Err(config_error("symmetrize needs at least one degree"));
    }
    let (d, end) = load_tset(&a.set)?;
    let opts = SymmetrizationOptions {
        order: a.order,
        l_degree_factor: a.l_factor,
        level_samples: a.level_samples,
        seed,
    };
    let mut ns = a.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let runs: Vec<Result<SymmetrizationReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                let (d, opts) = (&d, &opts);
                s.spawn(move || {
                    let t = random_trig(&mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64)), n);
                    Ok(symmetrization_experiment(d, &t, end, a.k, opts)?)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
    });
    let ladder = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut failures = Vec::new();
    let mut csv = String::from(
        "n,k,endpoint,order,l_degree,rho0,l_high_deviation,l_low_ratio,l_rate,norm_t,norm_tstar,inflation,\
         deriv_t,deriv_tstar,normalized_discrepancy,discrepancy_noise,level_set_deviation,polynomial_residual\n",
    );
    for r in &ladder {
        let _ = writeln!(
            csv,
            "{},{},{:?},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.n,
            r.k,
            r.endpoint,
            r.order,
            r.l_degree,
            r.rho0,
            r.l_decay.high_deviation,
            r.l_decay.low_ratio,
            r.l_decay.rate,
            r.norm_t,
            r.norm_tstar,
            r.inflation,
            r.deriv_t,
            r.deriv_tstar,
            r.normalized_discrepancy,
            r.discrepancy_noise,
            r.level_set_deviation,
            r.polynomial_residual
        );
        if r.inflation >= tol.inflation_max {
            failures.push(format!("n = {}: inflation {} not below {}", r.n, r.inflation, tol.inflation_max));
        }
        if r.level_set_deviation > tol.level_tol || r.polynomial_residual > tol.level_tol {
            failures.push(format!(
                "n = {}: level-set spread {} / residual {} above {}",
                r.n, r.level_set_deviation, r.polynomial_residual, tol.level_tol
            ));
        }
    }
    if !discrepancy_decreasing(&ladder) {
        failures.push("normalized discrepancy does not decrease along n".into());
    }
    let json = serde_json::to_value(&ladder)?;
    Ok(Report::new(json, csv, failures))
}

struct FaaCase {
    outer: AlgPoly,
    inner: TrigPoly,
    t: f64,
    k: usize,
}

fn faa(a: &FaaArgs, seed: u64, tol: &Tolerances) -> Result<Report> {
    let cases = if a.random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..a.random)
            .map(|i| {
                let p = rng.random_range(1..=6usize);
                let outer = AlgPoly::new((0..=p).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("finite");
                let q = rng.random_range(1..=4usize);
                let inner = random_trig(&mut rng, q);
                let t = rng.random_range(-PI..PI);
                FaaCase { outer, inner, t, k: 1 + i % 6 }
            })
            .collect::<Vec<_>>()
    } else {
        if a.outer.is_empty() || a.inner_cos.is_empty() {
            return Err(config_error("faa needs --outer and --inner-cos, or --random"));
        }
        let outer = AlgPoly::new(a.outer.clone())?;
        let n = a.inner_cos.len().max(a.inner_sin.len());
        let (mut c, mut s) = (a.inner_cos.clone(), a.inner_sin.clone());
        c.resize(n, 0.0);
        s.resize(n, 0.0);
        let inner = TrigPoly::new(c, s, false)?;
        a.k
            .iter()
            .map(|&k| FaaCase {
                outer: outer.clone(),
                inner: inner.clone(),
                t: a.t,
                k,
            })
            .collect()
    };
    let mut csv = String::from("case,k,t,faa_di_bruno,exact,relative_error\n");
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        let value = compose_derivative(&c.outer, &c.inner, c.t, c.k).with_context(|| format!("case {i}"))?;
        let composed = c.outer.compose_trig(&c.inner);
        let exact = composed.eval_derivative(c.t, c.k);
        // guards against exact values that vanish by accident
        let scale = exact.abs().max(1e-12 * composed.derivative_bound(c.k));
        let rel = if scale > 0.0 { (value - exact).abs() / scale } else { (value - exact).abs() };
        let _ = writeln!(csv, "{i},{},{:?},{:?},{:?},{:?}", c.k, c.t, value, exact, rel);
        if rel > tol.faa_tol {
            failures.push(format!("case {i} (k = {}): relative error {rel}", c.k));
        }
        rows.push(json!({ "case": i, "k": c.k, "t": c.t, "faa_di_bruno": value, "exact": exact, "relative_error": rel }));
    }
    Ok(Report::new(Value::Array(rows), csv, failures))
}
