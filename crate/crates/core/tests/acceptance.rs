//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use jetinv_core::equations::compat::dplusf_power_of;
use jetinv_core::equations::{spectrum_identities, verify_ode, CompatConfig, RatFun, UniPoly};
use jetinv_core::harness::{emit_report, run_suite, Kind, Report, Suite, SuiteConfig};
use jetinv_core::jetspace::binomial;
use jetinv_core::sampling::{case_rng, random_nonzero_rational, random_rational};
use jetinv_core::scalar::{parse_rational, Scalar, Q};
use rand::Rng;

const SEED: u64 = 20260101;
/// Relative error bound for eigenvalue power sums and e-frame invariance.
const EIGEN_TOL: f64 = 1e-9;
/// Bound on the finite-difference `∇̂Q₂ = Q₃` residual.
const CHRISTOFFEL_TOL: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(s: Suite, n: usize, order: usize, trials: usize) -> SuiteConfig {
    SuiteConfig::new(s, n)
        .with_order(order)
        .with_trials(trials)
        .with_seed(SEED)
}

fn run(cfg: &SuiteConfig) -> Report {
    run_suite(cfg).unwrap_or_else(|e| panic!("{} failed to run: {e}", cfg.suite))
}

fn exact_failures(r: &Report) -> usize {
    r.records.iter().filter(|x| x.kind == Kind::Exact && !x.pass).count()
}

fn invariance() -> Outcome {
    let mut records = 0;
    let mut failures = 0;
    for n in 2..=4 {
        for order in 2..=4 {
            let r = run(&suite(Suite::Invariance, n, order, 50));
            records += r.records.len();
            failures += r.failures;
        }
    }
    Outcome {
        pass: failures == 0 && records > 0,
        detail: format!("{records} invariant comparisons over 9 (n, order) pairs, {failures} failures"),
    }
}

fn counts() -> Outcome {
    let mut problems = Vec::new();
    let mut checked = 0;
    for (n, top) in [(2, 5), (3, 4)] {
        let r = run(&suite(Suite::Counts, n, top, 10));
        for rec in &r.records {
            let lhs: usize = rec.lhs.parse().expect("rank");
            let rhs: usize = rec.rhs.parse().expect("rank");
            let want = if let Some(k) = rec.label.strip_prefix("rank of order <= ").and_then(|s| s.split(' ').next()) {
                let k: usize = k.parse().unwrap();
                match k {
                    0 => 1,
                    1 => 2,
                    _ => 2 + (2 * n - 1) + (3..=k).map(|t| binomial(n + t - 1, t)).sum::<usize>(),
                }
            } else {
                let k: usize = rec.label.rsplit(' ').next().unwrap().parse().unwrap();
                binomial(n + k - 2, k)
            };
            checked += 1;
            if lhs != want || rhs != want {
                problems.push(format!("n={n} {}: rank {lhs}, want {want}", rec.label));
            }
        }
    }
    Outcome {
        pass: problems.is_empty() && checked > 0,
        detail: if problems.is_empty() {
            format!("{checked} exact ranks match")
        } else {
            problems.join("; ")
        },
    }
}

fn identities() -> Outcome {
    let mut records = 0;
    let mut failures = 0;
    for n in [2, 3] {
        let r = run(&suite(Suite::Lowrel, n, 3, 100));
        records += r.records.len();
        failures += r.failures;
        let labels = ["Newton-Girard", "Cayley-Hamilton", "v1.I0 = I2_(0)", "v1.I1 = 2 I2_(1)"];
        for l in labels {
            if !r.records.iter().any(|x| x.label.starts_with(l)) {
                failures += 1;
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{records} exact relations at 100 jets per n, {failures} nonzero residuals"),
    }
}

fn syzygy() -> Outcome {
    let mut failures = 0;
    let mut records = 0;
    let mut displayed_nonzero = 0;
    for n in [2, 3] {
        for s in [2, 3] {
            let r = run(&suite(Suite::Syzygy, n, 3, 50).with_s(s));
            for rec in r.records.iter().filter(|x| x.label.starts_with("Leibniz")) {
                records += 1;
                failures += usize::from(!rec.pass);
                if rec.extra["residual_displayed"] != "0" {
                    displayed_nonzero += 1;
                }
            }
        }
    }
    Outcome {
        pass: failures == 0 && records == 200,
        detail: format!(
            "{records} oracle checks, {failures} failures; displayed form has nonzero residual in {displayed_nonzero} cases (recorded only)"
        ),
    }
}

fn eikonal_reports() -> Vec<Report> {
    [2, 3].iter().map(|&n| run(&suite(Suite::Eikonal, n, 4, 100))).collect()
}

fn eikonal_vanishing(reports: &[Report]) -> Outcome {
    let failures: usize = reports.iter().map(exact_failures).sum();
    let needed = ["det A = 0", "I2_(1) = 0", "v2 = 0", "det gamma = 0", "e1.I0 = 1", "I2_(1,1) = 0"];
    let missing: Vec<&str> = needed
        .iter()
        .copied()
        .filter(|l| !reports.iter().all(|r| r.records.iter().any(|x| x.label == *l)))
        .collect();
    let exact: usize = reports
        .iter()
        .map(|r| r.records.iter().filter(|x| x.kind == Kind::Exact).count())
        .sum();
    Outcome {
        pass: failures == 0 && missing.is_empty(),
        detail: format!("{exact} exact checks on 200 samples, {failures} failures, missing labels {missing:?}"),
    }
}

fn distinct_poles(rng: &mut impl Rng, m: usize) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    while out.len() < m {
        let a = random_rational(rng);
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

fn factorial(k: usize) -> Q {
    Q::from_int((1..=k as i64).product())
}

fn compat() -> Outcome {
    let mut problems: Vec<String> = Vec::new();
    let mut checks = 0;
    for n in 1..=5 {
        let mut rng = case_rng(SEED, n as u64);
        for _ in 0..20 {
            let m = rng.gen_range(1..=n);
            let poles = distinct_poles(&mut rng, m);
            let cfg = CompatConfig::new(n, poles.clone()).unwrap();
            checks += 1;
            if !verify_ode(&cfg).holds() {
                problems.push(format!("n={n} poles {poles:?}: ODE fails"));
            }
        }
        for _ in 0..20 {
            let d = rng.gen_range(1..=3);
            let mut c: Vec<Q> = (0..d).map(|_| random_rational(&mut rng)).collect();
            c.push(random_nonzero_rational(&mut rng));
            let f = RatFun::from_poly(UniPoly::new(c));
            checks += 1;
            if dplusf_power_of(&f, n + 1).is_zero() {
                problems.push(format!("n={n} polynomial {f}: ODE vanishes"));
            }
        }
    }
    // spectrum: λ_i = 1/(u0 − α_i) padded with zeros
    let mut rng = case_rng(SEED, 99);
    let n = 4;
    let mut done = 0;
    while done < 20 {
        let m = rng.gen_range(1..=n);
        let poles = distinct_poles(&mut rng, m);
        let u0 = random_rational(&mut rng);
        if poles.contains(&u0) {
            continue;
        }
        let cfg = CompatConfig::new(n, poles.clone()).unwrap();
        let f = cfg.f();
        let mut lambda: Vec<Q> = poles.iter().map(|a| Q::one() / (u0.clone() - a.clone())).collect();
        lambda.resize(n, Q::zero());
        let power = |k: usize| lambda.iter().fold(Q::zero(), |acc, l| acc + (0..k).fold(Q::one(), |p, _| p * l.clone()));
        let fk = |k: usize| f.nth_derivative(k).eval(&u0).unwrap();
        let pinned = [
            (power(1), fk(0)),
            (power(2), -fk(1)),
            (power(3), fk(2) / Q::from_int(2)),
            (power(4), -fk(3) / Q::from_int(6)),
        ];
        for (k, (a, b)) in pinned.iter().enumerate() {
            checks += 1;
            if a != b {
                problems.push(format!("S{} at u0={u0}", k + 1));
            }
        }
        // E_k from the expanded product Π(1 + λ_i t)
        let mut e = vec![Q::one()];
        for l in &lambda {
            let mut next = e.clone();
            next.push(Q::zero());
            for (i, c) in e.iter().enumerate() {
                next[i + 1] = next[i + 1].clone() + c.clone() * l.clone();
            }
            e = next;
        }
        for k in 1..=n {
            checks += 1;
            let want = dplusf_power_of(&f, k).eval(&u0).unwrap() / factorial(k);
            if e[k] != want {
                problems.push(format!("E{k} at u0={u0}"));
            }
        }
        checks += 1;
        if spectrum_identities(&cfg, &u0).unwrap().failures() != 0 {
            problems.push(format!("spectrum report at u0={u0}"));
        }
        done += 1;
    }
    let example = run(
        &SuiteConfig::new(Suite::Compat, 3)
            .with_alphas(vec![parse_rational("0").unwrap(), parse_rational("1").unwrap()])
            .with_trials(5)
            .with_seed(SEED),
    );
    checks += 1;
    if !example.passed() {
        problems.push("compat suite with poles 0,1".into());
    }
    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{checks} exact checks")
        } else {
            problems.join("; ")
        },
    }
}

fn forms() -> Outcome {
    let mut failures = 0;
    let mut records = 0;
    let mut contact_points = 0;
    for n in [2, 3] {
        let r = run(&suite(Suite::Forms, n, 3, 10));
        failures += r.failures;
        records += r.records.len();
        contact_points += r.records.iter().filter(|x| x.label.starts_with("theta ^ dtheta")).count();
        for k in 1..=n + 1 {
            let label = format!("Omega_{k} matches the closed form");
            if !r.records.iter().any(|x| x.label == label) {
                failures += 1;
            }
        }
    }
    Outcome {
        pass: failures == 0 && contact_points >= 10,
        detail: format!("{records} coefficient-level checks, {contact_points} contact points, {failures} failures"),
    }
}

fn numeric(eikonal: &[Report]) -> Outcome {
    let mut problems = Vec::new();
    let mut power_sums = 0;
    for n in [2, 3] {
        let r = run(&suite(Suite::Frames, n, 3, 100).with_tolerance(EIGEN_TOL));
        for rec in &r.records {
            if rec.label.starts_with("sum lambda^") {
                power_sums += 1;
            }
            let limit = match rec.label.as_str() {
                l if l.starts_with("sum lambda^") => Some(EIGEN_TOL),
                "e-frame structure constants are invariant" => Some(EIGEN_TOL),
                _ => None,
            };
            let within = match (rec.kind, limit) {
                (Kind::Numeric, Some(t)) => rec.residual.parse::<f64>().unwrap() < t,
                _ => rec.pass,
            };
            if !within {
                problems.push(format!("n={n} case {} {}: {}", rec.case, rec.label, rec.residual));
            }
        }
    }
    let mut christoffel = 0;
    let mut worst = 0.0_f64;
    for r in eikonal {
        for rec in r.records.iter().filter(|x| x.kind == Kind::Numeric) {
            christoffel += 1;
            let v: f64 = rec.residual.parse().unwrap();
            worst = worst.max(v);
            if v >= CHRISTOFFEL_TOL {
                problems.push(format!("Christoffel case {}: {v}", rec.case));
            }
        }
    }
    Outcome {
        pass: problems.is_empty() && power_sums > 0 && christoffel > 0,
        detail: if problems.is_empty() {
            format!("{power_sums} power sums, {christoffel} Christoffel checks (worst {worst:.2e})")
        } else {
            problems.join("; ")
        },
    }
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("jetinv-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let configs = [
        suite(Suite::Syzygy, 3, 3, 20),
        suite(Suite::Frames, 3, 3, 20),
        suite(Suite::Eikonal, 2, 4, 20),
        suite(Suite::Forms, 2, 3, 5),
    ];
    let mut mismatched = Vec::new();
    for cfg in &configs {
        let a = dir.join(format!("{}-a.json", cfg.suite));
        let b = dir.join(format!("{}-b.json", cfg.suite));
        emit_report(&run(cfg), &a).unwrap();
        emit_report(&run(cfg), &b).unwrap();
        if std::fs::read(&a).unwrap() != std::fs::read(&b).unwrap() {
            mismatched.push(cfg.suite.name());
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome {
        pass: mismatched.is_empty(),
        detail: format!("{} suites re-run, mismatched: {mismatched:?}", configs.len()),
    }
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags; a listing request gets an empty list.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let eik = eikonal_reports();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("invariance", Box::new(invariance)),
        ("counts", Box::new(counts)),
        ("algebraic identities", Box::new(identities)),
        ("syzygy oracle", Box::new(syzygy)),
        ("eikonal vanishing", Box::new(|| eikonal_vanishing(&eik))),
        ("compatibility ODE", Box::new(compat)),
        ("omega recursion", Box::new(forms)),
        ("numeric cross-checks", Box::new(|| numeric(&eik))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} {}. {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
