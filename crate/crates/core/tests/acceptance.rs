//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use genhill::diagnostics::{pooled_malmquist, validate, McConfig, ValidationMode, ValidationReport};
use genhill::estimators::{hill, order_statistics, weibull_transform};
use genhill::evt::{check_conditions, gamma_power};
use genhill::limit::{mgf_l_joint_eval, sample_limit_l, LimitLawSpec, MgfFormula};
use genhill::tail::{sample_iid, sample_top_order_stats, RngStream};
use genhill::{Model, Result, SlowVary, Weight};

const SEED: u64 = 20240501;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn pow(t: f64) -> Weight {
    Weight::power(t).expect("valid exponent")
}

fn gates_detail(r: &ValidationReport) -> String {
    r.gates
        .iter()
        .map(|g| format!("{}={:.5} ({})", g.name, g.value, g.rule))
        .collect::<Vec<_>>()
        .join(", ")
}

fn from_report(r: ValidationReport) -> Outcome {
    Outcome {
        passed: r.passed,
        detail: gates_detail(&r),
    }
}

fn hill_consistency() -> Result<Outcome> {
    let model = Model::pareto(0.5)?;
    let (n, k, reps) = (100_000, 1_000, 500);
    let mut total = 0.0;
    for r in 0..reps {
        let os = sample_top_order_stats(&model, n, k, RngStream::new(SEED, 0).child(r))?;
        total += hill(&os);
    }
    let mean = total / reps as f64;
    Ok(Outcome {
        passed: (0.495..=0.505).contains(&mean),
        detail: format!("mean Hill = {mean:.5} (in [0.495, 0.505])"),
    })
}

fn normality() -> Result<Outcome> {
    let c = McConfig::new(Model::pareto(1.0)?, vec![pow(1.0)], 10_000, 300, 2000, SEED);
    Ok(from_report(validate(ValidationMode::Normality, &c, &[])?))
}

fn limit_law() -> Result<Outcome> {
    let mut c = McConfig::new(Model::pareto(1.0)?, vec![pow(0.25)], 10_000, 300, 2000, SEED);
    c.limit_tol = 1e-6;
    let r = validate(ValidationMode::LimitLaw, &c, &[])?;
    let j = r.monte_carlo.as_ref().map(|m| m.limit_draws[0].truncation_j).unwrap_or(0);
    let mut o = from_report(r);
    o.detail.push_str(&format!(", J={j}"));
    Ok(o)
}

fn gumbel_branch() -> Result<Outcome> {
    let model = Model::gumbel(0.0, 1.0, SlowVary::zero(), SlowVary::zero())?;
    let c = McConfig::new(model, vec![pow(1.0)], 10_000, 300, 2000, SEED);
    Ok(from_report(validate(ValidationMode::Normality, &c, &[])?))
}

fn covariance() -> Result<Outcome> {
    let mut passed = true;
    let mut detail = Vec::new();
    for (i, (a, b)) in [(1.0, 0.75), (1.0, 10.0), (0.8, 0.8)].into_iter().enumerate() {
        let c = McConfig::new(Model::pareto(1.0)?, vec![pow(a), pow(b)], 10_000, 300, 2000, SEED + i as u64);
        let r = validate(ValidationMode::Covariance, &c, &[])?;
        let corr = r.monte_carlo.as_ref().and_then(|m| m.empirical_corr.as_ref()).map(|m| m[0][1]).unwrap_or(f64::NAN);
        let target = gamma_power(a, b)?;
        passed &= r.passed;
        if a == b {
            passed &= corr == 1.0;
        }
        detail.push(format!("({a},{b}): corr={corr:.4} target={target:.4}"));
    }
    Ok(Outcome {
        passed,
        detail: detail.join(", ") + " (|diff| <= 0.03)",
    })
}

fn malmquist() -> Result<Outcome> {
    let c = McConfig::new(Model::pareto(1.0)?, vec![pow(1.0)], 10_000, 10, 1000, SEED);
    let count = pooled_malmquist(&c)?.len();
    let mut o = from_report(validate(ValidationMode::Malmquist, &c, &[])?);
    o.detail.push_str(&format!(", pooled={count}"));
    Ok(o)
}

fn semimetric() -> Result<Outcome> {
    let c = McConfig::new(Model::pareto(1.0)?, vec![pow(0.9), pow(0.6)], 10, 5, 2, SEED);
    let r = validate(ValidationMode::Rho, &c, &[100, 1_000, 10_000, 100_000])?;
    let trace = r
        .rho_trace
        .as_ref()
        .map(|t| t.iter().map(|p| format!("{}:{:.4}", p.k, p.rho_sq)).collect::<Vec<_>>().join(" "))
        .unwrap_or_default();
    let mut o = from_report(r);
    o.detail.push_str(&format!(", trace {trace}, limit 0.4"));
    Ok(o)
}

fn mgf() -> Result<Outcome> {
    let f = pow(0.0);
    let spec = LimitLawSpec::new(f.clone(), 1e-6)?;
    let draws = sample_limit_l(&spec, RngStream::new(SEED, 8), 1_000_000)?;
    let mut passed = true;
    let mut detail = Vec::new();
    for t in [-0.3, 0.3] {
        let exact = mgf_l_joint_eval(std::slice::from_ref(&f), &[t], 1e-12, MgfFormula::Derived)?.value;
        let emp = draws.iter().map(|x| (t * x).exp()).sum::<f64>() / draws.len() as f64;
        let rel = ((emp - exact) / exact).abs();
        passed &= rel < 0.02;
        detail.push(format!("t={t}: rel err {rel:.5}"));
    }
    let h = 1e-3;
    let ln = |t: f64| mgf_l_joint_eval(std::slice::from_ref(&f), &[t], 1e-13, MgfFormula::Derived).map(|e| e.ln_value);
    let second = (ln(h)? - 2.0 * ln(0.0)? + ln(-h)?) / (h * h);
    passed &= (second - 1.0).abs() < 1e-4;
    detail.push(format!("d2 log M(0) = {second:.7}"));
    Ok(Outcome {
        passed,
        detail: detail.join(", ") + " (< 0.02, within 1e-4)",
    })
}

fn weibull() -> Result<Outcome> {
    let model = Model::weibull(0.5, 0.0, 1.0, SlowVary::zero(), SlowVary::zero())?;
    let y = sample_iid(&model, 100_000, RngStream::new(SEED, 9))?;
    let z = weibull_transform(&y, 0.0)?;
    let h = hill(&order_statistics(&z, 1_000)?);
    Ok(Outcome {
        passed: (0.45..=0.55).contains(&h),
        detail: format!("Hill on transformed data = {h:.5} (in [0.45, 0.55])"),
    })
}

fn perturbation() -> Result<Outcome> {
    let p = SlowVary::power(0.2, 0.5)?;
    let b = SlowVary::power(0.1, 0.5)?;
    let model = Model::frechet(0.5, 1.0, p.clone(), b.clone())?;
    let n = 100_000;
    let k = (n as f64).powf(0.4).floor() as usize;
    let c = McConfig::new(model, vec![pow(1.0)], n, k, 1000, SEED);
    let r = validate(ValidationMode::Normality, &c, &[])?;
    let ks_ok = r.passed;
    let mut c1 = Vec::new();
    let mut c3 = Vec::new();
    for n in [1_000usize, 10_000, 100_000] {
        let k = (n as f64).powf(0.4).floor() as usize;
        let rep = check_conditions(&p, &b, &pow(1.0), n, k, 2.0)?;
        c1.push(rep.ratio_c1);
        c3.push(rep.ratio_c3);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let cond_ok = decreasing(&c1) && decreasing(&c3);
    Ok(Outcome {
        passed: ks_ok && cond_ok,
        detail: format!(
            "{} (k={k}); ratio_c1 {:?} decreasing={}; ratio_c3 {:?} decreasing={}",
            gates_detail(&r),
            c1.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>(),
            decreasing(&c1),
            c3.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>(),
            decreasing(&c3),
        ),
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 hill consistency", hill_consistency),
        ("2 asymptotic normality", normality),
        ("3 series limit law", limit_law),
        ("4 gumbel branch", gumbel_branch),
        ("5 covariance structure", covariance),
        ("6 malmquist identity", malmquist),
        ("7 semimetric limit", semimetric),
        ("8 mgf consistency", mgf),
        ("9 weibull transform", weibull),
        ("10 perturbation robustness", perturbation),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (verdict, detail) = match run() {
            Ok(o) => (if o.passed { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("criterion {name}: {verdict} [{:.1}s] {detail}", start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 10 passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
