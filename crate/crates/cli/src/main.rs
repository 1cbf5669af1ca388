use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use genhill::diagnostics::{validate, McConfig, ValidationMode};
use genhill::estimators::{hill, parse_values, plugin_scale, Domain, GhpResult, OrderedSample, ScaleMode};
use genhill::evt::Extension;
use genhill::limit::{mgf_l_joint_eval, sample_limit_l, LimitLawSpec, MgfFormula, DEFAULT_LIMIT_TOL};
use genhill::tail::{sample_iid, RngStream};
use genhill::{Error, Model, Weight};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_NUMERIC: u8 = 4;
const EXIT_GATE: u8 = 5;
const EXIT_INSUFFICIENT: u8 = 6;
const EXIT_POSITIVITY: u8 = 7;

#[derive(Debug, Parser)]
#[command(name = "genhill", version, about = "Generalized Hill statistics: estimation, simulation and limit-law checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute T_n(f), Hill and studentized values from a data file.
    Estimate(EstimateArgs),
    /// Sample raw values exp(Y) from a tail model.
    Simulate(SimulateArgs),
    /// Run a gated Monte Carlo check.
    Validate(ValidateArgs),
    /// Draw from the series law L(f).
    LimitSample(LimitSampleArgs),
    /// Evaluate the joint moment generating function of (L(f_1), ..., L(f_S)).
    Mgf(MgfArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model spec, e.g. "frechet gamma=0.5 p.c=0.2 p.beta=0.5".
    #[arg(long)]
    model: Option<String>,
    /// Extreme value index; alone it selects the pure Pareto model.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "k_grid")]
    k: Option<usize>,
    /// Inclusive range a:b:step.
    #[arg(long)]
    k_grid: Option<String>,
    #[arg(long, default_value = "pow:1")]
    weights: String,
    #[arg(long, default_value = "plugin")]
    scale: String,
    /// True extreme value index, used as the scale in oracle mode.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    mode: String,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 300)]
    k: usize,
    #[arg(long)]
    k_grid: Option<String>,
    #[arg(long, default_value = "pow:1")]
    weights: String,
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "oracle")]
    scale: String,
    /// Truncation tolerance of the series-law sampler.
    #[arg(long, default_value_t = DEFAULT_LIMIT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitSampleArgs {
    #[arg(long, default_value = "pow:0")]
    weights: String,
    /// Number of draws.
    #[arg(long, visible_alias = "n", default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LIMIT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MgfArgs {
    #[arg(long)]
    weights: String,
    /// Comma-separated arguments, one per weight.
    #[arg(long, allow_negative_numbers = true)]
    t: String,
    #[arg(long, default_value = "derived")]
    formula: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } => EXIT_DATA,
            Error::InsufficientData { .. } => EXIT_INSUFFICIENT,
            Error::Positivity { .. } => EXIT_POSITIVITY,
            Error::Config(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Simulate(a) => simulate(a),
        Command::Validate(a) => run_validate(a),
        Command::LimitSample(a) => limit_sample(a),
        Command::Mgf(a) => mgf(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("genhill: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

fn echo(buf: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(buf, "# {key} = {value}");
}

fn model_text(model: &Model) -> String {
    let text = model.to_string();
    text.strip_prefix("model=").map(str::to_string).unwrap_or(text)
}

fn parse_weights(list: &str) -> CliResult<Vec<Weight>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(path) = item.strip_prefix("file:") {
            let path = Path::new(path);
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            out.push(Weight::parse_table(&text, Extension::Undeclared)?);
        } else {
            out.push(Weight::parse_power(item)?);
        }
    }
    if out.is_empty() {
        return Err(usage("empty weight list"));
    }
    Ok(out)
}

fn parse_k_grid(spec: &str) -> CliResult<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("k grid `{spec}` is not a:b:step with positive integers"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if a == 0 || step == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

fn parse_model(args: &ModelArgs) -> CliResult<Model> {
    let spec = match (&args.model, args.gamma) {
        (None, None) => return Err(usage("a model is required: --model SPEC or --gamma G")),
        (None, Some(g)) => format!("model=frechet gamma={g}"),
        (Some(m), g) => {
            let mut spec = m.trim().to_string();
            if !spec.split_whitespace().next().is_some_and(|t| t.contains('=')) {
                spec = format!("model={spec}");
            }
            if let Some(g) = g {
                if spec.split_whitespace().any(|t| t.starts_with("gamma=")) {
                    return Err(usage("gamma given both in --model and --gamma"));
                }
                spec.push_str(&format!(" gamma={g}"));
            }
            spec
        }
    };
    Ok(spec.parse()?)
}

fn parse_scale(s: &str) -> CliResult<ScaleMode> {
    Ok(s.parse()?)
}

fn estimate(a: EstimateArgs) -> CliResult<()> {
    let weights = parse_weights(&a.weights)?;
    let ks = match (&a.k, &a.k_grid) {
        (Some(k), None) => vec![*k],
        (None, Some(g)) => parse_k_grid(g)?,
        _ => return Err(usage("one of --k or --k-grid is required")),
    };
    let scale_mode = parse_scale(&a.scale)?;
    if scale_mode == ScaleMode::Oracle && a.gamma.is_none() {
        return Err(usage("oracle scale needs the true --gamma"));
    }
    let text = fs::read_to_string(&a.input).map_err(|e| io_failure(&a.input, e))?;
    let data: Vec<f64> = parse_values(&text)?;
    let k_max = *ks.iter().max().expect("nonempty grid");
    let full = OrderedSample::from_data(&data, k_max)?;

    let mut buf = String::new();
    echo(&mut buf, "command", "estimate");
    echo(&mut buf, "input", a.input.display());
    echo(&mut buf, "n", full.n());
    echo(&mut buf, "k", ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    echo(&mut buf, "weights", weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","));
    echo(&mut buf, "scale_mode", scale_mode);
    if let Some(g) = a.gamma {
        echo(&mut buf, "gamma", g);
    }
    echo(&mut buf, "seed", a.seed);
    buf.push_str("k\tweight\tt_n\thill\ta_n\tsigma_n\tscale\tv_frechet\tv_gumbel\n");
    for &k in &ks {
        let os = full.truncated(k)?;
        let h = hill(&os);
        let scale = match scale_mode {
            ScaleMode::Oracle => Ok(a.gamma.expect("checked above")),
            ScaleMode::Plugin => plugin_scale(&os, Domain::Frechet),
        };
        for w in &weights {
            let r = GhpResult::compute(w, &os)?;
            let (s, vf, vg) = match scale {
                Ok(s) => {
                    let r = r.clone().with_scale(s, scale_mode)?;
                    (s.to_string(), fmt_opt(r.v_frechet), fmt_opt(r.v_gumbel))
                }
                Err(_) => ("NA".into(), "NA".into(), "NA".into()),
            };
            let _ = writeln!(
                buf,
                "{k}\t{w}\t{}\t{h}\t{}\t{}\t{s}\t{vf}\t{vg}",
                r.t_n, r.norms.a_n, r.norms.sigma_n
            );
        }
    }
    emit(a.out.as_deref(), &buf)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |x| x.to_string())
}

fn simulate(a: SimulateArgs) -> CliResult<()> {
    let model = parse_model(&a.model)?;
    let ys = sample_iid(&model, a.n, RngStream::new(a.seed, 0))?;
    let mut buf = String::new();
    echo(&mut buf, "command", "simulate");
    echo(&mut buf, "model", model_text(&model));
    echo(&mut buf, "n", a.n);
    echo(&mut buf, "seed", a.seed);
    for y in ys {
        let _ = writeln!(buf, "{}", y.exp());
    }
    emit(a.out.as_deref(), &buf)
}

fn run_validate(a: ValidateArgs) -> CliResult<()> {
    let mode: ValidationMode = a.mode.parse().map_err(|e: Error| usage(e.to_string()))?;
    let model = match mode {
        ValidationMode::Malmquist | ValidationMode::Rho if a.model.model.is_none() && a.model.gamma.is_none() => {
            Model::pareto(1.0)?
        }
        _ => parse_model(&a.model)?,
    };
    let weights = parse_weights(&a.weights)?;
    let scale_mode = parse_scale(&a.scale)?;
    let k_grid = match &a.k_grid {
        Some(g) => parse_k_grid(g)?,
        None => Vec::new(),
    };
    if a.reps == 0 {
        return Err(usage("--reps must be positive"));
    }
    let mut config = McConfig::new(model, weights, a.n, a.k, a.reps, a.seed).with_scale_mode(scale_mode);
    config.limit_tol = a.tol;
    let report = validate(mode, &config, &k_grid)?;

    let mut buf = String::new();
    echo(&mut buf, "command", "validate");
    echo(&mut buf, "mode", mode);
    echo(&mut buf, "model", model_text(&config.model));
    echo(&mut buf, "weights", config.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","));
    echo(&mut buf, "n", config.n);
    echo(&mut buf, "k", config.k);
    if !k_grid.is_empty() {
        echo(&mut buf, "k_grid", a.k_grid.as_deref().unwrap_or(""));
    }
    echo(&mut buf, "reps", config.reps);
    echo(&mut buf, "seed", config.seed);
    echo(&mut buf, "scale_mode", scale_mode);
    echo(&mut buf, "tol", config.limit_tol);
    buf.push_str(&report.to_toml()?);
    emit(a.out.as_deref(), &buf)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .failed_gates()
            .map(|g| format!("{} = {} (needs {})", g.name, g.value, g.rule))
            .collect();
        Err(Failure {
            code: EXIT_GATE,
            message: format!("gate failed: {}", failed.join("; ")),
        })
    }
}

fn limit_sample(a: LimitSampleArgs) -> CliResult<()> {
    let mut weights = parse_weights(&a.weights)?;
    if weights.len() != 1 {
        return Err(usage("limit-sample takes exactly one weight"));
    }
    let spec = LimitLawSpec::new(weights.remove(0), a.tol)?;
    let draws = sample_limit_l(&spec, RngStream::new(a.seed, 0), a.count)?;
    let mut buf = String::new();
    echo(&mut buf, "command", "limit-sample");
    echo(&mut buf, "weight", spec.weight());
    echo(&mut buf, "count", a.count);
    echo(&mut buf, "seed", a.seed);
    echo(&mut buf, "tol", a.tol);
    let _ = writeln!(buf, "# J={}", spec.truncation_j());
    let _ = writeln!(buf, "# tail_var_bound={}", spec.tail_var_bound());
    let _ = writeln!(buf, "# tail_variance={}", spec.tail_variance());
    let _ = writeln!(buf, "# cumulant_bound={}", spec.cumulant_bound());
    for x in draws {
        let _ = writeln!(buf, "{x}");
    }
    emit(a.out.as_deref(), &buf)
}

fn mgf(a: MgfArgs) -> CliResult<()> {
    let weights = parse_weights(&a.weights)?;
    let t: Vec<f64> = a
        .t
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("bad argument `{s}` in --t"))))
        .collect::<CliResult<_>>()?;
    let formula: MgfFormula = a.formula.parse()?;
    let r = mgf_l_joint_eval(&weights, &t, a.tol, formula)?;
    let mut buf = String::new();
    echo(&mut buf, "command", "mgf");
    echo(&mut buf, "weights", weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","));
    echo(&mut buf, "t", &a.t);
    echo(&mut buf, "formula", formula);
    echo(&mut buf, "tol", a.tol);
    buf.push_str("value\tln_value\tcutoff\tln_error_bound\n");
    let _ = writeln!(buf, "{}\t{}\t{}\t{}", r.value, r.ln_value, r.cutoff, r.ln_error_bound);
    emit(a.out.as_deref(), &buf)
}
