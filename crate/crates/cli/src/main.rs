//! `robin` — robust estimation for binary regression models.
//!
//! Subcommands: `fit`, `predict`, `diagnose`, `simulate`, `gen`.
//! Exit codes: 0 success (fit converged), 2 fit finished without
//! convergence, 1 usage/validation/io errors.

mod io;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use robin_core::diagnostics::boundedness_scan;
use robin_core::estimation::fit;
use robin_core::model::conditional_prob;
use robin_core::simulation::{
    default_failure_threshold, gen_case_a, gen_case_b, gen_scenario1, run_monte_carlo,
};
use robin_core::{
    CaseAConfig, CaseBConfig, FitOptions, FitStatus, Link, LossSpec, Scenario1Config,
    ScenarioConfig, TailClassification,
};

#[derive(Parser)]
#[command(
    name = "robin",
    version,
    about = "Robust estimation for binary regression models with general link functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a dataset CSV (header y,x1,...,xd)
    Fit(FitArgs),
    /// Predict probabilities and labels for a dataset with a fitted model
    Predict(PredictArgs),
    /// Scan the contamination effect b(y, z, z') and classify its tails
    Diagnose(DiagnoseArgs),
    /// Run a Monte Carlo experiment and write the accuracy report CSV
    Simulate(SimulateArgs),
    /// Generate synthetic train/test datasets to CSV
    Gen(GenArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Training data CSV
    data: PathBuf,
    /// Link function: logit, probit, cloglog or cauchit
    #[arg(long, default_value = "logit")]
    link: String,
    /// Loss: ml, beta:<float> or gamma:<float>
    #[arg(long, default_value = "ml")]
    loss: String,
    /// Output model file
    #[arg(long, default_value = "model.txt")]
    out: PathBuf,
    /// Iteration cap for the optimizer
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    /// Infinity-norm gradient tolerance
    #[arg(long, default_value_t = 1e-8)]
    gradient_tolerance: f64,
    /// Relative risk-decrease tolerance
    #[arg(long, default_value_t = 1e-10)]
    risk_tolerance: f64,
}

#[derive(Args)]
struct PredictArgs {
    /// Model file written by `fit`
    model: PathBuf,
    /// Dataset CSV to score
    data: PathBuf,
    /// Classification threshold on q(1|x)
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Output CSV (columns q1,label)
    #[arg(long, default_value = "predictions.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Link function
    #[arg(long)]
    link: String,
    /// Loss spec
    #[arg(long)]
    loss: String,
    /// Label whose loss is perturbed
    #[arg(long, default_value_t = 1)]
    y: u8,
    /// Contamination target z'
    #[arg(long = "z-prime", default_value_t = 0.0)]
    z_prime: f64,
    /// Grid start (default -30, or -100 for cauchit)
    #[arg(long = "z-min")]
    z_min: Option<f64>,
    /// Grid end (default 30, or 100 for cauchit)
    #[arg(long = "z-max")]
    z_max: Option<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 1201)]
    points: usize,
    /// Output CSV (columns z,b)
    #[arg(long, default_value = "scan.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct Scenario1Opts {
    /// Training sample size
    #[arg(long)]
    n: usize,
    /// Signal strength of theta* = (0, a, -a)
    #[arg(long)]
    a: f64,
    /// Label contamination rate
    #[arg(long = "pout")]
    p_out: f64,
    /// Test sample size
    #[arg(long = "test-n", default_value_t = 50_000)]
    test_n: usize,
}

#[derive(Args)]
struct CaseAOpts {
    /// Training sample size
    #[arg(long)]
    n: usize,
    /// Class-1 rate
    #[arg(long)]
    r: f64,
    /// Per-coordinate mean offset of class 1
    #[arg(long = "D")]
    mean_distance: f64,
    /// Class-0 covariance scale
    #[arg(long)]
    s: f64,
    /// Test sample size
    #[arg(long = "test-n", default_value_t = 50_000)]
    test_n: usize,
}

#[derive(Args)]
struct CaseBOpts {
    /// Training sample size
    #[arg(long)]
    n: usize,
    /// Class-1 rate
    #[arg(long)]
    r: f64,
    /// Per-coordinate mean offset of class 1
    #[arg(long = "D")]
    mean_distance: f64,
    /// Degrees of freedom for class-1 coordinates
    #[arg(long)]
    nu1: f64,
    /// Degrees of freedom for class-0 coordinates
    #[arg(long)]
    nu0: f64,
    /// Test sample size
    #[arg(long = "test-n", default_value_t = 50_000)]
    test_n: usize,
}

#[derive(Args)]
struct McOpts {
    /// Comma-separated loss specs, e.g. ml,beta:0.5,gamma:-2
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    /// Number of Monte Carlo replicates
    #[arg(long)]
    replicates: usize,
    /// Base seed; replicate k uses base_seed XOR k
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Failures at or above this count emit the -- marker
    /// (default: a tenth of the replicates, rounded up)
    #[arg(long = "failure-threshold")]
    failure_threshold: Option<usize>,
    /// Link used for fitting
    #[arg(long, default_value = "logit")]
    link: String,
    /// Output report CSV
    #[arg(long, default_value = "report.csv")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SimScenario {
    #[command(name = "scenario1")]
    Scenario1 {
        #[command(flatten)]
        cfg: Scenario1Opts,
        #[command(flatten)]
        run: McOpts,
    },
    #[command(name = "caseA")]
    CaseA {
        #[command(flatten)]
        cfg: CaseAOpts,
        #[command(flatten)]
        run: McOpts,
    },
    #[command(name = "caseB")]
    CaseB {
        #[command(flatten)]
        cfg: CaseBOpts,
        #[command(flatten)]
        run: McOpts,
    },
}

#[derive(Args)]
struct GenOut {
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Training CSV path
    #[arg(long = "train-out", default_value = "train.csv")]
    train_out: PathBuf,
    /// Test CSV path
    #[arg(long = "test-out", default_value = "test.csv")]
    test_out: PathBuf,
}

#[derive(Subcommand)]
enum GenScenario {
    #[command(name = "scenario1")]
    Scenario1 {
        #[command(flatten)]
        cfg: Scenario1Opts,
        #[command(flatten)]
        out: GenOut,
    },
    #[command(name = "caseA")]
    CaseA {
        #[command(flatten)]
        cfg: CaseAOpts,
        #[command(flatten)]
        out: GenOut,
    },
    #[command(name = "caseB")]
    CaseB {
        #[command(flatten)]
        cfg: CaseBOpts,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[command(subcommand)]
    scenario: SimScenario,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    scenario: GenScenario,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Diagnose(args) => cmd_diagnose(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn cmd_fit(args: FitArgs) -> Result<u8> {
    let link: Link = args.link.parse()?;
    let spec: LossSpec = args.loss.parse()?;
    let data = io::read_dataset(&args.data)?;
    if data.labels().iter().all(|&y| y == data.label(0)) {
        eprintln!(
            "warning: all labels are {}; the optimum may lie at infinity",
            data.label(0)
        );
    }
    let options = FitOptions {
        max_iterations: args.max_iterations,
        gradient_tolerance: args.gradient_tolerance,
        risk_relative_tolerance: args.risk_tolerance,
        ..FitOptions::default()
    };
    options.validate()?;
    let result = fit(spec, link, &data, &options)?;
    io::write_model(&args.out, link, spec, &result)?;
    println!(
        "status: {} (risk {:.6e}, gradient {:.3e}, {} iterations) -> {}",
        result.status.as_str(),
        result.final_risk,
        result.gradient_norm,
        result.iterations,
        args.out.display()
    );
    Ok(if result.status == FitStatus::Converged { 0 } else { 2 })
}

fn cmd_predict(args: PredictArgs) -> Result<u8> {
    if !(0.0..=1.0).contains(&args.threshold) {
        bail!("threshold must lie in [0, 1], got {}", args.threshold);
    }
    let model = io::read_model(&args.model)?;
    let data = io::read_dataset(&args.data)?;
    if model.theta.feature_dim() != data.feature_dim() {
        bail!(
            "model expects {} feature(s) but the dataset has {}",
            model.theta.feature_dim(),
            data.feature_dim()
        );
    }
    if model.status != FitStatus::Converged {
        eprintln!("warning: model status is {}", model.status.as_str());
    }
    let mut out = io::manifest(&[
        ("model", format!("{} {}", model.link, model.spec)),
        ("threshold", args.threshold.to_string()),
    ]);
    out.push_str("q1,label\n");
    for (x, _) in data.rows() {
        let q1 = conditional_prob(model.link, &model.theta, x, 1)?;
        let label = u8::from(q1 >= args.threshold);
        let _ = writeln!(out, "{},{label}", io::fmt_f64(q1));
    }
    std::fs::write(&args.out, out)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!("wrote {} prediction(s) -> {}", data.n(), args.out.display());
    Ok(0)
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<u8> {
    let link: Link = args.link.parse()?;
    let spec: LossSpec = args.loss.parse()?;
    if args.points < 2 {
        bail!("grid needs at least 2 points, got {}", args.points);
    }
    let default_half_width = if link == Link::Cauchit { 100.0 } else { 30.0 };
    let lo = args.z_min.unwrap_or(-default_half_width);
    let hi = args.z_max.unwrap_or(default_half_width);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        bail!("invalid grid [{lo}, {hi}]");
    }
    let step = (hi - lo) / (args.points - 1) as f64;
    let grid: Vec<f64> = (0..args.points).map(|i| lo + i as f64 * step).collect();
    let report = boundedness_scan(spec, link, args.y, args.z_prime, &grid)?;

    let mut out = io::manifest(&[
        ("link", link.to_string()),
        ("loss", spec.to_string()),
        ("y", args.y.to_string()),
        ("z_prime", args.z_prime.to_string()),
    ]);
    out.push_str("z,b\n");
    for (z, b) in report.grid.iter().zip(&report.values) {
        let _ = writeln!(out, "{},{}", io::fmt_f64(*z), io::fmt_f64(*b));
    }
    std::fs::write(&args.out, out)
        .with_context(|| format!("cannot write {}", args.out.display()))?;

    let verdict = match report.tail_classification {
        TailClassification::Bounded => "bounded",
        TailClassification::Diverging => "diverging",
    };
    println!("{verdict}");
    Ok(0)
}

fn parse_methods(methods: &[String]) -> Result<Vec<LossSpec>> {
    methods.iter().map(|m| Ok(m.parse::<LossSpec>()?)).collect()
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8> {
    let (config, run) = match args.scenario {
        SimScenario::Scenario1 { cfg, run } => (
            ScenarioConfig::Scenario1(Scenario1Config::new(cfg.n, cfg.a, cfg.p_out, cfg.test_n)?),
            run,
        ),
        SimScenario::CaseA { cfg, run } => (
            ScenarioConfig::CaseA(CaseAConfig::new(
                cfg.n,
                cfg.r,
                cfg.mean_distance,
                cfg.s,
                cfg.test_n,
            )?),
            run,
        ),
        SimScenario::CaseB { cfg, run } => (
            ScenarioConfig::CaseB(CaseBConfig::new(
                cfg.n,
                cfg.r,
                cfg.mean_distance,
                cfg.nu1,
                cfg.nu0,
                cfg.test_n,
            )?),
            run,
        ),
    };
    // validate every method string before any computation
    let methods = parse_methods(&run.methods)?;
    let link: Link = run.link.parse()?;
    let threshold = run
        .failure_threshold
        .unwrap_or_else(|| default_failure_threshold(run.replicates));
    let report = run_monte_carlo(&config, link, &methods, run.replicates, threshold, run.seed)?;

    let mut out = io::manifest(&[
        ("config", config.describe()),
        ("link", link.to_string()),
        ("seed", run.seed.to_string()),
        ("replicates", run.replicates.to_string()),
        ("failure_threshold", threshold.to_string()),
    ]);
    out.push_str("setting,method,mean_accuracy,n_failures,n_replicates\n");
    for row in &report.rows {
        let mean = match row.mean_accuracy {
            Some(v) => format!("{v:.3}"),
            None => "--".to_string(),
        };
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{}",
            row.setting, row.method, mean, row.n_failures, row.n_replicates
        );
    }
    std::fs::write(&run.out, out)
        .with_context(|| format!("cannot write {}", run.out.display()))?;
    println!("wrote {} row(s) -> {}", report.rows.len(), run.out.display());
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> Result<u8> {
    let (train, test, describe, out) = match args.scenario {
        GenScenario::Scenario1 { cfg, out } => {
            let config = Scenario1Config::new(cfg.n, cfg.a, cfg.p_out, cfg.test_n)?;
            let data = gen_scenario1(&config, out.seed);
            let describe = format!(
                "scenario1 n={} a={} pout={} (replaced {} label(s))",
                cfg.n, cfg.a, cfg.p_out, data.n_replaced
            );
            (data.train, data.test, describe, out)
        }
        GenScenario::CaseA { cfg, out } => {
            let config = CaseAConfig::new(cfg.n, cfg.r, cfg.mean_distance, cfg.s, cfg.test_n)?;
            let (train, test) = gen_case_a(&config, out.seed);
            let describe = format!("caseA n={} r={} D={} s={}", cfg.n, cfg.r, cfg.mean_distance, cfg.s);
            (train, test, describe, out)
        }
        GenScenario::CaseB { cfg, out } => {
            let config =
                CaseBConfig::new(cfg.n, cfg.r, cfg.mean_distance, cfg.nu1, cfg.nu0, cfg.test_n)?;
            let (train, test) = gen_case_b(&config, out.seed);
            let describe = format!(
                "caseB n={} r={} D={} nu1={} nu0={}",
                cfg.n, cfg.r, cfg.mean_distance, cfg.nu1, cfg.nu0
            );
            (train, test, describe, out)
        }
    };
    let extra = [
        ("config", describe),
        ("seed", out.seed.to_string()),
    ];
    io::write_dataset(&out.train_out, &train, &extra)?;
    io::write_dataset(&out.test_out, &test, &extra)?;
    println!(
        "wrote {} train rows -> {} and {} test rows -> {}",
        train.n(),
        out.train_out.display(),
        test.n(),
        out.test_out.display()
    );
    Ok(0)
}
