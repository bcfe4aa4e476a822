//! Command-line front end for ORP coverage analysis.
//!
//! Subcommands: `analytic` (closed forms), `simulate` (Monte Carlo),
//! `figure` (experiment-figure CSVs), `validate` (three-way agreement grid),
//! `sweep` (one-axis tabulation). Exit codes: 0 success, 1 validation or
//! agreement failure, 2 usage error.

mod experiment;
mod figures;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use orp_coverage::analytic;
use orp_coverage::config::{linear_to_db, Scheme};
use orp_coverage::simulator::estimate_coverage;

use experiment::{usage_error, ExperimentConfig, OutputFormat, UsageError};
use output::{format_value, SweepResult};

#[derive(Parser)]
#[command(
    name = "orp",
    version,
    about = "Downlink coverage analysis for orthogonal random precoding"
)]
struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Scenario flags shared by most subcommands; values omitted here may come
/// from `--config`.
#[derive(Args, Clone, Default)]
struct ScenarioArgs {
    /// Experiment config file (TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Scheme: orp-sa | orp-as | orp-mpg | orp-as-mpg | stc.
    #[arg(long)]
    scheme: Option<Scheme>,

    /// Transmit antennas N_t.
    #[arg(long = "Nt")]
    n_tx: Option<usize>,

    /// Receive antennas N_r (default 1).
    #[arg(long = "Nr")]
    n_rx: Option<usize>,

    /// Precoding vectors per slot N.
    #[arg(long = "N")]
    n_beams: Option<usize>,

    /// Transmission slots D (default 1).
    #[arg(long = "D")]
    n_slots: Option<usize>,

    /// SINR threshold in dB.
    #[arg(long = "T-db", allow_hyphen_values = true, conflicts_with = "t")]
    t_db: Option<f64>,

    /// SINR threshold, linear scale.
    #[arg(long = "T")]
    t: Option<f64>,

    /// Average SNR in dB.
    #[arg(long = "rho-db", allow_hyphen_values = true, conflicts_with = "rho")]
    rho_db: Option<f64>,

    /// Average SNR, linear scale.
    #[arg(long = "rho")]
    rho: Option<f64>,

    /// Monte Carlo trials (default 1000000).
    #[arg(long)]
    trials: Option<u64>,

    /// Master seed for reproducible runs (default 42).
    #[arg(long)]
    seed: Option<u64>,

    /// Output file (default: stdout, or figure<id>.csv for figures).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

impl ScenarioArgs {
    /// File config (if any) overlaid with the flag values.
    fn resolve(&self) -> Result<ExperimentConfig> {
        let flags = ExperimentConfig {
            scheme: self.scheme,
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            n_beams: self.n_beams,
            n_slots: self.n_slots,
            t_db: self.t_db,
            t: self.t,
            rho_db: self.rho_db,
            rho: self.rho,
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
        };
        match &self.config {
            Some(path) => Ok(ExperimentConfig::from_toml_file(path)?.merged_with(&flags)),
            None => Ok(flags),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form coverage probability for one scenario.
    Analytic(ScenarioArgs),
    /// Monte Carlo coverage estimate with confidence interval.
    Simulate(ScenarioArgs),
    /// Reproduce an experiment figure (2..=8) as a CSV sweep.
    Figure {
        /// Figure id.
        id: u32,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Cross-validate closed form vs quadrature vs Monte Carlo on the
    /// standard grid.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Restrict the grid to thresholds >= this linear value.
        #[arg(long)]
        t_min: Option<f64>,
        /// Additive perturbation of the closed form (sensitivity hook).
        #[arg(long, hide = true, allow_hyphen_values = true, default_value_t = 0.0)]
        perturb: f64,
    },
    /// Sweep one axis and tabulate analytic + simulated coverage.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Axis to sweep: N | Nr | D | T-db | rho-db.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: building thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Analytic(args) => cmd_analytic(&args.resolve()?),
        Command::Simulate(args) => cmd_simulate(&args.resolve()?),
        Command::Figure { id, scenario } => cmd_figure(id, &scenario.resolve()?),
        Command::Validate {
            scenario,
            t_min,
            perturb,
        } => cmd_validate(&scenario.resolve()?, t_min, perturb),
        Command::Sweep {
            scenario,
            axis,
            values,
        } => cmd_sweep(&scenario.resolve()?, &axis, &values),
    }
}

fn cmd_analytic(cfg: &ExperimentConfig) -> Result<ExitCode> {
    let scheme = cfg.scheme()?;
    let system = cfg.system()?;
    let coverage = analytic::coverage(&system, scheme)?;
    match cfg.format() {
        OutputFormat::Csv => println!("{}", format_value(coverage)),
        OutputFormat::Json => println!(
            "{}",
            serde_json::json!({
                "scheme": scheme,
                "coverage": coverage,
                "config": system,
            })
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(cfg: &ExperimentConfig) -> Result<ExitCode> {
    let scheme = cfg.scheme()?;
    let system = cfg.system()?;
    let est = estimate_coverage(&system, scheme, cfg.trials(), cfg.seed())?;
    match cfg.format() {
        OutputFormat::Csv => {
            println!("p_hat,ci_half_width,trials,master_seed");
            println!(
                "{},{},{},{}",
                format_value(est.p_hat),
                format_value(est.ci_half_width),
                est.trials,
                est.master_seed
            );
        }
        OutputFormat::Json => println!(
            "{}",
            serde_json::json!({
                "scheme": scheme,
                "estimate": est,
                "config": system,
            })
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_figure(id: u32, cfg: &ExperimentConfig) -> Result<ExitCode> {
    if !figures::FIGURE_IDS.contains(&id) {
        return experiment::bail_usage(&format!("unknown figure id {id} (expected 2..=8)"));
    }
    let sweep = figures::build_figure(id, cfg.trials(), cfg.seed())?;
    let path = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("figure{id}.csv")));
    sweep.write(&path, matches!(cfg.format(), OutputFormat::Json))?;
    eprintln!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(cfg: &ExperimentConfig, t_min: Option<f64>, perturb: f64) -> Result<ExitCode> {
    let settings = validate::ValidationSettings {
        trials: cfg.trials(),
        seed: cfg.seed(),
        t_min,
        perturb,
    };
    let report = validate::run_validation(&settings)?;
    println!(
        "validated {} grid points ({} trials each, seed {})",
        report.points, settings.trials, settings.seed
    );
    println!(
        "worst closed-vs-quadrature relative deviation: {:.3e} at {}",
        report.worst_quad_rel.0, report.worst_quad_rel.1
    );
    println!(
        "worst closed-vs-simulation z-score: {:.2} at {}",
        report.worst_mc_z.0, report.worst_mc_z.1
    );
    if report.failures.is_empty() {
        println!("all points agree");
        Ok(ExitCode::SUCCESS)
    } else {
        for failure in &report.failures {
            println!("disagreement: {failure}");
        }
        Ok(ExitCode::from(1))
    }
}

fn cmd_sweep(cfg: &ExperimentConfig, axis: &str, values: &[f64]) -> Result<ExitCode> {
    if values.is_empty() {
        return experiment::bail_usage("--values must list at least one axis point");
    }
    let scheme = cfg.scheme()?;
    let base = cfg.system()?;
    let mut sweep = SweepResult::new(axis, values.to_vec());

    let mut analytic_vals = Vec::with_capacity(values.len());
    let mut simulated_vals = Vec::with_capacity(values.len());
    for &value in values {
        let mut system = base;
        match axis {
            "N" => system.n_beams = positive_integer(value, "N")?,
            "Nr" => system.n_rx = positive_integer(value, "Nr")?,
            "D" => system.n_slots = positive_integer(value, "D")?,
            "T-db" => system.threshold = orp_coverage::db_to_linear(value),
            "rho-db" => system.rho = orp_coverage::db_to_linear(value),
            other => {
                return experiment::bail_usage(&format!(
                    "unknown axis '{other}' (expected N, Nr, D, T-db, rho-db)"
                ))
            }
        }
        analytic_vals.push(analytic::coverage(&system, scheme)?);
        simulated_vals.push(estimate_coverage(&system, scheme, cfg.trials(), cfg.seed())?.p_hat);
    }
    sweep.push_series(format!("analytic-{scheme}"), analytic_vals);
    sweep.push_series(format!("simulated-{scheme}"), simulated_vals);
    sweep.set_meta("scheme", scheme);
    sweep.set_meta("nt", base.n_tx);
    sweep.set_meta("t_db", format_value(linear_to_db(base.threshold)));
    sweep.set_meta("rho_db", format_value(linear_to_db(base.rho)));
    sweep.set_meta("trials", cfg.trials());
    sweep.set_meta("master_seed", cfg.seed());
    sweep.set_meta(
        "version",
        format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
    );

    match &cfg.out {
        Some(path) => {
            sweep.write(path, matches!(cfg.format(), OutputFormat::Json))?;
            eprintln!("wrote {}", path.display());
        }
        None => match cfg.format() {
            OutputFormat::Csv => print!("{}", sweep.to_csv()),
            OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&sweep)?),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn positive_integer(value: f64, name: &str) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 {
        return Err(usage_error(&format!(
            "axis {name} requires positive integers, got {value}"
        )));
    }
    Ok(value as usize)
}
