//! Sweep driver CLI.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when the requested
//! lattice exceeds the dense capacity, 1 on anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qkrylov::experiments::{
    converged_errors, emit_outputs, fit_monomial, run_sweep, DtRule, EpsilonRule, SweepConfig,
};
use qkrylov::Error;

#[derive(Parser)]
#[command(name = "qkrylov", version, about = "Noisy Krylov ground-state sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a noise/dimension sweep and write CSV/JSON/SVG outputs.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file; defaults apply for any omitted field.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the noise widths (comma-separated, e.g. "1e-6,1e-5").
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,

    /// Override the largest Krylov index d.
    #[arg(long)]
    d_max: Option<usize>,

    /// Override the trials per (sigma, d) cell.
    #[arg(long)]
    trials: Option<usize>,

    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Threshold rule: "paper" (0.1 * D * sigma) or "fixed:<value>".
    #[arg(long)]
    epsilon_rule: Option<String>,

    /// Timestep: "auto" (pi / spectral range) or a number.
    #[arg(long)]
    dt: Option<String>,

    /// Analyze the full Hilbert space instead of the magnetization sector.
    #[arg(long)]
    no_sector: bool,
}

fn parse_epsilon_rule(text: &str) -> Result<EpsilonRule, Error> {
    if text == "paper" {
        return Ok(EpsilonRule::Paper);
    }
    let value = text
        .strip_prefix("fixed:")
        .ok_or_else(|| {
            Error::Config(format!(
                "epsilon rule must be \"paper\" or \"fixed:<value>\", got \"{text}\""
            ))
        })?
        .parse::<f64>()
        .map_err(|e| Error::Config(format!("bad epsilon value: {e}")))?;
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Config("fixed epsilon must be positive".into()));
    }
    Ok(EpsilonRule::Fixed(value))
}

fn parse_dt(text: &str) -> Result<DtRule, Error> {
    if text == "auto" {
        return Ok(DtRule::Auto);
    }
    let value = text
        .parse::<f64>()
        .map_err(|e| Error::Config(format!("dt must be \"auto\" or a number: {e}")))?;
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Config("dt must be positive".into()));
    }
    Ok(DtRule::Fixed(value))
}

fn load_config(args: &SweepArgs) -> Result<SweepConfig, Error> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            SweepConfig::from_json(&text)?
        }
        None => SweepConfig::default(),
    };
    if let Some(sigmas) = &args.sigma {
        config.sigmas = sigmas.clone();
    }
    if let Some(d_max) = args.d_max {
        config.d_max = d_max;
        let (lo, hi) = config.converged_window;
        config.converged_window = (lo.min(d_max), hi.min(d_max));
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    if let Some(rule) = &args.epsilon_rule {
        config.epsilon_rule = parse_epsilon_rule(rule)?;
    }
    if let Some(dt) = &args.dt {
        config.dt = parse_dt(dt)?;
    }
    if args.no_sector {
        config.sector = false;
    }
    config.validate()?;
    Ok(config)
}

fn run(args: &SweepArgs) -> Result<(), Error> {
    let config = load_config(args)?;
    eprintln!(
        "sweep: {}x{} lattice, {} widths, d <= {}, {} trials per cell",
        config.lattice.rows,
        config.lattice.cols,
        config.sigmas.len(),
        config.d_max,
        config.trials
    );
    let result = run_sweep(&config)?;
    let stats = converged_errors(&result, config.converged_window);
    let fit_points: Vec<(f64, f64)> = stats
        .iter()
        .filter_map(|s| s.pos_median.map(|m| (s.sigma, m)))
        .filter(|(s, m)| *s > 0.0 && *m > 0.0)
        .collect();
    let fit = if fit_points.len() >= 2 {
        Some(fit_monomial(&fit_points)?)
    } else {
        None
    };
    let files = emit_outputs(&result, &stats, fit)?;
    if let Some((exp, coeff)) = fit {
        eprintln!("monomial fit of positive converged errors: {coeff:.4e} * sigma^{exp:.4}");
    }
    eprintln!(
        "bound audit: {} upper violations / {} eligible, {} lower violations / {} eligible",
        result.upper_violations_total,
        result.upper_eligible_total,
        result.lower_violations_total,
        result.lower_eligible_total
    );
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Sweep(args) = cli.command;
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Precondition(_) => ExitCode::from(2),
                Error::Capacity { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
