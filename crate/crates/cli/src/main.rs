use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use isonet::curves::{self, Quantity};
use isonet::model::{validate_scenario, NetworkScenario, Restriction};
use isonet::sim::SimConfig;
use isonet::table::Format;

/// Interference, outage and throughput curves for ad hoc networks with
/// non-stationary Poisson transmitters.
#[derive(Parser)]
#[command(name = "isonet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability against receiver distance from the origin.
    OpCurve {
        #[command(flatten)]
        common: Common,
        /// Receiver distances START:STOP:STEP.
        #[arg(long)]
        grid: String,
        /// Add Monte Carlo columns with 95% confidence intervals.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Error of the locally homogeneous outage approximation (alpha = 4).
    GammaCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: String,
    },
    /// Expected sum rate against the SINR threshold.
    SumRate {
        #[command(flatten)]
        common: Common,
        /// Thresholds in dB, START:STOP:STEP (a `dB` suffix is accepted).
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Receiver intensity.
        #[arg(long)]
        lambda_r: f64,
        /// Locate the maximizing threshold within the grid's range.
        #[arg(long)]
        optimize: bool,
    },
    /// Closed forms against brute-force quadrature and, with --full,
    /// against simulation.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo estimate of a single quantity.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        quantity: QuantityArg,
        /// Receiver distance from the origin.
        #[arg(long, default_value_t = 0.0)]
        y0: f64,
        /// Transform argument for --quantity laplace.
        #[arg(long)]
        s: Option<f64>,
        /// Receiver intensity for --quantity ast; without it the receiver
        /// sits at the link distance.
        #[arg(long)]
        lambda_r: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling window radius; derived from the tail when absent.
        #[arg(long)]
        r_max: Option<f64>,
        /// Per-trial records as CSV.
        #[arg(long)]
        raw: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    MeanInterference,
    Laplace,
    Outage,
    Ast,
}

/// Exit status of a run that got far enough to produce a verdict.
enum Outcome {
    Ok,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::OpCurve {
            common,
            grid,
            simulate,
            trials,
            seed,
        } => {
            let s = load_checked(&common.scenario, false)?;
            let grid = parse_grid(&grid, false)?;
            let cfg = SimConfig::new(trials, seed);
            let t = curves::op_curve(&s, &grid, simulate.then_some(&cfg))?;
            emit(&t.render(common.format.into()), common.out.as_deref())?;
        }
        Command::GammaCurve { common, grid } => {
            let s = load_checked(&common.scenario, false)?;
            let grid = parse_grid(&grid, false)?;
            let t = curves::gamma_curve(&s, &grid)?;
            emit(&t.render(common.format.into()), common.out.as_deref())?;
        }
        Command::SumRate {
            common,
            grid,
            lambda_r,
            optimize,
        } => {
            let s = load_checked(&common.scenario, true)?;
            let grid = parse_grid(&grid, true)?;
            let t = curves::sum_rate(&s, lambda_r, &grid, optimize)?;
            emit(&t.render(common.format.into()), common.out.as_deref())?;
        }
        Command::Validate {
            common,
            full,
            trials,
            seed,
        } => {
            let s = NetworkScenario::load(&common.scenario)
                .with_context(|| format!("reading {}", common.scenario.display()))?;
            let cfg = SimConfig::new(trials, seed);
            let report = curves::validate(&s, full.then_some(&cfg))?;
            let text = match common.format {
                FormatArg::Csv => report.to_text(),
                FormatArg::Json => serde_json::to_string_pretty(&report)? + "\n",
            };
            emit(&text, common.out.as_deref())?;
            if !report.passed() {
                for e in &report.errors {
                    eprintln!("{e}");
                }
                return Ok(Outcome::ChecksFailed);
            }
        }
        Command::Simulate {
            common,
            quantity,
            y0,
            s: s_arg,
            lambda_r,
            trials,
            seed,
            r_max,
            raw,
        } => {
            let s = load_checked(&common.scenario, matches!(quantity, QuantityArg::Ast))?;
            let q = match quantity {
                QuantityArg::MeanInterference => Quantity::MeanInterference,
                QuantityArg::Outage => Quantity::Outage,
                QuantityArg::Laplace => Quantity::Laplace {
                    s_arg: s_arg.ok_or_else(|| anyhow!("--quantity laplace needs --s"))?,
                },
                QuantityArg::Ast => Quantity::Ast { lambda_r },
            };
            let mut cfg = SimConfig::new(trials, seed);
            cfg.r_max = r_max;
            let (t, run) = curves::simulate(&s, y0, q, &cfg)?;
            if let Some(path) = raw {
                let run = run.ok_or_else(|| anyhow!("--raw is not available for --quantity ast"))?;
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(f);
                run.write_csv(&mut w)?;
                w.flush()?;
            }
            emit(&t.render(common.format.into()), common.out.as_deref())?;
        }
    }
    Ok(Outcome::Ok)
}

/// Loads a scenario and rejects it on any error-level violation. Warnings
/// go to standard error, except the throughput tail warning, which is fatal
/// when `needs_ast` is set.
fn load_checked(path: &Path, needs_ast: bool) -> anyhow::Result<NetworkScenario> {
    let s = NetworkScenario::load(path).with_context(|| format!("reading {}", path.display()))?;
    let report = validate_scenario(&s);
    for v in &report.violations {
        eprintln!("{v}");
    }
    let ast_tail = report.violations.iter().any(|v| v.restriction == Restriction::AstTail);
    if !report.is_ok() || (needs_ast && ast_tail) {
        bail!("scenario {} failed validation", path.display());
    }
    Ok(s)
}

/// Parses `START:STOP:STEP`; with `db` each part may carry a `dB` suffix.
fn parse_grid(text: &str, db: bool) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("grid must be START:STOP:STEP, got {text:?}");
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        let p = part.trim();
        let lower = p.to_ascii_lowercase();
        let num = match lower.strip_suffix("db") {
            Some(rest) if db => rest.trim(),
            Some(_) => bail!("grid {text:?}: dB values are only meaningful for thresholds"),
            None => p,
        };
        *slot = num
            .parse()
            .with_context(|| format!("grid {text:?}: {part:?} is not a number"))?;
    }
    Ok(curves::linear_grid(v[0], v[1], v[2])?)
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
