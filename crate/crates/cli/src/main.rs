//! `choquet`: evaluate, classify and verify signed Choquet integrals.
//!
//! Exit codes: 0 when a command ran and produced a verdict (a refutation
//! with a witness included), 1 when verification results contradict each
//! other, 2 for invalid input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use choquet_core::{CheckConfig, DistortionFunction, DistortionSpec, Property, TriplePoints};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "choquet",
    version,
    about = "Signed Choquet integrals: evaluation, classification and verification"
)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for the randomized search phases.
    #[arg(long, global = true, env = "CHOQUET_SEED", default_value_t = 0)]
    seed: u64,

    /// Grid subdivisions of [0,1] used by the checks.
    #[arg(long, global = true, default_value_t = 200)]
    grid: usize,

    /// Random trials per search phase.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,

    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Support points `x,y,z` (x > y > z) of three-point laws.
    #[arg(long, global = true, default_value = "1,0,-1", allow_hyphen_values = true)]
    triple: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate I_h (or R_{h,v} with --v) on a distribution.
    Eval {
        /// Distortion: JSON file, inline JSON, or shorthand such as `power:2`.
        distortion: String,
        /// CSV file with one sample per row and an optional `value` header.
        #[arg(long, conflicts_with = "dist", required_unless_present = "dist")]
        data: Option<PathBuf>,
        /// Inline distribution `x:p,x:p,...`.
        #[arg(long, allow_hyphen_values = true)]
        dist: Option<String>,
        /// Outcome transform, e.g. `power:3`, `affine:0,2`, `abs:0.5`.
        #[arg(long)]
        v: Option<String>,
        /// Also evaluate by numerical integration and report the discrepancy.
        #[arg(long)]
        oracle: bool,
    },
    /// Structural classification of h.
    Classify {
        distortion: String,
        /// Add the increasing normalized family report.
        #[arg(long)]
        dual_utility: bool,
    },
    /// Run the seven-condition battery, a single property check, or (with
    /// --v) the transformed three-point check.
    Check {
        distortion: String,
        #[arg(long, conflicts_with_all = ["property", "v"])]
        battery: bool,
        #[arg(long, conflicts_with = "v")]
        property: Option<String>,
        #[arg(long)]
        v: Option<String>,
    },
    /// Search for a witness against m-quasi-convexity.
    Counterexample { distortion: String },
    /// Check the conflict between o-convexity and m-convexity.
    Conflict { distortion: String },
    /// Emit CSV rows `p,kind,value` describing the graph of h.
    PlotData {
        distortion: String,
        /// Sample points per affine piece, endpoints included.
        #[arg(long, default_value_t = 2)]
        samples: usize,
    },
}

impl Global {
    fn config(&self) -> Result<CheckConfig> {
        let parts: Vec<f64> = self
            .triple
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("--triple: cannot parse {:?}", self.triple))?;
        let [x, y, z] = parts[..] else {
            bail!("--triple needs three values x,y,z");
        };
        let cfg = CheckConfig {
            grid_resolution: self.grid,
            random_trials: self.trials,
            tolerance: self.tol,
            rng_seed: self.seed,
            triple: TriplePoints::new(x, y, z)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Reads a distortion from a file when `arg` names one, otherwise parses it
/// as inline JSON or shorthand.
fn load_distortion(arg: &str) -> Result<DistortionFunction> {
    let path = PathBuf::from(arg);
    let text = if path.is_file() {
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?
    } else {
        arg.to_string()
    };
    let spec = DistortionSpec::parse(&text).with_context(|| format!("distortion {arg:?}"))?;
    spec.build().with_context(|| format!("distortion {arg:?}"))
}

fn parse_property(name: &str) -> Result<Property> {
    Ok(name.parse::<Property>()?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match cli.command {
        Command::Eval {
            distortion,
            data,
            dist,
            v,
            oracle,
        } => commands::eval(
            &load_distortion(&distortion)?,
            data.as_deref(),
            dist.as_deref(),
            v.as_deref(),
            oracle,
            g.format,
        ),
        Command::Classify {
            distortion,
            dual_utility,
        } => commands::classification(&load_distortion(&distortion)?, dual_utility, g.format),
        Command::Check {
            distortion,
            battery,
            property,
            v,
        } => {
            let h = load_distortion(&distortion)?;
            let cfg = g.config()?;
            match (battery, property, v) {
                (true, _, _) => commands::battery(&h, &cfg, g.format),
                (false, Some(p), _) => commands::property(&h, parse_property(&p)?, &cfg, g.format),
                (false, None, Some(v)) => commands::transform(&h, &v, &cfg, g.format),
                (false, None, None) => bail!("check needs --battery, --property NAME or --v TRANSFORM"),
            }
        }
        Command::Counterexample { distortion } => {
            commands::counterexample(&load_distortion(&distortion)?, &g.config()?, g.format)
        }
        Command::Conflict { distortion } => commands::conflict(&load_distortion(&distortion)?, &g.config()?, g.format),
        Command::PlotData { distortion, samples } => commands::plot_data(&load_distortion(&distortion)?, samples),
    }
}

fn is_broken_pipe(e: &(dyn std::error::Error + 'static)) -> bool {
    e.downcast_ref::<std::io::Error>()
        .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) if e.chain().any(is_broken_pipe) => ExitCode::SUCCESS,
        Err(e) => {
            let incoherent = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<choquet_core::Error>(),
                    Some(choquet_core::Error::Incoherent(_))
                )
            });
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg.push_str(": ");
                    msg.push_str(&c);
                }
            }
            eprintln!("error: {msg}");
            if incoherent {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
