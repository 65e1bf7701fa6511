//! Command-line front end: `fso <verb> [options]`.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! non-convergence, 4 validation failure.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fso_channel::Error;

use commands::{Method, Output, RunSettings, SweepParam};
use config::{Preset, Scenario, ScenarioConfig};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fso", version, about = "Ground-to-air FSO channel model: PDFs, outage and Monte-Carlo checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in scenario used when no file is given.
    #[arg(long, value_enum, default_value = "beam40")]
    pub preset: Preset,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Monte-Carlo threads; results do not depend on this.
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Composite channel density on a grid of h.
    Pdf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h_min: Option<f64>,
        /// Defaults to three times the full-capture gain.
        #[arg(long)]
        h_max: Option<f64>,
        #[arg(long, default_value_t = 300)]
        points: usize,
        /// Add an empirical density column from this many samples.
        #[arg(long, value_name = "N")]
        simulate: Option<f64>,
    },
    /// Outage probability over a log-spaced transmit-power sweep.
    Outage {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "numerical")]
        method: Method,
        #[arg(long, default_value_t = 1e-5)]
        pt_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        pt_max: f64,
        #[arg(long, default_value_t = 17)]
        points: usize,
        /// Samples for the Monte-Carlo method.
        #[arg(long, default_value_t = 1e6)]
        samples: f64,
    },
    /// Numerical outage while one scenario parameter varies.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Log-spaced values.
        #[arg(long)]
        log: bool,
    },
    /// Self-test battery: normalisations, KS, atom weights, outage agreement.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e6)]
        samples: f64,
    },
    /// Beam-wander variance for the scenario's Cn² profile.
    Beamwander {
        #[command(flatten)]
        common: Common,
        /// Two-column altitude/Cn² file replacing the scenario profile.
        #[arg(long, value_name = "PATH")]
        cn2_table: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::SeriesDivergent { .. } | Error::Range { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn sample_count(x: f64) -> Result<u64, Error> {
    if x >= 1.0 && x.fract() == 0.0 && x <= 9.0e15 {
        Ok(x as u64)
    } else {
        Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need a positive whole number, got {x}"),
        })
    }
}

fn scenario(common: &Common, cn2_table: Option<&PathBuf>) -> Result<Scenario, Error> {
    let (mut cfg, base) = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            (ScenarioConfig::parse(&text)?, path.parent().map(|p| p.to_path_buf()))
        }
        None => (ScenarioConfig::preset(common.preset), None),
    };
    if let Some(t) = cn2_table {
        let abs = std::path::absolute(t)?;
        cfg.atmosphere.cn2 = config::Cn2Config::Table {
            path: Some(abs),
            altitudes_m: Vec::new(),
            values: Vec::new(),
        };
    }
    cfg.build(base.as_deref())
}

fn execute(cli: &Cli) -> Result<(Output, Option<PathBuf>), Error> {
    match &cli.command {
        Command::Pdf {
            common,
            h_min,
            h_max,
            points,
            simulate,
        } => {
            let s = scenario(common, None)?;
            let opts = commands::PdfOptions {
                h_min: *h_min,
                h_max: *h_max,
                points: *points,
                simulate: simulate.map(sample_count).transpose()?,
            };
            Ok((commands::pdf(&s, &opts, settings(common))?, common.output.clone()))
        }
        Command::Outage {
            common,
            method,
            pt_min,
            pt_max,
            points,
            samples,
        } => {
            let s = scenario(common, None)?;
            let opts = commands::OutageOptions {
                method: *method,
                pt_min: *pt_min,
                pt_max: *pt_max,
                points: *points,
                samples: sample_count(*samples)?,
            };
            Ok((commands::outage(&s, &opts, settings(common))?, common.output.clone()))
        }
        Command::Sweep {
            common,
            param,
            from,
            to,
            points,
            log,
        } => {
            let s = scenario(common, None)?;
            let opts = commands::SweepOptions {
                param: *param,
                from: *from,
                to: *to,
                points: *points,
                log: *log,
            };
            let base = common.config.as_ref().and_then(|p| p.parent());
            Ok((commands::sweep(&s, &opts, base)?, common.output.clone()))
        }
        Command::Validate { common, samples } => {
            let s = scenario(common, None)?;
            let opts = commands::ValidateOptions {
                samples: sample_count(*samples)?,
            };
            Ok((commands::validate(&s, &opts, settings(common))?, common.output.clone()))
        }
        Command::Beamwander { common, cn2_table } => {
            let s = scenario(common, cn2_table.as_ref())?;
            Ok((commands::beamwander(&s)?, common.output.clone()))
        }
    }
}

fn settings(common: &Common) -> RunSettings {
    RunSettings {
        seed: common.seed,
        workers: common.workers.max(1),
    }
}

/// Parses `args` (including the program name) and runs the verb; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// As [`run`], writing the CSV and diagnostics to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    let (result, path) = match execute(&cli) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &path {
        Some(p) => std::fs::write(p, &result.csv),
        None => out.write_all(result.csv.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_CONFIG;
    }
    if let Some(s) = &result.summary {
        let _ = writeln!(err, "{s}");
    }
    if result.failed {
        EXIT_VALIDATION
    } else {
        0
    }
}

#[cfg(test)]
mod tests;
