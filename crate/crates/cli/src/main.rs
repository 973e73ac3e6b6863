//! `indiloop` — analysis toolkit for SISO incremental flight-control loops.
//!
//! Subcommands: `margins`, `bode`, `nyquist`, `region`, `evaluate`, `sweep`.
//! Exit codes: 0 success, 2 configuration error, 3 divergence or instability
//! detected, 4 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use indiloop_cli::commands::{self, parse_axis, parse_band, Common};

#[derive(Parser)]
#[command(name = "indiloop", version, about = "Incremental control loop analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (TOML with plant/loop/scenario/sweep sections).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files and the run manifest.
    #[arg(long, env = "INDILOOP_OUTDIR", default_value = "indiloop-out")]
    outdir: PathBuf,
    /// Override a configuration value: section.key=value (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl CommonArgs {
    fn into_common(self) -> Common {
        Common {
            config: self.config,
            outdir: self.outdir,
            overrides: self.set,
            argv: std::env::args().skip(1).collect(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Gain, phase and time-delay margins of the configured loop.
    Margins {
        #[command(flatten)]
        common: CommonArgs,
        /// Which hedging states to analyze: off, on or both.
        #[arg(long, default_value = "both")]
        pch: String,
        /// Frequency band LO:HI in rad/s.
        #[arg(long, default_value = "1e-3:1e4")]
        band: String,
    },
    /// Open-loop frequency response (magnitude/phase CSV).
    Bode {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "1e-3:1e4")]
        band: String,
        /// Number of log-spaced rows.
        #[arg(long, default_value_t = 801)]
        points: usize,
        /// Analyze the hedged loop.
        #[arg(long)]
        pch: bool,
        /// Also emit the synchronized-delay equivalent for this tau1 (repeatable).
        #[arg(long = "gamma1", value_name = "TAU1")]
        gamma1: Vec<f64>,
        /// Also emit the asynchronous-delay equivalent for TAU1:TAU2 (repeatable).
        #[arg(long = "gamma2", value_name = "TAU1:TAU2")]
        gamma2: Vec<String>,
        /// Also emit sensitivity / tracking-error / disturbance / noise curves.
        #[arg(long)]
        functions: bool,
    },
    /// Open-loop Nyquist locus (re/im CSV).
    Nyquist {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "1e-3:1e4")]
        band: String,
        #[arg(long, default_value_t = 801)]
        points: usize,
        #[arg(long)]
        pch: bool,
    },
    /// Delay-plane stability grid over (tau1, tau2).
    Region {
        #[command(flatten)]
        common: CommonArgs,
        /// tau1 axis LO:HI:N in seconds.
        #[arg(long, default_value = "0:0.1:81")]
        tau1: String,
        /// tau2 axis LO:HI:N in seconds.
        #[arg(long, default_value = "0:0.1:81")]
        tau2: String,
        /// Extra gain pairs KP:KV (repeatable); default uses the config gains.
        #[arg(long = "gains", value_name = "KP:KV")]
        gains: Vec<String>,
        /// Root real parts must fall below minus this guard band to count
        /// stable.
        #[arg(long, default_value_t = 1e-9)]
        guard: f64,
        /// Residual acceptance bound for the polynomial root finder.
        #[arg(long = "root-residual", default_value_t = 1e-8)]
        root_residual: f64,
    },
    /// Run the scenario battery and write the metrics report plus traces.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict to a subset of scenarios (repeatable):
        /// tracking, disturbance, noise, robustness.
        #[arg(long = "scenario", value_name = "NAME")]
        scenarios: Vec<String>,
    },
    /// Re-run the battery across the configured sweep parameter values.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Margins { common, pch, band } => {
            commands::cmd_margins(&common.into_common(), &pch, parse_band(&band)?)
        }
        Command::Bode {
            common,
            band,
            points,
            pch,
            gamma1,
            gamma2,
            functions,
        } => commands::cmd_bode(
            &common.into_common(),
            parse_band(&band)?,
            points,
            pch,
            false,
            &gamma1,
            &gamma2,
            functions,
        ),
        Command::Nyquist { common, band, points, pch } => commands::cmd_bode(
            &common.into_common(),
            parse_band(&band)?,
            points,
            pch,
            true,
            &[],
            &[],
            false,
        ),
        Command::Region {
            common,
            tau1,
            tau2,
            gains,
            guard,
            root_residual,
        } => commands::cmd_region(
            &common.into_common(),
            &parse_axis(&tau1)?,
            &parse_axis(&tau2)?,
            &gains,
            &indiloop_core::GridTolerances { guard, root_residual_bound: root_residual },
        ),
        Command::Evaluate { common, scenarios } => {
            commands::cmd_evaluate(&common.into_common(), &scenarios)
        }
        Command::Sweep { common } => commands::cmd_sweep(&common.into_common()),
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    if let Some(core_err) = err.downcast_ref::<indiloop_core::Error>() {
        match core_err {
            indiloop_core::Error::Config(_) | indiloop_core::Error::InvalidParameter(_) => 2,
            indiloop_core::Error::Divergence { .. } => 3,
            _ => 4,
        }
    } else {
        // Argument/IO-shape problems count as configuration errors.
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}
