//! `netcap` command-line front end.
//!
//! [`dispatch`] parses an argument list, runs the matching calculation from
//! `netcap-core` and returns the rendered output with an exit code, so the
//! binary is a thin wrapper and tests can drive it in-process.

pub mod commands;
pub mod report;
pub mod units;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netcap_core::fabric::FabricError;
use thiserror::Error;

pub use report::{Cell, OutputFormat, Report, Section};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] netcap_core::Error),
    #[error(transparent)]
    Fabric(#[from] FabricError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
            CliError::Fabric(_) => "fabric",
            CliError::Io { .. } => "io",
        }
    }

    /// `error[<kind>]: <message>` on one line.
    pub fn line(&self) -> String {
        let message = self
            .to_string()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        format!("error[{}]: {message}\n", self.kind())
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(err: &CliError) -> Self {
        Outcome {
            code: EXIT_INVALID,
            stdout: String::new(),
            stderr: err.line(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "netcap",
    version,
    about = "Network capacity planning calculations"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Statistical capacity of a link shared by bursty sources.
    Stat(StatArgs),
    /// Maximum Ethernet frame rate on a link.
    Frames(FramesArgs),
    /// Ethernet or transport-layer goodput at line rate.
    Goodput(GoodputArgs),
    /// Loss-limited TCP throughput estimate.
    Mathis(MathisArgs),
    /// Round-based TCP Reno simulation.
    TcpSim(TcpSimArgs),
    /// Audit a topology file for over-subscription.
    Fabric(FabricArgs),
}

#[derive(Debug, Args)]
pub struct StatArgs {
    /// Number of sources.
    #[arg(long, value_parser = units::parse_count)]
    pub sources: u64,
    /// Peak rate of one source, bits/s.
    #[arg(long, value_parser = units::parse_quantity)]
    pub rate: f64,
    /// Exceedance budget.
    #[arg(long, value_parser = units::parse_quantity)]
    pub epsilon: f64,
    /// Put the whole budget in the upper tail.
    #[arg(long)]
    pub one_sided: bool,
    /// Check the estimate by Monte Carlo simulation.
    #[arg(long)]
    pub validate: bool,
    /// Simulated slots for --validate.
    #[arg(long, value_parser = units::parse_count, default_value = "200000")]
    pub trials: u64,
    /// Seed for --validate.
    #[arg(long, value_parser = units::parse_count, default_value = "1")]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    /// Link rate, bits/s.
    #[arg(long, value_parser = units::parse_quantity)]
    pub link: f64,
    /// Ethernet payload, bytes.
    #[arg(long, value_parser = units::parse_count)]
    pub payload: u64,
    /// Number of 802.1Q tags.
    #[arg(long, value_parser = units::parse_count, default_value = "0")]
    pub vlan: u64,
    /// Allow payloads up to 9000 bytes.
    #[arg(long)]
    pub jumbo: bool,
}

#[derive(Debug, Args)]
pub struct FramesArgs {
    #[command(flatten)]
    pub frame: FrameArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Proto {
    Tcp,
    Udp,
    Ethernet,
}

#[derive(Debug, Args)]
pub struct GoodputArgs {
    #[command(flatten)]
    pub frame: FrameArgs,
    /// Layer whose payload is counted.
    #[arg(long, value_enum, default_value_t = Proto::Tcp)]
    pub proto: Proto,
    /// TCP options: `none`, `timestamps` or a byte count.
    #[arg(long, default_value = "none")]
    pub options: String,
}

#[derive(Debug, Args)]
pub struct MathisArgs {
    /// Maximum segment size, bytes.
    #[arg(long, value_parser = units::parse_quantity)]
    pub mss: f64,
    /// Round-trip time, seconds.
    #[arg(long, value_parser = units::parse_quantity)]
    pub rtt: f64,
    /// Segment loss probability.
    #[arg(long, value_parser = units::parse_quantity)]
    pub loss: f64,
    /// Receive window cap, bytes.
    #[arg(long, value_parser = units::parse_quantity)]
    pub window: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TcpSimArgs {
    /// Sender maximum segment size, bytes.
    #[arg(long, value_parser = units::parse_count, default_value = "1460")]
    pub smss: u64,
    /// Round-trip time, seconds.
    #[arg(long, value_parser = units::parse_quantity)]
    pub rtt: f64,
    /// Per-segment loss probability.
    #[arg(long, value_parser = units::parse_quantity)]
    pub loss: f64,
    /// Simulated round trips.
    #[arg(long, value_parser = units::parse_count)]
    pub rounds: u64,
    #[arg(long, value_parser = units::parse_count, default_value = "1")]
    pub seed: u64,
    /// Receive window, bytes. Unbounded when omitted.
    #[arg(long, value_parser = units::parse_count)]
    pub rwnd: Option<u64>,
    /// Bottleneck rate, bits/s.
    #[arg(long, value_parser = units::parse_quantity)]
    pub bottleneck: Option<f64>,
    /// Write the per-round congestion window as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FabricArgs {
    /// Topology JSON file.
    #[arg(long)]
    pub topology: PathBuf,
    /// Policy JSON file. Built-in thresholds when omitted.
    #[arg(long)]
    pub policy: Option<PathBuf>,
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                return Outcome {
                    code: EXIT_OK,
                    stdout: err.to_string(),
                    stderr: String::new(),
                };
            }
            let first = err
                .to_string()
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            return Outcome::failure(&CliError::Usage(first));
        }
    };
    match run(&cli) {
        Ok((report, code)) => Outcome {
            code,
            stdout: report.render(cli.format),
            stderr: String::new(),
        },
        Err(err) => Outcome::failure(&err),
    }
}

/// Executes a parsed command, returning the report and its exit code.
pub fn run(cli: &Cli) -> Result<(Report, i32), CliError> {
    match &cli.command {
        Command::Stat(a) => commands::stat(a).map(|r| (r, EXIT_OK)),
        Command::Frames(a) => commands::frames(a).map(|r| (r, EXIT_OK)),
        Command::Goodput(a) => commands::goodput(a).map(|r| (r, EXIT_OK)),
        Command::Mathis(a) => commands::mathis(a).map(|r| (r, EXIT_OK)),
        Command::TcpSim(a) => commands::tcp_sim(a).map(|r| (r, EXIT_OK)),
        Command::Fabric(a) => commands::fabric(a),
    }
}
