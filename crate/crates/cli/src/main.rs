//! `whichway`: which-way information, generalized visibility and
//! measurable bounds from the command line.
//!
//! Exit codes: 0 success, 1 inequality or certificate violation, 2 input
//! error, 3 numerical failure.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use whichway::Error;

#[derive(Parser)]
#[command(
    name = "whichway",
    version,
    about = "Which-way information versus interference visibility"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ChannelArgs {
    /// Channel: identity, transpose, pauli, erasure, plates, replace[:KET],
    /// phase:P1,P2,..., random:SEED[:KRAUS], or a channel file path.
    #[arg(long, default_value = "pauli")]
    channel: String,

    /// Spin dimension for builder channels (default 2).
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct DualityArgs {
    #[command(flatten)]
    channel: ChannelArgs,

    /// Preparation: pure:A,B | mixed | ensemble:w*A,B;w*A,B;...
    #[arg(long)]
    prep: String,

    /// Allowed violation of D² + V_G² ≤ 1.
    #[arg(long, default_value_t = whichway::duality::INEQUALITY_TOL)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized visibility V_G.
    Vg(DualityArgs),
    /// Which-way distinguishability D of the canonical dilation.
    Distinguishability(DualityArgs),
    /// D, V_G and the slack of D² + V_G² ≤ 1; exit 1 if it fails.
    Verify(DualityArgs),
    /// Theory fractional visibilities for every preparation and filter.
    Fracvis {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Preparation pairs: rectilinear, pure:A,B, or labels such as hh,hv.
        #[arg(long, default_value = "rectilinear")]
        prep: String,
        /// Filter pairs: rectilinear or labels such as hh,vv.
        #[arg(long, default_value = "rectilinear")]
        filters: String,
        /// Records CSV output (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 4×4 grid of fractional visibilities over the rectilinear labels.
    Table {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Also write the grid as a records CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated fringe counts for one preparation and filter, with the fit.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Preparation pair, e.g. pure:h,v or hv.
        #[arg(long, default_value = "hh")]
        prep: String,
        /// Filter pair, e.g. hh.
        #[arg(long, default_value = "hh")]
        filters: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Shots per phase.
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        /// Fringe contrast in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        contrast: f64,
        /// Fringe CSV output (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate, fit and certify all 16 cells, or certify records from CSV.
    ReproducePaper {
        /// Channel for the simulation.
        #[arg(long, default_value = "plates")]
        channel: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0.96)]
        contrast: f64,
        /// Records CSV to certify instead of simulating.
        #[arg(long)]
        from_csv: Option<PathBuf>,
        /// Directory for records.csv, certificate.txt and fringe CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance for certificate support leakage and contraction slack.
        #[arg(long, default_value_t = whichway::bounds::CERT_TOL)]
        tol: f64,
    },
    /// Writes a channel as a channel file.
    Channel {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure that maps onto a process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Inequality or certificate violation.
    Violation(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Lib(e) => match e {
                Error::SupportViolation { .. } | Error::ConstraintViolated { .. } => 1,
                Error::Dimension(_)
                | Error::InvalidState(_)
                | Error::InvalidChannel(_)
                | Error::InvalidInput(_)
                | Error::MissingRecord { .. }
                | Error::Parse(_)
                | Error::Io(_)
                | Error::Csv(_) => 2,
                Error::NotPsd { .. } | Error::Convention(_) | Error::Fit(_) => 3,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Violation(msg) => f.write_str(msg),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Vg(a) => commands::vg(&a.channel.channel, a.channel.d, &a.prep),
        Command::Distinguishability(a) => {
            commands::distinguishability(&a.channel.channel, a.channel.d, &a.prep)
        }
        Command::Verify(a) => commands::verify(&a.channel.channel, a.channel.d, &a.prep, a.tol),
        Command::Fracvis {
            channel,
            prep,
            filters,
            out,
        } => commands::fracvis(&channel.channel, channel.d, &prep, &filters, out.as_deref()),
        Command::Table { channel, out } => {
            commands::table(&channel.channel, channel.d, out.as_deref())
        }
        Command::Simulate {
            channel,
            prep,
            filters,
            seed,
            shots,
            contrast,
            out,
        } => commands::simulate(
            &channel.channel,
            channel.d,
            &prep,
            &filters,
            commands::Sampling {
                seed,
                shots,
                contrast,
            },
            out.as_deref(),
        ),
        Command::ReproducePaper {
            channel,
            seed,
            shots,
            contrast,
            from_csv,
            out,
            tol,
        } => commands::reproduce(
            &channel,
            commands::Sampling {
                seed,
                shots,
                contrast,
            },
            from_csv.as_deref(),
            out.as_deref(),
            tol,
        ),
        Command::Channel { channel, out } => {
            commands::export_channel(&channel.channel, channel.d, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("whichway: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
