use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cvwitness",
    version,
    about = "Moment-hierarchy entanglement witnesses for three-mode Gaussian states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the payload here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Significant digits for exact values.
    #[arg(
        long,
        global = true,
        env = "CVWITNESS_PRECISION",
        default_value_t = 50,
        value_parser = clap::value_parser!(u32).range(30..=10_000)
    )]
    pub precision: u32,

    /// Write run metadata (including a timestamp) to this sidecar file.
    #[arg(long, global = true)]
    pub metadata: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Xi,
    Ghzw,
    Proposition,
    Vacuum,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Named state family.
    #[arg(long, value_enum, conflicts_with = "state")]
    pub family: Option<Family>,

    /// Off-diagonal of the xi family, as a decimal.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,

    /// Diagonal of the GHZ/W family, as a decimal.
    #[arg(long)]
    pub a: Option<String>,

    /// JSON state file.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// Symmetric sum over the three bipartitions.
    Sum,
    P1,
    P2,
    P3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    ClosedForm,
    Wick,
    Quadrature,
}

fn parse_mmax(text: &str) -> Result<usize, String> {
    let v: usize = text.parse().map_err(|e| format!("{e}"))?;
    if v > cvwitness::moments::ORDER_CAP {
        return Err(format!("must not exceed {}", cvwitness::moments::ORDER_CAP));
    }
    Ok(v)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a state and print its matrices.
    State {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Moment series up to `--mmax`.
    Moments {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "12", value_parser = parse_mmax)]
        mmax: usize,
        #[arg(long, value_enum, default_value_t = SeriesKind::Sum)]
        series: SeriesKind,
        /// Use the tilde operator `−â_k + Σ â_j†`.
        #[arg(long)]
        tilde: bool,
        #[arg(long, value_enum, default_value_t = Source::ClosedForm)]
        source: Source,
    },
    /// Classify the moment hierarchy and the quadrature witness.
    Witness {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "12", value_parser = parse_mmax)]
        mmax: usize,
    },
    /// Physicality and partial-transpose tests.
    Ppt {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Simulate the four-mode homodyne measurement.
    Simulate {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 100_000)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the raw samples as a binary batch file.
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Brute-force cross-checks.
    Oracle {
        #[command(subcommand)]
        check: OracleCheck,
    },
    /// Run the acceptance suite.
    Reproduce {
        /// Run a single criterion.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=11))]
        criterion: Option<u8>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCheck {
    /// Closed form against the pairing and quadrature oracles.
    Moments {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "6", value_parser = parse_mmax)]
        mmax: usize,
    },
    /// Reordering identity on truncated Fock matrices (`c = 1`).
    Reorder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        dim: usize,
    },
    /// EPR moments on the two-mode squeezed vacuum.
    Epr {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
    },
}
