//! `mdcf`: certified diagonal continued fraction computations from the shell.
//!
//! Exit codes: 0 success, 1 a reported check failed, 2 bad input, 3 precision
//! exhausted, 4 target out of range, 5 anomaly.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mdcf::Error;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "mdcf", version, about = "Diagonal continued fraction spectrum toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    /// Fractional decimal digits for printed endpoints.
    #[arg(long, global = true, default_value_t = 12)]
    digits: u32,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified m_n(α) for n = 0..=n_max.
    Mn {
        /// Continued fraction literal, e.g. "[0;3,1,1,(100)]".
        cf: String,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        /// Enclosure width target; defaults to 10^-(digits + 2).
        #[arg(long)]
        width: Option<String>,
    },
    /// Nodes of the piecewise linear μ and the maximum of tμ(t) per segment.
    Mu {
        cf: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        width: Option<String>,
    },
    /// Finite-depth τ-set check for the F₅ gap system.
    Tau {
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value = "1.788")]
        tau: String,
        /// Replay with exact gap arithmetic (depth <= 8).
        #[arg(long)]
        exact: bool,
        /// One report per depth 1..=depth.
        #[arg(long)]
        profile: bool,
    },
    /// Overlap check of the segment chain for R0 <= R < R_max.
    Covering {
        #[arg(long, default_value_t = 6)]
        r0: u64,
        #[arg(long, default_value_t = 60)]
        r_max: u64,
    },
    /// ω₀ = H_{R0,R0}(A, A).
    Omega0 {
        #[arg(long, default_value_t = 6)]
        r0: u64,
    },
    /// Bound on the slope ratio of H_{R1,R2} over the Cantor square.
    Lemma2 {
        #[arg(long, default_value_t = 6)]
        r1: u64,
        #[arg(long, default_value_t = 6)]
        r2: u64,
    },
    /// Segment of the chain containing m.
    Select {
        #[arg(long)]
        m: String,
        #[arg(long, default_value_t = 6)]
        r0: u64,
        #[arg(long, default_value_t = 10_000)]
        r_max: u64,
    },
    /// Builds α with liminf m_n(α) = m and verifies it.
    Construct {
        #[arg(long)]
        m: String,
        #[arg(long, default_value = "1e-10")]
        eps: String,
        #[arg(long, default_value_t = 6)]
        blocks: usize,
        #[arg(long, default_value_t = 6)]
        r0: u64,
        #[arg(long, default_value_t = 10_000)]
        r_max: u64,
        /// File receiving the digits of α as a continued fraction literal.
        #[arg(long, default_value = "alpha.cf")]
        out: std::path::PathBuf,
    },
    /// Seeded check that no two consecutive convergents both fail Legendre's condition.
    Vahlen {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 60)]
        depth: usize,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub format: Format,
    pub digits: u32,
    pub seed: u64,
}

impl RunConfig {
    pub const MAX_DIGITS: u32 = 1000;

    fn new(cli: &Cli) -> mdcf::Result<Self> {
        if cli.digits == 0 || cli.digits > Self::MAX_DIGITS {
            return Err(Error::InvalidArgument(format!("--digits must be in 1..={}", Self::MAX_DIGITS)));
        }
        Ok(RunConfig { format: cli.format, digits: cli.digits, seed: cli.seed })
    }
}

/// Outcome of a command that ran to completion.
pub struct Outcome {
    pub report: serde_json::Value,
    pub passed: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted { .. } | Error::Exhausted(_) => 3,
        Error::OutOfRange { .. } => 4,
        Error::Anomaly(_) | Error::CornerMaximality { .. } | Error::Ordering(_) | Error::MalformedSequence(_) => 5,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::new(&cli).and_then(|cfg| commands::run(&cli.command, &cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, outcome)) => {
            let stdout = std::io::stdout();
            if let Err(e) = output::emit(&mut stdout.lock(), &outcome.report, cfg.format) {
                eprintln!("error: writing output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
