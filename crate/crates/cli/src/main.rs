mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tmtrace::{Error, Verdict};

use config::{CommandKind, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "tmtrace",
    version,
    about = "Certified computations for Thue-Morse trace polynomials"
)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "TMTRACE_PRECISION", default_value_t = 256)]
    precision: u32,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "TMTRACE_THREADS")]
    threads: Option<usize>,
    /// Truncation order of local power series.
    #[arg(long, global = true, default_value_t = tmtrace::germ::DEFAULT_ORDER)]
    order: usize,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate h_n at a list of points.
    Trace {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        /// Points, repeated or comma separated.
        #[arg(
            long,
            required = true,
            num_args = 1,
            value_delimiter = ',',
            allow_hyphen_values = true
        )]
        x: Vec<String>,
    },
    /// Certify the initial germ (h_4, h_5) at sqrt(2 + lambda^2).
    Germ {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Compare sup |Delta_k| with C_m alpha^k on [-2^{m-1} pi, 2^{m-1} pi].
    Converge {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// Defaults to 2m + 1.
        #[arg(long)]
        k_min: Option<i64>,
        #[arg(long, default_value_t = 20)]
        k_max: i64,
        /// Grid points per unit length.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Bound the sup on closed cells instead of sampling points.
        #[arg(long)]
        rigorous: bool,
    },
    /// Build the nested interval tree and its dimension report.
    Cantor {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 5)]
        k_sim: u32,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Print the proof constants and the certified minimal K.
    Constants {
        /// Largest m for C~_m and C_m.
        #[arg(long, default_value_t = 6)]
        m_max: usize,
    },
    /// Certified zeros of h_1, ..., h_n in an interval.
    Sigma {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value = "-4", allow_hyphen_values = true)]
        lo: String,
        #[arg(long, default_value = "4", allow_hyphen_values = true)]
        hi: String,
    },
    /// Interval ratio and zero spacing checks around the initial germ.
    RatioCheck {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 5)]
        k_sim: u32,
    },
}

impl Cmd {
    fn kind(&self) -> CommandKind {
        match self {
            Cmd::Trace { .. } => CommandKind::Trace,
            Cmd::Germ { .. } => CommandKind::Germ,
            Cmd::Converge { .. } => CommandKind::Converge,
            Cmd::Cantor { .. } => CommandKind::Cantor,
            Cmd::Constants { .. } => CommandKind::Constants,
            Cmd::Sigma { .. } => CommandKind::Sigma,
            Cmd::RatioCheck { .. } => CommandKind::RatioCheck,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Cmd::Trace { .. } | Cmd::Converge { .. } | Cmd::Constants { .. } => Format::Csv,
            _ => Format::Json,
        }
    }

    fn lambda(&self) -> &str {
        match self {
            Cmd::Trace { lambda, .. }
            | Cmd::Germ { lambda }
            | Cmd::Converge { lambda, .. }
            | Cmd::Cantor { lambda, .. }
            | Cmd::Sigma { lambda, .. }
            | Cmd::RatioCheck { lambda, .. } => lambda,
            Cmd::Constants { .. } => "0",
        }
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_UNDECIDABLE: u8 = 3;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::CapExceeded { .. } => EXIT_INVALID_INPUT,
        Error::Undecidable(_) | Error::DivisionByZero | Error::SingularScale => EXIT_UNDECIDABLE,
        _ => EXIT_CHECK_FAILED,
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Verified => 0,
        Verdict::Refuted => EXIT_CHECK_FAILED,
        Verdict::Undecidable => EXIT_UNDECIDABLE,
    }
}

fn run_config(cli: &Cli) -> RunConfig {
    let (k_sim, depth, grid) = match &cli.command {
        Cmd::Cantor { k_sim, depth, .. } => (*k_sim, *depth, 64),
        Cmd::RatioCheck { k_sim, .. } => (*k_sim, 0, 64),
        Cmd::Converge { grid, .. } => (5, 0, *grid),
        _ => (5, 0, 64),
    };
    RunConfig {
        command: cli.command.kind(),
        lambda: cli.command.lambda().trim().to_string(),
        precision_bits: cli.precision,
        order: cli.order,
        k_sim,
        depth,
        grid,
        output_format: cli.format.unwrap_or_else(|| cli.command.default_format()),
        output_path: cli.output.clone(),
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let cfg = run_config(cli);
    cfg.validate()?;
    let out = match &cli.command {
        Cmd::Trace { n, x, .. } => commands::trace(&cfg, *n, x)?,
        Cmd::Germ { .. } => commands::germ(&cfg)?,
        Cmd::Converge {
            m,
            k_min,
            k_max,
            rigorous,
            ..
        } => commands::converge(&cfg, *m, *k_min, *k_max, *rigorous)?,
        Cmd::Cantor { .. } => commands::cantor(&cfg)?,
        Cmd::Constants { m_max } => commands::constants(&cfg, *m_max)?,
        Cmd::Sigma { n_max, lo, hi, .. } => commands::sigma(&cfg, *n_max, lo, hi)?,
        Cmd::RatioCheck { .. } => commands::ratio(&cfg)?,
    };
    if let Err(e) = out.write(cfg.output_format, cfg.output_path.as_deref()) {
        eprintln!("tmtrace: cannot write output: {e}");
        return Ok(EXIT_INVALID_INPUT);
    }
    Ok(verdict_code(out.verdict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("tmtrace: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_contract() {
        assert_eq!(verdict_code(Verdict::Verified), 0);
        assert_eq!(verdict_code(Verdict::Refuted), 1);
        assert_eq!(verdict_code(Verdict::Undecidable), 3);
        assert_eq!(error_code(&Error::InvalidInput(String::new())), 2);
        assert_eq!(
            error_code(&Error::CapExceeded {
                what: "n",
                value: 30,
                cap: 26
            }),
            2
        );
        assert_eq!(error_code(&Error::Undecidable(String::new())), 3);
        assert_eq!(error_code(&Error::DivisionByZero), 3);
        assert_eq!(error_code(&Error::Refuted(String::new())), 1);
        assert_eq!(error_code(&Error::Precondition(String::new())), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
