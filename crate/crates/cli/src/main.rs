use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use prodsys_cli::commands::{self, EXIT_CONFIG};
use prodsys_cli::{default_config, parse_config, Format, Output, SuiteOptions};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Parser, Debug)]
#[command(name = "prodsys", version, about = "Product systems over quasi-lattice ordered monoids")]
struct Cli {
    /// System config (TOML, or JSON by extension). Defaults to (N,2)*(N,2) with L = 3.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Least upper bound of two monoid elements.
    Join { s: String, t: String },
    /// Whether s <= t.
    Leq { s: String, t: String },
    /// Product of two Wick expressions.
    WickMul { a: String, b: String },
    /// Gauge expectation of a Wick expression.
    Expect { x: String },
    /// Norm of a gauge-diagonal Wick expression.
    NormDiag { x: String },
    /// Fock representation of a Wick expression.
    Fock {
        x: String,
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Run a check suite (or `all`).
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include wall time per report.
        #[arg(long)]
        timings: bool,
    },
    /// Run a demo scenario.
    Demo { name: String },
}

fn run(cli: Cli) -> Output {
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Machine => Format::Machine,
    };
    let loaded = match &cli.config {
        Some(path) => match parse_config(path) {
            Ok(c) => Some(c),
            Err(e) => return Output { code: EXIT_CONFIG, stdout: String::new(), stderr: format!("error: {e}\n") },
        },
        None => None,
    };
    let cfg = loaded.clone().unwrap_or_else(default_config);
    match cli.command {
        Command::Join { s, t } => commands::join(&cfg, &s, &t, format),
        Command::Leq { s, t } => commands::leq(&cfg, &s, &t, format),
        Command::WickMul { a, b } => commands::wick_mul(&cfg, &a, &b, format),
        Command::Expect { x } => commands::expect(&cfg, &x, format),
        Command::NormDiag { x } => commands::norm_diag(&cfg, &x, format),
        Command::Fock { x, bound, matrix_out } => commands::fock(&cfg, &x, bound, matrix_out.as_deref(), format),
        Command::Check { suite, seed, timings } => {
            commands::check(loaded.as_ref(), &suite, SuiteOptions { seed, timings }, format)
        }
        Command::Demo { name } => commands::demo(&name, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let out = run(cli);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
