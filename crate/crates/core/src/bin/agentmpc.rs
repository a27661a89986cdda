use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use agentmpc::harness::{
    cmd_figures, cmd_probe, cmd_run, cmd_selfcheck, CommandOutput, ProbeArgs, ProbeEquation,
    EXIT_ERROR,
};

#[derive(Parser)]
#[command(name = "agentmpc", version, about = "Multi-agent secure multiparty computation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Eq {
    /// Fragment capture probability, swept over r
    Eq1,
    /// Corrupt decision maker probability, swept over m
    Eq2,
    /// Wrong agent probability, swept over m and p
    Eq3,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print the outcome
    Run {
        scenario: PathBuf,
        /// Override the scenario's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Write the event transcript to this path
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Compare closed-form probabilities with Monte Carlo estimates
    Probe {
        #[arg(value_enum)]
        eq: Eq,
        /// Fragment counts, e.g. 1..20
        #[arg(long)]
        r: Option<String>,
        /// Decision maker counts
        #[arg(long)]
        m: Option<String>,
        /// Agent counts
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the table as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write fig2.csv and fig3.csv
    Figures {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the fast invariant checks
    Selfcheck,
}

fn emit(out: CommandOutput) -> ExitCode {
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let out = match cli.command {
        Command::Run {
            scenario,
            seed,
            transcript,
        } => cmd_run(&scenario, seed, transcript.as_deref()),
        Command::Probe {
            eq,
            r,
            m,
            p,
            trials,
            seed,
            csv,
        } => {
            let eq = match eq {
                Eq::Eq1 => ProbeEquation::Eq1,
                Eq::Eq2 => ProbeEquation::Eq2,
                Eq::Eq3 => ProbeEquation::Eq3,
            };
            cmd_probe(
                eq,
                &ProbeArgs {
                    r,
                    m,
                    p,
                    trials,
                    seed,
                    csv,
                },
            )
        }
        Command::Figures {
            out_dir,
            trials,
            seed,
        } => cmd_figures(&out_dir, trials, seed),
        Command::Selfcheck => cmd_selfcheck(),
    };
    emit(out)
}
