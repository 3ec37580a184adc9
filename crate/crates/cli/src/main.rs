use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use homlie_cli::{run_file, suite_output, CliError, OutputFormat, RunOptions, INPUT_ERROR};

#[derive(Parser)]
#[command(name = "homlie", version, about = "Exact verification jobs for twisted derivations and hom-Lie brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Seed for randomized sweeps; overrides seeds in job files.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also evaluate the printed closed forms that disagree with the derived ones.
    #[arg(long, global = true)]
    paper_lemma_literal: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job in a job file.
    Run { jobfile: PathBuf },
    /// Run a named suite: paper_identities, wach_grid or bernoulli_table.
    Suite { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Structured => OutputFormat::Structured,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        seed: cli.seed,
        paper_lemma_literal: cli.paper_lemma_literal,
    };
    let format = cli.format.map(OutputFormat::from);
    let result = match &cli.command {
        Command::Run { jobfile } => std::fs::read_to_string(jobfile)
            .map_err(|e| CliError::Io {
                path: jobfile.display().to_string(),
                message: e.to_string(),
            })
            .and_then(|text| run_file(&text, format, &opts)),
        Command::Suite { name } => suite_output(name, format.unwrap_or_default(), &opts),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("homlie: {e}");
            ExitCode::from(INPUT_ERROR as u8)
        }
    }
}
