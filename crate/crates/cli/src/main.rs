use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrewrite::strategy::MAX_STEPS_ENV;
use qrewrite_cli::{repl, Exit, Format, Options};

/// Check, normalize and replay derivations in the quantum term algebra.
#[derive(Parser)]
#[command(name = "qrewrite", version)]
struct Cli {
    /// Extra user rule file (repeatable).
    #[arg(long, global = true, value_name = "FILE")]
    rules: Vec<PathBuf>,
    /// Enable an optional rule such as ip.conjugateSymmetry (repeatable).
    #[arg(long, global = true, value_name = "ID")]
    optional: Vec<String>,
    /// Bound on rule applications during normalization.
    #[arg(long, global = true, env = MAX_STEPS_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: Option<u64>,
    /// Output notation for terms.
    #[arg(long, global = true, value_enum, default_value_t = Format::Canonical)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print its sort.
    Check {
        /// Term file; standard input when absent or `-`.
        file: Option<PathBuf>,
    },
    /// Rewrite a term to canonical form.
    Normalize {
        file: Option<PathBuf>,
        /// Write the derivation to this file.
        #[arg(long, value_name = "FILE")]
        dump_derivation: Option<PathBuf>,
    },
    /// Replay a derivation file and check its expected result.
    Replay { file: PathBuf },
    /// Check every rule numerically against random models.
    Soundness {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replace a rule by its deliberately broken variant (repeatable).
        #[arg(long, value_name = "RULE")]
        mutate: Vec<String>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Interactive derivation loop.
    Repl,
    /// List the available rules.
    Rules {
        /// Print the full Markdown reference.
        #[arg(long)]
        markdown: bool,
    },
}

fn run(cli: Cli) -> Result<Exit, (String, Exit)> {
    let mut opts = Options { format: cli.format, ..Options::default() };
    if let Some(n) = cli.max_steps {
        opts.config.max_steps = n as usize;
    }
    for path in &cli.rules {
        opts.add_rules(path)?;
    }
    for id in &cli.optional {
        opts.enable_optional(id)?;
    }
    let read = |file: Option<&PathBuf>| {
        qrewrite_cli::read_input(file.map(|p| p.as_path())).map_err(|e| (e.to_string(), Exit::Parse))
    };
    let (mut out, mut err) = (io::stdout(), io::stderr());
    Ok(match cli.command {
        Command::Check { file } => qrewrite_cli::check(&read(file.as_ref())?, &mut out, &mut err),
        Command::Normalize { file, dump_derivation } => qrewrite_cli::normalize_term(
            &read(file.as_ref())?,
            &opts,
            dump_derivation.as_deref(),
            &mut out,
            &mut err,
        ),
        Command::Replay { file } => qrewrite_cli::replay_derivation(&read(Some(&file))?, &opts, &mut out, &mut err),
        Command::Soundness { trials, seed, mutate, json } => {
            qrewrite_cli::soundness(&opts, trials, seed, &mutate, json, &mut out, &mut err)
        }
        Command::Repl => {
            let prompt = io::stdin().is_terminal();
            repl::run(io::stdin().lock(), &mut out, &opts, prompt).map_err(|e| (e.to_string(), Exit::Failure))?;
            Exit::Success
        }
        Command::Rules { markdown } => {
            let text = if markdown {
                qrewrite_cli::rules_markdown(&opts.registry)
            } else {
                qrewrite_cli::rules_text(&opts.registry)
            };
            print!("{text}");
            Exit::Success
        }
    })
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            code
        }
    };
    ExitCode::from(code.code())
}
