use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use autgroups::cli::{self, BuildKind, ExportFormat, DEFAULT_SEED};
use autgroups::{Error, Result};

/// Word-automatic presentations of class-2 nilpotent groups.
#[derive(Parser)]
#[command(name = "autgroups", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a presentation bundle: nat-add, ep, hp, power, ut3 or twisted.
    Build {
        name: String,
        #[arg(long)]
        p: Option<u32>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide a closed formula over a bundle; prints true or false.
    Decide { bundle: PathBuf, formula: String },
    /// Multiply two domain words.
    Eval { bundle: PathBuf, x: String, y: String },
    /// Compare Op with the normal-form oracle (nat-add, ep, hp).
    Crosscheck {
        bundle: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        /// Check this many random pairs instead of all pairs.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Count domain words by length and compare with p^(n(n-1)/2).
    Census {
        bundle: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long)]
        p: Option<u32>,
        /// Supply length factor: n generators may use words of length c·n.
        #[arg(long, default_value_t = 1)]
        c: usize,
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Write a relation (or `domain`) as JSON or DOT.
    Export {
        bundle: PathBuf,
        relation: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(Error::from),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::from(e)),
                _ => Ok(()),
            }
        }
    }
}

fn json_or_table(format: &str) -> Result<bool> {
    match format {
        "json" => Ok(true),
        "table" => Ok(false),
        other => Err(Error::Parse(format!("unknown format '{other}'"))),
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Build { name, p, out } => {
            let manifest = cli::cmd_build(BuildKind::parse(&name)?, p, &out)?;
            let text = format!("wrote {} ({} relations) to {}", manifest.name, manifest.relations.len(), out.display());
            emit(&text, None)?;
        }
        Command::Decide { bundle, formula } => {
            emit(&cli::cmd_decide(&cli::load(&bundle)?, &formula)?.to_string(), None)?;
        }
        Command::Eval { bundle, x, y } => {
            emit(&cli::cmd_eval(&cli::load(&bundle)?, &x, &y)?, None)?;
        }
        Command::Crosscheck { bundle, max_len, samples, seed, format } => {
            let json = json_or_table(&format)?;
            let pres = cli::load(&bundle)?;
            let report = match samples {
                Some(n) => cli::crosscheck_sampled(&pres, max_len, n, seed)?,
                None => cli::crosscheck(&pres, max_len)?,
            };
            let text = if json { serde_json::to_string_pretty(&report)? } else { report.render() };
            emit(&text, None)?;
            return Ok(if report.passed() { 0 } else { 1 });
        }
        Command::Census { bundle, max_len, p, c, format } => {
            let json = json_or_table(&format)?;
            let pres = cli::load(&bundle)?;
            let report = cli::cmd_census(&pres, max_len, p.or(pres.p()), c)?;
            let text = if json { report.render_json() } else { report.render_table() };
            emit(text.trim_end(), None)?;
        }
        Command::Export { bundle, relation, format, out } => {
            let text = cli::cmd_export(&cli::load(&bundle)?, &relation, ExportFormat::parse(&format)?)?;
            emit(&text, out.as_deref())?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
