use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use confix::localize::{localization_tsv, parse_rational};
use confix::session::{Session, SessionConfig, SessionError};

#[derive(Parser)]
#[command(name = "confix", version, about = "Fixes contract violations in CDL programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random tests and list the faults they expose.
    Test(Opts),
    /// Rank the state components of one fault.
    Localize(Opts),
    /// Generate, validate and report fixes for one fault.
    Fix(Opts),
}

#[derive(Args)]
struct Opts {
    /// The CDL program.
    program: PathBuf,
    /// Fault as `routine:location:clause`, e.g. `move_item:9:go_i_th.valid_index`.
    #[arg(long)]
    fault: Option<String>,
    /// `key = value` settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Read tests from a suite file instead of generating them.
    #[arg(long)]
    suite: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of tests to generate.
    #[arg(long)]
    tests: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Interpreter step budget per test.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_parser = rational)]
    alpha: Option<String>,
    #[arg(long, value_parser = rational)]
    beta: Option<String>,
    #[arg(long, value_parser = rational)]
    gamma: Option<String>,
    /// Components whose fixing actions are tried.
    #[arg(long)]
    max_components: Option<usize>,
    /// Valid fixes listed in the report.
    #[arg(long)]
    top: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for suite files and reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn rational(s: &str) -> Result<String, String> {
    parse_rational(s)
        .map(|_| s.to_string())
        .ok_or_else(|| format!("`{s}` is not a number or fraction"))
}

impl Opts {
    fn config(&self) -> Result<SessionConfig, SessionError> {
        let mut c = SessionConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|source| SessionError::Io {
                path: path.clone(),
                source,
            })?;
            c.apply_file_text(&text)?;
        }
        let flags: [(&str, Option<String>); 12] = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("tests", self.tests.map(|v| v.to_string())),
            ("max_steps", self.max_steps.map(|v| v.to_string())),
            ("budget", self.budget.map(|v| v.to_string())),
            ("alpha", self.alpha.clone()),
            ("beta", self.beta.clone()),
            ("gamma", self.gamma.clone()),
            ("max_components", self.max_components.map(|v| v.to_string())),
            ("top", self.top.map(|v| v.to_string())),
            ("jobs", self.jobs.map(|v| v.to_string())),
            ("fault", self.fault.clone()),
            ("suite", self.suite.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, &v).map_err(SessionError::Invalid)?;
            }
        }
        if let Some(out) = &self.out {
            c.out = Some(out.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn note_written(path: Option<PathBuf>) {
    if let Some(p) = path {
        eprintln!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<ExitCode, SessionError> {
    match cli.command {
        Command::Test(opts) => {
            let session = Session::load(&opts.program, opts.config()?)?;
            let suite = session.suite()?;
            note_written(session.write_output(".suite", &session.suite_text(&suite))?);
            let s = suite.stats();
            println!(
                "{} tests: {} passing, {} failing, {} invalid, {} timeout",
                suite.entries.len(),
                s.passing,
                s.failing,
                s.invalid,
                s.timeout
            );
            for (fault, tests) in suite.faults() {
                println!("{}\t{}", fault.display(&session.program), tests.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Localize(opts) => {
            let session = Session::load(&opts.program, opts.config()?)?;
            let suite = session.suite()?;
            let fault = session.resolve_fault(&suite)?;
            let (_, loc) = session.localize(&suite, &fault)?;
            for w in &loc.warnings {
                eprintln!("warning: {w}");
            }
            let tsv = localization_tsv(&loc);
            note_written(session.write_output(".localize.tsv", &tsv)?);
            print!("{tsv}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Fix(opts) => {
            let session = Session::load(&opts.program, opts.config()?)?;
            let suite = session.suite()?;
            let fault = session.resolve_fault(&suite)?;
            let outcome = session.fix(&suite, &fault)?;
            let text = outcome.text();
            note_written(session.write_output(".fix.txt", &text)?);
            note_written(session.write_output(".fix.jsonl", &outcome.jsonl()?)?);
            print!("{text}");
            Ok(if outcome.report.is_empty() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(SessionError::NoFault) => {
            eprintln!("the suite has no failing test; nothing to fix");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
