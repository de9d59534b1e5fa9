use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use valtool::arith::ValueGroup;
use valtool::genseq::validate_sequence;
use valtool::scenario::{load_scenario, parse_value, run_scenario, Format, RunOptions, Scenario, ScenarioError};

#[derive(Parser)]
#[command(name = "valtool", version, about = "Run valuation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a scenario and run its commands.
    Run {
        file: PathBuf,
        /// Depth for commands that do not give one.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Fmt::Text)]
        format: Fmt,
        /// Seed for randomized commands.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip splitting samples whose value exceeds this.
        #[arg(long)]
        value_bound: Option<String>,
    },
    /// Parse a scenario and validate every valuation in it.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Text,
    Csv,
    Dot,
}

const FAULT: u8 = 1;
const INVALID: u8 = 2;

fn load(file: &Path) -> Result<Scenario, ExitCode> {
    load_scenario(file).map_err(|e| {
        match e {
            ScenarioError::Parse(p) => eprintln!("{}:{p}", file.display()),
            e => eprintln!("valtool: {e}"),
        }
        ExitCode::from(INVALID)
    })
}

fn run(file: PathBuf, depth: usize, format: Fmt, seed: u64, bound: Option<String>) -> Result<ExitCode, ExitCode> {
    let sc = load(&file)?;
    let value_bound = match bound {
        Some(b) => Some(parse_value(&b, &sc.group).or_else(|_| parse_value(&b, &ValueGroup::rational())).map_err(|e| {
            eprintln!("valtool: --value-bound: {e}");
            ExitCode::from(INVALID)
        })?),
        None => None,
    };
    let opts = RunOptions { depth, seed, value_bound };
    let format = match format {
        Fmt::Text => Format::Text,
        Fmt::Csv => Format::Csv,
        Fmt::Dot => Format::Dot,
    };
    let out = run_scenario(&sc, &opts).render(format);
    print!("{}", out.body);
    if out.faults > 0 {
        eprintln!("valtool: {} command(s) faulted", out.faults);
        return Ok(ExitCode::from(FAULT));
    }
    Ok(ExitCode::SUCCESS)
}

fn check(file: PathBuf) -> Result<ExitCode, ExitCode> {
    let sc = load(&file)?;
    let mut bad = 0;
    for (name, g) in &sc.valuations {
        match validate_sequence(g) {
            Ok(rep) if rep.passed() => println!("{name}: ok ({} checks)", rep.checks.len()),
            Ok(rep) => {
                bad += 1;
                println!("{name}: invalid");
                for c in rep.failures() {
                    println!("  {}: {}", c.name, c.detail);
                }
            }
            Err(e) => {
                bad += 1;
                println!("{name}: {e}");
            }
        }
    }
    println!("{} command(s) parsed", sc.commands.len());
    Ok(if bad > 0 { ExitCode::from(INVALID) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Cmd::Run { file, depth, format, seed, value_bound } => run(file, depth, format, seed, value_bound),
        Cmd::Check { file } => check(file),
    };
    res.unwrap_or_else(|code| code)
}
