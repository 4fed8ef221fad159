use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covlab_core::runner::{self, Report, RunOptions, BUNDLED};
use covlab_core::scenario::{parse_scenario, Backend, Overrides, Scenario};
use covlab_core::Error;

#[derive(Parser)]
#[command(name = "covlab", version, about = "Bounded checks for semigroup and product-system representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario's checks and emit a JSON report.
    Run(RunArgs),
    /// Parse and build a scenario without running checks.
    Validate(ScenarioArgs),
    /// Re-verify the witnesses of a report.
    Replay(ReplayArgs),
    /// List the bundled scenarios.
    ListScenarios,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long)]
    scenario: String,
    /// Truncation radius L.
    #[arg(long)]
    truncation: Option<usize>,
    /// Hypothesis radius L' for the double-ball protocol.
    #[arg(long = "big-truncation")]
    big_truncation: Option<usize>,
    /// Word-length bound W (pairs per core word).
    #[arg(long = "word-length")]
    word_length: Option<usize>,
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Reuse verdicts stored under this directory.
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
    /// Include per-check wall-clock timing in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ReplayArgs {
    /// Report produced by `run`.
    #[arg(long)]
    report: PathBuf,
    /// Replay only this verdict (0-based index into the report).
    #[arg(long)]
    index: Option<usize>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    Backend::parse(s).ok_or_else(|| format!("unknown backend {s:?} (expected exact or float)"))
}

fn print_errors(errs: &[Error]) {
    for e in errs {
        eprintln!("error: {e}");
    }
}

fn load(args: &ScenarioArgs) -> Result<Scenario, Vec<Error>> {
    let text = match runner::bundled(&args.scenario) {
        Some(t) if !Path::new(&args.scenario).exists() => t.to_string(),
        _ => std::fs::read_to_string(&args.scenario).map_err(|e| vec![Error::Io(format!("{}: {e}", args.scenario))])?,
    };
    let overrides = Overrides {
        l: args.truncation,
        l_big: args.big_truncation,
        w: args.word_length,
        backend: args.backend,
        tolerance: args.tolerance,
        seed: args.seed,
    };
    let sc = parse_scenario(&text, &overrides)?;
    for w in &sc.warnings {
        eprintln!("warning: {w}");
    }
    Ok(sc)
}

fn run(args: RunArgs) -> Result<u8, Vec<Error>> {
    let sc = load(&args.scenario)?;
    let opts = RunOptions {
        timing: args.timing,
        cache_dir: args.cache_dir,
    };
    let report = runner::run(&sc, &opts)?;
    for v in &report.verdicts {
        let rep = v.rep.as_deref().map(|r| format!(" [{r}]")).unwrap_or_default();
        eprintln!("{:<12} {}{rep}: {}", v.status.as_str(), v.check, v.reason);
    }
    let text = report.to_json_string();
    match &args.report {
        Some(p) => std::fs::write(p, text).map_err(|e| vec![Error::Io(format!("{}: {e}", p.display()))])?,
        None => print!("{text}"),
    }
    Ok(report.exit_code as u8)
}

fn replay(args: ReplayArgs) -> Result<u8, Vec<Error>> {
    let text = std::fs::read_to_string(&args.report).map_err(|e| vec![Error::Io(format!("{}: {e}", args.report.display()))])?;
    let report = Report::from_json_str(&text).map_err(|e| vec![e])?;
    let outcomes = runner::replay(&report, args.index)?;
    let mut all = true;
    for o in &outcomes {
        let mark = if o.reproduced() { "reproduced" } else { "DIFFERS" };
        let rep = o.rep.as_deref().map(|r| format!(" [{r}]")).unwrap_or_default();
        println!("#{:<3} {}{rep} {}: {} -> {} {mark}", o.index, o.check, o.kind, o.original.as_str(), o.replayed.as_str());
        all &= o.reproduced();
    }
    if outcomes.is_empty() {
        println!("no witnesses to replay");
    }
    Ok(if all { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Validate(a) => load(&a).and_then(|sc| {
            runner::validate(&sc)?;
            println!("{}: ok ({} checks)", sc.name, sc.checks.len());
            Ok(0)
        }),
        Command::Replay(a) => replay(a),
        Command::ListScenarios => {
            for (name, text) in BUNDLED {
                let desc = serde_json::from_str::<serde_json::Value>(text).ok().and_then(|v| v["description"].as_str().map(str::to_string)).unwrap_or_default();
                println!("{name:<20} {desc}");
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(errs) => {
            print_errors(&errs);
            ExitCode::from(3)
        }
    }
}
