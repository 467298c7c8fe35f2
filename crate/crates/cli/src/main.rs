//! `occur`, the command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use occurrence_core::checker::Checker;
use occurrence_core::eval::{self, EvalOutcome, DEFAULT_FUEL};
use occurrence_core::harness::{run_fuzz, FuzzConfig, FuzzReport};
use occurrence_core::syntax::parse_program;
use occurrence_core::types::resugar;
use occurrence_core::{Constant, Expr, Mode, RefineEnv, TypeEnv, VisiblePred};

#[derive(Parser)]
#[command(name = "occur", version, about = "Occurrence typing for a small lambda calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the type and visible predicate of a program.
    Check {
        file: PathBuf,
        /// Also use the rules for intermediate terms of a reduction.
        #[arg(long)]
        extended: bool,
        #[command(flatten)]
        delta: DeltaArg,
    },
    /// Run a program to a value.
    Eval(RunArgs),
    /// Print every step of a run.
    Trace(RunArgs),
    /// Check subject reduction on random well-typed programs.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
        /// Declare even? and odd? and also check the erasure lemmas.
        #[arg(long)]
        refinements: bool,
        /// Write the report as JSON.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DeltaArg {
    /// Constants usable as refinements, e.g. `even?,odd?`.
    #[arg(long, value_delimiter = ',', value_parser = parse_constant)]
    delta: Vec<Constant>,
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
    /// Run without typechecking first.
    #[arg(long)]
    unchecked: bool,
    #[command(flatten)]
    delta: DeltaArg,
}

fn parse_constant(s: &str) -> Result<Constant, String> {
    Constant::from_name(s.trim()).ok_or_else(|| format!("unknown constant `{s}`"))
}

/// Outcome classes, mapped to exit codes 1 and 2.
enum Failure {
    Rejected(String),
    Usage(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Rejected(m) => (m, 1),
            Failure::Usage(m) => (m, 2),
        };
        eprintln!("{msg}");
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { file, extended, delta } => check(&file, extended, &delta.delta),
        Command::Eval(args) => run(&args, false),
        Command::Trace(args) => run(&args, true),
        Command::Fuzz {
            count,
            seed,
            depth,
            fuel,
            refinements,
            json,
        } => fuzz(
            FuzzConfig {
                count,
                seed,
                max_depth: depth,
                fuel,
                with_refinements: refinements,
                fault: None,
            },
            json.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

/// Reads a program and its refinement environment: in-file declarations and
/// `--delta` together, or `{even?, odd?}` when neither is given and the
/// program uses refinements.
fn load(file: &Path, extra: &[Constant]) -> Result<(RefineEnv, Expr), Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
    let program =
        parse_program(&text).map_err(|e| Failure::Usage(format!("{}:{e}", file.display())))?;
    let mut declared: Vec<Constant> = program.declared.iter().chain(extra).copied().collect();
    if declared.is_empty() && program.expr.uses_refinements() {
        declared = vec![Constant::IsEven, Constant::IsOdd];
    }
    Ok((declared.into_iter().collect(), program.expr))
}

fn show_pred(p: &VisiblePred) -> String {
    match p {
        VisiblePred::TypeOf(t, x) => VisiblePred::TypeOf(resugar(t), x.clone()).to_string(),
        _ => p.to_string(),
    }
}

fn check(file: &Path, extended: bool, extra: &[Constant]) -> Result<(), Failure> {
    let (delta, e) = load(file, extra)?;
    let mode = if extended { Mode::Extended } else { Mode::Primary };
    let j = Checker::new(&delta, mode)
        .check(&TypeEnv::new(), &e)
        .map_err(|err| Failure::Rejected(format!("type error: {err}")))?;
    println!("{} ; {}", resugar(&j.ty), show_pred(&j.pred));
    Ok(())
}

fn run(args: &RunArgs, show_steps: bool) -> Result<(), Failure> {
    let (delta, e) = load(&args.file, &args.delta.delta)?;
    if !args.unchecked {
        Checker::new(&delta, Mode::Primary)
            .check(&TypeEnv::new(), &e)
            .map_err(|err| Failure::Rejected(format!("type error: {err}")))?;
    }
    let run = eval::trace(&e, args.fuel).map_err(|err| Failure::Rejected(err.to_string()))?;
    if show_steps {
        for (i, t) in run.terms.iter().enumerate() {
            println!("{i}: {t}");
        }
    }
    match run.outcome {
        EvalOutcome::Value(v) => {
            if !show_steps {
                println!("{v}");
            }
            Ok(())
        }
        EvalOutcome::StuckAt { redex, reason, .. } => {
            Err(Failure::Rejected(format!("stuck: {reason} at `{redex}`")))
        }
        EvalOutcome::FuelExhausted { steps, .. } => {
            Err(Failure::Rejected(format!("out of fuel after {steps} steps")))
        }
    }
}

fn fuzz(config: FuzzConfig, json: Option<&Path>) -> Result<(), Failure> {
    config.validate().map_err(|e| Failure::Usage(format!("invalid fuzz configuration: {e}")))?;
    let report = run_fuzz(&config);
    print_summary(&config, &report);
    if let Some(path) = json {
        std::fs::write(path, report.to_json())
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure::Rejected(format!("{} failures", report.failures.len())))
    }
}

fn print_summary(config: &FuzzConfig, r: &FuzzReport) {
    println!(
        "generated {} terms (seed {}, depth {}, fuel {}{}) in {:.2}s",
        r.generated,
        r.seed,
        config.max_depth,
        config.fuel,
        if config.with_refinements { ", refinements" } else { "" },
        r.elapsed.as_secs_f64()
    );
    println!(
        "values {}, out of fuel {}, occurrence typing in {:.1}% of terms",
        r.values,
        r.fuel_exhausted,
        100.0 * r.occurrence_fraction()
    );
    println!(
        "failures: preservation {}, progress {}, soundness {}, erasure {}",
        r.preservation_failures().len(),
        r.progress_failures().len(),
        r.soundness_failures().len(),
        r.erasure_failures().len()
    );
    println!("coverage:");
    for (rule, n) in r.rule_coverage() {
        println!("  {rule} {n}");
    }
    for f in &r.failures {
        println!("{} at step {}: {}", f.kind, f.step, f.term);
        println!("  {}", f.detail);
    }
}
