//! `kb`: a command-line interface to finitely presented Boolean algebras.
//!
//! The binary runs scripts (`kb run FILE`), audits its embedded corpus
//! (`kb selftest`), and exposes each verb as a one-shot subcommand taking
//! the same s-expression syntax as script files.  Exit codes separate the
//! ways a run can end: `0` for success, `1` for a false answer (a failed
//! entailment, a refuted sequent, a mismatched expectation), `2` for
//! unreadable or ill-formed input, and `3` for a failed mathematical
//! precondition or a broken internal certificate.
//!
//! The environment variable `KB_ARITY_CAP` bounds the context size the
//! underlying store accepts.

mod cmds;
mod elab;
mod selftest;
mod sexp;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kbool::store::TermStore;

use crate::cmds::{execute, run_forms, CommandReport};
use crate::elab::{CliError, Env};
use crate::sexp::Sexp;

#[derive(Parser)]
#[command(name = "kb", version, about = "Canonical Boolean classes: algebras, colimits, interpolation, a decidable one-predicate theory, and its syntactic category")]
struct Cli {
    /// Emit one JSON object per executed form instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a script of definitions, commands, and expectations.
    Run {
        /// Path to the script.
        file: PathBuf,
    },
    /// Parse, round-trip, run, and recompute the embedded corpus.
    Selftest,
    /// Canonicalize a term.
    Canon { term: String },
    /// Decide the entailment `LHS ≤ RHS` between two terms.
    Leq { lhs: String, rhs: String },
    /// Decide provability of a sequent `(seq (g…) FORMULA FORMULA)`.
    Prove { sequent: String },
    /// Eliminate quantifiers and equalities from a formula.
    Qe { formula: String },
    /// Interpolate across a pushout square: two homs out of a shared
    /// source, an element of the left target, an element of the right.
    Interp { f: String, g: String, b: String, c: String },
    /// Synthesize a retraction onto the kept generators under a constraint.
    Retract { ctx: String, kept: String, constraint: String },
    /// Form a finite product of presentations.
    Product {
        #[arg(num_args = 1..)]
        factors: Vec<String>,
    },
    /// Form the pushout of two homs with a shared source.
    Pushout { left: String, right: String },
    /// Decompose a presentation along partition cells.
    Decompose {
        pres: String,
        #[arg(num_args = 1..)]
        cells: Vec<String>,
    },
    /// List the points of a presentation, or dualize a hom to a function
    /// on points.
    Dual { arg: String },
    /// Count the morphisms between two objects.
    SynHomCount { source: String, target: String },
    /// Compose two morphisms, first then second.
    SynCompose { first: String, second: String },
    /// Run the sampled equivalence audit up to a context size.
    SynCheckEquivalence {
        max_ctx: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if json {
                eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            } else {
                eprintln!("kb: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn make_store() -> Result<TermStore, CliError> {
    match std::env::var("KB_ARITY_CAP") {
        Err(_) => Ok(TermStore::new()),
        Ok(raw) => {
            let cap: usize = raw
                .parse()
                .map_err(|_| CliError::Io { msg: format!("KB_ARITY_CAP must be a number, got `{raw}`") })?;
            Ok(TermStore::with_arity_cap(cap))
        }
    }
}

fn atom(text: &str) -> Sexp {
    Sexp::Atom { text: text.to_string(), line: 1, column: 1 }
}

/// Assembles a one-shot command form from a verb and argument strings,
/// each parsed as one s-expression.
fn assemble(verb: &str, parts: &[&str]) -> Result<Sexp, CliError> {
    let mut items = vec![atom(verb)];
    for part in parts {
        items.push(sexp::parse_one(part)?);
    }
    Ok(Sexp::List { items, line: 1, column: 1 })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let mut store = make_store()?;
    let mut env = Env::new();

    let form = match cli.command {
        Command::Run { file } => {
            let src = std::fs::read_to_string(&file)
                .map_err(|e| CliError::Io { msg: format!("cannot read {}: {e}", file.display()) })?;
            let forms = sexp::parse(&src)?;
            let reports = run_forms(&mut store, &mut env, &forms)?;
            return Ok(finish(cli.json, &reports));
        }
        Command::Selftest => {
            let outcomes = selftest::selftest()?;
            for o in &outcomes {
                if cli.json {
                    println!(
                        "{}",
                        serde_json::json!({
                            "file": o.name,
                            "forms": o.forms,
                            "checks_recomputed": o.checks_recomputed,
                        })
                    );
                } else {
                    println!(
                        "selftest {}: {} forms ok, {} checks recomputed",
                        o.name, o.forms, o.checks_recomputed
                    );
                }
            }
            if !cli.json {
                println!("selftest: all {} corpus files pass", outcomes.len());
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Canon { term } => assemble("canon", &[&term])?,
        Command::Leq { lhs, rhs } => assemble("leq", &[&lhs, &rhs])?,
        Command::Prove { sequent } => assemble("prove", &[&sequent])?,
        Command::Qe { formula } => assemble("qe", &[&formula])?,
        Command::Interp { f, g, b, c } => assemble("interp", &[&f, &g, &b, &c])?,
        Command::Retract { ctx, kept, constraint } => {
            assemble("retract", &[&ctx, &kept, &constraint])?
        }
        Command::Product { factors } => {
            let parts: Vec<&str> = factors.iter().map(String::as_str).collect();
            assemble("product", &parts)?
        }
        Command::Pushout { left, right } => assemble("pushout", &[&left, &right])?,
        Command::Decompose { pres, cells } => {
            let mut parts: Vec<&str> = vec![&pres];
            parts.extend(cells.iter().map(String::as_str));
            assemble("decompose", &parts)?
        }
        Command::Dual { arg } => assemble("dual", &[&arg])?,
        Command::SynHomCount { source, target } => {
            assemble("syn-hom-count", &[&source, &target])?
        }
        Command::SynCompose { first, second } => assemble("syn-compose", &[&first, &second])?,
        Command::SynCheckEquivalence { max_ctx, seed } => {
            assemble("syn-check-equivalence", &[&max_ctx.to_string(), &seed.to_string()])?
        }
    };

    let report = execute(&mut store, &mut env, &form)?;
    Ok(finish(cli.json, &[report]))
}

fn finish(json: bool, reports: &[CommandReport]) -> ExitCode {
    let mut all = true;
    for report in reports {
        if json {
            println!("{}", report.to_json());
        } else {
            println!("{}", report.render_text());
        }
        all &= report.ok;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
