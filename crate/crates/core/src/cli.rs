//! The `gom` command line.
//!
//! Exit codes: 0 success, 1 negative result (validation errors, no match,
//! refuted goal, ill-sorted term), 2 input error, 3 hook recursion budget
//! exceeded, 4 search bound hit.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand};

use crate::bv_prover::{Prover, SearchConfig, SearchStrategy, Status};
use crate::corpus;
use crate::gom_parser::{parse_module, parse_pattern};
use crate::hook_engine::{BuildError, Factory, FactoryError, TextBuildError, DEFAULT_RECURSION_BUDGET};
use crate::matcher::{Matcher, Substitution};
use crate::signature_model::{resolve_imports, validate, ImportError, SignatureModule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_BOUND: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "gom", version, about = "Signatures with normalizing constructors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a module
    Check {
        /// Module file, or one of the builtin names boolean, struct, nat
        module: String,
    },
    /// Build a term through the module's hooks and print its normal form
    Norm {
        module: String,
        #[arg(long)]
        expr: String,
        /// Bound on nested hook invocations
        #[arg(long, default_value_t = DEFAULT_RECURSION_BUDGET)]
        budget: usize,
    },
    /// Match a pattern against a normalized term
    Match {
        module: String,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        expr: String,
        /// Print every solution followed by their count
        #[arg(long)]
        all: bool,
    },
    /// Search for a BV proof of a structure over the builtin struct module
    Prove {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        frontier: usize,
        /// Disable the can-react restriction on the switch rule
        #[arg(long)]
        no_pruning: bool,
        /// Depth-first instead of breadth-first search
        #[arg(long)]
        dfs: bool,
    },
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Check { module } => check(&mut io, &module),
        Command::Norm { module, expr, budget } => norm(&mut io, &module, &expr, budget),
        Command::Match {
            module,
            pattern,
            expr,
            all,
        } => match_cmd(&mut io, &module, &pattern, &expr, all),
        Command::Prove {
            expr,
            depth,
            frontier,
            no_pruning,
            dfs,
        } => {
            let config = SearchConfig {
                max_depth: depth,
                max_frontier: frontier,
                can_react_pruning: !no_pruning,
                strategy: if dfs {
                    SearchStrategy::DepthFirst
                } else {
                    SearchStrategy::BreadthFirst
                },
            };
            prove(&mut io, &expr, config)
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn line(&mut self, text: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{text}");
    }

    fn error(&mut self, text: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{text}");
    }
}

/// Reads a module from a file, or from the builtin corpus when no such
/// file exists, and resolves its imports against the builtins. Errors are
/// reported and turned into an exit code.
fn load(io: &mut Io, spec: &str) -> Result<(String, SignatureModule), i32> {
    let (label, text) = if Path::new(spec).is_file() {
        match std::fs::read_to_string(spec) {
            Ok(text) => (spec.to_string(), text),
            Err(e) => {
                io.error(format!("{spec}: {e}"));
                return Err(EXIT_INPUT);
            }
        }
    } else if let Some(text) = corpus::text(spec) {
        (spec.to_string(), text.to_string())
    } else {
        io.error(format!("{spec}: no such file or builtin module"));
        return Err(EXIT_INPUT);
    };
    let module = match parse_module(&text) {
        Ok(m) => m,
        Err(e) => {
            io.error(format!("{label}:{}: SyntaxError: {}", e.pos, message_of(&e.to_string())));
            return Err(EXIT_INPUT);
        }
    };
    let mut deps = corpus::all_modules().expect("builtin modules parse");
    deps.retain(|m| m.name != module.name);
    match resolve_imports(&module, &deps) {
        Ok(m) => Ok((label, m)),
        Err(e) => {
            let code = match e {
                ImportError::UnknownImport(_) => "UnknownImport",
                ImportError::ImportCycle(_) => "ImportCycle",
                ImportError::NameClash { .. } => "NameClash",
            };
            io.error(format!("{label}:{}: {code}: {e}", module.pos));
            Err(EXIT_NEGATIVE)
        }
    }
}

/// Strips the leading position from a rendered syntax error.
fn message_of(rendered: &str) -> &str {
    rendered.split_once(": ").map_or(rendered, |(_, rest)| rest)
}

fn check(io: &mut Io, spec: &str) -> i32 {
    let (label, module) = match load(io, spec) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let report = validate(&module);
    for d in &report.diagnostics {
        io.error(format!("{label}:{d}"));
    }
    if report.accepted() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

/// Loads a module for norm/match; any failure is an input error.
fn factory(io: &mut Io, spec: &str) -> Result<Factory, i32> {
    let (label, module) = load(io, spec).map_err(|_| EXIT_INPUT)?;
    Factory::new(&module).map_err(|e| {
        match e {
            FactoryError::Invalid { report, .. } => {
                for d in &report.diagnostics {
                    io.error(format!("{label}:{d}"));
                }
            }
            other => io.error(format!("{label}: {other}")),
        }
        EXIT_INPUT
    })
}

fn build_error_code(e: &BuildError) -> i32 {
    match e {
        BuildError::RecursionBudgetExceeded { .. } => EXIT_DIVERGED,
        _ => EXIT_NEGATIVE,
    }
}

fn build(io: &mut Io, f: &Factory, expr: &str) -> Result<crate::term_store::NodeRef, i32> {
    f.build_text(expr).map_err(|e| match e {
        TextBuildError::Syntax(s) => {
            io.error(format!("--expr:{}: SyntaxError: {}", s.pos, message_of(&s.to_string())));
            EXIT_INPUT
        }
        TextBuildError::Build(b) => {
            io.error(format!("error: {b}"));
            build_error_code(&b)
        }
    })
}

fn norm(io: &mut Io, spec: &str, expr: &str, budget: usize) -> i32 {
    let f = match factory(io, spec) {
        Ok(f) => f.with_recursion_budget(budget),
        Err(code) => return code,
    };
    match build(io, &f, expr) {
        Ok(n) => {
            io.line(f.print(n));
            EXIT_OK
        }
        Err(code) => code,
    }
}

fn format_solution(f: &Factory, s: &Substitution) -> String {
    let text = s.display(f.store()).to_string();
    if text.is_empty() {
        "{}".to_string()
    } else {
        text
    }
}

fn match_cmd(io: &mut Io, spec: &str, pattern: &str, expr: &str, all: bool) -> i32 {
    let f = match factory(io, spec) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let pattern = match parse_pattern(pattern, f.signature()) {
        Ok(p) => p,
        Err(e) => {
            io.error(format!("--pattern: {e}"));
            return EXIT_INPUT;
        }
    };
    let subject = match build(io, &f, expr) {
        Ok(n) => n,
        Err(code) => return code,
    };
    let mut solutions = Vec::new();
    let _ = Matcher::new(f.store()).for_each(&pattern, subject, Substitution::new(), &mut |s| {
        solutions.push(s.clone());
        if all {
            std::ops::ControlFlow::Continue(())
        } else {
            std::ops::ControlFlow::Break(())
        }
    });
    if all {
        for s in &solutions {
            io.line(format_solution(&f, s));
        }
        io.line(format!("{} solutions", solutions.len()));
    } else if let Some(s) = solutions.first() {
        io.line(format_solution(&f, s));
    } else {
        io.line("no match");
    }
    if solutions.is_empty() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}

fn prove(io: &mut Io, expr: &str, config: SearchConfig) -> i32 {
    let f = match factory(io, "struct") {
        Ok(f) => f,
        Err(code) => return code,
    };
    let prover = match Prover::new(&f, config) {
        Ok(p) => p,
        Err(e) => {
            io.error(format!("error: {e}"));
            return EXIT_INPUT;
        }
    };
    let goal = match build(io, &f, expr) {
        Ok(n) => n,
        Err(code) => return code,
    };
    let trace = match prover.prove(goal) {
        Ok(t) => t,
        Err(e) => {
            io.error(format!("error: {e}"));
            return EXIT_INPUT;
        }
    };
    let _ = write!(io.out, "{}", prover.format_trace(&trace));
    match trace.status {
        Status::Proved => EXIT_OK,
        Status::RefutedByExhaustion => EXIT_NEGATIVE,
        Status::NotProvedWithinBounds => EXIT_BOUND,
    }
}
