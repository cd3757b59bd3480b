//! Command-line driver: parse, type-check and optionally run MiniMaple
//! files, with Fig-style annotation dumps and stable exit codes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use minimaple::check::{check_program, CheckOutcome};
use minimaple::diag::{has_errors, sort_diagnostics, Diagnostic, Severity};
use minimaple::interp::{run_program, RunOptions};
use minimaple::parser::parse_source;
use minimaple::pretty::pretty_program;
use minimaple::report;
use minimaple::span::SourceFile;

const EXIT_OK: u8 = 0;
const EXIT_TYPE_ERRORS: u8 = 1;
const EXIT_SYNTAX_ERRORS: u8 = 2;
const EXIT_RUNTIME_ERROR: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "minimaple", version, about = "MiniMaple parser, type checker and interpreter")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Input files (.mm)
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Treat warnings as errors
    #[arg(long)]
    werror: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Check procedure pre- and postconditions at runtime
    #[arg(long)]
    check_contracts: bool,
    /// Check loop invariants and variants at runtime
    #[arg(long)]
    check_invariants: bool,
    /// Skip ASSERT commands
    #[arg(long)]
    no_assert: bool,
    /// Abort after this many execution steps
    #[arg(long, default_value_t = 1_000_000)]
    step_limit: u64,
    /// Largest enumerable quantifier range
    #[arg(long, default_value_t = 100_000)]
    quantifier_bound: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and type-check, printing the annotation dump
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Also print per-procedure annotation blocks
        #[arg(long)]
        verbose: bool,
    },
    /// Type-check and execute
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the AST as JSON lines
    DumpAst {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the final type environment as JSON
    DumpEnv {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Pretty-print to canonical form
    Fmt {
        #[command(flatten)]
        common: CommonArgs,
    },
}

struct Loaded {
    file: SourceFile,
    program: minimaple::ast::Program,
    parse_diags: Vec<Diagnostic>,
}

fn load(path: &PathBuf) -> Result<Loaded, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file = SourceFile::new(path.display().to_string(), text);
    let outcome = parse_source(&file);
    Ok(Loaded { file, program: outcome.program, parse_diags: outcome.diagnostics })
}

/// Check one already-parsed file; `None` when parsing failed.
fn check_loaded(loaded: &Loaded) -> Option<CheckOutcome> {
    if has_errors(&loaded.parse_diags) {
        return None;
    }
    Some(check_program(&loaded.program))
}

fn severity_exit(parse_diags: &[Diagnostic], outcome: Option<&CheckOutcome>, werror: bool) -> u8 {
    if has_errors(parse_diags) {
        return EXIT_SYNTAX_ERRORS;
    }
    let Some(outcome) = outcome else { return EXIT_SYNTAX_ERRORS };
    if !outcome.is_ok() {
        return EXIT_TYPE_ERRORS;
    }
    let warned = parse_diags
        .iter()
        .chain(&outcome.diagnostics)
        .any(|d| d.severity == Severity::Warning);
    if werror && warned {
        return EXIT_TYPE_ERRORS;
    }
    EXIT_OK
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Cmd::Check { common, verbose } => cmd_check(&common, verbose),
        Cmd::Run { common, run } => cmd_run(&common, &run),
        Cmd::DumpAst { common } => cmd_dump_ast(&common),
        Cmd::DumpEnv { common } => cmd_dump_env(&common),
        Cmd::Fmt { common } => cmd_fmt(&common),
    };
    ExitCode::from(code)
}

fn for_each_input(common: &CommonArgs, mut act: impl FnMut(&Loaded) -> u8) -> u8 {
    let mut worst = EXIT_OK;
    for path in &common.inputs {
        match load(path) {
            Ok(mut loaded) => {
                sort_diagnostics(&mut loaded.parse_diags);
                worst = worst.max(act(&loaded));
            }
            Err(message) => {
                eprintln!("{message}");
                worst = worst.max(EXIT_USAGE);
            }
        }
    }
    worst
}

fn cmd_check(common: &CommonArgs, verbose: bool) -> u8 {
    for_each_input(common, |loaded| {
        let outcome = check_loaded(loaded);
        match common.format {
            Format::Text => print!(
                "{}",
                report::render_check_text(
                    &loaded.file.path,
                    &loaded.parse_diags,
                    outcome.as_ref(),
                    verbose,
                )
            ),
            Format::Json => println!(
                "{}",
                report::render_check_json(&loaded.file.path, &loaded.parse_diags, outcome.as_ref())
            ),
        }
        severity_exit(&loaded.parse_diags, outcome.as_ref(), common.werror)
    })
}

fn cmd_run(common: &CommonArgs, run: &RunArgs) -> u8 {
    for_each_input(common, |loaded| {
        let outcome = check_loaded(loaded);
        let code = severity_exit(&loaded.parse_diags, outcome.as_ref(), common.werror);
        if code != EXIT_OK {
            // A run requires a successful check; report its findings.
            print!(
                "{}",
                report::render_check_text(
                    &loaded.file.path,
                    &loaded.parse_diags,
                    outcome.as_ref(),
                    false,
                )
            );
            return code;
        }
        let opts = RunOptions {
            check_assertions: !run.no_assert,
            check_loop_specs: run.check_invariants,
            check_contracts: run.check_contracts,
            step_limit: run.step_limit,
            quantifier_bound: run.quantifier_bound,
        };
        let result = run_program(&loaded.program, opts);
        match common.format {
            Format::Text => {
                print!("{}", report::render_run_text(&result));
                if let Err(e) = &result.outcome {
                    print!("{}", report::render_run_error(&loaded.file.path, e));
                }
            }
            Format::Json => print!("{}", report::render_run_json(&result)),
        }
        if result.outcome.is_err() {
            EXIT_RUNTIME_ERROR
        } else {
            EXIT_OK
        }
    })
}

fn cmd_dump_ast(common: &CommonArgs) -> u8 {
    for_each_input(common, |loaded| {
        if has_errors(&loaded.parse_diags) {
            for d in &loaded.parse_diags {
                eprintln!("{}", d.render(&loaded.file.path));
            }
            return EXIT_SYNTAX_ERRORS;
        }
        print!("{}", report::render_ast_json(&loaded.program));
        EXIT_OK
    })
}

fn cmd_dump_env(common: &CommonArgs) -> u8 {
    for_each_input(common, |loaded| {
        let outcome = check_loaded(loaded);
        let code = severity_exit(&loaded.parse_diags, outcome.as_ref(), common.werror);
        match &outcome {
            Some(outcome) if code != EXIT_SYNTAX_ERRORS => {
                println!("{}", report::render_env_dump_json(&loaded.file.path, outcome));
            }
            _ => {
                for d in &loaded.parse_diags {
                    eprintln!("{}", d.render(&loaded.file.path));
                }
            }
        }
        code
    })
}

fn cmd_fmt(common: &CommonArgs) -> u8 {
    for_each_input(common, |loaded| {
        if has_errors(&loaded.parse_diags) {
            for d in &loaded.parse_diags {
                eprintln!("{}", d.render(&loaded.file.path));
            }
            return EXIT_SYNTAX_ERRORS;
        }
        print!("{}", pretty_program(&loaded.program));
        EXIT_OK
    })
}
