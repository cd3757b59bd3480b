//! Shared helpers for the integration test suites.

#![allow(dead_code)]

use std::path::PathBuf;

use minimaple::ast::*;
use minimaple::check::{check_program, CheckOutcome};
use minimaple::diag::Severity;
use minimaple::parser::parse_source;
use minimaple::span::SourceFile;
use minimaple::types::{union_of, TypeTerm};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(name)
}

pub fn corpus_file(name: &str) -> SourceFile {
    let path = corpus_path(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    SourceFile::new(path.display().to_string(), text)
}

pub fn corpus_names() -> Vec<&'static str> {
    vec![
        "alwaysfalse.mm",
        "assertion.mm",
        "declarations.mm",
        "empty.mm",
        "fac.mm",
        "global_rebind.mm",
        "listing1.mm",
        "listing1_main.mm",
        "listing2.mm",
        "listing3.mm",
        "local_bad.mm",
        "narrowing.mm",
        "redundant.mm",
        "sumloop.mm",
        "sumloop_bad.mm",
    ]
}

/// Parse a corpus file, asserting it parses without errors.
pub fn parse_corpus(name: &str) -> Program {
    let outcome = parse_source(&corpus_file(name));
    let errors: Vec<_> = outcome
        .diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    assert!(errors.is_empty(), "{name} failed to parse: {errors:?}");
    outcome.program
}

pub fn check_corpus(name: &str) -> (Program, CheckOutcome) {
    let program = parse_corpus(name);
    let outcome = check_program(&program);
    (program, outcome)
}

// --- type shorthands ---------------------------------------------------

pub fn t_int() -> TypeTerm {
    TypeTerm::Integer
}

pub fn t_float() -> TypeTerm {
    TypeTerm::Float
}

pub fn t_or_if() -> TypeTerm {
    union_of(vec![t_int(), t_float()])
}

pub fn t_list(t: TypeTerm) -> TypeTerm {
    TypeTerm::List(Box::new(t))
}

pub fn t_rec(ts: Vec<TypeTerm>) -> TypeTerm {
    TypeTerm::Record(ts)
}

// --- AST navigation ----------------------------------------------------

/// The procedure definition assigned by the `idx`-th top-level command.
pub fn proc_of(program: &Program, idx: usize) -> &ProcDef {
    match &program.commands[idx].kind {
        CommandKind::Assign { sources, .. } => match &sources[0].kind {
            ExprKind::Proc(def) => def,
            other => panic!("command {idx} does not assign a procedure: {other:?}"),
        },
        other => panic!("command {idx} is not an assignment: {other:?}"),
    }
}

pub fn as_loop(cmd: &Command) -> &LoopCmd {
    match &cmd.kind {
        CommandKind::Loop(lp) => lp,
        other => panic!("expected loop, got {other:?}"),
    }
}

pub fn if_branches(cmd: &Command) -> (&[IfBranch], Option<&[Command]>) {
    match &cmd.kind {
        CommandKind::If { branches, else_body } => (branches, else_body.as_deref()),
        other => panic!("expected conditional, got {other:?}"),
    }
}

pub fn count_diags(outcome: &CheckOutcome, severity: Severity, code: &str) -> usize {
    outcome
        .diagnostics
        .iter()
        .filter(|d| d.severity == severity && d.code == code)
        .count()
}

pub fn assert_no_errors(name: &str, outcome: &CheckOutcome) {
    let errors: Vec<_> = outcome
        .diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    assert!(errors.is_empty(), "{name} has type errors: {errors:?}");
}
