//! Interpreter tests against independent oracles.
//!
//! The oracles here are deliberately separate from the interpreter:
//! plain Rust folds and hand traces whose values are frozen into the
//! assertions below.

mod common;

use common::*;
use indexmap::IndexMap;
use minimaple::interp::value::{values_equal, Value};
use minimaple::interp::{run_program, EventKind, Interp, RunOptions, RunResult};
use minimaple::parser::parse_source;
use minimaple::span::SourceFile;
use num::BigInt;

fn run_corpus(name: &str, opts: RunOptions) -> RunResult {
    let program = parse_corpus(name);
    run_program(&program, opts)
}

fn run_src(src: &str, opts: RunOptions) -> RunResult {
    let outcome = parse_source(&SourceFile::new("test.mm", src));
    assert!(outcome.is_ok(), "parse failed: {:?}", outcome.diagnostics);
    run_program(&outcome.program, opts)
}

fn int(n: i64) -> Value {
    Value::int(n)
}

fn assert_int(v: &Value, expected: i64) {
    assert!(values_equal(v, &int(expected)), "expected {expected}, got {}", v.render());
}

fn assert_float_close(v: &Value, expected: f64) {
    match v {
        Value::Float(x) => {
            let rel = ((x - expected) / expected).abs();
            assert!(rel < 1e-9, "expected {expected}, got {x} (relative error {rel})");
        }
        other => panic!("expected a float, got {}", other.render()),
    }
}

/// Independent fold for the products procedure: multiply the integer
/// and float elements separately, stopping before a zero integer or a
/// float below one half; status is the 1-based stop index or -1.
enum Elem {
    I(i64),
    F(f64),
}

fn prod_oracle(items: &[Elem]) -> (BigInt, f64, i64) {
    let mut ints = BigInt::from(1);
    let mut floats = 1.0f64;
    for (idx, item) in items.iter().enumerate() {
        match item {
            Elem::I(0) => return (ints, floats, idx as i64 + 1),
            Elem::I(n) => ints *= *n,
            Elem::F(x) if *x < 0.5 => return (ints, floats, idx as i64 + 1),
            Elem::F(x) => floats *= *x,
        }
    }
    (ints, floats, -1)
}

const LISTING_INPUT: [Elem; 8] = [
    Elem::I(1),
    Elem::F(8.54),
    Elem::F(34.4),
    Elem::I(6),
    Elem::F(8.1),
    Elem::I(10),
    Elem::F(12.0),
    Elem::F(5.4),
];

#[test]
fn oracle_matches_the_frozen_values() {
    // The listing's input has 12 as an integer; the oracle above holds
    // it as a float only in this sanity check of the fold shape.
    let (ints, floats, status) = prod_oracle(&[
        Elem::I(1),
        Elem::F(8.54),
        Elem::F(34.4),
        Elem::I(6),
        Elem::F(8.1),
        Elem::I(10),
        Elem::I(12),
        Elem::F(5.4),
    ]);
    assert_eq!(ints, BigInt::from(720));
    assert!(((floats - 12849.76224) / 12849.76224).abs() < 1e-9);
    assert_eq!(status, -1);
    let (ints, floats, status) = prod_oracle(&[Elem::I(2), Elem::I(0), Elem::I(3)]);
    assert_eq!(ints, BigInt::from(2));
    assert_eq!(floats, 1.0);
    assert_eq!(status, 2);
    let _ = &LISTING_INPUT;
}

#[test]
fn expression_evaluation_basics() {
    let result = run_src(
        "a := 1/2 + 1/3;\nb := nops([]);\nc := type(8.54, float);\nd := nops([1,2,3]);\ne := 2 + 2.5;",
        RunOptions::default(),
    );
    result.outcome.as_ref().unwrap();
    let g = &result.final_globals;
    assert!(values_equal(&g["a"], &{
        let half = num::BigRational::new(1.into(), 2.into());
        let third = num::BigRational::new(1.into(), 3.into());
        // Oracle: exact rational arithmetic via the num crate directly.
        let sum = half + third;
        Value::Rational(sum)
    }));
    assert_int(&g["b"], 0);
    assert!(values_equal(&g["c"], &Value::Bool(true)));
    assert_int(&g["d"], 3);
    assert!(values_equal(&g["e"], &Value::Float(4.5)));
}

#[test]
fn listing2_normal_path() {
    let result = run_corpus("listing2.mm", RunOptions::default());
    result.outcome.as_ref().unwrap();
    let (ints_expected, floats_expected, status_expected) = prod_oracle(&[
        Elem::I(1),
        Elem::F(8.54),
        Elem::F(34.4),
        Elem::I(6),
        Elem::F(8.1),
        Elem::I(10),
        Elem::I(12),
        Elem::F(5.4),
    ]);
    let result_value = &result.final_globals["result"];
    match result_value {
        Value::List(items) => {
            assert_eq!(items.len(), 2);
            assert!(values_equal(&items[0], &Value::Int(ints_expected.clone())));
            assert_int(&items[0], 720);
            assert_float_close(&items[1], floats_expected);
            assert_float_close(&items[1], 12849.76224);
        }
        other => panic!("expected a pair, got {}", other.render()),
    }
    assert_int(&result.final_globals["status"], status_expected);
    assert_int(&result.final_globals["status"], -1);
    // The trace ends with the binding of `result`.
    let last = result.events.last().unwrap();
    assert_eq!(last.kind, EventKind::Assign);
    assert!(last.detail.starts_with("result = [720, "), "{}", last.detail);
}

#[test]
fn listing2_premature_path_with_contracts() {
    let mut opts = RunOptions::default();
    opts.check_contracts = true;
    let result = run_corpus("listing3.mm", opts);
    result.outcome.as_ref().unwrap();
    // Hand trace: x=2 is a non-zero integer (si=2); x=0 returns at
    // index 2 with sf still 1.0.
    match &result.final_globals["result"] {
        Value::List(items) => {
            assert_int(&items[0], 2);
            assert!(values_equal(&items[1], &Value::Float(1.0)));
        }
        other => panic!("expected a pair, got {}", other.render()),
    }
    assert_int(&result.final_globals["status"], 2);
}

#[test]
fn listing3_ensures_is_sensitive_to_the_result() {
    let program = parse_corpus("listing3.mm");
    let def = proc_of(&program, 1);
    let ensures = &def.spec.as_ref().unwrap().ensures;
    let mut interp = Interp::new(&program.declarations, RunOptions::default()).unwrap();
    interp.set_global("status", int(2));
    let mut bindings = IndexMap::new();
    bindings.insert("l".to_string(), Value::List(vec![int(2), int(0), int(3)]));

    let good = Value::List(vec![int(2), Value::Float(1.0)]);
    let v = interp.eval_spec_expr_with(ensures, None, Some(&good), &bindings).unwrap();
    assert!(values_equal(&v, &Value::Bool(true)), "ensures should hold for [2, 1.0]");

    let bad = Value::List(vec![int(3), Value::Float(1.0)]);
    let v = interp.eval_spec_expr_with(ensures, None, Some(&bad), &bindings).unwrap();
    assert!(values_equal(&v, &Value::Bool(false)), "ensures should fail for [3, 1.0]");
}

#[test]
fn contract_violation_is_reported() {
    let src = "\
p :=
(*@
  requires x > 0;
  ensures RESULT = x + 1;
@*)
proc(x::integer)::integer;
  return x + 1;
end proc;
y := p(1);
z := p(-1);
";
    let mut opts = RunOptions::default();
    opts.check_contracts = true;
    let result = run_src(src, opts);
    let err = result.outcome.unwrap_err();
    assert!(err.message.contains("precondition"), "{}", err.message);

    let src_bad_post = "\
p :=
(*@
  requires true;
  ensures RESULT = x + 2;
@*)
proc(x::integer)::integer;
  return x + 1;
end proc;
y := p(1);
";
    let mut opts = RunOptions::default();
    opts.check_contracts = true;
    let result = run_src(src_bad_post, opts);
    let err = result.outcome.unwrap_err();
    assert!(err.message.contains("postcondition"), "{}", err.message);
}

#[test]
fn sum_loop_invariant_and_variant() {
    let mut opts = RunOptions::default();
    opts.check_loop_specs = true;
    let result = run_corpus("sumloop.mm", opts);
    result.outcome.as_ref().unwrap();
    // Brute-force summation oracle.
    let expected: i64 = (1..=100).sum();
    assert_eq!(expected, 5050);
    assert_int(&result.final_globals["s"], expected);
    assert_int(&result.final_globals["i"], 101);
    // The invariant is checked before every guard test: 101 times.
    let invariant_checks: Vec<_> =
        result.events.iter().filter(|e| e.kind == EventKind::Invariant).collect();
    assert_eq!(invariant_checks.len(), 101);
    assert!(invariant_checks.iter().all(|e| e.detail == "holds"));
    // The variant descends strictly from 99 to 0.
    let variants: Vec<i64> = result
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Variant)
        .map(|e| e.detail.parse().unwrap())
        .collect();
    let descending: Vec<i64> = (0..=99).rev().collect();
    assert_eq!(variants, descending);
}

#[test]
fn corrupted_sum_loop_violates_the_invariant_on_the_second_check() {
    let mut opts = RunOptions::default();
    opts.check_loop_specs = true;
    let result = run_corpus("sumloop_bad.mm", opts);
    let err = result.outcome.unwrap_err();
    assert!(err.message.contains("invariant violated"), "{}", err.message);
    let invariant_checks: Vec<_> =
        result.events.iter().filter(|e| e.kind == EventKind::Invariant).collect();
    assert_eq!(invariant_checks.len(), 2, "violation should surface at the second check");
    assert_eq!(invariant_checks[0].detail, "holds");
    assert_eq!(invariant_checks[1].detail, "violated");
}

#[test]
fn loop_specs_are_skipped_when_disabled() {
    let result = run_corpus("sumloop_bad.mm", RunOptions::default());
    result.outcome.as_ref().unwrap();
    assert!(result.events.iter().all(|e| e.kind != EventKind::Invariant));
}

#[test]
fn define_rules_compute_the_factorial() {
    let result = run_corpus("fac.mm", RunOptions::default());
    result.outcome.as_ref().unwrap();
    assert_eq!(result.assertions.len(), 2);
    assert!(result.assertions.iter().all(|a| a.passed));
    // Direct application, against the brute-force fold.
    let program = parse_corpus("fac.mm");
    let interp = Interp::new(&program.declarations, RunOptions::default()).unwrap();
    let oracle: i64 = (1..=5).product();
    assert_eq!(oracle, 120);
    let v = interp
        .call_define("fac", &[int(0)])
        .expect("fac(0) evaluates");
    assert_int(&v, 1);
    let v = interp
        .call_define("fac", &[int(5)])
        .expect("fac(5) evaluates");
    assert_int(&v, oracle);
}

#[test]
fn assertions_execute_and_fail_loudly() {
    let result = run_corpus("assertion.mm", RunOptions::default());
    result.outcome.as_ref().unwrap();
    assert_eq!(result.assertions.len(), 1);
    assert!(result.assertions[0].passed);
    assert_int(&result.final_globals["y"], 1);
    assert_int(&result.final_globals["x"], 2);

    let result = run_src("x := 1.5;\nASSERT(type(x,integer), \"not an int\");", RunOptions::default());
    let err = result.outcome.unwrap_err();
    assert_eq!(err.label.as_deref(), Some("not an int"));

    // With assertion checking off the same program completes.
    let mut opts = RunOptions::default();
    opts.check_assertions = false;
    let result = run_src("x := 1.5;\nASSERT(type(x,integer), \"not an int\");", opts);
    result.outcome.as_ref().unwrap();
}

#[test]
fn errors_are_absorbing() {
    let result = run_src("x := 1;\nerror \"boom\";\nx := 2;", RunOptions::default());
    let err = result.outcome.unwrap_err();
    assert_eq!(err.message, "boom");
    // The command after the error never ran.
    assert_int(&result.final_globals["x"], 1);
    assert_eq!(result.events.last().unwrap().kind, EventKind::Error);
}

#[test]
fn runtime_errors() {
    let result = run_src("x := 1/0;", RunOptions::default());
    assert!(result.outcome.unwrap_err().message.contains("division by zero"));
    let result = run_src("l := [1,2];\nx := l[3];", RunOptions::default());
    assert!(result.outcome.unwrap_err().message.contains("out of bounds"));
    let result = run_src("x := 1;\ny := x(2);", RunOptions::default());
    assert!(result.outcome.unwrap_err().message.contains("non-procedure"));
    let result = run_src("x := unbound_name + 1;", RunOptions::default());
    assert!(result.outcome.unwrap_err().message.contains("non-numeric"));
}

#[test]
fn step_limit_stops_divergence() {
    let mut opts = RunOptions::default();
    opts.step_limit = 1000;
    let result = run_src("while (true) do\nx := 1;\nend do;", opts);
    assert!(result.outcome.unwrap_err().message.contains("step limit"));
}

#[test]
fn symbol_guard_is_a_runtime_error() {
    // Listing 1 carries `while (running)` with `running` unassigned; the
    // checker defers that to runtime, where it is an invalid guard.
    let result = run_corpus("listing1_main.mm", RunOptions::default());
    let err = result.outcome.unwrap_err();
    assert!(err.message.contains("guard"), "{}", err.message);
}

#[test]
fn closures_use_static_scoping() {
    let src = "\
make := proc(n::integer)::procedure[integer]();
  local f;
  f := proc()::integer;
    return n;
  end proc;
  return f;
end proc;
g := make(42);
y := g();
";
    let result = run_src(src, RunOptions::default());
    result.outcome.as_ref().unwrap();
    assert_int(&result.final_globals["y"], 42);
}

#[test]
fn dynamic_parameter_checks() {
    let src = "p := proc(x::integer)::integer;\n  return x;\nend proc;\ny := p(1.5);";
    let result = run_src(src, RunOptions::default());
    let err = result.outcome.unwrap_err();
    assert!(err.message.contains("declared type"), "{}", err.message);
}

#[test]
fn quantifier_evaluation() {
    let result = run_src(
        "ASSERT(forall(i::integer, 1<=i and i<=0 implies false), \"vacuous\");\nASSERT(forall(i::integer, 1<=i and i<=10 implies i*i<=100), \"squares\");\nASSERT(exists(i::integer, 1<=i and i<=10 and i*i = 49 implies true) = true, \"exists-shape\");",
        RunOptions::default(),
    );
    result.outcome.as_ref().unwrap();

    // seq/min/max/add over ranges, with an interval range oracle.
    let result = run_src(
        "ASSERT(seq(i*i, i = 1..4) = [1,4,9,16], \"seq\");\nASSERT(add(i, i = 1..100) = 5050, \"gauss\");\nASSERT(min(e, e in [3,1,2]) = 1, \"min\");\nASSERT(max(e, e in [3,1,2]) = 3, \"max\");\nASSERT(mul(e, e in [1,2,3,4], type(e,integer)) = 24, \"mul\");",
        RunOptions::default(),
    );
    result.outcome.as_ref().unwrap();
    assert!(result.assertions.iter().all(|a| a.passed));

    // An unbounded quantifier is a runtime error.
    let result = run_src("ASSERT(forall(i::integer, i = i));", RunOptions::default());
    assert!(result.outcome.unwrap_err().message.contains("unbounded quantifier"));

    // Exceeding the range bound is an error.
    let mut opts = RunOptions::default();
    opts.quantifier_bound = 10;
    let result = run_src("ASSERT(add(i, i = 1..100) = 5050);", opts);
    assert!(result.outcome.unwrap_err().message.contains("exceeds the bound"));
}

#[test]
fn abstract_predicates_are_not_executable() {
    let src = "(*@ `type/DDO`; assume(isDDO(d)); @*)\nASSERT(isDDO(1));";
    let result = run_src(src, RunOptions::default());
    let err = result.outcome.unwrap_err();
    assert!(err.message.contains("not executable"), "{}", err.message);
}

#[test]
fn old_in_invariants_refers_to_the_previous_iteration() {
    // s doubles each round: s = OLD s * 2 relates consecutive checks.
    let src = "\
s := 1;
i := 0;
while (i < 5) do
  (*@ invariant s = 2*OLD s or i = 0; decreases 5 - i; @*)
  s := s * 2;
  i := i + 1;
end do;
";
    let mut opts = RunOptions::default();
    opts.check_loop_specs = true;
    let result = run_src(src, opts);
    result.outcome.as_ref().unwrap();
    assert_int(&result.final_globals["s"], 32);
}

#[test]
fn multi_assignment_evaluates_sources_first() {
    let result = run_src("x := 1;\ny := 2;\nx, y := y, x;", RunOptions::default());
    result.outcome.as_ref().unwrap();
    assert_int(&result.final_globals["x"], 2);
    assert_int(&result.final_globals["y"], 1);
}

#[test]
fn uneval_values_are_inert() {
    let result = run_src("q := 'x + 1';", RunOptions::default());
    result.outcome.as_ref().unwrap();
    assert!(matches!(result.final_globals["q"], Value::Uneval(_)));
    let result = run_src("q := 'x + 1' + 1;", RunOptions::default());
    assert!(result.outcome.unwrap_err().message.contains("non-numeric"));
}
