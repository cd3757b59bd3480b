//! Integration tests for the type checker against the worked examples.

mod common;

use common::*;
use minimaple::check::{check_program, RetFlag};
use minimaple::diag::Severity;
use minimaple::env::TypeEnvironment;
use minimaple::parser::parse_source;
use minimaple::span::SourceFile;
use minimaple::types::TypeTerm;

fn check_src(src: &str) -> minimaple::check::CheckOutcome {
    let outcome = parse_source(&SourceFile::new("test.mm", src));
    assert!(outcome.is_ok(), "parse failed: {:?}", outcome.diagnostics);
    check_program(&outcome.program)
}

#[test]
fn empty_program_checks_cleanly() {
    let (_, outcome) = check_corpus("empty.mm");
    assert!(outcome.diagnostics.is_empty());
    assert!(outcome.final_env.is_empty());
}

#[test]
fn listing2_annotated_environments() {
    let (program, outcome) = check_corpus("listing2.mm");
    assert_no_errors("listing2.mm", &outcome);

    let def = proc_of(&program, 1);
    // Body: for-loop, status := -1, return [si,sf].
    assert_eq!(def.body.len(), 3);

    // Entry environment (the annotation before the loop).
    let entry = &outcome.annotation(def.body[0].id).unwrap().env_before;
    let expected = TypeEnvironment::from([
        ("l", t_list(t_or_if())),
        ("i", TypeTerm::Symbol),
        ("x", t_or_if()),
        ("si", t_int()),
        ("sf", t_float()),
        ("status", TypeTerm::Anything),
    ]);
    assert_eq!(entry, &expected, "entry environment mismatch");

    // Inside the loop body after `x := l[i]; status := i;`.
    let lp = as_loop(&def.body[0]);
    assert_eq!(lp.body.len(), 3);
    let before_if = &outcome.annotation(lp.body[2].id).unwrap().env_before;
    assert_eq!(before_if.get("i"), Some(&t_int()));
    assert_eq!(before_if.get("x"), Some(&t_or_if()));
    assert_eq!(before_if.get("status"), Some(&t_int()));

    // Branch environments of the conditional.
    let (branches, else_body) = if_branches(&lp.body[2]);
    assert_eq!(branches.len(), 2);
    assert!(else_body.is_none());
    let then_entry = &outcome.annotation(branches[0].body[0].id).unwrap().env_before;
    assert_eq!(then_entry.get("x"), Some(&t_int()));
    assert_eq!(then_entry.get("si"), Some(&t_int()));
    assert_eq!(then_entry.get("status"), Some(&t_int()));
    let elif_entry = &outcome.annotation(branches[1].body[0].id).unwrap().env_before;
    assert_eq!(elif_entry.get("x"), Some(&t_float()));
    assert_eq!(elif_entry.get("sf"), Some(&t_float()));
    assert_eq!(elif_entry.get("status"), Some(&t_int()));

    // After the conditional the branches merge to the union.
    let after_if = &outcome.annotation(lp.body[2].id).unwrap().info.env_after;
    assert_eq!(after_if.get("x"), Some(&t_or_if()));
    assert_eq!(after_if.get("i"), Some(&t_int()));
    assert_eq!(after_if.get("status"), Some(&t_int()));

    // The loop's fixed point restores the pre-loop environment.
    let after_loop = &outcome.annotation(def.body[0].id).unwrap().info.env_after;
    assert_eq!(after_loop, &expected);
    assert_eq!(after_loop.get("i"), Some(&TypeTerm::Symbol));
    assert_eq!(after_loop.get("status"), Some(&TypeTerm::Anything));

    // After `status := -1`.
    let after_status = &outcome.annotation(def.body[1].id).unwrap().info.env_after;
    assert_eq!(after_status.get("status"), Some(&t_int()));

    // Final top-level environment.
    let final_env = &outcome.final_env;
    assert_eq!(final_env.len(), 3);
    assert_eq!(final_env.get("status"), Some(&t_int()));
    assert_eq!(
        final_env.get("prod"),
        Some(&TypeTerm::Procedure {
            ret: Box::new(t_rec(vec![t_int(), t_float()])),
            args: vec![t_list(t_or_if())],
        })
    );
    assert_eq!(final_env.get("result"), Some(&t_rec(vec![t_int(), t_float()])));
}

#[test]
fn listing1_checks_with_no_errors() {
    let (_, outcome) = check_corpus("listing1_main.mm");
    assert_no_errors("listing1_main.mm", &outcome);
    assert!(outcome.top_info.ret_types.is_empty());
    assert!(outcome.top_info.exceptions.is_empty());
    assert_eq!(outcome.top_info.ret_flag, RetFlag::NotAret);
    let final_env = &outcome.final_env;
    assert_eq!(final_env.len(), 3);
    assert_eq!(final_env.get("result"), Some(&t_rec(vec![t_int(), t_float()])));
    // `while (running)` refers to an unassigned name: allowed, the
    // guard's truth is deferred to runtime.
    assert!(outcome.diagnostics.iter().any(|d| d.code == "unbound-name"));
    // Listing 1 never touches its declared global inside the body.
    assert_eq!(count_diags(&outcome, Severity::Warning, "unused-variable"), 1);
}

#[test]
fn top_level_rebinding_changes_the_type() {
    let (_, outcome) = check_corpus("global_rebind.mm");
    assert_no_errors("global_rebind.mm", &outcome);
    assert_eq!(outcome.final_env.get("x"), Some(&t_int()));
}

#[test]
fn narrowing_without_warning() {
    let (program, outcome) = check_corpus("narrowing.mm");
    assert_no_errors("narrowing.mm", &outcome);
    assert!(
        outcome.diagnostics.iter().all(|d| d.severity != Severity::Warning),
        "unexpected warnings: {:?}",
        outcome.diagnostics
    );
    // In the else branch x has automatically type float.
    let def = proc_of(&program, 0);
    let (_, else_body) = if_branches(&def.body[0]);
    let else_entry = &outcome.annotation(else_body.unwrap()[0].id).unwrap().env_before;
    assert_eq!(else_entry.get("x"), Some(&t_float()));
}

#[test]
fn redundant_test_warns_once() {
    let (_, outcome) = check_corpus("redundant.mm");
    assert_no_errors("redundant.mm", &outcome);
    assert_eq!(count_diags(&outcome, Severity::Warning, "redundant-test"), 1);
}

#[test]
fn impossible_test_warns_always_false() {
    let (_, outcome) = check_corpus("alwaysfalse.mm");
    assert_no_errors("alwaysfalse.mm", &outcome);
    assert_eq!(count_diags(&outcome, Severity::Warning, "test-always-false"), 1);
}

#[test]
fn local_assignment_must_specialize() {
    let (_, outcome) = check_corpus("local_bad.mm");
    assert_eq!(count_diags(&outcome, Severity::Error, "narrow-conflict"), 1);
}

#[test]
fn listing3_specification_checks_cleanly() {
    let (_, outcome) = check_corpus("listing3.mm");
    assert_no_errors("listing3.mm", &outcome);
}

#[test]
fn sum_loop_checks_cleanly() {
    for name in ["sumloop.mm", "sumloop_bad.mm"] {
        let (_, outcome) = check_corpus(name);
        assert_no_errors(name, &outcome);
    }
}

#[test]
fn fac_and_assertion_check_cleanly() {
    for name in ["fac.mm", "assertion.mm", "declarations.mm"] {
        let (_, outcome) = check_corpus(name);
        assert_no_errors(name, &outcome);
    }
}

#[test]
fn ill_typed_ensures_is_rejected() {
    let outcome = check_src(
        "p :=\n(*@ requires true; ensures 1+1; @*)\nproc(x::integer)::integer;\n  return x;\nend proc;",
    );
    assert_eq!(count_diags(&outcome, Severity::Error, "spec-not-boolean"), 1);
}

#[test]
fn decreases_must_be_integer() {
    let outcome = check_src(
        "while (true) do\n(*@ invariant true; decreases 1.5; @*)\nx := 1;\nend do;",
    );
    assert_eq!(count_diags(&outcome, Severity::Error, "decreases-not-integer"), 1);
}

#[test]
fn return_is_local_to_procedures() {
    let outcome = check_src("return 1;");
    assert_eq!(count_diags(&outcome, Severity::Error, "return-outside-proc"), 1);
    // Also inside a top-level loop body (a local context, but still
    // outside any procedure).
    let outcome = check_src("while (true) do\nreturn 1;\nend do;");
    assert_eq!(count_diags(&outcome, Severity::Error, "return-outside-proc"), 1);
}

#[test]
fn missing_and_mismatched_returns() {
    let outcome = check_src("p := proc(x::integer)::integer;\n  si := 1;\nend proc;");
    assert!(outcome.diagnostics.iter().any(|d| d.code == "missing-return"));
    let outcome = check_src("p := proc(x::integer)::integer;\n  return \"s\";\nend proc;");
    assert!(outcome.diagnostics.iter().any(|d| d.code == "return-type"));
    // A void procedure without returns is legal.
    let outcome = check_src("p := proc(x::integer)::void;\n  y := x;\nend proc;");
    assert!(
        !outcome.diagnostics.iter().any(|d| d.code == "missing-return"),
        "{:?}",
        outcome.diagnostics
    );
}

#[test]
fn local_context_requires_declaration() {
    let outcome = check_src("p := proc(x::integer)::integer;\n  y := x;\n  return x;\nend proc;");
    assert_eq!(count_diags(&outcome, Severity::Error, "not-assignable"), 1);
}

#[test]
fn top_level_loop_bodies_may_assign_known_globals() {
    let outcome = check_src("s := 0;\nwhile (s < 3) do\n  s := s + 1;\nend do;");
    assert_no_errors("loop", &outcome);
    // But cannot introduce new variables.
    let outcome = check_src("s := 0;\nwhile (s < 3) do\n  t := 1;\nend do;");
    assert_eq!(count_diags(&outcome, Severity::Error, "not-assignable"), 1);
}

#[test]
fn unreachable_code_warns() {
    let outcome = check_src(
        "p := proc(x::integer)::integer;\n  return x;\n  si := 1;\nend proc;",
    );
    assert_eq!(count_diags(&outcome, Severity::Warning, "unreachable-code"), 1);
}

#[test]
fn duplicate_declarations_warn() {
    let outcome = check_src(
        "p := proc(x::integer)::integer;\n  global g;\n  local g::integer;\n  return x + g;\nend proc;",
    );
    assert_eq!(count_diags(&outcome, Severity::Warning, "duplicate-decl"), 1);
}

#[test]
fn exceptions_propagate_to_call_sites() {
    let outcome = check_src(
        "boom := proc(x::integer)::void;\n  if (x = 0) then\n    error \"division by zero\";\n  end if;\nend proc;\nboom(0);",
    );
    assert_no_errors("exceptions", &outcome);
    assert!(outcome.top_info.exceptions.contains("division by zero"));
    assert_eq!(outcome.top_info.ret_flag, RetFlag::NotAret);
}

#[test]
fn error_command_sets_aret() {
    let outcome = check_src("error \"boom\";");
    assert_eq!(outcome.top_info.ret_flag, RetFlag::Aret);
    assert!(outcome.top_info.exceptions.contains("boom"));
}

#[test]
fn arithmetic_rules() {
    // Integer division yields a rational; mixed arithmetic joins.
    let outcome = check_src("a := 1 / 2;\nb := 1 + 2;\nc := 1 + 2.5;\nd := 2.5 * 2.5;");
    assert_no_errors("arith", &outcome);
    assert_eq!(outcome.final_env.get("a"), Some(&TypeTerm::Rational));
    assert_eq!(outcome.final_env.get("b"), Some(&t_int()));
    assert_eq!(outcome.final_env.get("c"), Some(&t_or_if()));
    assert_eq!(outcome.final_env.get("d"), Some(&t_float()));
    let outcome = check_src("a := 1 + \"s\";");
    assert!(outcome.diagnostics.iter().any(|d| d.code == "arith-type"));
}

#[test]
fn indexing_rules() {
    let outcome = check_src(
        "p := proc(l::list(Or(integer,float)))::integer;\n  local x::Or(integer,float);\n  x := l[1];\n  return 0;\nend proc;",
    );
    assert_no_errors("indexing", &outcome);
    // Literal indexing of a bracketed sequence picks the component.
    let outcome = check_src("r := [1, 2.5];\na := r[1];\nb := r[2];");
    assert_no_errors("indexing", &outcome);
    assert_eq!(outcome.final_env.get("a"), Some(&t_int()));
    assert_eq!(outcome.final_env.get("b"), Some(&t_float()));
    let outcome = check_src("r := [1, 2.5];\na := r[3];");
    assert!(outcome.diagnostics.iter().any(|d| d.code == "index-base"));
    let outcome = check_src("a := 5;\nb := a[1];");
    assert!(outcome.diagnostics.iter().any(|d| d.code == "index-base"));
}

#[test]
fn call_checking() {
    let outcome = check_src(
        "f := proc(x::integer)::integer;\n  return x;\nend proc;\ny := f(1);\nz := f(1.5);\nw := f(1,2);",
    );
    assert_eq!(count_diags(&outcome, Severity::Error, "arg-type"), 1);
    assert_eq!(count_diags(&outcome, Severity::Error, "arity"), 1);
    assert_eq!(outcome.final_env.get("y"), Some(&t_int()));
    let outcome = check_src("x := 1;\ny := x(2);");
    assert!(outcome.diagnostics.iter().any(|d| d.code == "call-non-procedure"));
    let outcome = check_src("y := mystery(2);");
    assert!(outcome.diagnostics.iter().any(|d| d.code == "unknown-function"));
}

#[test]
fn checking_is_deterministic() {
    let program = parse_corpus("listing2.mm");
    let a = check_program(&program);
    let b = check_program(&program);
    assert_eq!(a.diagnostics, b.diagnostics);
    assert_eq!(a.final_env, b.final_env);
    assert_eq!(a.annotations.len(), b.annotations.len());
    for (id, ann) in a.annotations.iter() {
        assert_eq!(Some(ann), b.annotations.get(id));
    }
}
