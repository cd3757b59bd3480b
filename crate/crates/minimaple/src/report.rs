//! Output formats: the annotation-block dump of the checker, the
//! diagnostic lines, the run trace and the JSON forms.

use serde_json::{json, Value as Json};

use crate::ast::{Command, CommandKind, Expr, ExprKind, Program, QuantRange};
use crate::check::{CheckOutcome, CommandInfo};
use crate::diag::Diagnostic;
use crate::env::TypeEnvironment;
use crate::interp::{RunError, RunResult, TraceEvent};
use crate::span::Span;
use crate::types::TypeTerm;

pub const BLOCK_START: &str = "**********COMMAND-SEQUENCE-ANNOTATION START**********";
pub const BLOCK_END: &str = "**********COMMAND-SEQUENCE-ANNOTATION END************";
pub const VERDICT_OK: &str = "The program type-checked correctly.";
pub const VERDICT_FAIL: &str = "The program did not type-check correctly.";

/// Render one command-sequence annotation block.
///
/// The PI section lists procedure bindings first and the remaining
/// bindings after, each group in insertion order.
pub fn render_annotation_block(env: &TypeEnvironment, info: &CommandInfo) -> String {
    let mut out = String::new();
    out.push_str(BLOCK_START);
    out.push_str("\nPI -> [\n");
    let is_proc = |t: &TypeTerm| matches!(t, TypeTerm::Procedure { .. });
    for (name, ty) in env.iter().filter(|(_, t)| is_proc(t)) {
        out.push_str(&format!("{name}:{}\n", ty.render()));
    }
    for (name, ty) in env.iter().filter(|(_, t)| !is_proc(t)) {
        out.push_str(&format!("{name}:{}\n", ty.render()));
    }
    out.push_str("]\n");
    let ret_types: Vec<String> = info.ret_types.iter().map(TypeTerm::render).collect();
    out.push_str(&format!("RetTypeSet -> {{{}}}\n", ret_types.join(",")));
    let exceptions: Vec<&str> = info.exceptions.iter().map(String::as_str).collect();
    out.push_str(&format!("ThrownExceptionSet -> {{{}}}\n", exceptions.join(",")));
    out.push_str(&format!("RetFlag -> {}\n", info.ret_flag.as_str()));
    out.push_str(BLOCK_END);
    out.push('\n');
    out
}

/// The full `check` report for one file.
pub fn render_check_text(
    path: &str,
    parse_diags: &[Diagnostic],
    outcome: Option<&CheckOutcome>,
    verbose: bool,
) -> String {
    let mut out = String::new();
    let Some(outcome) = outcome else {
        for d in parse_diags {
            out.push_str(&d.render(path));
            out.push('\n');
        }
        out.push_str(&format!("{path} failed to parse.\n"));
        return out;
    };
    out.push_str(&format!("{path} parsed with no errors.\n"));
    for d in parse_diags.iter().chain(&outcome.diagnostics) {
        out.push_str(&d.render(path));
        out.push('\n');
    }
    out.push_str("Generating Annotated AST...\n");
    if verbose {
        for summary in &outcome.proc_summaries {
            if let Some(name) = &summary.name {
                out.push_str(&format!("procedure {name}:\n"));
            }
            out.push_str(&render_annotation_block(&summary.info.env_after, &summary.info));
        }
    }
    out.push_str(&render_annotation_block(&outcome.final_env, &outcome.top_info));
    out.push_str("Annotated AST generated.\n");
    if outcome.is_ok() {
        out.push_str(VERDICT_OK);
    } else {
        out.push_str(VERDICT_FAIL);
    }
    out.push('\n');
    out
}

fn span_json(span: Span) -> Json {
    json!({ "line": span.line, "column": span.col, "length": span.len })
}

fn diag_json(d: &Diagnostic) -> Json {
    json!({
        "severity": d.severity.to_string(),
        "code": d.code,
        "message": d.message,
        "span": span_json(d.span),
    })
}

fn env_json(env: &TypeEnvironment) -> Json {
    Json::Array(
        env.iter().map(|(name, ty)| json!({ "name": name, "type": ty.render() })).collect(),
    )
}

/// The `check --format json` report: one JSON object per file.
pub fn render_check_json(
    path: &str,
    parse_diags: &[Diagnostic],
    outcome: Option<&CheckOutcome>,
) -> String {
    let mut diags: Vec<Json> = parse_diags.iter().map(diag_json).collect();
    let (verdict, env) = match outcome {
        Some(outcome) => {
            diags.extend(outcome.diagnostics.iter().map(diag_json));
            (outcome.is_ok(), env_json(&outcome.final_env))
        }
        None => (false, Json::Array(vec![])),
    };
    let parsed = outcome.is_some();
    json!({
        "schema": 1,
        "file": path,
        "parsed": parsed,
        "verdict": verdict,
        "diagnostics": diags,
        "env": env,
    })
    .to_string()
}

/// JSON-lines AST dump: one `{kind, span, children}` object per
/// top-level command.
pub fn render_ast_json(program: &Program) -> String {
    let mut out = String::new();
    for cmd in &program.commands {
        out.push_str(&command_json(cmd).to_string());
        out.push('\n');
    }
    out
}

fn command_json(cmd: &Command) -> Json {
    let (kind, children) = match &cmd.kind {
        CommandKind::Assign { targets, sources } => (
            format!("assign({})", targets.join(",")),
            sources.iter().map(expr_json).collect::<Vec<_>>(),
        ),
        CommandKind::If { branches, else_body } => {
            let mut children = Vec::new();
            for b in branches {
                children.push(expr_json(&b.cond));
                children.extend(b.body.iter().map(command_json));
            }
            if let Some(body) = else_body {
                children.extend(body.iter().map(command_json));
            }
            ("if".to_string(), children)
        }
        CommandKind::Loop(lp) => {
            let mut children = Vec::new();
            for e in [&lp.from, &lp.by, &lp.to, &lp.while_cond].into_iter().flatten() {
                children.push(expr_json(e));
            }
            children.extend(lp.body.iter().map(command_json));
            let kind = match &lp.var {
                Some(v) => format!("for({v})"),
                None => "while".to_string(),
            };
            (kind, children)
        }
        CommandKind::Return { value } => {
            ("return".to_string(), value.iter().map(expr_json).collect())
        }
        CommandKind::ErrorCmd { message } => (format!("error({message:?})"), vec![]),
        CommandKind::ExprCmd { call } => ("call".to_string(), vec![expr_json(call)]),
        CommandKind::Assert(a) => ("assert".to_string(), vec![expr_json(&a.condition)]),
    };
    json!({ "kind": kind, "span": span_json(cmd.span), "children": children })
}

fn expr_json(e: &Expr) -> Json {
    let (kind, children): (String, Vec<Json>) = match &e.kind {
        ExprKind::Int(n) => (format!("int({n})"), vec![]),
        ExprKind::Float(x) => (format!("float({x})"), vec![]),
        ExprKind::Str(s) => (format!("string({s:?})"), vec![]),
        ExprKind::Bool(b) => (format!("bool({b})"), vec![]),
        ExprKind::Name(n) => (format!("name({n})"), vec![]),
        ExprKind::ListLit(items) => ("list".into(), items.iter().map(expr_json).collect()),
        ExprKind::SetLit(items) => ("set".into(), items.iter().map(expr_json).collect()),
        ExprKind::Index { base, index } => {
            ("index".into(), vec![expr_json(base), expr_json(index)])
        }
        ExprKind::Call { callee, args, .. } => {
            (format!("call({callee})"), args.iter().map(expr_json).collect())
        }
        ExprKind::TypeTest { expr, ty } => {
            (format!("typetest({})", crate::pretty::pretty_type(ty)), vec![expr_json(expr)])
        }
        ExprKind::Unary { op, operand } => (
            format!("unary({})", match op {
                crate::ast::UnOp::Neg => "-",
                crate::ast::UnOp::Not => "not",
            }),
            vec![expr_json(operand)],
        ),
        ExprKind::Binary { op, lhs, rhs } => {
            (format!("binary({})", op.symbol()), vec![expr_json(lhs), expr_json(rhs)])
        }
        ExprKind::Quote(inner) => ("uneval".into(), vec![expr_json(inner)]),
        ExprKind::Proc(def) => {
            ("proc".into(), def.body.iter().map(command_json).collect())
        }
        ExprKind::Implies { lhs, rhs } => {
            ("implies".into(), vec![expr_json(lhs), expr_json(rhs)])
        }
        ExprKind::Equivalent { lhs, rhs } => {
            ("equivalent".into(), vec![expr_json(lhs), expr_json(rhs)])
        }
        ExprKind::Forall(q) => (format!("forall({})", q.var), vec![expr_json(&q.body)]),
        ExprKind::Exists(q) => (format!("exists({})", q.var), vec![expr_json(&q.body)]),
        ExprKind::NumQuant(nq) => {
            let mut children = vec![expr_json(&nq.term)];
            match &nq.range {
                QuantRange::In { seq, .. } => children.push(expr_json(seq)),
                QuantRange::Interval { lo, hi, .. } => {
                    children.push(expr_json(lo));
                    children.push(expr_json(hi));
                }
            }
            if let Some(f) = &nq.filter {
                children.push(expr_json(f));
            }
            (format!("{}({})", nq.kind.keyword(), nq.range.var()), children)
        }
        ExprKind::ResultRef => ("RESULT".into(), vec![]),
        ExprKind::OldRef(n) => (format!("OLD({n})"), vec![]),
    };
    json!({ "kind": kind, "span": span_json(e.span), "children": children })
}

/// The final type environment as JSON.
pub fn render_env_dump_json(path: &str, outcome: &CheckOutcome) -> String {
    json!({
        "schema": 1,
        "file": path,
        "env": env_json(&outcome.final_env),
    })
    .to_string()
}

fn event_line(event: &TraceEvent) -> String {
    use crate::interp::EventKind;
    match event.kind {
        EventKind::Assign => event.detail.clone(),
        other => format!("{}: {}", other.as_str(), event.detail),
    }
}

/// Human-readable run trace.
pub fn render_run_text(result: &RunResult) -> String {
    let mut out = String::new();
    for event in &result.events {
        out.push_str(&event_line(event));
        out.push('\n');
    }
    out
}

/// JSON-lines run trace, one event per line plus a final status line.
pub fn render_run_json(result: &RunResult) -> String {
    let mut out = String::new();
    for event in &result.events {
        let line = json!({
            "schema": 1,
            "event": event.kind.as_str(),
            "span": span_json(event.span),
            "detail": event.detail,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    let status = match &result.outcome {
        Ok(()) => json!({ "schema": 1, "result": "ok" }),
        Err(e) => json!({
            "schema": 1,
            "result": "error",
            "message": e.message,
            "label": e.label,
            "span": span_json(e.span),
        }),
    };
    out.push_str(&status.to_string());
    out.push('\n');
    out
}

pub fn render_run_error(path: &str, error: &RunError) -> String {
    match &error.label {
        Some(label) => format!(
            "{path}:{}:{}: runtime error: {} ({label})\n",
            error.span.line, error.span.col, error.message
        ),
        None => format!(
            "{path}:{}:{}: runtime error: {}\n",
            error.span.line, error.span.col, error.message
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_program;
    use crate::parser::parse_source;
    use crate::span::SourceFile;

    #[test]
    fn annotation_block_shape() {
        let src = "status:=0;\nprod := proc(l::list(Or(integer,float)))::[integer,float];\n  return [1,1.0];\nend proc;\nresult := prod([1]);";
        let parsed = parse_source(&SourceFile::new("t.mm", src));
        let outcome = check_program(&parsed.program);
        assert!(outcome.is_ok(), "{:?}", outcome.diagnostics);
        let block = render_annotation_block(&outcome.final_env, &outcome.top_info);
        let lines: Vec<&str> = block.lines().collect();
        assert_eq!(lines[0], BLOCK_START);
        assert_eq!(lines[1], "PI -> [");
        // Procedure bindings print first.
        assert_eq!(lines[2], "prod:procedure[[integer,float]](list(Or(integer,float)))");
        assert_eq!(lines[3], "status:integer");
        assert_eq!(lines[4], "result:[integer,float]");
        assert_eq!(lines[5], "]");
        assert_eq!(lines[6], "RetTypeSet -> {}");
        assert_eq!(lines[7], "ThrownExceptionSet -> {}");
        assert_eq!(lines[8], "RetFlag -> not_aret");
        assert_eq!(lines[9], BLOCK_END);
    }
}
