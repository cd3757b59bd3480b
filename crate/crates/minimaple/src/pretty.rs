//! Canonical source rendering of ASTs.
//!
//! The round-trip law is `parse(pretty(parse(src)))` structurally equal
//! to `parse(src)` modulo positions; parentheses are re-derived from
//! precedence rather than preserved.

use crate::ast::*;

pub fn pretty_program(program: &Program) -> String {
    let mut out = String::new();
    if !program.declarations.is_empty() {
        out.push_str("(*@\n");
        for d in &program.declarations {
            out.push_str("  ");
            out.push_str(&pretty_declaration(d));
            out.push('\n');
        }
        out.push_str("@*)\n");
    }
    for c in &program.commands {
        write_command(&mut out, c, 0);
    }
    out
}

pub fn pretty_command(cmd: &Command) -> String {
    let mut out = String::new();
    write_command(&mut out, cmd, 0);
    out
}

pub fn pretty_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, 0, 0);
    out
}

pub fn pretty_type(ty: &TypeExprAst) -> String {
    match &ty.kind {
        TypeExprKind::Integer => "integer".into(),
        TypeExprKind::Boolean => "boolean".into(),
        TypeExprKind::String => "string".into(),
        TypeExprKind::Float => "float".into(),
        TypeExprKind::Rational => "rational".into(),
        TypeExprKind::Anything => "anything".into(),
        TypeExprKind::Symbol => "symbol".into(),
        TypeExprKind::Void => "void".into(),
        TypeExprKind::Uneval => "uneval".into(),
        TypeExprKind::Set(t) => format!("{{{}}}", pretty_type(t)),
        TypeExprKind::List(t) => format!("list({})", pretty_type(t)),
        TypeExprKind::Record(ts) => {
            format!("[{}]", ts.iter().map(pretty_type).collect::<Vec<_>>().join(","))
        }
        TypeExprKind::Procedure { ret, args } => format!(
            "procedure[{}]({})",
            pretty_type(ret),
            args.iter().map(pretty_type).collect::<Vec<_>>().join(",")
        ),
        TypeExprKind::Or(ts) => {
            format!("Or({})", ts.iter().map(pretty_type).collect::<Vec<_>>().join(","))
        }
        TypeExprKind::Tagged { name, args } => {
            format!("{name}({})", args.iter().map(pretty_type).collect::<Vec<_>>().join(","))
        }
        TypeExprKind::Named(name) => name.clone(),
    }
}

fn pretty_declaration(d: &SpecDecl) -> String {
    match &d.kind {
        SpecDeclKind::Define { name, rules } => {
            let mut s = format!("define({name}");
            for r in rules {
                s.push_str(", ");
                s.push_str(name);
                s.push('(');
                let params: Vec<String> = r
                    .params
                    .iter()
                    .map(|p| match p {
                        DefinePattern::Literal(e) => pretty_expr(e),
                        DefinePattern::Typed { name, ty } => format!("{name}::{}", pretty_type(ty)),
                    })
                    .collect();
                s.push_str(&params.join(", "));
                s.push_str(") = ");
                s.push_str(&pretty_expr(&r.body));
            }
            s.push_str(");");
            s
        }
        SpecDeclKind::NamedType { name, ty } => format!("`type/{name}` := {};", pretty_type(ty)),
        SpecDeclKind::AbstractType { name } => format!("`type/{name}`;"),
        SpecDeclKind::Assume { expr } => format!("assume({});", pretty_expr(expr)),
        SpecDeclKind::Predicate { name, params } => format!("{name}({});", params.join(", ")),
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_command(out: &mut String, cmd: &Command, level: usize) {
    indent(out, level);
    match &cmd.kind {
        CommandKind::Assign { targets, sources } => {
            out.push_str(&targets.join(", "));
            out.push_str(" := ");
            let rendered: Vec<String> = sources
                .iter()
                .map(|e| {
                    let mut s = String::new();
                    write_expr(&mut s, e, 0, level);
                    s
                })
                .collect();
            out.push_str(&rendered.join(", "));
            out.push_str(";\n");
        }
        CommandKind::If { branches, else_body } => {
            for (i, branch) in branches.iter().enumerate() {
                if i == 0 {
                    out.push_str("if ");
                } else {
                    indent(out, level);
                    out.push_str("elif ");
                }
                write_expr(out, &branch.cond, 0, level);
                out.push_str(" then\n");
                for c in &branch.body {
                    write_command(out, c, level + 1);
                }
            }
            if let Some(body) = else_body {
                indent(out, level);
                out.push_str("else\n");
                for c in body {
                    write_command(out, c, level + 1);
                }
            }
            indent(out, level);
            out.push_str("end if;\n");
        }
        CommandKind::Loop(lp) => {
            if let Some(var) = &lp.var {
                out.push_str("for ");
                out.push_str(var);
                if let Some(e) = &lp.from {
                    out.push_str(" from ");
                    write_expr(out, e, 0, level);
                }
                if let Some(e) = &lp.by {
                    out.push_str(" by ");
                    write_expr(out, e, 0, level);
                }
                if let Some(e) = &lp.to {
                    out.push_str(" to ");
                    write_expr(out, e, 0, level);
                }
                if let Some(e) = &lp.while_cond {
                    out.push_str(" while ");
                    write_expr(out, e, 0, level);
                }
            } else if let Some(e) = &lp.while_cond {
                out.push_str("while ");
                write_expr(out, e, 0, level);
            }
            out.push_str(" do\n");
            if let Some(spec) = &lp.spec {
                indent(out, level + 1);
                out.push_str(&format!(
                    "(*@ invariant {}; decreases {}; @*)\n",
                    pretty_expr(&spec.invariant),
                    pretty_expr(&spec.decreases)
                ));
            }
            for c in &lp.body {
                write_command(out, c, level + 1);
            }
            indent(out, level);
            out.push_str("end do;\n");
        }
        CommandKind::Return { value } => {
            out.push_str("return");
            if let Some(v) = value {
                out.push(' ');
                write_expr(out, v, 0, level);
            }
            out.push_str(";\n");
        }
        CommandKind::ErrorCmd { message } => {
            out.push_str(&format!("error \"{}\";\n", escape_str(message)));
        }
        CommandKind::ExprCmd { call } => {
            write_expr(out, call, 0, level);
            out.push_str(";\n");
        }
        CommandKind::Assert(a) => {
            out.push_str("ASSERT(");
            write_expr(out, &a.condition, 0, level);
            if let Some(label) = &a.label {
                out.push_str(&format!(", \"{}\"", escape_str(label)));
            }
            out.push_str(");\n");
        }
    }
}

fn escape_str(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

/// Binding strength; parentheses are emitted whenever a child binds
/// looser than its context requires.
fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Equivalent { .. } => 0,
        ExprKind::Implies { .. } => 1,
        ExprKind::Binary { op, .. } => match op {
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
        },
        ExprKind::Unary { op, .. } => match op {
            UnOp::Not => 4,
            UnOp::Neg => 8,
        },
        _ => 10,
    }
}

fn write_child(out: &mut String, e: &Expr, min: u8, level: usize) {
    if precedence(e) < min {
        out.push('(');
        write_expr(out, e, 0, level);
        out.push(')');
    } else {
        write_expr(out, e, min, level);
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8, level: usize) {
    if precedence(e) < min {
        out.push('(');
        write_expr(out, e, 0, level);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Int(n) => out.push_str(&n.to_string()),
        ExprKind::Float(x) => out.push_str(&format_float(*x)),
        ExprKind::Str(s) => out.push_str(&format!("\"{}\"", escape_str(s))),
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::ListLit(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, item, 0, level);
            }
            out.push(']');
        }
        ExprKind::SetLit(items) => {
            out.push('{');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, item, 0, level);
            }
            out.push('}');
        }
        ExprKind::Index { base, index } => {
            write_child(out, base, 10, level);
            out.push('[');
            write_expr(out, index, 0, level);
            out.push(']');
        }
        ExprKind::Call { callee, args, .. } => {
            out.push_str(callee);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, arg, 0, level);
            }
            out.push(')');
        }
        ExprKind::TypeTest { expr, ty } => {
            out.push_str("type(");
            write_expr(out, expr, 0, level);
            out.push(',');
            out.push_str(&pretty_type(ty));
            out.push(')');
        }
        ExprKind::Unary { op, operand } => match op {
            UnOp::Neg => {
                out.push('-');
                write_child(out, operand, 8, level);
            }
            UnOp::Not => {
                out.push_str("not ");
                write_child(out, operand, 4, level);
            }
        },
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = precedence(e);
            // Comparisons do not chain; everything else is left-associative.
            let (lmin, rmin) = if op.is_comparison() { (prec + 1, prec + 1) } else { (prec, prec + 1) };
            write_child(out, lhs, lmin, level);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_child(out, rhs, rmin, level);
        }
        ExprKind::Quote(inner) => {
            out.push('\'');
            write_expr(out, inner, 0, level);
            out.push('\'');
        }
        ExprKind::Proc(def) => write_proc(out, def, level),
        ExprKind::Implies { lhs, rhs } => {
            write_child(out, lhs, 2, level);
            out.push_str(" implies ");
            write_child(out, rhs, 1, level);
        }
        ExprKind::Equivalent { lhs, rhs } => {
            write_child(out, lhs, 0, level);
            out.push_str(" equivalent ");
            write_child(out, rhs, 1, level);
        }
        ExprKind::Forall(q) | ExprKind::Exists(q) => {
            let kw = if matches!(e.kind, ExprKind::Forall(_)) { "forall" } else { "exists" };
            out.push_str(kw);
            out.push('(');
            out.push_str(&q.var);
            out.push_str("::");
            out.push_str(&pretty_type(&q.ty));
            out.push_str(", ");
            write_expr(out, &q.body, 0, level);
            out.push(')');
        }
        ExprKind::NumQuant(nq) => {
            out.push_str(nq.kind.keyword());
            out.push('(');
            write_expr(out, &nq.term, 0, level);
            out.push_str(", ");
            match &nq.range {
                QuantRange::In { var, seq } => {
                    out.push_str(var);
                    out.push_str(" in ");
                    write_expr(out, seq, 0, level);
                }
                QuantRange::Interval { var, lo, hi } => {
                    out.push_str(var);
                    out.push_str(" = ");
                    write_child(out, lo, 6, level);
                    out.push_str("..");
                    write_child(out, hi, 6, level);
                }
            }
            if let Some(f) = &nq.filter {
                out.push_str(", ");
                write_expr(out, f, 0, level);
            }
            out.push(')');
        }
        ExprKind::ResultRef => out.push_str("RESULT"),
        ExprKind::OldRef(name) => {
            out.push_str("OLD ");
            out.push_str(name);
        }
    }
}

fn write_proc(out: &mut String, def: &ProcDef, level: usize) {
    if let Some(spec) = &def.spec {
        out.push('\n');
        indent(out, level);
        out.push_str("(*@\n");
        indent(out, level + 1);
        out.push_str(&format!("requires {};\n", pretty_expr(&spec.requires)));
        if !spec.globals.is_empty() {
            indent(out, level + 1);
            let names: Vec<&str> = spec.globals.iter().map(|(n, _)| n.as_str()).collect();
            out.push_str(&format!("global {};\n", names.join(", ")));
        }
        indent(out, level + 1);
        out.push_str(&format!("ensures {};\n", pretty_expr(&spec.ensures)));
        if let Some(exc) = &spec.exceptional {
            indent(out, level + 1);
            out.push_str(&format!("exception {};\n", pretty_expr(exc)));
        }
        indent(out, level);
        out.push_str("@*)\n");
        indent(out, level);
    }
    out.push_str("proc(");
    for (i, p) in def.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!("{}::{}", p.name, pretty_type(&p.ty)));
    }
    out.push_str(&format!(")::{};\n", pretty_type(&def.return_ty)));
    if !def.globals.is_empty() {
        indent(out, level + 1);
        let names: Vec<&str> = def.globals.iter().map(|(n, _)| n.as_str()).collect();
        out.push_str(&format!("global {};\n", names.join(", ")));
    }
    if !def.locals.is_empty() {
        indent(out, level + 1);
        out.push_str("local ");
        for (i, l) in def.locals.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&l.name);
            if let Some(ty) = &l.ty {
                out.push_str(&format!("::{}", pretty_type(ty)));
            }
            if let Some(init) = &l.init {
                out.push_str(" := ");
                out.push_str(&pretty_expr(init));
            }
        }
        out.push_str(";\n");
    }
    for c in &def.body {
        write_command(out, c, level + 1);
    }
    indent(out, level);
    out.push_str("end proc");
}

/// Floats always render with a decimal point so they re-lex as floats,
/// using the shortest digits that round-trip.
pub fn format_float(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_source;
    use crate::span::SourceFile;

    fn roundtrip(src: &str) {
        let first = parse_source(&SourceFile::new("a.mm", src));
        assert!(first.diagnostics.is_empty(), "{:?}", first.diagnostics);
        let printed = pretty_program(&first.program);
        let second = parse_source(&SourceFile::new("b.mm", &printed));
        assert!(second.diagnostics.is_empty(), "re-parse failed:\n{printed}\n{:?}", second.diagnostics);
        let mut a = first.program;
        let mut b = second.program;
        erase_positions(&mut a);
        erase_positions(&mut b);
        assert_eq!(a, b, "round trip changed the AST:\n{printed}");
    }

    #[test]
    fn trivial_assignment() {
        let p = parse_source(&SourceFile::new("a.mm", "status := 0;")).program;
        assert_eq!(pretty_command(&p.commands[0]), "status := 0;\n");
    }

    #[test]
    fn record_type_rendering() {
        let ty = crate::parser::parse_type_expr(
            crate::lexer::tokenize("[integer,float]").unwrap(),
        )
        .unwrap();
        assert_eq!(pretty_type(&ty), "[integer,float]");
    }

    #[test]
    fn parenthesization() {
        roundtrip("x := (1 + 2) * 3;");
        roundtrip("x := 1 + 2 * 3;");
        roundtrip("x := -(1 + 2);");
        roundtrip("x := 1 - (2 - 3);");
        roundtrip("b := not (x = 0) and true;");
    }

    #[test]
    fn float_rendering_keeps_the_dot() {
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(8.54), "8.54");
        assert_eq!(format_float(12849.76224), "12849.76224");
    }

    #[test]
    fn listing_roundtrip() {
        roundtrip(
            r#"
status:=0;
prod := proc(l::list(Or(integer,float)))::[integer,float];
  global status;
  local i, x::Or(integer,float), si::integer:=1, sf::float:=1.0;
  for i from 1 by 1 to nops(l) do
    x:=l[i]; status:=i;
    if type(x,integer) then
      if (x = 0) then return [si,sf]; end if;
      si:=si*x;
    elif type(x,float) then
      if (x < 0.5) then return [si,sf]; end if;
      sf:=sf*x;
    end if;
  end do;
  status:=-1;
  return [si,sf];
end proc;
result := prod([1, 8.54, 34.4, 6, 8.1, 10, 12, 5.4]);
"#,
        );
    }

    #[test]
    fn spec_roundtrip() {
        roundtrip(
            "(*@ `type/ListInt`:=list(integer); define(fac, fac(0) = 1, fac(n::integer) = n * fac(n - 1)); @*)\nwhile (i <= n) do\n(*@ invariant s = OLD s + i - 1; decreases n-i; @*)\ns := s + i;\nend do;",
        );
    }
}
