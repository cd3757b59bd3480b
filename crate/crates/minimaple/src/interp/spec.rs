//! Runtime evaluation of specification expressions.
//!
//! Evaluation is pure: it reads the interpreter state but never
//! changes it. Quantifiers enumerate finite ranges; logical
//! quantifiers over integer binders recover their range syntactically
//! from bounds in the body's antecedent. Defined functions apply their
//! first matching rule.

use indexmap::IndexMap;

use num::{BigInt, One, Zero};

use crate::ast::*;
use crate::span::Span;

use super::value::{
    arith, compare_numeric, make_set, negate, value_member, values_equal, Value,
};
use super::{Interp, RunError};

const DEFINE_RECURSION_LIMIT: u32 = 10_000;

/// Evaluation context: the OLD snapshot, the RESULT value, and the
/// quantifier bindings in scope.
#[derive(Clone, Default)]
pub(crate) struct SpecEnv<'a> {
    old: Option<&'a IndexMap<Ident, Value>>,
    result: Option<&'a Value>,
    binders: IndexMap<Ident, Value>,
    depth: u32,
}

impl<'a> SpecEnv<'a> {
    fn with_binder(&self, name: &str, value: Value) -> SpecEnv<'a> {
        let mut next = self.clone();
        next.binders.insert(name.to_string(), value);
        next
    }
}

impl Interp {
    /// Evaluate a specification expression over the current state.
    /// `old` supplies the pre-state for OLD references and `result`
    /// the value RESULT stands for.
    pub fn eval_spec_expr(
        &self,
        e: &Expr,
        old: Option<&IndexMap<Ident, Value>>,
        result: Option<&Value>,
    ) -> Result<Value, RunError> {
        let env = SpecEnv { old, result, binders: IndexMap::new(), depth: 0 };
        self.spec_eval(e, &env)
    }

    /// As [`eval_spec_expr`], with extra name bindings layered over the
    /// state (used to re-evaluate contracts against reconstructed
    /// frames).
    pub fn eval_spec_expr_with(
        &self,
        e: &Expr,
        old: Option<&IndexMap<Ident, Value>>,
        result: Option<&Value>,
        bindings: &IndexMap<Ident, Value>,
    ) -> Result<Value, RunError> {
        let env = SpecEnv { old, result, binders: bindings.clone(), depth: 0 };
        self.spec_eval(e, &env)
    }

    fn spec_eval(&self, e: &Expr, env: &SpecEnv<'_>) -> Result<Value, RunError> {
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Int(n.clone())),
            ExprKind::Float(x) => Ok(Value::Float(*x)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Name(name) => match env.binders.get(name) {
                Some(v) => Ok(v.clone()),
                None => Ok(self.lookup(name)),
            },
            ExprKind::OldRef(name) => match env.old {
                Some(old) => Ok(old
                    .get(name)
                    .cloned()
                    .unwrap_or_else(|| Value::Symbol(name.clone()))),
                None => Err(RunError::new("OLD is not available here", e.span)),
            },
            ExprKind::ResultRef => match env.result {
                Some(v) => Ok(v.clone()),
                None => Err(RunError::new("RESULT is not available here", e.span)),
            },
            ExprKind::ListLit(items) => {
                let values: Result<Vec<Value>, RunError> =
                    items.iter().map(|it| self.spec_eval(it, env)).collect();
                Ok(Value::List(values?))
            }
            ExprKind::SetLit(items) => {
                let values: Result<Vec<Value>, RunError> =
                    items.iter().map(|it| self.spec_eval(it, env)).collect();
                Ok(make_set(values?))
            }
            ExprKind::Index { base, index } => {
                let base_v = self.spec_eval(base, env)?;
                let index_v = self.spec_eval(index, env)?;
                super::index_value(&base_v, &index_v, e.span)
            }
            ExprKind::TypeTest { expr, ty } => {
                let v = self.spec_eval(expr, env)?;
                let term = self
                    .named_types()
                    .resolve(ty)
                    .map_err(|d| RunError::new(d.message, d.span))?;
                Ok(Value::Bool(value_member(&v, &term)))
            }
            ExprKind::Unary { op: UnOp::Neg, operand } => {
                let v = self.spec_eval(operand, env)?;
                negate(&v).map_err(|m| RunError::new(m, e.span))
            }
            ExprKind::Unary { op: UnOp::Not, operand } => {
                match self.spec_eval(operand, env)? {
                    Value::Bool(b) => Ok(Value::Bool(!b)),
                    other => Err(RunError::new(
                        format!("`not` applied to a {}", other.kind_name()),
                        e.span,
                    )),
                }
            }
            ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                match self.spec_eval(lhs, env)? {
                    Value::Bool(false) => Ok(Value::Bool(false)),
                    Value::Bool(true) => self.expect_bool(rhs, env, "`and`"),
                    other => Err(RunError::new(
                        format!("`and` applied to a {}", other.kind_name()),
                        lhs.span,
                    )),
                }
            }
            ExprKind::Binary { op: BinOp::Or, lhs, rhs } => {
                match self.spec_eval(lhs, env)? {
                    Value::Bool(true) => Ok(Value::Bool(true)),
                    Value::Bool(false) => self.expect_bool(rhs, env, "`or`"),
                    other => Err(RunError::new(
                        format!("`or` applied to a {}", other.kind_name()),
                        lhs.span,
                    )),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let a = self.spec_eval(lhs, env)?;
                let b = self.spec_eval(rhs, env)?;
                super::binary_value(*op, &a, &b, e.span)
            }
            ExprKind::Implies { lhs, rhs } => {
                match self.spec_eval(lhs, env)? {
                    Value::Bool(false) => Ok(Value::Bool(true)),
                    Value::Bool(true) => self.expect_bool(rhs, env, "`implies`"),
                    other => Err(RunError::new(
                        format!("`implies` applied to a {}", other.kind_name()),
                        lhs.span,
                    )),
                }
            }
            ExprKind::Equivalent { lhs, rhs } => {
                let a = self.spec_eval(lhs, env)?;
                let b = self.spec_eval(rhs, env)?;
                match (a, b) {
                    (Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool(x == y)),
                    _ => Err(RunError::new("`equivalent` applied to non-booleans", e.span)),
                }
            }
            ExprKind::Quote(inner) => {
                Ok(Value::Uneval(std::rc::Rc::new((**inner).clone())))
            }
            ExprKind::Call { callee, args, .. } => {
                let arg_vals: Result<Vec<Value>, RunError> =
                    args.iter().map(|a| self.spec_eval(a, env)).collect();
                let arg_vals = arg_vals?;
                if callee == "nops" {
                    if let [Value::List(items) | Value::Set(items)] = &arg_vals[..] {
                        return Ok(Value::int(items.len() as i64));
                    }
                    return Err(RunError::new("nops expects a list or set", e.span));
                }
                if self.define_table().contains_key(callee) {
                    return self.apply_define(callee, &arg_vals, e.span, env.depth);
                }
                if self.is_non_executable(callee) {
                    return Err(RunError::new(
                        format!("abstract predicate `{callee}` is not executable"),
                        e.span,
                    ));
                }
                if matches!(self.read_name(callee), Some(Value::Proc(_))) {
                    return Err(RunError::new(
                        format!(
                            "procedure `{callee}` cannot be called from a specification"
                        ),
                        e.span,
                    ));
                }
                Err(RunError::new(
                    format!("`{callee}` is not evaluable in a specification"),
                    e.span,
                ))
            }
            ExprKind::Forall(q) => self.eval_logical_quant(q, env, true, e.span),
            ExprKind::Exists(q) => self.eval_logical_quant(q, env, false, e.span),
            ExprKind::NumQuant(nq) => self.eval_num_quant(nq, env, e.span),
            ExprKind::Proc(_) => Err(RunError::new(
                "procedure definitions cannot appear in specifications",
                e.span,
            )),
        }
    }

    fn expect_bool(
        &self,
        e: &Expr,
        env: &SpecEnv<'_>,
        what: &str,
    ) -> Result<Value, RunError> {
        match self.spec_eval(e, env)? {
            Value::Bool(b) => Ok(Value::Bool(b)),
            other => Err(RunError::new(
                format!("{what} applied to a {}", other.kind_name()),
                e.span,
            )),
        }
    }

    /// Apply a `define`d function by name.
    pub fn call_define(&self, name: &str, args: &[Value]) -> Result<Value, RunError> {
        if !self.define_table().contains_key(name) {
            return Err(RunError::new(
                format!("`{name}` is not a defined function"),
                Span::dummy(),
            ));
        }
        self.apply_define(name, args, Span::dummy(), 0)
    }

    /// Apply a `define`d function: the first rule whose patterns match
    /// (literal equality or a typed-variable match) rewrites the call.
    pub(crate) fn apply_define(
        &self,
        name: &str,
        args: &[Value],
        span: Span,
        depth: u32,
    ) -> Result<Value, RunError> {
        if depth >= DEFINE_RECURSION_LIMIT {
            return Err(RunError::new(
                format!("recursion limit reached while evaluating `{name}`"),
                span,
            ));
        }
        let info = self.define_table().get(name).expect("caller checked");
        if args.len() != info.arity {
            return Err(RunError::new(
                format!("`{name}` expects {} argument(s), found {}", info.arity, args.len()),
                span,
            ));
        }
        'rules: for rule in &info.rules {
            let mut binders = IndexMap::new();
            for (pattern, arg) in rule.params.iter().zip(args) {
                match pattern {
                    DefinePattern::Literal(lit) => {
                        let empty = SpecEnv::default();
                        let lit_v = self.spec_eval(lit, &empty)?;
                        if !values_equal(&lit_v, arg) {
                            continue 'rules;
                        }
                    }
                    DefinePattern::Typed { name: var, ty } => {
                        let term = self
                            .named_types()
                            .resolve(ty)
                            .map_err(|d| RunError::new(d.message, d.span))?;
                        if !value_member(arg, &term) {
                            continue 'rules;
                        }
                        binders.insert(var.clone(), arg.clone());
                    }
                }
            }
            let env = SpecEnv { old: None, result: None, binders, depth: depth + 1 };
            return self.spec_eval(&rule.body, &env);
        }
        let rendered: Vec<String> = args.iter().map(Value::render).collect();
        Err(RunError::new(
            format!("no rule of `{name}` matches {name}({})", rendered.join(", ")),
            span,
        ))
    }

    /// `forall`/`exists` over an integer binder whose finite range is
    /// recoverable from bounds in the antecedent of the body.
    fn eval_logical_quant(
        &self,
        q: &Quantifier,
        env: &SpecEnv<'_>,
        is_forall: bool,
        span: Span,
    ) -> Result<Value, RunError> {
        if !matches!(q.ty.kind, TypeExprKind::Integer) {
            return Err(RunError::new(
                "unbounded quantifier: only integer binders are enumerable",
                span,
            ));
        }
        let ExprKind::Implies { lhs, .. } = &q.body.kind else {
            return Err(RunError::new(
                "unbounded quantifier: no range bounds found in the body",
                span,
            ));
        };
        let (lo, hi) = self.recover_bounds(lhs, &q.var, env, span)?;
        let mut k = lo;
        while k <= hi {
            let inner = env.with_binder(&q.var, Value::Int(k.clone()));
            match self.spec_eval(&q.body, &inner)? {
                Value::Bool(b) => {
                    if is_forall && !b {
                        return Ok(Value::Bool(false));
                    }
                    if !is_forall && b {
                        return Ok(Value::Bool(true));
                    }
                }
                other => {
                    return Err(RunError::new(
                        format!("quantifier body evaluated to a {}", other.kind_name()),
                        q.body.span,
                    ))
                }
            }
            k += 1;
        }
        Ok(Value::Bool(is_forall))
    }

    /// Scan a conjunction of comparisons for lower and upper bounds on
    /// `var`, evaluating the bound expressions in the current context.
    fn recover_bounds(
        &self,
        ante: &Expr,
        var: &str,
        env: &SpecEnv<'_>,
        span: Span,
    ) -> Result<(BigInt, BigInt), RunError> {
        let mut lower: Option<BigInt> = None;
        let mut upper: Option<BigInt> = None;
        let mut atoms = vec![ante];
        let mut comparisons = Vec::new();
        while let Some(e) = atoms.pop() {
            match &e.kind {
                ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                    atoms.push(lhs);
                    atoms.push(rhs);
                }
                _ => comparisons.push(e),
            }
        }
        let mut consider = |bound: BigInt, is_lower: bool| {
            if is_lower {
                lower = Some(match lower.take() {
                    Some(prev) => prev.max(bound),
                    None => bound,
                });
            } else {
                upper = Some(match upper.take() {
                    Some(prev) => prev.min(bound),
                    None => bound,
                });
            }
        };
        for atom in comparisons {
            let ExprKind::Binary { op, lhs, rhs } = &atom.kind else { continue };
            let var_on_left = matches!(&lhs.kind, ExprKind::Name(n) if n == var);
            let var_on_right = matches!(&rhs.kind, ExprKind::Name(n) if n == var);
            let (other, var_left) = match (var_on_left, var_on_right) {
                (true, false) => (rhs, true),
                (false, true) => (lhs, false),
                _ => continue,
            };
            if occurs(other, var) {
                continue;
            }
            let bound_v = self.spec_eval(other, env)?;
            let Value::Int(bound) = bound_v else { continue };
            match (op, var_left) {
                // var <= e / e >= var: upper bound e
                (BinOp::Le, true) | (BinOp::Ge, false) => consider(bound, false),
                // var < e / e > var: upper bound e-1
                (BinOp::Lt, true) | (BinOp::Gt, false) => consider(bound - 1, false),
                // var >= e / e <= var: lower bound e
                (BinOp::Ge, true) | (BinOp::Le, false) => consider(bound, true),
                // var > e / e < var: lower bound e+1
                (BinOp::Gt, true) | (BinOp::Lt, false) => consider(bound + 1, true),
                (BinOp::Eq, _) => {
                    consider(bound.clone(), true);
                    consider(bound, false);
                }
                _ => {}
            }
        }
        match (lower, upper) {
            (Some(lo), Some(hi)) => {
                let width = (&hi - &lo) + BigInt::one();
                if width > BigInt::from(self.options().quantifier_bound) {
                    return Err(RunError::new(
                        format!(
                            "quantifier range {lo}..{hi} exceeds the bound {}",
                            self.options().quantifier_bound
                        ),
                        span,
                    ));
                }
                Ok((lo, hi))
            }
            _ => Err(RunError::new(
                "unbounded quantifier: no finite range for the bound variable",
                span,
            )),
        }
    }

    /// `add`, `mul`, `min`, `max` and `seq` over a filtered range.
    fn eval_num_quant(
        &self,
        nq: &NumQuant,
        env: &SpecEnv<'_>,
        span: Span,
    ) -> Result<Value, RunError> {
        let var = nq.range.var().clone();
        let items: Vec<Value> = match &nq.range {
            QuantRange::In { seq, .. } => match self.spec_eval(seq, env)? {
                Value::List(items) | Value::Set(items) => items,
                other => {
                    return Err(RunError::new(
                        format!("quantifier range is a {}, not a list or set", other.kind_name()),
                        seq.span,
                    ))
                }
            },
            QuantRange::Interval { lo, hi, .. } => {
                let lo_v = self.spec_eval(lo, env)?;
                let hi_v = self.spec_eval(hi, env)?;
                let (Value::Int(lo_n), Value::Int(hi_n)) = (&lo_v, &hi_v) else {
                    return Err(RunError::new("interval bounds must be integers", span));
                };
                let width = hi_n - lo_n + BigInt::one();
                if width > BigInt::from(self.options().quantifier_bound) {
                    return Err(RunError::new(
                        format!(
                            "quantifier range {lo_n}..{hi_n} exceeds the bound {}",
                            self.options().quantifier_bound
                        ),
                        span,
                    ));
                }
                let mut items = Vec::new();
                let mut k = lo_n.clone();
                while &k <= hi_n {
                    items.push(Value::Int(k.clone()));
                    k += 1;
                }
                items
            }
        };
        let mut kept = Vec::new();
        for item in items {
            let inner = env.with_binder(&var, item.clone());
            if let Some(filter) = &nq.filter {
                match self.spec_eval(filter, &inner)? {
                    Value::Bool(true) => {}
                    Value::Bool(false) => continue,
                    other => {
                        return Err(RunError::new(
                            format!("quantifier filter evaluated to a {}", other.kind_name()),
                            filter.span,
                        ))
                    }
                }
            }
            kept.push(self.spec_eval(&nq.term, &inner)?);
        }
        match nq.kind {
            NumQuantKind::Add => {
                let mut acc = Value::Int(BigInt::zero());
                for v in kept {
                    acc = arith(BinOp::Add, &acc, &v).map_err(|m| RunError::new(m, span))?;
                }
                Ok(acc)
            }
            NumQuantKind::Mul => {
                let mut acc = Value::Int(BigInt::one());
                for v in kept {
                    acc = arith(BinOp::Mul, &acc, &v).map_err(|m| RunError::new(m, span))?;
                }
                Ok(acc)
            }
            NumQuantKind::Min | NumQuantKind::Max => {
                let mut iter = kept.into_iter();
                let Some(mut best) = iter.next() else {
                    return Err(RunError::new(
                        format!("{} of an empty range", nq.kind.keyword()),
                        span,
                    ));
                };
                for v in iter {
                    let ord = compare_numeric(&v, &best).map_err(|m| RunError::new(m, span))?;
                    let better = match nq.kind {
                        NumQuantKind::Min => ord == std::cmp::Ordering::Less,
                        _ => ord == std::cmp::Ordering::Greater,
                    };
                    if better {
                        best = v;
                    }
                }
                Ok(best)
            }
            NumQuantKind::Seq => Ok(Value::List(kept)),
        }
    }
}

fn occurs(e: &Expr, var: &str) -> bool {
    let mut found = false;
    visit(e, &mut |x: &Expr| {
        if let ExprKind::Name(n) = &x.kind {
            if n == var {
                found = true;
            }
        }
    });
    found
}

fn visit(e: &Expr, f: &mut impl FnMut(&Expr)) {
    f(e);
    match &e.kind {
        ExprKind::ListLit(es) | ExprKind::SetLit(es) => es.iter().for_each(|x| visit(x, f)),
        ExprKind::Index { base, index } => {
            visit(base, f);
            visit(index, f);
        }
        ExprKind::Call { args, .. } => args.iter().for_each(|x| visit(x, f)),
        ExprKind::TypeTest { expr, .. } | ExprKind::Quote(expr) => visit(expr, f),
        ExprKind::Unary { operand, .. } => visit(operand, f),
        ExprKind::Binary { lhs, rhs, .. }
        | ExprKind::Implies { lhs, rhs }
        | ExprKind::Equivalent { lhs, rhs } => {
            visit(lhs, f);
            visit(rhs, f);
        }
        ExprKind::Forall(q) | ExprKind::Exists(q) => visit(&q.body, f),
        ExprKind::NumQuant(nq) => {
            visit(&nq.term, f);
            match &nq.range {
                QuantRange::In { seq, .. } => visit(seq, f),
                QuantRange::Interval { lo, hi, .. } => {
                    visit(lo, f);
                    visit(hi, f);
                }
            }
            if let Some(filter) = &nq.filter {
                visit(filter, f);
            }
        }
        _ => {}
    }
}
