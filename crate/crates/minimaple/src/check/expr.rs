//! Expression typing and boolean-expression narrowing.

use num::ToPrimitive;

use crate::ast::*;
use crate::builtins::builtin_signature;
use crate::env::{specialize, TypeEnvironment};
use crate::types::{is_subtype, subtract, super_type, super_type_pred, union_of, TypeTerm};

use super::Checker;

/// Narrowing deltas produced by checking a boolean expression: the new
/// knowledge that holds when it is true and when it is false.
pub(crate) struct BoolInfo {
    pub then_delta: TypeEnvironment,
    pub else_delta: TypeEnvironment,
}

impl BoolInfo {
    fn none() -> Self {
        BoolInfo { then_delta: TypeEnvironment::new(), else_delta: TypeEnvironment::new() }
    }
}

impl Checker {
    /// Type an expression, pushing diagnostics for ill-typed parts and
    /// recovering with `anything`.
    pub(crate) fn check_expr(&mut self, pi: &TypeEnvironment, e: &Expr) -> TypeTerm {
        match &e.kind {
            ExprKind::Int(_) => TypeTerm::Integer,
            ExprKind::Float(_) => TypeTerm::Float,
            ExprKind::Str(_) => TypeTerm::String,
            ExprKind::Bool(_) => TypeTerm::Boolean,
            ExprKind::Name(name) => {
                self.mark_used(name);
                match pi.get(name) {
                    Some(ty) => ty.clone(),
                    None => {
                        // An unassigned name stands for itself.
                        if let Some(ty) = self.specs.constant_type(name) {
                            return ty;
                        }
                        self.info(
                            "unbound-name",
                            format!("`{name}` is not bound here; treating it as a symbol"),
                            e.span,
                        );
                        TypeTerm::Symbol
                    }
                }
            }
            ExprKind::ListLit(items) => {
                // A bracketed sequence has a fixed shape; it widens into
                // list(T) through subtyping when needed.
                TypeTerm::Record(items.iter().map(|it| self.check_expr(pi, it)).collect())
            }
            ExprKind::SetLit(items) => {
                let mut elem: Option<TypeTerm> = None;
                for item in items {
                    let ty = self.check_expr(pi, item);
                    elem = Some(match elem {
                        Some(prev) => super_type(&prev, &ty),
                        None => ty,
                    });
                }
                TypeTerm::Set(Box::new(elem.unwrap_or(TypeTerm::Anything)))
            }
            ExprKind::Index { base, index } => {
                let base_ty = self.check_expr(pi, base);
                let index_ty = self.check_expr(pi, index);
                if !matches!(index_ty, TypeTerm::Integer | TypeTerm::Anything) {
                    self.error(
                        "index-type",
                        format!("index must be an integer, found {}", index_ty.render()),
                        index.span,
                    );
                }
                let literal = match &index.kind {
                    ExprKind::Int(n) => n.to_i64(),
                    _ => None,
                };
                match self.element_type(&base_ty, literal) {
                    Ok(ty) => ty,
                    Err(msg) => {
                        self.error("index-base", msg, e.span);
                        TypeTerm::Anything
                    }
                }
            }
            ExprKind::Call { callee, callee_span, args } => {
                let arg_types: Vec<TypeTerm> =
                    args.iter().map(|a| self.check_expr(pi, a)).collect();
                self.mark_used(callee);
                let sig = pi.get(callee).cloned().or_else(|| builtin_signature(callee));
                match sig {
                    Some(TypeTerm::Procedure { ret, args: params }) => {
                        if params.len() != arg_types.len() {
                            self.error(
                                "arity",
                                format!(
                                    "`{callee}` expects {} argument(s), found {}",
                                    params.len(),
                                    arg_types.len()
                                ),
                                *callee_span,
                            );
                        } else {
                            for (i, (arg_ty, param_ty)) in
                                arg_types.iter().zip(&params).enumerate()
                            {
                                if !is_subtype(arg_ty, param_ty) {
                                    self.error(
                                        "arg-type",
                                        format!(
                                            "argument {} of `{callee}` has type {}, expected a \
                                             sub-type of {}",
                                            i + 1,
                                            arg_ty.render(),
                                            param_ty.render()
                                        ),
                                        args[i].span,
                                    );
                                }
                            }
                        }
                        if let Some(exceptions) = self.callee_exceptions(callee) {
                            let exceptions = exceptions.clone();
                            self.pending_exceptions.extend(exceptions);
                        }
                        (*ret).clone()
                    }
                    Some(other) => {
                        self.error(
                            "call-non-procedure",
                            format!(
                                "cannot call `{callee}`: it has type {}, not a procedure",
                                other.render()
                            ),
                            *callee_span,
                        );
                        TypeTerm::Anything
                    }
                    None => {
                        if self.table.is_abstract(callee) {
                            self.error(
                                "abstract-value",
                                format!(
                                    "abstract type `{callee}` has no constructible values in \
                                     programs"
                                ),
                                *callee_span,
                            );
                        } else {
                            self.error(
                                "unknown-function",
                                format!("call to unknown procedure `{callee}`"),
                                *callee_span,
                            );
                        }
                        TypeTerm::Anything
                    }
                }
            }
            ExprKind::TypeTest { expr, ty } => {
                if let ExprKind::Name(name) = &expr.kind {
                    self.mark_used(name);
                } else {
                    self.check_expr(pi, expr);
                }
                self.resolve_type(ty);
                TypeTerm::Boolean
            }
            ExprKind::Unary { op: UnOp::Neg, operand } => {
                let ty = self.check_expr(pi, operand);
                if !self.numeric_position(&ty) {
                    self.error(
                        "arith-type",
                        format!("cannot negate a value of type {}", ty.render()),
                        e.span,
                    );
                    return TypeTerm::Anything;
                }
                ty
            }
            ExprKind::Unary { op: UnOp::Not, operand } => {
                let ty = self.check_expr(pi, operand);
                self.require_boolean(&ty, operand.span);
                TypeTerm::Boolean
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let lt = self.check_expr(pi, lhs);
                let rt = self.check_expr(pi, rhs);
                self.binary_type(*op, &lt, &rt, e)
            }
            ExprKind::Quote(_) => TypeTerm::Uneval,
            ExprKind::Proc(def) => self.check_procedure(def, e.span),
            // Specification-only forms reach expression position only in
            // specification contexts, which route through spec typing.
            ExprKind::Implies { .. }
            | ExprKind::Equivalent { .. }
            | ExprKind::Forall(_)
            | ExprKind::Exists(_)
            | ExprKind::NumQuant(_)
            | ExprKind::ResultRef
            | ExprKind::OldRef(_) => {
                self.error(
                    "spec-only",
                    "specification construct is not allowed in program code",
                    e.span,
                );
                TypeTerm::Anything
            }
        }
    }

    pub(crate) fn binary_type(
        &mut self,
        op: BinOp,
        lt: &TypeTerm,
        rt: &TypeTerm,
        e: &Expr,
    ) -> TypeTerm {
        match op {
            BinOp::And | BinOp::Or => {
                self.require_boolean(lt, e.span);
                self.require_boolean(rt, e.span);
                TypeTerm::Boolean
            }
            BinOp::Eq | BinOp::Neq => TypeTerm::Boolean,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                for ty in [lt, rt] {
                    if !self.numeric_position(ty) {
                        self.error(
                            "arith-type",
                            format!("cannot order values of type {}", ty.render()),
                            e.span,
                        );
                    }
                }
                TypeTerm::Boolean
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Mod | BinOp::Div => {
                for ty in [lt, rt] {
                    if !self.numeric_position(ty) {
                        self.error(
                            "arith-type",
                            format!("arithmetic on non-numeric type {}", ty.render()),
                            e.span,
                        );
                        return TypeTerm::Anything;
                    }
                }
                if op == BinOp::Div && *lt == TypeTerm::Integer && *rt == TypeTerm::Integer {
                    // Exact division of integers yields a rational.
                    TypeTerm::Rational
                } else {
                    super_type(lt, rt)
                }
            }
        }
    }

    /// Numeric or potentially numeric (anything).
    pub(crate) fn numeric_position(&self, ty: &TypeTerm) -> bool {
        ty.is_numeric() || *ty == TypeTerm::Anything
    }

    /// True for types acceptable where a truth value is needed: boolean
    /// and its supertypes, plus symbol (an unassigned name may acquire a
    /// truth value only at runtime; Maple defers the check).
    pub(crate) fn boolean_position(&self, ty: &TypeTerm) -> bool {
        super_type_pred(ty, &TypeTerm::Boolean) || *ty == TypeTerm::Symbol
    }

    fn require_boolean(&mut self, ty: &TypeTerm, span: crate::span::Span) {
        if !self.boolean_position(ty) {
            self.error(
                "non-boolean-cond",
                format!("expression of type {} cannot be used as a condition", ty.render()),
                span,
            );
        }
    }

    fn element_type(
        &self,
        base: &TypeTerm,
        literal_index: Option<i64>,
    ) -> Result<TypeTerm, String> {
        match base {
            TypeTerm::List(t) | TypeTerm::Set(t) => Ok((**t).clone()),
            TypeTerm::Record(ts) => {
                if let Some(k) = literal_index {
                    if k >= 1 && (k as usize) <= ts.len() {
                        Ok(ts[k as usize - 1].clone())
                    } else {
                        Err(format!(
                            "index {k} is out of bounds for {} with {} component(s)",
                            base.render(),
                            ts.len()
                        ))
                    }
                } else if ts.is_empty() {
                    Err("cannot index an empty sequence".to_string())
                } else {
                    Ok(ts.iter().skip(1).fold(ts[0].clone(), |acc, t| super_type(&acc, t)))
                }
            }
            TypeTerm::Union(ms) => {
                let mut elems = Vec::new();
                for m in ms {
                    elems.push(self.element_type(m, literal_index)?);
                }
                Ok(union_of(elems))
            }
            TypeTerm::Anything => Ok(TypeTerm::Anything),
            other => Err(format!("cannot index a value of type {}", other.render())),
        }
    }

    /// Check a boolean expression and compute the narrowing deltas of
    /// its two outcomes.
    ///
    /// `type(I,T)` narrows `I` to `T` in the then-delta and to the
    /// remaining union members in the else-delta; `and` threads the
    /// then-knowledge left to right, `or` the else-knowledge, and `not`
    /// swaps the two. Redundant tests (always true or always false)
    /// produce warnings.
    pub(crate) fn check_bool_expr(&mut self, pi: &TypeEnvironment, e: &Expr) -> BoolInfo {
        match &e.kind {
            ExprKind::TypeTest { expr, ty } => {
                let tested = self.resolve_type(ty);
                match &expr.kind {
                    ExprKind::Name(name) => {
                        self.mark_used(name);
                        let current = match pi.get(name) {
                            Some(t) => t.clone(),
                            None => {
                                self.info(
                                    "unbound-name",
                                    format!("`{name}` is not bound here; treating it as a symbol"),
                                    expr.span,
                                );
                                TypeTerm::Symbol
                            }
                        };
                        if !super_type_pred(&current, &tested) {
                            self.warn(
                                "test-always-false",
                                format!(
                                    "type test is always false: `{name}` has type {}, which \
                                     cannot be {}",
                                    current.render(),
                                    tested.render()
                                ),
                                e.span,
                            );
                            return BoolInfo::none();
                        }
                        if current == tested {
                            self.warn(
                                "redundant-test",
                                format!(
                                    "type test is redundant (always true): `{name}` already \
                                     has type {}",
                                    tested.render()
                                ),
                                e.span,
                            );
                        }
                        let mut info = BoolInfo::none();
                        info.then_delta.bind(name.clone(), tested.clone());
                        if let Some(rest) = subtract(&current, &tested) {
                            if rest != current {
                                info.else_delta.bind(name.clone(), rest);
                            }
                        }
                        info
                    }
                    _ => {
                        self.check_expr(pi, expr);
                        self.info(
                            "narrow-non-identifier",
                            "type test on a non-identifier does not narrow any type",
                            e.span,
                        );
                        BoolInfo::none()
                    }
                }
            }
            ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                let left = self.check_bool_expr(pi, lhs);
                // The right operand sees the left's then-knowledge.
                let pi_right = specialize(pi, &left.then_delta);
                let right = self.check_bool_expr(&pi_right, rhs);
                let mut then_delta = left.then_delta;
                for (name, ty) in right.then_delta.iter() {
                    then_delta.bind(name.clone(), ty.clone());
                }
                BoolInfo { then_delta, else_delta: TypeEnvironment::new() }
            }
            ExprKind::Binary { op: BinOp::Or, lhs, rhs } => {
                let left = self.check_bool_expr(pi, lhs);
                let pi_right = specialize(pi, &left.else_delta);
                let right = self.check_bool_expr(&pi_right, rhs);
                let mut else_delta = left.else_delta;
                for (name, ty) in right.else_delta.iter() {
                    else_delta.bind(name.clone(), ty.clone());
                }
                BoolInfo { then_delta: TypeEnvironment::new(), else_delta }
            }
            ExprKind::Unary { op: UnOp::Not, operand } => {
                let inner = self.check_bool_expr(pi, operand);
                BoolInfo { then_delta: inner.else_delta, else_delta: inner.then_delta }
            }
            _ => {
                let ty = self.check_expr(pi, e);
                self.require_boolean(&ty, e.span);
                BoolInfo::none()
            }
        }
    }

    /// Refine `env` with the knowledge that `cond` is false, without
    /// emitting diagnostics. Used to accumulate guard refutations for
    /// the else branch of a conditional chain.
    pub(crate) fn narrow_else(&self, env: TypeEnvironment, cond: &Expr) -> TypeEnvironment {
        match &cond.kind {
            ExprKind::TypeTest { expr, ty } => {
                let ExprKind::Name(name) = &expr.kind else { return env };
                let Ok(tested) = self.table.resolve(ty) else { return env };
                let Some(current) = env.get(name) else { return env };
                match subtract(current, &tested) {
                    Some(rest) if rest != *current => {
                        let mut env = env;
                        env.bind(name.clone(), rest);
                        env
                    }
                    _ => env,
                }
            }
            // not (not a) is false exactly when a is; `a or b` false
            // refutes both sides.
            ExprKind::Unary { op: UnOp::Not, operand } => self.narrow_then(env, operand),
            ExprKind::Binary { op: BinOp::Or, lhs, rhs } => {
                let env = self.narrow_else(env, lhs);
                self.narrow_else(env, rhs)
            }
            _ => env,
        }
    }

    fn narrow_then(&self, env: TypeEnvironment, cond: &Expr) -> TypeEnvironment {
        match &cond.kind {
            ExprKind::TypeTest { expr, ty } => {
                let ExprKind::Name(name) = &expr.kind else { return env };
                let Ok(tested) = self.table.resolve(ty) else { return env };
                let Some(current) = env.get(name) else { return env };
                if super_type_pred(current, &tested) {
                    let mut env = env;
                    env.bind(name.clone(), tested);
                    env
                } else {
                    env
                }
            }
            ExprKind::Unary { op: UnOp::Not, operand } => self.narrow_else(env, operand),
            ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                let env = self.narrow_then(env, lhs);
                self.narrow_then(env, rhs)
            }
            _ => env,
        }
    }
}
