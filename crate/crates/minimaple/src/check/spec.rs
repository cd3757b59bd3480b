//! Well-typedness checking for the specification language, and
//! processing of the specification declarations at the program head.

use indexmap::{IndexMap, IndexSet};

use crate::ast::*;
use crate::builtins::builtin_signature;
use crate::env::TypeEnvironment;
use crate::span::Span;
use crate::types::{is_subtype, super_type, TypeTerm};

use super::Checker;

/// Mathematical functions introduced by `define(I, rules)`.
#[derive(Debug, Clone)]
pub struct DefineInfo {
    pub arity: usize,
    pub rules: Vec<DefineRule>,
}

/// Symbols introduced by specification declarations: defined functions,
/// declared predicates, uninterpreted functions and constants picked up
/// from axioms, and the axioms themselves.
#[derive(Debug, Clone, Default)]
pub struct SpecSymbols {
    pub defines: IndexMap<Ident, DefineInfo>,
    pub predicates: IndexMap<Ident, usize>,
    pub uninterpreted: IndexSet<Ident>,
    pub constants: IndexMap<Ident, TypeTerm>,
    pub assumes: Vec<Expr>,
}

impl SpecSymbols {
    pub fn constant_type(&self, name: &str) -> Option<TypeTerm> {
        self.constants.get(name).cloned()
    }
}

/// What a specification expression may refer to.
pub(crate) struct SpecCtx<'a> {
    pub result_ty: Option<&'a TypeTerm>,
    pub old_env: Option<&'a TypeEnvironment>,
    /// Axiom mode: unknown functions and names register themselves as
    /// uninterpreted instead of being errors.
    pub lenient: bool,
}

impl SpecCtx<'_> {
    fn strict() -> SpecCtx<'static> {
        SpecCtx { result_ty: None, old_env: None, lenient: false }
    }
}

impl Checker {
    pub(crate) fn process_declarations(&mut self, decls: &[SpecDecl]) {
        for decl in decls {
            match &decl.kind {
                SpecDeclKind::NamedType { name, ty } => {
                    match self.table.resolve_defining(ty, name) {
                        Ok(term) => {
                            if let Err(d) = self.table.define_named(name, term, decl.span) {
                                self.diags.push(d);
                            }
                        }
                        Err(d) => self.diags.push(d),
                    }
                }
                SpecDeclKind::AbstractType { name } => {
                    if let Err(d) = self.table.define_abstract(name, decl.span) {
                        self.diags.push(d);
                    }
                }
                SpecDeclKind::Define { name, rules } => {
                    let arity = rules[0].params.len();
                    for rule in rules {
                        if rule.params.len() != arity {
                            self.error(
                                "define-arity",
                                format!(
                                    "rules of `{name}` disagree on arity ({} vs {arity})",
                                    rule.params.len()
                                ),
                                rule.span,
                            );
                        }
                    }
                    if self.specs.defines.contains_key(name) {
                        self.error(
                            "duplicate-decl",
                            format!("`{name}` is defined twice"),
                            decl.span,
                        );
                    }
                    // Register before checking the bodies so rules may
                    // recurse.
                    self.specs
                        .defines
                        .insert(name.clone(), DefineInfo { arity, rules: rules.clone() });
                    for rule in rules {
                        let mut env = TypeEnvironment::new();
                        for param in &rule.params {
                            match param {
                                DefinePattern::Typed { name, ty } => {
                                    let t = self.resolve_type(ty);
                                    env.bind(name.clone(), t);
                                }
                                DefinePattern::Literal(e) => {
                                    self.spec_type(&env, e, &SpecCtx::strict());
                                }
                            }
                        }
                        self.spec_type(&env, &rule.body, &SpecCtx::strict());
                    }
                }
                SpecDeclKind::Assume { expr } => {
                    let env = TypeEnvironment::new();
                    let ctx = SpecCtx { result_ty: None, old_env: None, lenient: true };
                    let ty = self.spec_type(&env, expr, &ctx);
                    self.require_boolean_spec(&ty, decl.span, "assumed axiom");
                    self.specs.assumes.push(expr.clone());
                }
                SpecDeclKind::Predicate { name, params } => {
                    if self.specs.predicates.contains_key(name) {
                        self.error(
                            "duplicate-decl",
                            format!("predicate `{name}` is declared twice"),
                            decl.span,
                        );
                    }
                    self.specs.predicates.insert(name.clone(), params.len());
                }
            }
        }
    }

    pub(crate) fn check_proc_spec(
        &mut self,
        entry: &TypeEnvironment,
        ret_ty: &TypeTerm,
        def: &ProcDef,
        spec: &ProcSpec,
    ) {
        for (name, span) in &spec.globals {
            self.mark_used(name);
            if !def.globals.iter().any(|(g, _)| g == name) {
                self.error(
                    "spec-global",
                    format!(
                        "`{name}` appears in the specification's global clause but is not \
                         declared global in the procedure"
                    ),
                    *span,
                );
            }
        }
        let ty = self.spec_type(entry, &spec.requires, &SpecCtx::strict());
        self.require_boolean_spec(&ty, spec.requires.span, "requires clause");
        let ctx = SpecCtx { result_ty: Some(ret_ty), old_env: Some(entry), lenient: false };
        let ty = self.spec_type(entry, &spec.ensures, &ctx);
        self.require_boolean_spec(&ty, spec.ensures.span, "ensures clause");
        if let Some(exc) = &spec.exceptional {
            let ty = self.spec_type(entry, exc, &ctx);
            self.require_boolean_spec(&ty, exc.span, "exception clause");
        }
    }

    pub(crate) fn check_loop_spec(&mut self, head_env: &TypeEnvironment, spec: &LoopSpec) {
        let ctx = SpecCtx { result_ty: None, old_env: Some(head_env), lenient: false };
        let ty = self.spec_type(head_env, &spec.invariant, &ctx);
        self.require_boolean_spec(&ty, spec.invariant.span, "loop invariant");
        let ty = self.spec_type(head_env, &spec.decreases, &SpecCtx::strict());
        if !(is_subtype(&ty, &TypeTerm::Integer) || ty == TypeTerm::Anything) {
            self.error(
                "decreases-not-integer",
                format!(
                    "decreases term must denote a non-negative integer, found {}",
                    ty.render()
                ),
                spec.decreases.span,
            );
        }
    }

    /// Type an ASSERT condition: a specification expression without
    /// RESULT or OLD.
    pub(crate) fn spec_type_plain(&mut self, env: &TypeEnvironment, e: &Expr) -> TypeTerm {
        self.spec_type(env, e, &SpecCtx::strict())
    }

    pub(crate) fn require_boolean_spec(&mut self, ty: &TypeTerm, span: Span, what: &str) {
        if !self.boolean_position(ty) {
            self.error(
                "spec-not-boolean",
                format!("{what} must be boolean, found {}", ty.render()),
                span,
            );
        }
    }

    /// The typing judgment for specification expressions.
    pub(crate) fn spec_type(
        &mut self,
        env: &TypeEnvironment,
        e: &Expr,
        ctx: &SpecCtx<'_>,
    ) -> TypeTerm {
        match &e.kind {
            ExprKind::Int(_) => TypeTerm::Integer,
            ExprKind::Float(_) => TypeTerm::Float,
            ExprKind::Str(_) => TypeTerm::String,
            ExprKind::Bool(_) => TypeTerm::Boolean,
            ExprKind::Name(name) => {
                self.mark_used(name);
                if let Some(ty) = env.get(name) {
                    return ty.clone();
                }
                if let Some(ty) = self.specs.constant_type(name) {
                    return ty;
                }
                if ctx.lenient {
                    self.specs.constants.insert(name.clone(), TypeTerm::Anything);
                    return TypeTerm::Anything;
                }
                self.info(
                    "unbound-name",
                    format!("`{name}` is not bound here; treating it as a symbol"),
                    e.span,
                );
                TypeTerm::Symbol
            }
            ExprKind::ListLit(items) => {
                TypeTerm::Record(items.iter().map(|it| self.spec_type(env, it, ctx)).collect())
            }
            ExprKind::SetLit(items) => {
                let mut elem: Option<TypeTerm> = None;
                for item in items {
                    let ty = self.spec_type(env, item, ctx);
                    elem = Some(match elem {
                        Some(prev) => super_type(&prev, &ty),
                        None => ty,
                    });
                }
                TypeTerm::Set(Box::new(elem.unwrap_or(TypeTerm::Anything)))
            }
            ExprKind::Index { base, index } => {
                let base_ty = self.spec_type(env, base, ctx);
                let index_ty = self.spec_type(env, index, ctx);
                if !matches!(index_ty, TypeTerm::Integer | TypeTerm::Anything) {
                    self.error(
                        "index-type",
                        format!("index must be an integer, found {}", index_ty.render()),
                        index.span,
                    );
                }
                let literal = match &index.kind {
                    ExprKind::Int(n) => num::ToPrimitive::to_i64(n),
                    _ => None,
                };
                match self.spec_element_type(&base_ty, literal) {
                    Ok(t) => t,
                    Err(msg) => {
                        self.error("index-base", msg, e.span);
                        TypeTerm::Anything
                    }
                }
            }
            ExprKind::Call { callee, callee_span, args } => {
                let arg_types: Vec<TypeTerm> =
                    args.iter().map(|a| self.spec_type(env, a, ctx)).collect();
                self.mark_used(callee);
                if let Some(info) = self.specs.defines.get(callee) {
                    let arity = info.arity;
                    self.check_spec_arity(callee, arity, arg_types.len(), *callee_span);
                    return TypeTerm::Anything;
                }
                if let Some(&arity) = self.specs.predicates.get(callee) {
                    self.check_spec_arity(callee, arity, arg_types.len(), *callee_span);
                    return TypeTerm::Boolean;
                }
                if self.specs.uninterpreted.contains(callee) {
                    return TypeTerm::Anything;
                }
                let sig = env.get(callee).cloned().or_else(|| builtin_signature(callee));
                if let Some(TypeTerm::Procedure { ret, args: params }) = sig {
                    if params.len() != arg_types.len() {
                        self.check_spec_arity(callee, params.len(), arg_types.len(), *callee_span);
                    } else {
                        for (i, (arg_ty, param_ty)) in arg_types.iter().zip(&params).enumerate() {
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
                    return (*ret).clone();
                }
                if ctx.lenient {
                    // Axioms may introduce uninterpreted functions.
                    self.specs.uninterpreted.insert(callee.clone());
                    return TypeTerm::Anything;
                }
                self.error(
                    "unknown-function",
                    format!("`{callee}` is not a known function or predicate"),
                    *callee_span,
                );
                TypeTerm::Anything
            }
            ExprKind::TypeTest { expr, ty } => {
                self.spec_type(env, expr, ctx);
                self.resolve_type(ty);
                TypeTerm::Boolean
            }
            ExprKind::Unary { op: UnOp::Neg, operand } => {
                let ty = self.spec_type(env, operand, ctx);
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
                let ty = self.spec_type(env, operand, ctx);
                self.require_boolean_spec(&ty, operand.span, "operand of `not`");
                TypeTerm::Boolean
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let lt = self.spec_type(env, lhs, ctx);
                let rt = self.spec_type(env, rhs, ctx);
                self.binary_type(*op, &lt, &rt, e)
            }
            ExprKind::Quote(_) => TypeTerm::Uneval,
            ExprKind::Proc(_) => {
                self.error(
                    "spec-only",
                    "procedure definitions may not appear in specifications",
                    e.span,
                );
                TypeTerm::Anything
            }
            ExprKind::Implies { lhs, rhs } | ExprKind::Equivalent { lhs, rhs } => {
                let lt = self.spec_type(env, lhs, ctx);
                let rt = self.spec_type(env, rhs, ctx);
                self.require_boolean_spec(&lt, lhs.span, "logical operand");
                self.require_boolean_spec(&rt, rhs.span, "logical operand");
                TypeTerm::Boolean
            }
            ExprKind::Forall(q) | ExprKind::Exists(q) => {
                let binder_ty = self.resolve_type(&q.ty);
                let mut inner = env.clone();
                inner.bind(q.var.clone(), binder_ty);
                let body_ty = self.spec_type(&inner, &q.body, ctx);
                self.require_boolean_spec(&body_ty, q.body.span, "quantifier body");
                TypeTerm::Boolean
            }
            ExprKind::NumQuant(nq) => {
                let elem_ty = match &nq.range {
                    QuantRange::In { seq, .. } => {
                        let seq_ty = self.spec_type(env, seq, ctx);
                        match self.spec_element_type(&seq_ty, None) {
                            Ok(t) => t,
                            Err(_) => {
                                self.error(
                                    "quant-range",
                                    format!(
                                        "quantifier range must be a list or set, found {}",
                                        seq_ty.render()
                                    ),
                                    seq.span,
                                );
                                TypeTerm::Anything
                            }
                        }
                    }
                    QuantRange::Interval { lo, hi, .. } => {
                        for bound in [lo, hi] {
                            let ty = self.spec_type(env, bound, ctx);
                            if !(is_subtype(&ty, &TypeTerm::Integer) || ty == TypeTerm::Anything) {
                                self.error(
                                    "quant-range",
                                    format!(
                                        "interval bounds must be integers, found {}",
                                        ty.render()
                                    ),
                                    bound.span,
                                );
                            }
                        }
                        TypeTerm::Integer
                    }
                };
                let mut inner = env.clone();
                inner.bind(nq.range.var().clone(), elem_ty);
                if let Some(filter) = &nq.filter {
                    let fty = self.spec_type(&inner, filter, ctx);
                    self.require_boolean_spec(&fty, filter.span, "quantifier filter");
                }
                let term_ty = self.spec_type(&inner, &nq.term, ctx);
                match nq.kind {
                    NumQuantKind::Add | NumQuantKind::Mul => {
                        if !self.numeric_position(&term_ty) {
                            self.error(
                                "arith-type",
                                format!(
                                    "`{}` needs a numeric term, found {}",
                                    nq.kind.keyword(),
                                    term_ty.render()
                                ),
                                nq.term.span,
                            );
                            return TypeTerm::Anything;
                        }
                        // The empty fold contributes the integer unit.
                        super_type(&term_ty, &TypeTerm::Integer)
                    }
                    NumQuantKind::Min | NumQuantKind::Max => {
                        if !self.numeric_position(&term_ty) {
                            self.error(
                                "arith-type",
                                format!(
                                    "`{}` needs a numeric term, found {}",
                                    nq.kind.keyword(),
                                    term_ty.render()
                                ),
                                nq.term.span,
                            );
                            return TypeTerm::Anything;
                        }
                        term_ty
                    }
                    NumQuantKind::Seq => TypeTerm::List(Box::new(term_ty)),
                }
            }
            ExprKind::ResultRef => match ctx.result_ty {
                Some(ty) => ty.clone(),
                None => {
                    self.error(
                        "result-outside-ensures",
                        "RESULT may only appear in an ensures clause",
                        e.span,
                    );
                    TypeTerm::Anything
                }
            },
            ExprKind::OldRef(name) => {
                self.mark_used(name);
                let old = ctx.old_env.unwrap_or(env);
                match old.get(name) {
                    Some(ty) => ty.clone(),
                    None => {
                        self.info(
                            "unbound-name",
                            format!("`{name}` is not bound in the pre-state; treating it as a symbol"),
                            e.span,
                        );
                        TypeTerm::Symbol
                    }
                }
            }
        }
    }

    fn check_spec_arity(&mut self, name: &str, expect: usize, found: usize, span: Span) {
        if expect != found {
            self.error(
                "arity",
                format!("`{name}` expects {expect} argument(s), found {found}"),
                span,
            );
        }
    }

    /// Element type of a range or indexing base in specifications.
    fn spec_element_type(
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
                        Err(format!("index {k} is out of bounds for {}", base.render()))
                    }
                } else if ts.is_empty() {
                    Ok(TypeTerm::Anything)
                } else {
                    Ok(ts.iter().skip(1).fold(ts[0].clone(), |acc, t| super_type(&acc, t)))
                }
            }
            TypeTerm::Union(ms) => {
                let mut elems = Vec::new();
                for m in ms {
                    elems.push(self.spec_element_type(m, literal_index)?);
                }
                Ok(crate::types::union_of(elems))
            }
            TypeTerm::Anything => Ok(TypeTerm::Anything),
            other => Err(format!("cannot take elements of a value of type {}", other.render())),
        }
    }
}
