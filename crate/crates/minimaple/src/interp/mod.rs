//! Reference interpreter with runtime contract checking.
//!
//! Execution is the deterministic refinement of the state-relation
//! semantics: commands map a pre-state to a post-state or to an
//! absorbing error, expression evaluation may change the state, and
//! procedures use static scoping. Loop specifications, assertions and
//! procedure contracts are evaluated over state snapshots when the
//! corresponding options are on.

mod spec;
pub mod value;

use std::cell::RefCell;
use std::rc::Rc;

use indexmap::{IndexMap, IndexSet};
use num::{BigInt, Signed, ToPrimitive};
use thiserror::Error;

use crate::ast::*;
use crate::check::DefineInfo;
use crate::env::NamedTypeTable;
use crate::span::Span;
use crate::types::TypeTerm;

use value::{arith, compare_numeric, make_set, negate, value_member, values_equal, Value};

/// Knobs for a run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub check_assertions: bool,
    pub check_loop_specs: bool,
    pub check_contracts: bool,
    /// Upper bound on executed commands, loop iterations and calls.
    pub step_limit: u64,
    /// Largest enumerable quantifier range.
    pub quantifier_bound: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            check_assertions: true,
            check_loop_specs: false,
            check_contracts: false,
            step_limit: 1_000_000,
            quantifier_bound: 100_000,
        }
    }
}

/// The absorbing error state.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{message}")]
pub struct RunError {
    pub message: String,
    pub label: Option<String>,
    pub span: Span,
}

impl RunError {
    fn new(message: impl Into<String>, span: Span) -> Self {
        RunError { message: message.into(), label: None, span }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Assign,
    Call,
    Return,
    Assert,
    Invariant,
    Variant,
    Error,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Assign => "assign",
            EventKind::Call => "call",
            EventKind::Return => "return",
            EventKind::Assert => "assert",
            EventKind::Invariant => "invariant",
            EventKind::Variant => "variant",
            EventKind::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub span: Span,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct AssertionOutcome {
    pub label: Option<String>,
    pub passed: bool,
    pub span: Span,
}

/// Result of executing a command: fall through or propagate a return
/// value out to the enclosing procedure boundary.
#[derive(Debug, Clone)]
pub enum Flow {
    Normal,
    Returned(Value),
}

#[derive(Debug)]
pub struct RunResult {
    pub outcome: Result<(), RunError>,
    pub events: Vec<TraceEvent>,
    pub assertions: Vec<AssertionOutcome>,
    pub final_globals: IndexMap<String, Value>,
}

/// Execute a type-checked program from the empty state.
pub fn run_program(program: &Program, opts: RunOptions) -> RunResult {
    let mut interp = match Interp::new(&program.declarations, opts) {
        Ok(i) => i,
        Err(e) => {
            return RunResult {
                outcome: Err(e),
                events: Vec::new(),
                assertions: Vec::new(),
                final_globals: IndexMap::new(),
            }
        }
    };
    let outcome = interp.exec_commands(&program.commands).map(|_| ());
    interp.finish(outcome)
}

/// One call frame. `vars` holds parameters and locals; names in
/// `globals_declared` redirect to the global frame; `parent` is the
/// static link to the defining scope.
#[derive(Debug)]
pub struct Scope {
    vars: RefCell<IndexMap<Ident, Value>>,
    globals_declared: IndexSet<Ident>,
    parent: Option<Rc<Scope>>,
}

/// A procedure value: its definition plus the scope it closed over,
/// with the annotation types resolved at definition time.
#[derive(Debug)]
pub struct Closure {
    pub def: Rc<ProcDef>,
    scope: Option<Rc<Scope>>,
    param_types: Vec<TypeTerm>,
    ret_type: TypeTerm,
}

impl Closure {
    pub fn signature(&self) -> TypeTerm {
        TypeTerm::Procedure {
            ret: Box::new(self.ret_type.clone()),
            args: self.param_types.clone(),
        }
    }
}

pub struct Interp {
    globals: IndexMap<Ident, Value>,
    scope: Option<Rc<Scope>>,
    table: NamedTypeTable,
    defines: IndexMap<Ident, DefineInfo>,
    /// Declared predicates and uninterpreted axiom symbols; referencing
    /// one at runtime is an error.
    non_executable: IndexSet<Ident>,
    opts: RunOptions,
    steps: u64,
    events: Vec<TraceEvent>,
    assertions: Vec<AssertionOutcome>,
}

impl Interp {
    /// Build an interpreter with the program's declarations processed
    /// and an empty state.
    pub fn new(declarations: &[SpecDecl], opts: RunOptions) -> Result<Interp, RunError> {
        let mut table = NamedTypeTable::new();
        let mut defines = IndexMap::new();
        let mut non_executable = IndexSet::new();
        for decl in declarations {
            match &decl.kind {
                SpecDeclKind::NamedType { name, ty } => {
                    let term = table
                        .resolve_defining(ty, name)
                        .map_err(|d| RunError::new(d.message, d.span))?;
                    table
                        .define_named(name, term, decl.span)
                        .map_err(|d| RunError::new(d.message, d.span))?;
                }
                SpecDeclKind::AbstractType { name } => {
                    table
                        .define_abstract(name, decl.span)
                        .map_err(|d| RunError::new(d.message, d.span))?;
                }
                SpecDeclKind::Define { name, rules } => {
                    defines.insert(
                        name.clone(),
                        DefineInfo { arity: rules[0].params.len(), rules: rules.clone() },
                    );
                }
                SpecDeclKind::Assume { expr } => {
                    // Assumed facts are not evaluated; remember the
                    // function symbols they introduce so that a runtime
                    // reference is reported as non-executable.
                    collect_callees(expr, &mut non_executable);
                }
                SpecDeclKind::Predicate { name, .. } => {
                    non_executable.insert(name.clone());
                }
            }
        }
        for name in defines.keys() {
            non_executable.shift_remove(name);
        }
        Ok(Interp {
            globals: IndexMap::new(),
            scope: None,
            table,
            defines,
            non_executable,
            opts,
            steps: 0,
            events: Vec::new(),
            assertions: Vec::new(),
        })
    }

    pub fn finish(mut self, outcome: Result<(), RunError>) -> RunResult {
        if let Err(e) = &outcome {
            self.events.push(TraceEvent {
                kind: EventKind::Error,
                span: e.span,
                detail: match &e.label {
                    Some(label) => format!("{} ({label})", e.message),
                    None => e.message.clone(),
                },
            });
        }
        RunResult {
            outcome,
            events: self.events,
            assertions: self.assertions,
            final_globals: self.globals,
        }
    }

    pub fn set_global(&mut self, name: impl Into<Ident>, value: Value) {
        self.globals.insert(name.into(), value);
    }

    pub fn global(&self, name: &str) -> Option<&Value> {
        self.globals.get(name)
    }

    pub fn globals(&self) -> &IndexMap<Ident, Value> {
        &self.globals
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub(crate) fn options(&self) -> &RunOptions {
        &self.opts
    }

    pub(crate) fn named_types(&self) -> &NamedTypeTable {
        &self.table
    }

    pub(crate) fn define_table(&self) -> &IndexMap<Ident, DefineInfo> {
        &self.defines
    }

    pub(crate) fn is_non_executable(&self, name: &str) -> bool {
        self.non_executable.contains(name)
    }

    fn tick(&mut self, span: Span) -> Result<(), RunError> {
        self.steps += 1;
        if self.steps > self.opts.step_limit {
            return Err(RunError::new("step limit exceeded", span));
        }
        Ok(())
    }

    // --- state access ----------------------------------------------------

    /// Resolve a name: innermost frame, then the static chain (with
    /// `global` declarations redirecting to the global frame), then
    /// the globals.
    pub(crate) fn read_name(&self, name: &str) -> Option<Value> {
        let mut scope = self.scope.as_ref();
        while let Some(s) = scope {
            if s.globals_declared.contains(name) {
                return self.globals.get(name).cloned();
            }
            if let Some(v) = s.vars.borrow().get(name) {
                return Some(v.clone());
            }
            scope = s.parent.as_ref();
        }
        self.globals.get(name).cloned()
    }

    /// An unassigned name evaluates to itself.
    pub(crate) fn lookup(&self, name: &str) -> Value {
        self.read_name(name).unwrap_or_else(|| Value::Symbol(name.to_string()))
    }

    fn assign(&mut self, name: &str, value: Value) {
        let mut scope = self.scope.as_ref();
        while let Some(s) = scope {
            if s.globals_declared.contains(name) {
                self.globals.insert(name.to_string(), value);
                return;
            }
            if s.vars.borrow().contains_key(name) {
                s.vars.borrow_mut().insert(name.to_string(), value);
                return;
            }
            scope = s.parent.as_ref();
        }
        self.globals.insert(name.to_string(), value);
    }

    /// Every visible binding resolved by name, for OLD references in
    /// contract evaluation.
    pub(crate) fn snapshot(&self) -> IndexMap<Ident, Value> {
        let mut names: IndexSet<Ident> = self.globals.keys().cloned().collect();
        let mut scope = self.scope.as_ref();
        while let Some(s) = scope {
            names.extend(s.vars.borrow().keys().cloned());
            scope = s.parent.as_ref();
        }
        names
            .into_iter()
            .filter_map(|name| self.read_name(&name).map(|v| (name, v)))
            .collect()
    }

    fn event(&mut self, kind: EventKind, span: Span, detail: String) {
        self.events.push(TraceEvent { kind, span, detail });
    }

    // --- commands ----------------------------------------------------------

    pub fn exec_commands(&mut self, commands: &[Command]) -> Result<Flow, RunError> {
        for cmd in commands {
            match self.exec_command(cmd)? {
                Flow::Normal => {}
                returned @ Flow::Returned(_) => return Ok(returned),
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_command(&mut self, cmd: &Command) -> Result<Flow, RunError> {
        self.tick(cmd.span)?;
        match &cmd.kind {
            CommandKind::Assign { targets, sources } => {
                let mut values = Vec::with_capacity(sources.len());
                for source in sources {
                    values.push(self.eval_expr(source)?);
                }
                for (target, value) in targets.iter().zip(values) {
                    self.event(
                        EventKind::Assign,
                        cmd.span,
                        format!("{target} = {}", value.render()),
                    );
                    self.assign(target, value);
                }
                Ok(Flow::Normal)
            }
            CommandKind::If { branches, else_body } => {
                for branch in branches {
                    match self.eval_expr(&branch.cond)? {
                        Value::Bool(true) => return self.exec_commands(&branch.body),
                        Value::Bool(false) => {}
                        other => {
                            return Err(RunError::new(
                                format!("condition evaluated to a {}", other.kind_name()),
                                branch.cond.span,
                            ))
                        }
                    }
                }
                match else_body {
                    Some(body) => self.exec_commands(body),
                    None => Ok(Flow::Normal),
                }
            }
            CommandKind::Loop(lp) => self.exec_loop(lp, cmd.span),
            CommandKind::Return { value } => {
                let v = match value {
                    Some(e) => self.eval_expr(e)?,
                    None => Value::Void,
                };
                self.event(EventKind::Return, cmd.span, v.render());
                Ok(Flow::Returned(v))
            }
            CommandKind::ErrorCmd { message } => {
                Err(RunError::new(message.clone(), cmd.span))
            }
            CommandKind::ExprCmd { call } => {
                self.eval_expr(call)?;
                Ok(Flow::Normal)
            }
            CommandKind::Assert(assertion) => {
                if !self.opts.check_assertions {
                    return Ok(Flow::Normal);
                }
                let holds = match self.eval_spec_expr(&assertion.condition, None, None)? {
                    Value::Bool(b) => b,
                    other => {
                        return Err(RunError::new(
                            format!("assertion evaluated to a {}", other.kind_name()),
                            assertion.condition.span,
                        ))
                    }
                };
                self.assertions.push(AssertionOutcome {
                    label: assertion.label.clone(),
                    passed: holds,
                    span: cmd.span,
                });
                let detail = match &assertion.label {
                    Some(l) => format!("\"{l}\" {}", if holds { "passed" } else { "failed" }),
                    None => if holds { "passed" } else { "failed" }.to_string(),
                };
                self.event(EventKind::Assert, cmd.span, detail);
                if holds {
                    Ok(Flow::Normal)
                } else {
                    Err(RunError {
                        message: "assertion failed".to_string(),
                        label: assertion.label.clone(),
                        span: cmd.span,
                    })
                }
            }
        }
    }

    /// The while-loop valuation: maintain the chain of guard states,
    /// exiting with the current state on a false guard, propagating
    /// errors, and passing a return out of the body with the body's
    /// post-state. `for` clauses are sugar for an initialization, a
    /// bound conjoined into the guard, and a trailing increment.
    fn exec_loop(&mut self, lp: &LoopCmd, span: Span) -> Result<Flow, RunError> {
        let mut downward = false;
        if let Some(var) = &lp.var {
            let from = match &lp.from {
                Some(e) => self.eval_expr(e)?,
                None => Value::int(1),
            };
            self.event(EventKind::Assign, span, format!("{var} = {}", from.render()));
            self.assign(var, from);
            if let Some(by) = &lp.by {
                let by_v = self.eval_expr(by)?;
                downward = match &by_v {
                    Value::Int(n) => n.is_negative(),
                    Value::Float(x) => *x < 0.0,
                    Value::Rational(r) => r.is_negative(),
                    other => {
                        return Err(RunError::new(
                            format!("loop step evaluated to a {}", other.kind_name()),
                            by.span,
                        ))
                    }
                };
            }
        }
        let check_spec = self.opts.check_loop_specs && lp.spec.is_some();
        // OLD in the invariant refers to the state at the previous
        // check, i.e. the start of the current iteration; at the first
        // check that is the loop entry state.
        let mut old_state = if check_spec { Some(self.snapshot()) } else { None };
        let mut prev_variant: Option<BigInt> = None;
        loop {
            self.tick(span)?;
            if let (true, Some(spec)) = (check_spec, &lp.spec) {
                let holds =
                    match self.eval_spec_expr(&spec.invariant, old_state.as_ref(), None)? {
                        Value::Bool(b) => b,
                        other => {
                            return Err(RunError::new(
                                format!("invariant evaluated to a {}", other.kind_name()),
                                spec.invariant.span,
                            ))
                        }
                    };
                self.event(
                    EventKind::Invariant,
                    spec.invariant.span,
                    if holds { "holds" } else { "violated" }.to_string(),
                );
                if !holds {
                    return Err(RunError::new("loop invariant violated", spec.invariant.span));
                }
                old_state = Some(self.snapshot());
            }
            // Guard: the `to` bound first, then the while condition.
            if let (Some(var), Some(to)) = (&lp.var, &lp.to) {
                let current = self.lookup(var);
                let bound = self.eval_expr(to)?;
                let ord = compare_numeric(&current, &bound)
                    .map_err(|m| RunError::new(m, to.span))?;
                let within =
                    if downward { ord != std::cmp::Ordering::Less } else { ord != std::cmp::Ordering::Greater };
                if !within {
                    return Ok(Flow::Normal);
                }
            }
            if let Some(cond) = &lp.while_cond {
                match self.eval_expr(cond)? {
                    Value::Bool(true) => {}
                    Value::Bool(false) => return Ok(Flow::Normal),
                    other => {
                        return Err(RunError::new(
                            format!("loop guard evaluated to a {}", other.kind_name()),
                            cond.span,
                        ))
                    }
                }
            }
            if let (true, Some(spec)) = (check_spec, &lp.spec) {
                let variant = self.eval_spec_expr(&spec.decreases, None, None)?;
                let n = value::as_positive_count(&variant).ok_or_else(|| {
                    RunError::new(
                        format!(
                            "loop variant must be a non-negative integer, found {}",
                            variant.render()
                        ),
                        spec.decreases.span,
                    )
                })?;
                self.event(EventKind::Variant, spec.decreases.span, n.to_string());
                if let Some(prev) = &prev_variant {
                    if &n >= prev {
                        return Err(RunError::new(
                            "loop variant did not decrease",
                            spec.decreases.span,
                        ));
                    }
                }
                prev_variant = Some(n);
            }
            match self.exec_commands(&lp.body)? {
                Flow::Normal => {}
                returned @ Flow::Returned(_) => return Ok(returned),
            }
            if let Some(var) = &lp.var {
                let step = match &lp.by {
                    Some(e) => self.eval_expr(e)?,
                    None => Value::int(1),
                };
                let current = self.lookup(var);
                let next = arith(BinOp::Add, &current, &step)
                    .map_err(|m| RunError::new(m, span))?;
                self.assign(var, next);
            }
        }
    }

    // --- expressions ---------------------------------------------------------

    pub fn eval_expr(&mut self, e: &Expr) -> Result<Value, RunError> {
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Int(n.clone())),
            ExprKind::Float(x) => Ok(Value::Float(*x)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Name(name) => Ok(self.lookup(name)),
            ExprKind::ListLit(items) => {
                let mut values = Vec::with_capacity(items.len());
                for item in items {
                    values.push(self.eval_expr(item)?);
                }
                Ok(Value::List(values))
            }
            ExprKind::SetLit(items) => {
                let mut values = Vec::with_capacity(items.len());
                for item in items {
                    values.push(self.eval_expr(item)?);
                }
                Ok(make_set(values))
            }
            ExprKind::Index { base, index } => {
                let base_v = self.eval_expr(base)?;
                let index_v = self.eval_expr(index)?;
                index_value(&base_v, &index_v, e.span)
            }
            ExprKind::Call { callee, args, .. } => {
                let mut arg_vals = Vec::with_capacity(args.len());
                for arg in args {
                    arg_vals.push(self.eval_expr(arg)?);
                }
                match self.read_name(callee) {
                    Some(Value::Proc(closure)) => {
                        let rendered: Vec<String> =
                            arg_vals.iter().map(Value::render).collect();
                        self.event(
                            EventKind::Call,
                            e.span,
                            format!("{callee}({})", rendered.join(", ")),
                        );
                        let result = self.apply_procedure(&closure, arg_vals, e.span)?;
                        self.event(
                            EventKind::Return,
                            e.span,
                            format!("{callee} -> {}", result.render()),
                        );
                        Ok(result)
                    }
                    Some(other) => Err(RunError::new(
                        format!("calling a non-procedure: `{callee}` is a {}", other.kind_name()),
                        e.span,
                    )),
                    None => self.call_unbound(callee, &arg_vals, e.span),
                }
            }
            ExprKind::TypeTest { expr, ty } => {
                let v = self.eval_expr(expr)?;
                let term = self
                    .table
                    .resolve(ty)
                    .map_err(|d| RunError::new(d.message, d.span))?;
                Ok(Value::Bool(value_member(&v, &term)))
            }
            ExprKind::Unary { op: UnOp::Neg, operand } => {
                let v = self.eval_expr(operand)?;
                negate(&v).map_err(|m| RunError::new(m, e.span))
            }
            ExprKind::Unary { op: UnOp::Not, operand } => {
                match self.eval_expr(operand)? {
                    Value::Bool(b) => Ok(Value::Bool(!b)),
                    other => Err(RunError::new(
                        format!("`not` applied to a {}", other.kind_name()),
                        e.span,
                    )),
                }
            }
            ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                match self.eval_expr(lhs)? {
                    Value::Bool(false) => Ok(Value::Bool(false)),
                    Value::Bool(true) => match self.eval_expr(rhs)? {
                        Value::Bool(b) => Ok(Value::Bool(b)),
                        other => Err(RunError::new(
                            format!("`and` applied to a {}", other.kind_name()),
                            rhs.span,
                        )),
                    },
                    other => Err(RunError::new(
                        format!("`and` applied to a {}", other.kind_name()),
                        lhs.span,
                    )),
                }
            }
            ExprKind::Binary { op: BinOp::Or, lhs, rhs } => {
                match self.eval_expr(lhs)? {
                    Value::Bool(true) => Ok(Value::Bool(true)),
                    Value::Bool(false) => match self.eval_expr(rhs)? {
                        Value::Bool(b) => Ok(Value::Bool(b)),
                        other => Err(RunError::new(
                            format!("`or` applied to a {}", other.kind_name()),
                            rhs.span,
                        )),
                    },
                    other => Err(RunError::new(
                        format!("`or` applied to a {}", other.kind_name()),
                        lhs.span,
                    )),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let a = self.eval_expr(lhs)?;
                let b = self.eval_expr(rhs)?;
                binary_value(*op, &a, &b, e.span)
            }
            ExprKind::Quote(inner) => Ok(Value::Uneval(Rc::new((**inner).clone()))),
            ExprKind::Proc(def) => self.make_closure(def, e.span),
            ExprKind::Implies { .. }
            | ExprKind::Equivalent { .. }
            | ExprKind::Forall(_)
            | ExprKind::Exists(_)
            | ExprKind::NumQuant(_)
            | ExprKind::ResultRef
            | ExprKind::OldRef(_) => Err(RunError::new(
                "specification construct evaluated in program code",
                e.span,
            )),
        }
    }

    fn call_unbound(
        &mut self,
        callee: &str,
        args: &[Value],
        span: Span,
    ) -> Result<Value, RunError> {
        if callee == "nops" {
            if args.len() != 1 {
                return Err(RunError::new("nops expects one argument", span));
            }
            return match &args[0] {
                Value::List(items) | Value::Set(items) => Ok(Value::int(items.len() as i64)),
                other => Err(RunError::new(
                    format!("nops expects a list or set, found {}", other.kind_name()),
                    span,
                )),
            };
        }
        if self.defines.contains_key(callee) {
            return self.apply_define(callee, args, span, 0);
        }
        if self.is_non_executable(callee) {
            return Err(RunError::new(
                format!("abstract predicate `{callee}` is not executable"),
                span,
            ));
        }
        Err(RunError::new(
            format!("calling a non-procedure: `{callee}` is not bound"),
            span,
        ))
    }

    fn make_closure(&mut self, def: &ProcDef, span: Span) -> Result<Value, RunError> {
        let mut param_types = Vec::with_capacity(def.params.len());
        for p in &def.params {
            param_types.push(
                self.table.resolve(&p.ty).map_err(|d| RunError::new(d.message, d.span))?,
            );
        }
        let ret_type = self
            .table
            .resolve(&def.return_ty)
            .map_err(|d| RunError::new(d.message, d.span))?;
        let _ = span;
        Ok(Value::Proc(Rc::new(Closure {
            def: Rc::new(def.clone()),
            scope: self.scope.clone(),
            param_types,
            ret_type,
        })))
    }

    /// Call a procedure value: dynamic parameter checks, frame push
    /// with static link, optional contract checking around the body.
    pub fn apply_procedure(
        &mut self,
        closure: &Closure,
        args: Vec<Value>,
        span: Span,
    ) -> Result<Value, RunError> {
        self.tick(span)?;
        let def = &closure.def;
        if args.len() != def.params.len() {
            return Err(RunError::new(
                format!("expected {} argument(s), found {}", def.params.len(), args.len()),
                span,
            ));
        }
        for ((param, ty), arg) in def.params.iter().zip(&closure.param_types).zip(&args) {
            if !value_member(arg, ty) {
                return Err(RunError::new(
                    format!(
                        "argument `{}` = {} does not satisfy its declared type {}",
                        param.name,
                        arg.render(),
                        ty.render()
                    ),
                    span,
                ));
            }
        }
        let vars: IndexMap<Ident, Value> = def
            .params
            .iter()
            .zip(args)
            .map(|(p, v)| (p.name.clone(), v))
            .collect();
        let frame = Rc::new(Scope {
            vars: RefCell::new(vars),
            globals_declared: def.globals.iter().map(|(g, _)| g.clone()).collect(),
            parent: closure.scope.clone(),
        });
        let saved_scope = std::mem::replace(&mut self.scope, Some(frame.clone()));
        let result = self.run_body(closure, &frame, span);
        self.scope = saved_scope;
        result
    }

    fn run_body(
        &mut self,
        closure: &Closure,
        frame: &Rc<Scope>,
        span: Span,
    ) -> Result<Value, RunError> {
        let def = &closure.def;
        // Locals: initializers left-to-right, unassigned locals stand
        // for themselves.
        for local in &def.locals {
            let value = match &local.init {
                Some(init) => self.eval_expr(init)?,
                None => Value::Symbol(local.name.clone()),
            };
            frame.vars.borrow_mut().insert(local.name.clone(), value);
        }
        let contracts = self.opts.check_contracts && def.spec.is_some();
        let entry_state = if contracts { Some(self.snapshot()) } else { None };
        if let (true, Some(spec)) = (contracts, &def.spec) {
            match self.eval_spec_expr(&spec.requires, None, None)? {
                Value::Bool(true) => {}
                Value::Bool(false) => {
                    return Err(RunError::new("precondition violated", spec.requires.span))
                }
                other => {
                    return Err(RunError::new(
                        format!("precondition evaluated to a {}", other.kind_name()),
                        spec.requires.span,
                    ))
                }
            }
        }
        let result = match self.exec_commands(&def.body)? {
            Flow::Returned(v) => v,
            Flow::Normal => Value::Void,
        };
        if let (true, Some(spec)) = (contracts, &def.spec) {
            match self.eval_spec_expr(&spec.ensures, entry_state.as_ref(), Some(&result))? {
                Value::Bool(true) => {}
                Value::Bool(false) => {
                    return Err(RunError::new("postcondition violated", spec.ensures.span))
                }
                other => {
                    return Err(RunError::new(
                        format!("postcondition evaluated to a {}", other.kind_name()),
                        spec.ensures.span,
                    ))
                }
            }
        }
        let _ = span;
        Ok(result)
    }
}

fn index_value(base: &Value, index: &Value, span: Span) -> Result<Value, RunError> {
    let Value::Int(i) = index else {
        return Err(RunError::new(
            format!("index must be an integer, found {}", index.kind_name()),
            span,
        ));
    };
    let items = match base {
        Value::List(items) | Value::Set(items) => items,
        other => {
            return Err(RunError::new(
                format!("cannot index a {}", other.kind_name()),
                span,
            ))
        }
    };
    match i.to_usize() {
        Some(k) if k >= 1 && k <= items.len() => Ok(items[k - 1].clone()),
        _ => Err(RunError::new(
            format!("index {i} out of bounds (1..{})", items.len()),
            span,
        )),
    }
}

fn binary_value(op: BinOp, a: &Value, b: &Value, span: Span) -> Result<Value, RunError> {
    match op {
        BinOp::Eq => Ok(Value::Bool(values_equal(a, b))),
        BinOp::Neq => Ok(Value::Bool(!values_equal(a, b))),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord = compare_numeric(a, b).map_err(|m| RunError::new(m, span))?;
            let holds = match op {
                BinOp::Lt => ord == std::cmp::Ordering::Less,
                BinOp::Le => ord != std::cmp::Ordering::Greater,
                BinOp::Gt => ord == std::cmp::Ordering::Greater,
                BinOp::Ge => ord != std::cmp::Ordering::Less,
                _ => unreachable!(),
            };
            Ok(Value::Bool(holds))
        }
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
            arith(op, a, b).map_err(|m| RunError::new(m, span))
        }
        BinOp::And | BinOp::Or => unreachable!("short-circuited by the caller"),
    }
}

/// Collect the callee names occurring in an expression.
fn collect_callees(e: &Expr, out: &mut IndexSet<Ident>) {
    match &e.kind {
        ExprKind::Call { callee, args, .. } => {
            out.insert(callee.clone());
            args.iter().for_each(|a| collect_callees(a, out));
        }
        ExprKind::ListLit(es) | ExprKind::SetLit(es) => {
            es.iter().for_each(|x| collect_callees(x, out))
        }
        ExprKind::Index { base, index } => {
            collect_callees(base, out);
            collect_callees(index, out);
        }
        ExprKind::TypeTest { expr, .. } | ExprKind::Quote(expr) => collect_callees(expr, out),
        ExprKind::Unary { operand, .. } => collect_callees(operand, out),
        ExprKind::Binary { lhs, rhs, .. }
        | ExprKind::Implies { lhs, rhs }
        | ExprKind::Equivalent { lhs, rhs } => {
            collect_callees(lhs, out);
            collect_callees(rhs, out);
        }
        ExprKind::Forall(q) | ExprKind::Exists(q) => collect_callees(&q.body, out),
        ExprKind::NumQuant(nq) => {
            collect_callees(&nq.term, out);
            match &nq.range {
                QuantRange::In { seq, .. } => collect_callees(seq, out),
                QuantRange::Interval { lo, hi, .. } => {
                    collect_callees(lo, out);
                    collect_callees(hi, out);
                }
            }
            if let Some(f) = &nq.filter {
                collect_callees(f, out);
            }
        }
        _ => {}
    }
}
