//! The flow-sensitive type checker.
//!
//! Commands are checked under a type environment, a context tag and a
//! set of assignable identifiers, and produce a new environment, the
//! set of possible return types, the set of thrown exception names and
//! an all-paths-return flag. Top-level code checks in the global
//! context, where assignments may rebind a variable at any type;
//! procedure and loop bodies check in the local context, where
//! assignments may only specialize the declared type.

mod expr;
mod spec;

use std::collections::BTreeSet;

use indexmap::{IndexMap, IndexSet};

use crate::ast::*;
use crate::diag::{sort_diagnostics, Diagnostic};
use crate::env::{can_specialize, combine, specialize, NamedTypeTable, TypeEnvironment};
use crate::span::Span;
use crate::types::{is_subtype, super_type, TypeTerm};

pub use spec::{DefineInfo, SpecSymbols};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Context {
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetFlag {
    Aret,
    NotAret,
}

impl RetFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RetFlag::Aret => "aret",
            RetFlag::NotAret => "not_aret",
        }
    }
}

/// The 4-tuple produced by checking a command: environment after the
/// command, possible return types, thrown exception names, and whether
/// every control path ends in a return or error.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandInfo {
    pub env_after: TypeEnvironment,
    pub ret_types: BTreeSet<TypeTerm>,
    pub exceptions: BTreeSet<String>,
    pub ret_flag: RetFlag,
}

impl CommandInfo {
    fn new(env_after: TypeEnvironment) -> Self {
        CommandInfo {
            env_after,
            ret_types: BTreeSet::new(),
            exceptions: BTreeSet::new(),
            ret_flag: RetFlag::NotAret,
        }
    }
}

/// Per-command record kept for annotation dumps and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandAnnotation {
    pub env_before: TypeEnvironment,
    pub info: CommandInfo,
}

/// Summary of one checked procedure definition, in source order.
#[derive(Debug, Clone)]
pub struct ProcSummary {
    pub name: Option<Ident>,
    pub entry_env: TypeEnvironment,
    pub info: CommandInfo,
}

#[derive(Debug)]
pub struct CheckOutcome {
    pub diagnostics: Vec<Diagnostic>,
    pub final_env: TypeEnvironment,
    pub top_info: CommandInfo,
    pub annotations: IndexMap<NodeId, CommandAnnotation>,
    pub proc_summaries: Vec<ProcSummary>,
    pub table: NamedTypeTable,
    pub specs: SpecSymbols,
}

impl CheckOutcome {
    pub fn is_ok(&self) -> bool {
        !crate::diag::has_errors(&self.diagnostics)
    }

    pub fn annotation(&self, id: NodeId) -> Option<&CommandAnnotation> {
        self.annotations.get(&id)
    }
}

/// Type-check a parsed program.
pub fn check_program(program: &Program) -> CheckOutcome {
    let mut checker = Checker::new();
    checker.process_declarations(&program.declarations);
    let frame = Frame { context: Context::Global, asgn: IndexSet::new(), in_proc: false };
    let (env, info) = checker.check_commands(TypeEnvironment::new(), &frame, &program.commands);
    sort_diagnostics(&mut checker.diags);
    CheckOutcome {
        diagnostics: checker.diags,
        final_env: env,
        top_info: info,
        annotations: checker.annotations,
        proc_summaries: checker.proc_summaries,
        table: checker.table,
        specs: checker.specs,
    }
}

/// Checking context threaded through command checking.
struct Frame {
    context: Context,
    asgn: IndexSet<Ident>,
    in_proc: bool,
}

pub(crate) struct Checker {
    pub(crate) table: NamedTypeTable,
    pub(crate) specs: SpecSymbols,
    pub(crate) diags: Vec<Diagnostic>,
    annotations: IndexMap<NodeId, CommandAnnotation>,
    proc_summaries: Vec<ProcSummary>,
    /// Exception names of procedures bound to identifiers, keyed by the
    /// identifier; propagated to call sites.
    proc_effects: IndexMap<Ident, BTreeSet<String>>,
    /// Exceptions picked up from calls while checking expressions of
    /// the current command; drained into its `CommandInfo`.
    pub(crate) pending_exceptions: BTreeSet<String>,
    /// One set of referenced names per enclosing procedure, for the
    /// declared-but-unused warnings.
    usage: Vec<IndexSet<Ident>>,
    /// Exceptions of the most recently checked procedure definition,
    /// tied to the bound name by assignment checking.
    last_proc_exceptions: BTreeSet<String>,
}

impl Checker {
    fn new() -> Self {
        Checker {
            table: NamedTypeTable::new(),
            specs: SpecSymbols::default(),
            diags: Vec::new(),
            annotations: IndexMap::new(),
            proc_summaries: Vec::new(),
            proc_effects: IndexMap::new(),
            pending_exceptions: BTreeSet::new(),
            usage: Vec::new(),
            last_proc_exceptions: BTreeSet::new(),
        }
    }

    pub(crate) fn error(&mut self, code: &'static str, message: impl Into<String>, span: Span) {
        self.diags.push(Diagnostic::error(code, message, span));
    }

    pub(crate) fn warn(&mut self, code: &'static str, message: impl Into<String>, span: Span) {
        self.diags.push(Diagnostic::warning(code, message, span));
    }

    pub(crate) fn info(&mut self, code: &'static str, message: impl Into<String>, span: Span) {
        self.diags.push(Diagnostic::info(code, message, span));
    }

    pub(crate) fn mark_used(&mut self, name: &str) {
        for frame in &mut self.usage {
            frame.insert(name.to_string());
        }
    }

    pub(crate) fn resolve_type(&mut self, ast: &TypeExprAst) -> TypeTerm {
        match self.table.resolve(ast) {
            Ok(t) => t,
            Err(d) => {
                self.diags.push(d);
                TypeTerm::Anything
            }
        }
    }

    // --- command sequences ---------------------------------------------

    fn check_commands(
        &mut self,
        env: TypeEnvironment,
        frame: &Frame,
        commands: &[Command],
    ) -> (TypeEnvironment, CommandInfo) {
        let mut env = env;
        let mut seq = CommandInfo::new(env.clone());
        let mut warned_unreachable = false;
        for cmd in commands {
            if seq.ret_flag == RetFlag::Aret && !warned_unreachable {
                self.warn(
                    "unreachable-code",
                    "command is unreachable: every earlier path returns or raises an error",
                    cmd.span,
                );
                warned_unreachable = true;
            }
            let env_before = env.clone();
            let info = self.check_command(env, frame, cmd);
            env = info.env_after.clone();
            seq.ret_types.extend(info.ret_types.iter().cloned());
            seq.exceptions.extend(info.exceptions.iter().cloned());
            if info.ret_flag == RetFlag::Aret {
                seq.ret_flag = RetFlag::Aret;
            }
            self.annotations.insert(cmd.id, CommandAnnotation { env_before, info });
        }
        seq.env_after = env.clone();
        (env, seq)
    }

    fn check_command(&mut self, env: TypeEnvironment, frame: &Frame, cmd: &Command) -> CommandInfo {
        self.pending_exceptions.clear();
        match &cmd.kind {
            CommandKind::Assign { targets, sources } => {
                self.check_assign(env, frame, targets, sources, cmd.span)
            }
            CommandKind::If { branches, else_body } => {
                self.check_if(env, frame, branches, else_body.as_deref())
            }
            CommandKind::Loop(lp) => self.check_loop(env, frame, lp),
            CommandKind::Return { value } => {
                let mut info = CommandInfo::new(env.clone());
                let ty = match value {
                    Some(v) => self.check_expr(&env, v),
                    None => TypeTerm::Void,
                };
                if !frame.in_proc {
                    self.error(
                        "return-outside-proc",
                        "return is only legal inside a procedure body",
                        cmd.span,
                    );
                }
                info.ret_types.insert(ty);
                info.ret_flag = RetFlag::Aret;
                info.exceptions = std::mem::take(&mut self.pending_exceptions);
                info.env_after = env;
                info
            }
            CommandKind::ErrorCmd { message } => {
                let mut info = CommandInfo::new(env);
                info.exceptions.insert(message.clone());
                info.ret_flag = RetFlag::Aret;
                info
            }
            CommandKind::ExprCmd { call } => {
                let mut info = CommandInfo::new(env.clone());
                self.check_expr(&env, call);
                info.exceptions = std::mem::take(&mut self.pending_exceptions);
                info.env_after = env;
                info
            }
            CommandKind::Assert(assertion) => {
                let mut info = CommandInfo::new(env.clone());
                let ty = self.spec_type_plain(&env, &assertion.condition);
                self.require_boolean_spec(&ty, assertion.condition.span, "ASSERT condition");
                info.exceptions = std::mem::take(&mut self.pending_exceptions);
                info.env_after = env;
                info
            }
        }
    }

    fn check_assign(
        &mut self,
        env: TypeEnvironment,
        frame: &Frame,
        targets: &[Ident],
        sources: &[Expr],
        span: Span,
    ) -> CommandInfo {
        let mut env = env;
        let mut source_types = Vec::with_capacity(sources.len());
        let mut source_effects: Vec<Option<(BTreeSet<String>, Option<usize>)>> =
            Vec::with_capacity(sources.len());
        for source in sources {
            source_types.push(self.check_expr(&env, source));
            // Remember procedure exception effects for call sites, and
            // which summary belongs to this definition.
            source_effects.push(match &source.kind {
                ExprKind::Proc(_) => Some((
                    self.last_proc_exceptions.clone(),
                    Some(self.proc_summaries.len() - 1),
                )),
                ExprKind::Name(n) => {
                    self.proc_effects.get(n).cloned().map(|effects| (effects, None))
                }
                _ => None,
            });
        }
        for ((target, ty), effects) in targets.iter().zip(source_types).zip(source_effects) {
            self.mark_used(target);
            if let Some((effects, summary)) = effects {
                self.proc_effects.insert(target.clone(), effects);
                if let Some(idx) = summary {
                    self.proc_summaries[idx].name = Some(target.clone());
                }
            }
            match frame.context {
                Context::Global => {
                    env.bind(target.clone(), ty);
                }
                Context::Local => {
                    if !frame.asgn.contains(target) {
                        self.error(
                            "not-assignable",
                            format!(
                                "cannot assign to `{target}`: in a local context variables \
                                 can only be introduced by declarations"
                            ),
                            span,
                        );
                        continue;
                    }
                    match env.get(target).cloned() {
                        Some(current) => {
                            if is_subtype(&ty, &current) {
                                env.bind(target.clone(), ty);
                            } else {
                                self.error(
                                    "narrow-conflict",
                                    format!(
                                        "cannot specialize `{target}`: the new value has type \
                                         {}, which is not a sub-type of {}",
                                        ty.render(),
                                        current.render()
                                    ),
                                    span,
                                );
                            }
                        }
                        None => env.bind(target.clone(), ty),
                    }
                }
            }
        }
        let mut info = CommandInfo::new(env);
        info.exceptions = std::mem::take(&mut self.pending_exceptions);
        info
    }

    fn check_if(
        &mut self,
        env: TypeEnvironment,
        frame: &Frame,
        branches: &[IfBranch],
        else_body: Option<&[Command]>,
    ) -> CommandInfo {
        let pre = env;
        let mut after_envs: Vec<TypeEnvironment> = Vec::new();
        let mut info = CommandInfo::new(pre.clone());
        let mut all_aret = true;
        // Accumulates the knowledge "every guard so far was false".
        let mut else_env = pre.clone();
        for branch in branches {
            // Guards are checked under the environment of the whole
            // conditional; only a literal else sees the refutations.
            let narrow = self.check_bool_expr(&pre, &branch.cond);
            let branch_env = if can_specialize(&pre, &narrow.then_delta) {
                specialize(&pre, &narrow.then_delta)
            } else {
                self.error(
                    "narrow-conflict",
                    "type of the condition conflicts with the known type information",
                    branch.cond.span,
                );
                pre.clone()
            };
            let (after, binfo) = self.check_commands(branch_env, frame, &branch.body);
            after_envs.push(after.restricted_to(&pre));
            info.ret_types.extend(binfo.ret_types);
            info.exceptions.extend(binfo.exceptions);
            all_aret &= binfo.ret_flag == RetFlag::Aret;
            else_env = self.narrow_else(else_env, &branch.cond);
        }
        match else_body {
            Some(body) => {
                let (after, binfo) = self.check_commands(else_env, frame, body);
                after_envs.push(after.restricted_to(&pre));
                info.ret_types.extend(binfo.ret_types);
                info.exceptions.extend(binfo.exceptions);
                all_aret &= binfo.ret_flag == RetFlag::Aret;
            }
            None => {
                // The implicit fall-through branch.
                after_envs.push(else_env);
                all_aret = false;
            }
        }
        let mut merged = after_envs
            .into_iter()
            .reduce(|a, b| combine(&a, &b))
            .unwrap_or_else(|| pre.clone());
        merged = merged.restricted_to(&pre);
        info.env_after = merged;
        info.ret_flag = if all_aret { RetFlag::Aret } else { RetFlag::NotAret };
        info
    }

    fn check_loop(&mut self, env: TypeEnvironment, frame: &Frame, lp: &LoopCmd) -> CommandInfo {
        let pre = env;
        let numeric_bound = |checker: &mut Checker, e: &Option<Expr>| -> Option<TypeTerm> {
            let e = e.as_ref()?;
            let ty = checker.check_expr(&pre, e);
            if !checker.numeric_position(&ty) {
                checker.error(
                    "non-numeric-range",
                    format!("loop range expression has non-numeric type {}", ty.render()),
                    e.span,
                );
                return Some(TypeTerm::Integer);
            }
            Some(ty)
        };
        let from_ty = numeric_bound(self, &lp.from);
        let by_ty = numeric_bound(self, &lp.by);
        let to_ty = numeric_bound(self, &lp.to);

        let mut body_env = pre.clone();
        if let Some(var) = &lp.var {
            self.mark_used(var);
            // The loop variable is rebound positionally, not specialized:
            // its body type is the join of the range expression types,
            // integer when every clause is integral or defaulted.
            let mut var_ty = from_ty.unwrap_or(TypeTerm::Integer);
            var_ty = super_type(&var_ty, &by_ty.unwrap_or(TypeTerm::Integer));
            if let Some(to) = to_ty {
                var_ty = super_type(&var_ty, &to);
            }
            body_env.bind(var.clone(), var_ty);
        }
        if let Some(cond) = &lp.while_cond {
            let narrow = self.check_bool_expr(&body_env, cond);
            if can_specialize(&body_env, &narrow.then_delta) {
                body_env = specialize(&body_env, &narrow.then_delta);
            }
        }
        if let Some(spec) = &lp.spec {
            self.check_loop_spec(&body_env, spec);
        }
        let mut asgn = match frame.context {
            // Entering a loop from the top level makes every known
            // global assignable inside the body.
            Context::Global => pre.names().cloned().collect::<IndexSet<_>>(),
            Context::Local => frame.asgn.clone(),
        };
        if let Some(var) = &lp.var {
            asgn.insert(var.clone());
        }
        let body_frame = Frame { context: Context::Local, asgn, in_proc: frame.in_proc };
        let (_, binfo) = self.check_commands(body_env, &body_frame, &lp.body);

        // The loop's fixed point: the environment after the loop is the
        // environment before it, loop variable included.
        let mut info = CommandInfo::new(pre);
        info.ret_types = binfo.ret_types;
        info.exceptions = binfo.exceptions;
        info.ret_flag = RetFlag::NotAret;
        info
    }

    // --- procedures -------------------------------------------------------

    pub(crate) fn check_procedure(&mut self, def: &ProcDef, span: Span) -> TypeTerm {
        let mut entry = TypeEnvironment::new();
        let mut declared: Vec<(&Ident, Span, &'static str)> = Vec::new();
        let mut param_types = Vec::new();
        for p in &def.params {
            let ty = self.resolve_type(&p.ty);
            param_types.push(ty.clone());
            declared.push((&p.name, p.span, "parameter"));
            entry.bind(p.name.clone(), ty);
        }
        let ret_ty = self.resolve_type(&def.return_ty);
        for l in &def.locals {
            if entry.contains(&l.name) {
                self.warn(
                    "duplicate-decl",
                    format!("`{}` is declared more than once", l.name),
                    l.span,
                );
                continue;
            }
            let ty = match (&l.ty, &l.init) {
                (Some(t), _) => self.resolve_type(t),
                // An unannotated local starts as a symbol; with an
                // initializer it adopts the initializer's type.
                (None, Some(init)) => self.check_expr(&entry, init),
                (None, None) => TypeTerm::Symbol,
            };
            declared.push((&l.name, l.span, "local"));
            entry.bind(l.name.clone(), ty);
        }
        for (g, gspan) in &def.globals {
            if entry.contains(g) {
                self.warn(
                    "duplicate-decl",
                    format!("`{g}` has duplicate global and local declarations"),
                    *gspan,
                );
                continue;
            }
            declared.push((g, *gspan, "global"));
            // A procedure may be called from states the checker has not
            // seen, so globals enter at anything.
            entry.bind(g.clone(), TypeTerm::Anything);
        }
        // Initializers see the whole entry environment and must satisfy
        // the declared types.
        for l in &def.locals {
            let (Some(tyast), Some(init)) = (&l.ty, &l.init) else { continue };
            let declared_ty = self.resolve_type(tyast);
            let init_ty = self.check_expr(&entry, init);
            if !is_subtype(&init_ty, &declared_ty) {
                self.error(
                    "narrow-conflict",
                    format!(
                        "initializer of `{}` has type {}, which is not a sub-type of {}",
                        l.name,
                        init_ty.render(),
                        declared_ty.render()
                    ),
                    init.span,
                );
            }
        }

        let asgn: IndexSet<Ident> = entry.names().cloned().collect();
        let frame = Frame { context: Context::Local, asgn, in_proc: true };
        self.usage.push(IndexSet::new());
        let saved_pending = std::mem::take(&mut self.pending_exceptions);
        let (_, body_info) = self.check_commands(entry.clone(), &frame, &def.body);
        self.pending_exceptions = saved_pending;
        if let Some(spec) = &def.spec {
            // A name referenced only by the contract still counts as used.
            self.check_proc_spec(&entry, &ret_ty, def, spec);
        }
        let used = self.usage.pop().expect("usage frame");

        for ty in &body_info.ret_types {
            if !is_subtype(ty, &ret_ty) {
                self.error(
                    "return-type",
                    format!(
                        "procedure returns {}, which is not a sub-type of the declared {}",
                        ty.render(),
                        ret_ty.render()
                    ),
                    span,
                );
            }
        }
        if ret_ty != TypeTerm::Void && body_info.ret_flag == RetFlag::NotAret {
            self.error(
                "missing-return",
                format!(
                    "procedure declares return type {} but not every path ends in a return",
                    ret_ty.render()
                ),
                span,
            );
        }
        for (name, dspan, what) in declared {
            if !used.contains(name) {
                self.warn(
                    "unused-variable",
                    format!("{what} `{name}` is declared but not used"),
                    dspan,
                );
            }
        }
        self.last_proc_exceptions = body_info.exceptions.clone();
        self.proc_summaries.push(ProcSummary { name: None, entry_env: entry, info: body_info });
        TypeTerm::Procedure { ret: Box::new(ret_ty), args: param_types }
    }

    pub(crate) fn callee_exceptions(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.proc_effects.get(name)
    }
}
