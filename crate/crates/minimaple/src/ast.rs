//! Abstract syntax of MiniMaple programs and their embedded
//! specifications.
//!
//! One expression tree serves both worlds: the specification-only
//! forms (quantifiers, `implies`, `RESULT`, `OLD`) are rejected by the
//! parser outside specification positions.

use num::BigInt;

use crate::span::Span;

pub type Ident = String;

/// Stable identifier for a command node, assigned in parse order.
/// The type checker keys its per-command annotations on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub declarations: Vec<SpecDecl>,
    pub commands: Vec<Command>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub kind: CommandKind,
    pub span: Span,
    pub id: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandKind {
    /// `x, y := e1, e2;` — the parser guarantees equally many targets
    /// and sources.
    Assign { targets: Vec<Ident>, sources: Vec<Expr> },
    If { branches: Vec<IfBranch>, else_body: Option<Vec<Command>> },
    Loop(Box<LoopCmd>),
    Return { value: Option<Expr> },
    ErrorCmd { message: String },
    /// A call in command position, e.g. `reset();`.
    ExprCmd { call: Expr },
    Assert(Assertion),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfBranch {
    pub cond: Expr,
    pub body: Vec<Command>,
}

/// `for I from E by E to E while E do Cseq end do`, every clause
/// optional. A plain `while` loop has no variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopCmd {
    pub var: Option<Ident>,
    pub from: Option<Expr>,
    pub by: Option<Expr>,
    pub to: Option<Expr>,
    pub while_cond: Option<Expr>,
    pub spec: Option<LoopSpec>,
    pub body: Vec<Command>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(BigInt),
    Float(f64),
    Str(String),
    Bool(bool),
    Name(Ident),
    /// `[ e, ... ]` — a bracketed sequence; typed as a fixed-shape
    /// record that widens into `list(T)`.
    ListLit(Vec<Expr>),
    /// `{ e, ... }`
    SetLit(Vec<Expr>),
    Index { base: Box<Expr>, index: Box<Expr> },
    Call { callee: Ident, callee_span: Span, args: Vec<Expr> },
    /// `type(E, T)`
    TypeTest { expr: Box<Expr>, ty: TypeExprAst },
    Unary { op: UnOp, operand: Box<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    /// `'e'` — a single uneval-quote level.
    Quote(Box<Expr>),
    Proc(Box<ProcDef>),
    // Specification-only forms below.
    Implies { lhs: Box<Expr>, rhs: Box<Expr> },
    Equivalent { lhs: Box<Expr>, rhs: Box<Expr> },
    Forall(Box<Quantifier>),
    Exists(Box<Quantifier>),
    NumQuant(Box<NumQuant>),
    ResultRef,
    OldRef(Ident),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::Eq => "=",
            BinOp::Neq => "<>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod)
    }
}

/// `forall(v::T, body)` / `exists(v::T, body)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantifier {
    pub var: Ident,
    pub ty: TypeExprAst,
    pub body: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumQuantKind {
    Add,
    Mul,
    Min,
    Max,
    Seq,
}

impl NumQuantKind {
    pub fn keyword(self) -> &'static str {
        match self {
            NumQuantKind::Add => "add",
            NumQuantKind::Mul => "mul",
            NumQuantKind::Min => "min",
            NumQuantKind::Max => "max",
            NumQuantKind::Seq => "seq",
        }
    }
}

/// `add(term, v in E, filter)` or `mul(term, v = E..E)` and friends.
#[derive(Debug, Clone, PartialEq)]
pub struct NumQuant {
    pub kind: NumQuantKind,
    pub term: Expr,
    pub range: QuantRange,
    pub filter: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantRange {
    /// `v in E` where E is a list or set.
    In { var: Ident, seq: Expr },
    /// `v = E1..E2` over an integer interval.
    Interval { var: Ident, lo: Expr, hi: Expr },
}

impl QuantRange {
    pub fn var(&self) -> &Ident {
        match self {
            QuantRange::In { var, .. } | QuantRange::Interval { var, .. } => var,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcDef {
    pub params: Vec<Param>,
    pub return_ty: TypeExprAst,
    pub globals: Vec<(Ident, Span)>,
    pub locals: Vec<LocalDecl>,
    pub spec: Option<ProcSpec>,
    pub body: Vec<Command>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub ty: TypeExprAst,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecl {
    pub name: Ident,
    pub ty: Option<TypeExprAst>,
    pub init: Option<Expr>,
    pub span: Span,
}

/// `requires ...; global ...; ensures ...; exception ...;` attached to
/// the procedure definition it immediately precedes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcSpec {
    pub requires: Expr,
    pub globals: Vec<(Ident, Span)>,
    pub ensures: Expr,
    pub exceptional: Option<Expr>,
    pub span: Span,
}

/// `invariant ...; decreases ...;` attached to the loop whose body it
/// opens.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    pub invariant: Expr,
    pub decreases: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub condition: Expr,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecDecl {
    pub kind: SpecDeclKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpecDeclKind {
    /// `define(I, I(pat,...) = body, ...);`
    Define { name: Ident, rules: Vec<DefineRule> },
    /// `` `type/I` := T; ``
    NamedType { name: Ident, ty: TypeExprAst },
    /// `` `type/I`; ``
    AbstractType { name: Ident },
    /// `assume(spec-expr);`
    Assume { expr: Expr },
    /// `I(params);`
    Predicate { name: Ident, params: Vec<Ident> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefineRule {
    pub params: Vec<DefinePattern>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DefinePattern {
    /// A literal argument matched by value, e.g. `fac(0) = 1`.
    Literal(Expr),
    /// A typed variable, e.g. `fac(n::integer) = ...`.
    Typed { name: Ident, ty: TypeExprAst },
}

/// Syntactic form of a type annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeExprAst {
    pub kind: TypeExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeExprKind {
    Integer,
    Boolean,
    String,
    Float,
    Rational,
    Anything,
    Symbol,
    Void,
    Uneval,
    /// `{ T }`
    Set(Box<TypeExprAst>),
    /// `list(T)`
    List(Box<TypeExprAst>),
    /// `[ Tseq ]`
    Record(Vec<TypeExprAst>),
    /// `procedure[T](Tseq)`
    Procedure { ret: Box<TypeExprAst>, args: Vec<TypeExprAst> },
    /// `Or(Tseq)`, at least two alternatives.
    Or(Vec<TypeExprAst>),
    /// `I(Tseq)` — a tagged tuple.
    Tagged { name: Ident, args: Vec<TypeExprAst> },
    /// A bare identifier referring to a named or abstract type.
    Named(Ident),
}

// --- position erasure -------------------------------------------------
//
// Round-trip tests compare ASTs modulo spans and node ids; the walkers
// below reset both so derived `PartialEq` can do the comparison.

pub fn erase_positions(program: &mut Program) {
    for d in &mut program.declarations {
        d.span = Span::dummy();
        match &mut d.kind {
            SpecDeclKind::Define { rules, .. } => {
                for r in rules {
                    r.span = Span::dummy();
                    for p in &mut r.params {
                        match p {
                            DefinePattern::Literal(e) => erase_expr(e),
                            DefinePattern::Typed { ty, .. } => erase_type(ty),
                        }
                    }
                    erase_expr(&mut r.body);
                }
            }
            SpecDeclKind::NamedType { ty, .. } => erase_type(ty),
            SpecDeclKind::Assume { expr } => erase_expr(expr),
            SpecDeclKind::AbstractType { .. } | SpecDeclKind::Predicate { .. } => {}
        }
    }
    erase_commands(&mut program.commands);
}

fn erase_commands(commands: &mut [Command]) {
    for c in commands {
        c.span = Span::dummy();
        c.id = NodeId(0);
        match &mut c.kind {
            CommandKind::Assign { sources, .. } => sources.iter_mut().for_each(erase_expr),
            CommandKind::If { branches, else_body } => {
                for b in branches {
                    erase_expr(&mut b.cond);
                    erase_commands(&mut b.body);
                }
                if let Some(body) = else_body {
                    erase_commands(body);
                }
            }
            CommandKind::Loop(looped) => {
                for e in [&mut looped.from, &mut looped.by, &mut looped.to, &mut looped.while_cond]
                    .into_iter()
                    .flatten()
                {
                    erase_expr(e);
                }
                if let Some(spec) = &mut looped.spec {
                    spec.span = Span::dummy();
                    erase_expr(&mut spec.invariant);
                    erase_expr(&mut spec.decreases);
                }
                erase_commands(&mut looped.body);
            }
            CommandKind::Return { value } => {
                if let Some(v) = value {
                    erase_expr(v);
                }
            }
            CommandKind::ErrorCmd { .. } => {}
            CommandKind::ExprCmd { call } => erase_expr(call),
            CommandKind::Assert(a) => erase_expr(&mut a.condition),
        }
    }
}

fn erase_expr(e: &mut Expr) {
    e.span = Span::dummy();
    match &mut e.kind {
        ExprKind::Int(_)
        | ExprKind::Float(_)
        | ExprKind::Str(_)
        | ExprKind::Bool(_)
        | ExprKind::Name(_)
        | ExprKind::ResultRef
        | ExprKind::OldRef(_) => {}
        ExprKind::ListLit(es) | ExprKind::SetLit(es) => es.iter_mut().for_each(erase_expr),
        ExprKind::Index { base, index } => {
            erase_expr(base);
            erase_expr(index);
        }
        ExprKind::Call { callee_span, args, .. } => {
            *callee_span = Span::dummy();
            args.iter_mut().for_each(erase_expr);
        }
        ExprKind::TypeTest { expr, ty } => {
            erase_expr(expr);
            erase_type(ty);
        }
        ExprKind::Unary { operand, .. } => erase_expr(operand),
        ExprKind::Binary { lhs, rhs, .. }
        | ExprKind::Implies { lhs, rhs }
        | ExprKind::Equivalent { lhs, rhs } => {
            erase_expr(lhs);
            erase_expr(rhs);
        }
        ExprKind::Quote(inner) => erase_expr(inner),
        ExprKind::Proc(p) => {
            for param in &mut p.params {
                param.span = Span::dummy();
                erase_type(&mut param.ty);
            }
            erase_type(&mut p.return_ty);
            for (_, s) in &mut p.globals {
                *s = Span::dummy();
            }
            for l in &mut p.locals {
                l.span = Span::dummy();
                if let Some(ty) = &mut l.ty {
                    erase_type(ty);
                }
                if let Some(init) = &mut l.init {
                    erase_expr(init);
                }
            }
            if let Some(spec) = &mut p.spec {
                spec.span = Span::dummy();
                erase_expr(&mut spec.requires);
                for (_, s) in &mut spec.globals {
                    *s = Span::dummy();
                }
                erase_expr(&mut spec.ensures);
                if let Some(exc) = &mut spec.exceptional {
                    erase_expr(exc);
                }
            }
            erase_commands(&mut p.body);
        }
        ExprKind::Forall(q) | ExprKind::Exists(q) => {
            erase_type(&mut q.ty);
            erase_expr(&mut q.body);
        }
        ExprKind::NumQuant(nq) => {
            erase_expr(&mut nq.term);
            match &mut nq.range {
                QuantRange::In { seq, .. } => erase_expr(seq),
                QuantRange::Interval { lo, hi, .. } => {
                    erase_expr(lo);
                    erase_expr(hi);
                }
            }
            if let Some(f) = &mut nq.filter {
                erase_expr(f);
            }
        }
    }
}

fn erase_type(t: &mut TypeExprAst) {
    t.span = Span::dummy();
    match &mut t.kind {
        TypeExprKind::Set(inner) | TypeExprKind::List(inner) => erase_type(inner),
        TypeExprKind::Record(ts) | TypeExprKind::Or(ts) => ts.iter_mut().for_each(erase_type),
        TypeExprKind::Procedure { ret, args } => {
            erase_type(ret);
            args.iter_mut().for_each(erase_type);
        }
        TypeExprKind::Tagged { args, .. } => args.iter_mut().for_each(erase_type),
        _ => {}
    }
}
