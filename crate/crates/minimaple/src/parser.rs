//! Recursive descent parser for MiniMaple.
//!
//! Syntax errors are collected with recovery at `;` boundaries so that
//! several errors can be reported per file. Specification comments are
//! parsed from their token sub-streams and attached to the following
//! procedure definition (`requires`-shaped), to the enclosing loop
//! (`invariant`-shaped, first element of a loop body), or to the
//! program head (declarations).

use crate::ast::*;
use crate::diag::Diagnostic;
use crate::lexer::tokenize;
use crate::span::{SourceFile, Span};
use crate::token::{Kw, Token, TokenKind};

/// What a specification expression may reference; drives the `RESULT`
/// and `OLD` legality checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecExprCtx {
    Requires,
    Ensures,
    Invariant,
    Decreases,
    Assertion,
    Declaration,
}

impl SpecExprCtx {
    fn allows_result(self) -> bool {
        matches!(self, SpecExprCtx::Ensures)
    }

    fn allows_old(self) -> bool {
        matches!(self, SpecExprCtx::Ensures | SpecExprCtx::Invariant)
    }
}

#[derive(Debug)]
pub struct ParseOutcome {
    pub program: Program,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.iter().all(|d| d.severity != crate::diag::Severity::Error)
    }
}

/// Lex and parse a whole source file.
pub fn parse_source(file: &SourceFile) -> ParseOutcome {
    match tokenize(&file.text) {
        Ok(tokens) => parse_program(tokens),
        Err(err) => ParseOutcome {
            program: Program::default(),
            diagnostics: vec![Diagnostic::error("syntax", err.to_string(), err.span())],
        },
    }
}

/// Parse a token stream into a [`Program`].
pub fn parse_program(tokens: Vec<Token>) -> ParseOutcome {
    let mut parser = Parser::new(tokens);
    let program = parser.parse_program();
    ParseOutcome { program, diagnostics: parser.errors }
}

/// Parse a standalone type annotation.
pub fn parse_type_expr(tokens: Vec<Token>) -> Result<TypeExprAst, Diagnostic> {
    let mut parser = Parser::new(tokens);
    let ty = parser.parse_type()?;
    parser.expect_end()?;
    Ok(ty)
}

/// Parse a standalone specification expression under the given context.
pub fn parse_spec_expr(tokens: Vec<Token>, ctx: SpecExprCtx) -> Result<Expr, Diagnostic> {
    let mut parser = Parser::new(tokens);
    parser.spec_ctx = Some(ctx);
    let expr = parser.parse_expr()?;
    parser.expect_end()?;
    Ok(expr)
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<Diagnostic>,
    next_id: u32,
    /// `Some(ctx)` while parsing a specification expression.
    spec_ctx: Option<SpecExprCtx>,
    /// A `requires`-shaped comment waiting for its `proc`.
    pending_proc_spec: Option<ProcSpec>,
}

impl Parser {
    fn new(mut tokens: Vec<Token>) -> Self {
        if !matches!(tokens.last().map(|t| &t.kind), Some(TokenKind::Eof)) {
            let span = tokens.last().map(|t| t.span).unwrap_or_else(Span::dummy);
            tokens.push(Token { kind: TokenKind::Eof, span });
        }
        Parser {
            tokens,
            pos: 0,
            errors: Vec::new(),
            next_id: 1,
            spec_ctx: None,
            pending_proc_spec: None,
        }
    }

    fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn peek_at(&self, off: usize) -> &TokenKind {
        &self.tokens[(self.pos + off).min(self.tokens.len() - 1)].kind
    }

    fn span(&self) -> Span {
        self.peek().span
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek_kind() == kind
    }

    fn at_kw(&self, kw: Kw) -> bool {
        matches!(self.peek_kind(), TokenKind::Kw(k) if *k == kw)
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek_kind(), TokenKind::Eof)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Kw) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err_here(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error("syntax", message, self.span())
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            Err(self.err_here(format!("expected {what}, found {}", self.peek())))
        }
    }

    fn expect_kw(&mut self, kw: Kw) -> PResult<Token> {
        self.expect(TokenKind::Kw(kw), &format!("`{}`", kw.as_str()))
    }

    fn expect_ident(&mut self, what: &str) -> PResult<(Ident, Span)> {
        match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => Err(self.err_here(format!("expected {what}, found {}", self.peek()))),
        }
    }

    fn expect_end(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.err_here(format!("unexpected {}", self.peek())))
        }
    }

    // --- program level -------------------------------------------------

    fn parse_program(&mut self) -> Program {
        let mut declarations = Vec::new();
        // Declarations live in spec comments at the top of the program.
        while let TokenKind::SpecComment(inner) = self.peek_kind() {
            if comment_class(inner) != CommentClass::Declarations {
                break;
            }
            let tok = self.bump();
            let inner = match tok.kind {
                TokenKind::SpecComment(inner) => inner,
                _ => unreachable!(),
            };
            let mut sub = self.subparser(inner);
            declarations.extend(sub.parse_declarations());
            let errs = std::mem::take(&mut sub.errors);
            self.absorb(sub);
            self.errors.extend(errs);
        }
        let commands = self.parse_commands(&[]);
        Program { declarations, commands }
    }

    fn subparser(&mut self, tokens: Vec<Token>) -> Parser {
        let mut sub = Parser::new(tokens);
        sub.next_id = self.next_id;
        sub
    }

    fn absorb(&mut self, sub: Parser) {
        self.next_id = sub.next_id;
        self.errors.extend(sub.errors);
    }

    fn parse_declarations(&mut self) -> Vec<SpecDecl> {
        let mut decls = Vec::new();
        while !self.at_eof() {
            match self.parse_declaration() {
                Ok(d) => decls.push(d),
                Err(e) => {
                    self.errors.push(e);
                    self.recover();
                }
            }
        }
        decls
    }

    fn parse_declaration(&mut self) -> PResult<SpecDecl> {
        let span = self.span();
        let kind = match self.peek_kind().clone() {
            TokenKind::Kw(Kw::Define) => self.parse_define()?,
            TokenKind::Kw(Kw::Assume) => {
                self.bump();
                self.expect(TokenKind::LParen, "`(`")?;
                let expr = self.with_spec_ctx(SpecExprCtx::Declaration, |p| p.parse_expr())?;
                self.expect(TokenKind::RParen, "`)`")?;
                self.expect(TokenKind::Semi, "`;`")?;
                SpecDeclKind::Assume { expr }
            }
            TokenKind::Backtick(name) => {
                self.bump();
                let ty_name = name
                    .strip_prefix("type/")
                    .ok_or_else(|| {
                        Diagnostic::error(
                            "syntax",
                            format!("expected a `type/I` declaration, found `{name}`"),
                            span,
                        )
                    })?
                    .to_string();
                if self.eat(&TokenKind::Assign) {
                    let ty = self.parse_type()?;
                    self.expect(TokenKind::Semi, "`;`")?;
                    SpecDeclKind::NamedType { name: ty_name, ty }
                } else {
                    self.expect(TokenKind::Semi, "`;`")?;
                    SpecDeclKind::AbstractType { name: ty_name }
                }
            }
            TokenKind::Ident(name) => {
                // `I(params);` declares a predicate.
                self.bump();
                self.expect(TokenKind::LParen, "`(`")?;
                let mut params = Vec::new();
                if !self.at(&TokenKind::RParen) {
                    loop {
                        params.push(self.expect_ident("predicate parameter")?.0);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RParen, "`)`")?;
                self.expect(TokenKind::Semi, "`;`")?;
                SpecDeclKind::Predicate { name, params }
            }
            _ => return Err(self.err_here(format!("expected declaration, found {}", self.peek()))),
        };
        Ok(SpecDecl { kind, span })
    }

    fn parse_define(&mut self) -> PResult<SpecDeclKind> {
        self.expect_kw(Kw::Define)?;
        self.expect(TokenKind::LParen, "`(`")?;
        let (name, _) = self.expect_ident("function name")?;
        let mut rules = Vec::new();
        while self.eat(&TokenKind::Comma) {
            let rule_span = self.span();
            let (head, head_span) = self.expect_ident("rule head")?;
            if head != name {
                self.errors.push(Diagnostic::error(
                    "syntax",
                    format!("rule head `{head}` does not match defined name `{name}`"),
                    head_span,
                ));
            }
            self.expect(TokenKind::LParen, "`(`")?;
            let mut params = Vec::new();
            if !self.at(&TokenKind::RParen) {
                loop {
                    params.push(self.parse_define_pattern()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            self.expect(TokenKind::RParen, "`)`")?;
            self.expect(TokenKind::Eq, "`=`")?;
            let body = self.with_spec_ctx(SpecExprCtx::Declaration, |p| p.parse_expr())?;
            rules.push(DefineRule { params, body, span: rule_span });
        }
        self.expect(TokenKind::RParen, "`)`")?;
        self.expect(TokenKind::Semi, "`;`")?;
        if rules.is_empty() {
            return Err(Diagnostic::error(
                "syntax",
                format!("define({name}, ...) needs at least one rule"),
                self.span(),
            ));
        }
        Ok(SpecDeclKind::Define { name, rules })
    }

    fn parse_define_pattern(&mut self) -> PResult<DefinePattern> {
        if let TokenKind::Ident(name) = self.peek_kind().clone() {
            if matches!(self.peek_at(1), TokenKind::DoubleColon) {
                self.bump();
                self.bump();
                let ty = self.parse_type()?;
                return Ok(DefinePattern::Typed { name, ty });
            }
        }
        let expr = self.with_spec_ctx(SpecExprCtx::Declaration, |p| p.parse_expr())?;
        Ok(DefinePattern::Literal(expr))
    }

    // --- commands --------------------------------------------------------

    /// Parse commands until one of `stops` (or end of input). Errors are
    /// recorded and parsing resumes after the next `;`.
    fn parse_commands(&mut self, stops: &[Kw]) -> Vec<Command> {
        let mut commands = Vec::new();
        loop {
            if self.at_eof() || stops.iter().any(|&k| self.at_kw(k)) {
                break;
            }
            match self.parse_command() {
                Ok(cmd) => {
                    commands.push(cmd);
                    if let Some(spec) = self.pending_proc_spec.take() {
                        self.errors.push(Diagnostic::error(
                            "spec-detached",
                            "specification comment is not attached to a procedure definition",
                            spec.span,
                        ));
                    }
                }
                Err(e) => {
                    self.errors.push(e);
                    self.pending_proc_spec = None;
                    self.recover();
                }
            }
        }
        commands
    }

    /// Skip to just past the next `;`, stopping at block keywords.
    fn recover(&mut self) {
        loop {
            match self.peek_kind() {
                TokenKind::Eof => return,
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                TokenKind::Kw(Kw::End | Kw::Elif | Kw::Else) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn parse_command(&mut self) -> PResult<Command> {
        let span = self.span();
        let id = self.fresh_id();
        let kind = match self.peek_kind().clone() {
            TokenKind::SpecComment(inner) => {
                match comment_class(&inner) {
                    CommentClass::ProcSpec => {
                        let tok = self.bump();
                        let inner = match tok.kind {
                            TokenKind::SpecComment(i) => i,
                            _ => unreachable!(),
                        };
                        if self.pending_proc_spec.is_some() {
                            return Err(Diagnostic::error(
                                "spec-detached",
                                "duplicate procedure specification comment",
                                tok.span,
                            ));
                        }
                        let spec = self.parse_proc_spec(inner, tok.span)?;
                        self.pending_proc_spec = Some(spec);
                        // The spec belongs to the command that follows.
                        return self.parse_command();
                    }
                    CommentClass::LoopSpec => {
                        return Err(Diagnostic::error(
                            "spec-detached",
                            "loop specification comment must open a loop body",
                            span,
                        ));
                    }
                    CommentClass::Declarations => {
                        return Err(Diagnostic::error(
                            "syntax",
                            "declarations must precede all commands",
                            span,
                        ));
                    }
                }
            }
            TokenKind::Ident(_) => self.parse_assign_or_call()?,
            TokenKind::Kw(Kw::If) => self.parse_if()?,
            TokenKind::Kw(Kw::For) | TokenKind::Kw(Kw::While) => self.parse_loop()?,
            TokenKind::Kw(Kw::Return) => {
                self.bump();
                let value = if self.at(&TokenKind::Semi) { None } else { Some(self.parse_expr()?) };
                self.expect(TokenKind::Semi, "`;`")?;
                CommandKind::Return { value }
            }
            TokenKind::Kw(Kw::Error) => {
                self.bump();
                let message = match self.peek_kind().clone() {
                    TokenKind::Str(s) => {
                        self.bump();
                        s
                    }
                    _ => {
                        return Err(
                            self.err_here(format!("expected string literal, found {}", self.peek()))
                        )
                    }
                };
                self.expect(TokenKind::Semi, "`;`")?;
                CommandKind::ErrorCmd { message }
            }
            TokenKind::Kw(Kw::Assert) => {
                self.bump();
                self.expect(TokenKind::LParen, "`(`")?;
                let condition = self.with_spec_ctx(SpecExprCtx::Assertion, |p| p.parse_expr())?;
                let label = if self.eat(&TokenKind::Comma) {
                    match self.peek_kind().clone() {
                        TokenKind::Str(s) => {
                            self.bump();
                            Some(s)
                        }
                        TokenKind::Backtick(s) => {
                            self.bump();
                            Some(s)
                        }
                        _ => {
                            return Err(self
                                .err_here(format!("expected assertion label, found {}", self.peek())))
                        }
                    }
                } else {
                    None
                };
                self.expect(TokenKind::RParen, "`)`")?;
                self.expect(TokenKind::Semi, "`;`")?;
                CommandKind::Assert(Assertion { condition, label })
            }
            _ => return Err(self.err_here(format!("expected command, found {}", self.peek()))),
        };
        Ok(Command { kind, span, id })
    }

    fn parse_assign_or_call(&mut self) -> PResult<CommandKind> {
        // Either `I, I, ... := E, E, ...;` or a call command `I(...);`.
        let (first, first_span) = self.expect_ident("identifier")?;
        if self.at(&TokenKind::LParen) {
            let call = self.parse_call_expr(first, first_span)?;
            self.expect(TokenKind::Semi, "`;`")?;
            return Ok(CommandKind::ExprCmd { call });
        }
        let mut targets = vec![first];
        while self.eat(&TokenKind::Comma) {
            targets.push(self.expect_ident("assignment target")?.0);
        }
        self.expect(TokenKind::Assign, "`:=`")?;
        let mut sources = vec![self.parse_expr()?];
        while self.eat(&TokenKind::Comma) {
            sources.push(self.parse_expr()?);
        }
        if targets.len() != sources.len() {
            return Err(Diagnostic::error(
                "syntax",
                format!(
                    "assignment has {} target(s) but {} source(s)",
                    targets.len(),
                    sources.len()
                ),
                first_span,
            ));
        }
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(CommandKind::Assign { targets, sources })
    }

    fn parse_if(&mut self) -> PResult<CommandKind> {
        self.expect_kw(Kw::If)?;
        let mut branches = Vec::new();
        let cond = self.parse_expr()?;
        self.expect_kw(Kw::Then)?;
        let body = self.parse_commands(&[Kw::Elif, Kw::Else, Kw::End]);
        branches.push(IfBranch { cond, body });
        let mut else_body = None;
        loop {
            if self.eat_kw(Kw::Elif) {
                let cond = self.parse_expr()?;
                self.expect_kw(Kw::Then)?;
                let body = self.parse_commands(&[Kw::Elif, Kw::Else, Kw::End]);
                branches.push(IfBranch { cond, body });
            } else if self.eat_kw(Kw::Else) {
                else_body = Some(self.parse_commands(&[Kw::End]));
                break;
            } else {
                break;
            }
        }
        self.expect_kw(Kw::End)?;
        self.expect_kw(Kw::If)?;
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(CommandKind::If { branches, else_body })
    }

    fn parse_loop(&mut self) -> PResult<CommandKind> {
        let mut var = None;
        let mut from = None;
        let mut by = None;
        let mut to = None;
        if self.eat_kw(Kw::For) {
            var = Some(self.expect_ident("loop variable")?.0);
            if self.eat_kw(Kw::From) {
                from = Some(self.parse_expr()?);
            }
            if self.eat_kw(Kw::By) {
                by = Some(self.parse_expr()?);
            }
            if self.eat_kw(Kw::To) {
                to = Some(self.parse_expr()?);
            }
        }
        let while_cond = if self.eat_kw(Kw::While) { Some(self.parse_expr()?) } else { None };
        if var.is_none() && while_cond.is_none() {
            return Err(self.err_here("loop needs a `for` clause or a `while` condition"));
        }
        self.expect_kw(Kw::Do)?;
        // A loop specification comment must be the first element of the body.
        let spec = if let TokenKind::SpecComment(inner) = self.peek_kind() {
            if comment_class(inner) == CommentClass::LoopSpec {
                let tok = self.bump();
                let inner = match tok.kind {
                    TokenKind::SpecComment(i) => i,
                    _ => unreachable!(),
                };
                Some(self.parse_loop_spec(inner, tok.span)?)
            } else {
                None
            }
        } else {
            None
        };
        let body = self.parse_commands(&[Kw::End]);
        self.expect_kw(Kw::End)?;
        self.expect_kw(Kw::Do)?;
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(CommandKind::Loop(Box::new(LoopCmd { var, from, by, to, while_cond, spec, body })))
    }

    fn parse_proc_spec(&mut self, inner: Vec<Token>, span: Span) -> PResult<ProcSpec> {
        let mut sub = self.subparser(inner);
        let result = sub.parse_proc_spec_inner(span);
        self.absorb(sub);
        result
    }

    fn parse_proc_spec_inner(&mut self, span: Span) -> PResult<ProcSpec> {
        self.expect_kw(Kw::Requires)?;
        let requires = self.with_spec_ctx(SpecExprCtx::Requires, |p| p.parse_expr())?;
        self.expect(TokenKind::Semi, "`;`")?;
        let mut globals = Vec::new();
        if self.eat_kw(Kw::Global) {
            loop {
                globals.push(self.expect_ident("global name")?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(TokenKind::Semi, "`;`")?;
        }
        self.expect_kw(Kw::Ensures)?;
        let ensures = self.with_spec_ctx(SpecExprCtx::Ensures, |p| p.parse_expr())?;
        self.expect(TokenKind::Semi, "`;`")?;
        let exceptional = if self.eat_kw(Kw::Exception) {
            let e = self.with_spec_ctx(SpecExprCtx::Ensures, |p| p.parse_expr())?;
            self.expect(TokenKind::Semi, "`;`")?;
            Some(e)
        } else {
            None
        };
        self.expect_end()?;
        Ok(ProcSpec { requires, globals, ensures, exceptional, span })
    }

    fn parse_loop_spec(&mut self, inner: Vec<Token>, span: Span) -> PResult<LoopSpec> {
        let mut sub = self.subparser(inner);
        let result = sub.parse_loop_spec_inner(span);
        self.absorb(sub);
        result
    }

    fn parse_loop_spec_inner(&mut self, span: Span) -> PResult<LoopSpec> {
        self.expect_kw(Kw::Invariant)?;
        let invariant = self.with_spec_ctx(SpecExprCtx::Invariant, |p| p.parse_expr())?;
        self.expect(TokenKind::Semi, "`;`")?;
        self.expect_kw(Kw::Decreases)?;
        let decreases = self.with_spec_ctx(SpecExprCtx::Decreases, |p| p.parse_expr())?;
        self.expect(TokenKind::Semi, "`;`")?;
        self.expect_end()?;
        Ok(LoopSpec { invariant, decreases, span })
    }

    // --- expressions -----------------------------------------------------

    fn with_spec_ctx<T>(
        &mut self,
        ctx: SpecExprCtx,
        f: impl FnOnce(&mut Self) -> PResult<T>,
    ) -> PResult<T> {
        let saved = self.spec_ctx.replace(ctx);
        let result = f(self);
        self.spec_ctx = saved;
        result
    }

    fn parse_expr(&mut self) -> PResult<Expr> {
        if self.spec_ctx.is_some() {
            self.parse_equivalent()
        } else {
            self.parse_or()
        }
    }

    fn parse_equivalent(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_implies()?;
        while self.at_kw(Kw::Equivalent) {
            self.bump();
            let rhs = self.parse_implies()?;
            let span = lhs.span;
            lhs = Expr {
                kind: ExprKind::Equivalent { lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_implies(&mut self) -> PResult<Expr> {
        let lhs = self.parse_or()?;
        if self.at_kw(Kw::Implies) {
            self.bump();
            // Right-associative.
            let rhs = self.parse_implies()?;
            let span = lhs.span;
            return Ok(Expr {
                kind: ExprKind::Implies { lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
            });
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_and()?;
        while self.at_kw(Kw::Or) {
            self.bump();
            let rhs = self.parse_and()?;
            let span = lhs.span;
            lhs = Expr {
                kind: ExprKind::Binary { op: BinOp::Or, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_not()?;
        while self.at_kw(Kw::And) {
            self.bump();
            let rhs = self.parse_not()?;
            let span = lhs.span;
            lhs = Expr {
                kind: ExprKind::Binary { op: BinOp::And, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_not(&mut self) -> PResult<Expr> {
        if self.at_kw(Kw::Not) {
            let span = self.bump().span;
            let operand = self.parse_not()?;
            return Ok(Expr {
                kind: ExprKind::Unary { op: UnOp::Not, operand: Box::new(operand) },
                span,
            });
        }
        self.parse_comparison()
    }

    fn parse_comparison(&mut self) -> PResult<Expr> {
        let lhs = self.parse_additive()?;
        let op = match self.peek_kind() {
            TokenKind::Eq => BinOp::Eq,
            TokenKind::Neq => BinOp::Neq,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.parse_additive()?;
        let span = lhs.span;
        Ok(Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span })
    }

    fn parse_additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_multiplicative()?;
            let span = lhs.span;
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
        }
        Ok(lhs)
    }

    fn parse_multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                TokenKind::Kw(Kw::Mod) => BinOp::Mod,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_unary()?;
            let span = lhs.span;
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Minus) {
            let span = self.bump().span;
            let operand = self.parse_unary()?;
            return Ok(Expr {
                kind: ExprKind::Unary { op: UnOp::Neg, operand: Box::new(operand) },
                span,
            });
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.parse_primary()?;
        loop {
            if self.at(&TokenKind::LBracket) {
                self.bump();
                let index = self.parse_expr()?;
                self.expect(TokenKind::RBracket, "`]`")?;
                let span = expr.span;
                expr = Expr {
                    kind: ExprKind::Index { base: Box::new(expr), index: Box::new(index) },
                    span,
                };
            } else if self.at(&TokenKind::LParen) {
                match expr.kind {
                    ExprKind::Name(name) => {
                        expr = self.parse_call_expr(name, expr.span)?;
                    }
                    _ => return Err(self.err_here("only named procedures can be called")),
                }
            } else {
                break;
            }
        }
        Ok(expr)
    }

    fn parse_call_expr(&mut self, callee: Ident, callee_span: Span) -> PResult<Expr> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                args.push(self.parse_expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(Expr { kind: ExprKind::Call { callee, callee_span, args }, span: callee_span })
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek_kind().clone() {
            TokenKind::Int(n) => {
                self.bump();
                ExprKind::Int(n)
            }
            TokenKind::Float(x) => {
                self.bump();
                ExprKind::Float(x)
            }
            TokenKind::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            TokenKind::Kw(Kw::True) => {
                self.bump();
                ExprKind::Bool(true)
            }
            TokenKind::Kw(Kw::False) => {
                self.bump();
                ExprKind::Bool(false)
            }
            TokenKind::Ident(name) => {
                self.bump();
                ExprKind::Name(name)
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                return Ok(inner);
            }
            TokenKind::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if !self.at(&TokenKind::RBracket) {
                    loop {
                        items.push(self.parse_expr()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RBracket, "`]`")?;
                ExprKind::ListLit(items)
            }
            TokenKind::LBrace => {
                self.bump();
                let mut items = Vec::new();
                if !self.at(&TokenKind::RBrace) {
                    loop {
                        items.push(self.parse_expr()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RBrace, "`}`")?;
                ExprKind::SetLit(items)
            }
            TokenKind::Quote => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(TokenKind::Quote, "closing `'`")?;
                ExprKind::Quote(Box::new(inner))
            }
            TokenKind::Kw(Kw::Type) => {
                self.bump();
                self.expect(TokenKind::LParen, "`(`")?;
                let expr = self.parse_expr()?;
                self.expect(TokenKind::Comma, "`,`")?;
                let ty = self.parse_type()?;
                self.expect(TokenKind::RParen, "`)`")?;
                ExprKind::TypeTest { expr: Box::new(expr), ty }
            }
            TokenKind::Kw(Kw::Proc) => {
                let proc = self.parse_proc()?;
                ExprKind::Proc(Box::new(proc))
            }
            TokenKind::SpecComment(inner) => {
                if comment_class(&inner) != CommentClass::ProcSpec {
                    return Err(self.err_here("unexpected specification comment"));
                }
                let tok = self.bump();
                let inner = match tok.kind {
                    TokenKind::SpecComment(i) => i,
                    _ => unreachable!(),
                };
                let spec = self.parse_proc_spec(inner, tok.span)?;
                if !self.at_kw(Kw::Proc) {
                    return Err(Diagnostic::error(
                        "spec-detached",
                        "procedure specification comment must immediately precede `proc`",
                        tok.span,
                    ));
                }
                if self.pending_proc_spec.is_some() {
                    return Err(Diagnostic::error(
                        "spec-detached",
                        "duplicate procedure specification comment",
                        tok.span,
                    ));
                }
                self.pending_proc_spec = Some(spec);
                let proc = self.parse_proc()?;
                ExprKind::Proc(Box::new(proc))
            }
            TokenKind::Kw(Kw::Result) => {
                let ok = self.spec_ctx.map(|c| c.allows_result()).unwrap_or(false);
                if !ok {
                    return Err(Diagnostic::error(
                        "result-outside-ensures",
                        "RESULT may only appear in an ensures clause",
                        span,
                    ));
                }
                self.bump();
                ExprKind::ResultRef
            }
            TokenKind::Kw(Kw::Old) => {
                let ok = self.spec_ctx.map(|c| c.allows_old()).unwrap_or(false);
                if !ok {
                    return Err(Diagnostic::error(
                        "old-outside-spec",
                        "OLD may only appear in invariant or ensures clauses",
                        span,
                    ));
                }
                self.bump();
                let (name, _) = self.expect_ident("identifier after OLD")?;
                ExprKind::OldRef(name)
            }
            TokenKind::Kw(Kw::Forall) | TokenKind::Kw(Kw::Exists) => {
                if self.spec_ctx.is_none() {
                    return Err(self.err_here("quantifiers may only appear in specifications"));
                }
                let is_forall = matches!(self.peek_kind(), TokenKind::Kw(Kw::Forall));
                self.bump();
                self.expect(TokenKind::LParen, "`(`")?;
                let (var, _) = self.expect_ident("bound variable")?;
                self.expect(TokenKind::DoubleColon, "`::`")?;
                let ty = self.parse_type()?;
                self.expect(TokenKind::Comma, "`,`")?;
                let body = self.parse_expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                let q = Box::new(Quantifier { var, ty, body });
                if is_forall {
                    ExprKind::Forall(q)
                } else {
                    ExprKind::Exists(q)
                }
            }
            TokenKind::Kw(kw @ (Kw::Add | Kw::Mul | Kw::Min | Kw::Max | Kw::Seq)) => {
                if self.spec_ctx.is_none() {
                    return Err(self.err_here(format!(
                        "`{}` quantifiers may only appear in specifications",
                        kw.as_str()
                    )));
                }
                let nk = match kw {
                    Kw::Add => NumQuantKind::Add,
                    Kw::Mul => NumQuantKind::Mul,
                    Kw::Min => NumQuantKind::Min,
                    Kw::Max => NumQuantKind::Max,
                    _ => NumQuantKind::Seq,
                };
                self.bump();
                self.expect(TokenKind::LParen, "`(`")?;
                let term = self.parse_expr()?;
                self.expect(TokenKind::Comma, "`,`")?;
                let range = self.parse_quant_range()?;
                let filter =
                    if self.eat(&TokenKind::Comma) { Some(self.parse_expr()?) } else { None };
                self.expect(TokenKind::RParen, "`)`")?;
                ExprKind::NumQuant(Box::new(NumQuant { kind: nk, term, range, filter }))
            }
            _ => return Err(self.err_here(format!("expected expression, found {}", self.peek()))),
        };
        Ok(Expr { kind, span })
    }

    fn parse_quant_range(&mut self) -> PResult<QuantRange> {
        let (var, var_span) = self.expect_ident("range variable")?;
        if self.eat_kw(Kw::In) {
            let seq = self.parse_expr()?;
            return Ok(QuantRange::In { var, seq });
        }
        if self.eat(&TokenKind::Eq) {
            let lo = self.parse_additive()?;
            self.expect(TokenKind::DotDot, "`..`")?;
            let hi = self.parse_additive()?;
            return Ok(QuantRange::Interval { var, lo, hi });
        }
        Err(Diagnostic::error(
            "syntax",
            "malformed quantifier range: expected `v in E` or `v = E..E`",
            var_span,
        ))
    }

    // --- procedures ------------------------------------------------------

    fn parse_proc(&mut self) -> PResult<ProcDef> {
        let spec = self.pending_proc_spec.take();
        self.expect_kw(Kw::Proc)?;
        self.expect(TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                let (name, span) = self.expect_ident("parameter name")?;
                self.expect(TokenKind::DoubleColon, "`::`")?;
                let ty = self.parse_type()?;
                params.push(Param { name, ty, span });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        self.expect(TokenKind::DoubleColon, "`::` before the return type")?;
        let return_ty = self.parse_type()?;
        self.expect(TokenKind::Semi, "`;`")?;
        for i in 1..params.len() {
            if params[..i].iter().any(|p| p.name == params[i].name) {
                self.errors.push(Diagnostic::error(
                    "syntax",
                    format!("duplicate parameter `{}`", params[i].name),
                    params[i].span,
                ));
            }
        }
        let mut globals = Vec::new();
        let mut locals = Vec::new();
        loop {
            if self.eat_kw(Kw::Global) {
                loop {
                    globals.push(self.expect_ident("global name")?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(TokenKind::Semi, "`;`")?;
            } else if self.eat_kw(Kw::Local) {
                loop {
                    let (name, span) = self.expect_ident("local name")?;
                    let ty = if self.eat(&TokenKind::DoubleColon) {
                        Some(self.parse_type()?)
                    } else {
                        None
                    };
                    let init =
                        if self.eat(&TokenKind::Assign) { Some(self.parse_expr()?) } else { None };
                    locals.push(LocalDecl { name, ty, init, span });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(TokenKind::Semi, "`;`")?;
            } else {
                break;
            }
        }
        let body = self.parse_commands(&[Kw::End]);
        self.expect_kw(Kw::End)?;
        self.expect_kw(Kw::Proc)?;
        Ok(ProcDef { params, return_ty, globals, locals, spec, body })
    }

    // --- types -------------------------------------------------------------

    fn parse_type(&mut self) -> PResult<TypeExprAst> {
        let span = self.span();
        let kind = match self.peek_kind().clone() {
            TokenKind::Kw(Kw::Integer) => {
                self.bump();
                TypeExprKind::Integer
            }
            TokenKind::Kw(Kw::Boolean) => {
                self.bump();
                TypeExprKind::Boolean
            }
            TokenKind::Kw(Kw::StringTy) => {
                self.bump();
                TypeExprKind::String
            }
            TokenKind::Kw(Kw::Float) => {
                self.bump();
                TypeExprKind::Float
            }
            TokenKind::Kw(Kw::Rational) => {
                self.bump();
                TypeExprKind::Rational
            }
            TokenKind::Kw(Kw::Anything) => {
                self.bump();
                TypeExprKind::Anything
            }
            TokenKind::Kw(Kw::Symbol) => {
                self.bump();
                TypeExprKind::Symbol
            }
            TokenKind::Kw(Kw::Void) => {
                self.bump();
                TypeExprKind::Void
            }
            TokenKind::Kw(Kw::Uneval) => {
                self.bump();
                TypeExprKind::Uneval
            }
            TokenKind::Kw(Kw::List) => {
                self.bump();
                let args = self.parse_type_args()?;
                if args.len() != 1 {
                    return Err(Diagnostic::error(
                        "syntax",
                        format!("list(...) takes exactly one argument, found {}", args.len()),
                        span,
                    ));
                }
                TypeExprKind::List(Box::new(args.into_iter().next().unwrap()))
            }
            TokenKind::LBrace => {
                self.bump();
                let inner = self.parse_type()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                TypeExprKind::Set(Box::new(inner))
            }
            TokenKind::LBracket => {
                self.bump();
                let mut fields = Vec::new();
                if !self.at(&TokenKind::RBracket) {
                    loop {
                        fields.push(self.parse_type()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RBracket, "`]`")?;
                TypeExprKind::Record(fields)
            }
            TokenKind::Kw(Kw::Procedure) => {
                self.bump();
                self.expect(TokenKind::LBracket, "`[`")?;
                let ret = self.parse_type()?;
                self.expect(TokenKind::RBracket, "`]`")?;
                let args = self.parse_type_args()?;
                TypeExprKind::Procedure { ret: Box::new(ret), args }
            }
            TokenKind::Kw(Kw::OrTy) => {
                self.bump();
                let args = self.parse_type_args()?;
                if args.len() < 2 {
                    return Err(Diagnostic::error(
                        "syntax",
                        "Or(...) needs at least two alternatives",
                        span,
                    ));
                }
                TypeExprKind::Or(args)
            }
            TokenKind::Ident(name) => {
                self.bump();
                if self.at(&TokenKind::LParen) {
                    let args = self.parse_type_args()?;
                    TypeExprKind::Tagged { name, args }
                } else {
                    TypeExprKind::Named(name)
                }
            }
            _ => return Err(self.err_here(format!("expected type, found {}", self.peek()))),
        };
        Ok(TypeExprAst { kind, span })
    }

    fn parse_type_args(&mut self) -> PResult<Vec<TypeExprAst>> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                args.push(self.parse_type()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(args)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CommentClass {
    ProcSpec,
    LoopSpec,
    Declarations,
}

/// Classify a spec comment by its first token.
fn comment_class(inner: &[Token]) -> CommentClass {
    match inner.first().map(|t| &t.kind) {
        Some(TokenKind::Kw(Kw::Requires | Kw::Global | Kw::Ensures)) => CommentClass::ProcSpec,
        Some(TokenKind::Kw(Kw::Invariant | Kw::Decreases)) => CommentClass::LoopSpec,
        _ => CommentClass::Declarations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;

    fn parse_ok(src: &str) -> Program {
        let outcome = parse_source(&SourceFile::new("test.mm", src));
        assert!(
            outcome.diagnostics.is_empty(),
            "unexpected diagnostics: {:?}",
            outcome.diagnostics
        );
        outcome.program
    }

    #[test]
    fn empty_program() {
        let p = parse_ok("");
        assert!(p.declarations.is_empty());
        assert!(p.commands.is_empty());
    }

    #[test]
    fn minimal_statement() {
        let p = parse_ok("x := 1;");
        assert_eq!(p.commands.len(), 1);
        match &p.commands[0].kind {
            CommandKind::Assign { targets, sources } => {
                assert_eq!(targets, &["x".to_string()]);
                assert_eq!(sources.len(), 1);
            }
            other => panic!("expected assignment, got {other:?}"),
        }
    }

    #[test]
    fn type_expr_examples() {
        let t = parse_type_expr(tokenize("[integer,float]").unwrap()).unwrap();
        match t.kind {
            TypeExprKind::Record(fields) => assert_eq!(fields.len(), 2),
            other => panic!("expected record type, got {other:?}"),
        }
        let t = parse_type_expr(tokenize("anything").unwrap()).unwrap();
        assert!(matches!(t.kind, TypeExprKind::Anything));
        let t = parse_type_expr(
            tokenize("procedure[[integer,float]](list(Or(integer,float)))").unwrap(),
        )
        .unwrap();
        match t.kind {
            TypeExprKind::Procedure { ret, args } => {
                assert!(matches!(ret.kind, TypeExprKind::Record(_)));
                assert_eq!(args.len(), 1);
                assert!(matches!(args[0].kind, TypeExprKind::List(_)));
            }
            other => panic!("expected procedure type, got {other:?}"),
        }
    }

    #[test]
    fn type_arity_violation() {
        let err = parse_type_expr(tokenize("list(integer,float)").unwrap()).unwrap_err();
        assert!(err.message.contains("exactly one"));
    }

    #[test]
    fn unknown_type_head_is_named_reference() {
        let t = parse_type_expr(tokenize("ListInt").unwrap()).unwrap();
        assert!(matches!(t.kind, TypeExprKind::Named(n) if n == "ListInt"));
    }

    #[test]
    fn spec_expr_mul_quantifier() {
        let e = parse_spec_expr(
            tokenize("mul(e, e in l, type(e,integer))").unwrap(),
            SpecExprCtx::Ensures,
        )
        .unwrap();
        match e.kind {
            ExprKind::NumQuant(nq) => {
                assert_eq!(nq.kind, NumQuantKind::Mul);
                assert!(matches!(nq.range, QuantRange::In { ref var, .. } if var == "e"));
                assert!(matches!(nq.filter.as_ref().unwrap().kind, ExprKind::TypeTest { .. }));
            }
            other => panic!("expected numeric quantifier, got {other:?}"),
        }
    }

    #[test]
    fn spec_expr_forall_vacuous() {
        let e = parse_spec_expr(tokenize("forall(i::integer, true)").unwrap(), SpecExprCtx::Ensures)
            .unwrap();
        assert!(matches!(e.kind, ExprKind::Forall(_)));
    }

    #[test]
    fn spec_expr_old_arithmetic() {
        // s = OLD s + i - 1 parses as s = (((OLD s) + i) - 1)
        let e = parse_spec_expr(tokenize("s = OLD s + i - 1").unwrap(), SpecExprCtx::Invariant)
            .unwrap();
        match e.kind {
            ExprKind::Binary { op: BinOp::Eq, rhs, .. } => match rhs.kind {
                ExprKind::Binary { op: BinOp::Sub, lhs, .. } => match lhs.kind {
                    ExprKind::Binary { op: BinOp::Add, lhs, .. } => {
                        assert!(matches!(lhs.kind, ExprKind::OldRef(ref n) if n == "s"));
                    }
                    other => panic!("expected addition, got {other:?}"),
                },
                other => panic!("expected subtraction, got {other:?}"),
            },
            other => panic!("expected equation, got {other:?}"),
        }
    }

    #[test]
    fn result_outside_ensures_is_rejected() {
        let err =
            parse_spec_expr(tokenize("RESULT = 1").unwrap(), SpecExprCtx::Requires).unwrap_err();
        assert_eq!(err.code, "result-outside-ensures");
        let err = parse_spec_expr(tokenize("OLD x = 1").unwrap(), SpecExprCtx::Decreases)
            .unwrap_err();
        assert_eq!(err.code, "old-outside-spec");
    }

    #[test]
    fn error_recovery_collects_multiple_errors() {
        let outcome = parse_source(&SourceFile::new(
            "test.mm",
            "x := ;\ny := 2;\nz := * 3;\nw := 4;",
        ));
        let errors: Vec<_> = outcome
            .diagnostics
            .iter()
            .filter(|d| d.severity == crate::diag::Severity::Error)
            .collect();
        assert_eq!(errors.len(), 2, "{errors:?}");
        assert_eq!(outcome.program.commands.len(), 2);
    }

    #[test]
    fn proc_spec_attaches_to_procedure() {
        let src = r#"
prod :=
(*@
  requires true;
  global status;
  ensures (status = -1 and RESULT[1] = mul(e, e in l, type(e,integer)));
@*)
proc(l::list(Or(integer,float)))::[integer,float];
  return [1,1.0];
end proc;
"#;
        let p = parse_ok(src);
        match &p.commands[0].kind {
            CommandKind::Assign { sources, .. } => match &sources[0].kind {
                ExprKind::Proc(def) => {
                    let spec = def.spec.as_ref().expect("spec should attach");
                    assert!(matches!(spec.requires.kind, ExprKind::Bool(true)));
                    assert_eq!(spec.globals.len(), 1);
                    assert_eq!(spec.globals[0].0, "status");
                }
                other => panic!("expected proc, got {other:?}"),
            },
            other => panic!("expected assignment, got {other:?}"),
        }
    }

    #[test]
    fn loop_spec_attaches_to_loop() {
        let src = "while (i <= n) do\n(*@ invariant s = OLD s + i - 1; decreases n-i; @*)\ns := s + i; i := i + 1;\nend do;";
        let p = parse_ok(src);
        match &p.commands[0].kind {
            CommandKind::Loop(lp) => {
                assert!(lp.spec.is_some());
                assert_eq!(lp.body.len(), 2);
                assert!(lp.var.is_none());
            }
            other => panic!("expected loop, got {other:?}"),
        }
    }

    #[test]
    fn declarations_parse_at_program_head() {
        let src = "(*@ `type/ListInt`:=list(integer); `type/DDO`; define(fac, fac(0) = 1, fac(n::integer) = n * fac(n - 1)); inField(c); @*)\nx := 1;";
        let p = parse_ok(src);
        assert_eq!(p.declarations.len(), 4);
        assert!(matches!(p.declarations[0].kind, SpecDeclKind::NamedType { ref name, .. } if name == "ListInt"));
        assert!(matches!(p.declarations[1].kind, SpecDeclKind::AbstractType { ref name } if name == "DDO"));
        assert!(
            matches!(p.declarations[2].kind, SpecDeclKind::Define { ref name, ref rules } if name == "fac" && rules.len() == 2)
        );
        assert!(matches!(p.declarations[3].kind, SpecDeclKind::Predicate { ref name, .. } if name == "inField"));
    }

    #[test]
    fn detached_proc_spec_is_an_error() {
        let outcome = parse_source(&SourceFile::new(
            "test.mm",
            "(*@ requires true; ensures true; @*)\nx := 1;",
        ));
        assert!(outcome.diagnostics.iter().any(|d| d.code == "spec-detached"));
    }

    #[test]
    fn multi_assign_arity_mismatch() {
        let outcome = parse_source(&SourceFile::new("test.mm", "x, y := 1;"));
        assert!(!outcome.is_ok());
    }

    #[test]
    fn command_call_requires_call_shape() {
        let p = parse_ok("reset();");
        assert!(matches!(p.commands[0].kind, CommandKind::ExprCmd { .. }));
    }

    #[test]
    fn listing1_shape() {
        let src = r#"
status:=0;
prod := proc(l::list(Or(integer,float)))::[integer,float];
  global status;
  local i::integer, x::Or(integer,float), si::integer:=1, sf::float:=1.0;
  for i from 1 by 1 to nops(l) while (running) do
    x:=l[i];
    if type(x,integer) then
      if (x = 0) then
        return [si,sf];
      else
        si:=si*x;
      end if;
    elif type(x,float) then
      if (x < 0.5) then
        return [si,sf];
      else
        sf:=sf*x;
      end if;
    end if;
  end do;
  return [si,sf];
end proc;
"#;
        let p = parse_ok(src);
        assert_eq!(p.commands.len(), 2);
        match &p.commands[0].kind {
            CommandKind::Assign { targets, sources } => {
                assert_eq!(targets[0], "status");
                assert_eq!(sources[0].kind, ExprKind::Int(0.into()));
            }
            other => panic!("expected assignment, got {other:?}"),
        }
        match &p.commands[1].kind {
            CommandKind::Assign { sources, .. } => match &sources[0].kind {
                ExprKind::Proc(def) => {
                    assert_eq!(def.params.len(), 1);
                    assert_eq!(def.globals.len(), 1);
                    assert_eq!(def.locals.len(), 4);
                    assert_eq!(def.body.len(), 2);
                    match &def.body[0].kind {
                        CommandKind::Loop(lp) => {
                            assert_eq!(lp.var.as_deref(), Some("i"));
                            assert!(lp.from.is_some() && lp.by.is_some() && lp.to.is_some());
                            assert!(lp.while_cond.is_some());
                            assert_eq!(lp.body.len(), 2);
                        }
                        other => panic!("expected loop, got {other:?}"),
                    }
                }
                other => panic!("expected proc, got {other:?}"),
            },
            other => panic!("expected assignment, got {other:?}"),
        }
    }
}
