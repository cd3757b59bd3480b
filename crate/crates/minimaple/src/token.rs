//! Tokens of the MiniMaple surface language.
//!
//! Specification annotations travel through the lexer as
//! [`TokenKind::SpecComment`] tokens carrying their own sub-stream, so
//! the parser can attach them to the following syntactic position.

use std::fmt;

use num::BigInt;

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kw {
    // command layer
    Proc,
    End,
    If,
    Then,
    Elif,
    Else,
    For,
    From,
    By,
    To,
    While,
    Do,
    Return,
    Global,
    Local,
    Error,
    Assert,
    // operators
    And,
    Or,
    Not,
    Mod,
    Type,
    True,
    False,
    // specification layer
    Requires,
    Ensures,
    Exception,
    Invariant,
    Decreases,
    Define,
    Assume,
    Implies,
    Equivalent,
    Forall,
    Exists,
    Add,
    Mul,
    Min,
    Max,
    Seq,
    In,
    Result,
    Old,
    // type names
    Integer,
    Boolean,
    StringTy,
    Float,
    Rational,
    Anything,
    Symbol,
    Void,
    Uneval,
    List,
    Procedure,
    OrTy,
}

impl Kw {
    pub fn as_str(self) -> &'static str {
        match self {
            Kw::Proc => "proc",
            Kw::End => "end",
            Kw::If => "if",
            Kw::Then => "then",
            Kw::Elif => "elif",
            Kw::Else => "else",
            Kw::For => "for",
            Kw::From => "from",
            Kw::By => "by",
            Kw::To => "to",
            Kw::While => "while",
            Kw::Do => "do",
            Kw::Return => "return",
            Kw::Global => "global",
            Kw::Local => "local",
            Kw::Error => "error",
            Kw::Assert => "ASSERT",
            Kw::And => "and",
            Kw::Or => "or",
            Kw::Not => "not",
            Kw::Mod => "mod",
            Kw::Type => "type",
            Kw::True => "true",
            Kw::False => "false",
            Kw::Requires => "requires",
            Kw::Ensures => "ensures",
            Kw::Exception => "exception",
            Kw::Invariant => "invariant",
            Kw::Decreases => "decreases",
            Kw::Define => "define",
            Kw::Assume => "assume",
            Kw::Implies => "implies",
            Kw::Equivalent => "equivalent",
            Kw::Forall => "forall",
            Kw::Exists => "exists",
            Kw::Add => "add",
            Kw::Mul => "mul",
            Kw::Min => "min",
            Kw::Max => "max",
            Kw::Seq => "seq",
            Kw::In => "in",
            Kw::Result => "RESULT",
            Kw::Old => "OLD",
            Kw::Integer => "integer",
            Kw::Boolean => "boolean",
            Kw::StringTy => "string",
            Kw::Float => "float",
            Kw::Rational => "rational",
            Kw::Anything => "anything",
            Kw::Symbol => "symbol",
            Kw::Void => "void",
            Kw::Uneval => "uneval",
            Kw::List => "list",
            Kw::Procedure => "procedure",
            Kw::OrTy => "Or",
        }
    }

    pub fn lookup(word: &str) -> Option<Kw> {
        const ALL: &[Kw] = &[
            Kw::Proc,
            Kw::End,
            Kw::If,
            Kw::Then,
            Kw::Elif,
            Kw::Else,
            Kw::For,
            Kw::From,
            Kw::By,
            Kw::To,
            Kw::While,
            Kw::Do,
            Kw::Return,
            Kw::Global,
            Kw::Local,
            Kw::Error,
            Kw::Assert,
            Kw::And,
            Kw::Or,
            Kw::Not,
            Kw::Mod,
            Kw::Type,
            Kw::True,
            Kw::False,
            Kw::Requires,
            Kw::Ensures,
            Kw::Exception,
            Kw::Invariant,
            Kw::Decreases,
            Kw::Define,
            Kw::Assume,
            Kw::Implies,
            Kw::Equivalent,
            Kw::Forall,
            Kw::Exists,
            Kw::Add,
            Kw::Mul,
            Kw::Min,
            Kw::Max,
            Kw::Seq,
            Kw::In,
            Kw::Result,
            Kw::Old,
            Kw::Integer,
            Kw::Boolean,
            Kw::StringTy,
            Kw::Float,
            Kw::Rational,
            Kw::Anything,
            Kw::Symbol,
            Kw::Void,
            Kw::Uneval,
            Kw::List,
            Kw::Procedure,
            Kw::OrTy,
        ];
        ALL.iter().copied().find(|k| k.as_str() == word)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// A backtick-quoted name such as `` `type/ListInt` ``.
    Backtick(String),
    Int(BigInt),
    Float(f64),
    Str(String),
    Kw(Kw),
    /// The token stream found between `(*@` and `@*)`.
    SpecComment(Vec<Token>),
    Assign,      // :=
    DoubleColon, // ::
    DotDot,      // ..
    Semi,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Eq,
    Neq, // <>
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Quote, // ' (uneval quote)
    Eof,
}

impl TokenKind {
    /// Short human-readable description used in error messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Backtick(s) => format!("name `{s}`"),
            TokenKind::Int(n) => format!("integer `{n}`"),
            TokenKind::Float(x) => format!("float `{x}`"),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::Kw(k) => format!("`{}`", k.as_str()),
            TokenKind::SpecComment(_) => "specification comment".to_string(),
            TokenKind::Assign => "`:=`".to_string(),
            TokenKind::DoubleColon => "`::`".to_string(),
            TokenKind::DotDot => "`..`".to_string(),
            TokenKind::Semi => "`;`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::LBracket => "`[`".to_string(),
            TokenKind::RBracket => "`]`".to_string(),
            TokenKind::LBrace => "`{`".to_string(),
            TokenKind::RBrace => "`}`".to_string(),
            TokenKind::Eq => "`=`".to_string(),
            TokenKind::Neq => "`<>`".to_string(),
            TokenKind::Lt => "`<`".to_string(),
            TokenKind::Le => "`<=`".to_string(),
            TokenKind::Gt => "`>`".to_string(),
            TokenKind::Ge => "`>=`".to_string(),
            TokenKind::Plus => "`+`".to_string(),
            TokenKind::Minus => "`-`".to_string(),
            TokenKind::Star => "`*`".to_string(),
            TokenKind::Slash => "`/`".to_string(),
            TokenKind::Quote => "`'`".to_string(),
            TokenKind::Eof => "end of file".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.describe())
    }
}
