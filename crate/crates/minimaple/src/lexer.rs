//! Hand-written lexer for MiniMaple.
//!
//! `# ...` comments are discarded. `(*@ ... @*)` specification comments
//! are lexed recursively and emitted as a single token carrying the
//! inner stream.

use num::BigInt;
use thiserror::Error;

use crate::span::Span;
use crate::token::{Kw, Token, TokenKind};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LexError {
    #[error("illegal character `{ch}`")]
    IllegalChar { ch: char, span: Span },
    #[error("unterminated string literal")]
    UnterminatedString { span: Span },
    #[error("unterminated name quote")]
    UnterminatedBacktick { span: Span },
    #[error("unterminated specification comment")]
    UnterminatedSpecComment { span: Span },
}

impl LexError {
    pub fn span(&self) -> Span {
        match self {
            LexError::IllegalChar { span, .. }
            | LexError::UnterminatedString { span }
            | LexError::UnterminatedBacktick { span }
            | LexError::UnterminatedSpecComment { span } => *span,
        }
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer::new(source);
    lexer.run(false)
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl Lexer {
    fn new(source: &str) -> Self {
        Lexer { chars: source.chars().collect(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.peek()?;
        self.pos += 1;
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(ch)
    }

    fn here(&self, len: u32) -> Span {
        Span::new(self.line, self.col, len)
    }

    /// Lex until end of input, or until `@*)` when `in_spec` is set.
    fn run(&mut self, in_spec: bool) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        loop {
            self.skip_trivia();
            let Some(ch) = self.peek() else {
                if in_spec {
                    return Err(LexError::UnterminatedSpecComment { span: self.here(0) });
                }
                tokens.push(Token { kind: TokenKind::Eof, span: self.here(0) });
                return Ok(tokens);
            };
            if in_spec && ch == '@' && self.peek_at(1) == Some('*') && self.peek_at(2) == Some(')') {
                self.bump();
                self.bump();
                self.bump();
                return Ok(tokens);
            }
            if ch == '(' && self.peek_at(1) == Some('*') && self.peek_at(2) == Some('@') {
                let span = self.here(3);
                self.bump();
                self.bump();
                self.bump();
                let inner = self.run(true)?;
                tokens.push(Token { kind: TokenKind::SpecComment(inner), span });
                continue;
            }
            tokens.push(self.next_token()?);
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(ch) = self.peek() {
            if ch.is_whitespace() {
                self.bump();
            } else if ch == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        let start = self.here(0);
        let ch = self.peek().expect("next_token called at end of input");

        if ch.is_ascii_digit() {
            return Ok(self.lex_number(start));
        }
        if ch.is_alphabetic() || ch == '_' {
            return Ok(self.lex_word(start));
        }
        if ch == '"' {
            return self.lex_string(start);
        }
        if ch == '`' {
            return self.lex_backtick(start);
        }

        self.bump();
        let two = |k: TokenKind| k;
        let kind = match ch {
            ':' => match self.peek() {
                Some('=') => {
                    self.bump();
                    two(TokenKind::Assign)
                }
                Some(':') => {
                    self.bump();
                    two(TokenKind::DoubleColon)
                }
                _ => return Err(LexError::IllegalChar { ch, span: start }),
            },
            '.' => match self.peek() {
                Some('.') => {
                    self.bump();
                    two(TokenKind::DotDot)
                }
                _ => return Err(LexError::IllegalChar { ch, span: start }),
            },
            '<' => match self.peek() {
                Some('>') => {
                    self.bump();
                    two(TokenKind::Neq)
                }
                Some('=') => {
                    self.bump();
                    two(TokenKind::Le)
                }
                _ => TokenKind::Lt,
            },
            '>' => match self.peek() {
                Some('=') => {
                    self.bump();
                    two(TokenKind::Ge)
                }
                _ => TokenKind::Gt,
            },
            '=' => TokenKind::Eq,
            ';' => TokenKind::Semi,
            ',' => TokenKind::Comma,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '\'' => TokenKind::Quote,
            _ => return Err(LexError::IllegalChar { ch, span: start }),
        };
        let len = match kind {
            TokenKind::Assign
            | TokenKind::DoubleColon
            | TokenKind::DotDot
            | TokenKind::Neq
            | TokenKind::Le
            | TokenKind::Ge => 2,
            _ => 1,
        };
        Ok(Token { kind, span: Span::new(start.line, start.col, len) })
    }

    fn lex_number(&mut self, start: Span) -> Token {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // `1.5` is a float but `1..n` keeps `..` as a range token.
        let is_float = self.peek() == Some('.')
            && self.peek_at(1).map(|c| c.is_ascii_digit()).unwrap_or(false);
        if is_float {
            text.push('.');
            self.bump();
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            let value: f64 = text.parse().expect("lexed float should parse");
            Token {
                kind: TokenKind::Float(value),
                span: Span::new(start.line, start.col, text.chars().count() as u32),
            }
        } else {
            let value = BigInt::parse_bytes(text.as_bytes(), 10).expect("lexed digits");
            Token {
                kind: TokenKind::Int(value),
                span: Span::new(start.line, start.col, text.chars().count() as u32),
            }
        }
    }

    fn lex_word(&mut self, start: Span) -> Token {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let len = text.chars().count() as u32;
        let kind = match Kw::lookup(&text) {
            Some(kw) => TokenKind::Kw(kw),
            None => TokenKind::Ident(text),
        };
        Token { kind, span: Span::new(start.line, start.col, len) }
    }

    fn lex_string(&mut self, start: Span) -> Result<Token, LexError> {
        self.bump(); // opening quote
        let mut text = String::new();
        let mut len = 2u32;
        loop {
            match self.peek() {
                None | Some('\n') => return Err(LexError::UnterminatedString { span: start }),
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    self.bump();
                    len += 1;
                    match self.peek() {
                        Some('"') => text.push('"'),
                        Some('\\') => text.push('\\'),
                        Some('n') => text.push('\n'),
                        Some(c) => {
                            text.push('\\');
                            text.push(c);
                        }
                        None => return Err(LexError::UnterminatedString { span: start }),
                    }
                    self.bump();
                    len += 1;
                }
                Some(c) => {
                    text.push(c);
                    self.bump();
                    len += 1;
                }
            }
        }
        Ok(Token { kind: TokenKind::Str(text), span: Span::new(start.line, start.col, len) })
    }

    fn lex_backtick(&mut self, start: Span) -> Result<Token, LexError> {
        self.bump(); // opening backtick
        let mut text = String::new();
        let mut len = 2u32;
        loop {
            match self.peek() {
                None | Some('\n') => return Err(LexError::UnterminatedBacktick { span: start }),
                Some('`') => {
                    self.bump();
                    break;
                }
                Some(c) => {
                    text.push(c);
                    self.bump();
                    len += 1;
                }
            }
        }
        Ok(Token { kind: TokenKind::Backtick(text), span: Span::new(start.line, start.col, len) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn minimal_assignment() {
        assert_eq!(
            kinds("x := 1;"),
            vec![
                TokenKind::Ident("x".into()),
                TokenKind::Assign,
                TokenKind::Int(1.into()),
                TokenKind::Semi,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn type_annotation_tokens() {
        assert_eq!(
            kinds("l::list(Or(integer,float))"),
            vec![
                TokenKind::Ident("l".into()),
                TokenKind::DoubleColon,
                TokenKind::Kw(Kw::List),
                TokenKind::LParen,
                TokenKind::Kw(Kw::OrTy),
                TokenKind::LParen,
                TokenKind::Kw(Kw::Integer),
                TokenKind::Comma,
                TokenKind::Kw(Kw::Float),
                TokenKind::RParen,
                TokenKind::RParen,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn spec_comment_substream() {
        let toks = tokenize("(*@ requires true; @*)").unwrap();
        match &toks[0].kind {
            TokenKind::SpecComment(inner) => {
                let inner: Vec<_> = inner.iter().map(|t| t.kind.clone()).collect();
                assert_eq!(
                    inner,
                    vec![TokenKind::Kw(Kw::Requires), TokenKind::Kw(Kw::True), TokenKind::Semi]
                );
            }
            other => panic!("expected spec comment, got {other:?}"),
        }
    }

    #[test]
    fn range_does_not_eat_float_dot() {
        assert_eq!(
            kinds("1..n"),
            vec![
                TokenKind::Int(1.into()),
                TokenKind::DotDot,
                TokenKind::Ident("n".into()),
                TokenKind::Eof,
            ]
        );
        assert_eq!(kinds("8.54"), vec![TokenKind::Float(8.54), TokenKind::Eof]);
    }

    #[test]
    fn hash_comments_are_dropped() {
        assert_eq!(
            kinds("x # trailing comment\n:= 2;"),
            vec![
                TokenKind::Ident("x".into()),
                TokenKind::Assign,
                TokenKind::Int(2.into()),
                TokenKind::Semi,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn errors_carry_spans() {
        let err = tokenize("x := \"oops").unwrap_err();
        assert_eq!(err.span().line, 1);
        let err = tokenize("(*@ requires true;").unwrap_err();
        assert!(matches!(err, LexError::UnterminatedSpecComment { .. }));
        let err = tokenize("x : 1").unwrap_err();
        assert!(matches!(err, LexError::IllegalChar { ch: ':', .. }));
    }
}
