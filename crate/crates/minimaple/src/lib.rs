//! MiniMaple — a statically checkable subset of the Maple language.
//!
//! The crate provides the full front-to-back toolchain: lexer and
//! parser for programs with embedded specification comments, a
//! flow-sensitive type checker with union types and type-test
//! narrowing, well-typedness checking for the specification language,
//! and a reference interpreter with runtime contract checking.

pub mod ast;
pub mod builtins;
pub mod check;
pub mod diag;
pub mod env;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod report;
pub mod span;
pub mod token;
pub mod types;
