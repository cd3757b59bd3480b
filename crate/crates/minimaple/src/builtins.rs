//! Built-in procedures known to the checker and the interpreter.
//!
//! Builtins are looked up only when an identifier is not bound in the
//! environment, so they never appear in environment dumps.

use crate::types::TypeTerm;

/// Static signature of a builtin, if `name` is one.
pub fn builtin_signature(name: &str) -> Option<TypeTerm> {
    match name {
        // Number of operands of a list, set or bracketed sequence.
        "nops" => Some(TypeTerm::Procedure {
            ret: Box::new(TypeTerm::Integer),
            args: vec![TypeTerm::Anything],
        }),
        _ => None,
    }
}

pub fn is_builtin(name: &str) -> bool {
    builtin_signature(name).is_some()
}
