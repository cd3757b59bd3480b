//! Type environments and the environment algebra used by the typing
//! rules, plus the table of user-declared named and abstract types.

use indexmap::{IndexMap, IndexSet};

use crate::ast::{Ident, TypeExprAst, TypeExprKind};
use crate::diag::Diagnostic;
use crate::span::Span;
use crate::types::{is_subtype, normalize, super_type, super_type_pred, union_of, TypeTerm};

/// A partial map from identifiers to normalized types. Insertion order
/// is preserved; rebinding keeps the original position.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeEnvironment {
    bindings: IndexMap<Ident, TypeTerm>,
}

impl TypeEnvironment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&TypeTerm> {
        self.bindings.get(name)
    }

    pub fn bind(&mut self, name: impl Into<Ident>, ty: TypeTerm) {
        self.bindings.insert(name.into(), ty);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.bindings.contains_key(name)
    }

    /// Restore `name` to an earlier binding; `None` removes it.
    pub fn restore(&mut self, name: &str, previous: Option<TypeTerm>) {
        match previous {
            Some(ty) => {
                self.bindings.insert(name.to_string(), ty);
            }
            None => {
                self.bindings.shift_remove(name);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &TypeTerm)> {
        self.bindings.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Ident> {
        self.bindings.keys()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Keep only the identifiers bound in `other`.
    pub fn restricted_to(&self, other: &TypeEnvironment) -> TypeEnvironment {
        TypeEnvironment {
            bindings: self
                .bindings
                .iter()
                .filter(|(k, _)| other.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl<const N: usize> From<[(&str, TypeTerm); N]> for TypeEnvironment {
    fn from(pairs: [(&str, TypeTerm); N]) -> Self {
        let mut env = TypeEnvironment::new();
        for (name, ty) in pairs {
            env.bind(name, ty);
        }
        env
    }
}

/// True iff every identifier bound in both environments has comparable
/// types (one is a supertype of the other).
pub fn can_specialize(pi: &TypeEnvironment, pi2: &TypeEnvironment) -> bool {
    pi.iter().all(|(name, a)| match pi2.get(name) {
        Some(b) => super_type_pred(a, b) || super_type_pred(b, a),
        None => true,
    })
}

/// Specialize the bindings of `pi` with the (sharper) information of
/// `pi2`: common identifiers take the more specific of the two types,
/// identifiers only in `pi` keep their type.
pub fn specialize(pi: &TypeEnvironment, pi2: &TypeEnvironment) -> TypeEnvironment {
    let mut out = TypeEnvironment::new();
    for (name, a) in pi.iter() {
        let ty = match pi2.get(name) {
            Some(b) => {
                if is_subtype(b, a) {
                    b.clone()
                } else if is_subtype(a, b) {
                    a.clone()
                } else {
                    debug_assert!(false, "specialize on incomparable types for `{name}`");
                    a.clone()
                }
            }
            None => a.clone(),
        };
        out.bind(name.clone(), ty);
    }
    out
}

/// Combine two environments after a branch: common identifiers are
/// joined with `super_type`, identifiers bound in only one input are
/// kept as-is.
pub fn combine(pi1: &TypeEnvironment, pi2: &TypeEnvironment) -> TypeEnvironment {
    let mut out = TypeEnvironment::new();
    for (name, a) in pi1.iter() {
        let ty = match pi2.get(name) {
            Some(b) => super_type(a, b),
            None => a.clone(),
        };
        out.bind(name.clone(), ty);
    }
    for (name, b) in pi2.iter() {
        if !out.contains(name) {
            out.bind(name.clone(), b.clone());
        }
    }
    out
}

/// User-declared types: `` `type/I` := T; `` definitions and abstract
/// `` `type/I`; `` declarations. Definitions resolve eagerly, so the
/// stored terms never contain named references.
#[derive(Debug, Clone, Default)]
pub struct NamedTypeTable {
    named: IndexMap<Ident, TypeTerm>,
    abstracts: IndexSet<Ident>,
}

impl NamedTypeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define_named(&mut self, name: &str, ty: TypeTerm, span: Span) -> Result<(), Diagnostic> {
        if self.named.contains_key(name) || self.abstracts.contains(name) {
            return Err(Diagnostic::error(
                "duplicate-type",
                format!("type `{name}` is declared twice"),
                span,
            ));
        }
        self.named.insert(name.to_string(), ty);
        Ok(())
    }

    pub fn define_abstract(&mut self, name: &str, span: Span) -> Result<(), Diagnostic> {
        if self.named.contains_key(name) || self.abstracts.contains(name) {
            return Err(Diagnostic::error(
                "duplicate-type",
                format!("type `{name}` is declared twice"),
                span,
            ));
        }
        self.abstracts.insert(name.to_string());
        Ok(())
    }

    pub fn is_abstract(&self, name: &str) -> bool {
        self.abstracts.contains(name)
    }

    pub fn lookup(&self, name: &str) -> Option<&TypeTerm> {
        self.named.get(name)
    }

    /// Resolve a syntactic type to a normalized term. `defining` is the
    /// name currently being defined, so direct recursion is reported
    /// rather than looping.
    pub fn resolve(&self, ast: &TypeExprAst) -> Result<TypeTerm, Diagnostic> {
        self.resolve_inner(ast, None)
    }

    pub fn resolve_defining(
        &self,
        ast: &TypeExprAst,
        defining: &str,
    ) -> Result<TypeTerm, Diagnostic> {
        self.resolve_inner(ast, Some(defining))
    }

    fn resolve_inner(
        &self,
        ast: &TypeExprAst,
        defining: Option<&str>,
    ) -> Result<TypeTerm, Diagnostic> {
        let term = match &ast.kind {
            TypeExprKind::Integer => TypeTerm::Integer,
            TypeExprKind::Boolean => TypeTerm::Boolean,
            TypeExprKind::String => TypeTerm::String,
            TypeExprKind::Float => TypeTerm::Float,
            TypeExprKind::Rational => TypeTerm::Rational,
            TypeExprKind::Anything => TypeTerm::Anything,
            TypeExprKind::Symbol => TypeTerm::Symbol,
            TypeExprKind::Void => TypeTerm::Void,
            TypeExprKind::Uneval => TypeTerm::Uneval,
            TypeExprKind::Set(inner) => {
                TypeTerm::Set(Box::new(self.resolve_inner(inner, defining)?))
            }
            TypeExprKind::List(inner) => {
                TypeTerm::List(Box::new(self.resolve_inner(inner, defining)?))
            }
            TypeExprKind::Record(ts) => TypeTerm::Record(
                ts.iter().map(|t| self.resolve_inner(t, defining)).collect::<Result<_, _>>()?,
            ),
            TypeExprKind::Procedure { ret, args } => TypeTerm::Procedure {
                ret: Box::new(self.resolve_inner(ret, defining)?),
                args: args
                    .iter()
                    .map(|t| self.resolve_inner(t, defining))
                    .collect::<Result<_, _>>()?,
            },
            TypeExprKind::Or(ts) => union_of(
                ts.iter().map(|t| self.resolve_inner(t, defining)).collect::<Result<_, _>>()?,
            ),
            TypeExprKind::Tagged { name, args } => TypeTerm::Tagged {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|t| self.resolve_inner(t, defining))
                    .collect::<Result<_, _>>()?,
            },
            TypeExprKind::Named(name) => {
                if defining == Some(name.as_str()) {
                    return Err(Diagnostic::error(
                        "recursive-type",
                        format!("type `{name}` is defined in terms of itself"),
                        ast.span,
                    ));
                }
                if let Some(ty) = self.named.get(name) {
                    ty.clone()
                } else if self.abstracts.contains(name) {
                    TypeTerm::Abstract(name.clone())
                } else {
                    return Err(Diagnostic::error(
                        "unknown-type",
                        format!("unknown type name `{name}`"),
                        ast.span,
                    ));
                }
            }
        };
        Ok(normalize(term))
    }
}
