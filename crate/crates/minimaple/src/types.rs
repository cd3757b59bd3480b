//! The semantic type language and its subtype lattice.
//!
//! Union types are kept normalized: flat, deduplicated, canonically
//! ordered, at least two members, and never containing `anything`
//! (such a union collapses to `anything` itself). Normalization makes
//! structural equality decide type equality.

use std::fmt;

use crate::ast::Ident;

/// A semantic type. Variant order follows the surface grammar and
/// doubles as the canonical ordering of union members.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeTerm {
    Integer,
    Boolean,
    String,
    Float,
    Rational,
    Anything,
    Set(Box<TypeTerm>),
    List(Box<TypeTerm>),
    /// `[Tseq]` — a fixed-shape sequence; widens into `list(T)` when
    /// every field fits the element type.
    Record(Vec<TypeTerm>),
    Procedure { ret: Box<TypeTerm>, args: Vec<TypeTerm> },
    /// `I(Tseq)` — a tagged tuple, invariant in its name.
    Tagged { name: Ident, args: Vec<TypeTerm> },
    Union(Vec<TypeTerm>),
    Symbol,
    Void,
    Uneval,
    /// An unresolved reference to a user-defined type; eliminated by
    /// resolution and compared nominally if it ever survives.
    Named(Ident),
    /// A specification-only nominal type with no runtime values.
    Abstract(Ident),
}

impl TypeTerm {
    pub fn union_members(&self) -> Option<&[TypeTerm]> {
        match self {
            TypeTerm::Union(ms) => Some(ms),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        match self {
            TypeTerm::Integer | TypeTerm::Float | TypeTerm::Rational => true,
            TypeTerm::Union(ms) => ms.iter().all(|m| m.is_numeric()),
            _ => false,
        }
    }

    /// Render in the paper's surface syntax, e.g.
    /// `procedure[[integer,float]](list(Or(integer,float)))`.
    pub fn render(&self) -> String {
        match self {
            TypeTerm::Integer => "integer".into(),
            TypeTerm::Boolean => "boolean".into(),
            TypeTerm::String => "string".into(),
            TypeTerm::Float => "float".into(),
            TypeTerm::Rational => "rational".into(),
            TypeTerm::Anything => "anything".into(),
            TypeTerm::Symbol => "symbol".into(),
            TypeTerm::Void => "void".into(),
            TypeTerm::Uneval => "uneval".into(),
            TypeTerm::Set(t) => format!("{{{}}}", t.render()),
            TypeTerm::List(t) => format!("list({})", t.render()),
            TypeTerm::Record(ts) => {
                format!("[{}]", ts.iter().map(TypeTerm::render).collect::<Vec<_>>().join(","))
            }
            TypeTerm::Procedure { ret, args } => format!(
                "procedure[{}]({})",
                ret.render(),
                args.iter().map(TypeTerm::render).collect::<Vec<_>>().join(",")
            ),
            TypeTerm::Tagged { name, args } => {
                format!("{name}({})", args.iter().map(TypeTerm::render).collect::<Vec<_>>().join(","))
            }
            TypeTerm::Union(ms) => {
                format!("Or({})", ms.iter().map(TypeTerm::render).collect::<Vec<_>>().join(","))
            }
            TypeTerm::Named(n) | TypeTerm::Abstract(n) => n.clone(),
        }
    }
}

impl fmt::Display for TypeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Build the normalized union of already-normalized members.
pub fn union_of(members: Vec<TypeTerm>) -> TypeTerm {
    let mut flat = Vec::new();
    for m in members {
        match m {
            TypeTerm::Union(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    if flat.iter().any(|m| *m == TypeTerm::Anything) {
        return TypeTerm::Anything;
    }
    flat.sort();
    flat.dedup();
    match flat.len() {
        0 => panic!("empty union"),
        1 => flat.pop().unwrap(),
        _ => TypeTerm::Union(flat),
    }
}

/// Recursively normalize a term; idempotent.
pub fn normalize(t: TypeTerm) -> TypeTerm {
    match t {
        TypeTerm::Set(inner) => TypeTerm::Set(Box::new(normalize(*inner))),
        TypeTerm::List(inner) => TypeTerm::List(Box::new(normalize(*inner))),
        TypeTerm::Record(ts) => TypeTerm::Record(ts.into_iter().map(normalize).collect()),
        TypeTerm::Procedure { ret, args } => TypeTerm::Procedure {
            ret: Box::new(normalize(*ret)),
            args: args.into_iter().map(normalize).collect(),
        },
        TypeTerm::Tagged { name, args } => {
            TypeTerm::Tagged { name, args: args.into_iter().map(normalize).collect() }
        }
        TypeTerm::Union(ms) => union_of(ms.into_iter().map(normalize).collect()),
        leaf => leaf,
    }
}

/// Decide `a <= b` in the subtype lattice.
///
/// The lattice: the order is reflexive, `integer < rational`, every
/// type is below `anything`, unions are least upper bounds of their
/// members, sets and lists are covariant, records are pointwise
/// covariant at equal arity and widen into lists, and procedures are
/// contravariant in arguments and covariant in the result.
pub fn is_subtype(a: &TypeTerm, b: &TypeTerm) -> bool {
    if a == b {
        return true;
    }
    if *b == TypeTerm::Anything {
        return true;
    }
    match (a, b) {
        (TypeTerm::Union(ms), _) => ms.iter().all(|m| is_subtype(m, b)),
        (_, TypeTerm::Union(ms)) => ms.iter().any(|m| is_subtype(a, m)),
        (TypeTerm::Integer, TypeTerm::Rational) => true,
        (TypeTerm::Set(x), TypeTerm::Set(y)) => is_subtype(x, y),
        (TypeTerm::List(x), TypeTerm::List(y)) => is_subtype(x, y),
        (TypeTerm::Record(xs), TypeTerm::Record(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| is_subtype(x, y))
        }
        (TypeTerm::Record(xs), TypeTerm::List(y)) => xs.iter().all(|x| is_subtype(x, y)),
        (
            TypeTerm::Procedure { ret: r1, args: a1 },
            TypeTerm::Procedure { ret: r2, args: a2 },
        ) => {
            a1.len() == a2.len()
                && is_subtype(r1, r2)
                && a2.iter().zip(a1).all(|(x, y)| is_subtype(x, y))
        }
        (TypeTerm::Tagged { name: n1, args: a1 }, TypeTerm::Tagged { name: n2, args: a2 }) => {
            n1 == n2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| is_subtype(x, y))
        }
        _ => false,
    }
}

/// The join: the smaller of comparable types' upper sides, otherwise
/// their union.
pub fn super_type(a: &TypeTerm, b: &TypeTerm) -> TypeTerm {
    if is_subtype(a, b) {
        b.clone()
    } else if is_subtype(b, a) {
        a.clone()
    } else {
        union_of(vec![a.clone(), b.clone()])
    }
}

/// True iff `a` is a supertype of `b`.
pub fn super_type_pred(a: &TypeTerm, b: &TypeTerm) -> bool {
    is_subtype(b, a)
}

/// Remove the knowledge `tested` from `t` for else-branch narrowing.
///
/// Returns `None` when the test exhausts the type (the else branch is
/// unreachable). When `t` is a union and `tested` matches a structural
/// subset of its members, the remaining members are returned; in every
/// other case there is no refutation knowledge and `t` is unchanged.
pub fn subtract(t: &TypeTerm, tested: &TypeTerm) -> Option<TypeTerm> {
    if t == tested {
        return None;
    }
    if let TypeTerm::Union(ms) = t {
        let tested_members: Vec<&TypeTerm> = match tested {
            TypeTerm::Union(ts) => ts.iter().collect(),
            single => vec![single],
        };
        if tested_members.iter().all(|s| ms.contains(s)) {
            let remaining: Vec<TypeTerm> =
                ms.iter().filter(|m| !tested_members.contains(m)).cloned().collect();
            if remaining.is_empty() {
                return None;
            }
            return Some(union_of(remaining));
        }
    }
    Some(t.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int() -> TypeTerm {
        TypeTerm::Integer
    }
    fn float() -> TypeTerm {
        TypeTerm::Float
    }
    fn or_if() -> TypeTerm {
        union_of(vec![int(), float()])
    }

    #[test]
    fn union_normalization() {
        // Or(integer, Or(float, integer)) flattens and dedupes.
        let t = normalize(TypeTerm::Union(vec![
            int(),
            TypeTerm::Union(vec![float(), int()]),
        ]));
        assert_eq!(t, TypeTerm::Union(vec![int(), float()]));
        // Normalizing twice is the same as normalizing once.
        assert_eq!(normalize(t.clone()), t);
        // A union containing anything collapses.
        assert_eq!(union_of(vec![int(), TypeTerm::Anything]), TypeTerm::Anything);
        // A singleton union is the member itself.
        assert_eq!(union_of(vec![int(), int()]), int());
    }

    #[test]
    fn canonical_member_order_renders_like_the_surface() {
        assert_eq!(or_if().render(), "Or(integer,float)");
        assert_eq!(union_of(vec![float(), int()]).render(), "Or(integer,float)");
        let prod = TypeTerm::Procedure {
            ret: Box::new(TypeTerm::Record(vec![int(), float()])),
            args: vec![TypeTerm::List(Box::new(or_if()))],
        };
        assert_eq!(prod.render(), "procedure[[integer,float]](list(Or(integer,float)))");
    }

    #[test]
    fn subtype_basics() {
        assert!(is_subtype(&int(), &TypeTerm::Rational));
        assert!(!is_subtype(&TypeTerm::Rational, &int()));
        assert!(!is_subtype(&float(), &TypeTerm::Rational));
        for t in [int(), float(), TypeTerm::Symbol, or_if(), TypeTerm::Void] {
            assert!(is_subtype(&t, &t), "reflexivity for {t}");
            assert!(is_subtype(&t, &TypeTerm::Anything));
        }
        assert!(!is_subtype(&TypeTerm::Anything, &int()));
    }

    #[test]
    fn subtype_union_membership() {
        // Oracle: a <= Or(ms) iff a is below some member.
        let u = or_if();
        assert!(is_subtype(&int(), &u));
        assert!(is_subtype(&float(), &u));
        assert!(!is_subtype(&TypeTerm::String, &u));
        assert!(is_subtype(&u, &TypeTerm::Anything));
        assert!(is_subtype(&u, &union_of(vec![int(), float(), TypeTerm::String])));
        assert!(!is_subtype(&union_of(vec![int(), TypeTerm::String]), &u));
    }

    #[test]
    fn subtype_structural() {
        let li = TypeTerm::List(Box::new(int()));
        let lu = TypeTerm::List(Box::new(or_if()));
        assert!(is_subtype(&li, &lu));
        assert!(!is_subtype(&lu, &li));
        let rec = TypeTerm::Record(vec![int(), float()]);
        assert!(is_subtype(&rec, &TypeTerm::Record(vec![TypeTerm::Rational, float()])));
        assert!(!is_subtype(&rec, &TypeTerm::Record(vec![int()])));
        // Fixed-shape sequences widen into lists.
        assert!(is_subtype(&rec, &lu));
        assert!(!is_subtype(&rec, &li));
        assert!(is_subtype(&TypeTerm::Record(vec![]), &li));
        // Procedures: contravariant arguments, covariant result.
        let p1 = TypeTerm::Procedure { ret: Box::new(int()), args: vec![or_if()] };
        let p2 = TypeTerm::Procedure { ret: Box::new(TypeTerm::Rational), args: vec![int()] };
        assert!(is_subtype(&p1, &p2));
        assert!(!is_subtype(&p2, &p1));
        // Tagged tuples are invariant in the name.
        let t1 = TypeTerm::Tagged { name: "pair".into(), args: vec![int()] };
        let t2 = TypeTerm::Tagged { name: "pair".into(), args: vec![TypeTerm::Rational] };
        let t3 = TypeTerm::Tagged { name: "other".into(), args: vec![int()] };
        assert!(is_subtype(&t1, &t2));
        assert!(!is_subtype(&t1, &t3));
        // Abstract types relate only to themselves and anything.
        let a = TypeTerm::Abstract("DDO".into());
        assert!(is_subtype(&a, &a));
        assert!(is_subtype(&a, &TypeTerm::Anything));
        assert!(!is_subtype(&a, &TypeTerm::Abstract("Other".into())));
        // Void is below void and anything only.
        assert!(is_subtype(&TypeTerm::Void, &TypeTerm::Anything));
        assert!(!is_subtype(&TypeTerm::Void, &int()));
        assert!(!is_subtype(&int(), &TypeTerm::Void));
    }

    #[test]
    fn super_type_examples() {
        assert_eq!(super_type(&int(), &TypeTerm::Anything), TypeTerm::Anything);
        assert_eq!(super_type(&int(), &TypeTerm::Rational), TypeTerm::Rational);
        assert_eq!(super_type(&int(), &float()), or_if());
        assert_eq!(super_type(&or_if(), &int()), or_if());
        assert_eq!(super_type(&int(), &int()), int());
    }

    #[test]
    fn super_type_pred_examples() {
        for t in [int(), float(), or_if(), TypeTerm::Symbol] {
            assert!(super_type_pred(&TypeTerm::Anything, &t));
        }
        assert!(super_type_pred(&int(), &int()));
        assert!(super_type_pred(&or_if(), &int()));
        assert!(!super_type_pred(&int(), &or_if()));
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(subtract(&or_if(), &int()), Some(float()));
        assert_eq!(subtract(&int(), &int()), None);
        let u3 = union_of(vec![int(), float(), TypeTerm::String]);
        assert_eq!(subtract(&u3, &float()), Some(union_of(vec![int(), TypeTerm::String])));
        // Subtracting a union subset removes all of it.
        assert_eq!(subtract(&u3, &or_if()), Some(TypeTerm::String));
        // No refutation knowledge for non-members.
        assert_eq!(subtract(&int(), &float()), Some(int()));
        assert_eq!(subtract(&TypeTerm::Anything, &int()), Some(TypeTerm::Anything));
    }

    #[test]
    fn subtract_soundness_on_member_subsets() {
        // Members of subtract(t, s) plus members of s give back t.
        let u3 = union_of(vec![int(), float(), TypeTerm::String]);
        let rest = subtract(&u3, &or_if()).unwrap();
        assert_eq!(union_of(vec![rest, or_if()]), u3);
    }
}
