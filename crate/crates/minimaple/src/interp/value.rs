//! Runtime values and the numeric tower.
//!
//! Integers are arbitrary precision; rationals stay in lowest terms
//! and collapse to integers when the denominator is one; any float
//! operand contaminates arithmetic to binary64. Equality across
//! numeric kinds compares exact mathematical values (floats are exact
//! binary rationals).

use std::cmp::Ordering;
use std::rc::Rc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::ast::{BinOp, Expr};
use crate::pretty::{format_float, pretty_expr};
use crate::types::{is_subtype, TypeTerm};

use super::Closure;

#[derive(Debug, Clone)]
pub enum Value {
    Int(BigInt),
    Float(f64),
    Rational(BigRational),
    Bool(bool),
    Str(String),
    Symbol(String),
    List(Vec<Value>),
    Set(Vec<Value>),
    Proc(Rc<Closure>),
    Uneval(Rc<Expr>),
    Void,
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn render(&self) -> String {
        match self {
            Value::Int(n) => n.to_string(),
            Value::Float(x) => format_float(*x),
            Value::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => format!("\"{s}\""),
            Value::Symbol(s) => s.clone(),
            Value::List(items) => {
                format!("[{}]", items.iter().map(Value::render).collect::<Vec<_>>().join(", "))
            }
            Value::Set(items) => {
                format!("{{{}}}", items.iter().map(Value::render).collect::<Vec<_>>().join(", "))
            }
            Value::Proc(_) => "<procedure>".to_string(),
            Value::Uneval(e) => format!("'{}'", pretty_expr(e)),
            Value::Void => "NULL".to_string(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Float(_) => "float",
            Value::Rational(_) => "rational",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Symbol(_) => "symbol",
            Value::List(_) => "list",
            Value::Set(_) => "set",
            Value::Proc(_) => "procedure",
            Value::Uneval(_) => "uneval",
            Value::Void => "void",
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Float(_) | Value::Rational(_))
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Value::Int(_) => 0,
            Value::Rational(_) => 1,
            Value::Float(_) => 2,
            Value::Bool(_) => 3,
            Value::Str(_) => 4,
            Value::Symbol(_) => 5,
            Value::List(_) => 6,
            Value::Set(_) => 7,
            Value::Proc(_) => 8,
            Value::Uneval(_) => 9,
            Value::Void => 10,
        }
    }
}

/// A rational with denominator one is the integer itself.
fn collapse(r: BigRational) -> Value {
    if r.denom().is_one() {
        Value::Int(r.numer().clone())
    } else {
        Value::Rational(r)
    }
}

fn exact(v: &Value) -> Option<BigRational> {
    match v {
        Value::Int(n) => Some(BigRational::from_integer(n.clone())),
        Value::Rational(r) => Some(r.clone()),
        Value::Float(x) => BigRational::from_float(*x),
        _ => None,
    }
}

fn to_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Int(n) => n.to_f64(),
        Value::Rational(r) => r.to_f64(),
        Value::Float(x) => Some(*x),
        _ => None,
    }
}

/// Numeric comparison across kinds; exact when no float is involved
/// and exact against the float's binary value otherwise.
pub fn compare_numeric(a: &Value, b: &Value) -> Result<Ordering, String> {
    if !a.is_numeric() || !b.is_numeric() {
        return Err(format!("cannot compare {} and {}", a.kind_name(), b.kind_name()));
    }
    match (exact(a), exact(b)) {
        (Some(x), Some(y)) => Ok(x.cmp(&y)),
        _ => {
            // A non-finite float is involved.
            let (x, y) = (to_f64(a), to_f64(b));
            match (x, y) {
                (Some(x), Some(y)) => x
                    .partial_cmp(&y)
                    .ok_or_else(|| "comparison with an undefined float".to_string()),
                _ => Err("comparison with an undefined float".to_string()),
            }
        }
    }
}

/// Value equality: exact mathematical equality across numeric kinds,
/// structural equality elsewhere.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    if a.is_numeric() && b.is_numeric() {
        return compare_numeric(a, b).map(|o| o == Ordering::Equal).unwrap_or(false);
    }
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Symbol(x), Value::Symbol(y)) => x == y,
        (Value::List(xs), Value::List(ys)) | (Value::Set(xs), Value::Set(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| values_equal(x, y))
        }
        (Value::Proc(x), Value::Proc(y)) => Rc::ptr_eq(x, y),
        (Value::Uneval(x), Value::Uneval(y)) => pretty_expr(x) == pretty_expr(y),
        (Value::Void, Value::Void) => true,
        _ => false,
    }
}

/// A total order used only to canonicalize set elements.
pub fn canonical_cmp(a: &Value, b: &Value) -> Ordering {
    if a.is_numeric() && b.is_numeric() {
        if let Ok(ord) = compare_numeric(a, b) {
            return ord.then(a.kind_rank().cmp(&b.kind_rank()));
        }
    }
    a.kind_rank().cmp(&b.kind_rank()).then_with(|| match (a, b) {
        (Value::Float(x), Value::Float(y)) => x.total_cmp(y),
        (Value::Bool(x), Value::Bool(y)) => x.cmp(y),
        (Value::Str(x), Value::Str(y)) => x.cmp(y),
        (Value::Symbol(x), Value::Symbol(y)) => x.cmp(y),
        (Value::List(xs), Value::List(ys)) | (Value::Set(xs), Value::Set(ys)) => {
            for (x, y) in xs.iter().zip(ys) {
                let ord = canonical_cmp(x, y);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            xs.len().cmp(&ys.len())
        }
        (Value::Uneval(x), Value::Uneval(y)) => pretty_expr(x).cmp(&pretty_expr(y)),
        _ => Ordering::Equal,
    })
}

/// Canonicalize set contents: sorted, deduplicated by value equality.
pub fn make_set(mut items: Vec<Value>) -> Value {
    items.sort_by(canonical_cmp);
    items.dedup_by(|a, b| values_equal(a, b));
    Value::Set(items)
}

/// Arithmetic on the numeric tower. Integer operations are exact,
/// integer division yields a rational, and floats contaminate.
pub fn arith(op: BinOp, a: &Value, b: &Value) -> Result<Value, String> {
    if !a.is_numeric() || !b.is_numeric() {
        return Err(format!("arithmetic on non-numeric {} and {}", a.kind_name(), b.kind_name()));
    }
    let float_involved = matches!(a, Value::Float(_)) || matches!(b, Value::Float(_));
    if float_involved {
        let (x, y) = (
            to_f64(a).ok_or("undefined float operand")?,
            to_f64(b).ok_or("undefined float operand")?,
        );
        return match op {
            BinOp::Add => Ok(Value::Float(x + y)),
            BinOp::Sub => Ok(Value::Float(x - y)),
            BinOp::Mul => Ok(Value::Float(x * y)),
            BinOp::Div => {
                if y == 0.0 {
                    Err("division by zero".to_string())
                } else {
                    Ok(Value::Float(x / y))
                }
            }
            BinOp::Mod => Err("mod expects integer operands".to_string()),
            _ => unreachable!("non-arithmetic operator"),
        };
    }
    if op == BinOp::Mod {
        let (Value::Int(x), Value::Int(y)) = (a, b) else {
            return Err("mod expects integer operands".to_string());
        };
        if y.is_zero() {
            return Err("division by zero".to_string());
        }
        // Maple's modp: the remainder carries the divisor's sign away,
        // i.e. the result of `a mod b` for positive b is non-negative.
        let r = ((x % y) + y) % y;
        return Ok(Value::Int(r));
    }
    let x = exact(a).expect("numeric");
    let y = exact(b).expect("numeric");
    let r = match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div => {
            if y.is_zero() {
                return Err("division by zero".to_string());
            }
            x / y
        }
        _ => unreachable!("non-arithmetic operator"),
    };
    Ok(collapse(r))
}

pub fn negate(v: &Value) -> Result<Value, String> {
    match v {
        Value::Int(n) => Ok(Value::Int(-n)),
        Value::Float(x) => Ok(Value::Float(-x)),
        Value::Rational(r) => Ok(Value::Rational(-r.clone())),
        other => Err(format!("cannot negate a {}", other.kind_name())),
    }
}

/// Runtime membership of a value in a (resolved) type: the dynamic
/// counterpart of the subtype relation over a value's most specific
/// type, handled structurally so empty collections behave.
pub fn value_member(v: &Value, ty: &TypeTerm) -> bool {
    match ty {
        TypeTerm::Anything => true,
        TypeTerm::Integer => matches!(v, Value::Int(_)),
        TypeTerm::Boolean => matches!(v, Value::Bool(_)),
        TypeTerm::String => matches!(v, Value::Str(_)),
        TypeTerm::Float => matches!(v, Value::Float(_)),
        // integer < rational: every integer is a rational value.
        TypeTerm::Rational => matches!(v, Value::Int(_) | Value::Rational(_)),
        TypeTerm::Symbol => matches!(v, Value::Symbol(_)),
        TypeTerm::Void => matches!(v, Value::Void),
        TypeTerm::Uneval => matches!(v, Value::Uneval(_)),
        TypeTerm::Set(elem) => match v {
            Value::Set(items) => items.iter().all(|item| value_member(item, elem)),
            _ => false,
        },
        TypeTerm::List(elem) => match v {
            Value::List(items) => items.iter().all(|item| value_member(item, elem)),
            _ => false,
        },
        TypeTerm::Record(fields) => match v {
            Value::List(items) => {
                items.len() == fields.len()
                    && items.iter().zip(fields).all(|(item, f)| value_member(item, f))
            }
            _ => false,
        },
        TypeTerm::Procedure { .. } => match v {
            Value::Proc(closure) => is_subtype(&closure.signature(), ty),
            _ => false,
        },
        TypeTerm::Union(ms) => ms.iter().any(|m| value_member(v, m)),
        // Tagged tuples and abstract types have no runtime values, and
        // named references are resolved before reaching this point.
        TypeTerm::Tagged { .. } | TypeTerm::Named(_) | TypeTerm::Abstract(_) => false,
    }
}

pub fn as_positive_count(v: &Value) -> Option<BigInt> {
    match v {
        Value::Int(n) if !n.is_negative() => Some(n.clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Value {
        collapse(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        // 1/2 + 1/3 = 5/6
        let half = arith(BinOp::Div, &Value::int(1), &Value::int(2)).unwrap();
        let third = arith(BinOp::Div, &Value::int(1), &Value::int(3)).unwrap();
        let sum = arith(BinOp::Add, &half, &third).unwrap();
        assert!(values_equal(&sum, &rat(5, 6)));
        // 4/2 collapses to the integer 2.
        let two = arith(BinOp::Div, &Value::int(4), &Value::int(2)).unwrap();
        assert!(matches!(two, Value::Int(_)));
        assert!(values_equal(&two, &Value::int(2)));
    }

    #[test]
    fn floats_contaminate() {
        let v = arith(BinOp::Mul, &Value::int(2), &Value::Float(1.5)).unwrap();
        assert!(matches!(v, Value::Float(x) if x == 3.0));
        let v = arith(BinOp::Add, &rat(1, 2), &Value::Float(0.25)).unwrap();
        assert!(matches!(v, Value::Float(x) if x == 0.75));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(arith(BinOp::Div, &Value::int(1), &Value::int(0)).is_err());
        assert!(arith(BinOp::Div, &Value::Float(1.0), &Value::Float(0.0)).is_err());
    }

    #[test]
    fn modp_is_non_negative_for_positive_divisors() {
        let v = arith(BinOp::Mod, &Value::int(-7), &Value::int(3)).unwrap();
        assert!(values_equal(&v, &Value::int(2)));
    }

    #[test]
    fn numeric_equality_spans_kinds() {
        assert!(values_equal(&Value::int(1), &Value::Float(1.0)));
        assert!(values_equal(&rat(3, 1), &Value::int(3)));
        assert!(!values_equal(&Value::int(1), &Value::Float(1.5)));
        assert!(!values_equal(&Value::int(1), &Value::Str("1".into())));
    }

    #[test]
    fn set_canonicalization() {
        let s = make_set(vec![Value::int(3), Value::int(1), Value::int(3), Value::int(2)]);
        match &s {
            Value::Set(items) => {
                let rendered: Vec<String> = items.iter().map(Value::render).collect();
                assert_eq!(rendered, vec!["1", "2", "3"]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn membership_examples() {
        use crate::types::union_of;
        let or_if = union_of(vec![TypeTerm::Integer, TypeTerm::Float]);
        assert!(value_member(&Value::Float(8.54), &TypeTerm::Float));
        assert!(value_member(&Value::int(3), &TypeTerm::Rational));
        assert!(!value_member(&rat(1, 2), &TypeTerm::Integer));
        assert!(value_member(&Value::int(3), &or_if));
        let l = Value::List(vec![Value::int(1), Value::Float(2.0)]);
        assert!(value_member(&l, &TypeTerm::List(Box::new(or_if.clone()))));
        assert!(!value_member(&l, &TypeTerm::List(Box::new(TypeTerm::Integer))));
        assert!(value_member(&l, &TypeTerm::Record(vec![TypeTerm::Integer, TypeTerm::Float])));
        // The empty list inhabits every list type.
        assert!(value_member(&Value::List(vec![]), &TypeTerm::List(Box::new(TypeTerm::Integer))));
    }
}
