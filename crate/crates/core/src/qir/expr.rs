//! Classical expression language: integer/boolean/float arithmetic with
//! comparisons, bit operations, and shifts — enough for loop bounds, qubit
//! index arithmetic, rotation angles, and measurement-driven conditions.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Bool(_) => "bool",
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Float(v) => Some(*v),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Shl,
    Shr,
    BitAnd,
    BitOr,
    BitXor,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        Some(match s {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            "<<" => BinOp::Shl,
            ">>" => BinOp::Shr,
            "&" => BinOp::BitAnd,
            "|" => BinOp::BitOr,
            "^" => BinOp::BitXor,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "&&" => BinOp::And,
            "||" => BinOp::Or,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Float(f64),
    Bool(bool),
    /// The constant pi, kept symbolic so serialization is exact.
    Pi,
    Var(String),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    /// Explicit int-to-float conversion.
    AsFloat(Box<Expr>),
    /// Index of the most significant set bit; -1 for values <= 0.
    Msb(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.into())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }
}

/// Errors raised while evaluating a classical expression. These surface as
/// runtime faults of the executing program.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    UndefinedVar(String),
    TypeMismatch { op: String, got: String },
    DivideByZero,
    BadShift(i64),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UndefinedVar(v) => write!(f, "undefined variable `{v}`"),
            EvalError::TypeMismatch { op, got } => {
                write!(f, "operator `{op}` not applicable to {got}")
            }
            EvalError::DivideByZero => write!(f, "division by zero"),
            EvalError::BadShift(s) => write!(f, "shift amount {s} out of range"),
        }
    }
}

pub type Env = BTreeMap<String, Value>;

fn int_pair(op: BinOp, a: Value, b: Value) -> Result<(i64, i64), EvalError> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Ok((x, y)),
        _ => Err(EvalError::TypeMismatch {
            op: op.symbol().into(),
            got: alloc::format!("{}/{}", a.type_name(), b.type_name()),
        }),
    }
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<Value, EvalError> {
        match self {
            Expr::Int(v) => Ok(Value::Int(*v)),
            Expr::Float(v) => Ok(Value::Float(*v)),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Pi => Ok(Value::Float(core::f64::consts::PI)),
            Expr::Var(name) => env
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UndefinedVar(name.clone())),
            Expr::Not(e) => match e.eval(env)? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                v => Err(EvalError::TypeMismatch {
                    op: "!".into(),
                    got: v.type_name().into(),
                }),
            },
            Expr::Neg(e) => match e.eval(env)? {
                Value::Int(v) => Ok(Value::Int(v.wrapping_neg())),
                Value::Float(v) => Ok(Value::Float(-v)),
                v => Err(EvalError::TypeMismatch {
                    op: "neg".into(),
                    got: v.type_name().into(),
                }),
            },
            Expr::AsFloat(e) => match e.eval(env)? {
                Value::Int(v) => Ok(Value::Float(v as f64)),
                Value::Float(v) => Ok(Value::Float(v)),
                v => Err(EvalError::TypeMismatch {
                    op: "float".into(),
                    got: v.type_name().into(),
                }),
            },
            Expr::Msb(e) => match e.eval(env)? {
                Value::Int(v) => Ok(Value::Int(if v > 0 {
                    63 - v.leading_zeros() as i64
                } else {
                    -1
                })),
                v => Err(EvalError::TypeMismatch {
                    op: "msb".into(),
                    got: v.type_name().into(),
                }),
            },
            Expr::Bin(op, a, b) => {
                let va = a.eval(env)?;
                let vb = b.eval(env)?;
                eval_bin(*op, va, vb)
            }
        }
    }
}

fn eval_bin(op: BinOp, a: Value, b: Value) -> Result<Value, EvalError> {
    use BinOp::*;
    match op {
        Add | Sub | Mul | Div | Rem => match (a, b) {
            (Value::Int(x), Value::Int(y)) => {
                let v = match op {
                    Add => x.wrapping_add(y),
                    Sub => x.wrapping_sub(y),
                    Mul => x.wrapping_mul(y),
                    Div => {
                        if y == 0 {
                            return Err(EvalError::DivideByZero);
                        }
                        x.wrapping_div(y)
                    }
                    Rem => {
                        if y == 0 {
                            return Err(EvalError::DivideByZero);
                        }
                        x.wrapping_rem(y)
                    }
                    _ => unreachable!(),
                };
                Ok(Value::Int(v))
            }
            _ => {
                // Mixed numeric arithmetic promotes to float.
                let (x, y) = match (a.as_f64(), b.as_f64()) {
                    (Some(x), Some(y)) => (x, y),
                    _ => {
                        return Err(EvalError::TypeMismatch {
                            op: op.symbol().into(),
                            got: alloc::format!("{}/{}", a.type_name(), b.type_name()),
                        })
                    }
                };
                let v = match op {
                    Add => x + y,
                    Sub => x - y,
                    Mul => x * y,
                    Div => x / y,
                    Rem => {
                        if y == 0.0 {
                            return Err(EvalError::DivideByZero);
                        }
                        x % y
                    }
                    _ => unreachable!(),
                };
                Ok(Value::Float(v))
            }
        },
        Shl | Shr | BitAnd | BitOr | BitXor => {
            let (x, y) = int_pair(op, a, b)?;
            let v = match op {
                Shl | Shr => {
                    if !(0..=62).contains(&y) {
                        return Err(EvalError::BadShift(y));
                    }
                    if op == Shl {
                        x.wrapping_shl(y as u32)
                    } else {
                        x.wrapping_shr(y as u32)
                    }
                }
                BitAnd => x & y,
                BitOr => x | y,
                BitXor => x ^ y,
                _ => unreachable!(),
            };
            Ok(Value::Int(v))
        }
        Eq | Ne => {
            let same = match (a, b) {
                (Value::Int(x), Value::Int(y)) => x == y,
                (Value::Bool(x), Value::Bool(y)) => x == y,
                (x, y) => match (x.as_f64(), y.as_f64()) {
                    (Some(x), Some(y)) => x == y,
                    _ => {
                        return Err(EvalError::TypeMismatch {
                            op: op.symbol().into(),
                            got: alloc::format!("{}/{}", a.type_name(), b.type_name()),
                        })
                    }
                },
            };
            Ok(Value::Bool(if op == Eq { same } else { !same }))
        }
        Lt | Le | Gt | Ge => {
            let (x, y) = match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => (x, y),
                _ => {
                    return Err(EvalError::TypeMismatch {
                        op: op.symbol().into(),
                        got: alloc::format!("{}/{}", a.type_name(), b.type_name()),
                    })
                }
            };
            Ok(Value::Bool(match op {
                Lt => x < y,
                Le => x <= y,
                Gt => x > y,
                Ge => x >= y,
                _ => unreachable!(),
            }))
        }
        And | Or => match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => {
                Ok(Value::Bool(if op == And { x && y } else { x || y }))
            }
            _ => Err(EvalError::TypeMismatch {
                op: op.symbol().into(),
                got: alloc::format!("{}/{}", a.type_name(), b.type_name()),
            }),
        },
    }
}

/// Static expression types used by the well-formedness checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Int,
    Float,
    Bool,
}

impl Ty {
    pub fn name(&self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Float => "float",
            Ty::Bool => "bool",
        }
    }
}

/// Infer the type of `expr` given variable types; errors mirror `EvalError`
/// but are raised statically.
pub fn infer_type(expr: &Expr, vars: &BTreeMap<String, Ty>) -> Result<Ty, String> {
    use BinOp::*;
    match expr {
        Expr::Int(_) => Ok(Ty::Int),
        Expr::Float(_) | Expr::Pi => Ok(Ty::Float),
        Expr::Bool(_) => Ok(Ty::Bool),
        Expr::Var(v) => vars
            .get(v)
            .copied()
            .ok_or_else(|| alloc::format!("undefined variable `{v}`")),
        Expr::Not(e) => match infer_type(e, vars)? {
            Ty::Bool => Ok(Ty::Bool),
            t => Err(alloc::format!("`!` applied to {}", t.name())),
        },
        Expr::Neg(e) => match infer_type(e, vars)? {
            Ty::Bool => Err("`neg` applied to bool".into()),
            t => Ok(t),
        },
        Expr::AsFloat(e) => match infer_type(e, vars)? {
            Ty::Bool => Err("`float` applied to bool".into()),
            _ => Ok(Ty::Float),
        },
        Expr::Msb(e) => match infer_type(e, vars)? {
            Ty::Int => Ok(Ty::Int),
            t => Err(alloc::format!("`msb` applied to {}", t.name())),
        },
        Expr::Bin(op, a, b) => {
            let ta = infer_type(a, vars)?;
            let tb = infer_type(b, vars)?;
            match op {
                Add | Sub | Mul | Div | Rem => match (ta, tb) {
                    (Ty::Int, Ty::Int) => Ok(Ty::Int),
                    (Ty::Bool, _) | (_, Ty::Bool) => {
                        Err(alloc::format!("arithmetic `{}` on bool", op.symbol()))
                    }
                    _ => Ok(Ty::Float),
                },
                Shl | Shr | BitAnd | BitOr | BitXor => match (ta, tb) {
                    (Ty::Int, Ty::Int) => Ok(Ty::Int),
                    _ => Err(alloc::format!(
                        "bit operator `{}` needs int operands",
                        op.symbol()
                    )),
                },
                Eq | Ne => {
                    let ok = matches!(
                        (ta, tb),
                        (Ty::Bool, Ty::Bool) | (Ty::Int | Ty::Float, Ty::Int | Ty::Float)
                    );
                    if ok {
                        Ok(Ty::Bool)
                    } else {
                        Err(alloc::format!(
                            "`{}` on {}/{}",
                            op.symbol(),
                            ta.name(),
                            tb.name()
                        ))
                    }
                }
                Lt | Le | Gt | Ge => match (ta, tb) {
                    (Ty::Bool, _) | (_, Ty::Bool) => {
                        Err(alloc::format!("comparison `{}` on bool", op.symbol()))
                    }
                    _ => Ok(Ty::Bool),
                },
                And | Or => match (ta, tb) {
                    (Ty::Bool, Ty::Bool) => Ok(Ty::Bool),
                    _ => Err(alloc::format!(
                        "logic `{}` needs bool operands",
                        op.symbol()
                    )),
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, Value)]) -> Env {
        pairs.iter().map(|(k, v)| ((*k).into(), *v)).collect()
    }

    #[test]
    fn arithmetic_and_promotion() {
        let e = Expr::bin(
            BinOp::Div,
            Expr::Pi,
            Expr::bin(BinOp::Shl, Expr::Int(1), Expr::var("k")),
        );
        let got = e.eval(&env(&[("k", Value::Int(2))])).unwrap();
        assert_eq!(got, Value::Float(core::f64::consts::PI / 4.0));
    }

    #[test]
    fn integer_division_truncates() {
        let e = Expr::bin(BinOp::Div, Expr::Int(7), Expr::Int(2));
        assert_eq!(e.eval(&env(&[])).unwrap(), Value::Int(3));
    }

    #[test]
    fn divide_by_zero_faults() {
        let e = Expr::bin(BinOp::Rem, Expr::var("x"), Expr::Int(0));
        assert_eq!(
            e.eval(&env(&[("x", Value::Int(5))])).unwrap_err(),
            EvalError::DivideByZero
        );
    }

    #[test]
    fn msb_examples() {
        let cases = [(0i64, -1i64), (1, 0), (2, 1), (3, 1), (20, 4), (-4, -1)];
        for (v, want) in cases {
            let e = Expr::Msb(Box::new(Expr::Int(v)));
            assert_eq!(e.eval(&env(&[])).unwrap(), Value::Int(want), "msb({v})");
        }
    }

    #[test]
    fn bit_test_pattern() {
        // ((x >> (n-1-i)) % 2) == 1, the idiom used by state generators.
        let e = Expr::bin(
            BinOp::Eq,
            Expr::bin(
                BinOp::Rem,
                Expr::bin(
                    BinOp::Shr,
                    Expr::var("x"),
                    Expr::bin(
                        BinOp::Sub,
                        Expr::bin(BinOp::Sub, Expr::var("n"), Expr::Int(1)),
                        Expr::var("i"),
                    ),
                ),
                Expr::Int(2),
            ),
            Expr::Int(1),
        );
        // x = 0b10100 (20), n = 5: bits are [1,0,1,0,0] msb-first.
        for (i, want) in [(0, true), (1, false), (2, true), (3, false), (4, false)] {
            let got = e
                .eval(&env(&[
                    ("x", Value::Int(20)),
                    ("n", Value::Int(5)),
                    ("i", Value::Int(i)),
                ]))
                .unwrap();
            assert_eq!(got, Value::Bool(want), "bit {i}");
        }
    }

    #[test]
    fn shift_out_of_range_faults() {
        let e = Expr::bin(BinOp::Shl, Expr::Int(1), Expr::Int(63));
        assert!(matches!(e.eval(&env(&[])), Err(EvalError::BadShift(63))));
        let e = Expr::bin(BinOp::Shr, Expr::Int(1), Expr::Int(-1));
        assert!(matches!(e.eval(&env(&[])), Err(EvalError::BadShift(-1))));
    }

    #[test]
    fn infer_types() {
        let mut vars = BTreeMap::new();
        vars.insert("n".into(), Ty::Int);
        let angle = Expr::bin(
            BinOp::Div,
            Expr::Pi,
            Expr::bin(BinOp::Shl, Expr::Int(1), Expr::var("n")),
        );
        assert_eq!(infer_type(&angle, &vars).unwrap(), Ty::Float);
        let cond = Expr::bin(BinOp::Lt, Expr::var("n"), Expr::Int(4));
        assert_eq!(infer_type(&cond, &vars).unwrap(), Ty::Bool);
        let bad = Expr::bin(BinOp::And, Expr::var("n"), Expr::Bool(true));
        assert!(infer_type(&bad, &vars).is_err());
    }
}
