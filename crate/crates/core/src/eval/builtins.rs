//! Operator and function semantics shared by the interpreter and the grid
//! verifier.
//!
//! Conventions: arithmetic treats blank as 0; `#N/A` in any arithmetic or
//! comparison operand yields `#N/A`; only `ISNA` and the untaken branch of
//! `IF` stop it.

use std::cmp::Ordering;

use thiserror::Error;

use crate::syntax::BinaryOp;

use super::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("MATCH supports only match type 0")]
    UnsupportedMatchType,
    #[error("{0}")]
    Fault(String),
}

impl EvalError {
    pub fn fault(reason: impl Into<String>) -> Self {
        EvalError::Fault(reason.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    If,
    Or,
    And,
    Not,
    IsNa,
    Sum,
    Match,
    Date,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::If,
        Builtin::Or,
        Builtin::And,
        Builtin::Not,
        Builtin::IsNa,
        Builtin::Sum,
        Builtin::Match,
        Builtin::Date,
    ];

    /// Case-insensitive lookup.
    pub fn from_name(name: &str) -> Option<Builtin> {
        Self::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(name))
    }

    /// Upper-case spreadsheet name.
    pub fn name(self) -> &'static str {
        match self {
            Builtin::If => "IF",
            Builtin::Or => "OR",
            Builtin::And => "AND",
            Builtin::Not => "NOT",
            Builtin::IsNa => "ISNA",
            Builtin::Sum => "SUM",
            Builtin::Match => "MATCH",
            Builtin::Date => "DATE",
        }
    }

    /// `(min, max)` argument counts; `None` means unbounded.
    pub fn arity(self) -> (usize, Option<usize>) {
        match self {
            Builtin::If | Builtin::Match | Builtin::Date => (3, Some(3)),
            Builtin::Not | Builtin::IsNa => (1, Some(1)),
            Builtin::Or | Builtin::And | Builtin::Sum => (1, None),
        }
    }

    /// Whether argument `index` may be a range rather than a single value.
    pub fn accepts_range(self, index: usize) -> bool {
        match self {
            Builtin::Sum => true,
            Builtin::Match => index == 1,
            _ => false,
        }
    }

    /// Applies the function, pulling arguments on demand so that `IF` only
    /// evaluates the branch it takes.
    pub fn apply(
        self,
        argc: usize,
        arg: &mut dyn FnMut(usize) -> Result<Arg, EvalError>,
    ) -> Result<Value, EvalError> {
        let (min, max) = self.arity();
        if argc < min || max.is_some_and(|m| argc > m) {
            return Err(EvalError::fault(format!(
                "{} called with {argc} argument(s)",
                self.name()
            )));
        }
        let name = self.name();
        let scalar = |arg: &mut dyn FnMut(usize) -> Result<Arg, EvalError>, i: usize| match arg(i)?
        {
            Arg::Scalar(v) => Ok(v),
            Arg::Range(_) => Err(EvalError::fault(format!(
                "{name} argument {} must be a single value",
                i + 1
            ))),
        };
        match self {
            Builtin::If => match truth(&scalar(arg, 0)?, "IF")? {
                None => Ok(Value::Na),
                Some(true) => scalar(arg, 1),
                Some(false) => scalar(arg, 2),
            },
            Builtin::Or | Builtin::And => {
                let mut acc = self == Builtin::And;
                let mut na = false;
                for i in 0..argc {
                    match truth(&scalar(arg, i)?, self.name())? {
                        None => na = true,
                        Some(b) if self == Builtin::And => acc &= b,
                        Some(b) => acc |= b,
                    }
                }
                Ok(if na { Value::Na } else { Value::Boolean(acc) })
            }
            Builtin::Not => Ok(match truth(&scalar(arg, 0)?, "NOT")? {
                None => Value::Na,
                Some(b) => Value::Boolean(!b),
            }),
            Builtin::IsNa => Ok(Value::Boolean(scalar(arg, 0)?.is_na())),
            Builtin::Sum => {
                let mut total = 0.0;
                for i in 0..argc {
                    let values = match arg(i)? {
                        Arg::Scalar(v) => vec![v],
                        Arg::Range(vs) => vs,
                    };
                    for v in values {
                        match v {
                            Value::Number(n, _) => total += n,
                            Value::Blank | Value::Boolean(_) => {}
                            Value::Na => return Ok(Value::Na),
                            Value::Date(_) => {
                                return Err(EvalError::fault("SUM over a date value"))
                            }
                        }
                    }
                }
                finite(total)
            }
            Builtin::Match => {
                let needle = scalar(arg, 0)?;
                let haystack = match arg(1)? {
                    Arg::Range(vs) => vs,
                    Arg::Scalar(v) => vec![v],
                };
                let kind = scalar(arg, 2)?;
                if kind.as_number() != Some(0.0) {
                    return Err(EvalError::UnsupportedMatchType);
                }
                Ok(match_exact(&needle, &haystack))
            }
            Builtin::Date => {
                let mut parts = [0i64; 3];
                for (i, part) in parts.iter_mut().enumerate() {
                    match scalar(arg, i)? {
                        Value::Na => return Ok(Value::Na),
                        v => {
                            let n = to_number(&v, "DATE")?;
                            if n.fract() != 0.0 || n.abs() > 1e9 {
                                return Err(EvalError::fault(format!(
                                    "DATE part {n} is not an integer"
                                )));
                            }
                            *part = n as i64;
                        }
                    }
                }
                let [y, m, d] = parts;
                if !(1..=12).contains(&m) {
                    return Err(EvalError::fault(format!(
                        "DATE month {m} out of range 1..12"
                    )));
                }
                i32::try_from(y)
                    .ok()
                    .zip(u32::try_from(d).ok())
                    .and_then(|(y, d)| Value::date(y, m as u32, d))
                    .ok_or_else(|| {
                        EvalError::fault(format!("DATE({y},{m},{d}) is not a valid date"))
                    })
            }
        }
    }
}

/// An evaluated function argument.
#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Scalar(Value),
    Range(Vec<Value>),
}

/// Applies a function by name to already-evaluated arguments.
pub fn apply_builtin(name: &str, args: Vec<Arg>) -> Result<Value, EvalError> {
    let builtin =
        Builtin::from_name(name).ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
    let argc = args.len();
    let mut args: Vec<Option<Arg>> = args.into_iter().map(Some).collect();
    builtin.apply(argc, &mut |i| {
        args[i]
            .take()
            .ok_or_else(|| EvalError::fault("argument read twice"))
    })
}

/// 1-based position of the first element equal to `needle` in type and
/// value, or `#N/A`. Blank needles and blank elements never match.
pub fn match_exact(needle: &Value, haystack: &[Value]) -> Value {
    if matches!(needle, Value::Na | Value::Blank) {
        return Value::Na;
    }
    haystack
        .iter()
        .position(|v| !matches!(v, Value::Blank | Value::Na) && v == needle)
        .map(|i| Value::number((i + 1) as f64))
        .unwrap_or(Value::Na)
}

/// Truth value for logical contexts; `None` is `#N/A`. Blank counts as false.
fn truth(v: &Value, context: &str) -> Result<Option<bool>, EvalError> {
    match v {
        Value::Boolean(b) => Ok(Some(*b)),
        Value::Blank => Ok(Some(false)),
        Value::Na => Ok(None),
        other => Err(EvalError::fault(format!(
            "{context} expects a boolean, found {} {other}",
            other.kind()
        ))),
    }
}

fn to_number(v: &Value, context: &str) -> Result<f64, EvalError> {
    match v {
        Value::Number(n, _) => Ok(*n),
        Value::Blank => Ok(0.0),
        other => Err(EvalError::fault(format!(
            "{context} expects a number, found {} {other}",
            other.kind()
        ))),
    }
}

fn finite(n: f64) -> Result<Value, EvalError> {
    if n.is_finite() {
        Ok(Value::number(n))
    } else {
        Err(EvalError::fault("numeric overflow"))
    }
}

pub fn negate(v: &Value) -> Result<Value, EvalError> {
    match v {
        Value::Na => Ok(Value::Na),
        other => finite(-to_number(other, "negation")?),
    }
}

fn compare(l: &Value, r: &Value) -> Result<Ordering, EvalError> {
    use Value::*;
    let ord = match (l, r) {
        (Number(a, _), Number(b, _)) => a.partial_cmp(b),
        (Number(a, _), Blank) => a.partial_cmp(&0.0),
        (Blank, Number(b, _)) => 0.0.partial_cmp(b),
        (Boolean(a), Boolean(b)) => Some(a.cmp(b)),
        (Boolean(a), Blank) => Some(a.cmp(&false)),
        (Blank, Boolean(b)) => Some(false.cmp(b)),
        (Date(a), Date(b)) => Some(a.cmp(b)),
        (Blank, Blank) => Some(Ordering::Equal),
        _ => None,
    };
    ord.ok_or_else(|| {
        EvalError::fault(format!(
            "cannot compare {} {l} with {} {r}",
            l.kind(),
            r.kind()
        ))
    })
}

pub fn binary_op(op: BinaryOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
    if l.is_na() || r.is_na() {
        return Ok(Value::Na);
    }
    if op.is_comparison() {
        let ord = compare(l, r)?;
        let b = match op {
            BinaryOp::Eq => ord == Ordering::Equal,
            BinaryOp::Ne => ord != Ordering::Equal,
            BinaryOp::Lt => ord == Ordering::Less,
            BinaryOp::Le => ord != Ordering::Greater,
            BinaryOp::Gt => ord == Ordering::Greater,
            BinaryOp::Ge => ord != Ordering::Less,
            _ => unreachable!(),
        };
        return Ok(Value::Boolean(b));
    }
    let context = format!("operator {}", op.symbol());
    let a = to_number(l, &context)?;
    let b = to_number(r, &context)?;
    match op {
        BinaryOp::Add => finite(a + b),
        BinaryOp::Sub => finite(a - b),
        BinaryOp::Mul => finite(a * b),
        BinaryOp::Div if b == 0.0 => Err(EvalError::fault("division by zero")),
        BinaryOp::Div => finite(a / b),
        _ => unreachable!(),
    }
}

/// A formula result as stored in a cell: a bare reference to a blank cell
/// reads as 0.
pub fn cell_result(v: Value) -> Value {
    match v {
        Value::Blank => Value::number(0.0),
        other => other,
    }
}
