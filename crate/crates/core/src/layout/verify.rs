//! Differential check of an emitted grid against its own values.
//!
//! Each formula is re-evaluated once, reading its inputs from the values
//! document rather than recomputing them, so every cell is checked against
//! its immediate neighbours only.

use crate::eval::{binary_op, cell_result, negate, Arg, Builtin, EvalError, Value};

use super::a1::{parse_a1_formula, A1Expr, CellRef};
use super::address::Address;
use super::emit::TextGrid;

/// Numbers agree when their difference is within this fraction of the
/// larger magnitude.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub address: Address,
    pub formula: String,
    /// Text stored in the values document.
    pub expected: String,
    /// Recomputed value, or the reason it could not be computed.
    pub actual: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    /// Formula cells examined.
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn lookup(values: &TextGrid, address: &Address) -> Result<Value, EvalError> {
    let text = values.get(address).unwrap_or("");
    Value::parse_text(text)
        .ok_or_else(|| EvalError::fault(format!("{address} holds `{text}`, which is not a value")))
}

fn range(values: &TextGrid, home: &str, a: &CellRef, b: &CellRef) -> Result<Vec<Value>, EvalError> {
    let sheet = a.sheet.as_deref().unwrap_or(home);
    let (c0, c1) = (a.column.min(b.column), a.column.max(b.column));
    let (r0, r1) = (a.row.min(b.row), a.row.max(b.row));
    let mut out = Vec::with_capacity(((c1 - c0 + 1) * (r1 - r0 + 1)) as usize);
    for row in r0..=r1 {
        for column in c0..=c1 {
            out.push(lookup(values, &Address::new(sheet, column, row))?);
        }
    }
    Ok(out)
}

fn eval(expr: &A1Expr, values: &TextGrid, home: &str) -> Result<Value, EvalError> {
    match expr {
        A1Expr::Number(n) => Ok(Value::number(*n)),
        A1Expr::Boolean(b) => Ok(Value::Boolean(*b)),
        A1Expr::Ref(r) => lookup(values, &r.resolve(home)),
        A1Expr::Range(..) => Err(EvalError::fault("range used as a single value")),
        A1Expr::Neg(inner) => negate(&eval(inner, values, home)?),
        A1Expr::Binary { op, lhs, rhs } => {
            binary_op(*op, &eval(lhs, values, home)?, &eval(rhs, values, home)?)
        }
        A1Expr::Call { name, args } => {
            let builtin =
                Builtin::from_name(name).ok_or_else(|| EvalError::UnknownFunction(name.clone()))?;
            builtin.apply(args.len(), &mut |i| match &args[i] {
                A1Expr::Range(a, b) if builtin.accepts_range(i) => {
                    Ok(Arg::Range(range(values, home, a, b)?))
                }
                other => Ok(Arg::Scalar(eval(other, values, home)?)),
            })
        }
    }
}

fn agrees(expected: &Value, actual: &Value) -> bool {
    match (expected, actual) {
        (Value::Number(a, _), Value::Number(b, _)) => {
            a == b || (a - b).abs() <= RELATIVE_TOLERANCE * a.abs().max(b.abs())
        }
        _ => expected == actual,
    }
}

fn check(formula: &str, values: &TextGrid, address: &Address) -> Result<(), String> {
    let expected_text = values.get(address).unwrap_or("");
    let expected = Value::parse_text(expected_text)
        .ok_or_else(|| format!("stored text `{expected_text}` is not a value"))?;
    let expr = parse_a1_formula(formula).map_err(|e| format!("unparsable formula: {e}"))?;
    let actual = eval(&expr, values, &address.sheet)
        .map(cell_result)
        .map_err(|e| format!("error: {e}"))?;
    if agrees(&expected, &actual) {
        Ok(())
    } else {
        Err(actual.render())
    }
}

/// Re-evaluates every formula cell of `formulas` one step against `values`.
pub fn verify_grid(formulas: &TextGrid, values: &TextGrid) -> VerifyReport {
    let mut report = VerifyReport::default();
    for (address, text) in formulas.cells() {
        if !text.starts_with('=') {
            continue;
        }
        report.checked += 1;
        if let Err(actual) = check(text, values, &address) {
            report.mismatches.push(Mismatch {
                expected: values.get(&address).unwrap_or("").to_string(),
                formula: text.to_string(),
                address,
                actual,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::emit::SheetGrid;

    fn grid(name: &str, cells: &[(u32, u32, &str)]) -> TextGrid {
        let mut sheet = SheetGrid::new(name);
        for &(r, c, t) in cells {
            sheet.cells.insert((r, c), t.to_string());
        }
        TextGrid {
            sheets: vec![sheet],
        }
    }

    #[test]
    fn clean_and_corrupted() {
        let f = grid(
            "S",
            &[
                (1, 1, "100.00"),
                (1, 2, "5"),
                (1, 3, "=A1-B1"),
                (1, 4, "=C1>90"),
            ],
        );
        let v = grid(
            "S",
            &[
                (1, 1, "100.00"),
                (1, 2, "5"),
                (1, 3, "95.00"),
                (1, 4, "TRUE"),
            ],
        );
        let report = verify_grid(&f, &v);
        assert_eq!(report.checked, 2);
        assert!(report.is_clean(), "{report:?}");

        let bad = grid(
            "S",
            &[
                (1, 1, "100.00"),
                (1, 2, "5"),
                (1, 3, "96.00"),
                (1, 4, "TRUE"),
            ],
        );
        let report = verify_grid(&f, &bad);
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].address.a1(), "C1");
        assert_eq!(report.mismatches[0].actual, "95");
    }

    #[test]
    fn na_match_and_tolerance() {
        let f = grid(
            "S",
            &[
                (1, 1, "FALSE"),
                (1, 2, "FALSE"),
                (2, 1, "=MATCH(TRUE,A1:B1,0)"),
                (3, 1, "=IF(ISNA(A2),0,A2)"),
                (4, 1, "=1/3"),
            ],
        );
        let v = grid(
            "S",
            &[
                (1, 1, "FALSE"),
                (1, 2, "FALSE"),
                (2, 1, "#N/A"),
                (3, 1, "0"),
                (4, 1, "0.3333333333334"),
            ],
        );
        let report = verify_grid(&f, &v);
        assert_eq!(report.checked, 3);
        assert!(report.is_clean(), "{report:?}");
    }

    #[test]
    fn blank_result_is_zero_and_text_is_reported() {
        let f = grid("S", &[(1, 2, "=A1"), (2, 2, "=A2+1")]);
        let v = grid("S", &[(1, 2, "0"), (2, 1, "Caption"), (2, 2, "1")]);
        let report = verify_grid(&f, &v);
        assert_eq!(report.mismatches.len(), 1);
        assert!(report.mismatches[0].actual.contains("not a value"));
    }
}
