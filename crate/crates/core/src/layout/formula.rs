//! Rendering rules as A1-notation formulas.

use std::fmt::Write;

use thiserror::Error;

use crate::analyzer::{CellId, CellPlan, RuleInstance, Substitution};
use crate::eval::Builtin;
use crate::syntax::{Expr, NEG_PRECEDENCE};

use super::address::Address;
use super::plan::Layout;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("{0} has no address in the layout")]
    UnmappedCell(CellId),
    #[error("range over `{table}` is not one contiguous rectangle in the layout")]
    NonContiguousRange { table: String },
    #[error("index variable `{0}` is unbound")]
    UnboundIndex(String),
}

/// Formula text for the cell of `rule`, starting with `=`. Index variables
/// become literals, element references become addresses and `all`
/// references become `first:last` ranges.
pub fn render_formula(
    plan: &CellPlan,
    layout: &Layout,
    rule: &RuleInstance,
) -> Result<String, RenderError> {
    let home = layout
        .address(&rule.cell)
        .ok_or_else(|| RenderError::UnmappedCell(rule.cell.clone()))?;
    let renderer = Renderer {
        plan,
        layout,
        subst: &rule.substitution,
        sheet: &home.sheet,
    };
    let mut out = String::from("=");
    renderer.expr(&mut out, &plan.equation(rule).rhs)?;
    Ok(out)
}

struct Renderer<'a> {
    plan: &'a CellPlan,
    layout: &'a Layout,
    subst: &'a Substitution,
    sheet: &'a str,
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Binary { op, .. } => op.precedence(),
        Expr::Neg(_) => NEG_PRECEDENCE,
        _ => u8::MAX,
    }
}

/// Shortest text that parses back to `n`.
pub(crate) fn number_text(n: f64) -> String {
    let n = if n == 0.0 { 0.0 } else { n };
    format!("{n}")
}

impl Renderer<'_> {
    fn operand(&self, out: &mut String, expr: &Expr, parens: bool) -> Result<(), RenderError> {
        if parens {
            out.push('(');
            self.expr(out, expr)?;
            out.push(')');
            Ok(())
        } else {
            self.expr(out, expr)
        }
    }

    fn expr(&self, out: &mut String, expr: &Expr) -> Result<(), RenderError> {
        match expr {
            Expr::Number(n) => out.push_str(&number_text(*n)),
            Expr::Boolean(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
            Expr::IndexVar(v) => {
                let i = self
                    .subst
                    .get(v)
                    .ok_or_else(|| RenderError::UnboundIndex(v.clone()))?;
                write!(out, "{i}").unwrap();
            }
            Expr::All => unreachable!("`all` only appears inside element references"),
            Expr::ElementRef { table, indices } => self.reference(out, table, indices, false)?,
            Expr::Call { name, args } => {
                let builtin = Builtin::from_name(name);
                match builtin {
                    Some(b) => out.push_str(b.name()),
                    None => out.push_str(&name.to_ascii_uppercase()),
                }
                out.push('(');
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    match arg {
                        // MATCH returns a position, so its range must list
                        // cells in index order.
                        Expr::ElementRef { table, indices } if builtin == Some(Builtin::Match) => {
                            self.reference(out, table, indices, true)?
                        }
                        _ => self.expr(out, arg)?,
                    }
                }
                out.push(')');
            }
            Expr::Neg(inner) => {
                out.push('-');
                self.operand(out, inner, precedence(inner) < NEG_PRECEDENCE)?;
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                self.operand(out, lhs, precedence(lhs) < p)?;
                out.push_str(op.symbol());
                self.operand(out, rhs, precedence(rhs) <= p)?;
            }
        }
        Ok(())
    }

    fn reference(
        &self,
        out: &mut String,
        table: &str,
        indices: &[Expr],
        ordered: bool,
    ) -> Result<(), RenderError> {
        let cells = self
            .plan
            .expand_ref(table, indices, self.subst)
            .map_err(|oob| RenderError::UnmappedCell(CellId::new(oob.table, oob.indices)))?;
        let addresses = cells
            .iter()
            .map(|c| {
                self.layout
                    .address(c)
                    .ok_or_else(|| RenderError::UnmappedCell(c.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !indices.iter().any(|i| matches!(i, Expr::All)) {
            out.push_str(&addresses[0].a1_from(self.sheet));
            return Ok(());
        }
        let (first, last) =
            rectangle(&addresses, ordered).ok_or_else(|| RenderError::NonContiguousRange {
                table: table.to_string(),
            })?;
        write!(out, "{}:{}", first.a1_from(self.sheet), last.a1()).unwrap();
        Ok(())
    }
}

/// Corners of the rectangle covered exactly by `addresses`. When `ordered`,
/// the addresses must also run in the rectangle's row-major order.
fn rectangle(addresses: &[Address], ordered: bool) -> Option<(Address, Address)> {
    let first = addresses.first()?;
    if addresses.iter().any(|a| a.sheet != first.sheet) {
        return None;
    }
    let min_col = addresses.iter().map(|a| a.column).min()?;
    let max_col = addresses.iter().map(|a| a.column).max()?;
    let min_row = addresses.iter().map(|a| a.row).min()?;
    let max_row = addresses.iter().map(|a| a.row).max()?;
    let area = u64::from(max_col - min_col + 1) * u64::from(max_row - min_row + 1);
    let mut distinct: Vec<(u32, u32)> = addresses.iter().map(|a| (a.row, a.column)).collect();
    if ordered && !distinct.windows(2).all(|w| w[0] < w[1]) {
        return None;
    }
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() as u64 != area {
        return None;
    }
    Some((
        Address::new(&first.sheet, min_col, min_row),
        Address::new(&first.sheet, max_col, max_row),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::analyze_source;
    use crate::layout::plan::{plan_layout, LayoutOptions};

    fn formulas(src: &str) -> Vec<(String, String)> {
        let a = analyze_source(src).unwrap();
        let layout = plan_layout(&a.plan, &LayoutOptions::default()).unwrap();
        a.plan
            .rules
            .values()
            .map(|r| {
                (
                    r.cell.to_string(),
                    render_formula(&a.plan, &layout, r).unwrap(),
                )
            })
            .collect()
    }

    fn formula_of(src: &str, cell: &str) -> String {
        formulas(src)
            .into_iter()
            .find(|(c, _)| c == cell)
            .unwrap()
            .1
    }

    #[test]
    fn recurrence_and_scalar_reference() {
        let src = "bounds s: 1 to 12.
table expenses : s -> currency.
table initial : -> currency.
table start : s -> currency.
table end : s -> currency.
start[1] = initial[].
start[t>1] = end[t-1].
end[t] = start[t] - expenses[t].";
        assert_eq!(formula_of(src, "end[1]"), "=C3-A3");
        assert_eq!(formula_of(src, "start[1]"), "=B2");
        assert_eq!(formula_of(src, "start[5]"), "=D6");
    }

    #[test]
    fn ranges_and_functions() {
        let src = "bounds s: 1 to 2.\nbounds l: 1 to 3.
table x : s -> number.
table ok : l s -> boolean.
table v : l s -> number.
table first : s -> general.
table tot : s -> number.
ok[l, t] = l + x[t] > 2.
first[t] = match(true, ok[all, t], 0).
v[l, t] = l.
tot[t] = sum(v[all, t]) + -x[t] * (1 - 2).";
        assert_eq!(formula_of(src, "first[1]"), "=MATCH(TRUE,A8:C8,0)");
        assert_eq!(formula_of(src, "ok[3,2]"), "=3+A4>2");
        assert_eq!(formula_of(src, "tot[2]"), "=SUM(E9:G9)+-A4*(1-2)");
    }

    #[test]
    fn cross_sheet_reference() {
        let src = "bounds s: 1 to 2.
table time : s -> date.
table y : s -> date.
time[t] = date(2009, t, 1).
y[t] = time[t].";
        assert_eq!(formula_of(src, "y[2]"), "=Time!A4");
        assert_eq!(formula_of(src, "time[2]"), "=DATE(2009,2,1)");
    }

    #[test]
    fn vertical_range() {
        let src =
            "bounds s: 1 to 3.\ntable x : s -> number.\ntable t : -> number.\nt[] = sum(x[all]).";
        assert_eq!(formula_of(src, "t[]"), "=SUM(A3:A5)");
    }

    #[test]
    fn rectangle_rules() {
        let a = |c, r| Address::new("S", c, r);
        assert_eq!(
            rectangle(&[a(1, 1), a(2, 1)], true),
            Some((a(1, 1), a(2, 1)))
        );
        assert_eq!(rectangle(&[a(2, 1), a(1, 1)], true), None);
        assert_eq!(
            rectangle(&[a(2, 1), a(1, 1)], false),
            Some((a(1, 1), a(2, 1)))
        );
        assert_eq!(rectangle(&[a(1, 1), a(3, 1)], false), None);
        assert_eq!(
            rectangle(&[a(1, 1), a(1, 2), a(2, 1), a(2, 2)], false),
            Some((a(1, 1), a(2, 2)))
        );
        assert_eq!(rectangle(&[a(1, 1), a(1, 2), a(2, 1), a(2, 2)], true), None);
        assert_eq!(rectangle(&[a(1, 1), Address::new("T", 2, 1)], false), None);
    }
}
