//! Static typing of equation right-hand sides.
//!
//! `number`, `currency` and `general` form one numeric family; `boolean` and
//! `date` are separate. A reference with an `all` index is a range and is only
//! accepted as a direct argument of `sum` or as the lookup range of `match`.

use std::collections::HashSet;

use crate::eval::Builtin;
use crate::syntax::{BinaryOp, Expr, ResultType, SourcePos, SpecDocument};

use super::diagnostic::{Code, Diagnostic};
use super::symbols::SymbolTable;

/// Type family of a scalar value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Numeric,
    Boolean,
    Date,
}

impl Family {
    pub fn of(result_type: ResultType) -> Family {
        match result_type {
            ResultType::General | ResultType::Number | ResultType::Currency => Family::Numeric,
            ResultType::Boolean => Family::Boolean,
            ResultType::Date => Family::Date,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Family::Numeric => "numeric",
            Family::Boolean => "boolean",
            Family::Date => "date",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Scalar(Family),
    Range(Family),
}

/// Checks every equation whose table resolved. Equations rejected by
/// [`resolve`](super::resolve) are skipped.
pub fn typecheck(doc: &SpecDocument, symbols: &SymbolTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for eq in doc.equations() {
        let Some(table) = symbols.table(&eq.table) else {
            continue;
        };
        if table.arity() != eq.lhs_patterns.len() {
            continue;
        }
        let mut checker = Checker {
            symbols,
            vars: eq.bound_variables().collect(),
            pos: eq.pos,
            diags: &mut diags,
        };
        let declared = Family::of(table.result_type);
        match checker.scalar(&eq.rhs) {
            Some(found) if found != declared => checker.report(
                Code::TypeMismatch,
                format!(
                    "`{}` is declared {} but its equation yields a {} value",
                    eq.table,
                    table.result_type,
                    found.name()
                ),
            ),
            _ => {}
        }
    }
    diags
}

struct Checker<'a, 'd> {
    symbols: &'a SymbolTable,
    vars: HashSet<&'a str>,
    pos: SourcePos,
    diags: &'d mut Vec<Diagnostic>,
}

impl Checker<'_, '_> {
    fn report(&mut self, code: Code, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, self.pos, message));
    }

    /// Type of an expression used where a single value is required.
    fn scalar(&mut self, expr: &Expr) -> Option<Family> {
        match self.expr(expr)? {
            Ty::Scalar(f) => Some(f),
            Ty::Range(_) => {
                self.report(
                    Code::MisplacedAll,
                    format!("`all` range `{expr}` used outside sum or match"),
                );
                None
            }
        }
    }

    fn expect(&mut self, expr: &Expr, want: Family, context: &str) -> Option<()> {
        let got = self.scalar(expr)?;
        if got == want {
            return Some(());
        }
        let code = if want == Family::Boolean {
            Code::BooleanExpected
        } else {
            Code::TypeMismatch
        };
        self.report(
            code,
            format!(
                "{context} needs a {} value, found {} `{expr}`",
                want.name(),
                got.name()
            ),
        );
        None
    }

    fn expr(&mut self, expr: &Expr) -> Option<Ty> {
        match expr {
            Expr::Number(_) => Some(Ty::Scalar(Family::Numeric)),
            Expr::Boolean(_) => Some(Ty::Scalar(Family::Boolean)),
            Expr::IndexVar(name) => {
                if self.vars.contains(name.as_str()) {
                    Some(Ty::Scalar(Family::Numeric))
                } else {
                    self.report(
                        Code::UnboundIndexVariable,
                        format!("index variable `{name}` is not bound by the left-hand side"),
                    );
                    None
                }
            }
            Expr::All => {
                self.report(Code::MisplacedAll, "`all` may only appear as an index");
                None
            }
            Expr::Neg(inner) => {
                self.expect(inner, Family::Numeric, "negation")?;
                Some(Ty::Scalar(Family::Numeric))
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = self.scalar(lhs);
                let r = self.scalar(rhs);
                let (l, r) = (l?, r?);
                if op.is_arithmetic() {
                    if l != Family::Numeric || r != Family::Numeric {
                        self.report(
                            Code::TypeMismatch,
                            format!(
                                "operator `{}` needs numeric operands, found {} and {}",
                                op.symbol(),
                                l.name(),
                                r.name()
                            ),
                        );
                        return None;
                    }
                    Some(Ty::Scalar(Family::Numeric))
                } else {
                    if l != r {
                        self.report(
                            Code::TypeMismatch,
                            format!("cannot compare {} with {} in `{expr}`", l.name(), r.name()),
                        );
                        return None;
                    }
                    Some(Ty::Scalar(Family::Boolean))
                }
            }
            Expr::ElementRef { table, indices } => self.element_ref(table, indices),
            Expr::Call { name, args } => self.call(name, args),
        }
    }

    fn element_ref(&mut self, table: &str, indices: &[Expr]) -> Option<Ty> {
        let Some(decl) = self.symbols.table(table) else {
            self.report(
                Code::UnknownTable,
                format!("reference to undeclared table `{table}`"),
            );
            return None;
        };
        if decl.arity() != indices.len() {
            self.report(
                Code::ArityMismatch,
                format!(
                    "table `{table}` has {} dimension(s) but is referenced with {} index(es)",
                    decl.arity(),
                    indices.len()
                ),
            );
            return None;
        }
        let mut ranged = false;
        let mut ok = true;
        for index in indices {
            if matches!(index, Expr::All) {
                ranged = true;
            } else {
                ok &= self.index_expr(index);
            }
        }
        if !ok {
            return None;
        }
        let family = Family::of(decl.result_type);
        Some(if ranged {
            Ty::Range(family)
        } else {
            Ty::Scalar(family)
        })
    }

    /// Index expressions are integer sums and differences of literals and
    /// bound index variables.
    fn index_expr(&mut self, expr: &Expr) -> bool {
        match expr {
            Expr::Number(n) if n.fract() == 0.0 => true,
            Expr::IndexVar(_) => self.expr(expr).is_some(),
            Expr::Neg(inner) => self.index_expr(inner),
            Expr::Binary {
                op: BinaryOp::Add | BinaryOp::Sub,
                lhs,
                rhs,
            } => {
                let l = self.index_expr(lhs);
                let r = self.index_expr(rhs);
                l && r
            }
            Expr::All => {
                self.report(
                    Code::MisplacedAll,
                    "`all` must be a whole index, not part of an index expression",
                );
                false
            }
            _ => {
                self.report(
                    Code::BadIndexExpression,
                    format!("index `{expr}` must be built from integers and index variables with + and -"),
                );
                false
            }
        }
    }

    fn arg_count(&mut self, builtin: Builtin, args: &[Expr]) -> bool {
        let (min, max) = builtin.arity();
        let n = args.len();
        if n < min || max.is_some_and(|m| n > m) {
            let want = match max {
                Some(m) if m == min => format!("{min}"),
                Some(m) => format!("{min} to {m}"),
                None => format!("at least {min}"),
            };
            self.report(
                Code::BadArgumentCount,
                format!("{} takes {want} argument(s), found {n}", builtin.name()),
            );
            return false;
        }
        true
    }

    fn call(&mut self, name: &str, args: &[Expr]) -> Option<Ty> {
        let Some(builtin) = Builtin::from_name(name) else {
            self.report(Code::UnknownFunction, format!("unknown function `{name}`"));
            return None;
        };
        if !self.arg_count(builtin, args) {
            return None;
        }
        let fname = builtin.name();
        match builtin {
            Builtin::If => {
                let cond = self.expect(&args[0], Family::Boolean, "IF condition");
                let a = self.scalar(&args[1]);
                let b = self.scalar(&args[2]);
                let (_, a, b) = (cond?, a?, b?);
                if a != b {
                    self.report(
                        Code::TypeMismatch,
                        format!("IF branches differ: {} and {}", a.name(), b.name()),
                    );
                    return None;
                }
                Some(Ty::Scalar(a))
            }
            Builtin::And | Builtin::Or | Builtin::Not => {
                let mut ok = true;
                for arg in args {
                    ok &= self.expect(arg, Family::Boolean, fname).is_some();
                }
                ok.then_some(Ty::Scalar(Family::Boolean))
            }
            Builtin::IsNa => {
                self.scalar(&args[0])?;
                Some(Ty::Scalar(Family::Boolean))
            }
            Builtin::Sum => {
                let mut ok = true;
                for arg in args {
                    let family = match self.expr(arg) {
                        Some(Ty::Scalar(f)) | Some(Ty::Range(f)) => f,
                        None => {
                            ok = false;
                            continue;
                        }
                    };
                    if family != Family::Numeric {
                        self.report(
                            Code::TypeMismatch,
                            format!(
                                "SUM needs numeric arguments, found {} `{arg}`",
                                family.name()
                            ),
                        );
                        ok = false;
                    }
                }
                ok.then_some(Ty::Scalar(Family::Numeric))
            }
            Builtin::Match => {
                let needle = self.scalar(&args[0]);
                let range = self.match_range(&args[1]);
                let kind = match &args[2] {
                    Expr::Number(n) if *n == 0.0 => true,
                    other => {
                        self.report(
                            Code::UnsupportedMatchType,
                            format!("MATCH supports only exact matching (0), found `{other}`"),
                        );
                        false
                    }
                };
                let (_, _) = (needle?, range?);
                kind.then_some(Ty::Scalar(Family::Numeric))
            }
            Builtin::Date => {
                let mut ok = true;
                for arg in args {
                    ok &= self.expect(arg, Family::Numeric, "DATE").is_some();
                }
                ok.then_some(Ty::Scalar(Family::Date))
            }
        }
    }

    fn match_range(&mut self, arg: &Expr) -> Option<Family> {
        let Expr::ElementRef { indices, .. } = arg else {
            self.report(
                Code::TypeMismatch,
                format!("MATCH needs a table range with one `all` index, found `{arg}`"),
            );
            return None;
        };
        let ty = self.expr(arg)?;
        let alls = indices.iter().filter(|i| matches!(i, Expr::All)).count();
        match ty {
            Ty::Range(f) if alls == 1 => Some(f),
            _ => {
                self.report(
                    Code::TypeMismatch,
                    format!(
                        "MATCH needs a table range with exactly one `all` index, found `{arg}`"
                    ),
                );
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::resolve;
    use crate::syntax::parse_document;

    const HEADER: &str = "bounds s: 1 to 4.\nbounds r: 1 to 3.\n\
        table n : s -> number.\ntable c : s -> currency.\ntable g : s -> general.\n\
        table b : s -> boolean.\ntable d : s -> date.\ntable m : r s -> boolean.\n\
        table k : -> currency.\n";

    fn check(equation: &str) -> Vec<Code> {
        let doc = parse_document(&format!("{HEADER}{equation}")).unwrap();
        let (symbols, diags) = resolve(&doc);
        assert!(diags.is_empty(), "{diags:?}");
        typecheck(&doc, &symbols)
            .into_iter()
            .map(|d| d.code)
            .collect()
    }

    #[test]
    fn numeric_family_is_interchangeable() {
        assert!(check("c[t] = n[t] + g[t] * k[].").is_empty());
        assert!(check("g[t] = c[t].").is_empty());
    }

    #[test]
    fn boolean_into_currency_rejected() {
        assert_eq!(check("c[t] = b[1]."), vec![Code::TypeMismatch]);
    }

    #[test]
    fn or_not_comparison() {
        assert!(check("b[t] = or( not( b[t] ), n[t] + c[t] <= k[] ).").is_empty());
    }

    #[test]
    fn if_condition_must_be_boolean() {
        assert_eq!(
            check("c[t] = if( n[t], 1, 2 )."),
            vec![Code::BooleanExpected]
        );
        assert_eq!(
            check("c[t] = if( g[t] = 1, 1, b[t] )."),
            vec![Code::TypeMismatch]
        );
    }

    #[test]
    fn misplaced_all() {
        assert_eq!(
            check("n[t] = sum( n[ all ] ) + all."),
            vec![Code::MisplacedAll]
        );
        assert_eq!(check("n[t] = n[all]."), vec![Code::MisplacedAll]);
        assert_eq!(check("n[t] = sum( n[all] + 1 )."), vec![Code::MisplacedAll]);
        assert_eq!(check("n[t] = n[all + 1]."), vec![Code::MisplacedAll]);
    }

    #[test]
    fn match_and_sum_over_ranges() {
        assert!(check("g[t] = match( true, m[ all, t ], 0 ).").is_empty());
        assert!(check("g[t] = sum( n[all], c[all], 3 ).").is_empty());
        assert_eq!(
            check("g[t] = match( true, m[ all, t ], 1 )."),
            vec![Code::UnsupportedMatchType]
        );
        assert_eq!(
            check("g[t] = match( true, b[t], 0 )."),
            vec![Code::TypeMismatch]
        );
        assert_eq!(check("g[t] = sum( b[all] )."), vec![Code::TypeMismatch]);
    }

    #[test]
    fn isna_accepts_anything() {
        assert!(check("b[t] = isna( d[t] ).").is_empty());
        assert!(check("b[t] = isna( g[t] ).").is_empty());
    }

    #[test]
    fn date_builtin() {
        assert!(check("d[t] = date( 2009, t, 1 ).").is_empty());
        assert_eq!(
            check("n[t] = date( 2009, t, 1 )."),
            vec![Code::TypeMismatch]
        );
        assert_eq!(
            check("d[t] = DATE( 2009, t )."),
            vec![Code::BadArgumentCount]
        );
    }

    #[test]
    fn function_names_case_insensitive() {
        assert!(check("b[t] = OR( Not( b[t] ), false ).").is_empty());
        assert_eq!(check("b[t] = xor( b[t] )."), vec![Code::UnknownFunction]);
    }

    #[test]
    fn unbound_variable() {
        assert_eq!(check("n[t] = n[u]."), vec![Code::UnboundIndexVariable]);
        assert_eq!(check("n[1] = t."), vec![Code::UnboundIndexVariable]);
    }

    #[test]
    fn index_expressions_restricted() {
        assert!(check("n[t>1] = n[t - 1] + n[-1 + t + 0].").is_empty());
        assert_eq!(check("n[t] = n[t * 2]."), vec![Code::BadIndexExpression]);
        assert_eq!(check("n[t] = n[1.5]."), vec![Code::BadIndexExpression]);
    }

    #[test]
    fn rhs_reference_checks() {
        assert_eq!(check("n[t] = q[t]."), vec![Code::UnknownTable]);
        assert_eq!(check("n[t] = n[t, t]."), vec![Code::ArityMismatch]);
    }

    #[test]
    fn comparisons_need_same_family() {
        assert_eq!(check("b[t] = d[t] < 3."), vec![Code::TypeMismatch]);
        assert!(check("b[t] = d[t] < d[1].").is_empty());
        assert!(check("b[t] = b[t] = true.").is_empty());
    }
}
