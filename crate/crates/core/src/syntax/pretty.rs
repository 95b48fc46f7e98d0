//! Canonical text rendering of the syntax tree.
//!
//! The output parses back to a structurally equal tree. Parentheses are
//! inserted only where precedence or left-associativity requires them.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::{
    BoundsDecl, Element, EquationDecl, Expr, IndexPattern, SpecDocument, TableDecl, NEG_PRECEDENCE,
};

/// Renders every element, one per line. Comments are not reproduced.
pub fn pretty_print(doc: &SpecDocument) -> String {
    let mut out = String::new();
    for element in &doc.elements {
        let _ = writeln!(out, "{element}");
    }
    out
}

impl Display for Element {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Element::Bounds(b) => b.fmt(f),
            Element::Table(t) => t.fmt(f),
            Element::Equation(e) => e.fmt(f),
        }
    }
}

impl Display for BoundsDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "bounds {}: {} to {}.", self.name, self.low, self.high)
    }
}

impl Display for TableDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "table {} :", self.name)?;
        for dim in &self.dims {
            write!(f, " {dim}")?;
        }
        write!(f, " -> {}.", self.result_type)
    }
}

impl Display for IndexPattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            IndexPattern::Constant(c) => write!(f, "{c}"),
            IndexPattern::Var(v) => f.write_str(v),
            IndexPattern::GuardedVar(v, cmp, bound) => write!(f, "{v} {} {bound}", cmp.symbol()),
        }
    }
}

impl Display for EquationDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.table)?;
        for (i, p) in self.lhs_patterns.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "] = {}.", self.rhs)
    }
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Binary { op, .. } => op.precedence(),
        Expr::Neg(_) => NEG_PRECEDENCE,
        _ => u8::MAX,
    }
}

fn write_operand(f: &mut Formatter<'_>, expr: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({expr})")
    } else {
        write!(f, "{expr}")
    }
}

fn write_list(f: &mut Formatter<'_>, items: &[Expr]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => write!(f, "{n}"),
            Expr::Boolean(b) => write!(f, "{b}"),
            Expr::IndexVar(v) => f.write_str(v),
            Expr::All => f.write_str("all"),
            Expr::ElementRef { table, indices } => {
                write!(f, "{table}[")?;
                write_list(f, indices)?;
                f.write_str("]")
            }
            Expr::Call { name, args } => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Expr::Neg(inner) => {
                f.write_str("-")?;
                // `--` would start a comment.
                let nested = matches!(**inner, Expr::Neg(_));
                write_operand(f, inner, nested || precedence(inner) < NEG_PRECEDENCE)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                write_operand(f, lhs, precedence(lhs) < p)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, rhs, precedence(rhs) <= p)
            }
        }
    }
}
