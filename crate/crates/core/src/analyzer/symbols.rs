//! Name resolution.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::syntax::{BoundsDecl, Element, EquationDecl, SpecDocument, TableDecl};

use super::diagnostic::{Code, Diagnostic};

/// Identifies one cell: a table and one index per dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId {
    pub table: String,
    pub indices: Vec<i64>,
}

impl CellId {
    pub fn new(table: impl Into<String>, indices: Vec<i64>) -> Self {
        Self {
            table: table.into(),
            indices,
        }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.table)?;
        for (i, idx) in self.indices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{idx}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    pub bounds: BTreeMap<String, BoundsDecl>,
    pub tables: BTreeMap<String, TableDecl>,
    /// Table names in declaration order.
    pub table_order: Vec<String>,
    pub equations_by_table: BTreeMap<String, Vec<EquationDecl>>,
}

impl SymbolTable {
    pub fn table(&self, name: &str) -> Option<&TableDecl> {
        self.tables.get(name)
    }

    /// Inclusive index range of every dimension of `table`.
    pub fn extents(&self, table: &TableDecl) -> Vec<(i64, i64)> {
        table
            .dims
            .iter()
            .filter_map(|d| self.bounds.get(d))
            .map(|b| (b.low, b.high))
            .collect()
    }

    pub fn equations(&self, table: &str) -> &[EquationDecl] {
        self.equations_by_table
            .get(table)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn is_input(&self, table: &str) -> bool {
        self.equations(table).is_empty()
    }

    pub fn tables_in_order(&self) -> impl Iterator<Item = &TableDecl> {
        self.table_order.iter().filter_map(|n| self.tables.get(n))
    }
}

/// Builds the symbol table, reporting duplicates, unknown names and
/// left-hand-side arity errors.
pub fn resolve(doc: &SpecDocument) -> (SymbolTable, Vec<Diagnostic>) {
    let mut symbols = SymbolTable::default();
    let mut diags = Vec::new();

    for element in &doc.elements {
        match element {
            Element::Bounds(b) => {
                if symbols.bounds.contains_key(&b.name) {
                    diags.push(Diagnostic::error(
                        Code::DuplicateName,
                        b.pos,
                        format!("bounds `{}` declared twice", b.name),
                    ));
                } else {
                    symbols.bounds.insert(b.name.clone(), b.clone());
                }
            }
            Element::Table(t) => {
                if symbols.tables.contains_key(&t.name) {
                    diags.push(Diagnostic::error(
                        Code::DuplicateName,
                        t.pos,
                        format!("table `{}` declared twice", t.name),
                    ));
                } else {
                    symbols.tables.insert(t.name.clone(), t.clone());
                    symbols.table_order.push(t.name.clone());
                }
            }
            Element::Equation(_) => {}
        }
    }

    for table in symbols.tables_in_order() {
        for dim in &table.dims {
            if !symbols.bounds.contains_key(dim) {
                diags.push(Diagnostic::error(
                    Code::UnknownBounds,
                    table.pos,
                    format!(
                        "table `{}` ranges over undeclared bounds `{dim}`",
                        table.name
                    ),
                ));
            }
        }
    }

    for eq in doc.equations() {
        let Some(table) = symbols.tables.get(&eq.table) else {
            diags.push(Diagnostic::error(
                Code::UnknownTable,
                eq.pos,
                format!("equation for undeclared table `{}`", eq.table),
            ));
            continue;
        };
        if eq.lhs_patterns.len() != table.arity() {
            diags.push(Diagnostic::error(
                Code::ArityMismatch,
                eq.pos,
                format!(
                    "table `{}` has {} dimension(s) but the equation gives {} index pattern(s)",
                    eq.table,
                    table.arity(),
                    eq.lhs_patterns.len()
                ),
            ));
            continue;
        }
        let mut seen = HashSet::new();
        for var in eq.bound_variables() {
            if !seen.insert(var) {
                diags.push(Diagnostic::error(
                    Code::DuplicateIndexVariable,
                    eq.pos,
                    format!("index variable `{var}` bound twice on the left-hand side"),
                ));
            }
        }
        symbols
            .equations_by_table
            .entry(eq.table.clone())
            .or_default()
            .push(eq.clone());
    }

    (symbols, diags)
}
