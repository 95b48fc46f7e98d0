//! Rule elaboration: one equation instance per derived cell.
//!
//! Coverage and overlap are decided by enumerating every concrete cell and
//! testing each equation's patterns against it.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{BinaryOp, EquationDecl, Expr, SpecDocument, TableDecl};

use super::diagnostic::{Code, Diagnostic};
use super::symbols::{CellId, SymbolTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableClass {
    Input,
    Derived,
}

impl TableClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TableClass::Input => "input",
            TableClass::Derived => "derived",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableInfo {
    pub decl: TableDecl,
    /// Inclusive `(low, high)` per dimension.
    pub extents: Vec<(i64, i64)>,
    pub class: TableClass,
}

impl TableInfo {
    pub fn name(&self) -> &str {
        &self.decl.name
    }

    pub fn arity(&self) -> usize {
        self.extents.len()
    }

    pub fn contains(&self, indices: &[i64]) -> bool {
        indices.len() == self.extents.len()
            && indices
                .iter()
                .zip(&self.extents)
                .all(|(i, (lo, hi))| lo <= i && i <= hi)
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        enumerate_indices(&self.extents)
            .into_iter()
            .map(|ix| CellId::new(self.decl.name.clone(), ix))
    }

    pub fn cell_count(&self) -> usize {
        self.extents
            .iter()
            .map(|(lo, hi)| (hi - lo + 1) as usize)
            .product()
    }
}

/// Every index tuple within `extents`, first dimension varying slowest.
pub fn enumerate_indices(extents: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(extents.len())];
    for &(lo, hi) in extents {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1).max(0) as usize);
        for prefix in &out {
            for i in lo..=hi {
                let mut ix = prefix.clone();
                ix.push(i);
                next.push(ix);
            }
        }
        out = next;
    }
    out
}

pub type Substitution = BTreeMap<String, i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleInstance {
    pub cell: CellId,
    /// Index into [`CellPlan::equations`].
    pub equation: usize,
    pub substitution: Substitution,
}

#[derive(Debug, Clone)]
pub struct CellPlan {
    /// Tables in declaration order.
    pub tables: Vec<TableInfo>,
    pub equations: Vec<EquationDecl>,
    pub rules: BTreeMap<CellId, RuleInstance>,
    pub inputs: BTreeSet<CellId>,
    pub warnings: Vec<Diagnostic>,
    by_name: BTreeMap<String, usize>,
}

/// A reference that resolved to a cell outside its table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutOfBounds {
    pub table: String,
    pub indices: Vec<i64>,
}

impl CellPlan {
    pub fn table(&self, name: &str) -> Option<&TableInfo> {
        self.by_name.get(name).map(|&i| &self.tables[i])
    }

    pub fn equation(&self, rule: &RuleInstance) -> &EquationDecl {
        &self.equations[rule.equation]
    }

    pub fn is_derived(&self, cell: &CellId) -> bool {
        self.rules.contains_key(cell)
    }

    pub fn cell_count(&self) -> usize {
        self.rules.len() + self.inputs.len()
    }

    /// All cells in table declaration order.
    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.tables.iter().flat_map(TableInfo::cells)
    }

    /// Cells named by an element reference under `subst`. `all` indices expand
    /// to the whole dimension; the result is in index order.
    pub fn expand_ref(
        &self,
        table: &str,
        indices: &[Expr],
        subst: &Substitution,
    ) -> Result<Vec<CellId>, OutOfBounds> {
        let info = self.table(table).ok_or_else(|| OutOfBounds {
            table: table.to_string(),
            indices: Vec::new(),
        })?;
        expand_ref(info, indices, subst)
    }
}

fn expand_ref(
    info: &TableInfo,
    indices: &[Expr],
    subst: &Substitution,
) -> Result<Vec<CellId>, OutOfBounds> {
    let mut ranges = Vec::with_capacity(indices.len());
    let mut concrete = Vec::with_capacity(indices.len());
    for (index, &(lo, hi)) in indices.iter().zip(&info.extents) {
        if matches!(index, Expr::All) {
            ranges.push((lo, hi));
            concrete.push(lo);
        } else {
            let i = eval_index(index, subst).unwrap_or(i64::MIN);
            ranges.push((i, i));
            concrete.push(i);
        }
    }
    if indices.len() != info.extents.len()
        || ranges
            .iter()
            .zip(&info.extents)
            .any(|((a, _), (lo, hi))| a < lo || a > hi)
    {
        return Err(OutOfBounds {
            table: info.decl.name.clone(),
            indices: concrete,
        });
    }
    Ok(enumerate_indices(&ranges)
        .into_iter()
        .map(|ix| CellId::new(info.decl.name.clone(), ix))
        .collect())
}

/// Evaluates an index expression. `None` for unbound variables or shapes
/// that are not index expressions.
pub fn eval_index(expr: &Expr, subst: &Substitution) -> Option<i64> {
    match expr {
        Expr::Number(n) if n.fract() == 0.0 => Some(*n as i64),
        Expr::IndexVar(v) => subst.get(v).copied(),
        Expr::Neg(inner) => eval_index(inner, subst)?.checked_neg(),
        Expr::Binary {
            op: BinaryOp::Add,
            lhs,
            rhs,
        } => eval_index(lhs, subst)?.checked_add(eval_index(rhs, subst)?),
        Expr::Binary {
            op: BinaryOp::Sub,
            lhs,
            rhs,
        } => eval_index(lhs, subst)?.checked_sub(eval_index(rhs, subst)?),
        _ => None,
    }
}

/// Substitution binding `eq`'s pattern variables to `indices`, if every
/// pattern accepts its index.
pub fn match_patterns(eq: &EquationDecl, indices: &[i64]) -> Option<Substitution> {
    if eq.lhs_patterns.len() != indices.len() {
        return None;
    }
    let mut subst = Substitution::new();
    for (pattern, &i) in eq.lhs_patterns.iter().zip(indices) {
        if !pattern.accepts(i) {
            return None;
        }
        if let Some(v) = pattern.variable() {
            subst.insert(v.to_string(), i);
        }
    }
    Some(subst)
}

fn format_cell(table: &str, indices: &[i64]) -> String {
    CellId::new(table, indices.to_vec()).to_string()
}

/// Builds the cell plan. Expects a document that resolved and type-checked
/// without errors.
pub fn elaborate(doc: &SpecDocument, symbols: &SymbolTable) -> Result<CellPlan, Vec<Diagnostic>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let equations: Vec<EquationDecl> = doc
        .equations()
        .filter(|eq| {
            symbols
                .table(&eq.table)
                .is_some_and(|t| t.arity() == eq.lhs_patterns.len())
        })
        .cloned()
        .collect();

    let tables: Vec<TableInfo> = symbols
        .tables_in_order()
        .map(|decl| TableInfo {
            decl: decl.clone(),
            extents: symbols.extents(decl),
            class: if symbols.is_input(&decl.name) {
                TableClass::Input
            } else {
                TableClass::Derived
            },
        })
        .collect();
    let by_name: BTreeMap<String, usize> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| (t.decl.name.clone(), i))
        .collect();

    let mut rules = BTreeMap::new();
    let mut inputs = BTreeSet::new();
    let mut used = vec![false; equations.len()];

    for info in &tables {
        if info.class == TableClass::Input {
            inputs.extend(info.cells());
            continue;
        }
        let candidates: Vec<usize> = (0..equations.len())
            .filter(|&i| equations[i].table == info.decl.name)
            .collect();
        for cell in info.cells() {
            let matches: Vec<(usize, Substitution)> = candidates
                .iter()
                .filter_map(|&i| match_patterns(&equations[i], &cell.indices).map(|s| (i, s)))
                .collect();
            for (i, _) in &matches {
                used[*i] = true;
            }
            match matches.len() {
                0 => errors.push(Diagnostic::error(
                    Code::UncoveredCell,
                    info.decl.pos,
                    format!("no equation defines {cell}"),
                )),
                1 => {
                    let (equation, substitution) = matches.into_iter().next().unwrap();
                    let eq = &equations[equation];
                    for (table, indices) in eq.rhs.element_refs() {
                        let Some(target) = by_name.get(table).map(|&i| &tables[i]) else {
                            continue;
                        };
                        if let Err(oob) = expand_ref(target, indices, &substitution) {
                            errors.push(Diagnostic::error(
                                Code::IndexOutOfBounds,
                                eq.pos,
                                format!(
                                    "{cell} refers to {}, outside the bounds of `{table}`",
                                    format_cell(table, &oob.indices)
                                ),
                            ));
                        }
                    }
                    rules.insert(
                        cell.clone(),
                        RuleInstance {
                            cell,
                            equation,
                            substitution,
                        },
                    );
                }
                _ => {
                    let first = &equations[matches[0].0];
                    let second = &equations[matches[1].0];
                    errors.push(Diagnostic::error(
                        Code::OverlappingRules,
                        second.pos,
                        format!(
                            "{cell} is defined by the equations at {} and {}",
                            first.pos, second.pos
                        ),
                    ));
                }
            }
        }
    }

    for (eq, used) in equations.iter().zip(used) {
        if !used {
            warnings.push(Diagnostic::warning(
                Code::UnusedEquation,
                eq.pos,
                format!("equation for `{}` matches no cell", eq.table),
            ));
        }
    }

    if !errors.is_empty() {
        errors.extend(warnings);
        return Err(errors);
    }
    Ok(CellPlan {
        tables,
        equations,
        rules,
        inputs,
        warnings,
        by_name,
    })
}
