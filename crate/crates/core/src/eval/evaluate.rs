//! Interpreter for cell plans.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::analyzer::{CellId, CellPlan, Family, Substitution, TableClass};
use crate::syntax::{Expr, ResultType};

use super::builtins::{binary_op, cell_result, negate, Arg, Builtin, EvalError};
use super::graph::{build_graph, CyclicDependency, DependencyGraph};
use super::value::{NumberFormat, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindingError {
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("table `{table}` takes {expected} index(es), got {found}")]
    BadArity {
        table: String,
        expected: usize,
        found: usize,
    },
    #[error("{cell} is outside the bounds of `{}`", .cell.table)]
    OutOfBounds { cell: CellId },
    #[error("bad value for {cell}: {reason}")]
    BadValue { cell: CellId, reason: String },
    #[error("{0} is bound more than once")]
    DuplicateBinding(CellId),
    #[error("`{0}` is defined by equations and cannot be bound")]
    BindingToDerivedTable(String),
}

/// Values supplied for input cells. Unbound input cells are blank.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputBindings {
    values: BTreeMap<CellId, Value>,
}

impl InputBindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a binding after checking it against the plan.
    pub fn bind(
        &mut self,
        plan: &CellPlan,
        cell: CellId,
        value: Value,
    ) -> Result<(), BindingError> {
        let info = plan
            .table(&cell.table)
            .ok_or_else(|| BindingError::UnknownTable(cell.table.clone()))?;
        if info.class == TableClass::Derived {
            return Err(BindingError::BindingToDerivedTable(cell.table.clone()));
        }
        if cell.indices.len() != info.arity() {
            return Err(BindingError::BadArity {
                table: cell.table.clone(),
                expected: info.arity(),
                found: cell.indices.len(),
            });
        }
        if !info.contains(&cell.indices) {
            return Err(BindingError::OutOfBounds { cell });
        }
        let family_ok = match value {
            Value::Blank => true,
            Value::Na => false,
            Value::Number(..) => Family::of(info.decl.result_type) == Family::Numeric,
            Value::Boolean(_) => {
                matches!(
                    info.decl.result_type,
                    ResultType::Boolean | ResultType::General
                )
            }
            Value::Date(_) => matches!(
                info.decl.result_type,
                ResultType::Date | ResultType::General
            ),
        };
        if !family_ok {
            return Err(BindingError::BadValue {
                reason: format!(
                    "{} value does not fit a {} table",
                    value.kind(),
                    info.decl.result_type
                ),
                cell,
            });
        }
        if self.values.contains_key(&cell) {
            return Err(BindingError::DuplicateBinding(cell));
        }
        self.values.insert(cell, value);
        Ok(())
    }

    pub fn get(&self, cell: &CellId) -> Option<&Value> {
        self.values.get(cell)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellId, &Value)> {
        self.values.iter()
    }
}

/// A value for every cell of a plan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValueGrid {
    values: BTreeMap<CellId, Value>,
}

impl ValueGrid {
    pub fn get(&self, cell: &CellId) -> Option<&Value> {
        self.values.get(cell)
    }

    /// Value of `table[indices]`; panics if the cell does not exist.
    pub fn at(&self, table: &str, indices: &[i64]) -> Value {
        self.values[&CellId::new(table, indices.to_vec())]
    }

    /// Values of a one-dimensional table in index order.
    pub fn column(&self, table: &str) -> Vec<Value> {
        self.values
            .range(CellId::new(table, vec![])..)
            .take_while(|(c, _)| c.table == table)
            .map(|(_, v)| *v)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellId, &Value)> {
        self.values.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvaluateError {
    #[error(transparent)]
    Cycle(#[from] CyclicDependency),
    #[error("runtime fault in {cell}: {reason}")]
    RuntimeFault { cell: CellId, reason: String },
}

/// One store access, recorded when tracing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Access {
    Read(CellId),
    Write(CellId),
}

/// Write-once cell store used during evaluation.
#[derive(Debug, Default)]
pub struct Store {
    values: BTreeMap<CellId, Value>,
    trace: Option<Vec<Access>>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    fn traced() -> Self {
        Self {
            values: BTreeMap::new(),
            trace: Some(Vec::new()),
        }
    }

    pub fn read(&mut self, cell: &CellId) -> Result<Value, EvalError> {
        if let Some(trace) = &mut self.trace {
            trace.push(Access::Read(cell.clone()));
        }
        self.values
            .get(cell)
            .copied()
            .ok_or_else(|| EvalError::fault(format!("{cell} read before it was computed")))
    }

    pub fn write(&mut self, cell: CellId, value: Value) -> Result<(), EvalError> {
        if let Some(trace) = &mut self.trace {
            trace.push(Access::Write(cell.clone()));
        }
        if self.values.contains_key(&cell) {
            return Err(EvalError::fault(format!("{cell} written twice")));
        }
        self.values.insert(cell, value);
        Ok(())
    }
}

/// Evaluates one expression under an index substitution.
pub fn eval_expr(
    plan: &CellPlan,
    expr: &Expr,
    env: &Substitution,
    store: &mut Store,
) -> Result<Value, EvalError> {
    match expr {
        Expr::Number(n) => Ok(Value::number(*n)),
        Expr::Boolean(b) => Ok(Value::Boolean(*b)),
        Expr::IndexVar(v) => env
            .get(v)
            .map(|&i| Value::number(i as f64))
            .ok_or_else(|| EvalError::fault(format!("unbound index variable `{v}`"))),
        Expr::All => Err(EvalError::fault("`all` used as a value")),
        Expr::Neg(inner) => negate(&eval_expr(plan, inner, env, store)?),
        Expr::Binary { op, lhs, rhs } => {
            let l = eval_expr(plan, lhs, env, store)?;
            let r = eval_expr(plan, rhs, env, store)?;
            binary_op(*op, &l, &r)
        }
        Expr::ElementRef { table, indices } => {
            if indices.iter().any(|i| matches!(i, Expr::All)) {
                return Err(EvalError::fault(format!("range `{expr}` used as a value")));
            }
            let cells = expand(plan, table, indices, env)?;
            store.read(&cells[0])
        }
        Expr::Call { name, args } => {
            let builtin =
                Builtin::from_name(name).ok_or_else(|| EvalError::UnknownFunction(name.clone()))?;
            builtin.apply(args.len(), &mut |i| match &args[i] {
                Expr::ElementRef { table, indices } if builtin.accepts_range(i) => {
                    let cells = expand(plan, table, indices, env)?;
                    if indices.iter().any(|x| matches!(x, Expr::All)) {
                        let values = cells
                            .iter()
                            .map(|c| store.read(c))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(Arg::Range(values))
                    } else {
                        Ok(Arg::Scalar(store.read(&cells[0])?))
                    }
                }
                other => Ok(Arg::Scalar(eval_expr(plan, other, env, store)?)),
            })
        }
    }
}

fn expand(
    plan: &CellPlan,
    table: &str,
    indices: &[Expr],
    env: &Substitution,
) -> Result<Vec<CellId>, EvalError> {
    plan.expand_ref(table, indices, env).map_err(|oob| {
        EvalError::fault(format!(
            "reference {} is outside its table",
            CellId::new(oob.table, oob.indices)
        ))
    })
}

fn format_for(result_type: ResultType) -> NumberFormat {
    match result_type {
        ResultType::Currency => NumberFormat::Currency,
        _ => NumberFormat::Plain,
    }
}

/// Evaluates every cell of `plan`.
pub fn evaluate(plan: &CellPlan, inputs: &InputBindings) -> Result<ValueGrid, EvaluateError> {
    let graph = build_graph(plan)?;
    evaluate_in_order(plan, &graph, inputs, Store::new()).map(|(grid, _)| grid)
}

/// Like [`evaluate`], also returning every store read and write in order.
pub fn evaluate_traced(
    plan: &CellPlan,
    inputs: &InputBindings,
) -> Result<(ValueGrid, Vec<Access>), EvaluateError> {
    let graph = build_graph(plan)?;
    evaluate_in_order(plan, &graph, inputs, Store::traced())
}

fn evaluate_in_order(
    plan: &CellPlan,
    graph: &DependencyGraph,
    inputs: &InputBindings,
    mut store: Store,
) -> Result<(ValueGrid, Vec<Access>), EvaluateError> {
    for cell in &graph.topo_order {
        let info = plan
            .table(&cell.table)
            .expect("graph nodes come from the plan");
        let format = format_for(info.decl.result_type);
        let fault = |e: EvalError| EvaluateError::RuntimeFault {
            cell: cell.clone(),
            reason: e.to_string(),
        };
        let value = match plan.rules.get(cell) {
            Some(rule) => {
                let rhs = &plan.equation(rule).rhs;
                cell_result(eval_expr(plan, rhs, &rule.substitution, &mut store).map_err(fault)?)
            }
            None => inputs.get(cell).copied().unwrap_or(Value::Blank),
        };
        store
            .write(cell.clone(), value.with_format(format))
            .map_err(fault)?;
    }
    Ok((
        ValueGrid {
            values: store.values,
        },
        store.trace.unwrap_or_default(),
    ))
}
