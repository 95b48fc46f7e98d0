//! Evaluation of cell plans.

mod builtins;
mod evaluate;
mod graph;
mod value;

pub use builtins::{
    apply_builtin, binary_op, cell_result, match_exact, negate, Arg, Builtin, EvalError,
};
pub use evaluate::{
    eval_expr, evaluate, evaluate_traced, Access, BindingError, EvaluateError, InputBindings,
    Store, ValueGrid,
};
pub use graph::{build_graph, rule_dependencies, CyclicDependency, DependencyGraph};
pub use value::{NumberFormat, Value};
