//! Cell-level dependency graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::analyzer::{CellId, CellPlan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cyclic dependency: {}", PathDisplay(.path))]
pub struct CyclicDependency {
    /// Cells along the cycle; the first cell is repeated at the end.
    pub path: Vec<CellId>,
}

struct PathDisplay<'a>(&'a [CellId]);

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, cell) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{cell}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DependencyGraph {
    /// All cells, in table declaration order.
    pub nodes: Vec<CellId>,
    /// Cell to the cells its rule reads. Input cells map to an empty set.
    pub edges: BTreeMap<CellId, BTreeSet<CellId>>,
    /// Every node once, each after all of its dependencies.
    pub topo_order: Vec<CellId>,
}

impl DependencyGraph {
    pub fn dependencies(&self, cell: &CellId) -> impl Iterator<Item = &CellId> {
        self.edges.get(cell).into_iter().flatten()
    }
}

/// Cells read by `cell`'s rule, with `all` references expanded. References
/// in both branches of an `IF` count.
pub fn rule_dependencies(plan: &CellPlan, cell: &CellId) -> BTreeSet<CellId> {
    let mut deps = BTreeSet::new();
    if let Some(rule) = plan.rules.get(cell) {
        for (table, indices) in plan.equation(rule).rhs.element_refs() {
            if let Ok(cells) = plan.expand_ref(table, indices, &rule.substitution) {
                deps.extend(cells);
            }
        }
    }
    deps
}

pub fn build_graph(plan: &CellPlan) -> Result<DependencyGraph, CyclicDependency> {
    let nodes: Vec<CellId> = plan.cells().collect();
    let edges: BTreeMap<CellId, BTreeSet<CellId>> = nodes
        .iter()
        .map(|c| (c.clone(), rule_dependencies(plan, c)))
        .collect();

    let index: HashMap<&CellId, usize> = nodes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let adjacency: Vec<Vec<usize>> = nodes
        .iter()
        .map(|c| {
            edges[c]
                .iter()
                .filter_map(|d| index.get(d).copied())
                .collect()
        })
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut marks = vec![Mark::New; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    // (node, next child position)
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for root in 0..nodes.len() {
        if marks[root] != Mark::New {
            continue;
        }
        marks[root] = Mark::Active;
        stack.push((root, 0));
        while let Some(top) = stack.last_mut() {
            let (node, child) = *top;
            if let Some(&next) = adjacency[node].get(child) {
                top.1 += 1;
                match marks[next] {
                    Mark::New => {
                        marks[next] = Mark::Active;
                        stack.push((next, 0));
                    }
                    Mark::Active => {
                        let start = stack.iter().position(|&(n, _)| n == next).unwrap();
                        let mut path: Vec<CellId> = stack[start..]
                            .iter()
                            .map(|&(n, _)| nodes[n].clone())
                            .collect();
                        path.push(nodes[next].clone());
                        return Err(CyclicDependency { path });
                    }
                    Mark::Done => {}
                }
            } else {
                marks[node] = Mark::Done;
                order.push(node);
                stack.pop();
            }
        }
    }

    let topo_order = order.into_iter().map(|i| nodes[i].clone()).collect();
    Ok(DependencyGraph {
        nodes,
        edges,
        topo_order,
    })
}
