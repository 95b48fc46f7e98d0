//! Static analysis: name resolution, typing and rule elaboration.

mod diagnostic;
mod elaborate;
mod symbols;
mod typecheck;

pub use diagnostic::{has_errors, Code, Diagnostic, Severity};
pub use elaborate::{
    elaborate, enumerate_indices, eval_index, match_patterns, CellPlan, OutOfBounds, RuleInstance,
    Substitution, TableClass, TableInfo,
};
pub use symbols::{resolve, CellId, SymbolTable};
pub use typecheck::{typecheck, Family, Ty};

use crate::syntax::{parse_document, SpecDocument};

/// Output of a successful analysis.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub document: SpecDocument,
    pub symbols: SymbolTable,
    pub plan: CellPlan,
}

impl Analysis {
    pub fn warnings(&self) -> &[Diagnostic] {
        &self.plan.warnings
    }
}

/// Runs resolve, typecheck and elaborate, stopping after the first stage
/// that reports errors.
pub fn analyze(doc: SpecDocument) -> Result<Analysis, Vec<Diagnostic>> {
    let (symbols, diags) = resolve(&doc);
    if has_errors(&diags) {
        return Err(diags);
    }
    let diags = typecheck(&doc, &symbols);
    if has_errors(&diags) {
        return Err(diags);
    }
    let plan = elaborate(&doc, &symbols)?;
    Ok(Analysis {
        document: doc,
        symbols,
        plan,
    })
}

/// Parses and analyzes specification text.
pub fn analyze_source(text: &str) -> Result<Analysis, Vec<Diagnostic>> {
    let doc = parse_document(text)
        .map_err(|errs| errs.iter().map(Diagnostic::from).collect::<Vec<_>>())?;
    analyze(doc)
}
