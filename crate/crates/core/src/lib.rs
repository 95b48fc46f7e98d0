//! Toolchain for table/equation spreadsheet specifications.
//!
//! A specification declares named bounds, tables over those bounds, and
//! equations defining table cells. This crate parses such documents,
//! checks and elaborates them into one rule per cell, evaluates them, and
//! compiles them to A1-notation spreadsheet grids with a differential
//! verifier.

pub mod analyzer;
pub mod eval;
pub mod layout;
pub mod syntax;
