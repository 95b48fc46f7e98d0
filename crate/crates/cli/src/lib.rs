//! Command-line front end.
//!
//! Commands write data to `out` and diagnostics to `err`, and return the
//! process exit code: 0 success, 1 diagnostics or verification mismatches,
//! 2 I/O or parse failure, 3 runtime fault or dependency cycle.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use gridspec::analyzer::{analyze_source, Analysis, CellId};
use gridspec::eval::{evaluate, BindingError, InputBindings, Value};
use gridspec::layout::{emit, plan_layout, verify_grid, Emission, LayoutOptions, MODEL_SHEET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Mismatches listed by `verify` before the rest are summarised.
pub const MISMATCH_LIMIT: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "gridspec",
    version,
    about = "Check, evaluate and compile spreadsheet specifications"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and analyse a specification, printing diagnostics.
    Check { spec: PathBuf },
    /// Evaluate a specification and write its laid-out values.
    Eval {
        spec: PathBuf,
        #[arg(long)]
        inputs: Option<PathBuf>,
        /// File for the model sheet's values; stdout when omitted.
        #[arg(long, conflicts_with = "out_dir")]
        out: Option<PathBuf>,
        /// Directory for `<sheet>.values.csv` files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        caption_table: Option<String>,
    },
    /// Write formula grids, value grids and a manifest to a directory.
    Compile {
        spec: PathBuf,
        #[arg(long)]
        inputs: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        caption_table: Option<String>,
    },
    /// Re-check every formula of a compiled directory against its values.
    Verify { dir: PathBuf },
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}:{line}: empty record", .path.display())]
    EmptyRecord { path: PathBuf, line: u64 },
    #[error("{}:{line}: `{text}` is not an integer index", .path.display())]
    BadIndex {
        path: PathBuf,
        line: u64,
        text: String,
    },
    #[error("{}:{line}: {source}", .path.display())]
    Binding {
        path: PathBuf,
        line: u64,
        source: BindingError,
    },
}

impl InputError {
    /// I/O and CSV syntax problems are exit code 2; bad bindings are 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            InputError::Io { .. } | InputError::Csv { .. } => EXIT_IO,
            _ => EXIT_DIAGNOSTICS,
        }
    }
}

/// Reads `table,i1,...,ik,value` records (no header row) into bindings
/// checked against `analysis`. Values are numbers, `true`/`false`, or
/// `YYYY-MM-DD` dates.
pub fn load_inputs(path: &Path, analysis: &Analysis) -> Result<InputBindings, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_inputs(&text, path, analysis)
}

/// [`load_inputs`] on text already in memory; `path` is used in messages.
pub fn parse_inputs(
    text: &str,
    path: &Path,
    analysis: &Analysis,
) -> Result<InputBindings, InputError> {
    let plan = &analysis.plan;
    let mut bindings = InputBindings::new();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    for record in reader.records() {
        let record = record.map_err(|source| InputError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        // The reader's position includes blank lines skipped before the
        // record, so step over them when counting.
        let line = record.position().map_or(0, |p| {
            let bytes = text.as_bytes();
            let mut start = p.byte() as usize;
            while start < bytes.len() && matches!(bytes[start], b'\n' | b'\r') {
                start += 1;
            }
            bytes[..start].iter().filter(|&&b| b == b'\n').count() as u64 + 1
        });
        let binding = |source| InputError::Binding {
            path: path.to_path_buf(),
            line,
            source,
        };
        let fields: Vec<&str> = record.iter().collect();
        let (table, rest) = match fields.split_first() {
            Some((t, rest)) if !t.is_empty() => (*t, rest),
            _ => {
                return Err(InputError::EmptyRecord {
                    path: path.to_path_buf(),
                    line,
                })
            }
        };
        let info = plan
            .table(table)
            .ok_or_else(|| binding(BindingError::UnknownTable(table.to_string())))?;
        if rest.len() != info.arity() + 1 {
            return Err(binding(BindingError::BadArity {
                table: table.to_string(),
                expected: info.arity(),
                found: rest.len().saturating_sub(1),
            }));
        }
        let (value_text, index_texts) = rest.split_last().expect("arity checked");
        let indices = index_texts
            .iter()
            .map(|t| {
                t.parse::<i64>().map_err(|_| InputError::BadIndex {
                    path: path.to_path_buf(),
                    line,
                    text: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cell = CellId::new(table, indices);
        let value = match Value::parse_text(value_text) {
            Some(v @ (Value::Number(..) | Value::Boolean(_) | Value::Date(_))) => v,
            _ => {
                return Err(binding(BindingError::BadValue {
                    cell,
                    reason: format!(
                        "`{value_text}` is not a number, true/false or YYYY-MM-DD date"
                    ),
                }))
            }
        };
        if bindings.get(&cell).is_some() {
            return Err(binding(BindingError::DuplicateBinding(cell)));
        }
        bindings.bind(plan, cell, value).map_err(binding)?;
    }
    Ok(bindings)
}

/// Runs a parsed command line.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Check { spec } => cmd_check(&spec, out, err),
        Command::Eval {
            spec,
            inputs,
            out: out_path,
            out_dir,
            caption_table,
        } => cmd_eval(
            &spec,
            inputs.as_deref(),
            out_path.as_deref(),
            out_dir.as_deref(),
            caption_table,
            out,
            err,
        ),
        Command::Compile {
            spec,
            inputs,
            out_dir,
            caption_table,
        } => cmd_compile(&spec, inputs.as_deref(), &out_dir, caption_table, err),
        Command::Verify { dir } => cmd_verify(&dir, out, err),
    }
}

fn read_spec(spec: &Path, err: &mut dyn Write) -> Result<String, i32> {
    std::fs::read_to_string(spec).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", spec.display());
        EXIT_IO
    })
}

/// Analysis with warnings written to `diag`; errors give exit code 1.
fn analyze(spec: &Path, diag: &mut dyn Write, err: &mut dyn Write) -> Result<Analysis, i32> {
    let text = read_spec(spec, err)?;
    match analyze_source(&text) {
        Ok(analysis) => {
            for w in analysis.warnings() {
                let _ = writeln!(diag, "{w}");
            }
            Ok(analysis)
        }
        Err(diagnostics) => {
            for d in &diagnostics {
                let _ = writeln!(diag, "{d}");
            }
            Err(EXIT_DIAGNOSTICS)
        }
    }
}

pub fn cmd_check(spec: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match analyze(spec, out, err) {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    }
}

/// Analysis, inputs, evaluation, layout and emission shared by `eval` and
/// `compile`.
fn build(
    spec: &Path,
    inputs: Option<&Path>,
    caption_table: Option<String>,
    err: &mut dyn Write,
) -> Result<Emission, i32> {
    let mut diag = Vec::new();
    let analysis = analyze(spec, &mut diag, err);
    let _ = err.write_all(&diag);
    let analysis = analysis?;
    let bindings = match inputs {
        Some(path) => load_inputs(path, &analysis).map_err(|e| {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        })?,
        None => InputBindings::new(),
    };
    let values = evaluate(&analysis.plan, &bindings).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_RUNTIME
    })?;
    let options = LayoutOptions { caption_table };
    let layout = plan_layout(&analysis.plan, &options).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_DIAGNOSTICS
    })?;
    emit(
        &analysis.document,
        &analysis.plan,
        &layout,
        &values,
        &bindings,
    )
    .map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_DIAGNOSTICS
    })
}

pub fn cmd_eval(
    spec: &Path,
    inputs: Option<&Path>,
    out_path: Option<&Path>,
    out_dir: Option<&Path>,
    caption_table: Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let emission = match build(spec, inputs, caption_table, err) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let write = |path: &Path, text: &str, err: &mut dyn Write| {
        std::fs::write(path, text).map_err(|e| {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            EXIT_IO
        })
    };
    let result = if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| {
                let _ = writeln!(err, "error: {}: {e}", dir.display());
                EXIT_IO
            })
            .and_then(|()| {
                emission.values.sheets.iter().try_for_each(|s| {
                    write(
                        &dir.join(format!("{}.values.csv", s.name)),
                        &s.to_csv(),
                        err,
                    )
                })
            })
    } else {
        let model = emission
            .values
            .sheet(MODEL_SHEET)
            .map(|s| s.to_csv())
            .unwrap_or_default();
        match out_path {
            Some(path) => write(path, &model, err),
            None => out.write_all(model.as_bytes()).map_err(|_| EXIT_IO),
        }
    };
    result.err().unwrap_or(EXIT_OK)
}

pub fn cmd_compile(
    spec: &Path,
    inputs: Option<&Path>,
    out_dir: &Path,
    caption_table: Option<String>,
    err: &mut dyn Write,
) -> i32 {
    let emission = match build(spec, inputs, caption_table, err) {
        Ok(e) => e,
        Err(code) => return code,
    };
    match emission.write_to(out_dir) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_IO
        }
    }
}

pub fn cmd_verify(dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let emission = match Emission::read_from(dir) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_IO;
        }
    };
    let report = verify_grid(&emission.formulas, &emission.values);
    let _ = writeln!(
        out,
        "checked {} formula cell(s), {} mismatch(es)",
        report.checked,
        report.mismatches.len()
    );
    for m in report.mismatches.iter().take(MISMATCH_LIMIT) {
        let _ = writeln!(
            out,
            "mismatch {}: {} stored `{}`, recomputed `{}`",
            m.address, m.formula, m.expected, m.actual
        );
    }
    if report.mismatches.len() > MISMATCH_LIMIT {
        let _ = writeln!(out, "... {} more", report.mismatches.len() - MISMATCH_LIMIT);
    }
    if report.is_clean() {
        EXIT_OK
    } else {
        EXIT_DIAGNOSTICS
    }
}
