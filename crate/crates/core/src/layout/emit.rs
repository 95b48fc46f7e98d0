//! Formula and value documents, the manifest, and their files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::{CellPlan, TableClass};
use crate::eval::{InputBindings, NumberFormat, Value, ValueGrid};
use crate::syntax::{Element, ResultType, SpecDocument};

use super::address::{column_letters, Address};
use super::formula::{render_formula, RenderError};
use super::plan::{Layout, Orientation};

pub const MANIFEST_FILE: &str = "manifest.json";

/// `total_cash_at_end_of_period` becomes `Total cash at end of period`.
pub fn humanize_caption(name: &str) -> String {
    let spaced = name.replace('_', " ");
    let mut chars = spaced.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Sparse text cells of one sheet, keyed by `(row, column)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SheetGrid {
    pub name: String,
    pub cells: BTreeMap<(u32, u32), String>,
}

impl SheetGrid {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cells: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> u32 {
        self.cells.keys().map(|&(r, _)| r).max().unwrap_or(0)
    }

    pub fn columns(&self) -> u32 {
        self.cells.keys().map(|&(_, c)| c).max().unwrap_or(0)
    }

    /// Dense CSV with LF line ends; an empty sheet gives an empty string.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let columns = self.columns();
        for row in 1..=self.rows() {
            let record: Vec<&str> = (1..=columns)
                .map(|c| self.cells.get(&(row, c)).map_or("", String::as_str))
                .collect();
            writer.write_record(&record).expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("writing to memory")).expect("UTF-8 input")
    }

    pub fn from_csv(name: impl Into<String>, text: &str) -> Result<Self, csv::Error> {
        let mut grid = SheetGrid::new(name);
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        for (r, record) in reader.records().enumerate() {
            for (c, field) in record?.iter().enumerate() {
                if !field.is_empty() {
                    grid.cells
                        .insert((r as u32 + 1, c as u32 + 1), field.to_string());
                }
            }
        }
        Ok(grid)
    }
}

/// Text of every sheet, in sheet order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TextGrid {
    pub sheets: Vec<SheetGrid>,
}

impl TextGrid {
    pub fn with_sheets(names: &[String]) -> Self {
        Self {
            sheets: names.iter().map(SheetGrid::new).collect(),
        }
    }

    pub fn sheet(&self, name: &str) -> Option<&SheetGrid> {
        self.sheets.iter().find(|s| s.name == name)
    }

    pub fn get(&self, address: &Address) -> Option<&str> {
        self.sheet(&address.sheet)?
            .cells
            .get(&(address.row, address.column))
            .map(String::as_str)
    }

    /// Stores `text`; empty text clears the cell.
    pub fn set(&mut self, address: &Address, text: String) {
        let sheet = self
            .sheets
            .iter_mut()
            .find(|s| s.name == address.sheet)
            .expect("address on a known sheet");
        if text.is_empty() {
            sheet.cells.remove(&(address.row, address.column));
        } else {
            sheet.cells.insert((address.row, address.column), text);
        }
    }

    /// Every non-empty cell with its address, sheet by sheet.
    pub fn cells(&self) -> impl Iterator<Item = (Address, &str)> {
        self.sheets.iter().flat_map(|s| {
            s.cells
                .iter()
                .map(|(&(row, column), text)| (Address::new(&s.name, column, row), text.as_str()))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestCaption {
    pub sheet: String,
    pub column: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sheet: String,
    pub range: String,
    pub top: u32,
    pub left: u32,
    pub bottom: u32,
    pub right: u32,
    pub orientation: String,
    pub result_type: String,
    pub number_format: String,
    pub class: String,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub sheets: Vec<String>,
    pub caption: Option<ManifestCaption>,
    pub tables: Vec<ManifestEntry>,
}

/// Everything written for one compiled specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emission {
    pub formulas: TextGrid,
    pub values: TextGrid,
    pub manifest: Manifest,
}

#[derive(Debug, Error)]
pub enum EmitIoError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {source}", .path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

fn formulas_file(sheet: &str) -> String {
    format!("{sheet}.formulas.csv")
}

fn values_file(sheet: &str) -> String {
    format!("{sheet}.values.csv")
}

fn read(path: PathBuf) -> Result<String, EmitIoError> {
    fs::read_to_string(&path).map_err(|source| EmitIoError::Io { path, source })
}

fn write(path: PathBuf, text: &str) -> Result<(), EmitIoError> {
    fs::write(&path, text).map_err(|source| EmitIoError::Io { path, source })
}

impl Emission {
    /// Writes `<sheet>.formulas.csv`, `<sheet>.values.csv` and
    /// `manifest.json` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<(), EmitIoError> {
        fs::create_dir_all(dir).map_err(|source| EmitIoError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for sheet in &self.formulas.sheets {
            write(dir.join(formulas_file(&sheet.name)), &sheet.to_csv())?;
        }
        for sheet in &self.values.sheets {
            write(dir.join(values_file(&sheet.name)), &sheet.to_csv())?;
        }
        let path = dir.join(MANIFEST_FILE);
        let mut json =
            serde_json::to_string_pretty(&self.manifest).map_err(|source| EmitIoError::Json {
                path: path.clone(),
                source,
            })?;
        json.push('\n');
        write(path, &json)
    }

    /// Reads a directory written by [`write_to`](Emission::write_to).
    pub fn read_from(dir: &Path) -> Result<Emission, EmitIoError> {
        let path = dir.join(MANIFEST_FILE);
        let manifest: Manifest = serde_json::from_str(&read(path.clone())?)
            .map_err(|source| EmitIoError::Json { path, source })?;
        let mut formulas = TextGrid::default();
        let mut values = TextGrid::default();
        for sheet in &manifest.sheets {
            for (grid, file) in [
                (&mut formulas, formulas_file(sheet)),
                (&mut values, values_file(sheet)),
            ] {
                let path = dir.join(file);
                let parsed = SheetGrid::from_csv(sheet.clone(), &read(path.clone())?)
                    .map_err(|source| EmitIoError::Csv { path, source })?;
                grid.sheets.push(parsed);
            }
        }
        Ok(Emission {
            formulas,
            values,
            manifest,
        })
    }
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Whether `text` contains `name[` with `name` standing as a whole word.
fn names_element(text: &str, name: &str) -> bool {
    let bytes = text.as_bytes();
    text.match_indices(name).any(|(i, _)| {
        let end = i + name.len();
        (i == 0 || !is_ident_byte(bytes[i - 1])) && text[end..].trim_start().starts_with('[')
    })
}

/// Comment text per table. A comment block belongs to each table it names
/// as an element (`name[...]`); a block naming none belongs to the table
/// declared immediately before it, if any.
pub fn attach_comments(doc: &SpecDocument, plan: &CellPlan) -> BTreeMap<String, String> {
    let mut attached: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for comment in &doc.comments {
        let named: Vec<&str> = plan
            .tables
            .iter()
            .map(|t| t.name())
            .filter(|n| names_element(&comment.text, n))
            .collect();
        let targets = if named.is_empty() {
            let preceding = doc
                .elements
                .iter()
                .take_while(|e| e.pos().byte_offset < comment.pos.byte_offset)
                .last();
            match preceding {
                Some(Element::Table(t)) => vec![t.name.as_str()],
                _ => Vec::new(),
            }
        } else {
            named
        };
        for t in targets {
            attached
                .entry(t.to_string())
                .or_default()
                .push(&comment.text);
        }
    }
    attached
        .into_iter()
        .map(|(k, v)| (k, v.join("\n")))
        .collect()
}

fn format_for(result_type: ResultType) -> NumberFormat {
    match result_type {
        ResultType::Currency => NumberFormat::Currency,
        _ => NumberFormat::Plain,
    }
}

/// Builds both documents and the manifest. Derived cells get formulas,
/// bound input cells their literal, and header rows and the caption
/// column get captions. The values document repeats the captions and
/// holds every evaluated cell.
pub fn emit(
    doc: &SpecDocument,
    plan: &CellPlan,
    layout: &Layout,
    values: &ValueGrid,
    inputs: &InputBindings,
) -> Result<Emission, RenderError> {
    let mut formulas = TextGrid::with_sheets(&layout.sheets);
    let mut rendered = TextGrid::with_sheets(&layout.sheets);
    let caption = |grid_a: &mut TextGrid, grid_b: &mut TextGrid, at: Address, text: String| {
        grid_a.set(&at, text.clone());
        grid_b.set(&at, text);
    };

    for region in &layout.regions {
        let header = Address::new(&region.sheet, region.left, region.header_row);
        caption(
            &mut formulas,
            &mut rendered,
            header,
            humanize_caption(&region.table),
        );
        if region.orientation == Orientation::Block {
            let (_, horizontal) = region.extents.split_last().expect("blocks have dimensions");
            for indices in crate::analyzer::enumerate_indices(horizontal) {
                let column = region.left + region.column_offset(&indices).expect("in range");
                let label = indices
                    .iter()
                    .map(i64::to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                let at = Address::new(&region.sheet, column, region.top - 1);
                caption(&mut formulas, &mut rendered, at, label);
            }
        }
    }

    if let Some(cap) = &layout.caption {
        let source = plan
            .table(&cap.source)
            .expect("caption table is in the plan");
        let (lo, _) = source.extents[0];
        for band in layout.captioned_bands() {
            for offset in 0..band.rows {
                let text = values.at(&cap.source, &[lo + i64::from(offset)]).render();
                let at = Address::new(&cap.sheet, cap.column, band.first_row + offset);
                caption(&mut formulas, &mut rendered, at, text);
            }
        }
    }

    for info in &plan.tables {
        let format = format_for(info.decl.result_type);
        for cell in info.cells() {
            let at = layout
                .address(&cell)
                .ok_or_else(|| RenderError::UnmappedCell(cell.clone()))?;
            let text = match plan.rules.get(&cell) {
                Some(rule) => render_formula(plan, layout, rule)?,
                None => inputs
                    .get(&cell)
                    .map(|v| v.with_format(format).render())
                    .unwrap_or_default(),
            };
            formulas.set(&at, text);
            let value = values.get(&cell).copied().unwrap_or(Value::Blank);
            rendered.set(&at, value.with_format(format).render());
        }
    }

    let comments = attach_comments(doc, plan);
    let tables = layout
        .regions
        .iter()
        .map(|r| {
            let info = plan.table(&r.table).expect("regions come from the plan");
            ManifestEntry {
                name: r.table.clone(),
                sheet: r.sheet.clone(),
                range: r.range(),
                top: r.top,
                left: r.left,
                bottom: r.bottom(),
                right: r.right(),
                orientation: r.orientation.as_str().to_string(),
                result_type: info.decl.result_type.as_str().to_string(),
                number_format: match format_for(info.decl.result_type) {
                    NumberFormat::Currency => "currency",
                    NumberFormat::Plain => "plain",
                }
                .to_string(),
                class: match info.class {
                    TableClass::Input => "input",
                    TableClass::Derived => "derived",
                }
                .to_string(),
                comment: comments.get(&r.table).cloned(),
            }
        })
        .collect();
    let manifest = Manifest {
        sheets: layout.sheets.clone(),
        caption: layout.caption.as_ref().map(|c| ManifestCaption {
            sheet: c.sheet.clone(),
            column: column_letters(c.column),
            source: c.source.clone(),
        }),
        tables,
    };
    Ok(Emission {
        formulas,
        values: rendered,
        manifest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{analyze_source, CellId};
    use crate::eval::evaluate;
    use crate::layout::plan::{plan_layout, LayoutOptions};

    #[test]
    fn humanize() {
        assert_eq!(
            humanize_caption("total_cash_at_end_of_period"),
            "Total cash at end of period"
        );
        assert_eq!(humanize_caption("x"), "X");
        assert_eq!(
            humanize_caption("want_to_borrow_during_period"),
            "Want to borrow during period"
        );
        assert_eq!(humanize_caption("aBc_d"), "ABc d");
    }

    #[test]
    fn csv_roundtrip_and_line_ends() {
        let mut g = SheetGrid::new("S");
        g.cells.insert((1, 2), "a,b".into());
        g.cells.insert((3, 1), "=SUM(A1:B1)".into());
        let text = g.to_csv();
        assert_eq!(text, ",\"a,b\"\n,\n=SUM(A1:B1),\n");
        assert_eq!(SheetGrid::from_csv("S", &text).unwrap(), g);
        assert_eq!(SheetGrid::new("E").to_csv(), "");
    }

    #[test]
    fn comments_attach_by_name_or_position() {
        let src = "-- header text
bounds s: 1 to 2.
table a : s -> number.
-- describes the table above
table b : s -> number.
table c : s -> number.
-- b[t] and c[t] together; mentions a only in passing: a
b[t] = a[t].
c[t] = a[t].";
        let an = analyze_source(src).unwrap();
        let comments = attach_comments(&an.document, &an.plan);
        assert_eq!(
            comments.get("a").map(String::as_str),
            Some("describes the table above")
        );
        assert!(comments["b"].starts_with("b[t] and"));
        assert!(comments.contains_key("c"));
        assert_eq!(comments.len(), 3);
    }

    #[test]
    fn emits_literals_formulas_and_captions() {
        let src = "bounds s: 1 to 2.
table time : s -> date.
time[t] = date(2009, t, 1).
table cost : s -> currency.
table init : -> currency.
table left : s -> currency.
left[t] = init[] - cost[t].";
        let an = analyze_source(src).unwrap();
        let layout = plan_layout(&an.plan, &LayoutOptions::default()).unwrap();
        let mut inputs = InputBindings::new();
        inputs
            .bind(&an.plan, CellId::new("init", vec![]), Value::number(100.0))
            .unwrap();
        inputs
            .bind(&an.plan, CellId::new("cost", vec![1]), Value::number(2.5))
            .unwrap();
        let values = evaluate(&an.plan, &inputs).unwrap();
        let e = emit(&an.document, &an.plan, &layout, &values, &inputs).unwrap();
        let model = |c, r| Address::new("Model", c, r);
        assert_eq!(e.formulas.get(&model(2, 1)), Some("Cost"));
        assert_eq!(e.formulas.get(&model(3, 2)), Some("100.00"));
        assert_eq!(e.formulas.get(&model(2, 3)), Some("2.50"));
        assert_eq!(e.formulas.get(&model(2, 4)), None);
        assert_eq!(e.values.get(&model(2, 4)), None);
        assert_eq!(e.formulas.get(&model(4, 4)), Some("=C2-B4"));
        assert_eq!(e.values.get(&model(4, 4)), Some("100.00"));
        assert_eq!(e.formulas.get(&model(1, 3)), Some("2009-01-01"));
        assert_eq!(
            e.formulas.get(&Address::new("Time", 1, 4)),
            Some("=DATE(2009,2,1)")
        );
        assert_eq!(
            e.values.get(&Address::new("Time", 1, 4)),
            Some("2009-02-01")
        );
        assert_eq!(e.manifest.tables.len(), 4);
        assert_eq!(e.manifest.tables[1].range, "B3:B4");
        assert_eq!(e.manifest.tables[1].class, "input");
        assert_eq!(e.manifest.caption.as_ref().unwrap().source, "time");
    }

    #[test]
    fn write_and_read_back() {
        let an =
            analyze_source("table a : -> number.\ntable b : -> number.\nb[] = a[] * 2.").unwrap();
        let layout = plan_layout(&an.plan, &LayoutOptions::default()).unwrap();
        let inputs = InputBindings::new();
        let values = evaluate(&an.plan, &inputs).unwrap();
        let e = emit(&an.document, &an.plan, &layout, &values, &inputs).unwrap();
        let dir = std::env::temp_dir().join(format!("gridspec-emit-{}", std::process::id()));
        e.write_to(&dir).unwrap();
        let back = Emission::read_from(&dir).unwrap();
        fs::remove_dir_all(&dir).unwrap();
        assert_eq!(back, e);
    }
}
