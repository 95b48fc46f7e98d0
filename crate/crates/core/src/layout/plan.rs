//! Placement of tables on sheets.
//!
//! Tables are grouped into row bands. A band holds every table that shares
//! the same vertical bounds (the last dimension) and the same horizontal
//! dimensions, so that a given index of the vertical bounds lands on the
//! same row for all of them. Bands stack downwards in order of the first
//! declaration of a table in them. Each band has a header row of captions,
//! a sub-header row (holding 0-dim tables, or index labels above blocks)
//! and then its data rows; one blank row separates bands.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::analyzer::{CellId, CellPlan, TableInfo};

use super::address::{Address, MAX_COLUMNS, MAX_ROWS};

pub const MODEL_SHEET: &str = "Model";
pub const CAPTION_SHEET: &str = "Time";
/// Caption table used when none is named explicitly.
pub const DEFAULT_CAPTION_TABLE: &str = "time";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LayoutOptions {
    /// Table moved to its own sheet and copied into column A of the model
    /// sheet. `None` means [`DEFAULT_CAPTION_TABLE`] if it exists.
    pub caption_table: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("layout overflow: `{table}` would reach row {row}, column {column} on sheet {sheet}")]
    LayoutOverflow {
        table: String,
        sheet: String,
        row: u64,
        column: u64,
    },
    #[error("caption table `{0}` is not declared")]
    UnknownCaptionTable(String),
    #[error("caption table `{0}` must have exactly one dimension")]
    CaptionTableNotOneDimensional(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// 0-dim table: one cell.
    Scalar,
    /// 1-D table: one column running down.
    Vertical,
    /// 2-D or 3-D table: the last dimension runs down, the others across
    /// with the first dimension varying fastest.
    Block,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Scalar => "scalar",
            Orientation::Vertical => "vertical",
            Orientation::Block => "block",
        }
    }
}

/// Rectangle occupied by one table's cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub table: String,
    pub sheet: String,
    pub orientation: Orientation,
    /// Row holding the table's caption.
    pub header_row: u32,
    pub top: u32,
    pub left: u32,
    pub width: u32,
    pub height: u32,
    pub extents: Vec<(i64, i64)>,
}

impl Region {
    pub fn bottom(&self) -> u32 {
        self.top + self.height - 1
    }

    pub fn right(&self) -> u32 {
        self.left + self.width - 1
    }

    /// `B3:B14`, or a single address for one-cell regions.
    pub fn range(&self) -> String {
        let first = Address::new(&self.sheet, self.left, self.top).a1();
        if self.width == 1 && self.height == 1 {
            first
        } else {
            format!(
                "{first}:{}",
                Address::new(&self.sheet, self.right(), self.bottom()).a1()
            )
        }
    }

    /// Column offset of the horizontal indices, first dimension fastest.
    pub fn column_offset(&self, horizontal: &[i64]) -> Option<u32> {
        let mut offset = 0u64;
        let mut stride = 1u64;
        for (&i, &(lo, hi)) in horizontal.iter().zip(&self.extents) {
            if i < lo || i > hi {
                return None;
            }
            offset += (i - lo) as u64 * stride;
            stride *= (hi - lo + 1) as u64;
        }
        u32::try_from(offset).ok()
    }

    pub fn address(&self, indices: &[i64]) -> Option<Address> {
        if indices.len() != self.extents.len() {
            return None;
        }
        let (column, row) = match self.orientation {
            Orientation::Scalar => (self.left, self.top),
            Orientation::Vertical | Orientation::Block => {
                let (&last, horizontal) = indices.split_last()?;
                let (lo, hi) = *self.extents.last()?;
                if last < lo || last > hi {
                    return None;
                }
                let row = self.top + (last - lo) as u32;
                (self.left + self.column_offset(horizontal)?, row)
            }
        };
        Some(Address::new(&self.sheet, column, row))
    }
}

/// A horizontal strip of tables sharing their vertical rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub sheet: String,
    /// Bounds running down the band; `None` for a band of 0-dim tables.
    pub vertical: Option<String>,
    pub horizontal: Vec<String>,
    pub header_row: u32,
    pub sub_header_row: u32,
    pub first_row: u32,
    pub rows: u32,
    /// Tables placed in the band, left to right.
    pub tables: Vec<String>,
}

impl Band {
    /// Last row used by the band.
    pub fn end_row(&self) -> u32 {
        if self.rows == 0 {
            self.sub_header_row
        } else {
            self.first_row + self.rows - 1
        }
    }
}

/// Column of copied captions on the model sheet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptionColumn {
    pub sheet: String,
    pub column: u32,
    pub source: String,
    /// Bounds of the source table; bands running down these bounds get
    /// captions.
    pub bounds: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub sheets: Vec<String>,
    /// One region per table, in declaration order.
    pub regions: Vec<Region>,
    pub bands: Vec<Band>,
    pub caption: Option<CaptionColumn>,
    by_table: BTreeMap<String, usize>,
}

impl Layout {
    pub fn region(&self, table: &str) -> Option<&Region> {
        self.by_table.get(table).map(|&i| &self.regions[i])
    }

    pub fn address(&self, cell: &CellId) -> Option<Address> {
        self.region(&cell.table)?.address(&cell.indices)
    }

    /// Bands on the model sheet that take captions, with the caption
    /// column.
    pub fn captioned_bands(&self) -> impl Iterator<Item = &Band> {
        self.bands.iter().filter(move |b| {
            self.caption
                .as_ref()
                .is_some_and(|c| b.vertical.as_deref() == Some(c.bounds.as_str()))
        })
    }
}

fn orientation(info: &TableInfo) -> Orientation {
    match info.arity() {
        0 => Orientation::Scalar,
        1 => Orientation::Vertical,
        _ => Orientation::Block,
    }
}

fn extent_len((lo, hi): (i64, i64)) -> u64 {
    (hi - lo + 1) as u64
}

fn caption_table<'a>(
    plan: &'a CellPlan,
    options: &LayoutOptions,
) -> Result<Option<&'a TableInfo>, LayoutError> {
    match &options.caption_table {
        Some(name) => {
            let info = plan
                .table(name)
                .ok_or_else(|| LayoutError::UnknownCaptionTable(name.clone()))?;
            if info.arity() != 1 {
                return Err(LayoutError::CaptionTableNotOneDimensional(name.clone()));
            }
            Ok(Some(info))
        }
        None => Ok(plan.table(DEFAULT_CAPTION_TABLE).filter(|t| t.arity() == 1)),
    }
}

fn check_extent(table: &str, sheet: &str, row: u64, column: u64) -> Result<(), LayoutError> {
    if row > u64::from(MAX_ROWS) || column > u64::from(MAX_COLUMNS) {
        return Err(LayoutError::LayoutOverflow {
            table: table.to_string(),
            sheet: sheet.to_string(),
            row,
            column,
        });
    }
    Ok(())
}

/// Assigns every table of `plan` a region. Deterministic in the plan and
/// options.
pub fn plan_layout(plan: &CellPlan, options: &LayoutOptions) -> Result<Layout, LayoutError> {
    let caption = caption_table(plan, options)?;
    let mut regions = Vec::with_capacity(plan.tables.len());
    let mut sheets = vec![MODEL_SHEET.to_string()];

    if let Some(info) = caption {
        sheets.push(CAPTION_SHEET.to_string());
        let height = extent_len(info.extents[0]);
        check_extent(info.name(), CAPTION_SHEET, 2 + height, 1)?;
        regions.push(Region {
            table: info.name().to_string(),
            sheet: CAPTION_SHEET.to_string(),
            orientation: Orientation::Vertical,
            header_row: 1,
            top: 3,
            left: 1,
            width: 1,
            height: height as u32,
            extents: info.extents.clone(),
        });
    }

    let model_tables: Vec<&TableInfo> = plan
        .tables
        .iter()
        .filter(|t| caption.is_none_or(|c| c.name() != t.name()))
        .collect();

    // Band keys in order of first appearance; 0-dim tables join the first.
    type Key = (Option<String>, Vec<String>);
    let key_of = |t: &TableInfo| -> Key {
        match t.decl.dims.split_last() {
            Some((last, rest)) => (Some(last.clone()), rest.to_vec()),
            None => (None, Vec::new()),
        }
    };
    let mut keys: Vec<Key> = Vec::new();
    for t in model_tables.iter().filter(|t| t.arity() > 0) {
        let key = key_of(t);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    if keys.is_empty() && !model_tables.is_empty() {
        keys.push((None, Vec::new()));
    }
    let mut members: Vec<Vec<&TableInfo>> = vec![Vec::new(); keys.len()];
    for t in &model_tables {
        let band = if t.arity() == 0 {
            0
        } else {
            keys.iter()
                .position(|k| *k == key_of(t))
                .expect("key collected above")
        };
        members[band].push(t);
    }

    let first_column: u32 = if caption.is_some() { 2 } else { 1 };
    let mut bands = Vec::with_capacity(keys.len());
    let mut header_row: u64 = 1;
    for ((vertical, horizontal), tables) in keys.into_iter().zip(members) {
        let rows = tables
            .iter()
            .filter(|t| t.arity() > 0)
            .map(|t| extent_len(*t.extents.last().unwrap()))
            .next()
            .unwrap_or(0);
        let sub_header_row = header_row + 1;
        let first_row = header_row + 2;
        let mut column = u64::from(first_column);
        let mut previous_block = false;
        let mut names = Vec::with_capacity(tables.len());
        for (i, t) in tables.iter().enumerate() {
            let orientation = orientation(t);
            let is_block = orientation == Orientation::Block;
            if i > 0 && (is_block || previous_block) {
                column += 1;
            }
            let (top, width, height) = match orientation {
                Orientation::Scalar => (sub_header_row, 1, 1),
                Orientation::Vertical => (first_row, 1, rows),
                Orientation::Block => {
                    let (_, horizontal) = t.extents.split_last().unwrap();
                    (
                        first_row,
                        horizontal.iter().copied().map(extent_len).product(),
                        rows,
                    )
                }
            };
            check_extent(t.name(), MODEL_SHEET, top + height - 1, column + width - 1)?;
            regions.push(Region {
                table: t.name().to_string(),
                sheet: MODEL_SHEET.to_string(),
                orientation,
                header_row: header_row as u32,
                top: top as u32,
                left: column as u32,
                width: width as u32,
                height: height as u32,
                extents: t.extents.clone(),
            });
            names.push(t.name().to_string());
            column += width;
            previous_block = is_block;
        }
        let band = Band {
            sheet: MODEL_SHEET.to_string(),
            vertical,
            horizontal,
            header_row: header_row as u32,
            sub_header_row: sub_header_row as u32,
            first_row: first_row as u32,
            rows: rows as u32,
            tables: names,
        };
        header_row = u64::from(band.end_row()) + 2;
        bands.push(band);
    }

    // Keep regions in declaration order.
    let order: BTreeMap<&str, usize> = plan
        .tables
        .iter()
        .enumerate()
        .map(|(i, t)| (t.name(), i))
        .collect();
    regions.sort_by_key(|r| order[r.table.as_str()]);
    let by_table = regions
        .iter()
        .enumerate()
        .map(|(i, r)| (r.table.clone(), i))
        .collect();

    Ok(Layout {
        sheets,
        regions,
        bands,
        caption: caption.map(|c| CaptionColumn {
            sheet: MODEL_SHEET.to_string(),
            column: 1,
            source: c.name().to_string(),
            bounds: c.decl.dims[0].clone(),
        }),
        by_table,
    })
}
