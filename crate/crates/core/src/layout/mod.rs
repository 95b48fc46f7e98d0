//! Compilation of cell plans to spreadsheet grids.

mod a1;
mod address;
mod emit;
mod formula;
mod plan;
mod verify;

pub use a1::{parse_a1_formula, A1Expr, A1ParseError, CellRef};
pub use address::{
    column_letters, parse_a1, parse_column, sheet_prefix, Address, MAX_COLUMNS, MAX_ROWS,
};
pub use emit::{
    attach_comments, emit, humanize_caption, Emission, EmitIoError, Manifest, ManifestCaption,
    ManifestEntry, SheetGrid, TextGrid, MANIFEST_FILE,
};
pub use formula::{render_formula, RenderError};
pub use plan::{
    plan_layout, Band, CaptionColumn, Layout, LayoutError, LayoutOptions, Orientation, Region,
    CAPTION_SHEET, DEFAULT_CAPTION_TABLE, MODEL_SHEET,
};
pub use verify::{verify_grid, Mismatch, VerifyReport, RELATIVE_TOLERANCE};
