//! A1 cell addresses.

use std::fmt;

/// Widest sheet supported by common spreadsheet applications.
pub const MAX_COLUMNS: u32 = 16_384;
/// Tallest sheet supported by common spreadsheet applications.
pub const MAX_ROWS: u32 = 1_048_576;

/// A cell on a named sheet. Rows and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    pub sheet: String,
    pub column: u32,
    pub row: u32,
}

impl Address {
    pub fn new(sheet: impl Into<String>, column: u32, row: u32) -> Self {
        Self {
            sheet: sheet.into(),
            column,
            row,
        }
    }

    /// `E3` form, without the sheet.
    pub fn a1(&self) -> String {
        format!("{}{}", column_letters(self.column), self.row)
    }

    /// A1 form, prefixed with the sheet when it differs from `from_sheet`.
    pub fn a1_from(&self, from_sheet: &str) -> String {
        if self.sheet == from_sheet {
            self.a1()
        } else {
            format!("{}!{}", sheet_prefix(&self.sheet), self.a1())
        }
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}!{}", sheet_prefix(&self.sheet), self.a1())
    }
}

/// Sheet name as written before `!`, quoted unless it is a plain identifier.
pub fn sheet_prefix(sheet: &str) -> String {
    let plain = sheet
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && sheet.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        sheet.to_string()
    } else {
        format!("'{}'", sheet.replace('\'', "''"))
    }
}

/// Bijective base-26 column name: 1 is `A`, 26 is `Z`, 27 is `AA`.
pub fn column_letters(mut column: u32) -> String {
    assert!(column > 0, "columns are 1-based");
    let mut letters = Vec::new();
    while column > 0 {
        let rem = (column - 1) % 26;
        letters.push(b'A' + rem as u8);
        column = (column - 1) / 26;
    }
    letters.reverse();
    String::from_utf8(letters).expect("ASCII letters")
}

/// Inverse of [`column_letters`]; case-insensitive. `None` for empty or
/// non-letter input, or a column beyond `u32`.
pub fn parse_column(letters: &str) -> Option<u32> {
    if letters.is_empty() {
        return None;
    }
    letters.bytes().try_fold(0u32, |acc, b| {
        if !b.is_ascii_alphabetic() {
            return None;
        }
        let digit = u32::from(b.to_ascii_uppercase() - b'A' + 1);
        acc.checked_mul(26)?.checked_add(digit)
    })
}

/// Splits `E3` into column and row.
pub fn parse_a1(text: &str) -> Option<(u32, u32)> {
    let split = text.find(|c: char| c.is_ascii_digit())?;
    let (letters, digits) = text.split_at(split);
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let row: u32 = digits.parse().ok()?;
    (row > 0).then_some(())?;
    Some((parse_column(letters)?, row))
}
