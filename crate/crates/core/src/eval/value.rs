//! Runtime values and their text forms.

use std::fmt;

use chrono::{Datelike, NaiveDate};

/// Display tag carried by numbers. Never affects arithmetic or comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NumberFormat {
    #[default]
    Plain,
    Currency,
}

#[derive(Debug, Clone, Copy)]
pub enum Value {
    Blank,
    Number(f64, NumberFormat),
    Boolean(bool),
    Date(NaiveDate),
    /// `#N/A`, the only error value.
    Na,
}

impl Value {
    pub fn number(n: f64) -> Value {
        Value::Number(n, NumberFormat::Plain)
    }

    pub fn currency(n: f64) -> Value {
        Value::Number(n, NumberFormat::Currency)
    }

    pub fn date(year: i32, month: u32, day: u32) -> Option<Value> {
        NaiveDate::from_ymd_opt(year, month, day).map(Value::Date)
    }

    pub fn is_na(&self) -> bool {
        matches!(self, Value::Na)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n, _) => Some(*n),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Blank => "blank",
            Value::Number(..) => "number",
            Value::Boolean(_) => "boolean",
            Value::Date(_) => "date",
            Value::Na => "#N/A",
        }
    }

    /// Same value with a different number format; non-numbers unchanged.
    pub fn with_format(self, format: NumberFormat) -> Value {
        match self {
            Value::Number(n, _) => Value::Number(n, format),
            other => other,
        }
    }

    /// Text used in value documents: currency with two decimals, booleans
    /// upper-case, dates as `YYYY-MM-DD`, blanks empty.
    ///
    /// Currency falls back to the shortest exact form when two decimals
    /// would lose information, so the text always parses back to the same
    /// number.
    pub fn render(&self) -> String {
        match *self {
            Value::Blank => String::new(),
            Value::Number(n, format) => {
                let n = if n == 0.0 { 0.0 } else { n };
                if format == NumberFormat::Currency {
                    let fixed = format!("{n:.2}");
                    if fixed.parse::<f64>() == Ok(n) {
                        return fixed;
                    }
                }
                format!("{n}")
            }
            Value::Boolean(true) => "TRUE".to_string(),
            Value::Boolean(false) => "FALSE".to_string(),
            Value::Date(d) => format!("{:04}-{:02}-{:02}", d.year(), d.month(), d.day()),
            Value::Na => "#N/A".to_string(),
        }
    }

    /// Inverse of [`render`](Value::render). Boolean words are accepted in
    /// any case. Returns `None` for text that is not a value.
    pub fn parse_text(text: &str) -> Option<Value> {
        let text = text.trim();
        if text.is_empty() {
            return Some(Value::Blank);
        }
        if text == "#N/A" {
            return Some(Value::Na);
        }
        if text.eq_ignore_ascii_case("true") {
            return Some(Value::Boolean(true));
        }
        if text.eq_ignore_ascii_case("false") {
            return Some(Value::Boolean(false));
        }
        if let Some(date) = parse_iso_date(text) {
            return Some(Value::Date(date));
        }
        let numeric = text
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
        if numeric {
            if let Ok(n) = text.parse::<f64>() {
                if n.is_finite() {
                    return Some(Value::number(n));
                }
            }
        }
        None
    }
}

fn parse_iso_date(text: &str) -> Option<NaiveDate> {
    let b = text.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d").ok()
}

/// Equality ignores number format tags.
impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Blank, Value::Blank) | (Value::Na, Value::Na) => true,
            (Value::Number(a, _), Value::Number(b, _)) => a == b,
            (Value::Boolean(a), Value::Boolean(b)) => a == b,
            (Value::Date(a), Value::Date(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Blank => f.write_str("(blank)"),
            other => f.write_str(&other.render()),
        }
    }
}
