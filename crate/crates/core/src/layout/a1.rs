//! Parser for emitted A1-notation formulas.
//!
//! The grammar mirrors specification expressions: numbers, `TRUE`/`FALSE`,
//! function calls, unary minus, the binary operators with the same
//! precedence, and parentheses. Element references are replaced by cell
//! addresses and `first:last` ranges, optionally prefixed by `Sheet!` or
//! `'Sheet name'!`.

use thiserror::Error;

use crate::syntax::BinaryOp;

use super::address::{parse_a1, Address};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellRef {
    /// `None` means the sheet holding the formula.
    pub sheet: Option<String>,
    pub column: u32,
    pub row: u32,
}

impl CellRef {
    pub fn resolve(&self, home: &str) -> Address {
        Address::new(self.sheet.as_deref().unwrap_or(home), self.column, self.row)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum A1Expr {
    Number(f64),
    Boolean(bool),
    Ref(CellRef),
    /// Inclusive rectangle; both corners are on the first corner's sheet.
    Range(CellRef, CellRef),
    Call {
        name: String,
        args: Vec<A1Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<A1Expr>,
        rhs: Box<A1Expr>,
    },
    Neg(Box<A1Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum A1ParseError {
    #[error("formula must start with `=`")]
    MissingEquals,
    #[error("at offset {offset}: expected {expected}, found {found}")]
    Unexpected {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("at offset {offset}: `{text}` is not a cell reference")]
    BadReference { offset: usize, text: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Word(String),
    Quoted(String),
    Op(BinaryOp),
    Bang,
    Colon,
    Comma,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number {n}"),
            Tok::Word(w) => format!("`{w}`"),
            Tok::Quoted(s) => format!("sheet name '{s}'"),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::Bang => "`!`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of formula".into(),
        }
    }
}

fn lex(text: &str, base: usize) -> Result<Vec<(usize, Tok)>, A1ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let unexpected = |i: usize, found: String| A1ParseError::Unexpected {
        offset: base + i,
        expected: "a token",
        found,
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                Tok::Number(
                    lit.parse()
                        .map_err(|_| unexpected(start, format!("`{lit}`")))?,
                )
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Word(text[start..i].to_string())
            }
            b'\'' => {
                let mut name = String::new();
                i += 1;
                loop {
                    match bytes.get(i) {
                        None => return Err(unexpected(start, "unterminated sheet name".into())),
                        Some(b'\'') if bytes.get(i + 1) == Some(&b'\'') => {
                            name.push('\'');
                            i += 2;
                        }
                        Some(b'\'') => {
                            i += 1;
                            break;
                        }
                        Some(_) => {
                            let ch = text[i..].chars().next().unwrap();
                            name.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                Tok::Quoted(name)
            }
            _ => {
                let two = text.get(i..i + 2);
                let (tok, len) = match (c, two) {
                    (_, Some("<=")) => (Tok::Op(BinaryOp::Le), 2),
                    (_, Some(">=")) => (Tok::Op(BinaryOp::Ge), 2),
                    (_, Some("<>")) => (Tok::Op(BinaryOp::Ne), 2),
                    (b'<', _) => (Tok::Op(BinaryOp::Lt), 1),
                    (b'>', _) => (Tok::Op(BinaryOp::Gt), 1),
                    (b'=', _) => (Tok::Op(BinaryOp::Eq), 1),
                    (b'+', _) => (Tok::Op(BinaryOp::Add), 1),
                    (b'-', _) => (Tok::Op(BinaryOp::Sub), 1),
                    (b'*', _) => (Tok::Op(BinaryOp::Mul), 1),
                    (b'/', _) => (Tok::Op(BinaryOp::Div), 1),
                    (b'!', _) => (Tok::Bang, 1),
                    (b':', _) => (Tok::Colon, 1),
                    (b',', _) => (Tok::Comma, 1),
                    (b'(', _) => (Tok::LParen, 1),
                    (b')', _) => (Tok::RParen, 1),
                    _ => {
                        let ch = text[i..].chars().next().unwrap();
                        return Err(unexpected(i, format!("`{ch}`")));
                    }
                };
                i += len;
                tok
            }
        };
        out.push((base + start, tok));
    }
    out.push((base + text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].1
    }

    fn offset(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn error(&self, expected: &'static str) -> A1ParseError {
        A1ParseError::Unexpected {
            offset: self.offset(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), A1ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn binary(&mut self, min: u8) -> Result<A1Expr, A1ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(op) = *self.peek() {
            if op.precedence() < min {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = A1Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<A1Expr, A1ParseError> {
        if *self.peek() == Tok::Op(BinaryOp::Sub) {
            self.bump();
            return Ok(A1Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn cell(&mut self, sheet: Option<String>) -> Result<CellRef, A1ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Word(w) => {
                let (column, row) =
                    parse_a1(&w).ok_or(A1ParseError::BadReference { offset, text: w })?;
                Ok(CellRef { sheet, column, row })
            }
            other => Err(A1ParseError::Unexpected {
                offset,
                expected: "a cell reference",
                found: other.describe(),
            }),
        }
    }

    fn reference(&mut self, sheet: Option<String>) -> Result<A1Expr, A1ParseError> {
        let first = self.cell(sheet.clone())?;
        if *self.peek() == Tok::Colon {
            self.bump();
            let last = self.cell(sheet)?;
            return Ok(A1Expr::Range(first, last));
        }
        Ok(A1Expr::Ref(first))
    }

    fn primary(&mut self) -> Result<A1Expr, A1ParseError> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(A1Expr::Number(n))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.binary(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Quoted(sheet) => {
                self.bump();
                self.expect(Tok::Bang, "`!`")?;
                self.reference(Some(sheet))
            }
            Tok::Word(w) => match self.peek2() {
                Tok::LParen => {
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.binary(0)?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                    Ok(A1Expr::Call {
                        name: w.to_ascii_uppercase(),
                        args,
                    })
                }
                Tok::Bang => {
                    self.bump();
                    self.bump();
                    self.reference(Some(w))
                }
                _ if w.eq_ignore_ascii_case("true") => {
                    self.bump();
                    Ok(A1Expr::Boolean(true))
                }
                _ if w.eq_ignore_ascii_case("false") => {
                    self.bump();
                    Ok(A1Expr::Boolean(false))
                }
                _ => self.reference(None),
            },
            _ => Err(self.error("an expression")),
        }
    }
}

/// Parses formula text such as `=MATCH(TRUE,B25:E25,0)`.
pub fn parse_a1_formula(text: &str) -> Result<A1Expr, A1ParseError> {
    let body = text.strip_prefix('=').ok_or(A1ParseError::MissingEquals)?;
    let mut parser = Parser {
        toks: lex(body, 1)?,
        at: 0,
    };
    let expr = parser.binary(0)?;
    if *parser.peek() != Tok::End {
        return Err(parser.error("an operator or end of formula"));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(column: u32, row: u32) -> CellRef {
        CellRef {
            sheet: None,
            column,
            row,
        }
    }

    #[test]
    fn subtraction() {
        assert_eq!(
            parse_a1_formula("=D3-B3").unwrap(),
            A1Expr::Binary {
                op: BinaryOp::Sub,
                lhs: Box::new(A1Expr::Ref(r(4, 3))),
                rhs: Box::new(A1Expr::Ref(r(2, 3))),
            }
        );
    }

    #[test]
    fn match_with_range() {
        assert_eq!(
            parse_a1_formula("=MATCH(TRUE,B25:E25,0)").unwrap(),
            A1Expr::Call {
                name: "MATCH".into(),
                args: vec![
                    A1Expr::Boolean(true),
                    A1Expr::Range(r(2, 25), r(5, 25)),
                    A1Expr::Number(0.0)
                ],
            }
        );
    }

    #[test]
    fn literal_and_sheets() {
        assert_eq!(parse_a1_formula("=1").unwrap(), A1Expr::Number(1.0));
        let time = CellRef {
            sheet: Some("Time".into()),
            column: 1,
            row: 3,
        };
        assert_eq!(
            parse_a1_formula("=Time!A3").unwrap(),
            A1Expr::Ref(time.clone())
        );
        let quoted = CellRef {
            sheet: Some("It's".into()),
            ..time
        };
        assert_eq!(
            parse_a1_formula("='It''s'!A3").unwrap(),
            A1Expr::Ref(quoted)
        );
    }

    #[test]
    fn precedence_and_unary() {
        let e = parse_a1_formula("=1+2*-A1<=3").unwrap();
        let A1Expr::Binary { op, lhs, .. } = e else {
            panic!()
        };
        assert_eq!(op, BinaryOp::Le);
        let A1Expr::Binary { op, rhs, .. } = *lhs else {
            panic!()
        };
        assert_eq!(op, BinaryOp::Add);
        let A1Expr::Binary { op, rhs, .. } = *rhs else {
            panic!()
        };
        assert_eq!(op, BinaryOp::Mul);
        assert_eq!(*rhs, A1Expr::Neg(Box::new(A1Expr::Ref(r(1, 1)))));
        assert_eq!(
            parse_a1_formula("=(1-2)-3").unwrap(),
            parse_a1_formula("=1-2-3").unwrap()
        );
    }

    #[test]
    fn errors() {
        assert_eq!(parse_a1_formula("1"), Err(A1ParseError::MissingEquals));
        assert!(matches!(
            parse_a1_formula("=1+"),
            Err(A1ParseError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_a1_formula("=ZZZZZZZZ"),
            Err(A1ParseError::BadReference { .. })
        ));
        assert!(matches!(
            parse_a1_formula("=SUM(A1"),
            Err(A1ParseError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_a1_formula("=A1 A2"),
            Err(A1ParseError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_a1_formula("=A1#"),
            Err(A1ParseError::Unexpected { .. })
        ));
    }
}
