//! Tokenizer.
//!
//! `--` starts a comment running to the end of the line. Comments never reach
//! the token stream; consecutive comment lines are gathered into [`Comment`]
//! blocks so they can be attached to tables later.

use std::fmt;

use thiserror::Error;

use super::ast::{Comment, SourcePos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Bounds,
    Table,
    To,
    All,
    True,
    False,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Self> {
        Some(match s {
            "bounds" => Keyword::Bounds,
            "table" => Keyword::Table,
            "to" => Keyword::To,
            "all" => Keyword::All,
            "true" => Keyword::True,
            "false" => Keyword::False,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Bounds => "bounds",
            Keyword::Table => "table",
            Keyword::To => "to",
            Keyword::All => "all",
            Keyword::True => "true",
            Keyword::False => "false",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Colon,
    Arrow,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
    Dot,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Colon => ":",
            Symbol::Arrow => "->",
            Symbol::LBracket => "[",
            Symbol::RBracket => "]",
            Symbol::LParen => "(",
            Symbol::RParen => ")",
            Symbol::Comma => ",",
            Symbol::Eq => "=",
            Symbol::Plus => "+",
            Symbol::Minus => "-",
            Symbol::Star => "*",
            Symbol::Slash => "/",
            Symbol::Lt => "<",
            Symbol::Gt => ">",
            Symbol::Le => "<=",
            Symbol::Ge => ">=",
            Symbol::Ne => "<>",
            Symbol::Dot => ".",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Integer,
    Decimal,
    Keyword(Keyword),
    Symbol(Symbol),
    EndOfInput,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Identifier => f.write_str("identifier"),
            TokenKind::Integer => f.write_str("integer"),
            TokenKind::Decimal => f.write_str("decimal"),
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Symbol(s) => write!(f, "`{}`", s.as_str()),
            TokenKind::EndOfInput => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{pos}: illegal character {ch:?}")]
    IllegalCharacter { ch: char, pos: SourcePos },
}

impl LexError {
    pub fn pos(&self) -> SourcePos {
        match self {
            LexError::IllegalCharacter { pos, .. } => *pos,
        }
    }
}

/// Tokens plus the comment blocks that were skipped.
#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
}

/// Splits `text` into tokens, ending with an end-of-input token.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    lex(text).map(|l| l.tokens)
}

/// Like [`tokenize`], but also returns the comment blocks.
pub fn lex(text: &str) -> Result<Lexed, LexError> {
    let mut cursor = Cursor::new(text);
    let mut out = Lexed::default();
    // Line of the most recent comment line, if nothing but whitespace followed it.
    let mut open_comment_line: Option<u32> = None;

    while let Some(ch) = cursor.peek() {
        let pos = cursor.pos();
        if ch.is_whitespace() || (ch == '\u{feff}' && pos.byte_offset == 0) {
            cursor.bump();
            continue;
        }
        if ch == '-' && cursor.peek_second() == Some('-') {
            cursor.bump();
            cursor.bump();
            let start = cursor.offset;
            while let Some(c) = cursor.peek() {
                if c == '\n' {
                    break;
                }
                cursor.bump();
            }
            let line = text[start..cursor.offset].trim_end_matches('\r');
            let line = line.strip_prefix(' ').unwrap_or(line).trim_end();
            match (open_comment_line, out.comments.last_mut()) {
                (Some(prev), Some(block)) if prev + 1 == pos.line => {
                    block.text.push('\n');
                    block.text.push_str(line);
                }
                _ => out.comments.push(Comment {
                    text: line.to_string(),
                    pos,
                }),
            }
            open_comment_line = Some(pos.line);
            continue;
        }
        open_comment_line = None;

        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = cursor.offset;
            while cursor
                .peek()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                cursor.bump();
            }
            let word = &text[start..cursor.offset];
            let kind = match Keyword::from_ident(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Identifier,
            };
            out.tokens.push(Token {
                kind,
                text: word.to_string(),
                pos,
            });
            continue;
        }

        if ch.is_ascii_digit() {
            let start = cursor.offset;
            cursor.eat_digits();
            let mut kind = TokenKind::Integer;
            if cursor.peek() == Some('.')
                && cursor.peek_second().is_some_and(|c| c.is_ascii_digit())
            {
                cursor.bump();
                cursor.eat_digits();
                kind = TokenKind::Decimal;
            }
            out.tokens.push(Token {
                kind,
                text: text[start..cursor.offset].to_string(),
                pos,
            });
            continue;
        }

        let symbol = match (ch, cursor.peek_second()) {
            ('-', Some('>')) => Some((Symbol::Arrow, 2)),
            ('<', Some('=')) => Some((Symbol::Le, 2)),
            ('<', Some('>')) => Some((Symbol::Ne, 2)),
            ('>', Some('=')) => Some((Symbol::Ge, 2)),
            (':', _) => Some((Symbol::Colon, 1)),
            ('[', _) => Some((Symbol::LBracket, 1)),
            (']', _) => Some((Symbol::RBracket, 1)),
            ('(', _) => Some((Symbol::LParen, 1)),
            (')', _) => Some((Symbol::RParen, 1)),
            (',', _) => Some((Symbol::Comma, 1)),
            ('=', _) => Some((Symbol::Eq, 1)),
            ('+', _) => Some((Symbol::Plus, 1)),
            ('-', _) => Some((Symbol::Minus, 1)),
            ('*', _) => Some((Symbol::Star, 1)),
            ('/', _) => Some((Symbol::Slash, 1)),
            ('<', _) => Some((Symbol::Lt, 1)),
            ('>', _) => Some((Symbol::Gt, 1)),
            ('.', _) => Some((Symbol::Dot, 1)),
            _ => None,
        };
        let Some((symbol, width)) = symbol else {
            return Err(LexError::IllegalCharacter { ch, pos });
        };
        for _ in 0..width {
            cursor.bump();
        }
        out.tokens.push(Token {
            kind: TokenKind::Symbol(symbol),
            text: symbol.as_str().to_string(),
            pos,
        });
    }

    out.tokens.push(Token {
        kind: TokenKind::EndOfInput,
        text: String::new(),
        pos: cursor.pos(),
    });
    Ok(out)
}

struct Cursor<'a> {
    text: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            offset: 0,
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> SourcePos {
        SourcePos::new(self.line, self.column, self.offset)
    }

    fn peek(&self) -> Option<char> {
        self.text[self.offset..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.text[self.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.offset += c.len_utf8();
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
    }

    fn eat_digits(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text)
            .unwrap()
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn bounds_declaration() {
        use Keyword as K;
        use Symbol as S;
        use TokenKind as T;
        let toks = tokenize("bounds time_span: 1 to 12.").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                T::Keyword(K::Bounds),
                T::Identifier,
                T::Symbol(S::Colon),
                T::Integer,
                T::Keyword(K::To),
                T::Integer,
                T::Symbol(S::Dot),
                T::EndOfInput
            ]
        );
        assert_eq!(toks[1].text, "time_span");
        assert_eq!(toks[5].text, "12");
        assert_eq!(toks[5].pos, SourcePos::new(1, 24, 23));
    }

    #[test]
    fn empty_input_is_just_eoi() {
        assert_eq!(kinds(""), vec![TokenKind::EndOfInput]);
        assert_eq!(kinds("  \n\t "), vec![TokenKind::EndOfInput]);
    }

    #[test]
    fn comment_skipped_and_retained() {
        let lexed = lex("-- a note\ntable x : -> number.").unwrap();
        assert_eq!(lexed.tokens[0].kind, TokenKind::Keyword(Keyword::Table));
        assert_eq!(lexed.tokens[0].pos, SourcePos::new(2, 1, 10));
        assert_eq!(lexed.comments.len(), 1);
        assert_eq!(lexed.comments[0].text, "a note");
        assert_eq!(lexed.comments[0].pos, SourcePos::new(1, 1, 0));
    }

    #[test]
    fn consecutive_comment_lines_form_one_block() {
        let lexed = lex("-- one\n-- two\n\n-- three\nx.").unwrap();
        let texts: Vec<_> = lexed.comments.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, vec!["one\ntwo", "three"]);
    }

    #[test]
    fn dot_between_digits_is_decimal() {
        let toks = tokenize("1.5 1. 1.x").unwrap();
        let got: Vec<_> = toks.iter().map(|t| (t.kind, t.text.as_str())).collect();
        assert_eq!(
            got,
            vec![
                (TokenKind::Decimal, "1.5"),
                (TokenKind::Integer, "1"),
                (TokenKind::Symbol(Symbol::Dot), "."),
                (TokenKind::Integer, "1"),
                (TokenKind::Symbol(Symbol::Dot), "."),
                (TokenKind::Identifier, "x"),
                (TokenKind::EndOfInput, ""),
            ]
        );
    }

    #[test]
    fn compound_symbols() {
        use Symbol as S;
        let got = kinds("-> <= >= <> < > - =");
        let want: Vec<_> = [S::Arrow, S::Le, S::Ge, S::Ne, S::Lt, S::Gt, S::Minus, S::Eq]
            .into_iter()
            .map(TokenKind::Symbol)
            .chain([TokenKind::EndOfInput])
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn illegal_character_reports_position() {
        let err = tokenize("table x\n  : # ").unwrap_err();
        assert_eq!(
            err,
            LexError::IllegalCharacter {
                ch: '#',
                pos: SourcePos::new(2, 5, 12)
            }
        );
    }

    #[test]
    fn non_ascii_only_allowed_in_comments() {
        assert!(tokenize("-- B ≤ ceiling[1]\nx").is_ok());
        assert!(tokenize("x ≤ y").is_err());
    }

    #[test]
    fn leading_bom_skipped() {
        assert_eq!(
            kinds("\u{feff}x"),
            vec![TokenKind::Identifier, TokenKind::EndOfInput]
        );
    }

    #[test]
    fn offsets_are_monotone() {
        let toks = tokenize("a[ t>1 ] =\n  b[t-1] + 2.25 .").unwrap();
        for pair in toks.windows(2) {
            assert!(pair[0].pos.byte_offset < pair[1].pos.byte_offset);
        }
    }
}
