//! Recursive-descent parser for specification documents.
//!
//! Errors inside one element do not stop the parse: the parser records the
//! diagnostic, skips to the next `.` terminator and carries on with the next
//! element.

use std::fmt;

use thiserror::Error;

use super::ast::{
    BinaryOp, BoundsDecl, Comparator, Element, EquationDecl, Expr, IndexPattern, ResultType,
    SourcePos, SpecDocument, TableDecl,
};
use super::lexer::{lex, Keyword, LexError, Symbol, Token, TokenKind};

/// Largest table arity the toolchain supports.
pub const MAX_ARITY: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{pos}: expected {}, found {found}", ExpectedList(.expected))]
    Unexpected {
        pos: SourcePos,
        expected: Vec<String>,
        found: String,
    },
    #[error("{pos}: {message}")]
    Invalid { pos: SourcePos, message: String },
}

impl ParseError {
    pub fn pos(&self) -> SourcePos {
        match self {
            ParseError::Lex(e) => e.pos(),
            ParseError::Unexpected { pos, .. } | ParseError::Invalid { pos, .. } => *pos,
        }
    }

    pub fn expected(&self) -> &[String] {
        match self {
            ParseError::Unexpected { expected, .. } => expected,
            _ => &[],
        }
    }
}

struct ExpectedList<'a>(&'a [String]);

impl fmt::Display for ExpectedList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            [] => f.write_str("nothing"),
            [one] => f.write_str(one),
            many => write!(f, "one of {}", many.join(", ")),
        }
    }
}

/// Parses a whole document, collecting every element-level error.
pub fn parse_document(text: &str) -> Result<SpecDocument, Vec<ParseError>> {
    let lexed = lex(text).map_err(|e| vec![ParseError::Lex(e)])?;
    let mut parser = Parser::new(lexed.tokens);
    let mut doc = SpecDocument {
        elements: Vec::new(),
        comments: lexed.comments,
    };
    let mut errors = Vec::new();
    while !parser.at_end() {
        let start = parser.index;
        match parser.element() {
            Ok(element) => doc.elements.push(element),
            Err(err) => {
                errors.push(err);
                if parser.index == start || !parser.just_terminated() {
                    parser.recover();
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

/// Parses a single right-hand-side expression with nothing after it.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let lexed = lex(text)?;
    let mut parser = Parser::new(lexed.tokens);
    let expr = parser.expr()?;
    parser.expect_kind(TokenKind::EndOfInput, "end of input")?;
    Ok(expr)
}

struct Parser {
    tokens: Vec<Token>,
    index: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        debug_assert!(matches!(
            tokens.last().map(|t| t.kind),
            Some(TokenKind::EndOfInput)
        ));
        Self { tokens, index: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.index]
    }

    fn at_end(&self) -> bool {
        self.peek().kind == TokenKind::EndOfInput
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.index].clone();
        if tok.kind != TokenKind::EndOfInput {
            self.index += 1;
        }
        tok
    }

    fn is_symbol(&self, symbol: Symbol) -> bool {
        self.peek().kind == TokenKind::Symbol(symbol)
    }

    fn eat_symbol(&mut self, symbol: Symbol) -> bool {
        if self.is_symbol(symbol) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let tok = self.peek();
        let found = match tok.kind {
            TokenKind::EndOfInput => "end of input".to_string(),
            _ => format!("`{}`", tok.text),
        };
        ParseError::Unexpected {
            pos: tok.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn expect_symbol(&mut self, symbol: Symbol) -> Result<Token, ParseError> {
        if self.is_symbol(symbol) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[&format!("`{}`", symbol.as_str())]))
        }
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn identifier(&mut self, what: &str) -> Result<Token, ParseError> {
        self.expect_kind(TokenKind::Identifier, what)
    }

    fn just_terminated(&self) -> bool {
        self.index > 0 && self.tokens[self.index - 1].kind == TokenKind::Symbol(Symbol::Dot)
    }

    /// Skips past the next element terminator.
    fn recover(&mut self) {
        while !self.at_end() {
            if self.advance().kind == TokenKind::Symbol(Symbol::Dot) {
                break;
            }
        }
    }

    fn element(&mut self) -> Result<Element, ParseError> {
        match self.peek().kind {
            TokenKind::Keyword(Keyword::Bounds) => self.bounds_decl().map(Element::Bounds),
            TokenKind::Keyword(Keyword::Table) => self.table_decl().map(Element::Table),
            TokenKind::Identifier => self.equation().map(Element::Equation),
            _ => Err(self.unexpected(&["`bounds`", "`table`", "equation"])),
        }
    }

    fn signed_integer(&mut self, what: &str) -> Result<(i64, SourcePos), ParseError> {
        let pos = self.peek().pos;
        let negative = self.eat_symbol(Symbol::Minus);
        let tok = self.expect_kind(TokenKind::Integer, what)?;
        let magnitude: i64 = tok.text.parse().map_err(|_| ParseError::Invalid {
            pos: tok.pos,
            message: format!("integer `{}` out of range", tok.text),
        })?;
        Ok((if negative { -magnitude } else { magnitude }, pos))
    }

    fn bounds_decl(&mut self) -> Result<BoundsDecl, ParseError> {
        let pos = self.advance().pos;
        let name = self.identifier("bounds name")?.text;
        self.expect_symbol(Symbol::Colon)?;
        let (low, _) = self.signed_integer("low bound")?;
        self.expect_kind(TokenKind::Keyword(Keyword::To), "`to`")?;
        let (high, high_pos) = self.signed_integer("high bound")?;
        self.expect_symbol(Symbol::Dot)?;
        if low > high {
            return Err(ParseError::Invalid {
                pos: high_pos,
                message: format!("bounds `{name}` has high bound {high} below low bound {low}"),
            });
        }
        Ok(BoundsDecl {
            name,
            low,
            high,
            pos,
        })
    }

    fn table_decl(&mut self) -> Result<TableDecl, ParseError> {
        let pos = self.advance().pos;
        let name = self.identifier("table name")?.text;
        self.expect_symbol(Symbol::Colon)?;
        let mut dims = Vec::new();
        while self.peek().kind == TokenKind::Identifier {
            let tok = self.advance();
            if dims.len() == MAX_ARITY {
                return Err(ParseError::Invalid {
                    pos: tok.pos,
                    message: format!("table `{name}` has more than {MAX_ARITY} dimensions"),
                });
            }
            dims.push(tok.text);
            self.eat_symbol(Symbol::Comma);
        }
        if !self.is_symbol(Symbol::Arrow) {
            return Err(self.unexpected(&["bounds name", "`->`"]));
        }
        self.advance();
        let type_tok = self.peek().clone();
        let result_type = match type_tok.kind {
            TokenKind::Identifier => ResultType::from_name(&type_tok.text),
            _ => None,
        };
        let Some(result_type) = result_type else {
            let names: Vec<String> = ResultType::ALL
                .iter()
                .map(|t| format!("`{}`", t.as_str()))
                .collect();
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            return Err(self.unexpected(&names));
        };
        self.advance();
        self.expect_symbol(Symbol::Dot)?;
        Ok(TableDecl {
            name,
            dims,
            result_type,
            pos,
        })
    }

    fn equation(&mut self) -> Result<EquationDecl, ParseError> {
        let head = self.advance();
        self.expect_symbol(Symbol::LBracket)?;
        let mut lhs_patterns = Vec::new();
        if !self.is_symbol(Symbol::RBracket) {
            loop {
                lhs_patterns.push(self.index_pattern()?);
                if !self.eat_symbol(Symbol::Comma) {
                    break;
                }
            }
        }
        self.expect_symbol(Symbol::RBracket)?;
        self.expect_symbol(Symbol::Eq)?;
        let rhs = self.expr()?;
        self.expect_symbol(Symbol::Dot)?;
        Ok(EquationDecl {
            table: head.text,
            lhs_patterns,
            rhs,
            pos: head.pos,
        })
    }

    fn index_pattern(&mut self) -> Result<IndexPattern, ParseError> {
        match self.peek().kind {
            TokenKind::Integer | TokenKind::Symbol(Symbol::Minus) => {
                Ok(IndexPattern::Constant(self.signed_integer("integer")?.0))
            }
            TokenKind::Identifier => {
                let name = self.advance().text;
                let cmp = match self.peek().kind {
                    TokenKind::Symbol(Symbol::Lt) => Comparator::Lt,
                    TokenKind::Symbol(Symbol::Le) => Comparator::Le,
                    TokenKind::Symbol(Symbol::Gt) => Comparator::Gt,
                    TokenKind::Symbol(Symbol::Ge) => Comparator::Ge,
                    TokenKind::Symbol(Symbol::Ne) => Comparator::Ne,
                    _ => return Ok(IndexPattern::Var(name)),
                };
                self.advance();
                let (bound, _) = self.signed_integer("integer")?;
                Ok(IndexPattern::GuardedVar(name, cmp, bound))
            }
            _ => Err(self.unexpected(&["integer", "index variable"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.additive()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Symbol(Symbol::Eq) => BinaryOp::Eq,
                TokenKind::Symbol(Symbol::Ne) => BinaryOp::Ne,
                TokenKind::Symbol(Symbol::Lt) => BinaryOp::Lt,
                TokenKind::Symbol(Symbol::Le) => BinaryOp::Le,
                TokenKind::Symbol(Symbol::Gt) => BinaryOp::Gt,
                TokenKind::Symbol(Symbol::Ge) => BinaryOp::Ge,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.additive()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Symbol(Symbol::Plus) => BinaryOp::Add,
                TokenKind::Symbol(Symbol::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Symbol(Symbol::Star) => BinaryOp::Mul,
                TokenKind::Symbol(Symbol::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_symbol(Symbol::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Integer | TokenKind::Decimal => {
                self.advance();
                let value: f64 = tok.text.parse().map_err(|_| ParseError::Invalid {
                    pos: tok.pos,
                    message: format!("bad number `{}`", tok.text),
                })?;
                Ok(Expr::Number(value))
            }
            TokenKind::Keyword(Keyword::True) => {
                self.advance();
                Ok(Expr::Boolean(true))
            }
            TokenKind::Keyword(Keyword::False) => {
                self.advance();
                Ok(Expr::Boolean(false))
            }
            TokenKind::Keyword(Keyword::All) => {
                self.advance();
                Ok(Expr::All)
            }
            TokenKind::Symbol(Symbol::LParen) => {
                self.advance();
                let inner = self.expr()?;
                self.expect_symbol(Symbol::RParen)?;
                Ok(inner)
            }
            TokenKind::Identifier => {
                self.advance();
                match self.peek().kind {
                    TokenKind::Symbol(Symbol::LParen) => {
                        self.advance();
                        let args = self.expr_list(Symbol::RParen)?;
                        Ok(Expr::Call {
                            name: tok.text,
                            args,
                        })
                    }
                    TokenKind::Symbol(Symbol::LBracket) => {
                        self.advance();
                        let indices = self.expr_list(Symbol::RBracket)?;
                        Ok(Expr::ElementRef {
                            table: tok.text,
                            indices,
                        })
                    }
                    _ => Ok(Expr::IndexVar(tok.text)),
                }
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    /// Comma-separated expressions up to and including `close`.
    fn expr_list(&mut self, close: Symbol) -> Result<Vec<Expr>, ParseError> {
        let mut items = Vec::new();
        if self.eat_symbol(close) {
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.eat_symbol(Symbol::Comma) {
                continue;
            }
            if self.eat_symbol(close) {
                return Ok(items);
            }
            return Err(self.unexpected(&["`,`", &format!("`{}`", close.as_str())]));
        }
    }
}
