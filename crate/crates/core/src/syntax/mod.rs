//! Lexing, parsing and pretty-printing of specification documents.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{
    BinaryOp, BoundsDecl, Comment, Comparator, Element, EquationDecl, Expr, IndexPattern,
    ResultType, SourcePos, SpecDocument, TableDecl, NEG_PRECEDENCE,
};
pub use lexer::{lex, tokenize, Keyword, LexError, Symbol, Token, TokenKind};
pub use parser::{parse_document, parse_expression, ParseError, MAX_ARITY};
pub use pretty::pretty_print;
