//! Syntax tree for specification documents.

use std::fmt;

/// A location in the source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePos {
    /// 1-based line.
    pub line: u32,
    /// 1-based column, counted in characters.
    pub column: u32,
    /// 0-based byte offset into the source.
    pub byte_offset: usize,
}

impl SourcePos {
    pub fn new(line: u32, column: u32, byte_offset: usize) -> Self {
        Self {
            line,
            column,
            byte_offset,
        }
    }

    pub fn start() -> Self {
        Self::new(1, 1, 0)
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// The kind of data held by every cell of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResultType {
    General,
    Number,
    Currency,
    Date,
    Boolean,
}

impl ResultType {
    pub const ALL: [ResultType; 5] = [
        ResultType::General,
        ResultType::Number,
        ResultType::Currency,
        ResultType::Date,
        ResultType::Boolean,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResultType::General => "general",
            ResultType::Number => "number",
            ResultType::Currency => "currency",
            ResultType::Date => "date",
            ResultType::Boolean => "boolean",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == name)
    }
}

impl fmt::Display for ResultType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `bounds name: low to high.`
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsDecl {
    pub name: String,
    pub low: i64,
    pub high: i64,
    pub pos: SourcePos,
}

impl BoundsDecl {
    pub fn len(&self) -> usize {
        (self.high - self.low + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.high < self.low
    }
}

/// `table name : dims -> result_type.`
#[derive(Debug, Clone, PartialEq)]
pub struct TableDecl {
    pub name: String,
    pub dims: Vec<String>,
    pub result_type: ResultType,
    pub pos: SourcePos,
}

impl TableDecl {
    pub fn arity(&self) -> usize {
        self.dims.len()
    }
}

/// Comparator allowed in a guarded index pattern such as `t>1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
    Ne,
}

impl Comparator {
    pub fn holds(self, value: i64, bound: i64) -> bool {
        match self {
            Comparator::Lt => value < bound,
            Comparator::Le => value <= bound,
            Comparator::Gt => value > bound,
            Comparator::Ge => value >= bound,
            Comparator::Ne => value != bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Ne => "<>",
        }
    }
}

/// One index position on the left-hand side of an equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IndexPattern {
    Constant(i64),
    Var(String),
    GuardedVar(String, Comparator, i64),
}

impl IndexPattern {
    pub fn variable(&self) -> Option<&str> {
        match self {
            IndexPattern::Constant(_) => None,
            IndexPattern::Var(name) | IndexPattern::GuardedVar(name, _, _) => Some(name),
        }
    }

    /// Whether the concrete index `value` is covered by this pattern.
    pub fn accepts(&self, value: i64) -> bool {
        match self {
            IndexPattern::Constant(c) => *c == value,
            IndexPattern::Var(_) => true,
            IndexPattern::GuardedVar(_, cmp, bound) => cmp.holds(value, *bound),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
        }
    }

    /// Binding strength; higher binds tighter. All levels are left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 1,
            BinaryOp::Add | BinaryOp::Sub => 2,
            BinaryOp::Mul | BinaryOp::Div => 3,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 1
    }

    pub fn is_arithmetic(self) -> bool {
        !self.is_comparison()
    }
}

/// Precedence of unary minus, tighter than any binary operator.
pub const NEG_PRECEDENCE: u8 = 4;

/// Right-hand side expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Boolean(bool),
    /// `table[i1, i2, ...]`
    ElementRef {
        table: String,
        indices: Vec<Expr>,
    },
    IndexVar(String),
    Call {
        name: String,
        args: Vec<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Neg(Box<Expr>),
    /// The `all` marker; only meaningful as a whole index position.
    All,
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::Call {
            name: name.into(),
            args,
        }
    }

    pub fn element(table: impl Into<String>, indices: Vec<Expr>) -> Self {
        Expr::ElementRef {
            table: table.into(),
            indices,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::IndexVar(name.into())
    }

    /// Visits this node and every descendant in pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::ElementRef { indices: items, .. } | Expr::Call { args: items, .. } => {
                for item in items {
                    item.walk(f);
                }
            }
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            Expr::Neg(inner) => inner.walk(f),
            Expr::Number(_) | Expr::Boolean(_) | Expr::IndexVar(_) | Expr::All => {}
        }
    }

    /// Every element reference in the tree, including nested ones.
    pub fn element_refs(&self) -> Vec<(&str, &[Expr])> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::ElementRef { table, indices } = e {
                out.push((table.as_str(), indices.as_slice()));
            }
        });
        out
    }
}

/// `table[patterns] = rhs.`
#[derive(Debug, Clone, PartialEq)]
pub struct EquationDecl {
    pub table: String,
    pub lhs_patterns: Vec<IndexPattern>,
    pub rhs: Expr,
    pub pos: SourcePos,
}

impl EquationDecl {
    pub fn bound_variables(&self) -> impl Iterator<Item = &str> {
        self.lhs_patterns.iter().filter_map(IndexPattern::variable)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Bounds(BoundsDecl),
    Table(TableDecl),
    Equation(EquationDecl),
}

impl Element {
    pub fn pos(&self) -> SourcePos {
        match self {
            Element::Bounds(b) => b.pos,
            Element::Table(t) => t.pos,
            Element::Equation(e) => e.pos,
        }
    }

    fn with_default_pos(&self) -> Element {
        let mut e = self.clone();
        match &mut e {
            Element::Bounds(b) => b.pos = SourcePos::default(),
            Element::Table(t) => t.pos = SourcePos::default(),
            Element::Equation(q) => q.pos = SourcePos::default(),
        }
        e
    }
}

/// A block of consecutive `--` comment lines, with the marker stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub text: String,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecDocument {
    pub elements: Vec<Element>,
    pub comments: Vec<Comment>,
}

impl SpecDocument {
    pub fn bounds(&self) -> impl Iterator<Item = &BoundsDecl> {
        self.elements.iter().filter_map(|e| match e {
            Element::Bounds(b) => Some(b),
            _ => None,
        })
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableDecl> {
        self.elements.iter().filter_map(|e| match e {
            Element::Table(t) => Some(t),
            _ => None,
        })
    }

    pub fn equations(&self) -> impl Iterator<Item = &EquationDecl> {
        self.elements.iter().filter_map(|e| match e {
            Element::Equation(q) => Some(q),
            _ => None,
        })
    }

    /// Element-wise equality ignoring source positions and comments.
    pub fn structurally_eq(&self, other: &SpecDocument) -> bool {
        self.elements.len() == other.elements.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.with_default_pos() == b.with_default_pos())
    }
}
