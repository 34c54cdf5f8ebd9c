//! Syntax tree for QDL programs.
//!
//! Every node carries a [`Span`]. Statement lists are reference counted so the
//! interpreter can hold on to a block while it walks it step by step.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use crate::sim::Pauli;
use crate::sim::Gate;

/// A 1-based line/column position in the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }
}

/// Half-open source range: `start` is the first character, `end` the position
/// just past the last one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start, other.end)
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Returns the slice of `text` covered by this span.
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        let start = offset_of(text, self.start);
        let end = offset_of(text, self.end);
        &text[start.min(end)..end]
    }
}

fn offset_of(text: &str, pos: Pos) -> usize {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in text.char_indices() {
        if line == pos.line && col == pos.col {
            return i;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    text.len()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ast {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Qnode(QnodeDef),
    Fn(FnDef),
    Call(CallStmt),
}

impl Item {
    pub fn span(&self) -> Span {
        match self {
            Item::Qnode(q) => q.span,
            Item::Fn(f) => f.span,
            Item::Call(c) => c.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decorator {
    pub transform: Ident,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QnodeDef {
    pub decorators: Vec<Decorator>,
    pub name: Ident,
    pub params: Vec<Ident>,
    pub wires: usize,
    pub body: Block,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FnDef {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub body: Block,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub stmts: Arc<[Stmt]>,
    pub span: Span,
}

/// `name(args);` — a gate application, a subroutine call, or (at top level)
/// a qnode invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct CallStmt {
    pub callee: Ident,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Gate {
        gate: Gate,
        gate_span: Span,
        args: Vec<Expr>,
        span: Span,
    },
    Call(CallStmt),
    For {
        var: Ident,
        start: Expr,
        end: Expr,
        body: Block,
        span: Span,
    },
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
        span: Span,
    },
    Let {
        name: Ident,
        value: Expr,
        span: Span,
    },
    Return {
        measurements: Vec<Measurement>,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Gate { span, .. }
            | Stmt::For { span, .. }
            | Stmt::If { span, .. }
            | Stmt::Let { span, .. }
            | Stmt::Return { span, .. } => *span,
            Stmt::Call(c) => c.span,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Stmt::Gate { .. } => "gate",
            Stmt::Call(_) => "call",
            Stmt::For { .. } => "for",
            Stmt::If { .. } => "if",
            Stmt::Let { .. } => "let",
            Stmt::Return { .. } => "return",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliFactor {
    pub pauli: Pauli,
    pub wire: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    Expval { factors: Vec<PauliFactor>, span: Span },
    Probs { wires: Vec<Expr>, span: Span },
    State { span: Span },
}

impl Measurement {
    pub fn span(&self) -> Span {
        match self {
            Measurement::Expval { span, .. }
            | Measurement::Probs { span, .. }
            | Measurement::State { span } => *span,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 1,
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div => 3,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num { value: f64, span: Span },
    Var(Ident),
    Measure { wire: Box<Expr>, span: Span },
    Unary { op: UnaryOp, operand: Box<Expr>, span: Span },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, span: Span },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Num { span, .. }
            | Expr::Measure { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Binary { span, .. } => *span,
            Expr::Var(id) => id.span,
        }
    }
}

/// Clears every span in a tree so two trees can be compared structurally.
pub trait StripSpans {
    fn strip_spans(&mut self);
}

impl StripSpans for Span {
    fn strip_spans(&mut self) {
        *self = Span::default();
    }
}

impl StripSpans for Ident {
    fn strip_spans(&mut self) {
        self.span.strip_spans();
    }
}

impl<T: StripSpans> StripSpans for Vec<T> {
    fn strip_spans(&mut self) {
        self.iter_mut().for_each(StripSpans::strip_spans);
    }
}

impl<T: StripSpans> StripSpans for Option<T> {
    fn strip_spans(&mut self) {
        if let Some(v) = self {
            v.strip_spans();
        }
    }
}

impl StripSpans for Ast {
    fn strip_spans(&mut self) {
        self.items.strip_spans();
    }
}

impl StripSpans for Item {
    fn strip_spans(&mut self) {
        match self {
            Item::Qnode(q) => {
                q.decorators.iter_mut().for_each(|d| {
                    d.transform.strip_spans();
                    d.span.strip_spans();
                });
                q.name.strip_spans();
                q.params.strip_spans();
                q.body.strip_spans();
                q.span.strip_spans();
            }
            Item::Fn(f) => {
                f.name.strip_spans();
                f.params.strip_spans();
                f.body.strip_spans();
                f.span.strip_spans();
            }
            Item::Call(c) => c.strip_spans(),
        }
    }
}

impl StripSpans for Block {
    fn strip_spans(&mut self) {
        let mut stmts = self.stmts.to_vec();
        stmts.strip_spans();
        self.stmts = stmts.into();
        self.span.strip_spans();
    }
}

impl StripSpans for CallStmt {
    fn strip_spans(&mut self) {
        self.callee.strip_spans();
        self.args.strip_spans();
        self.span.strip_spans();
    }
}

impl StripSpans for Stmt {
    fn strip_spans(&mut self) {
        match self {
            Stmt::Gate {
                gate_span,
                args,
                span,
                ..
            } => {
                gate_span.strip_spans();
                args.strip_spans();
                span.strip_spans();
            }
            Stmt::Call(c) => c.strip_spans(),
            Stmt::For {
                var,
                start,
                end,
                body,
                span,
            } => {
                var.strip_spans();
                start.strip_spans();
                end.strip_spans();
                body.strip_spans();
                span.strip_spans();
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
                span,
            } => {
                cond.strip_spans();
                then_block.strip_spans();
                else_block.strip_spans();
                span.strip_spans();
            }
            Stmt::Let { name, value, span } => {
                name.strip_spans();
                value.strip_spans();
                span.strip_spans();
            }
            Stmt::Return { measurements, span } => {
                measurements.strip_spans();
                span.strip_spans();
            }
        }
    }
}

impl StripSpans for Measurement {
    fn strip_spans(&mut self) {
        match self {
            Measurement::Expval { factors, span } => {
                for f in factors.iter_mut() {
                    f.wire.strip_spans();
                    f.span.strip_spans();
                }
                span.strip_spans();
            }
            Measurement::Probs { wires, span } => {
                wires.strip_spans();
                span.strip_spans();
            }
            Measurement::State { span } => span.strip_spans(),
        }
    }
}

impl StripSpans for Expr {
    fn strip_spans(&mut self) {
        match self {
            Expr::Num { span, .. } => span.strip_spans(),
            Expr::Var(id) => id.strip_spans(),
            Expr::Measure { wire, span } => {
                wire.strip_spans();
                span.strip_spans();
            }
            Expr::Unary { operand, span, .. } => {
                operand.strip_spans();
                span.strip_spans();
            }
            Expr::Binary { lhs, rhs, span, .. } => {
                lhs.strip_spans();
                rhs.strip_spans();
                span.strip_spans();
            }
        }
    }
}

impl Ast {
    /// A copy of this tree with all spans zeroed.
    pub fn without_spans(&self) -> Ast {
        let mut ast = self.clone();
        ast.strip_spans();
        ast
    }

    pub fn structurally_eq(&self, other: &Ast) -> bool {
        self.without_spans() == other.without_spans()
    }

    pub fn qnode(&self, name: &str) -> Option<&QnodeDef> {
        self.items.iter().find_map(|item| match item {
            Item::Qnode(q) if q.name.name == name => Some(q),
            _ => None,
        })
    }

    pub fn function(&self, name: &str) -> Option<&FnDef> {
        self.items.iter().find_map(|item| match item {
            Item::Fn(f) if f.name.name == name => Some(f),
            _ => None,
        })
    }
}

// Pretty printer. The output re-parses to a structurally identical tree.

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match item {
                Item::Qnode(q) => {
                    for d in &q.decorators {
                        writeln!(f, "@transform({})", d.transform.name)?;
                    }
                    write!(
                        f,
                        "qnode {}({}) on device(wires={}) ",
                        q.name.name,
                        join_idents(&q.params),
                        q.wires
                    )?;
                    write_block(f, &q.body, 0)?;
                    writeln!(f)?;
                }
                Item::Fn(d) => {
                    write!(f, "fn {}({}) ", d.name.name, join_idents(&d.params))?;
                    write_block(f, &d.body, 0)?;
                    writeln!(f)?;
                }
                Item::Call(c) => writeln!(f, "{};", DisplayCall(c))?,
            }
        }
        Ok(())
    }
}

fn join_idents(ids: &[Ident]) -> String {
    ids.iter()
        .map(|i| i.name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn join_exprs(exprs: &[Expr]) -> String {
    exprs
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

struct DisplayCall<'a>(&'a CallStmt);

impl fmt::Display for DisplayCall<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.0.callee.name, join_exprs(&self.0.args))
    }
}

fn write_block(f: &mut fmt::Formatter<'_>, block: &Block, depth: usize) -> fmt::Result {
    writeln!(f, "{{")?;
    for stmt in block.stmts.iter() {
        write_stmt(f, stmt, depth + 1)?;
    }
    write!(f, "{}}}", "    ".repeat(depth))
}

fn write_stmt(f: &mut fmt::Formatter<'_>, stmt: &Stmt, depth: usize) -> fmt::Result {
    let indent = "    ".repeat(depth);
    match stmt {
        Stmt::Gate { gate, args, .. } => {
            writeln!(f, "{indent}{}({});", gate.name(), join_exprs(args))
        }
        Stmt::Call(c) => writeln!(f, "{indent}{};", DisplayCall(c)),
        Stmt::For {
            var,
            start,
            end,
            body,
            ..
        } => {
            write!(f, "{indent}for {} in {}..{} ", var.name, start, end)?;
            write_block(f, body, depth)?;
            writeln!(f)
        }
        Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            write!(f, "{indent}if {cond} ")?;
            write_block(f, then_block, depth)?;
            if let Some(e) = else_block {
                write!(f, " else ")?;
                write_block(f, e, depth)?;
            }
            writeln!(f)
        }
        Stmt::Let { name, value, .. } => writeln!(f, "{indent}let {} = {};", name.name, value),
        Stmt::Return { measurements, .. } => {
            let ms = measurements
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            writeln!(f, "{indent}return {ms};")
        }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measurement::Expval { factors, .. } => {
                let fs = factors
                    .iter()
                    .map(|p| format!("{}({})", p.pauli, p.wire))
                    .collect::<Vec<_>>()
                    .join(" @ ");
                write!(f, "expval({fs})")
            }
            Measurement::Probs { wires, .. } => write!(f, "probs({})", join_exprs(wires)),
            Measurement::State { .. } => f.write_str("state()"),
        }
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::Unary { .. } => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num { value, .. } => write!(f, "{value}"),
            Expr::Var(id) => f.write_str(&id.name),
            Expr::Measure { wire, .. } => write!(f, "measure({wire})"),
            Expr::Unary { operand, .. } => {
                if operand.precedence() < 4 {
                    write!(f, "-({operand})")
                } else {
                    write!(f, "-{operand}")
                }
            }
            Expr::Binary { op, lhs, rhs, .. } => {
                let p = op.precedence();
                // comparisons do not chain, so both sides need parens at equal precedence
                let lhs_parens = lhs.precedence() < p || (op.is_comparison() && lhs.precedence() == p);
                let rhs_parens = rhs.precedence() <= p;
                if lhs_parens {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if rhs_parens {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
        }
    }
}
