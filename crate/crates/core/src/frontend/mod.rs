//! QDL frontend: lexing, parsing, semantic checks and line bookkeeping.
//!
//! ```text
//! program    := item* ;
//! item       := qnode_def | fn_def | call_stmt ;
//! qnode_def  := decorator* "qnode" IDENT "(" params? ")" "on" "device" "(" "wires" "=" INT ")" block ;
//! decorator  := "@transform" "(" IDENT ")" ;
//! fn_def     := "fn" IDENT "(" params? ")" block ;
//! block      := "{" stmt* "}" ;
//! stmt       := gate_stmt | sub_call ";" | for_stmt | if_stmt | let_stmt | return_stmt ;
//! gate_stmt  := GATE "(" args ")" ";" ;
//! for_stmt   := "for" IDENT "in" expr ".." expr block ;
//! if_stmt    := "if" expr block ("else" block)? ;
//! let_stmt   := "let" IDENT "=" expr ";" ;
//! return_stmt:= "return" meas ("," meas)* ";" ;
//! meas       := "expval" "(" pauli ")" | "probs" "(" args ")" | "state" "(" ")" ;
//! pauli      := PAULI "(" expr ")" ("@" PAULI "(" expr ")")* ;
//! call_stmt  := IDENT "(" args? ")" ";" ;
//! ```
//!
//! Expressions are numbers, identifiers, `pi`, `measure(w)`, unary minus,
//! `+ - * /` and one non-chaining comparison. `#` starts a line comment.

pub mod ast;
mod check;
mod diagnostic;
mod lexer;
mod parser;

use std::collections::BTreeSet;

pub use ast::Ast;
pub use check::{check, CONSTANTS};
pub use diagnostic::{has_errors, Diagnostic, Phase, Severity};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, KEYWORDS};

use ast::{Block, Item, Stmt};

/// Program text plus a short name used in messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceProgram {
    pub name: String,
    pub text: String,
}

impl SourceProgram {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        SourceProgram {
            name: name.into(),
            text: text.into(),
        }
    }

    pub fn parse(&self) -> Result<Ast, Vec<Diagnostic>> {
        parse(&self.text)
    }

    /// Parses and checks. Returns the tree together with any warnings, or
    /// every diagnostic if at least one is an error.
    pub fn compile(&self) -> Result<(Ast, Vec<Diagnostic>), Vec<Diagnostic>> {
        compile(&self.text)
    }
}

/// Parse followed by check.
pub fn compile(text: &str) -> Result<(Ast, Vec<Diagnostic>), Vec<Diagnostic>> {
    let ast = parse(text)?;
    let diags = check(&ast);
    if has_errors(&diags) {
        Err(diags)
    } else {
        Ok((ast, diags))
    }
}

/// Lines holding the start of a statement (including top-level calls) or a
/// transform decorator: the lines on which a breakpoint can fire.
pub fn executable_lines(ast: &Ast) -> BTreeSet<usize> {
    let mut lines = BTreeSet::new();
    for item in &ast.items {
        match item {
            Item::Qnode(q) => {
                lines.extend(q.decorators.iter().map(|d| d.span.start.line));
                block_lines(&q.body, &mut lines);
            }
            Item::Fn(f) => block_lines(&f.body, &mut lines),
            Item::Call(c) => {
                lines.insert(c.span.start.line);
            }
        }
    }
    lines
}

fn block_lines(block: &Block, lines: &mut BTreeSet<usize>) {
    for stmt in block.stmts.iter() {
        lines.insert(stmt.span().start.line);
        match stmt {
            Stmt::For { body, .. } => block_lines(body, lines),
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                block_lines(then_block, lines);
                if let Some(b) = else_block {
                    block_lines(b, lines);
                }
            }
            _ => {}
        }
    }
}
