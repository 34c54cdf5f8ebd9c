//! Recursive-descent parser for QDL.
//!
//! On a syntax error the parser records a diagnostic and skips to the next
//! top-level item, so independent errors in separate items are all reported.

use std::sync::Arc;

use super::ast::*;
use super::diagnostic::Diagnostic;
use super::lexer::{tokenize, Token, TokenKind};
use crate::sim::Gate;

/// Words that can never be identifiers.
pub const KEYWORDS: [&str; 8] = ["qnode", "fn", "for", "in", "if", "else", "let", "return"];

type PResult<T> = Result<T, Diagnostic>;

pub fn parse(src: &str) -> Result<Ast, Vec<Diagnostic>> {
    let tokens = tokenize(src).map_err(|d| vec![d])?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        diags: Vec::new(),
    };
    let ast = parser.program();
    if parser.diags.is_empty() {
        Ok(ast)
    } else {
        Err(parser.diags)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(w) if w == word)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> Diagnostic {
        let tok = self.peek();
        Diagnostic::syntax(tok.span.start, format!("expected {expected}, found {}", tok.kind))
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(expected))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Span> {
        if self.at_word(word) {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(&format!("'{word}'")))
        }
    }

    fn ident(&mut self, expected: &str) -> PResult<Ident> {
        match &self.peek().kind {
            TokenKind::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                let name = name.clone();
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.error_here(expected)),
        }
    }

    fn program(&mut self) -> Ast {
        let mut items = Vec::new();
        while !self.at(&TokenKind::Eof) {
            let start = self.pos;
            match self.item() {
                Ok(item) => items.push(item),
                Err(diag) => {
                    self.diags.push(diag);
                    self.pos = start;
                    self.synchronize();
                }
            }
        }
        Ast { items }
    }

    /// Skips from the start of a failed item to just after its end.
    fn synchronize(&mut self) {
        let mut depth = 0usize;
        let first = self.pos;
        // a decorated qnode owns the first item keyword after its decorators
        let mut owned_keyword = matches!(self.peek().kind, TokenKind::At);
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::Ident(w) if self.pos != first && (w == "qnode" || w == "fn") => {
                    if !owned_keyword || depth > 0 {
                        return;
                    }
                    owned_keyword = false;
                }
                TokenKind::At if self.pos != first && (depth > 0 || !owned_keyword) => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        self.bump();
                        return;
                    }
                }
                TokenKind::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn item(&mut self) -> PResult<Item> {
        if self.at(&TokenKind::At) || self.at_word("qnode") {
            return self.qnode().map(Item::Qnode);
        }
        if self.at_word("fn") {
            return self.function().map(Item::Fn);
        }
        if matches!(self.peek().kind, TokenKind::Ident(_)) {
            let call = self.call_stmt()?;
            return Ok(Item::Call(call));
        }
        Err(self.error_here("'qnode', 'fn', '@transform' or a call"))
    }

    fn decorator(&mut self) -> PResult<Decorator> {
        let start = self.expect(TokenKind::At, "'@'")?;
        let malformed = |p: &Parser, what: &str| {
            let tok = p.peek();
            Diagnostic::syntax(
                tok.span.start,
                format!("malformed decorator: expected {what}, found {}", tok.kind),
            )
        };
        if !self.at_word("transform") {
            return Err(malformed(self, "'transform'"));
        }
        self.bump();
        if !self.eat(&TokenKind::LParen) {
            return Err(malformed(self, "'('"));
        }
        let transform = self
            .ident("transform name")
            .map_err(|_| malformed(self, "transform name"))?;
        if !self.at(&TokenKind::RParen) {
            return Err(malformed(self, "')'"));
        }
        let end = self.bump().span;
        Ok(Decorator {
            transform,
            span: start.to(end),
        })
    }

    fn params(&mut self) -> PResult<Vec<Ident>> {
        self.expect(TokenKind::LParen, "'('")?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(params);
        }
        loop {
            params.push(self.ident("parameter or ')'")?);
            if self.eat(&TokenKind::RParen) {
                return Ok(params);
            }
            self.expect(TokenKind::Comma, "',' or ')'")?;
        }
    }

    fn qnode(&mut self) -> PResult<QnodeDef> {
        let start = self.peek().span;
        let mut decorators = Vec::new();
        while self.at(&TokenKind::At) {
            decorators.push(self.decorator()?);
        }
        self.expect_word("qnode")?;
        let name = self.ident("qnode name")?;
        let params = self.params()?;
        self.expect_word("on")?;
        self.expect_word("device")?;
        self.expect(TokenKind::LParen, "'('")?;
        self.expect_word("wires")?;
        self.expect(TokenKind::Assign, "'='")?;
        let wires = match self.peek().kind {
            TokenKind::Number { value, integer: true } => {
                self.bump();
                value as usize
            }
            _ => return Err(self.error_here("integer wire count")),
        };
        self.expect(TokenKind::RParen, "')'")?;
        let body = self.block()?;
        Ok(QnodeDef {
            decorators,
            name,
            params,
            wires,
            span: start.to(body.span),
            body,
        })
    }

    fn function(&mut self) -> PResult<FnDef> {
        let start = self.expect_word("fn")?;
        let name = self.ident("function name")?;
        let params = self.params()?;
        let body = self.block()?;
        Ok(FnDef {
            name,
            params,
            span: start.to(body.span),
            body,
        })
    }

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect(TokenKind::LBrace, "'{'")?;
        let mut stmts = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            if self.at(&TokenKind::Eof) {
                return Err(self.error_here("'}'"));
            }
            stmts.push(self.stmt()?);
        }
        let end = self.bump().span;
        Ok(Block {
            stmts: Arc::from(stmts),
            span: start.to(end),
        })
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(TokenKind::LParen, "'('")?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&TokenKind::RParen) {
                return Ok(args);
            }
            self.expect(TokenKind::Comma, "',' or ')'")?;
        }
    }

    fn call_stmt(&mut self) -> PResult<CallStmt> {
        let callee = self.ident("a name")?;
        let args = self.args()?;
        let end = self.expect(TokenKind::Semi, "';'")?;
        Ok(CallStmt {
            span: callee.span.to(end),
            callee,
            args,
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let TokenKind::Ident(word) = &self.peek().kind else {
            return Err(self.error_here("statement"));
        };
        match word.as_str() {
            "for" => self.for_stmt(),
            "if" => self.if_stmt(),
            "let" => {
                let start = self.bump().span;
                let name = self.ident("variable name")?;
                self.expect(TokenKind::Assign, "'='")?;
                let value = self.expr()?;
                let end = self.expect(TokenKind::Semi, "';'")?;
                Ok(Stmt::Let {
                    name,
                    value,
                    span: start.to(end),
                })
            }
            "return" => self.return_stmt(),
            _ if self.peek_at(1) == &TokenKind::LParen => {
                let call = self.call_stmt()?;
                match Gate::from_name(&call.callee.name) {
                    Some(gate) => Ok(Stmt::Gate {
                        gate,
                        gate_span: call.callee.span,
                        args: call.args,
                        span: call.span,
                    }),
                    None => Ok(Stmt::Call(call)),
                }
            }
            _ => Err(self.error_here("statement")),
        }
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let var = self.ident("loop variable")?;
        self.expect_word("in")?;
        let from = self.expr()?;
        self.expect(TokenKind::DotDot, "'..'")?;
        let to = self.expr()?;
        let body = self.block()?;
        Ok(Stmt::For {
            var,
            start: from,
            end: to,
            span: start.to(body.span),
            body,
        })
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let cond = self.expr()?;
        let then_block = self.block()?;
        let mut span = start.to(then_block.span);
        let else_block = if self.at_word("else") {
            self.bump();
            let b = self.block()?;
            span = start.to(b.span);
            Some(b)
        } else {
            None
        };
        Ok(Stmt::If {
            cond,
            then_block,
            else_block,
            span,
        })
    }

    fn return_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let mut measurements = vec![self.measurement()?];
        while self.eat(&TokenKind::Comma) {
            measurements.push(self.measurement()?);
        }
        let end = self.expect(TokenKind::Semi, "',' or ';'")?;
        Ok(Stmt::Return {
            measurements,
            span: start.to(end),
        })
    }

    fn measurement(&mut self) -> PResult<Measurement> {
        let start = self.peek().span;
        if self.at_word("expval") {
            self.bump();
            self.expect(TokenKind::LParen, "'('")?;
            let mut factors = vec![self.pauli_factor()?];
            while self.eat(&TokenKind::At) {
                factors.push(self.pauli_factor()?);
            }
            let end = self.expect(TokenKind::RParen, "'@' or ')'")?;
            Ok(Measurement::Expval {
                factors,
                span: start.to(end),
            })
        } else if self.at_word("probs") {
            self.bump();
            let wires = self.args()?;
            if wires.is_empty() {
                return Err(Diagnostic::syntax(
                    self.prev_span().start,
                    "expected at least one wire in probs(...)",
                ));
            }
            Ok(Measurement::Probs {
                wires,
                span: start.to(self.prev_span()),
            })
        } else if self.at_word("state") {
            self.bump();
            self.expect(TokenKind::LParen, "'('")?;
            let end = self.expect(TokenKind::RParen, "')'")?;
            Ok(Measurement::State {
                span: start.to(end),
            })
        } else {
            Err(self.error_here("measurement (expval, probs or state)"))
        }
    }

    fn pauli_factor(&mut self) -> PResult<PauliFactor> {
        let pauli = match &self.peek().kind {
            TokenKind::Ident(w) => Pauli::from_name(w),
            _ => None,
        };
        let Some(pauli) = pauli else {
            return Err(self.error_here("Pauli X, Y or Z"));
        };
        let start = self.bump().span;
        self.expect(TokenKind::LParen, "'('")?;
        let wire = self.expr()?;
        let end = self.expect(TokenKind::RParen, "')'")?;
        Ok(PauliFactor {
            pauli,
            wire,
            span: start.to(end),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek().kind {
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::Ne => BinOp::Ne,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        if matches!(
            self.peek().kind,
            TokenKind::Lt | TokenKind::Le | TokenKind::Gt | TokenKind::Ge | TokenKind::EqEq | TokenKind::Ne
        ) {
            return Err(Diagnostic::syntax(
                self.peek().span.start,
                "comparisons cannot be chained; add parentheses",
            ));
        }
        Ok(binary(op, lhs, rhs))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Minus) {
            let start = self.bump().span;
            let operand = self.unary()?;
            return Ok(Expr::Unary {
                op: UnaryOp::Neg,
                span: start.to(operand.span()),
                operand: Box::new(operand),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Number { value, .. } => {
                self.bump();
                Ok(Expr::Num {
                    value,
                    span: tok.span,
                })
            }
            TokenKind::LParen => {
                self.bump();
                let mut inner = self.expr()?;
                let end = self.expect(TokenKind::RParen, "')'")?;
                inner.set_span(tok.span.to(end));
                Ok(inner)
            }
            TokenKind::Ident(ref name) if name == "measure" && self.peek_at(1) == &TokenKind::LParen => {
                self.bump();
                self.bump();
                let wire = self.expr()?;
                let end = self.expect(TokenKind::RParen, "')'")?;
                Ok(Expr::Measure {
                    wire: Box::new(wire),
                    span: tok.span.to(end),
                })
            }
            TokenKind::Ident(ref name) if self.peek_at(1) == &TokenKind::LParen => Err(Diagnostic::syntax(
                tok.span.start,
                format!("cannot call '{name}' inside an expression; only measure(...) yields a value"),
            )),
            TokenKind::Ident(_) => Ok(Expr::Var(self.ident("expression")?)),
            _ => Err(self.error_here("expression")),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    Expr::Binary {
        op,
        span: lhs.span().to(rhs.span()),
        lhs: Box::new(lhs),
        rhs: Box::new(rhs),
    }
}

impl Expr {
    fn set_span(&mut self, new: Span) {
        match self {
            Expr::Num { span, .. }
            | Expr::Measure { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Binary { span, .. } => *span = new,
            Expr::Var(id) => id.span = new,
        }
    }
}
