use std::fmt;

use super::ast::{Pos, Span};
use super::diagnostic::Diagnostic;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// Numeric literal; `integer` is false when the literal had a fraction.
    Number { value: f64, integer: bool },
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Assign,
    At,
    DotDot,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(name) => write!(f, "'{name}'"),
            TokenKind::Number { value, .. } => write!(f, "number {value}"),
            TokenKind::Eof => f.write_str("end of input"),
            other => write!(f, "'{}'", other.symbol()),
        }
    }
}

impl TokenKind {
    pub fn symbol(&self) -> &'static str {
        match self {
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::Assign => "=",
            TokenKind::At => "@",
            TokenKind::DotDot => "..",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::EqEq => "==",
            TokenKind::Ne => "!=",
            TokenKind::Ident(_) | TokenKind::Number { .. } | TokenKind::Eof => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    pos: Pos,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }
}

/// Splits source text into tokens. Stops at the first unrecognized character.
pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor {
        chars: src.char_indices().peekable(),
        src,
        pos: Pos::new(1, 1),
    };
    let mut tokens = Vec::new();
    loop {
        // whitespace and comments
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let start = cur.pos;
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span: Span::new(start, start),
            });
            return Ok(tokens);
        };
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            let from = cur.offset();
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let to = cur.offset();
            TokenKind::Ident(src[from..to].to_string())
        } else if c.is_ascii_digit() {
            let from = cur.offset();
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            let mut integer = true;
            if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
                integer = false;
                cur.bump();
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
            }
            let to = cur.offset();
            let text = &src[from..to];
            let value: f64 = text
                .parse()
                .map_err(|_| Diagnostic::syntax(start, format!("malformed number '{text}'")))?;
            TokenKind::Number { value, integer }
        } else {
            cur.bump();
            let next = cur.peek();
            let two = |kind: TokenKind, cur: &mut Cursor<'_>| {
                cur.bump();
                kind
            };
            match (c, next) {
                ('(', _) => TokenKind::LParen,
                (')', _) => TokenKind::RParen,
                ('{', _) => TokenKind::LBrace,
                ('}', _) => TokenKind::RBrace,
                (',', _) => TokenKind::Comma,
                (';', _) => TokenKind::Semi,
                ('@', _) => TokenKind::At,
                ('+', _) => TokenKind::Plus,
                ('-', _) => TokenKind::Minus,
                ('*', _) => TokenKind::Star,
                ('/', _) => TokenKind::Slash,
                ('.', Some('.')) => two(TokenKind::DotDot, &mut cur),
                ('<', Some('=')) => two(TokenKind::Le, &mut cur),
                ('>', Some('=')) => two(TokenKind::Ge, &mut cur),
                ('=', Some('=')) => two(TokenKind::EqEq, &mut cur),
                ('!', Some('=')) => two(TokenKind::Ne, &mut cur),
                ('<', _) => TokenKind::Lt,
                ('>', _) => TokenKind::Gt,
                ('=', _) => TokenKind::Assign,
                _ => {
                    return Err(Diagnostic::syntax(
                        start,
                        format!("unknown token '{}'", c.escape_default()),
                    ))
                }
            }
        };
        tokens.push(Token {
            kind,
            span: Span::new(start, cur.pos),
        });
    }
}
