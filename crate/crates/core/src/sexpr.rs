//! Reader for parenthesized symbolic expressions.
//!
//! The surface language is written as s-expressions: integer and boolean
//! atoms, bare symbols, and parenthesized lists. `;` starts a comment that
//! runs to the end of the line.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

/// A generic symbolic expression, the input of the syntax parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    IntAtom(BigInt),
    BoolAtom(bool),
    SymbolAtom(String),
    ListForm(Vec<SExpr>),
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::IntAtom(value) => write!(f, "{}", value),
            SExpr::BoolAtom(true) => write!(f, "#t"),
            SExpr::BoolAtom(false) => write!(f, "#f"),
            SExpr::SymbolAtom(name) => write!(f, "{}", name),
            SExpr::ListForm(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", item)?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReadError {
    #[error("unbalanced parentheses at line {line}, column {column}: {detail}")]
    UnbalancedParens {
        line: usize,
        column: usize,
        detail: String,
    },
    #[error("invalid token at line {line}, column {column}: {detail}")]
    InvalidToken {
        line: usize,
        column: usize,
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            _ if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '(' => {
                tokens.push(Token {
                    kind: TokenKind::Open,
                    line,
                    column,
                });
                chars.next();
                column += 1;
            }
            ')' => {
                tokens.push(Token {
                    kind: TokenKind::Close,
                    line,
                    column,
                });
                chars.next();
                column += 1;
            }
            _ => {
                let start_line = line;
                let start_column = column;
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    column += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Atom(atom),
                    line: start_line,
                    column: start_column,
                });
            }
        }
    }
    tokens
}

fn classify_atom(atom: &str, line: usize, column: usize) -> Result<SExpr, ReadError> {
    match atom {
        "#t" | "true" => return Ok(SExpr::BoolAtom(true)),
        "#f" | "false" => return Ok(SExpr::BoolAtom(false)),
        _ => {}
    }
    let unsigned = atom.strip_prefix(['+', '-']).unwrap_or(atom);
    let looks_numeric = unsigned.chars().next().is_some_and(|c| c.is_ascii_digit());
    if looks_numeric {
        return match atom.parse::<BigInt>() {
            Ok(value) => Ok(SExpr::IntAtom(value)),
            Err(_) => Err(ReadError::InvalidToken {
                line,
                column,
                detail: format!("malformed integer `{}`", atom),
            }),
        };
    }
    if atom.starts_with('#') {
        return Err(ReadError::InvalidToken {
            line,
            column,
            detail: format!("unknown reader constant `{}`", atom),
        });
    }
    Ok(SExpr::SymbolAtom(atom.to_string()))
}

/// Reads exactly one s-expression from `text`. Trailing non-comment content
/// is an error: source files hold one top-level expression.
pub fn read_sexpr(text: &str) -> Result<SExpr, ReadError> {
    let tokens = tokenize(text);
    let mut pos = 0usize;
    let expr = read_one(&tokens, &mut pos)?;
    if let Some(extra) = tokens.get(pos) {
        return Err(ReadError::InvalidToken {
            line: extra.line,
            column: extra.column,
            detail: "expected end of input after the top-level expression".to_string(),
        });
    }
    Ok(expr)
}

fn read_one(tokens: &[Token], pos: &mut usize) -> Result<SExpr, ReadError> {
    let token = tokens.get(*pos).ok_or(ReadError::InvalidToken {
        line: 1,
        column: 1,
        detail: "expected an expression, found end of input".to_string(),
    })?;
    match &token.kind {
        TokenKind::Atom(atom) => {
            *pos += 1;
            classify_atom(atom, token.line, token.column)
        }
        TokenKind::Close => Err(ReadError::UnbalancedParens {
            line: token.line,
            column: token.column,
            detail: "close parenthesis without a matching open".to_string(),
        }),
        TokenKind::Open => {
            let open_line = token.line;
            let open_column = token.column;
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => {
                        return Err(ReadError::UnbalancedParens {
                            line: open_line,
                            column: open_column,
                            detail: "open parenthesis is never closed".to_string(),
                        })
                    }
                    Some(t) if t.kind == TokenKind::Close => {
                        *pos += 1;
                        return Ok(SExpr::ListForm(items));
                    }
                    Some(_) => items.push(read_one(tokens, pos)?),
                }
            }
        }
    }
}
