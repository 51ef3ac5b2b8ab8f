//! Just enough s-expression reading for solver responses.

use crate::formula::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed s-expression at byte {at}: {msg}")]
pub struct SExprError {
    pub at: usize,
    pub msg: &'static str,
}

/// Parses exactly one s-expression, ignoring surrounding whitespace.
pub fn parse(text: &str) -> Result<SExpr, SExprError> {
    let bytes = text.as_bytes();
    let mut at = 0;
    let e = parse_at(bytes, &mut at)?;
    skip_ws(bytes, &mut at);
    if at != bytes.len() {
        return Err(SExprError {
            at,
            msg: "trailing input",
        });
    }
    Ok(e)
}

fn skip_ws(b: &[u8], at: &mut usize) {
    while *at < b.len() {
        if b[*at].is_ascii_whitespace() {
            *at += 1;
        } else if b[*at] == b';' {
            while *at < b.len() && b[*at] != b'\n' {
                *at += 1;
            }
        } else {
            break;
        }
    }
}

fn parse_at(b: &[u8], at: &mut usize) -> Result<SExpr, SExprError> {
    skip_ws(b, at);
    let err = |at: usize, msg| SExprError { at, msg };
    match b.get(*at) {
        None => Err(err(*at, "unexpected end of input")),
        Some(b'(') => {
            *at += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(b, at);
                match b.get(*at) {
                    None => return Err(err(*at, "unclosed list")),
                    Some(b')') => {
                        *at += 1;
                        return Ok(SExpr::List(items));
                    }
                    _ => items.push(parse_at(b, at)?),
                }
            }
        }
        Some(b')') => Err(err(*at, "unexpected `)`")),
        Some(&q @ (b'"' | b'|')) => {
            let start = *at;
            *at += 1;
            while *at < b.len() {
                if b[*at] == q {
                    if q == b'"' && b.get(*at + 1) == Some(&b'"') {
                        *at += 2;
                        continue;
                    }
                    *at += 1;
                    return Ok(SExpr::Atom(
                        String::from_utf8_lossy(&b[start..*at]).into_owned(),
                    ));
                }
                *at += 1;
            }
            Err(err(start, "unterminated literal"))
        }
        Some(_) => {
            let start = *at;
            while *at < b.len() && !b[*at].is_ascii_whitespace() && b[*at] != b'(' && b[*at] != b')'
            {
                *at += 1;
            }
            Ok(SExpr::Atom(
                String::from_utf8_lossy(&b[start..*at]).into_owned(),
            ))
        }
    }
}

/// Net parenthesis depth of `line`, ignoring string and quoted-symbol contents.
pub fn paren_balance(line: &str) -> i64 {
    let mut depth = 0;
    let mut quote: Option<char> = None;
    for c in line.chars() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '"') | (None, '|') => quote = Some(c),
            (None, '(') => depth += 1,
            (None, ')') => depth -= 1,
            _ => {}
        }
    }
    depth
}

/// Reads a Boolean or integer constant as printed by a solver: `true`, `42`, `(- 7)`.
pub fn value(e: &SExpr) -> Option<Value> {
    match e {
        SExpr::Atom(a) if a == "true" => Some(Value::Bool(true)),
        SExpr::Atom(a) if a == "false" => Some(Value::Bool(false)),
        SExpr::Atom(a) => a.parse().ok().map(Value::Int),
        SExpr::List(items) => match items.as_slice() {
            [SExpr::Atom(minus), SExpr::Atom(n)] if minus == "-" => {
                n.parse::<i64>().ok().map(|n| Value::Int(-n))
            }
            _ => None,
        },
    }
}
