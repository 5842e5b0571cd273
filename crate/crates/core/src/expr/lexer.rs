//! Tokenizer for the expression language.

use crate::error::{ParseError, ParseErrorKind, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum TokKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokKind {
    pub fn describe(&self) -> String {
        match self {
            TokKind::Num(v) => format!("number `{}`", v),
            TokKind::Ident(s) => format!("`{}`", s),
            TokKind::Plus => "`+`".into(),
            TokKind::Minus => "`-`".into(),
            TokKind::Star => "`*`".into(),
            TokKind::Slash => "`/`".into(),
            TokKind::Caret => "`^`".into(),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tok {
    pub kind: TokKind,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Tok>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                let kind = match b {
                    b'+' => TokKind::Plus,
                    b'-' => TokKind::Minus,
                    b'*' => TokKind::Star,
                    b'/' => TokKind::Slash,
                    b'^' => TokKind::Caret,
                    b'(' => TokKind::LParen,
                    _ => TokKind::RParen,
                };
                toks.push(Tok {
                    kind,
                    span: Span::new(i, i + 1),
                });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    source_text: src.to_string(),
                    offset: start,
                    kind: ParseErrorKind::MalformedNumber,
                })?;
                toks.push(Tok {
                    kind: TokKind::Num(v),
                    span: Span::new(start, i),
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(Tok {
                    kind: TokKind::Ident(src[start..i].to_string()),
                    span: Span::new(start, i),
                });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    source_text: src.to_string(),
                    offset: i,
                    kind: ParseErrorKind::UnexpectedCharacter { ch },
                });
            }
        }
    }
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_numbers_and_idents() {
        let toks = tokenize("2.5e-1*x1").unwrap();
        assert_eq!(toks.len(), 3);
        assert_eq!(toks[0].kind, TokKind::Num(0.25));
        assert_eq!(toks[2].kind, TokKind::Ident("x1".into()));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("x1 @ 2").unwrap_err();
        assert_eq!(err.offset, 3);
    }
}
