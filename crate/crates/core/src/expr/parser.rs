//! Precedence-climbing parser producing span-annotated syntax trees.

use super::lexer::{tokenize, Tok, TokKind};
use super::{eval, BinOp, Expr, ExprKind, Func, PowExp, Var, VarSpace};
use crate::error::{ParseError, ParseErrorKind, Span};

const PREFIX_EXPECTED: [&str; 4] = ["a number", "an identifier", "`(`", "`-`"];

/// Binding powers; a binary operator at power `bp` takes a right operand
/// parsed at `bp + 1`, which makes every binary operator left-associative.
const BP_ADD: u8 = 10;
const BP_MUL: u8 = 20;
const BP_NEG: u8 = 30;
const BP_POW: u8 = 40;

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError {
            source_text: src.to_string(),
            offset: 0,
            kind: ParseErrorKind::EmptyInput,
        });
    }
    let mut p = Parser {
        src,
        toks: &toks,
        pos: 0,
    };
    let e = p.parse_expr(0)?;
    if let Some(tok) = p.peek() {
        return Err(p.syntax_error(
            tok.span.start,
            vec!["an operator", "end of input"],
            tok.kind.describe(),
        ));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_offset(&self) -> usize {
        self.src.len()
    }

    fn syntax_error(
        &self,
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    ) -> ParseError {
        ParseError {
            source_text: self.src.to_string(),
            offset,
            kind: ParseErrorKind::Syntax { expected, found },
        }
    }

    fn parse_expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let (bp, op) = match self.peek().map(|t| &t.kind) {
                Some(TokKind::Plus) => (BP_ADD, Some(BinOp::Add)),
                Some(TokKind::Minus) => (BP_ADD, Some(BinOp::Sub)),
                Some(TokKind::Star) => (BP_MUL, Some(BinOp::Mul)),
                Some(TokKind::Slash) => (BP_MUL, Some(BinOp::Div)),
                Some(TokKind::Caret) => (BP_POW, None),
                _ => break,
            };
            if bp < min_bp {
                break;
            }
            self.next();
            let rhs = self.parse_expr(bp + 1)?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            lhs = match op {
                Some(op) => Expr {
                    kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                    span,
                },
                None => Expr {
                    kind: ExprKind::Pow(Box::new(lhs), self.fold_exponent(&rhs)?),
                    span,
                },
            };
        }
        Ok(lhs)
    }

    /// The exponent of `^` must be constant; fold it now and classify it as
    /// integral or real.
    fn fold_exponent(&self, e: &Expr) -> Result<PowExp, ParseError> {
        if e.has_variables() {
            return Err(ParseError {
                source_text: self.src.to_string(),
                offset: e.span.start,
                kind: ParseErrorKind::NonConstantExponent,
            });
        }
        let v = eval::eval_value(e, VarSpace::Field, [0.0; 3]).map_err(|err| ParseError {
            source_text: self.src.to_string(),
            offset: e.span.start,
            kind: ParseErrorKind::InvalidExponent {
                detail: err.to_string(),
            },
        })?;
        if !v.is_finite() {
            return Err(ParseError {
                source_text: self.src.to_string(),
                offset: e.span.start,
                kind: ParseErrorKind::InvalidExponent {
                    detail: format!("exponent evaluates to {}", v),
                },
            });
        }
        if v == v.round() && v.abs() <= i32::MAX as f64 {
            Ok(PowExp::Int(v as i32))
        } else {
            Ok(PowExp::Real(v))
        }
    }

    fn parse_prefix(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.next().cloned() else {
            return Err(self.syntax_error(
                self.end_offset(),
                PREFIX_EXPECTED.to_vec(),
                "end of input".into(),
            ));
        };
        match tok.kind {
            TokKind::Num(v) => Ok(Expr {
                kind: ExprKind::Num(v),
                span: tok.span,
            }),
            TokKind::Minus => {
                let operand = self.parse_expr(BP_NEG)?;
                let span = Span::new(tok.span.start, operand.span.end);
                Ok(Expr {
                    kind: ExprKind::Neg(Box::new(operand)),
                    span,
                })
            }
            TokKind::LParen => {
                let inner = self.parse_expr(0)?;
                match self.next() {
                    Some(t) if t.kind == TokKind::RParen => {
                        let span = Span::new(tok.span.start, t.span.end);
                        Ok(Expr {
                            kind: inner.kind,
                            span,
                        })
                    }
                    Some(t) => {
                        let (start, desc) = (t.span.start, t.kind.describe());
                        Err(self.syntax_error(start, vec!["`)`"], desc))
                    }
                    None => Err(self.syntax_error(
                        self.end_offset(),
                        vec!["`)`"],
                        "end of input".into(),
                    )),
                }
            }
            TokKind::Ident(name) => self.parse_ident(&name, tok.span),
            other => Err(self.syntax_error(
                tok.span.start,
                PREFIX_EXPECTED.to_vec(),
                other.describe(),
            )),
        }
    }

    fn parse_ident(&mut self, name: &str, span: Span) -> Result<Expr, ParseError> {
        if name == "pi" {
            return Ok(Expr {
                kind: ExprKind::Pi,
                span,
            });
        }
        if let Some(v) = Var::from_name(name) {
            return Ok(Expr {
                kind: ExprKind::Var(v),
                span,
            });
        }
        if let Some(func) = Func::from_name(name) {
            match self.next() {
                Some(t) if t.kind == TokKind::LParen => {}
                Some(t) => {
                    let (start, desc) = (t.span.start, t.kind.describe());
                    return Err(self.syntax_error(start, vec!["`(` after function name"], desc));
                }
                None => {
                    return Err(self.syntax_error(
                        self.end_offset(),
                        vec!["`(` after function name"],
                        "end of input".into(),
                    ));
                }
            }
            let arg = self.parse_expr(0)?;
            let end = match self.next() {
                Some(t) if t.kind == TokKind::RParen => t.span.end,
                Some(t) => {
                    let (start, desc) = (t.span.start, t.kind.describe());
                    return Err(self.syntax_error(start, vec!["`)`"], desc));
                }
                None => {
                    return Err(self.syntax_error(
                        self.end_offset(),
                        vec!["`)`"],
                        "end of input".into(),
                    ));
                }
            };
            return Ok(Expr {
                kind: ExprKind::Call(func, Box::new(arg)),
                span: Span::new(span.start, end),
            });
        }
        Err(ParseError {
            source_text: self.src.to_string(),
            offset: span.start,
            kind: ParseErrorKind::UnknownIdentifier {
                name: name.to_string(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{eval_value, VarSpace};
    use super::*;

    #[test]
    fn parabola_field_evaluates() {
        let e = parse("x3 - (x1^2+x2^2)/2").unwrap();
        let v = eval_value(&e, VarSpace::Field, [1.0, 1.0, 1.0]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn sin_cos_product_at_zero() {
        let e = parse("sin(t)*cos(t)").unwrap();
        let v = eval_value(&e, VarSpace::CurveParam, [0.0; 3]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn truncated_power_reports_offset_three() {
        let err = parse("x1^").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(matches!(err.kind, ParseErrorKind::Syntax { .. }));
        let msg = err.to_string();
        assert!(msg.contains("offset 3"), "{}", msg);
        assert!(msg.contains('^'), "caret missing: {}", msg);
    }

    #[test]
    fn unknown_identifier_is_reported() {
        let err = parse("x1 + foo").unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(matches!(
            err.kind,
            ParseErrorKind::UnknownIdentifier { ref name } if name == "foo"
        ));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse("-x1^2").unwrap();
        let v = eval_value(&e, VarSpace::Field, [3.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, -9.0);
    }

    #[test]
    fn same_precedence_is_left_associative() {
        let e = parse("8 - 4 - 2").unwrap();
        assert_eq!(eval_value(&e, VarSpace::Field, [0.0; 3]).unwrap(), 2.0);
        let e = parse("16 / 4 / 2").unwrap();
        assert_eq!(eval_value(&e, VarSpace::Field, [0.0; 3]).unwrap(), 2.0);
        let e = parse("2^3^2").unwrap();
        assert_eq!(eval_value(&e, VarSpace::Field, [0.0; 3]).unwrap(), 64.0);
    }

    #[test]
    fn exponent_must_be_constant() {
        let err = parse("x1^x2").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::NonConstantExponent));
        assert!(parse("x1^(1+1)").is_ok());
        assert!(parse("x1^-2").is_ok());
    }

    #[test]
    fn negative_exponent_evaluates() {
        let e = parse("x1^-2").unwrap();
        let v = eval_value(&e, VarSpace::Field, [2.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, 0.25);
    }

    #[test]
    fn pi_is_a_named_constant() {
        let e = parse("cos(pi)").unwrap();
        let v = eval_value(&e, VarSpace::Field, [0.0; 3]).unwrap();
        assert_eq!(v, -1.0);
    }
}
