//! Scalar expression language: parser, printer and jet evaluator.
//!
//! Expressions are written in the variables `x1, x2, x3` (scalar fields on
//! the group), `t` (curve parameter) or `s1, s2` (chart parameters), with
//! the constant `pi`, the binary operators `+ - * / ^` (the exponent of `^`
//! must fold to a constant), unary minus, and the functions
//! `sin cos tan exp log sqrt sinh cosh atan abs`.
//!
//! Precedence, tightest first: `^`, unary minus, `* /`, `+ -`; binary
//! operators of equal precedence associate to the left. The full grammar is
//! documented in `docs/expression-grammar.md`.

mod eval;
mod lexer;
mod parser;

pub use eval::{
    eval_chart_jet, eval_curve_jet, eval_field_jet, eval_field_value, eval_jet, eval_value,
    CurveJet,
};
pub use parser::parse;

use crate::error::Span;

/// Variables known to the parser. Which ones are legal depends on the
/// evaluation context ([`VarSpace`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X1,
    X2,
    X3,
    T,
    S1,
    S2,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::T => "t",
            Var::S1 => "s1",
            Var::S2 => "s2",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Some(match name {
            "x1" => Var::X1,
            "x2" => Var::X2,
            "x3" => Var::X3,
            "t" => Var::T,
            "s1" => Var::S1,
            "s2" => Var::S2,
            _ => return None,
        })
    }
}

/// Evaluation context: which variables are live and which jet slot each
/// occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSpace {
    /// Scalar fields on the group: x1, x2, x3.
    Field,
    /// Curves: the single parameter t.
    CurveParam,
    /// Chart maps: s1, s2.
    ChartParams,
}

impl VarSpace {
    pub fn slot(self, v: Var) -> Option<usize> {
        match (self, v) {
            (VarSpace::Field, Var::X1) => Some(0),
            (VarSpace::Field, Var::X2) => Some(1),
            (VarSpace::Field, Var::X3) => Some(2),
            (VarSpace::CurveParam, Var::T) => Some(0),
            (VarSpace::ChartParams, Var::S1) => Some(0),
            (VarSpace::ChartParams, Var::S2) => Some(1),
            _ => None,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            VarSpace::Field => "a field expression (variables x1, x2, x3)",
            VarSpace::CurveParam => "a curve expression (variable t)",
            VarSpace::ChartParams => "a chart expression (variables s1, s2)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Atan,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Atan => "atan",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "atan" => Func::Atan,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Exponent of `^`, folded to a constant at parse time. Integral exponents
/// are applied by repeated multiplication; real exponents require a
/// positive base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowExp {
    Int(i32),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, PowExp),
    Call(Func, Box<Expr>),
}

/// Parsed expression. Immutable after parse; evaluation is reentrant and
/// side-effect free, so values may be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    fn synthetic(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::new(0, 0),
        }
    }

    /// Programmatic constructors, for code that builds syntax trees
    /// directly (samplers, composed curves). Spans are synthetic.
    pub fn num(v: f64) -> Expr {
        Expr::synthetic(ExprKind::Num(v))
    }

    pub fn variable(v: Var) -> Expr {
        Expr::synthetic(ExprKind::Var(v))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::synthetic(ExprKind::Bin(op, Box::new(a), Box::new(b)))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::synthetic(ExprKind::Neg(Box::new(a)))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::synthetic(ExprKind::Call(f, Box::new(a)))
    }

    pub fn pow_int(a: Expr, n: i32) -> Expr {
        Expr::synthetic(ExprKind::Pow(Box::new(a), PowExp::Int(n)))
    }

    /// Printing precedence of this node; higher binds tighter. A negative
    /// literal prints with a leading minus, so it takes the precedence of
    /// unary minus.
    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Bin(BinOp::Add | BinOp::Sub, _, _) => 10,
            ExprKind::Bin(BinOp::Mul | BinOp::Div, _, _) => 20,
            ExprKind::Neg(_) => 30,
            ExprKind::Num(v) if *v < 0.0 => 30,
            ExprKind::Pow(_, _) => 40,
            _ => 100,
        }
    }

    /// Does the expression mention any variable at all?
    pub fn has_variables(&self) -> bool {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Pi => false,
            ExprKind::Var(_) => true,
            ExprKind::Neg(a) | ExprKind::Call(_, a) | ExprKind::Pow(a, _) => a.has_variables(),
            ExprKind::Bin(_, a, b) => a.has_variables() || b.has_variables(),
        }
    }

    /// Replace every occurrence of `var` with a copy of `replacement`.
    pub fn substitute(&self, var: Var, replacement: &Expr) -> Expr {
        let kind = match &self.kind {
            ExprKind::Var(v) if *v == var => replacement.kind.clone(),
            ExprKind::Num(_) | ExprKind::Pi | ExprKind::Var(_) => self.kind.clone(),
            ExprKind::Neg(a) => ExprKind::Neg(Box::new(a.substitute(var, replacement))),
            ExprKind::Bin(op, a, b) => ExprKind::Bin(
                *op,
                Box::new(a.substitute(var, replacement)),
                Box::new(b.substitute(var, replacement)),
            ),
            ExprKind::Pow(a, e) => ExprKind::Pow(Box::new(a.substitute(var, replacement)), *e),
            ExprKind::Call(f, a) => ExprKind::Call(*f, Box::new(a.substitute(var, replacement))),
        };
        Expr {
            kind,
            span: self.span,
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn write_child(
            f: &mut std::fmt::Formatter<'_>,
            child: &Expr,
            needs_parens: bool,
        ) -> std::fmt::Result {
            if needs_parens {
                write!(f, "({})", child)
            } else {
                write!(f, "{}", child)
            }
        }

        match &self.kind {
            ExprKind::Num(v) => write!(f, "{}", v),
            ExprKind::Pi => write!(f, "pi"),
            ExprKind::Var(v) => write!(f, "{}", v.name()),
            ExprKind::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, a.precedence() < 40)
            }
            ExprKind::Bin(op, a, b) => {
                let p = self.precedence();
                write_child(f, a, a.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, b, b.precedence() <= p)
            }
            ExprKind::Pow(base, e) => {
                write_child(f, base, base.precedence() < 40)?;
                match e {
                    PowExp::Int(n) if *n < 0 => write!(f, "^({})", n),
                    PowExp::Int(n) => write!(f, "^{}", n),
                    PowExp::Real(r) if *r < 0.0 => write!(f, "^({})", r),
                    PowExp::Real(r) => write!(f, "^{}", r),
                }
            }
            ExprKind::Call(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_round_trips_through_parse() {
        for src in [
            "x3 - (x1^2 + x2^2)/2",
            "sin(x1)*cos(x2)",
            "-x1^2",
            "(-x1)^2",
            "2*-x1 + 3",
            "x1^2^3",
            "1/(1 + x2^2)",
            "sqrt(x1*x1 + 4) - abs(x2 - 10)",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            let p = [0.3, -0.7, 1.9];
            let a = eval_value(&e, VarSpace::Field, p).unwrap();
            let b = eval_value(&reparsed, VarSpace::Field, p).unwrap();
            assert_eq!(a, b, "round trip changed value of `{}` -> `{}`", src, printed);
        }
    }

    #[test]
    fn negative_literal_round_trips_as_power_base() {
        let e = Expr::pow_int(Expr::num(-1.5), 2);
        let printed = e.to_string();
        let reparsed = parse(&printed).unwrap();
        let a = eval_value(&e, VarSpace::Field, [0.0; 3]).unwrap();
        let b = eval_value(&reparsed, VarSpace::Field, [0.0; 3]).unwrap();
        assert_eq!(a, 2.25);
        assert_eq!(a, b, "`{}`", printed);
    }

    #[test]
    fn substitute_replaces_variables() {
        let g = parse("x1^2 + x2").unwrap();
        let c1 = parse("cos(t)").unwrap();
        let c2 = parse("sin(t)").unwrap();
        let composed = g.substitute(Var::X1, &c1).substitute(Var::X2, &c2);
        let t = 0.6;
        let got = eval_value(&composed, VarSpace::CurveParam, [t, 0.0, 0.0]).unwrap();
        let want = t.cos().powi(2) + t.sin();
        assert!((got - want).abs() < 1e-15);
    }
}
