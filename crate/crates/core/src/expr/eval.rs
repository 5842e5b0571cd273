//! Jet and plain-value evaluation of parsed expressions.

use super::{BinOp, Expr, ExprKind, Func, PowExp, VarSpace};
use crate::error::{Error, Result};
use crate::heis::Point;
use crate::jet::{Jet2, JetDomainError};

fn domain(e: &Expr, at: [f64; 3], err: JetDomainError) -> Error {
    Error::Domain {
        func: err.func,
        arg: err.arg,
        span: e.span,
        point: at,
    }
}

/// Evaluate `e` as a second-order jet, seeding the variables of `space`
/// with the corresponding entries of `at`.
pub fn eval_jet(e: &Expr, space: VarSpace, at: [f64; 3]) -> Result<Jet2> {
    match &e.kind {
        ExprKind::Num(v) => Ok(Jet2::constant(*v)),
        ExprKind::Pi => Ok(Jet2::constant(std::f64::consts::PI)),
        ExprKind::Var(v) => match space.slot(*v) {
            Some(slot) => Ok(Jet2::variable(at[slot], slot)),
            None => Err(Error::WrongVariable {
                name: v.name(),
                context: space.describe(),
                offset: e.span.start,
            }),
        },
        ExprKind::Neg(a) => Ok(-eval_jet(a, space, at)?),
        ExprKind::Bin(op, a, b) => {
            let ja = eval_jet(a, space, at)?;
            let jb = eval_jet(b, space, at)?;
            match op {
                BinOp::Add => Ok(ja + jb),
                BinOp::Sub => Ok(ja - jb),
                BinOp::Mul => Ok(ja * jb),
                BinOp::Div => ja.try_div(jb).map_err(|err| domain(e, at, err)),
            }
        }
        ExprKind::Pow(base, exp) => {
            let jb = eval_jet(base, space, at)?;
            match exp {
                PowExp::Int(n) => jb.powi(*n).map_err(|err| domain(e, at, err)),
                PowExp::Real(r) => jb.powf(*r).map_err(|err| domain(e, at, err)),
            }
        }
        ExprKind::Call(func, a) => {
            let ja = eval_jet(a, space, at)?;
            let out = match func {
                Func::Sin => Ok(ja.sin()),
                Func::Cos => Ok(ja.cos()),
                Func::Tan => Ok(ja.tan()),
                Func::Exp => Ok(ja.exp()),
                Func::Log => ja.ln(),
                Func::Sqrt => ja.sqrt(),
                Func::Sinh => Ok(ja.sinh()),
                Func::Cosh => Ok(ja.cosh()),
                Func::Atan => Ok(ja.atan()),
                Func::Abs => ja.abs(),
            };
            out.map_err(|err| domain(e, at, err))
        }
    }
}

/// Plain-value evaluation with the same domain rules as the jet path.
pub fn eval_value(e: &Expr, space: VarSpace, at: [f64; 3]) -> Result<f64> {
    match &e.kind {
        ExprKind::Num(v) => Ok(*v),
        ExprKind::Pi => Ok(std::f64::consts::PI),
        ExprKind::Var(v) => match space.slot(*v) {
            Some(slot) => Ok(at[slot]),
            None => Err(Error::WrongVariable {
                name: v.name(),
                context: space.describe(),
                offset: e.span.start,
            }),
        },
        ExprKind::Neg(a) => Ok(-eval_value(a, space, at)?),
        ExprKind::Bin(op, a, b) => {
            let va = eval_value(a, space, at)?;
            let vb = eval_value(b, space, at)?;
            match op {
                BinOp::Add => Ok(va + vb),
                BinOp::Sub => Ok(va - vb),
                BinOp::Mul => Ok(va * vb),
                BinOp::Div => {
                    if vb == 0.0 {
                        Err(domain(
                            e,
                            at,
                            JetDomainError {
                                func: "divide",
                                arg: 0.0,
                            },
                        ))
                    } else {
                        Ok(va / vb)
                    }
                }
            }
        }
        ExprKind::Pow(base, exp) => {
            let vb = eval_value(base, space, at)?;
            match exp {
                PowExp::Int(n) => {
                    if *n < 0 && vb == 0.0 {
                        Err(domain(
                            e,
                            at,
                            JetDomainError {
                                func: "pow",
                                arg: 0.0,
                            },
                        ))
                    } else {
                        Ok(vb.powi(*n))
                    }
                }
                PowExp::Real(r) => {
                    if vb <= 0.0 {
                        Err(domain(
                            e,
                            at,
                            JetDomainError {
                                func: "pow",
                                arg: vb,
                            },
                        ))
                    } else {
                        Ok(vb.powf(*r))
                    }
                }
            }
        }
        ExprKind::Call(func, a) => {
            let va = eval_value(a, space, at)?;
            let bad = |name: &'static str| {
                Err(domain(
                    e,
                    at,
                    JetDomainError {
                        func: name,
                        arg: va,
                    },
                ))
            };
            match func {
                Func::Sin => Ok(va.sin()),
                Func::Cos => Ok(va.cos()),
                Func::Tan => Ok(va.tan()),
                Func::Exp => Ok(va.exp()),
                Func::Log => {
                    if va <= 0.0 {
                        bad("log")
                    } else {
                        Ok(va.ln())
                    }
                }
                Func::Sqrt => {
                    if va <= 0.0 {
                        bad("sqrt")
                    } else {
                        Ok(va.sqrt())
                    }
                }
                Func::Sinh => Ok(va.sinh()),
                Func::Cosh => Ok(va.cosh()),
                Func::Atan => Ok(va.atan()),
                Func::Abs => {
                    if va == 0.0 {
                        bad("abs")
                    } else {
                        Ok(va.abs())
                    }
                }
            }
        }
    }
}

/// Jet of a scalar field at a group point; vars x1, x2, x3.
pub fn eval_field_jet(e: &Expr, p: Point) -> Result<Jet2> {
    eval_jet(e, VarSpace::Field, [p.x1, p.x2, p.x3])
}

pub fn eval_field_value(e: &Expr, p: Point) -> Result<f64> {
    eval_value(e, VarSpace::Field, [p.x1, p.x2, p.x3])
}

/// Jet of a chart component at parameters (s1, s2); slots 0 and 1.
pub fn eval_chart_jet(e: &Expr, s: [f64; 2]) -> Result<Jet2> {
    eval_jet(e, VarSpace::ChartParams, [s[0], s[1], 0.0])
}

/// Position, velocity and acceleration of a parametric curve at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub pos: [f64; 3],
    pub vel: [f64; 3],
    pub acc: [f64; 3],
}

/// Evaluate the three components of a curve as jets in `t`, returning exact
/// first and second time derivatives.
pub fn eval_curve_jet(components: &[Expr; 3], t: f64) -> Result<CurveJet> {
    let mut pos = [0.0; 3];
    let mut vel = [0.0; 3];
    let mut acc = [0.0; 3];
    for (i, c) in components.iter().enumerate() {
        let j = eval_jet(c, VarSpace::CurveParam, [t, 0.0, 0.0])?;
        pos[i] = j.v;
        vel[i] = j.d[0];
        acc[i] = j.hess(0, 0);
    }
    Ok(CurveJet { pos, vel, acc })
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn bilinear_field_jet() {
        let e = parse("x1*x2").unwrap();
        let j = eval_field_jet(&e, Point::new(2.0, 3.0, 0.0)).unwrap();
        assert_eq!(j.v, 6.0);
        assert_eq!(j.d, [3.0, 2.0, 0.0]);
        assert_eq!(j.hess(0, 1), 1.0);
        assert_eq!(j.hess(0, 0), 0.0);
        assert_eq!(j.hess(2, 2), 0.0);
    }

    #[test]
    fn coordinate_function_jet() {
        let e = parse("x3").unwrap();
        let j = eval_field_jet(&e, Point::new(0.4, -1.2, 7.7)).unwrap();
        assert_eq!(j.v, 7.7);
        assert_eq!(j.d, [0.0, 0.0, 1.0]);
        assert_eq!(j.h, [0.0; 6]);
    }

    #[test]
    fn sine_field_jet_at_origin_plane() {
        let e = parse("sin(x1)").unwrap();
        let j = eval_field_jet(&e, Point::new(0.0, 0.5, -2.0)).unwrap();
        assert_eq!(j.v, 0.0);
        assert_eq!(j.d, [1.0, 0.0, 0.0]);
        assert_eq!(j.hess(0, 0), 0.0);
    }

    #[test]
    fn circle_curve_jet() {
        let c = [
            parse("cos(t)").unwrap(),
            parse("sin(t)").unwrap(),
            parse("0").unwrap(),
        ];
        let j = eval_curve_jet(&c, 0.0).unwrap();
        assert_eq!(j.pos, [1.0, 0.0, 0.0]);
        assert_eq!(j.vel, [0.0, 1.0, 0.0]);
        assert_eq!(j.acc, [-1.0, 0.0, 0.0]);
    }

    #[test]
    fn parabola_curve_jet() {
        let c = [
            parse("t").unwrap(),
            parse("t^2/2").unwrap(),
            parse("0").unwrap(),
        ];
        let j = eval_curve_jet(&c, 1.0).unwrap();
        assert_eq!(j.vel, [1.0, 1.0, 0.0]);
        assert_eq!(j.acc, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn vertical_parabola_curve_jet() {
        let c = [
            parse("t").unwrap(),
            parse("0").unwrap(),
            parse("t^2/2").unwrap(),
        ];
        let j = eval_curve_jet(&c, 0.0).unwrap();
        assert_eq!(j.vel, [1.0, 0.0, 0.0]);
        assert_eq!(j.acc, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn curve_expression_rejects_field_variables() {
        let c = parse("x1 + t").unwrap();
        let err = eval_jet(&c, VarSpace::CurveParam, [0.0; 3]).unwrap_err();
        assert!(matches!(err, Error::WrongVariable { name: "x1", .. }));
    }

    #[test]
    fn division_by_zero_carries_span_and_point() {
        let e = parse("1/(x1 - 1)").unwrap();
        let err = eval_field_value(&e, Point::new(1.0, 0.0, 0.0)).unwrap_err();
        match err {
            Error::Domain { func, point, .. } => {
                assert_eq!(func, "divide");
                assert_eq!(point[0], 1.0);
            }
            other => panic!("expected domain error, got {:?}", other),
        }
    }

    #[test]
    fn log_of_nonpositive_is_domain_error() {
        let e = parse("log(x1)").unwrap();
        assert!(eval_field_jet(&e, Point::new(-1.0, 0.0, 0.0)).is_err());
        assert!(eval_field_jet(&e, Point::new(2.0, 0.0, 0.0)).is_ok());
    }
}
