//! The seeded property suite: two-path agreements, limit consistency,
//! metric compatibility and jet correctness, reported property by property
//! with worst-case deviations.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{
    coeff_table, curvature_tensor, sectional, CoeffTable, ConnectionKind, CurvatureTable,
};
use crate::curve::{
    curve_curvature, curve_curvature_closed_form, curve_curvature_limit, CurvePoint, LimitBranch,
    ParamCurve,
};
use crate::expr::{self, BinOp, Expr, Func, Var, VarSpace};
use crate::heis::{self, FrameVector, MetricParam, Point};
use crate::jet::Jet2;
use crate::surface::{
    gauss_curvature_limit, gauss_from_jets, ii_closed_from_jets, ii_from_jets,
    mean_curvature_limit, surface_frame, surface_jets,
};
use crate::surface_curve::{
    geodesic_curvature, geodesic_curvature_limit, projected_acceleration,
    projected_acceleration_expansion, surface_curve_point, Orientation, SurfaceCurvePoint,
};
use crate::tol::Thresholds;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl PropertyResult {
    fn from_worst(name: impl Into<String>, samples: usize, worst: f64, tolerance: f64) -> Self {
        PropertyResult {
            name: name.into(),
            samples,
            worst,
            tolerance,
            passed: worst <= tolerance,
            detail: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub properties: Vec<PropertyResult>,
    pub all_passed: bool,
}

/// Deliberate corruption hooks for fault-injection tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    CorruptCoeffTable(ConnectionKind),
}

pub fn run(seed: u64, samples: usize) -> VerifyReport {
    run_with_fault(seed, samples, None)
}

pub fn run_with_fault(seed: u64, samples: usize, fault: Option<Fault>) -> VerifyReport {
    let thr = Thresholds::default();
    let mut properties = Vec::new();

    properties.push(prop_jet_gradient_fd(seed, samples.max(200)));
    properties.push(prop_jet_hessian_fd(seed, samples.max(200)));
    properties.push(prop_jet_product_rule(seed, samples));
    properties.push(prop_expr_roundtrip(seed, samples));
    properties.push(prop_omega_frame_consistency(seed, samples));
    properties.push(prop_omega_dot_vs_jets(seed, samples, &thr));
    properties.push(prop_frame_orthonormality(seed, samples, &thr));
    for kind in ConnectionKind::ALL {
        properties.push(prop_metric_compatibility(seed, samples, kind, fault, &thr));
    }
    properties.push(prop_curvature_antisymmetry());
    properties.push(prop_curvature_table_regression());
    properties.push(prop_sectional_surface_frame(seed, samples, &thr));
    for kind in [
        ConnectionKind::SvK1,
        ConnectionKind::SvK2,
        ConnectionKind::Adapted,
    ] {
        properties.push(prop_curve_two_path(seed, samples, kind, &thr));
    }
    for kind in ConnectionKind::ALL {
        properties.push(prop_ii_two_path(seed, samples, kind, &thr));
    }
    for kind in [
        ConnectionKind::SvK1,
        ConnectionKind::SvK2,
        ConnectionKind::Adapted,
    ] {
        properties.push(prop_projected_acceleration_two_path(seed, samples, kind, &thr));
    }
    for kind in [
        ConnectionKind::SvK1,
        ConnectionKind::SvK2,
        ConnectionKind::Adapted,
    ] {
        properties.push(prop_curve_limit_consistency(seed, samples, kind, &thr));
    }
    for kind in [
        ConnectionKind::SvK1,
        ConnectionKind::SvK2,
        ConnectionKind::Adapted,
    ] {
        properties.push(prop_geodesic_limit_consistency(seed, samples, kind, &thr));
    }
    properties.push(prop_mean_limit_consistency(seed, samples, &thr));
    for kind in [
        ConnectionKind::SvK1,
        ConnectionKind::SvK2,
        ConnectionKind::Adapted,
    ] {
        properties.push(prop_gauss_limit_consistency(seed, samples, kind, &thr));
    }
    properties.push(prop_gauss_remainder_exponent(seed, samples, &thr));
    properties.push(prop_curve_remainder_exponent(seed, samples, &thr));
    properties.push(prop_measure_length(seed, samples, &thr));
    properties.push(prop_measure_area(seed, samples, &thr));

    let all_passed = properties.iter().all(|p| p.passed);
    VerifyReport {
        seed,
        samples,
        properties,
        all_passed,
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
}

fn metric(l: f64) -> MetricParam {
    MetricParam::new(l).expect("sampled metric parameters are positive")
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let t: f64 = rng.gen();
    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

/// Random field expression over x1, x2, x3, depth-bounded, with guarded
/// denominators and function arguments.
fn random_field_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => Expr::variable(Var::X1),
            1 => Expr::variable(Var::X2),
            2 => Expr::variable(Var::X3),
            _ => Expr::num(rng.gen_range(-2.0..2.0)),
        };
    }
    let a = random_field_expr(rng, depth - 1);
    match rng.gen_range(0..12) {
        0 | 1 => Expr::bin(BinOp::Add, a, random_field_expr(rng, depth - 1)),
        2 | 3 => Expr::bin(BinOp::Sub, a, random_field_expr(rng, depth - 1)),
        4 | 5 => Expr::bin(BinOp::Mul, a, random_field_expr(rng, depth - 1)),
        6 => {
            // Denominator bounded away from zero: b² + c with c ≥ 0.5.
            let b = random_field_expr(rng, depth - 1);
            let denom = Expr::bin(
                BinOp::Add,
                Expr::pow_int(b, 2),
                Expr::num(rng.gen_range(0.5..2.0)),
            );
            Expr::bin(BinOp::Div, a, denom)
        }
        7 => Expr::pow_int(a, rng.gen_range(2..4)),
        8 => Expr::call(Func::Sin, a),
        9 => Expr::call(Func::Cos, a),
        10 => Expr::call(
            Func::Exp,
            Expr::bin(BinOp::Mul, Expr::num(0.4), a),
        ),
        _ => {
            // sqrt / log of a positive quantity: a² + c.
            let shifted = Expr::bin(
                BinOp::Add,
                Expr::pow_int(a, 2),
                Expr::num(rng.gen_range(0.5..2.0)),
            );
            if rng.gen_bool(0.5) {
                Expr::call(Func::Sqrt, shifted)
            } else {
                Expr::call(Func::Log, shifted)
            }
        }
    }
}

/// Smooth test curve: per-component a0 + a1 t + a2 t²/2 + a3 sin t + a4 cos t.
fn random_curve(rng: &mut ChaCha8Rng) -> ParamCurve {
    let mut comp = || {
        let a: [f64; 5] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let t = Expr::variable(Var::T);
        let mut e = Expr::num(a[0]);
        e = Expr::bin(
            BinOp::Add,
            e,
            Expr::bin(BinOp::Mul, Expr::num(a[1]), t.clone()),
        );
        e = Expr::bin(
            BinOp::Add,
            e,
            Expr::bin(
                BinOp::Mul,
                Expr::num(a[2] / 2.0),
                Expr::pow_int(t.clone(), 2),
            ),
        );
        e = Expr::bin(
            BinOp::Add,
            e,
            Expr::bin(BinOp::Mul, Expr::num(a[3]), Expr::call(Func::Sin, t.clone())),
        );
        Expr::bin(
            BinOp::Add,
            e,
            Expr::bin(BinOp::Mul, Expr::num(a[4]), Expr::call(Func::Cos, t)),
        )
    };
    ParamCurve::new([comp(), comp(), comp()], (-2.0, 2.0))
}

/// Curve point with |ω(γ̇)| bounded away from 0 relative to the speed.
fn random_nonhorizontal_point(
    rng: &mut ChaCha8Rng,
    thr: &Thresholds,
) -> CurvePoint {
    loop {
        let curve = random_curve(rng);
        let t = rng.gen_range(-1.5..1.5);
        let Ok(cp) = curve.at(t, thr) else { continue };
        if cp.omega.abs() >= 0.05 * (1.0 + cp.speed) && cp.speed <= 20.0 {
            return cp;
        }
    }
}

/// Curve through the origin with ω(γ̇)(0) = 0 exactly. `divergent` selects
/// a nonzero discriminant for the given connection.
fn horizontal_sample(
    rng: &mut ChaCha8Rng,
    kind: ConnectionKind,
    divergent: bool,
    thr: &Thresholds,
) -> CurvePoint {
    loop {
        let a1: f64 = rng.gen_range(-1.0..1.0);
        let b1: f64 = rng.gen_range(-1.0..1.0);
        if a1 * a1 + b1 * b1 < 0.2 {
            continue;
        }
        let a2: f64 = rng.gen_range(-1.0..1.0);
        let b2: f64 = rng.gen_range(-1.0..1.0);
        // ω̇(0) = c; the svk2 discriminant adds γ̇1 γ̇2 / 2.
        let c = if divergent {
            let mut c = rng.gen_range(-1.0..1.0f64);
            if matches!(kind, ConnectionKind::SvK2) {
                if (c + a1 * b1 / 2.0).abs() < 0.2 {
                    c += 0.5;
                }
            } else if c.abs() < 0.2 {
                c += 0.5;
            }
            c
        } else {
            match kind {
                ConnectionKind::SvK2 => -a1 * b1 / 2.0,
                _ => 0.0,
            }
        };
        let t = Expr::variable(Var::T);
        let lin = |k: f64| Expr::bin(BinOp::Mul, Expr::num(k), t.clone());
        let quad = |k: f64| {
            Expr::bin(
                BinOp::Mul,
                Expr::num(k / 2.0),
                Expr::pow_int(t.clone(), 2),
            )
        };
        let g1 = Expr::bin(BinOp::Add, lin(a1), quad(a2));
        let g2 = Expr::bin(BinOp::Add, lin(b1), quad(b2));
        let g3 = quad(c);
        let curve = ParamCurve::new([g1, g2, g3], (-1.0, 1.0));
        let Ok(cp) = curve.at(0.0, thr) else { continue };
        debug_assert!(cp.omega == 0.0);
        return cp;
    }
}

/// Random surface with a valid, clearly non-characteristic point on it.
fn random_surface_point(rng: &mut ChaCha8Rng, thr: &Thresholds) -> (Expr, Point) {
    loop {
        let (u, point) = match rng.gen_range(0..3) {
            0 => {
                // Graph x3 = g(x1, x2) with moderate quadratic coefficients.
                let (a, b, c) = (
                    rng.gen_range(-0.8..0.8),
                    rng.gen_range(-0.8..0.8),
                    rng.gen_range(-0.8..0.8),
                );
                let (d, e, f) = (
                    rng.gen_range(-0.8..0.8),
                    rng.gen_range(-0.8..0.8),
                    rng.gen_range(-0.8..0.8),
                );
                let g = graph_expr(a, b, c, d, e, f);
                let x1 = rng.gen_range(-1.2..1.2);
                let x2 = rng.gen_range(-1.2..1.2);
                let x3 = expr::eval_value(&g, VarSpace::Field, [x1, x2, 0.0])
                    .expect("graph expressions are total");
                let u = Expr::bin(BinOp::Sub, Expr::variable(Var::X3), g);
                (u, Point::new(x1, x2, x3))
            }
            1 => {
                // Sphere of radius R.
                let r: f64 = rng.gen_range(0.8..2.0);
                let u = Expr::bin(
                    BinOp::Sub,
                    Expr::bin(
                        BinOp::Add,
                        Expr::bin(
                            BinOp::Add,
                            Expr::pow_int(Expr::variable(Var::X1), 2),
                            Expr::pow_int(Expr::variable(Var::X2), 2),
                        ),
                        Expr::pow_int(Expr::variable(Var::X3), 2),
                    ),
                    Expr::num(r * r),
                );
                let dir = random_direction(rng);
                (
                    u,
                    Point::new(r * dir[0], r * dir[1], r * dir[2]),
                )
            }
            _ => {
                // Tilted plane a x1 + b x2 + x3 + c = 0.
                let (a, b, c) = (
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let u = Expr::bin(
                    BinOp::Add,
                    Expr::bin(
                        BinOp::Add,
                        Expr::bin(BinOp::Mul, Expr::num(a), Expr::variable(Var::X1)),
                        Expr::bin(BinOp::Mul, Expr::num(b), Expr::variable(Var::X2)),
                    ),
                    Expr::bin(BinOp::Add, Expr::variable(Var::X3), Expr::num(c)),
                );
                let x1 = rng.gen_range(-1.2..1.2);
                let x2 = rng.gen_range(-1.2..1.2);
                (u, Point::new(x1, x2, -a * x1 - b * x2 - c))
            }
        };
        let Ok(sj) = surface_jets(&u, point, metric(1.0), thr) else {
            continue;
        };
        if sj.l.v >= 0.2 && sj.l.v <= 50.0 {
            return (u, point);
        }
    }
}

fn graph_expr(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Expr {
    let x1 = || Expr::variable(Var::X1);
    let x2 = || Expr::variable(Var::X2);
    let mut g = Expr::bin(BinOp::Mul, Expr::num(a), Expr::pow_int(x1(), 2));
    g = Expr::bin(
        BinOp::Add,
        g,
        Expr::bin(
            BinOp::Mul,
            Expr::num(b),
            Expr::bin(BinOp::Mul, x1(), x2()),
        ),
    );
    g = Expr::bin(
        BinOp::Add,
        g,
        Expr::bin(BinOp::Mul, Expr::num(c), Expr::pow_int(x2(), 2)),
    );
    g = Expr::bin(
        BinOp::Add,
        g,
        Expr::bin(BinOp::Mul, Expr::num(d), x1()),
    );
    g = Expr::bin(
        BinOp::Add,
        g,
        Expr::bin(BinOp::Mul, Expr::num(e), x2()),
    );
    Expr::bin(BinOp::Add, g, Expr::num(f))
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0f64),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Random curve lying exactly on a random graph surface, with the sample
/// point non-characteristic; optionally requires a non-horizontal velocity.
fn random_on_surface_sample(
    rng: &mut ChaCha8Rng,
    nonhorizontal: bool,
    thr: &Thresholds,
) -> (Expr, ParamCurve, SurfaceCurvePoint) {
    loop {
        let (a, b, c) = (
            rng.gen_range(-0.6..0.6),
            rng.gen_range(-0.6..0.6),
            rng.gen_range(-0.6..0.6),
        );
        let (d, e, f) = (
            rng.gen_range(-0.6..0.6),
            rng.gen_range(-0.6..0.6),
            rng.gen_range(-0.6..0.6),
        );
        let g = graph_expr(a, b, c, d, e, f);
        let u = Expr::bin(BinOp::Sub, Expr::variable(Var::X3), g.clone());
        let t = Expr::variable(Var::T);
        let mut planar = || {
            let k: [f64; 4] = [
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
            ];
            let mut e0 = Expr::num(k[0]);
            e0 = Expr::bin(
                BinOp::Add,
                e0,
                Expr::bin(BinOp::Mul, Expr::num(k[1]), t.clone()),
            );
            e0 = Expr::bin(
                BinOp::Add,
                e0,
                Expr::bin(BinOp::Mul, Expr::num(k[2]), Expr::call(Func::Sin, t.clone())),
            );
            Expr::bin(
                BinOp::Add,
                e0,
                Expr::bin(BinOp::Mul, Expr::num(k[3]), Expr::call(Func::Cos, t.clone())),
            )
        };
        let c1 = planar();
        let c2 = planar();
        let c3 = g.substitute(Var::X1, &c1).substitute(Var::X2, &c2);
        let curve = ParamCurve::new([c1, c2, c3], (-1.5, 1.5));
        let tv = rng.gen_range(-1.2..1.2);
        let Ok(scp) = surface_curve_point(&curve, &u, metric(1.0), tv, thr) else {
            continue;
        };
        if scp.frame.l < 0.2 || scp.cp.speed > 20.0 {
            continue;
        }
        if nonhorizontal && scp.cp.omega.abs() < 0.05 * (1.0 + scp.cp.speed) {
            continue;
        }
        return (u, curve, scp);
    }
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

fn prop_jet_gradient_fd(seed: u64, samples: usize) -> PropertyResult {
    let (worst, n) = jet_fd_worst(seed, samples, false);
    PropertyResult::from_worst("jet-gradient-vs-finite-difference", n, worst, 1e-6)
}

fn prop_jet_hessian_fd(seed: u64, samples: usize) -> PropertyResult {
    let (worst, n) = jet_fd_worst(seed, samples, true);
    PropertyResult::from_worst("jet-hessian-vs-finite-difference", n, worst, 1e-4)
}

fn jet_fd_worst(seed: u64, samples: usize, hessian: bool) -> (f64, usize) {
    let mut rng = rng_for(seed, if hessian { 2 } else { 1 });
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < samples && attempts < 100 * samples {
        attempts += 1;
        let e = random_field_expr(&mut rng, 3);
        let p = [
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
        ];
        let Ok(jet) = expr::eval_jet(&e, VarSpace::Field, p) else {
            continue;
        };
        if !jet.v.is_finite()
            || jet.d.iter().any(|d| !d.is_finite() || d.abs() > 1e3)
            || jet.h.iter().any(|x| !x.is_finite() || x.abs() > 1e3)
        {
            continue;
        }
        let value_at = |q: [f64; 3]| expr::eval_value(&e, VarSpace::Field, q);
        let shift = |mut q: [f64; 3], i: usize, d: f64| {
            q[i] += d;
            q
        };
        let mut sample_ok = true;
        let mut devs: Vec<f64> = Vec::new();
        if !hessian {
            for i in 0..3 {
                let (Ok(fp), Ok(fm)) = (value_at(shift(p, i, h)), value_at(shift(p, i, -h)))
                else {
                    sample_ok = false;
                    break;
                };
                let fd = (fp - fm) / (2.0 * h);
                devs.push((jet.d[i] - fd).abs() / (1.0 + jet.d[i].abs()));
            }
        } else {
            'outer: for i in 0..3 {
                for j in 0..3 {
                    let fd = if i == j {
                        let (Ok(fp), Ok(f0), Ok(fm)) = (
                            value_at(shift(p, i, h)),
                            value_at(p),
                            value_at(shift(p, i, -h)),
                        ) else {
                            sample_ok = false;
                            break 'outer;
                        };
                        (fp - 2.0 * f0 + fm) / (h * h)
                    } else {
                        let (Ok(fpp), Ok(fpm), Ok(fmp), Ok(fmm)) = (
                            value_at(shift(shift(p, i, h), j, h)),
                            value_at(shift(shift(p, i, h), j, -h)),
                            value_at(shift(shift(p, i, -h), j, h)),
                            value_at(shift(shift(p, i, -h), j, -h)),
                        ) else {
                            sample_ok = false;
                            break 'outer;
                        };
                        (fpp - fpm - fmp + fmm) / (4.0 * h * h)
                    };
                    let exact = jet.hess(i, j);
                    devs.push((exact - fd).abs() / (1.0 + exact.abs()));
                }
            }
        }
        if !sample_ok {
            continue;
        }
        for d in devs {
            worst = worst.max(d);
        }
        accepted += 1;
    }
    (worst, accepted)
}

fn prop_jet_product_rule(seed: u64, samples: usize) -> PropertyResult {
    let mut rng = rng_for(seed, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut random_jet = || {
            let mut j = Jet2::constant(rng.gen_range(-2.0..2.0));
            for i in 0..3 {
                j.d[i] = rng.gen_range(-2.0..2.0);
            }
            for k in 0..6 {
                j.h[k] = rng.gen_range(-2.0..2.0);
            }
            j
        };
        let a = random_jet();
        let b = random_jet();
        let c = a * b;
        for i in 0..3 {
            let expect = a.v * b.d[i] + b.v * a.d[i];
            let ulp = f64::EPSILON * expect.abs().max(1.0);
            worst = worst.max((c.d[i] - expect).abs() / ulp);
        }
    }
    PropertyResult::from_worst("jet-product-rule-exact", samples, worst, 4.0)
}

fn prop_expr_roundtrip(seed: u64, samples: usize) -> PropertyResult {
    let mut rng = rng_for(seed, 4);
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < samples && attempts < 100 * samples {
        attempts += 1;
        let e = random_field_expr(&mut rng, 3);
        let printed = e.to_string();
        let Ok(reparsed) = expr::parse(&printed) else {
            worst = f64::INFINITY;
            break;
        };
        let p = [
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
        ];
        let (Ok(v1), Ok(v2)) = (
            expr::eval_value(&e, VarSpace::Field, p),
            expr::eval_value(&reparsed, VarSpace::Field, p),
        ) else {
            continue;
        };
        if !v1.is_finite() {
            continue;
        }
        worst = worst.max((v1 - v2).abs());
        accepted += 1;
    }
    PropertyResult::from_worst("expr-print-parse-roundtrip", accepted, worst, 0.0)
}

fn prop_omega_frame_consistency(seed: u64, samples: usize) -> PropertyResult {
    let mut rng = rng_for(seed, 5);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = Point::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let v = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        worst = worst.max((heis::frame_from_coordinate(p, v).a3 - heis::omega(p, v)).abs());
    }
    // Unit norm of the normalized vertical frame vector across the L grid.
    let mut l = 1.0;
    while l <= 1e8 {
        let m = metric(l);
        let v = FrameVector::new(0.0, 0.0, m.inv_sqrt_l());
        worst = worst.max((v.norm_l(m) - 1.0).abs());
        l *= 10.0;
    }
    PropertyResult::from_worst("omega-frame-consistency", samples, worst, 1e-12)
}

fn prop_omega_dot_vs_jets(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    let mut rng = rng_for(seed, 6);
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    while accepted < samples {
        let curve = random_curve(&mut rng);
        let t = rng.gen_range(-1.5..1.5);
        let Ok(cp) = curve.at(t, thr) else { continue };
        // Independent route with the velocity cross terms left in place.
        let full = cp.acc[2]
            + 0.5
                * (cp.vel[1] * cp.vel[0] + cp.pos.x2 * cp.acc[0]
                    - cp.vel[0] * cp.vel[1]
                    - cp.pos.x1 * cp.acc[1]);
        let scale = 1.0 + full.abs();
        worst = worst.max((cp.omega_dot - full).abs() / scale);
        accepted += 1;
    }
    PropertyResult::from_worst("omega-dot-vs-jet-derivative", accepted, worst, 1e-10)
}

fn prop_frame_orthonormality(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    let mut rng = rng_for(seed, 7);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (u, point) = random_surface_point(&mut rng, thr);
        let l = log_uniform(&mut rng, 1e-2, 1e4);
        let Ok(f) = surface_frame(&u, point, metric(l), thr) else {
            continue;
        };
        let vecs = [f.v_l, f.e1, f.e2];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((vecs[i].dot_l(vecs[j], f.metric) - want).abs());
            }
        }
        worst = worst.max((f.pbar * f.pbar + f.qbar * f.qbar - 1.0).abs());
        worst = worst.max(f.e1.a3.abs());
    }
    PropertyResult::from_worst("surface-frame-orthonormality", samples, worst, 1e-10)
}

fn corrupt(table: &mut CoeffTable) {
    // Break metric compatibility: a diagonal coefficient along X1.
    table.gamma[0][0] = table.gamma[0][0] + FrameVector::new(0.05, 0.0, 0.0);
}

fn prop_metric_compatibility(
    seed: u64,
    samples: usize,
    kind: ConnectionKind,
    fault: Option<Fault>,
    thr: &Thresholds,
) -> PropertyResult {
    let mut rng = rng_for(seed, 8 + kind as u64);
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    while accepted < samples {
        let curve = random_curve(&mut rng);
        let field_u = random_curve(&mut rng);
        let field_v = random_curve(&mut rng);
        let t = rng.gen_range(-1.5..1.5);
        let Ok(cp) = curve.at(t, thr) else { continue };
        let (Ok(ju), Ok(jv)) = (
            expr::eval_curve_jet(&field_u.components, t),
            expr::eval_curve_jet(&field_v.components, t),
        ) else {
            continue;
        };
        let l = log_uniform(&mut rng, 1e-2, 1e3);
        let m = metric(l);
        let mut table = coeff_table(kind, m);
        if fault == Some(Fault::CorruptCoeffTable(kind)) {
            corrupt(&mut table);
        }
        let u_vec = FrameVector::new(ju.pos[0], ju.pos[1], ju.pos[2]);
        let u_dot = FrameVector::new(ju.vel[0], ju.vel[1], ju.vel[2]);
        let v_vec = FrameVector::new(jv.pos[0], jv.pos[1], jv.pos[2]);
        let v_dot = FrameVector::new(jv.vel[0], jv.vel[1], jv.vel[2]);
        // d/dt ⟨U, V⟩_L from the component jets.
        let lhs = u_dot.a1 * v_vec.a1
            + u_vec.a1 * v_dot.a1
            + u_dot.a2 * v_vec.a2
            + u_vec.a2 * v_dot.a2
            + l * (u_dot.a3 * v_vec.a3 + u_vec.a3 * v_dot.a3);
        let vel = cp.velocity_frame();
        let nu = table.covariant_along(vel, u_vec, u_dot);
        let nv = table.covariant_along(vel, v_vec, v_dot);
        let rhs = nu.dot_l(v_vec, m) + u_vec.dot_l(nv, m);
        let scale = 1.0 + lhs.abs() + u_vec.norm_l(m) * v_vec.norm_l(m) * (1.0 + cp.speed);
        worst = worst.max((lhs - rhs).abs() / scale);
        accepted += 1;
    }
    PropertyResult::from_worst(
        format!("metric-compatibility[{}]", kind.name()),
        accepted,
        worst,
        1e-10,
    )
}

fn prop_curvature_antisymmetry() -> PropertyResult {
    let mut worst: f64 = 0.0;
    for kind in ConnectionKind::ALL {
        for l in [0.25, 1.0, 16.0, 1e4] {
            let m = metric(l);
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let a = curvature_tensor(kind, m, i, j, k);
                        let b = curvature_tensor(kind, m, j, i, k);
                        let s = a + b;
                        worst = worst
                            .max(s.a1.abs())
                            .max(s.a2.abs())
                            .max(s.a3.abs());
                    }
                }
            }
        }
    }
    PropertyResult::from_worst("curvature-antisymmetry", 4 * 4 * 27, worst, 0.0)
}

fn prop_curvature_table_regression() -> PropertyResult {
    let mut worst: f64 = 0.0;
    let mut n = 0usize;
    for l in [0.25, 1.0, 16.0, 1e4] {
        let m = metric(l);
        // First splitting connection: only R(X1,X2)X1 = (L/2) X2 and
        // R(X1,X2)X2 = −(L/2) X1 survive.
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let got = curvature_tensor(ConnectionKind::SvK1, m, i, j, k);
                    let want = match (i, j, k) {
                        (0, 1, 0) => FrameVector::new(0.0, l / 2.0, 0.0),
                        (1, 0, 0) => FrameVector::new(0.0, -l / 2.0, 0.0),
                        (0, 1, 1) => FrameVector::new(-l / 2.0, 0.0, 0.0),
                        (1, 0, 1) => FrameVector::new(l / 2.0, 0.0, 0.0),
                        _ => FrameVector::ZERO,
                    };
                    let d = got - want;
                    let rel = 1.0 + l;
                    worst = worst.max(
                        d.a1.abs().max(d.a2.abs()).max(d.a3.abs()) / rel,
                    );
                    n += 1;
                }
            }
        }
        // Flat connections.
        for kind in [ConnectionKind::SvK2, ConnectionKind::Adapted] {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let got = curvature_tensor(kind, m, i, j, k);
                        worst = worst
                            .max(got.a1.abs())
                            .max(got.a2.abs())
                            .max(got.a3.abs());
                        n += 1;
                    }
                }
            }
        }
        // Levi-Civita horizontal sectional curvature −3L/4.
        let k12 = sectional(
            ConnectionKind::LeviCivita,
            m,
            FrameVector::new(1.0, 0.0, 0.0),
            FrameVector::new(0.0, 1.0, 0.0),
        );
        worst = worst.max((k12 + 0.75 * l).abs() / (1.0 + l));
        n += 1;
    }
    PropertyResult::from_worst("curvature-table-regression", n, worst, 1e-13)
}

fn prop_sectional_surface_frame(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    let mut rng = rng_for(seed, 9);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (u, point) = random_surface_point(&mut rng, thr);
        let l = log_uniform(&mut rng, 1e-2, 1e4);
        let m = metric(l);
        let Ok(f) = surface_frame(&u, point, m, thr) else {
            continue;
        };
        let table = CurvatureTable::new(ConnectionKind::SvK1, m);
        let got = table.sectional(f.e1, f.e2);
        let want = -(l / 2.0) * f.rbar_l * f.rbar_l;
        worst = worst.max((got - want).abs() / (1.0 + want.abs()));
        let adapted = CurvatureTable::new(ConnectionKind::Adapted, m).sectional(f.e1, f.e2);
        worst = worst.max(adapted.abs());
    }
    PropertyResult::from_worst("sectional-on-surface-frame", samples, worst, 1e-12)
}

fn prop_curve_two_path(
    seed: u64,
    samples: usize,
    kind: ConnectionKind,
    thr: &Thresholds,
) -> PropertyResult {
    let mut rng = rng_for(seed, 10 + kind as u64);
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    while accepted < samples {
        let curve = random_curve(&mut rng);
        let t = rng.gen_range(-1.5..1.5);
        let Ok(cp) = curve.at(t, thr) else { continue };
        let l = log_uniform(&mut rng, 1e-2, 1e4);
        let (Ok(a), Ok(b)) = (
            curve_curvature(kind, metric(l), &cp, thr),
            curve_curvature_closed_form(kind, metric(l), &cp, thr),
        ) else {
            continue;
        };
        worst = worst.max((a - b).abs() / (1.0 + b.abs()));
        accepted += 1;
    }
    PropertyResult::from_worst(
        format!("curve-curvature-two-path[{}]", kind.name()),
        accepted,
        worst,
        1e-10,
    )
}

fn prop_ii_two_path(
    seed: u64,
    samples: usize,
    kind: ConnectionKind,
    thr: &Thresholds,
) -> PropertyResult {
    let mut rng = rng_for(seed, 20 + kind as u64);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (u, point) = random_surface_point(&mut rng, thr);
        let l = log_uniform(&mut rng, 1e-2, 1e4);
        let Ok(sj) = surface_jets(&u, point, metric(l), thr) else {
            continue;
        };
        let a = ii_from_jets(kind, &sj);
        let b = ii_closed_from_jets(kind, &sj);
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((a[i][j] - b[i][j]).abs() / (1.0 + b[i][j].abs()));
            }
        }
    }
    PropertyResult::from_worst(
        format!("second-fundamental-form-two-path[{}]", kind.name()),
        samples,
        worst,
        1e-9,
    )
}

fn prop_projected_acceleration_two_path(
    seed: u64,
    samples: usize,
    kind: ConnectionKind,
    thr: &Thresholds,
) -> PropertyResult {
    let mut rng = rng_for(seed, 30 + kind as u64);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (u, curve, seed_scp) = random_on_surface_sample(&mut rng, false, thr);
        let l = log_uniform(&mut rng, 1e-2, 1e4);
        let m = metric(l);
        // The frame is L-dependent; rebuild the point under the metric the
        // two paths will use.
        let Ok(scp) = surface_curve_point(&curve, &u, m, seed_scp.cp.t, thr) else {
            continue;
        };
        let (g1, g2) = projected_acceleration(kind, m, &scp);
        let Ok((e1, e2)) = projected_acceleration_expansion(kind, m, &scp) else {
            continue;
        };
        worst = worst.max((g1 - e1).abs() / (1.0 + e1.abs()));
        worst = worst.max((g2 - e2).abs() / (1.0 + e2.abs()));
    }
    PropertyResult::from_worst(
        format!("projected-acceleration-two-path[{}]", kind.name()),
        samples,
        worst,
        1e-10,
    )
}

fn prop_curve_limit_consistency(
    seed: u64,
    samples: usize,
    kind: ConnectionKind,
    thr: &Thresholds,
) -> PropertyResult {
    let mut rng = rng_for(seed, 40 + kind as u64);
    let big = metric(1e8);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        // Mix the three branches.
        let cp = match i % 3 {
            0 => random_nonhorizontal_point(&mut rng, thr),
            1 => horizontal_sample(&mut rng, kind, false, thr),
            _ => horizontal_sample(&mut rng, kind, true, thr),
        };
        let Ok(lim) = curve_curvature_limit(kind, &cp, thr) else {
            continue;
        };
        let Ok(k) = curve_curvature(kind, big, &cp, thr) else {
            continue;
        };
        let dev = match lim.branch {
            LimitBranch::NonHorizontal | LimitBranch::HorizontalFinite => {
                (k - lim.value).abs() / (1.0 + lim.value)
            }
            LimitBranch::HorizontalDivergent => (k / big.sqrt_l() - lim.value).abs(),
        };
        worst = worst.max(dev);
    }
    PropertyResult::from_worst(
        format!("curve-limit-consistency[{}]", kind.name()),
        samples,
        worst,
        1e-3,
    )
}

fn prop_geodesic_limit_consistency(
    seed: u64,
    samples: usize,
    kind: ConnectionKind,
    thr: &Thresholds,
) -> PropertyResult {
    let mut rng = rng_for(seed, 50 + kind as u64);
    let big = metric(1e8);
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < samples && attempts < 200 * samples {
        attempts += 1;
        let (u, curve, _) = random_on_surface_sample(&mut rng, true, thr);
        // Re-evaluate at the sample parameter under the large metric.
        let t = rng.gen_range(-1.2..1.2);
        let Ok(scp) = surface_curve_point(&curve, &u, big, t, thr) else {
            continue;
        };
        if scp.cp.omega.abs() < 0.05 * (1.0 + scp.cp.speed) || scp.frame.l < 0.2 {
            continue;
        }
        let mut ok = true;
        for signed in [false, true] {
            let Ok(lim) =
                geodesic_curvature_limit(kind, &scp, signed, Orientation::AsAuthored, thr)
            else {
                ok = false;
                break;
            };
            let Ok(k) = geodesic_curvature(kind, big, &scp, signed, Orientation::AsAuthored, thr)
            else {
                ok = false;
                break;
            };
            worst = worst.max((k - lim.value).abs() / (1.0 + lim.value.abs()));
        }
        if ok {
            accepted += 1;
        }
    }
    PropertyResult::from_worst(
        format!("geodesic-limit-consistency[{}]", kind.name()),
        accepted,
        worst,
        1e-3,
    )
}

fn prop_mean_limit_consistency(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    let mut rng = rng_for(seed, 60);
    let big = metric(1e8);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (u, point) = random_surface_point(&mut rng, thr);
        let Ok(limit) = mean_curvature_limit(&u, point, thr) else {
            continue;
        };
        for kind in ConnectionKind::ALL {
            let Ok(sj) = surface_jets(&u, point, big, thr) else {
                continue;
            };
            let ii = ii_from_jets(kind, &sj);
            let h = ii[0][0] + ii[1][1];
            worst = worst.max((h - limit).abs() / (1.0 + limit.abs()));
        }
    }
    PropertyResult::from_worst("mean-curvature-limit-consistency", samples, worst, 1e-3)
}

fn prop_gauss_limit_consistency(
    seed: u64,
    samples: usize,
    kind: ConnectionKind,
    thr: &Thresholds,
) -> PropertyResult {
    let mut rng = rng_for(seed, 70 + kind as u64);
    let big = metric(1e8);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (u, point) = random_surface_point(&mut rng, thr);
        let Ok(limit) = gauss_curvature_limit(kind, &u, point, thr) else {
            continue;
        };
        let Ok(sj) = surface_jets(&u, point, big, thr) else {
            continue;
        };
        let rep = gauss_from_jets(kind, &sj);
        worst = worst.max((rep.k_surface - limit).abs() / (1.0 + limit.abs()));
    }
    PropertyResult::from_worst(
        format!("gauss-curvature-limit-consistency[{}]", kind.name()),
        samples,
        worst,
        1e-3,
    )
}

/// Least-squares slope of log(deviation) against log(L), negated so a
/// remainder c·L^(−α) fits α.
fn fit_exponent(ls: &[f64], devs: &[f64]) -> Option<f64> {
    let n = ls.len() as f64;
    if devs.iter().any(|&d| !(d > 1e-13)) {
        return None;
    }
    let xs: Vec<f64> = ls.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = devs.iter().map(|d| d.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..xs.len() {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    Some(-sxy / sxx)
}

/// Window check helper: worst |α − 0.75| over samples, tolerance 0.35
/// (i.e. the accepted exponent window is [0.4, 1.1]).
const EXPONENT_CENTER: f64 = 0.75;
const EXPONENT_HALF_WIDTH: f64 = 0.35;

fn prop_gauss_remainder_exponent(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    let mut rng = rng_for(seed, 80);
    let ls = [1e4, 1e5, 1e6, 1e7, 1e8];
    let mut worst: f64 = 0.0;
    let mut n = 0usize;
    let count = (samples / 4).clamp(3, 40);
    let mut attempts = 0;
    while n < count && attempts < 100 * count {
        attempts += 1;
        let (u, point) = random_surface_point(&mut rng, thr);
        let Ok(limit) = gauss_curvature_limit(ConnectionKind::SvK1, &u, point, thr) else {
            continue;
        };
        let mut devs = Vec::new();
        let mut valid = true;
        for &l in &ls {
            match surface_jets(&u, point, metric(l), thr) {
                Ok(sj) => {
                    let rep = gauss_from_jets(ConnectionKind::SvK1, &sj);
                    devs.push((rep.k_surface - limit).abs());
                }
                Err(_) => {
                    valid = false;
                    break;
                }
            }
        }
        if !valid {
            continue;
        }
        let Some(alpha) = fit_exponent(&ls, &devs) else {
            continue;
        };
        worst = worst.max((alpha - EXPONENT_CENTER).abs());
        n += 1;
    }
    PropertyResult::from_worst(
        "gauss-remainder-exponent-window",
        n,
        worst,
        EXPONENT_HALF_WIDTH,
    )
}

fn prop_curve_remainder_exponent(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    let mut rng = rng_for(seed, 81);
    let ls = [1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8];
    let mut worst: f64 = 0.0;
    let mut n = 0usize;
    let count = (samples / 4).clamp(3, 40);
    let mut attempts = 0;
    while n < count && attempts < 100 * count {
        attempts += 1;
        let cp = random_nonhorizontal_point(&mut rng, thr);
        let Ok(lim) = curve_curvature_limit(ConnectionKind::SvK1, &cp, thr) else {
            continue;
        };
        let mut devs = Vec::new();
        let mut valid = true;
        for &l in &ls {
            match curve_curvature(ConnectionKind::SvK1, metric(l), &cp, thr) {
                Ok(k) => devs.push((k - lim.value).abs()),
                Err(_) => {
                    valid = false;
                    break;
                }
            }
        }
        if !valid {
            continue;
        }
        let Some(alpha) = fit_exponent(&ls, &devs) else {
            continue;
        };
        worst = worst.max((alpha - EXPONENT_CENTER).abs());
        n += 1;
    }
    PropertyResult::from_worst(
        "curve-remainder-exponent-window",
        n,
        worst,
        EXPONENT_HALF_WIDTH,
    )
}

fn prop_measure_length(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    let mut rng = rng_for(seed, 90);
    let big = metric(1e8);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let cp = random_nonhorizontal_point(&mut rng, thr);
        let scaled = cp.velocity_frame().norm_l(big) * big.inv_sqrt_l();
        let limit = cp.omega.abs();
        worst = worst.max((scaled - limit).abs() / (1.0 + limit));
    }
    PropertyResult::from_worst("measure-consistency-length", samples, worst, 1e-4)
}

fn prop_measure_area(seed: u64, samples: usize, thr: &Thresholds) -> PropertyResult {
    use crate::gb::{limit_area_element, riemannian_area_element};
    use crate::surface::{Chart, ChartDomain};
    let mut rng = rng_for(seed, 91);
    let big = metric(1e8);
    let mut worst: f64 = 0.0;
    let charts: Vec<(Expr, Chart)> = vec![
        (
            expr::parse("x3").unwrap(),
            Chart {
                map: [
                    expr::parse("s1").unwrap(),
                    expr::parse("s2").unwrap(),
                    expr::parse("0").unwrap(),
                ],
                domain: ChartDomain::Rect {
                    s1: (0.2, 1.0),
                    s2: (0.2, 1.0),
                },
            },
        ),
        (
            expr::parse("x3 - (x1^2 + x2^2)/2").unwrap(),
            Chart {
                map: [
                    expr::parse("s1").unwrap(),
                    expr::parse("s2").unwrap(),
                    expr::parse("(s1^2 + s2^2)/2").unwrap(),
                ],
                domain: ChartDomain::Rect {
                    s1: (0.2, 1.0),
                    s2: (0.2, 1.0),
                },
            },
        ),
        (
            expr::parse("x1^2 + x2^2 - 1").unwrap(),
            Chart {
                map: [
                    expr::parse("cos(s1)").unwrap(),
                    expr::parse("sin(s1)").unwrap(),
                    expr::parse("s2").unwrap(),
                ],
                domain: ChartDomain::Rect {
                    s1: (0.0, 6.0),
                    s2: (0.0, 1.0),
                },
            },
        ),
    ];
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < samples && attempts < 100 * samples {
        attempts += 1;
        let (u, chart) = &charts[rng.gen_range(0..charts.len())];
        let (s1, s2) = match chart.domain {
            ChartDomain::Rect { s1, s2 } => (
                rng.gen_range(s1.0..s1.1),
                rng.gen_range(s2.0..s2.1),
            ),
            ChartDomain::Disk { .. } => unreachable!(),
        };
        let Ok(limit) = limit_area_element(u, chart, s1, s2, thr) else {
            continue;
        };
        let Ok(riem) = riemannian_area_element(chart, big, s1, s2) else {
            continue;
        };
        let scaled = riem * big.inv_sqrt_l();
        worst = worst.max((scaled - limit.abs()).abs() / (1.0 + limit.abs()));
        accepted += 1;
    }
    PropertyResult::from_worst("measure-consistency-area", accepted, worst, 1e-4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_with_default_seed() {
        let report = run(42, 25);
        for p in &report.properties {
            assert!(
                p.passed,
                "property {} failed: worst {} > tolerance {}",
                p.name, p.worst, p.tolerance
            );
        }
        assert!(report.all_passed);
    }

    #[test]
    fn corrupted_table_fails_metric_compatibility_by_name() {
        let report = run_with_fault(
            7,
            10,
            Some(Fault::CorruptCoeffTable(ConnectionKind::SvK1)),
        );
        assert!(!report.all_passed);
        let failing: Vec<&PropertyResult> =
            report.properties.iter().filter(|p| !p.passed).collect();
        assert!(
            failing
                .iter()
                .any(|p| p.name == "metric-compatibility[svk1]"),
            "{:?}",
            failing.iter().map(|p| &p.name).collect::<Vec<_>>()
        );
        // Only the corrupted connection fails.
        assert!(failing
            .iter()
            .all(|p| p.name == "metric-compatibility[svk1]"));
    }

    #[test]
    fn runs_are_deterministic_for_fixed_seed() {
        let a = run(11, 8);
        let b = run(11, 8);
        for (pa, pb) in a.properties.iter().zip(&b.properties) {
            assert_eq!(pa.name, pb.name);
            assert_eq!(pa.worst.to_bits(), pb.worst.to_bits(), "{}", pa.name);
        }
    }
}
