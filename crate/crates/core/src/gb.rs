//! Gauss-Bonnet residuals: limit measures, excision-aware surface
//! integration, and the finite-L classical check.
//!
//! The limit identity pairs the L → ∞ Gauss curvature with the limit area
//! 2-form dσ = p̄ ω₂∧ω₃ − q̄ ω₁∧ω₃ and the signed limit geodesic curvature
//! with the limit length density |ω(γ̇)|; for the two splitting connections
//! the interior and boundary terms cancel. The finite-L check integrates
//! the Gauss-equation curvature against the Riemannian measures and
//! compares against 2πχ; it is asserted only for the Levi-Civita
//! connection and reported as a diagnostic for the torsionful ones.
//!
//! Characteristic points make the limit integrand singular like 1/distance,
//! which is summable: the integrator removes shrinking parameter-space
//! disks around them, evaluates the interior at radii ρ, ρ/2, ρ/4, and
//! Richardson-extrapolates to ρ → 0 (a linear-plus-quadratic model, which
//! also absorbs the O(ρ²) deficit of the smooth finite-L case).

use serde::{Deserialize, Serialize};

use crate::connection::ConnectionKind;
use crate::curve::{CurvePoint, ParamCurve};
use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::heis::{self, MetricParam, Point};
use crate::quad::{integrate_1d, integrate_2d, rect_subtract, QuadResult, QuadTol, Rect};
use crate::surface::{
    gauss_from_jets, gauss_limit_from_jets, surface_jets, Chart, ChartDomain, ImplicitSurface,
};
use crate::surface_curve::{
    geodesic_curvature, signed_limit_length_product, surface_curve_point, Orientation,
};
use crate::tol::Thresholds;

/// How a scene fixes the sign convention of J_L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationSpec {
    /// Decide by running the finite-L classical check at L = 1 with the
    /// Levi-Civita connection and keeping the sign with smaller residual.
    Auto,
    AsAuthored,
    Flipped,
}

/// A surface patch with oriented boundary curves: the unit of Gauss-Bonnet
/// verification.
#[derive(Debug, Clone)]
pub struct Scene {
    pub surface: ImplicitSurface,
    pub boundary: Vec<ParamCurve>,
    pub euler_characteristic: i32,
    pub orientation: OrientationSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCounts {
    pub interior: usize,
    pub boundary: usize,
}

/// Outcome of one Gauss-Bonnet computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GBReport {
    pub kind: ConnectionKind,
    pub orientation: Orientation,
    /// Interior integral; for the limit identity this is the ρ → 0
    /// extrapolation.
    pub interior: f64,
    /// (ρ, interior value) pairs behind the extrapolation; empty when no
    /// excision was needed.
    pub interior_by_radius: Vec<(f64, f64)>,
    /// One line integral per boundary component.
    pub boundary: Vec<f64>,
    /// interior + Σ boundary − target.
    pub residual: f64,
    /// 0 for the limit identity, 2πχ for the finite-L check.
    pub target: f64,
    pub error_estimate: f64,
    /// Fraction of the chart's parameter area removed at the largest
    /// excision radius.
    pub excised_area_fraction: f64,
    pub node_counts: NodeCounts,
    /// Characteristic points, in integration-parameter coordinates.
    pub characteristic_points: Vec<[f64; 2]>,
}

/// Limit length density ds/dt = |ω(γ̇)|.
pub fn limit_length_element(cp: &CurvePoint) -> f64 {
    cp.omega.abs()
}

/// Pull the limit area 2-form back through the chart at (s1, s2): evaluated
/// on the coordinate tangents T1, T2 with ω₁, ω₂ the coordinate 1-forms and
/// ω₃ the contact form.
pub fn limit_area_element(
    u: &Expr,
    chart: &Chart,
    s1: f64,
    s2: f64,
    thr: &Thresholds,
) -> Result<f64> {
    let (x, t1, t2) = chart_tangents_direct(chart, [s1, s2])?;
    let hn = horizontal_normal(u, x, thr)?;
    Ok(limit_density(&hn, x, t1, t2))
}

/// Riemannian area density at finite L: √det of the g_L Gram matrix of the
/// chart tangents.
pub fn riemannian_area_element(
    chart: &Chart,
    metric: MetricParam,
    s1: f64,
    s2: f64,
) -> Result<f64> {
    let (x, t1, t2) = chart_tangents_direct(chart, [s1, s2])?;
    Ok(riemannian_density(x, t1, t2, metric))
}

/// Values of p̄ and q̄ (and the scales behind them) from the first-order jet
/// of u alone; cheaper than the full frame and free of L.
struct HorizontalNormal {
    pbar: f64,
    qbar: f64,
}

fn horizontal_normal(u: &Expr, x: Point, thr: &Thresholds) -> Result<HorizontalNormal> {
    let uj = expr::eval_field_jet(u, x)?;
    let grad_norm = (uj.d[0] * uj.d[0] + uj.d[1] * uj.d[1] + uj.d[2] * uj.d[2]).sqrt();
    if uj.v.abs() > thr.on_surface(grad_norm) {
        return Err(Error::OffSurface {
            point: x.to_array(),
            u_value: uj.v,
        });
    }
    let p = uj.d[0] - 0.5 * x.x2 * uj.d[2];
    let q = uj.d[1] + 0.5 * x.x1 * uj.d[2];
    let l = (p * p + q * q).sqrt();
    if l <= thr.characteristic(grad_norm) {
        return Err(Error::CharacteristicPoint {
            point: x.to_array(),
            l,
        });
    }
    Ok(HorizontalNormal {
        pbar: p / l,
        qbar: q / l,
    })
}

fn limit_density(hn: &HorizontalNormal, x: Point, t1: [f64; 3], t2: [f64; 3]) -> f64 {
    let w3t1 = heis::omega(x, t1);
    let w3t2 = heis::omega(x, t2);
    hn.pbar * (t1[1] * w3t2 - t2[1] * w3t1) - hn.qbar * (t1[0] * w3t2 - t2[0] * w3t1)
}

fn riemannian_density(x: Point, t1: [f64; 3], t2: [f64; 3], metric: MetricParam) -> f64 {
    let f1 = heis::frame_from_coordinate(x, t1);
    let f2 = heis::frame_from_coordinate(x, t2);
    let g11 = f1.dot_l(f1, metric);
    let g12 = f1.dot_l(f2, metric);
    let g22 = f2.dot_l(f2, metric);
    (g11 * g22 - g12 * g12).max(0.0).sqrt()
}

/// Integration coordinates over the chart domain. Disk domains are handled
/// in polar coordinates (v1, v2) = (radius, angle) around the disk center,
/// which turns a characteristic point at the center into a clean interval
/// excision; rectangle domains are used directly.
#[derive(Debug, Clone, Copy)]
enum IntegrationSpace {
    Direct { rect: Rect },
    Polar { center: [f64; 2], radius: f64 },
}

impl IntegrationSpace {
    fn from_domain(domain: &ChartDomain) -> Self {
        match domain {
            ChartDomain::Rect { s1, s2 } => IntegrationSpace::Direct {
                rect: Rect::new(s1.0, s1.1, s2.0, s2.1),
            },
            ChartDomain::Disk { center, radius } => IntegrationSpace::Polar {
                center: *center,
                radius: *radius,
            },
        }
    }

    fn base_rect(&self) -> Rect {
        match self {
            IntegrationSpace::Direct { rect } => *rect,
            IntegrationSpace::Polar { radius, .. } => {
                Rect::new(0.0, *radius, 0.0, std::f64::consts::TAU)
            }
        }
    }

    /// Map integration coordinates to chart parameters.
    fn to_chart_params(&self, v1: f64, v2: f64) -> [f64; 2] {
        match self {
            IntegrationSpace::Direct { .. } => [v1, v2],
            IntegrationSpace::Polar { center, .. } => {
                [center[0] + v1 * v2.cos(), center[1] + v1 * v2.sin()]
            }
        }
    }

    /// Parameter-space area of the author's domain.
    fn param_area(&self) -> f64 {
        match self {
            IntegrationSpace::Direct { rect } => rect.area(),
            IntegrationSpace::Polar { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    fn length_scale(&self) -> f64 {
        match self {
            IntegrationSpace::Direct { rect } => (rect.x1 - rect.x0).min(rect.y1 - rect.y0),
            IntegrationSpace::Polar { radius, .. } => *radius,
        }
    }
}

fn chart_tangents_direct(chart: &Chart, s: [f64; 2]) -> Result<(Point, [f64; 3], [f64; 3])> {
    let mut pos = [0.0; 3];
    let mut t1 = [0.0; 3];
    let mut t2 = [0.0; 3];
    for i in 0..3 {
        let j = expr::eval_chart_jet(&chart.map[i], s)?;
        pos[i] = j.v;
        t1[i] = j.d[0];
        t2[i] = j.d[1];
    }
    Ok((Point::from_array(pos), t1, t2))
}

/// Chart point and tangents with respect to the integration coordinates.
fn chart_tangents(
    chart: &Chart,
    space: &IntegrationSpace,
    v1: f64,
    v2: f64,
) -> Result<(Point, [f64; 3], [f64; 3])> {
    let s = space.to_chart_params(v1, v2);
    let (x, ts1, ts2) = chart_tangents_direct(chart, s)?;
    match space {
        IntegrationSpace::Direct { .. } => Ok((x, ts1, ts2)),
        IntegrationSpace::Polar { .. } => {
            let (sin, cos) = v2.sin_cos();
            let mut tr = [0.0; 3];
            let mut ta = [0.0; 3];
            for i in 0..3 {
                tr[i] = cos * ts1[i] + sin * ts2[i];
                ta[i] = v1 * (-sin * ts1[i] + cos * ts2[i]);
            }
            Ok((x, tr, ta))
        }
    }
}

/// Scan result: characteristic points in integration coordinates, plus a
/// flag for a disk-domain center (which maps to the whole v1 = 0 edge).
#[derive(Debug, Clone, Default)]
struct CharScan {
    center: bool,
    points: Vec<[f64; 2]>,
}

const SCAN_GRID: usize = 64;

/// |∇_H u| at integration coordinates (v1, v2); the scan objective.
fn l_value(u: &Expr, chart: &Chart, space: &IntegrationSpace, v1: f64, v2: f64) -> Result<f64> {
    let s = space.to_chart_params(v1, v2);
    let (x, _, _) = chart_tangents_direct(chart, s)?;
    let uj = expr::eval_field_jet(u, x)?;
    let p = uj.d[0] - 0.5 * x.x2 * uj.d[2];
    let q = uj.d[1] + 0.5 * x.x1 * uj.d[2];
    Ok((p * p + q * q).sqrt())
}

/// Gradient of l²/2 with respect to the integration coordinates, via the
/// chain rule through the chart (exact: uses the Hessian of u and the chart
/// first derivatives).
fn l2_gradient(
    u: &Expr,
    chart: &Chart,
    space: &IntegrationSpace,
    v1: f64,
    v2: f64,
) -> Result<[f64; 2]> {
    let (x, t1, t2) = chart_tangents(chart, space, v1, v2)?;
    let uj = expr::eval_field_jet(u, x)?;
    let h = uj.hess_matrix();
    let u3 = crate::jet::FieldJet {
        v: uj.d[2],
        g: h[2],
    };
    let u1 = crate::jet::FieldJet {
        v: uj.d[0],
        g: h[0],
    };
    let u2 = crate::jet::FieldJet {
        v: uj.d[1],
        g: h[1],
    };
    let x1 = crate::jet::FieldJet {
        v: x.x1,
        g: [1.0, 0.0, 0.0],
    };
    let x2 = crate::jet::FieldJet {
        v: x.x2,
        g: [0.0, 1.0, 0.0],
    };
    let p = u1 - x2 * u3.scale(0.5);
    let q = u2 + x1 * u3.scale(0.5);
    // ∇_x (l²/2) = p ∇p + q ∇q, then project on the tangents.
    let gx = [
        p.v * p.g[0] + q.v * q.g[0],
        p.v * p.g[1] + q.v * q.g[1],
        p.v * p.g[2] + q.v * q.g[2],
    ];
    Ok([
        t1[0] * gx[0] + t1[1] * gx[1] + t1[2] * gx[2],
        t2[0] * gx[0] + t2[1] * gx[1] + t2[2] * gx[2],
    ])
}

fn grad_norm_at(u: &Expr, chart: &Chart, space: &IntegrationSpace, v: [f64; 2]) -> Result<f64> {
    let s = space.to_chart_params(v[0], v[1]);
    let (x, _, _) = chart_tangents_direct(chart, s)?;
    let uj = expr::eval_field_jet(u, x)?;
    Ok((uj.d[0] * uj.d[0] + uj.d[1] * uj.d[1] + uj.d[2] * uj.d[2]).sqrt())
}

/// Locate characteristic points: coarse grid scan for local minima of l,
/// then damped Newton on ∇(l²) = 0 with a finite-difference Jacobian.
fn find_characteristic_points(
    u: &Expr,
    chart: &Chart,
    space: &IntegrationSpace,
) -> Result<CharScan> {
    let mut scan = CharScan::default();
    let accept_l = |l: f64, gn: f64| l <= 1e-6 * (1.0 + gn);

    if let IntegrationSpace::Polar { center, .. } = space {
        let (x, _, _) = chart_tangents_direct(chart, *center)?;
        let uj = expr::eval_field_jet(u, x)?;
        let p = uj.d[0] - 0.5 * x.x2 * uj.d[2];
        let q = uj.d[1] + 0.5 * x.x1 * uj.d[2];
        let gn = (uj.d[0] * uj.d[0] + uj.d[1] * uj.d[1] + uj.d[2] * uj.d[2]).sqrt();
        if accept_l((p * p + q * q).sqrt(), gn) {
            scan.center = true;
        }
    }

    let rect = space.base_rect();
    let n = SCAN_GRID;
    let mut values = vec![0.0f64; n * n];
    let xs: Vec<f64> = (0..n)
        .map(|i| rect.x0 + (i as f64 + 0.5) / n as f64 * (rect.x1 - rect.x0))
        .collect();
    let ys: Vec<f64> = (0..n)
        .map(|j| rect.y0 + (j as f64 + 0.5) / n as f64 * (rect.y1 - rect.y0))
        .collect();
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = l_value(u, chart, space, xs[i], ys[j])?;
        }
    }
    let scale = space.length_scale();
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = values[i * n + j];
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    if values[ii as usize * n + jj as usize] < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                candidates.push([xs[i], ys[j]]);
            }
        }
    }

    for cand in candidates {
        if let Some(p) = polish_characteristic(u, chart, space, cand, scale)? {
            let gn = grad_norm_at(u, chart, space, p)?;
            let l = l_value(u, chart, space, p[0], p[1])?;
            if !accept_l(l, gn) {
                continue;
            }
            // Skip duplicates of the center excision or of other points.
            if scan.center {
                if let IntegrationSpace::Polar { .. } = space {
                    if p[0] < 1e-3 * scale {
                        continue;
                    }
                }
            }
            if scan
                .points
                .iter()
                .all(|q| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt() > 1e-4 * scale)
            {
                scan.points.push(p);
            }
        }
    }
    Ok(scan)
}

fn polish_characteristic(
    u: &Expr,
    chart: &Chart,
    space: &IntegrationSpace,
    start: [f64; 2],
    scale: f64,
) -> Result<Option<[f64; 2]>> {
    let rect = space.base_rect();
    let clamp = |v: [f64; 2]| {
        [
            v[0].clamp(rect.x0, rect.x1),
            v[1].clamp(rect.y0, rect.y1),
        ]
    };
    let mut v = start;
    let mut g = l2_gradient(u, chart, space, v[0], v[1])?;
    let gnorm = |g: [f64; 2]| (g[0] * g[0] + g[1] * g[1]).sqrt();
    let h = 1e-6 * scale;
    for _ in 0..40 {
        if gnorm(g) < 1e-18 {
            break;
        }
        // Finite-difference Jacobian of the gradient.
        let gp1 = l2_gradient(u, chart, space, v[0] + h, v[1])?;
        let gm1 = l2_gradient(u, chart, space, v[0] - h, v[1])?;
        let gp2 = l2_gradient(u, chart, space, v[0], v[1] + h)?;
        let gm2 = l2_gradient(u, chart, space, v[0], v[1] - h)?;
        let j11 = (gp1[0] - gm1[0]) / (2.0 * h);
        let j21 = (gp1[1] - gm1[1]) / (2.0 * h);
        let j12 = (gp2[0] - gm2[0]) / (2.0 * h);
        let j22 = (gp2[1] - gm2[1]) / (2.0 * h);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-30 {
            return Ok(None);
        }
        let step = [
            -(j22 * g[0] - j12 * g[1]) / det,
            -(-j21 * g[0] + j11 * g[1]) / det,
        ];
        // Damping: halve until the gradient norm decreases.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial = clamp([v[0] + lambda * step[0], v[1] + lambda * step[1]]);
            let gt = l2_gradient(u, chart, space, trial[0], trial[1])?;
            if gnorm(gt) < gnorm(g) {
                v = trial;
                g = gt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(Some(v))
}

/// Excision geometry around the characteristic set, fixed once per scene so
/// that only the annulus integrals depend on the excision radius.
#[derive(Debug, Clone)]
struct ExcisionPlan {
    smooth_rects: Vec<Rect>,
    annuli: Vec<Annulus>,
    excised_param_area_at: f64,
}

#[derive(Debug, Clone, Copy)]
enum Annulus {
    /// [ρ, w] × full angle range, for a disk-domain center point.
    CenterStrip { w: f64, theta: (f64, f64) },
    /// Square box of half-width `w` minus the excision disk, both centered
    /// at `center`, integrated in local polar pieces.
    SquareBox { center: [f64; 2], w: f64 },
}

fn build_excision_plan(
    space: &IntegrationSpace,
    scan: &CharScan,
    rho_max: f64,
) -> Result<ExcisionPlan> {
    let base = space.base_rect();
    let mut smooth = vec![base];
    let mut annuli = Vec::new();
    let mut excised_area = 0.0;

    if scan.center {
        let radius = base.x1;
        let w = radius / 4.0;
        if rho_max > w / 2.0 {
            return Err(Error::Scene(format!(
                "excision radius {} too large for disk of radius {}",
                rho_max, radius
            )));
        }
        smooth = vec![Rect::new(w, base.x1, base.y0, base.y1)];
        annuli.push(Annulus::CenterStrip {
            w,
            theta: (base.y0, base.y1),
        });
        excised_area += std::f64::consts::PI * rho_max * rho_max;
    }

    for (idx, &c) in scan.points.iter().enumerate() {
        let mut w = 0.45
            * [
                c[0] - base.x0,
                base.x1 - c[0],
                c[1] - base.y0,
                base.y1 - c[1],
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        for (jdx, &o) in scan.points.iter().enumerate() {
            if idx != jdx {
                let d = ((c[0] - o[0]).powi(2) + (c[1] - o[1]).powi(2)).sqrt();
                w = w.min(0.45 * d / 2.0);
            }
        }
        w = w.min(0.125 * (base.x1 - base.x0).min(base.y1 - base.y0));
        if scan.center {
            // Keep clear of the center strip.
            w = w.min(0.45 * (c[0] - base.x1 / 4.0));
        }
        if !(w > 2.0 * rho_max) {
            return Err(Error::Scene(format!(
                "characteristic point at ({}, {}) sits too close to the domain \
                 boundary or to another characteristic point for excision radius {}",
                c[0], c[1], rho_max
            )));
        }
        let cut = Rect::new(c[0] - w, c[0] + w, c[1] - w, c[1] + w);
        smooth = smooth
            .into_iter()
            .flat_map(|r| rect_subtract(r, cut))
            .collect();
        annuli.push(Annulus::SquareBox { center: c, w });
        excised_area += std::f64::consts::PI * rho_max * rho_max;
    }

    Ok(ExcisionPlan {
        smooth_rects: smooth,
        annuli,
        excised_param_area_at: excised_area,
    })
}

fn integrate_annulus<F: FnMut(f64, f64) -> Result<f64>>(
    f: &mut F,
    annulus: &Annulus,
    rho: f64,
    tol: &QuadTol,
) -> Result<QuadResult> {
    match annulus {
        Annulus::CenterStrip { w, theta } => integrate_2d(
            f,
            Rect::new(rho, *w, theta.0, theta.1),
            tol,
        ),
        Annulus::SquareBox { center, w } => {
            use std::f64::consts::FRAC_PI_2;
            use std::f64::consts::FRAC_PI_4;
            let mut total = QuadResult::ZERO;
            let piece_tol = tol.split(4);
            for k in 0..4 {
                let theta_c = k as f64 * FRAC_PI_2;
                let (t0, t1) = (theta_c - FRAC_PI_4, theta_c + FRAC_PI_4);
                let mut g = |theta: f64, sigma: f64| -> Result<f64> {
                    let r_out = w / (theta - theta_c).cos();
                    let r = rho + sigma * (r_out - rho);
                    let (sin, cos) = theta.sin_cos();
                    let v = [center[0] + r * cos, center[1] + r * sin];
                    Ok(f(v[0], v[1])? * r * (r_out - rho))
                };
                total.accumulate(integrate_2d(&mut g, Rect::new(t0, t1, 0.0, 1.0), &piece_tol)?);
            }
            Ok(total)
        }
    }
}

/// Interior integral with excision and Richardson extrapolation in the
/// excision radius. With no characteristic points this is a plain adaptive
/// integral.
struct InteriorResult {
    extrapolated: f64,
    by_radius: Vec<(f64, f64)>,
    error: f64,
    evaluations: usize,
    excised_fraction: f64,
}

fn integrate_interior<F: FnMut(f64, f64) -> Result<f64>>(
    f: &mut F,
    space: &IntegrationSpace,
    scan: &CharScan,
    rho: f64,
    tol: &QuadTol,
) -> Result<InteriorResult> {
    let plan = build_excision_plan(space, scan, rho)?;
    let pieces = plan.smooth_rects.len() + 3 * plan.annuli.len().max(1);
    let piece_tol = tol.split(pieces);

    let mut smooth = QuadResult::ZERO;
    for r in &plan.smooth_rects {
        smooth.accumulate(integrate_2d(f, *r, &piece_tol)?);
    }

    if plan.annuli.is_empty() {
        return Ok(InteriorResult {
            extrapolated: smooth.value,
            by_radius: Vec::new(),
            error: smooth.error,
            evaluations: smooth.evaluations,
            excised_fraction: 0.0,
        });
    }

    let radii = [rho, rho / 2.0, rho / 4.0];
    let mut by_radius = Vec::new();
    let mut quad_err = smooth.error;
    let mut evals = smooth.evaluations;
    for &r in &radii {
        let mut ring = QuadResult::ZERO;
        for a in &plan.annuli {
            ring.accumulate(integrate_annulus(f, a, r, &piece_tol)?);
        }
        by_radius.push((r, smooth.value + ring.value));
        quad_err = quad_err.max(smooth.error + ring.error);
        evals += ring.evaluations;
    }

    let (i0, i1, i2) = (by_radius[0].1, by_radius[1].1, by_radius[2].1);
    // Divergence diagnostic: a summable deficit shrinks roughly linearly
    // under radius halving; log or power divergence does not.
    let d1 = i1 - i0;
    let d2 = i2 - i1;
    let noise = 10.0 * (quad_err + 1e-15 * (1.0 + i0.abs()));
    if d2.abs() > 0.9 * d1.abs() + noise && d2.abs() > 10.0 * noise {
        return Err(Error::NonIntegrableSingularity {
            details: format!(
                "interior values {:.6e}, {:.6e}, {:.6e} at radii {:.2e}, {:.2e}, {:.2e}",
                i0, i1, i2, radii[0], radii[1], radii[2]
            ),
        });
    }
    // Neville extrapolation through a + bρ + cρ² to ρ = 0.
    let t11 = 2.0 * i1 - i0;
    let t12 = 2.0 * i2 - i1;
    let extrapolated = (4.0 * t12 - t11) / 3.0;
    let error = quad_err + (extrapolated - t12).abs().max(f64::EPSILON * extrapolated.abs());

    Ok(InteriorResult {
        extrapolated,
        by_radius,
        error,
        evaluations: evals,
        excised_fraction: plan.excised_param_area_at / space.param_area(),
    })
}

fn require_chart(scene: &Scene) -> Result<&Chart> {
    scene
        .surface
        .chart
        .as_ref()
        .ok_or_else(|| Error::Scene("scene surface has no chart; integration needs one".into()))
}

/// Validate scene plumbing: chart maps onto the zero set and boundary
/// curves lie on the surface (sampled at 64 nodes each, with tangency).
pub fn validate_scene(scene: &Scene, thr: &Thresholds) -> Result<()> {
    let chart = require_chart(scene)?;
    let space = IntegrationSpace::from_domain(&chart.domain);
    let rect = space.base_rect();
    let metric = MetricParam::new(1.0).expect("valid");
    for i in 0..16 {
        for j in 0..16 {
            let v1 = rect.x0 + (i as f64 + 0.5) / 16.0 * (rect.x1 - rect.x0);
            let v2 = rect.y0 + (j as f64 + 0.5) / 16.0 * (rect.y1 - rect.y0);
            let s = space.to_chart_params(v1, v2);
            let (x, _, _) = chart_tangents_direct(chart, s)?;
            let uj = expr::eval_field_jet(&scene.surface.u, x)?;
            let gn = (uj.d[0] * uj.d[0] + uj.d[1] * uj.d[1] + uj.d[2] * uj.d[2]).sqrt();
            if uj.v.abs() > thr.on_surface(gn) {
                return Err(Error::Scene(format!(
                    "chart point ({:.4}, {:.4}) is off the surface: u = {:.3e}",
                    s[0], s[1], uj.v
                )));
            }
        }
    }
    for (idx, curve) in scene.boundary.iter().enumerate() {
        let (a, b) = curve.interval;
        for k in 0..64 {
            let t = a + (k as f64 + 0.5) / 64.0 * (b - a);
            surface_curve_point(curve, &scene.surface.u, metric, t, thr).map_err(|e| {
                Error::Scene(format!("boundary component {} invalid at t = {}: {}", idx + 1, t, e))
            })?;
        }
    }
    if scene.euler_characteristic.abs() > 100 {
        return Err(Error::Scene(format!(
            "implausible Euler characteristic {}",
            scene.euler_characteristic
        )));
    }
    Ok(())
}

/// Decide the J_L sign by the classical check: at L = 1 with the
/// Levi-Civita connection, keep the orientation whose residual against 2πχ
/// is smaller. Errors when both residuals exceed 0.1.
pub fn orientation_autodetect(scene: &Scene, thr: &Thresholds) -> Result<Orientation> {
    let tol = QuadTol {
        abs_tol: 1e-6,
        rel_tol: 1e-6,
        ..QuadTol::default()
    };
    let metric = MetricParam::new(1.0).expect("valid");
    let (interior, _, _, _, _) = classical_interior(scene, ConnectionKind::LeviCivita, metric, &tol, thr)?;
    let boundary = classical_boundary(
        scene,
        ConnectionKind::LeviCivita,
        metric,
        Orientation::AsAuthored,
        &tol,
        thr,
    )?;
    let b_total: f64 = boundary.iter().map(|q| q.value).sum();
    let target = 2.0 * std::f64::consts::PI * scene.euler_characteristic as f64;
    let r_as = interior + b_total - target;
    let r_flip = interior - b_total - target;
    if r_as.abs() <= r_flip.abs() {
        if r_as.abs() > 0.1 {
            return Err(Error::OrientationAmbiguous {
                as_authored: r_as,
                flipped: r_flip,
            });
        }
        Ok(Orientation::AsAuthored)
    } else {
        if r_flip.abs() > 0.1 {
            return Err(Error::OrientationAmbiguous {
                as_authored: r_as,
                flipped: r_flip,
            });
        }
        Ok(Orientation::Flipped)
    }
}

fn resolve_orientation(scene: &Scene, thr: &Thresholds) -> Result<Orientation> {
    match scene.orientation {
        OrientationSpec::AsAuthored => Ok(Orientation::AsAuthored),
        OrientationSpec::Flipped => Ok(Orientation::Flipped),
        OrientationSpec::Auto => orientation_autodetect(scene, thr),
    }
}

fn classical_interior(
    scene: &Scene,
    kind: ConnectionKind,
    metric: MetricParam,
    tol: &QuadTol,
    thr: &Thresholds,
) -> Result<(f64, Vec<(f64, f64)>, f64, usize, (f64, Vec<[f64; 2]>))> {
    let chart = require_chart(scene)?;
    let space = IntegrationSpace::from_domain(&chart.domain);
    let scan = find_characteristic_points(&scene.surface.u, chart, &space)?;
    let rho = 1e-3 * space.length_scale();
    let u = &scene.surface.u;
    let mut f = |v1: f64, v2: f64| -> Result<f64> {
        let (x, t1, t2) = chart_tangents(chart, &space, v1, v2)?;
        let sj = surface_jets(u, x, metric, thr)?;
        let rep = gauss_from_jets(kind, &sj);
        Ok(rep.k_surface * riemannian_density(x, t1, t2, metric))
    };
    let res = integrate_interior(&mut f, &space, &scan, rho, tol)?;
    let mut char_pts = scan.points.clone();
    if scan.center {
        char_pts.insert(0, [0.0, 0.0]);
    }
    Ok((
        res.extrapolated,
        res.by_radius,
        res.error,
        res.evaluations,
        (res.excised_fraction, char_pts),
    ))
}

fn classical_boundary(
    scene: &Scene,
    kind: ConnectionKind,
    metric: MetricParam,
    orientation: Orientation,
    tol: &QuadTol,
    thr: &Thresholds,
) -> Result<Vec<QuadResult>> {
    let n = scene.boundary.len().max(1);
    let per_tol = tol.split(n);
    scene
        .boundary
        .iter()
        .map(|curve| {
            let mut f = |t: f64| -> Result<f64> {
                let scp = surface_curve_point(curve, &scene.surface.u, metric, t, thr)?;
                let k = geodesic_curvature(kind, metric, &scp, true, orientation, thr)?;
                Ok(k * scp.cp.velocity_frame().norm_l(metric))
            };
            integrate_1d(&mut f, curve.interval.0, curve.interval.1, &per_tol)
        })
        .collect()
}

/// The limit Gauss-Bonnet residual: interior term ∫ K^∞ dσ plus the signed
/// boundary terms, extrapolated to zero excision radius. The residual of
/// the identity is interior + Σ boundary.
pub fn gb_residual_limit(
    kind: ConnectionKind,
    scene: &Scene,
    rho_excise: f64,
    tol: &QuadTol,
    thr: &Thresholds,
) -> Result<GBReport> {
    validate_scene(scene, thr)?;
    let orientation = resolve_orientation(scene, thr)?;
    let chart = require_chart(scene)?;
    let space = IntegrationSpace::from_domain(&chart.domain);
    let scan = find_characteristic_points(&scene.surface.u, chart, &space)?;
    let u = &scene.surface.u;
    let metric = MetricParam::new(1.0).expect("valid");

    let mut f = |v1: f64, v2: f64| -> Result<f64> {
        let (x, t1, t2) = chart_tangents(chart, &space, v1, v2)?;
        let sj = surface_jets(u, x, metric, thr)?;
        let k = gauss_limit_from_jets(kind, &sj)?;
        let hn = HorizontalNormal {
            pbar: sj.frame().pbar,
            qbar: sj.frame().qbar,
        };
        Ok(k * limit_density(&hn, x, t1, t2))
    };
    let interior = integrate_interior(&mut f, &space, &scan, rho_excise, tol)?;

    let per_tol = tol.split(scene.boundary.len().max(1));
    let mut boundary = Vec::new();
    let mut boundary_nodes = 0usize;
    let mut boundary_err = 0.0;
    for curve in &scene.boundary {
        let mut g = |t: f64| -> Result<f64> {
            let scp = surface_curve_point(curve, u, metric, t, thr)?;
            signed_limit_length_product(kind, &scp, orientation)
        };
        let r = integrate_1d(&mut g, curve.interval.0, curve.interval.1, &per_tol)?;
        boundary.push(r.value);
        boundary_nodes += r.evaluations;
        boundary_err += r.error;
    }

    let b_total: f64 = boundary.iter().sum();
    let residual = interior.extrapolated + b_total;
    let mut char_pts = scan.points.clone();
    if scan.center {
        char_pts.insert(0, [0.0, 0.0]);
    }
    Ok(GBReport {
        kind,
        orientation,
        interior: interior.extrapolated,
        interior_by_radius: interior.by_radius,
        boundary,
        residual,
        target: 0.0,
        error_estimate: interior.error + boundary_err,
        excised_area_fraction: interior.excised_fraction,
        node_counts: NodeCounts {
            interior: interior.evaluations,
            boundary: boundary_nodes,
        },
        characteristic_points: char_pts,
    })
}

/// The classical finite-L check: ∫ K^{Σ,kind}_L dσ_L + Σ ∮ k^{L,kind,s} ds_L
/// against 2πχ. Asserted in tests only for the Levi-Civita connection; for
/// the torsionful kinds the report is a diagnostic.
pub fn gb_check_finite_l(
    kind: ConnectionKind,
    metric: MetricParam,
    scene: &Scene,
    tol: &QuadTol,
    thr: &Thresholds,
) -> Result<GBReport> {
    validate_scene(scene, thr)?;
    let orientation = resolve_orientation(scene, thr)?;
    let (interior, by_radius, int_err, int_nodes, (excised, char_pts)) =
        classical_interior(scene, kind, metric, tol, thr)?;
    let boundary_q = classical_boundary(scene, kind, metric, orientation, tol, thr)?;
    let boundary: Vec<f64> = boundary_q.iter().map(|q| q.value).collect();
    let boundary_err: f64 = boundary_q.iter().map(|q| q.error).sum();
    let boundary_nodes: usize = boundary_q.iter().map(|q| q.evaluations).sum();
    let target = 2.0 * std::f64::consts::PI * scene.euler_characteristic as f64;
    let b_total: f64 = boundary.iter().sum();
    Ok(GBReport {
        kind,
        orientation,
        interior,
        interior_by_radius: by_radius,
        boundary,
        residual: interior + b_total - target,
        target,
        error_estimate: int_err + boundary_err,
        excised_area_fraction: excised,
        node_counts: NodeCounts {
            interior: int_nodes,
            boundary: boundary_nodes,
        },
        characteristic_points: char_pts,
    })
}
