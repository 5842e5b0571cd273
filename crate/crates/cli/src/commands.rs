//! The five subcommands: argument handling, evaluation and report assembly.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;

use heisgb_core::connection::ConnectionKind;
use heisgb_core::curve::{curve_curvature, curve_curvature_limit, ParamCurve};
use heisgb_core::expr;
use heisgb_core::gb::{
    gb_check_finite_l, gb_residual_limit, orientation_autodetect, GBReport, OrientationSpec,
    Scene,
};
use heisgb_core::scene::{parse_scene_str, SceneOptions};
use heisgb_core::surface::{
    gauss_curvature, gauss_curvature_limit, mean_curvature, mean_curvature_limit,
    second_fundamental_form, ChartDomain, ImplicitSurface,
};
use heisgb_core::surface_curve::{
    geodesic_curvature, geodesic_curvature_limit, surface_curve_point, Orientation,
};
use heisgb_core::tol::Thresholds;
use heisgb_core::verify;
use heisgb_core::{MetricParam, Point};

use crate::output::{csv_line, emit, fnum, render_table, Render};
use crate::Format;

const SCHEMA_VERSION: u32 = 1;

fn parse_kind(s: &str) -> Result<ConnectionKind> {
    ConnectionKind::from_name(s).with_context(|| {
        format!(
            "unknown connection `{}`; expected levi-civita, svk1, svk2 or adapted",
            s
        )
    })
}

/// A `t` grid: either a single number or `start:end:count`.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single
            .parse()
            .with_context(|| format!("bad number `{}`", single))?]),
        [a, b, n] => {
            let a: f64 = a.parse().with_context(|| format!("bad number `{}`", a))?;
            let b: f64 = b.parse().with_context(|| format!("bad number `{}`", b))?;
            let n: usize = n.parse().with_context(|| format!("bad count `{}`", n))?;
            if n == 0 {
                bail!("grid count must be positive");
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect())
        }
        _ => bail!("grid `{}` must be a number or start:end:count", spec),
    }
}

/// Split an inline component triple on top-level commas.
fn split_components(s: &str) -> Result<[String; 3]> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    parts.push(cur.trim().to_string());
    if parts.len() != 3 {
        bail!(
            "expected three comma-separated components, found {}",
            parts.len()
        );
    }
    Ok([parts[0].clone(), parts[1].clone(), parts[2].clone()])
}

fn parse_point(s: &str) -> Result<Point> {
    let comps = split_components(s)?;
    let mut vals = [0.0; 3];
    for (i, c) in comps.iter().enumerate() {
        vals[i] = c
            .parse()
            .with_context(|| format!("bad coordinate `{}`", c))?;
    }
    Ok(Point::from_array(vals))
}

fn load_scene(path: &PathBuf) -> Result<(Scene, SceneOptions)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read scene file {}", path.display()))?;
    Ok(parse_scene_str(&text)?)
}

/// Orientation for signed quantities outside the Gauss-Bonnet commands:
/// `auto` falls back to as-authored (autodetection is a Gauss-Bonnet
/// concern).
fn plain_orientation(spec: OrientationSpec) -> Orientation {
    match spec {
        OrientationSpec::Flipped => Orientation::Flipped,
        _ => Orientation::AsAuthored,
    }
}

// ---------------------------------------------------------------------------
// curve
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct CurveArgs {
    /// Connection: levi-civita | svk1 | svk2 | adapted.
    #[arg(long)]
    kind: String,
    /// Inline components, e.g. "cos(t),sin(t),0".
    #[arg(long)]
    gamma: Option<String>,
    /// File with the three components on three lines (# comments allowed).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Evaluate the L → ∞ limit instead of a finite L.
    #[arg(long, conflicts_with = "l")]
    limit: bool,
    /// Metric parameter L > 0.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Parameter grid: a single value or start:end:count.
    #[arg(long)]
    t: String,
}

#[derive(Serialize)]
struct CurveRow {
    t: f64,
    omega: f64,
    omega_dot: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    branch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    marginal: Option<bool>,
    value: f64,
}

#[derive(Serialize)]
struct CurveReport {
    schema_version: u32,
    command: &'static str,
    kind: String,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<f64>,
    gamma: [String; 3],
    rows: Vec<CurveRow>,
}

impl Render for CurveReport {
    fn csv(&self) -> String {
        let mut out = String::from("t,omega,omega_dot,branch,marginal,value\n");
        for r in &self.rows {
            out.push_str(&csv_line(&[
                fnum(r.t),
                fnum(r.omega),
                fnum(r.omega_dot),
                r.branch.clone().unwrap_or_default(),
                r.marginal.map(|m| m.to_string()).unwrap_or_default(),
                fnum(r.value),
            ]));
            out.push('\n');
        }
        out
    }

    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    format!("{:.6}", r.t),
                    fnum(r.omega),
                    fnum(r.omega_dot),
                    r.branch.clone().unwrap_or_else(|| "-".into()),
                    r.marginal
                        .map(|m| m.to_string())
                        .unwrap_or_else(|| "-".into()),
                    fnum(r.value),
                ]
            })
            .collect();
        render_table(
            &["t", "omega", "omega_dot", "branch", "marginal", "value"],
            &rows,
        )
    }
}

pub fn run_curve(args: CurveArgs, format: Format) -> Result<ExitCode> {
    let kind = parse_kind(&args.kind)?;
    let thr = Thresholds::default();
    let comps = match (&args.gamma, &args.file) {
        (Some(inline), None) => split_components(inline)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read curve file {}", path.display()))?;
            let lines: Vec<String> = text
                .lines()
                .map(|l| l.trim())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.to_string())
                .collect();
            if lines.len() == 1 {
                split_components(&lines[0])?
            } else if lines.len() == 3 {
                [lines[0].clone(), lines[1].clone(), lines[2].clone()]
            } else {
                bail!(
                    "curve file must hold one inline triple or three component lines, found {}",
                    lines.len()
                );
            }
        }
        _ => bail!("exactly one of --gamma or --file is required"),
    };
    let ts = parse_grid(&args.t)?;
    let (t0, t1) = (
        ts.iter().cloned().fold(f64::INFINITY, f64::min),
        ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let curve = ParamCurve::parse(&comps[0], &comps[1], &comps[2], (t0, t1))?;

    let (mode, metric) = if args.limit {
        ("limit", None)
    } else {
        let l = args.l.context("either --limit or --L is required")?;
        ("finite-l", Some(MetricParam::new(l)?))
    };

    let mut rows = Vec::new();
    for &t in &ts {
        let cp = curve.at(t, &thr)?;
        let row = match metric {
            Some(m) => CurveRow {
                t,
                omega: cp.omega,
                omega_dot: cp.omega_dot,
                branch: None,
                marginal: None,
                value: curve_curvature(kind, m, &cp, &thr)?,
            },
            None => {
                let lim = curve_curvature_limit(kind, &cp, &thr)?;
                CurveRow {
                    t,
                    omega: cp.omega,
                    omega_dot: cp.omega_dot,
                    branch: Some(lim.branch.to_string()),
                    marginal: Some(lim.marginal),
                    value: lim.value,
                }
            }
        };
        rows.push(row);
    }

    emit(
        &CurveReport {
            schema_version: SCHEMA_VERSION,
            command: "curve",
            kind: kind.name().into(),
            mode,
            l: metric.map(|m| m.l()),
            gamma: comps,
            rows,
        },
        format,
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// surface
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct SurfaceArgs {
    /// Connection: levi-civita | svk1 | svk2 | adapted.
    #[arg(long)]
    kind: String,
    /// Scene file with the surface (and chart, for --grid).
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Inline defining function, e.g. "x3 - (x1^2+x2^2)/2".
    #[arg(long)]
    u: Option<String>,
    /// Evaluate the L → ∞ limit instead of a finite L.
    #[arg(long, conflicts_with = "l")]
    limit: bool,
    /// Metric parameter L > 0.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Evaluation point "x1,x2,x3"; repeatable.
    #[arg(long = "point")]
    points: Vec<String>,
    /// Sample an N×N grid over the scene chart (rows that hit the
    /// characteristic set carry an error field instead of values).
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Serialize)]
struct SurfaceRow {
    point: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    ii: Option<[[f64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_ambient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_surface: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct SurfaceReport {
    schema_version: u32,
    command: &'static str,
    kind: String,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<f64>,
    u: String,
    rows: Vec<SurfaceRow>,
}

impl Render for SurfaceReport {
    fn csv(&self) -> String {
        let mut out = String::from(
            "x1,x2,x3,h11,h12,h21,h22,mean,k_ambient,k_surface,mean_limit,k_limit,error\n",
        );
        for r in &self.rows {
            let ii = r.ii.unwrap_or([[f64::NAN; 2]; 2]);
            let opt = |v: Option<f64>| v.map(fnum).unwrap_or_default();
            out.push_str(&csv_line(&[
                fnum(r.point[0]),
                fnum(r.point[1]),
                fnum(r.point[2]),
                if r.ii.is_some() { fnum(ii[0][0]) } else { String::new() },
                if r.ii.is_some() { fnum(ii[0][1]) } else { String::new() },
                if r.ii.is_some() { fnum(ii[1][0]) } else { String::new() },
                if r.ii.is_some() { fnum(ii[1][1]) } else { String::new() },
                opt(r.mean),
                opt(r.k_ambient),
                opt(r.k_surface),
                opt(r.mean_limit),
                opt(r.k_limit),
                r.error.clone().unwrap_or_default(),
            ]));
            out.push('\n');
        }
        out
    }

    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let fmt_opt = |v: Option<f64>| v.map(fnum).unwrap_or_else(|| "-".into());
                vec![
                    format!("({:.4}, {:.4}, {:.4})", r.point[0], r.point[1], r.point[2]),
                    fmt_opt(r.mean),
                    fmt_opt(r.k_ambient),
                    fmt_opt(r.k_surface),
                    fmt_opt(r.mean_limit),
                    fmt_opt(r.k_limit),
                    r.error.clone().unwrap_or_else(|| "-".into()),
                ]
            })
            .collect();
        render_table(
            &[
                "point",
                "mean",
                "k_ambient",
                "k_surface",
                "mean_limit",
                "k_limit",
                "error",
            ],
            &rows,
        )
    }
}

pub fn run_surface(args: SurfaceArgs, format: Format) -> Result<ExitCode> {
    let kind = parse_kind(&args.kind)?;
    let thr = Thresholds::default();
    let (surface, scene) = match (&args.scene, &args.u) {
        (Some(path), None) => {
            let (scene, _) = load_scene(path)?;
            (scene.surface.clone(), Some(scene))
        }
        (None, Some(u)) => (ImplicitSurface::parse(u)?, None),
        _ => bail!("exactly one of --scene or --u is required"),
    };

    let mut points: Vec<(Point, bool)> = Vec::new();
    for p in &args.points {
        points.push((parse_point(p)?, true));
    }
    if let Some(n) = args.grid {
        let scene = scene
            .as_ref()
            .context("--grid needs --scene (the chart defines the grid)")?;
        let chart = scene
            .surface
            .chart
            .as_ref()
            .context("--grid needs a scene with a chart")?;
        for i in 0..n {
            for j in 0..n {
                let (f1, f2) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                let s = match chart.domain {
                    ChartDomain::Rect { s1, s2 } => {
                        [s1.0 + f1 * (s1.1 - s1.0), s2.0 + f2 * (s2.1 - s2.0)]
                    }
                    ChartDomain::Disk { center, radius } => {
                        let rho = radius * f1;
                        let th = std::f64::consts::TAU * f2;
                        [center[0] + rho * th.cos(), center[1] + rho * th.sin()]
                    }
                };
                let x = [
                    expr::eval_chart_jet(&chart.map[0], s)?.v,
                    expr::eval_chart_jet(&chart.map[1], s)?.v,
                    expr::eval_chart_jet(&chart.map[2], s)?.v,
                ];
                points.push((Point::from_array(x), false));
            }
        }
    }
    if points.is_empty() {
        bail!("no evaluation points: pass --point or --grid");
    }

    let (mode, metric) = if args.limit {
        ("limit", None)
    } else {
        let l = args.l.context("either --limit or --L is required")?;
        ("finite-l", Some(MetricParam::new(l)?))
    };

    let mut rows = Vec::new();
    for (pt, explicit) in points {
        let result: Result<SurfaceRow, heisgb_core::Error> = (|| {
            Ok(match metric {
                Some(m) => {
                    let rep = gauss_curvature(kind, m, &surface.u, pt, &thr)?;
                    let ii = second_fundamental_form(kind, m, &surface.u, pt, &thr)?;
                    let mean = mean_curvature(kind, m, &surface.u, pt, &thr)?;
                    SurfaceRow {
                        point: pt.to_array(),
                        ii: Some(ii),
                        mean: Some(mean),
                        k_ambient: Some(rep.k_ambient),
                        k_surface: Some(rep.k_surface),
                        mean_limit: None,
                        k_limit: None,
                        error: None,
                    }
                }
                None => {
                    let mean_lim = mean_curvature_limit(&surface.u, pt, &thr)?;
                    let k_lim = match kind {
                        ConnectionKind::LeviCivita => None,
                        _ => Some(gauss_curvature_limit(kind, &surface.u, pt, &thr)?),
                    };
                    SurfaceRow {
                        point: pt.to_array(),
                        ii: None,
                        mean: None,
                        k_ambient: None,
                        k_surface: None,
                        mean_limit: Some(mean_lim),
                        k_limit: k_lim,
                        error: None,
                    }
                }
            })
        })();
        match result {
            Ok(row) => rows.push(row),
            Err(e) if explicit => return Err(e.into()),
            Err(e) => rows.push(SurfaceRow {
                point: pt.to_array(),
                ii: None,
                mean: None,
                k_ambient: None,
                k_surface: None,
                mean_limit: None,
                k_limit: None,
                error: Some(e.to_string()),
            }),
        }
    }

    emit(
        &SurfaceReport {
            schema_version: SCHEMA_VERSION,
            command: "surface",
            kind: kind.name().into(),
            mode,
            l: metric.map(|m| m.l()),
            u: surface.u.to_string(),
            rows,
        },
        format,
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// gauss-bonnet
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct GaussBonnetArgs {
    /// Connection: svk1 | svk2 | adapted (limit mode) or any (finite-l).
    #[arg(long)]
    kind: String,
    #[arg(long)]
    scene: PathBuf,
    /// limit (the L → ∞ identity) or finite-l (classical check vs 2πχ).
    #[arg(long)]
    mode: String,
    /// Metric parameter for finite-l mode.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Excision radius around characteristic points (limit mode).
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Serialize)]
struct GaussBonnetReport {
    schema_version: u32,
    command: &'static str,
    mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<f64>,
    scene: String,
    euler_characteristic: i32,
    #[serde(flatten)]
    report: GBReport,
}

impl Render for GaussBonnetReport {
    fn csv(&self) -> String {
        let mut out = String::from("field,value\n");
        let mut push = |k: &str, v: String| {
            out.push_str(&csv_line(&[k.to_string(), v]));
            out.push('\n');
        };
        push("mode", self.mode.clone());
        if let Some(l) = self.l {
            push("l", fnum(l));
        }
        push("kind", self.report.kind.name().to_string());
        push("orientation", format!("{:?}", self.report.orientation));
        push("interior", fnum(self.report.interior));
        for (i, b) in self.report.boundary.iter().enumerate() {
            push(&format!("boundary.{}", i + 1), fnum(*b));
        }
        push("target", fnum(self.report.target));
        push("residual", fnum(self.report.residual));
        push("error_estimate", fnum(self.report.error_estimate));
        for (rho, v) in &self.report.interior_by_radius {
            push(&format!("interior_at_rho_{:e}", rho), fnum(*v));
        }
        push(
            "excised_area_fraction",
            fnum(self.report.excised_area_fraction),
        );
        push(
            "interior_nodes",
            self.report.node_counts.interior.to_string(),
        );
        push(
            "boundary_nodes",
            self.report.node_counts.boundary.to_string(),
        );
        out
    }

    fn table(&self) -> String {
        let mut rows = vec![
            vec!["mode".into(), self.mode.clone()],
            vec!["kind".into(), self.report.kind.name().to_string()],
            vec![
                "orientation".into(),
                format!("{:?}", self.report.orientation),
            ],
            vec!["interior".into(), fnum(self.report.interior)],
        ];
        for (i, b) in self.report.boundary.iter().enumerate() {
            rows.push(vec![format!("boundary.{}", i + 1), fnum(*b)]);
        }
        rows.push(vec!["target".into(), fnum(self.report.target)]);
        rows.push(vec!["residual".into(), fnum(self.report.residual)]);
        rows.push(vec![
            "error_estimate".into(),
            fnum(self.report.error_estimate),
        ]);
        for (rho, v) in &self.report.interior_by_radius {
            rows.push(vec![format!("interior(rho = {:.2e})", rho), fnum(*v)]);
        }
        render_table(&["field", "value"], &rows)
    }
}

pub fn run_gauss_bonnet(args: GaussBonnetArgs, format: Format) -> Result<ExitCode> {
    let kind = parse_kind(&args.kind)?;
    let thr = Thresholds::default();
    let (scene, options) = load_scene(&args.scene)?;
    let rho = args.rho.unwrap_or(options.excision_radius);
    let report = match args.mode.as_str() {
        "limit" => gb_residual_limit(kind, &scene, rho, &options.quad_tol, &thr)?,
        "finite-l" | "finite-L" => {
            let l = args
                .l
                .or_else(|| options.l_values.first().copied())
                .context("--mode finite-l needs --L (or l_values in the scene)")?;
            gb_check_finite_l(kind, MetricParam::new(l)?, &scene, &options.quad_tol, &thr)?
        }
        other => bail!("mode `{}` must be limit or finite-l", other),
    };
    emit(
        &GaussBonnetReport {
            schema_version: SCHEMA_VERSION,
            command: "gauss-bonnet",
            mode: args.mode,
            l: args.l,
            scene: args.scene.display().to_string(),
            euler_characteristic: scene.euler_characteristic,
            report,
        },
        format,
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Serialize)]
struct VerifyCliReport {
    schema_version: u32,
    command: &'static str,
    #[serde(flatten)]
    report: verify::VerifyReport,
}

impl Render for VerifyCliReport {
    fn csv(&self) -> String {
        let mut out = String::from("property,samples,worst,tolerance,passed\n");
        for p in &self.report.properties {
            out.push_str(&csv_line(&[
                p.name.clone(),
                p.samples.to_string(),
                fnum(p.worst),
                fnum(p.tolerance),
                p.passed.to_string(),
            ]));
            out.push('\n');
        }
        out
    }

    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .report
            .properties
            .iter()
            .map(|p| {
                vec![
                    p.name.clone(),
                    p.samples.to_string(),
                    format!("{:.3e}", p.worst),
                    format!("{:.0e}", p.tolerance),
                    if p.passed { "pass".into() } else { "FAIL".into() },
                ]
            })
            .collect();
        render_table(&["property", "samples", "worst", "tolerance", "status"], &rows)
    }
}

pub fn run_verify(args: VerifyArgs, format: Format) -> Result<ExitCode> {
    let report = verify::run(args.seed, args.samples);
    let all_passed = report.all_passed;
    emit(
        &VerifyCliReport {
            schema_version: SCHEMA_VERSION,
            command: "verify",
            report,
        },
        format,
    );
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}

// ---------------------------------------------------------------------------
// limit-scan
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct LimitScanArgs {
    /// curve-curvature | geodesic-curvature | mean-curvature | gauss-curvature.
    #[arg(long)]
    quantity: String,
    /// Connection: levi-civita | svk1 | svk2 | adapted.
    #[arg(long)]
    kind: String,
    /// Inline curve components (curve quantities).
    #[arg(long)]
    gamma: Option<String>,
    /// Scene file (surface and geodesic quantities).
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Inline defining function (surface quantities).
    #[arg(long)]
    u: Option<String>,
    /// Boundary component index within the scene, 1-based.
    #[arg(long, default_value_t = 1)]
    boundary_index: usize,
    /// Curve parameter.
    #[arg(long)]
    t: Option<f64>,
    /// Evaluation point "x1,x2,x3" (surface quantities).
    #[arg(long)]
    point: Option<String>,
    /// Log-spaced metric grid start:end:count.
    #[arg(long, default_value = "1e2:1e8:13")]
    l_grid: String,
}

#[derive(Serialize)]
struct ScanRow {
    l: f64,
    value: f64,
}

#[derive(Serialize)]
struct ScanReport {
    schema_version: u32,
    command: &'static str,
    quantity: String,
    kind: String,
    rows: Vec<ScanRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    branch: Option<String>,
    /// True when rows were divided by √L before fitting (divergent branch).
    scaled_by_sqrt_l: bool,
    /// Fitted α in |value − limit| ≈ c·L^(−α).
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
}

impl Render for ScanReport {
    fn csv(&self) -> String {
        let mut out = String::from("l,value\n");
        for r in &self.rows {
            out.push_str(&csv_line(&[fnum(r.l), fnum(r.value)]));
            out.push('\n');
        }
        out
    }

    fn table(&self) -> String {
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![format!("{:.3e}", r.l), fnum(r.value)])
            .collect();
        if let Some(lim) = self.limit_value {
            rows.push(vec!["limit".into(), fnum(lim)]);
        }
        if let Some(alpha) = self.exponent {
            rows.push(vec!["exponent".into(), format!("{:.4}", alpha)]);
        }
        render_table(&["L", "value"], &rows)
    }
}

fn parse_l_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("--l-grid `{}` must be start:end:count", spec);
    };
    let a: f64 = a.parse().with_context(|| format!("bad number `{}`", a))?;
    let b: f64 = b.parse().with_context(|| format!("bad number `{}`", b))?;
    let n: usize = n.parse().with_context(|| format!("bad count `{}`", n))?;
    if !(a > 0.0 && b > a && n >= 2) {
        bail!("--l-grid needs 0 < start < end and count ≥ 2");
    }
    Ok((0..n)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

fn fit_exponent(ls: &[f64], devs: &[f64]) -> Option<f64> {
    if devs.iter().any(|&d| !(d > 1e-14)) {
        return None;
    }
    let n = ls.len() as f64;
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

pub fn run_limit_scan(args: LimitScanArgs, format: Format) -> Result<ExitCode> {
    let kind = parse_kind(&args.kind)?;
    let thr = Thresholds::default();
    let ls = parse_l_grid(&args.l_grid)?;

    let mut rows = Vec::new();
    let mut limit_value = None;
    let mut branch: Option<String> = None;
    let mut scaled = false;

    match args.quantity.as_str() {
        "curve-curvature" => {
            let gamma = args
                .gamma
                .as_ref()
                .context("curve-curvature needs --gamma")?;
            let comps = split_components(gamma)?;
            let t = args.t.context("curve-curvature needs --t")?;
            let curve = ParamCurve::parse(&comps[0], &comps[1], &comps[2], (t, t + 1.0))?;
            let cp = curve.at(t, &thr)?;
            if kind != ConnectionKind::LeviCivita {
                let lim = curve_curvature_limit(kind, &cp, &thr)?;
                limit_value = Some(lim.value);
                branch = Some(lim.branch.to_string());
                scaled = matches!(
                    lim.branch,
                    heisgb_core::curve::LimitBranch::HorizontalDivergent
                );
            }
            for &l in &ls {
                let m = MetricParam::new(l)?;
                let mut v = curve_curvature(kind, m, &cp, &thr)?;
                if scaled {
                    v /= l.sqrt();
                }
                rows.push(ScanRow { l, value: v });
            }
        }
        "geodesic-curvature" => {
            let path = args.scene.as_ref().context("geodesic-curvature needs --scene")?;
            let (scene, _) = load_scene(path)?;
            let t = args.t.context("geodesic-curvature needs --t")?;
            let idx = args.boundary_index;
            let curve = scene
                .boundary
                .get(idx.saturating_sub(1))
                .with_context(|| format!("scene has no boundary component {}", idx))?;
            let orientation = plain_orientation(scene.orientation);
            if kind != ConnectionKind::LeviCivita {
                let scp = surface_curve_point(curve, &scene.surface.u, MetricParam::new(1.0)?, t, &thr)?;
                let lim = geodesic_curvature_limit(kind, &scp, true, orientation, &thr)?;
                limit_value = Some(lim.value);
                branch = Some(lim.branch.to_string());
                scaled = matches!(
                    lim.branch,
                    heisgb_core::curve::LimitBranch::HorizontalDivergent
                );
            }
            for &l in &ls {
                let m = MetricParam::new(l)?;
                let scp = surface_curve_point(curve, &scene.surface.u, m, t, &thr)?;
                let mut v = geodesic_curvature(kind, m, &scp, true, orientation, &thr)?;
                if scaled {
                    v /= l.sqrt();
                }
                rows.push(ScanRow { l, value: v });
            }
        }
        "mean-curvature" | "gauss-curvature" => {
            let u = match (&args.scene, &args.u) {
                (Some(path), None) => load_scene(path)?.0.surface.u,
                (None, Some(text)) => expr::parse(text)?,
                _ => bail!("{} needs exactly one of --scene or --u", args.quantity),
            };
            let pt = parse_point(args.point.as_ref().context("needs --point")?)?;
            if args.quantity == "mean-curvature" {
                limit_value = Some(mean_curvature_limit(&u, pt, &thr)?);
                for &l in &ls {
                    let m = MetricParam::new(l)?;
                    rows.push(ScanRow {
                        l,
                        value: mean_curvature(kind, m, &u, pt, &thr)?,
                    });
                }
            } else {
                if kind != ConnectionKind::LeviCivita {
                    limit_value = Some(gauss_curvature_limit(kind, &u, pt, &thr)?);
                }
                for &l in &ls {
                    let m = MetricParam::new(l)?;
                    rows.push(ScanRow {
                        l,
                        value: gauss_curvature(kind, m, &u, pt, &thr)?.k_surface,
                    });
                }
            }
        }
        other => bail!(
            "quantity `{}` must be curve-curvature, geodesic-curvature, mean-curvature or gauss-curvature",
            other
        ),
    }

    let exponent = limit_value.and_then(|lim| {
        let devs: Vec<f64> = rows.iter().map(|r| (r.value - lim).abs()).collect();
        let lvals: Vec<f64> = rows.iter().map(|r| r.l).collect();
        fit_exponent(&lvals, &devs)
    });

    emit(
        &ScanReport {
            schema_version: SCHEMA_VERSION,
            command: "limit-scan",
            quantity: args.quantity,
            kind: kind.name().into(),
            rows,
            limit_value,
            branch,
            scaled_by_sqrt_l: scaled,
            exponent,
        },
        format,
    );
    Ok(ExitCode::SUCCESS)
}
