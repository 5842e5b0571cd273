//! Acceptance suite: every release-gating check, one test per criterion,
//! each printing a single PASS/FAIL line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use heisgb_core::connection::ConnectionKind;
use heisgb_core::gb::{gb_check_finite_l, gb_residual_limit, Scene};
use heisgb_core::quad::QuadTol;
use heisgb_core::scene::parse_scene_str;
use heisgb_core::surface_curve::{
    geodesic_curvature_limit, surface_curve_point, Orientation,
};
use heisgb_core::tol::Thresholds;
use heisgb_core::verify::{self, VerifyReport};
use heisgb_core::{MetricParam, Point};

const PI: f64 = std::f64::consts::PI;

fn load(name: &str) -> Scene {
    let path = format!("{}/../../scenes/{}", env!("CARGO_MANIFEST_DIR"), name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {}", path, e));
    parse_scene_str(&text).expect("shipped scene parses").0
}

fn thr() -> Thresholds {
    Thresholds::default()
}

fn tol() -> QuadTol {
    QuadTol::default()
}

/// One shared 100-sample property run for the suite-based criteria.
fn shared_report() -> &'static VerifyReport {
    static REPORT: OnceLock<VerifyReport> = OnceLock::new();
    REPORT.get_or_init(|| verify::run(42, 100))
}

fn property<'a>(report: &'a VerifyReport, name: &str) -> &'a verify::PropertyResult {
    report
        .properties
        .iter()
        .find(|p| p.name == name)
        .unwrap_or_else(|| panic!("property {} missing from report", name))
}

struct Criterion {
    label: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Criterion {
            label,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, ok: bool, detail: String) {
        if !ok {
            self.failures.push(format!("{}: {}", what, detail));
        }
    }

    fn check_abs(&mut self, what: &str, got: f64, want: f64, tolerance: f64) {
        self.check(
            what,
            (got - want).abs() <= tolerance,
            format!("got {got:.12}, want {want:.12} ± {tolerance:.1e}"),
        );
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("PASS {}", self.label);
        } else {
            println!("FAIL {}", self.label);
            for f in &self.failures {
                println!("     {}", f);
            }
            panic!("criterion failed: {}\n{}", self.label, self.failures.join("\n"));
        }
    }
}

#[test]
fn criterion_1_plane_disk_gauss_bonnet_first_splitting_connection() {
    let mut c = Criterion::new(
        "criterion 1: plane-disk limit identity, first splitting connection \
         (interior −π, boundary +π, residual ≤ 1e-6, ≤ 10 s)",
    );
    let start = Instant::now();
    let scene = load("plane-disk.scene");
    let rep = gb_residual_limit(ConnectionKind::SvK1, &scene, 1e-2, &tol(), &thr()).unwrap();
    let elapsed = start.elapsed();
    c.check_abs("interior", rep.interior, -PI, 1e-4);
    c.check_abs("boundary", rep.boundary[0], PI, 1e-6);
    c.check(
        "residual",
        rep.residual.abs() <= 1e-6,
        format!("{:.3e}", rep.residual),
    );
    c.check(
        "runtime",
        elapsed <= Duration::from_secs(10),
        format!("{:?}", elapsed),
    );
    c.finish();
}

#[test]
fn criterion_2_plane_disk_gauss_bonnet_second_splitting_connection() {
    let mut c = Criterion::new(
        "criterion 2: plane-disk limit identity, second splitting connection \
         (interior −π/2, boundary +π/2, residual ≤ 1e-6)",
    );
    let scene = load("plane-disk.scene");
    let rep = gb_residual_limit(ConnectionKind::SvK2, &scene, 1e-2, &tol(), &thr()).unwrap();
    c.check_abs("interior", rep.interior, -PI / 2.0, 1e-4);
    c.check_abs("boundary", rep.boundary[0], PI / 2.0, 1e-6);
    c.check(
        "residual",
        rep.residual.abs() <= 1e-6,
        format!("{:.3e}", rep.residual),
    );
    c.finish();
}

#[test]
fn criterion_3_flat_connection_identically_zero_on_all_scenes() {
    let mut c = Criterion::new(
        "criterion 3: flat connection limit curvatures vanish identically on \
         every shipped scene; residual at summation roundoff",
    );
    for name in [
        "plane-disk.scene",
        "paraboloid-cap.scene",
        "cylinder-band.scene",
    ] {
        let scene = load(name);
        // Pointwise: the limit Gauss curvature at sampled chart points.
        let chart = scene.surface.chart.as_ref().unwrap();
        let samples = sample_chart_points(chart, 12);
        for pt in samples {
            match heisgb_core::surface::gauss_curvature_limit(
                ConnectionKind::Adapted,
                &scene.surface.u,
                pt,
                &thr(),
            ) {
                Ok(k) => c.check(
                    &format!("{name} K limit at sampled point"),
                    k == 0.0,
                    format!("{:?} -> {}", pt, k),
                ),
                Err(heisgb_core::Error::CharacteristicPoint { .. }) => {}
                Err(e) => c.check(&format!("{name} sample"), false, e.to_string()),
            }
        }
        // Pointwise: the signed limit geodesic curvature along boundaries.
        let metric = MetricParam::new(1.0).unwrap();
        for curve in &scene.boundary {
            for k in 0..64 {
                let (a, b) = curve.interval;
                let t = a + (k as f64 + 0.5) / 64.0 * (b - a);
                let scp =
                    surface_curve_point(curve, &scene.surface.u, metric, t, &thr()).unwrap();
                let lim = geodesic_curvature_limit(
                    ConnectionKind::Adapted,
                    &scp,
                    true,
                    Orientation::AsAuthored,
                    &thr(),
                )
                .unwrap();
                c.check(
                    &format!("{name} boundary limit at node"),
                    lim.value == 0.0,
                    format!("t = {}: {}", t, lim.value),
                );
            }
        }
        let rep = gb_residual_limit(ConnectionKind::Adapted, &scene, 1e-2, &tol(), &thr()).unwrap();
        let nodes = (rep.node_counts.interior + rep.node_counts.boundary) as f64;
        c.check(
            &format!("{name} residual"),
            rep.residual.abs() <= 1e-14 * nodes,
            format!("{:.3e} vs 1e-14 × {} nodes", rep.residual, nodes),
        );
    }
    c.finish();
}

fn sample_chart_points(chart: &heisgb_core::surface::Chart, n: usize) -> Vec<Point> {
    use heisgb_core::expr::eval_chart_jet;
    use heisgb_core::surface::ChartDomain;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (f1, f2) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            let s = match chart.domain {
                ChartDomain::Rect { s1, s2 } => [
                    s1.0 + f1 * (s1.1 - s1.0),
                    s2.0 + f2 * (s2.1 - s2.0),
                ],
                ChartDomain::Disk { center, radius } => {
                    let rho = radius * f1;
                    let th = std::f64::consts::TAU * f2;
                    [center[0] + rho * th.cos(), center[1] + rho * th.sin()]
                }
            };
            let x = [
                eval_chart_jet(&chart.map[0], s).unwrap().v,
                eval_chart_jet(&chart.map[1], s).unwrap().v,
                eval_chart_jet(&chart.map[2], s).unwrap().v,
            ];
            out.push(Point::new(x[0], x[1], x[2]));
        }
    }
    out
}

#[test]
fn criterion_4_classical_gauss_bonnet_sanity_levi_civita() {
    let mut c = Criterion::new(
        "criterion 4: classical finite-L identity (Levi-Civita) on plane-disk \
         and paraboloid-cap at L ∈ {1/4, 1, 4}, residual ≤ 1e-6, ≤ 30 s/scene",
    );
    for name in ["plane-disk.scene", "paraboloid-cap.scene"] {
        let scene = load(name);
        let start = Instant::now();
        for l in [0.25, 1.0, 4.0] {
            let rep = gb_check_finite_l(
                ConnectionKind::LeviCivita,
                MetricParam::new(l).unwrap(),
                &scene,
                &tol(),
                &thr(),
            )
            .unwrap();
            c.check(
                &format!("{name} L = {l}"),
                rep.residual.abs() <= 1e-6,
                format!("residual {:.3e} against 2πχ", rep.residual),
            );
        }
        let elapsed = start.elapsed();
        c.check(
            &format!("{name} runtime"),
            elapsed <= Duration::from_secs(30),
            format!("{:?}", elapsed),
        );
    }
    c.finish();
}

#[test]
fn criterion_5_two_path_equivalence_suite() {
    let mut c = Criterion::new(
        "criterion 5: closed forms vs definitions — curve curvature 1e-10, \
         second fundamental forms 1e-9, projected accelerations 1e-10 \
         (100 seeded samples per connection)",
    );
    let report = shared_report();
    for kind in ["svk1", "svk2", "adapted"] {
        let p = property(report, &format!("curve-curvature-two-path[{kind}]"));
        c.check(
            &p.name,
            p.passed && p.tolerance == 1e-10,
            format!("worst {:.3e} (tol {:.0e})", p.worst, p.tolerance),
        );
        let p = property(report, &format!("projected-acceleration-two-path[{kind}]"));
        c.check(
            &p.name,
            p.passed && p.tolerance == 1e-10,
            format!("worst {:.3e} (tol {:.0e})", p.worst, p.tolerance),
        );
    }
    for kind in ["levi-civita", "svk1", "svk2", "adapted"] {
        let p = property(report, &format!("second-fundamental-form-two-path[{kind}]"));
        c.check(
            &p.name,
            p.passed && p.tolerance == 1e-9,
            format!("worst {:.3e} (tol {:.0e})", p.worst, p.tolerance),
        );
    }
    c.finish();
}

#[test]
fn criterion_6_limit_consistency_suite() {
    let mut c = Criterion::new(
        "criterion 6: finite-L values at L = 1e8 match limit formulas to 1e-3; \
         Gauss-curvature remainder exponent in [0.4, 1.1]",
    );
    let report = shared_report();
    let names = [
        "curve-limit-consistency[svk1]",
        "curve-limit-consistency[svk2]",
        "curve-limit-consistency[adapted]",
        "geodesic-limit-consistency[svk1]",
        "geodesic-limit-consistency[svk2]",
        "geodesic-limit-consistency[adapted]",
        "mean-curvature-limit-consistency",
        "gauss-curvature-limit-consistency[svk1]",
        "gauss-curvature-limit-consistency[svk2]",
        "gauss-curvature-limit-consistency[adapted]",
    ];
    for name in names {
        let p = property(report, name);
        c.check(
            &p.name,
            p.passed && p.tolerance == 1e-3,
            format!("worst {:.3e} (tol {:.0e})", p.worst, p.tolerance),
        );
    }
    let p = property(report, "gauss-remainder-exponent-window");
    c.check(
        &p.name,
        p.passed,
        format!("worst |α − 0.75| = {:.3}", p.worst),
    );
    c.finish();
}

#[test]
fn criterion_7_metric_connection_properties() {
    let mut c = Criterion::new(
        "criterion 7: metric compatibility along 50+ random curves to 1e-10 \
         for all four connections; curvature antisymmetry exact; curvature \
         table and surface-frame sectional values reproduced",
    );
    let report = shared_report();
    for kind in ["levi-civita", "svk1", "svk2", "adapted"] {
        let p = property(report, &format!("metric-compatibility[{kind}]"));
        c.check(
            &p.name,
            p.passed && p.tolerance == 1e-10 && p.samples >= 50,
            format!(
                "worst {:.3e} (tol {:.0e}, {} samples)",
                p.worst, p.tolerance, p.samples
            ),
        );
    }
    let p = property(report, "curvature-antisymmetry");
    c.check(&p.name, p.passed && p.worst == 0.0, format!("worst {:.3e}", p.worst));
    let p = property(report, "curvature-table-regression");
    c.check(&p.name, p.passed, format!("worst {:.3e}", p.worst));
    let p = property(report, "sectional-on-surface-frame");
    c.check(&p.name, p.passed, format!("worst {:.3e}", p.worst));
    c.finish();
}

#[test]
fn criterion_8_jet_correctness() {
    let mut c = Criterion::new(
        "criterion 8: jets vs central finite differences, 200 samples \
         (gradient 1e-6, Hessian 1e-4); product rule exact at jet level",
    );
    let report = shared_report();
    let p = property(report, "jet-gradient-vs-finite-difference");
    c.check(
        &p.name,
        p.passed && p.samples >= 200 && p.tolerance == 1e-6,
        format!("worst {:.3e} over {} samples", p.worst, p.samples),
    );
    let p = property(report, "jet-hessian-vs-finite-difference");
    c.check(
        &p.name,
        p.passed && p.samples >= 200 && p.tolerance == 1e-4,
        format!("worst {:.3e} over {} samples", p.worst, p.samples),
    );
    let p = property(report, "jet-product-rule-exact");
    c.check(
        &p.name,
        p.passed && p.tolerance == 4.0,
        format!("worst {:.3} ulps", p.worst),
    );
    c.finish();
}
