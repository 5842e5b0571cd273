//! Scene-level integration tests for the Gauss-Bonnet machinery, on the
//! three shipped scenes.

use heisgb_core::connection::ConnectionKind;
use heisgb_core::gb::{gb_check_finite_l, gb_residual_limit, Scene};
use heisgb_core::quad::QuadTol;
use heisgb_core::scene::parse_scene_str;
use heisgb_core::tol::Thresholds;
use heisgb_core::MetricParam;

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

#[test]
fn paraboloid_limit_residual_vanishes_for_both_splitting_connections() {
    let scene = load("paraboloid-cap.scene");
    // Rim values: the boundary integrand is constant 1/(2√5) ds with
    // ds = dt/2, so the boundary integral is π/√5.
    let want = std::f64::consts::PI / 5.0f64.sqrt();
    let rep = gb_residual_limit(ConnectionKind::SvK1, &scene, 1e-2, &tol(), &thr()).unwrap();
    assert!(
        (rep.boundary[0] - want).abs() < 1e-8,
        "boundary {} vs {}",
        rep.boundary[0],
        want
    );
    assert!(
        (rep.interior + want).abs() < 1e-4,
        "interior {} vs {}",
        rep.interior,
        -want
    );
    assert!(rep.residual.abs() < 1e-6, "residual {}", rep.residual);

    let rep = gb_residual_limit(ConnectionKind::SvK2, &scene, 1e-2, &tol(), &thr()).unwrap();
    assert!(
        (rep.boundary[0] - want / 2.0).abs() < 1e-8,
        "boundary {} vs {}",
        rep.boundary[0],
        want / 2.0
    );
    assert!(rep.residual.abs() < 1e-6, "residual {}", rep.residual);
}

#[test]
fn cylinder_band_limit_residuals_vanish() {
    let scene = load("cylinder-band.scene");
    for kind in [
        ConnectionKind::SvK1,
        ConnectionKind::SvK2,
        ConnectionKind::Adapted,
    ] {
        let rep = gb_residual_limit(kind, &scene, 1e-2, &tol(), &thr()).unwrap();
        assert_eq!(rep.boundary.len(), 2);
        assert!(rep.residual.abs() < 1e-8, "{}: {}", kind, rep.residual);
    }
}

#[test]
fn cylinder_band_classical_check_with_two_boundaries() {
    let scene = load("cylinder-band.scene");
    for l in [0.25, 1.0, 4.0] {
        let rep = gb_check_finite_l(
            ConnectionKind::LeviCivita,
            MetricParam::new(l).unwrap(),
            &scene,
            &tol(),
            &thr(),
        )
        .unwrap();
        assert_eq!(rep.target, 0.0);
        assert!(rep.residual.abs() < 1e-6, "L = {}: {}", l, rep.residual);
    }
}

#[test]
fn torsionful_classical_checks_are_reported_not_asserted() {
    // The finite-L identity is only guaranteed for the Levi-Civita
    // connection; for the splitting connections the residual is a
    // diagnostic and comes back finite.
    let scene = load("plane-disk.scene");
    let rep = gb_check_finite_l(
        ConnectionKind::SvK1,
        MetricParam::new(1.0).unwrap(),
        &scene,
        &tol(),
        &thr(),
    )
    .unwrap();
    assert!(rep.residual.is_finite());
    assert!(rep.interior.is_finite());
}

#[test]
fn residual_stable_under_tolerance_halving() {
    let scene = load("paraboloid-cap.scene");
    let loose = gb_residual_limit(ConnectionKind::SvK1, &scene, 1e-2, &tol(), &thr()).unwrap();
    let tight_tol = QuadTol {
        abs_tol: tol().abs_tol / 2.0,
        rel_tol: tol().rel_tol / 2.0,
        ..tol()
    };
    let tight = gb_residual_limit(ConnectionKind::SvK1, &scene, 1e-2, &tight_tol, &thr()).unwrap();
    let delta = (loose.residual - tight.residual).abs();
    assert!(
        delta <= loose.error_estimate.max(1e-12),
        "residual moved {} with error estimate {}",
        delta,
        loose.error_estimate
    );
}

#[test]
fn excision_radius_choices_extrapolate_to_same_interior() {
    let scene = load("plane-disk.scene");
    let a = gb_residual_limit(ConnectionKind::SvK1, &scene, 1e-2, &tol(), &thr()).unwrap();
    let b = gb_residual_limit(ConnectionKind::SvK1, &scene, 4e-3, &tol(), &thr()).unwrap();
    assert!(
        (a.interior - b.interior).abs() < 1e-7,
        "{} vs {}",
        a.interior,
        b.interior
    );
    assert!(a.excised_area_fraction > b.excised_area_fraction);
    assert!(a.excised_area_fraction < 1e-3);
}

#[test]
fn limit_interior_blows_up_like_inverse_square_distance() {
    // Approaching the characteristic point of the plane along a ray, the
    // limit Gauss curvature scales like −1/ρ²: fitted exponent within
    // ±0.05 of −2.
    use heisgb_core::expr;
    use heisgb_core::surface::gauss_curvature_limit;
    use heisgb_core::Point;
    let u = expr::parse("x3").unwrap();
    let mut logs = Vec::new();
    for k in 0..6 {
        let rho = 0.5f64 * 0.5f64.powi(k);
        let kv = gauss_curvature_limit(
            ConnectionKind::SvK1,
            &u,
            Point::new(rho, 0.0, 0.0),
            &thr(),
        )
        .unwrap();
        logs.push((rho.ln(), kv.abs().ln()));
    }
    let n = logs.len() as f64;
    let xm = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - xm) * (p.0 - xm)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    assert!((slope + 2.0).abs() < 0.05, "slope {}", slope);
}

#[test]
fn characteristic_frame_error_fires_exactly_below_threshold() {
    use heisgb_core::expr;
    use heisgb_core::surface::surface_frame;
    use heisgb_core::{Error, Point};
    let u = expr::parse("x3").unwrap();
    let thr = thr();
    let metric = MetricParam::new(1.0).unwrap();
    // l = ρ/2 and the Euclidean gradient norm is 1, so the cutoff sits at
    // ρ = 2 ε_char (1 + 1).
    let cutoff = 2.0 * thr.eps_characteristic_factor * 2.0;
    let below = surface_frame(&u, Point::new(cutoff * 0.99, 0.0, 0.0), metric, &thr);
    assert!(matches!(below, Err(Error::CharacteristicPoint { .. })));
    let above = surface_frame(&u, Point::new(cutoff * 1.01, 0.0, 0.0), metric, &thr);
    assert!(above.is_ok());
}

#[test]
fn curve_shaped_characteristic_set_is_rejected() {
    // For u = x3 − x1·x2/2 the horizontal gradient is (−x2, 0), so the
    // whole segment x2 = 0 of the chart is characteristic. Point excision
    // cannot cover it; the computation must fail with a structured error
    // rather than return a number.
    let text = r#"
[surface]
u = "x3 - x1*x2/2"
chart = ["s1", "s2", "s1*s2/2"]
domain = "disk 0 0 1"

[boundary.1]
components = ["cos(t)", "sin(t)", "cos(t)*sin(t)/2"]

[options]
euler_characteristic = 1
orientation = "as-authored"
"#;
    let (scene, _) = parse_scene_str(text).unwrap();
    let out = gb_residual_limit(ConnectionKind::SvK1, &scene, 1e-2, &tol(), &thr());
    match out {
        Err(
            heisgb_core::Error::Scene(_)
            | heisgb_core::Error::CharacteristicPoint { .. }
            | heisgb_core::Error::NonIntegrableSingularity { .. },
        ) => {}
        other => panic!(
            "expected a structured failure, got {:?}",
            other.map(|r| r.residual)
        ),
    }
}
