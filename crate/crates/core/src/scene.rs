//! Scene files: a TOML document describing a surface patch, its boundary
//! curves and numeric options.
//!
//! ```toml
//! [surface]
//! u = "x3"
//! chart = ["s1", "s2", "0"]
//! domain = "disk 0 0 1"          # or: "rect a b c d"
//!
//! [boundary.1]
//! components = ["cos(t)", "sin(t)", "0"]
//! # interval = [0.0, 6.283185307179586]   # optional; defaults to [0, 2π]
//!
//! [options]
//! euler_characteristic = 1
//! orientation = "auto"           # auto | as-authored | flipped
//! # abs_tol / rel_tol / excision_radius / l_values are optional
//! ```
//!
//! The full grammar is documented in `docs/scene-format.md`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr;
use crate::gb::{OrientationSpec, Scene};
use crate::curve::ParamCurve;
use crate::quad::QuadTol;
use crate::surface::{Chart, ChartDomain, ImplicitSurface};

/// Options attached to a scene file beyond the scene itself.
#[derive(Debug, Clone)]
pub struct SceneOptions {
    pub quad_tol: QuadTol,
    pub excision_radius: f64,
    /// Metric parameters for finite-L commands; empty means caller default.
    pub l_values: Vec<f64>,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions {
            quad_tol: QuadTol::default(),
            excision_radius: 1e-2,
            l_values: Vec::new(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSceneFile {
    surface: RawSurface,
    #[serde(default)]
    boundary: BTreeMap<String, RawBoundary>,
    options: RawOptions,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    u: String,
    chart: Option<[String; 3]>,
    domain: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundary {
    components: [String; 3],
    interval: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    euler_characteristic: i32,
    orientation: Option<String>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    excision_radius: Option<f64>,
    l_values: Option<Vec<f64>>,
}

fn parse_domain(spec: &str) -> Result<ChartDomain> {
    let parts: Vec<&str> = spec.split_whitespace().collect();
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::Scene(format!("bad number `{}` in domain spec `{}`", s, spec)))
    };
    match parts.as_slice() {
        ["rect", a, b, c, d] => {
            let (a, b, c, d) = (num(a)?, num(b)?, num(c)?, num(d)?);
            if !(a < b && c < d) {
                return Err(Error::Scene(format!(
                    "rect domain `{}` must satisfy a < b and c < d",
                    spec
                )));
            }
            Ok(ChartDomain::Rect {
                s1: (a, b),
                s2: (c, d),
            })
        }
        ["disk", cx, cy, r] => {
            let (cx, cy, r) = (num(cx)?, num(cy)?, num(r)?);
            if !(r > 0.0) {
                return Err(Error::Scene(format!(
                    "disk domain `{}` must have positive radius",
                    spec
                )));
            }
            Ok(ChartDomain::Disk {
                center: [cx, cy],
                radius: r,
            })
        }
        _ => Err(Error::Scene(format!(
            "domain spec `{}` must be `rect a b c d` or `disk cx cy r`",
            spec
        ))),
    }
}

fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && v >= lo && v <= hi {
        Ok(())
    } else {
        Err(Error::Scene(format!(
            "option {} = {} outside the accepted range [{}, {}]",
            name, v, lo, hi
        )))
    }
}

/// Parse a scene document. Returns the scene plus its numeric options.
pub fn parse_scene_str(text: &str) -> Result<(Scene, SceneOptions)> {
    let raw: RawSceneFile =
        toml::from_str(text).map_err(|e| Error::Scene(format!("scene file: {}", e)))?;

    let u = expr::parse(&raw.surface.u)?;
    let chart = match (&raw.surface.chart, &raw.surface.domain) {
        (Some(map), Some(domain)) => Some(Chart {
            map: [
                expr::parse(&map[0])?,
                expr::parse(&map[1])?,
                expr::parse(&map[2])?,
            ],
            domain: parse_domain(domain)?,
        }),
        (None, None) => None,
        _ => {
            return Err(Error::Scene(
                "surface chart and domain must be given together".into(),
            ))
        }
    };

    let tau = std::f64::consts::TAU;
    let mut keys: Vec<(u32, &String, &RawBoundary)> = Vec::new();
    for (key, b) in &raw.boundary {
        let n: u32 = key.parse().map_err(|_| {
            Error::Scene(format!("boundary section name `{}` must be a number", key))
        })?;
        keys.push((n, key, b));
    }
    keys.sort_by_key(|(n, _, _)| *n);
    let mut boundary = Vec::new();
    for (_, _, b) in keys {
        let interval = match b.interval {
            Some([a, bb]) => {
                if !(a < bb) {
                    return Err(Error::Scene("boundary interval must be increasing".into()));
                }
                (a, bb)
            }
            None => (0.0, tau),
        };
        boundary.push(ParamCurve::new(
            [
                expr::parse(&b.components[0])?,
                expr::parse(&b.components[1])?,
                expr::parse(&b.components[2])?,
            ],
            interval,
        ));
    }

    let orientation = match raw.options.orientation.as_deref() {
        None | Some("auto") => OrientationSpec::Auto,
        Some("as-authored") => OrientationSpec::AsAuthored,
        Some("flipped") => OrientationSpec::Flipped,
        Some(other) => {
            return Err(Error::Scene(format!(
                "orientation `{}` must be auto, as-authored or flipped",
                other
            )))
        }
    };

    let mut options = SceneOptions::default();
    if let Some(v) = raw.options.abs_tol {
        check_range("abs_tol", v, 1e-14, 1e-2)?;
        options.quad_tol.abs_tol = v;
    }
    if let Some(v) = raw.options.rel_tol {
        check_range("rel_tol", v, 1e-14, 1e-2)?;
        options.quad_tol.rel_tol = v;
    }
    if let Some(v) = raw.options.excision_radius {
        check_range("excision_radius", v, 1e-8, 0.25)?;
        options.excision_radius = v;
    }
    if let Some(ls) = raw.options.l_values {
        for &l in &ls {
            check_range("l_values entry", l, 1e-12, 1e12)?;
        }
        options.l_values = ls;
    }

    Ok((
        Scene {
            surface: ImplicitSurface { u, chart },
            boundary,
            euler_characteristic: raw.options.euler_characteristic,
            orientation,
        },
        options,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANE_DISK: &str = r#"
[surface]
u = "x3"
chart = ["s1", "s2", "0"]
domain = "disk 0 0 1"

[boundary.1]
components = ["cos(t)", "sin(t)", "0"]

[options]
euler_characteristic = 1
orientation = "as-authored"
"#;

    #[test]
    fn parses_plane_disk() {
        let (scene, options) = parse_scene_str(PLANE_DISK).unwrap();
        assert_eq!(scene.boundary.len(), 1);
        assert_eq!(scene.euler_characteristic, 1);
        assert_eq!(scene.orientation, OrientationSpec::AsAuthored);
        assert!((options.excision_radius - 1e-2).abs() < 1e-15);
        match scene.surface.chart.unwrap().domain {
            ChartDomain::Disk { center, radius } => {
                assert_eq!(center, [0.0, 0.0]);
                assert_eq!(radius, 1.0);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn rejects_bad_expression_with_parse_error() {
        let text = PLANE_DISK.replace("\"x3\"", "\"x3 +\"");
        let err = parse_scene_str(&text).unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{:?}", err);
    }

    #[test]
    fn rejects_unknown_option_section() {
        let text = format!("{}\n[extra]\nfoo = 1\n", PLANE_DISK);
        assert!(parse_scene_str(&text).is_err());
    }

    #[test]
    fn rejects_out_of_range_tolerance() {
        let text = format!("{}\nabs_tol = 1.0\n", PLANE_DISK.trim_end());
        let err = parse_scene_str(&text).unwrap_err();
        assert!(matches!(err, Error::Scene(_)), "{:?}", err);
    }

    #[test]
    fn boundary_sections_sort_numerically() {
        let text = r#"
[surface]
u = "x3"

[boundary.10]
components = ["cos(t)", "sin(t)", "0"]

[boundary.2]
components = ["2*cos(t)", "2*sin(t)", "0"]

[options]
euler_characteristic = 0
"#;
        let (scene, _) = parse_scene_str(text).unwrap();
        assert_eq!(scene.boundary.len(), 2);
        // Section 2 precedes section 10.
        let first = &scene.boundary[0].components[0];
        assert_eq!(first.to_string(), "2 * cos(t)");
    }

    #[test]
    fn missing_euler_characteristic_is_an_error() {
        let text = r#"
[surface]
u = "x3"

[options]
orientation = "auto"
"#;
        assert!(parse_scene_str(text).is_err());
    }
}
