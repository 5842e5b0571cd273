//! Curvature of ambient curves, at finite L and in the L → ∞ limit.
//!
//! The finite-L curvature is computed from the definition
//!
//! ```text
//! k² = |∇_γ̇ γ̇|²_L / |γ̇|⁴_L − ⟨∇_γ̇ γ̇, γ̇⟩²_L / |γ̇|⁶_L
//! ```
//!
//! with the covariant acceleration supplied by the connection's coefficient
//! table. A per-connection closed form is carried alongside as an oracle;
//! the two must agree to 1e-10 relative (see the verify suite).
//!
//! As L → ∞ the curvature splits into three branches, decided by ω(γ̇) and a
//! connection-specific second discriminant: a finite limit at non-horizontal
//! points, a finite planar-curvature limit at horizontal points where the
//! discriminant also vanishes, and √L-divergence otherwise (where the
//! reported value is the coefficient lim k/√L).

use serde::{Deserialize, Serialize};

use crate::connection::{coeff_table, ConnectionKind};
use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::heis::{self, FrameVector, MetricParam, Point};
use crate::tol::Thresholds;

/// A parametric curve with expression components and a parameter interval.
#[derive(Debug, Clone)]
pub struct ParamCurve {
    pub components: [Expr; 3],
    pub interval: (f64, f64),
}

impl ParamCurve {
    pub fn new(components: [Expr; 3], interval: (f64, f64)) -> Self {
        ParamCurve {
            components,
            interval,
        }
    }

    /// Parse the three component expressions (variables of `t`).
    pub fn parse(c1: &str, c2: &str, c3: &str, interval: (f64, f64)) -> Result<Self> {
        Ok(ParamCurve {
            components: [expr::parse(c1)?, expr::parse(c2)?, expr::parse(c3)?],
            interval,
        })
    }

    /// Evaluate position and derivatives at `t`, rejecting non-regular
    /// points.
    pub fn at(&self, t: f64, thr: &Thresholds) -> Result<CurvePoint> {
        let j = expr::eval_curve_jet(&self.components, t)?;
        let speed =
            (j.vel[0] * j.vel[0] + j.vel[1] * j.vel[1] + j.vel[2] * j.vel[2]).sqrt();
        if speed <= thr.eps_regular {
            return Err(Error::NonRegularCurve { t, speed });
        }
        let pos = Point::from_array(j.pos);
        let omega = heis::omega(pos, j.vel);
        let omega_dot = heis::omega_dot(pos, j.acc);
        Ok(CurvePoint {
            t,
            pos,
            vel: j.vel,
            acc: j.acc,
            speed,
            omega,
            omega_dot,
        })
    }
}

/// Everything the curvature formulas need at one curve point.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub t: f64,
    pub pos: Point,
    pub vel: [f64; 3],
    pub acc: [f64; 3],
    /// Euclidean norm of the coordinate velocity.
    pub speed: f64,
    /// ω(γ̇): the X3 frame component of the velocity.
    pub omega: f64,
    /// d/dt ω(γ̇).
    pub omega_dot: f64,
}

impl CurvePoint {
    /// Velocity in the left-invariant frame: (γ̇1, γ̇2, ω(γ̇)).
    pub fn velocity_frame(&self) -> FrameVector {
        FrameVector::new(self.vel[0], self.vel[1], self.omega)
    }

    /// Componentwise t-derivative of the frame velocity: (γ̈1, γ̈2, ω̇).
    pub fn velocity_frame_rate(&self) -> FrameVector {
        FrameVector::new(self.acc[0], self.acc[1], self.omega_dot)
    }
}

/// Covariant acceleration ∇_γ̇ γ̇ in the frame, for the given connection.
pub fn covariant_acceleration(
    kind: ConnectionKind,
    metric: MetricParam,
    cp: &CurvePoint,
) -> FrameVector {
    coeff_table(kind, metric).covariant_along(
        cp.velocity_frame(),
        cp.velocity_frame(),
        cp.velocity_frame_rate(),
    )
}

/// Clamp a Cauchy-Schwarz radicand that roundoff pushed slightly negative;
/// anything more negative than the clamp band is an implementation bug and
/// is surfaced as an error.
pub(crate) fn clamp_radicand(rad: f64, scale: f64, thr: &Thresholds) -> Result<f64> {
    if rad >= 0.0 {
        Ok(rad)
    } else if rad >= -thr.radicand_clamp * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand { value: rad, scale })
    }
}

/// Finite-L curvature from the definition.
pub fn curve_curvature(
    kind: ConnectionKind,
    metric: MetricParam,
    cp: &CurvePoint,
    thr: &Thresholds,
) -> Result<f64> {
    let nabla = covariant_acceleration(kind, metric, cp);
    let vel = cp.velocity_frame();
    let n2 = nabla.norm_sq_l(metric);
    let v2 = vel.norm_sq_l(metric);
    let ip = nabla.dot_l(vel, metric);
    let term1 = n2 / (v2 * v2);
    let term2 = ip * ip / (v2 * v2 * v2);
    let rad = clamp_radicand(term1 - term2, term1.abs().max(term2.abs()), thr)?;
    Ok(rad.sqrt())
}

/// Finite-L curvature from the per-connection closed form. Available for
/// the three non-Levi-Civita kinds; used as the oracle against
/// [`curve_curvature`].
pub fn curve_curvature_closed_form(
    kind: ConnectionKind,
    metric: MetricParam,
    cp: &CurvePoint,
    thr: &Thresholds,
) -> Result<f64> {
    let l = metric.l();
    let (v1, v2c) = (cp.vel[0], cp.vel[1]);
    let (a1, a2) = (cp.acc[0], cp.acc[1]);
    let w = cp.omega;
    let wd = cp.omega_dot;
    let (ca, cb, cw) = match kind {
        ConnectionKind::SvK1 => (a1 + l * w * v2c / 2.0, a2 - l * w * v1 / 2.0, wd),
        ConnectionKind::SvK2 => (a1, a2 - l * w * v1 / 2.0, wd + v1 * v2c / 2.0),
        ConnectionKind::Adapted => (a1, a2, wd),
        ConnectionKind::LeviCivita => {
            return Err(Error::UnsupportedConnection {
                kind,
                what: "a closed-form curve curvature",
            })
        }
    };
    let d = v1 * v1 + v2c * v2c + l * w * w;
    let term1 = (ca * ca + cb * cb + l * cw * cw) / (d * d);
    let num2 = v1 * ca + v2c * cb + l * w * cw;
    let term2 = num2 * num2 / (d * d * d);
    let rad = clamp_radicand(term1 - term2, term1.abs().max(term2.abs()), thr)?;
    Ok(rad.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitBranch {
    NonHorizontal,
    HorizontalFinite,
    HorizontalDivergent,
}

impl std::fmt::Display for LimitBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LimitBranch::NonHorizontal => "non-horizontal",
            LimitBranch::HorizontalFinite => "horizontal-finite",
            LimitBranch::HorizontalDivergent => "horizontal-divergent",
        })
    }
}

/// Result of an L → ∞ curvature limit. `value` is the limit itself on the
/// finite branches and the coefficient of √L on the divergent branch.
/// `marginal` flags classifications where |ω(γ̇)| sits just above the
/// horizontality threshold, where the discontinuous trichotomy is fragile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveLimitResult {
    pub branch: LimitBranch,
    pub value: f64,
    pub marginal: bool,
}

/// Planar curvature of the horizontal projection: |γ̈1 γ̇2 − γ̈2 γ̇1| / |γ̇_H|³.
fn planar_curvature(cp: &CurvePoint) -> f64 {
    let h2 = cp.vel[0] * cp.vel[0] + cp.vel[1] * cp.vel[1];
    (cp.acc[0] * cp.vel[1] - cp.acc[1] * cp.vel[0]).abs() / h2.powf(1.5)
}

/// The L → ∞ limit of the ambient curve curvature.
pub fn curve_curvature_limit(
    kind: ConnectionKind,
    cp: &CurvePoint,
    thr: &Thresholds,
) -> Result<CurveLimitResult> {
    let eh = thr.horizontal(cp.speed);
    let aw = cp.omega.abs();
    let marginal = aw > eh && aw <= thr.marginal_band * eh;
    let h2 = cp.vel[0] * cp.vel[0] + cp.vel[1] * cp.vel[1];

    if aw > eh {
        let value = match kind {
            ConnectionKind::SvK1 => h2.sqrt() / (2.0 * aw),
            ConnectionKind::SvK2 => cp.vel[0].abs() / (2.0 * aw),
            ConnectionKind::Adapted => 0.0,
            ConnectionKind::LeviCivita => {
                return Err(Error::UnsupportedConnection {
                    kind,
                    what: "the curve curvature limit",
                })
            }
        };
        return Ok(CurveLimitResult {
            branch: LimitBranch::NonHorizontal,
            value,
            marginal,
        });
    }

    let disc = match kind {
        ConnectionKind::SvK1 | ConnectionKind::Adapted => cp.omega_dot,
        ConnectionKind::SvK2 => cp.omega_dot + cp.vel[0] * cp.vel[1] / 2.0,
        ConnectionKind::LeviCivita => {
            return Err(Error::UnsupportedConnection {
                kind,
                what: "the curve curvature limit",
            })
        }
    };

    if disc.abs() <= eh {
        Ok(CurveLimitResult {
            branch: LimitBranch::HorizontalFinite,
            value: planar_curvature(cp),
            marginal,
        })
    } else {
        Ok(CurveLimitResult {
            branch: LimitBranch::HorizontalDivergent,
            value: disc.abs() / h2,
            marginal,
        })
    }
}
