//! Geodesic curvature of curves lying on a surface, at finite L and in the
//! L → ∞ limit.
//!
//! The projected connection is ∇^Σ_U V = π ∇_U V with π the tangential
//! projection, so the covariant acceleration of a curve on the surface is
//! described by its two components (c1, c2) on the tangent frame (e1, e2).
//! The almost-complex rotation J_L (e1 ↦ e2, e2 ↦ −e1) fixes the sign of
//! the signed geodesic curvature; the `Orientation` switch negates J_L for
//! scenes whose boundary parametrization runs the other way.

use serde::{Deserialize, Serialize};

use crate::connection::{coeff_table, ConnectionKind};
use crate::curve::{clamp_radicand, CurvePoint, LimitBranch, ParamCurve};
use crate::error::{Error, Result};
use crate::expr;
use crate::heis::MetricParam;
use crate::surface::{surface_jets, ImplicitSurface, SurfaceFrame};
use crate::tol::Thresholds;

/// Global orientation convention: `Flipped` negates the rotation J_L (and
/// with it every signed geodesic curvature), which is the correction needed
/// when a scene's boundary curves are parametrized opposite to the frame
/// orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    AsAuthored,
    Flipped,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::AsAuthored => 1.0,
            Orientation::Flipped => -1.0,
        }
    }
}

/// A curve constrained to a surface.
#[derive(Debug, Clone)]
pub struct OnSurfaceCurve {
    pub curve: ParamCurve,
    pub surface: ImplicitSurface,
}

/// Curve data, surface frame and the tangent decomposition γ̇ = a e1 + b e2
/// at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceCurvePoint {
    pub cp: CurvePoint,
    pub frame: SurfaceFrame,
    /// ⟨γ̇, e1⟩_L.
    pub a: f64,
    /// ⟨γ̇, e2⟩_L.
    pub b: f64,
}

impl OnSurfaceCurve {
    pub fn new(curve: ParamCurve, surface: ImplicitSurface) -> Self {
        OnSurfaceCurve { curve, surface }
    }

    /// Evaluate at `t`, checking that the point is on the surface, away from
    /// the characteristic set, and that the velocity is tangent.
    pub fn at(
        &self,
        metric: MetricParam,
        t: f64,
        thr: &Thresholds,
    ) -> Result<SurfaceCurvePoint> {
        surface_curve_point(&self.curve, &self.surface.u, metric, t, thr)
    }
}

/// Evaluate a curve point together with the surface frame, checking the
/// on-surface, non-characteristic and tangency preconditions.
pub fn surface_curve_point(
    curve: &ParamCurve,
    u: &expr::Expr,
    metric: MetricParam,
    t: f64,
    thr: &Thresholds,
) -> Result<SurfaceCurvePoint> {
    let cp = curve.at(t, thr)?;
    let sj = surface_jets(u, cp.pos, metric, thr)?;
    let frame = sj.frame();
    let vel = cp.velocity_frame();
    let normal_component = vel.dot_l(frame.v_l, metric);
    let speed_l = vel.norm_l(metric);
    if normal_component.abs() > thr.eps_tangency * speed_l {
        return Err(Error::TangencyViolation {
            t,
            deviation: normal_component,
        });
    }
    Ok(SurfaceCurvePoint {
        cp,
        frame,
        a: vel.dot_l(frame.e1, metric),
        b: vel.dot_l(frame.e2, metric),
    })
}

/// Components of ∇_γ̇ γ̇ on (e1, e2), from the generic covariant derivative.
pub fn projected_acceleration(
    kind: ConnectionKind,
    metric: MetricParam,
    scp: &SurfaceCurvePoint,
) -> (f64, f64) {
    let nabla = coeff_table(kind, metric).covariant_along(
        scp.cp.velocity_frame(),
        scp.cp.velocity_frame(),
        scp.cp.velocity_frame_rate(),
    );
    (
        nabla.dot_l(scp.frame.e1, metric),
        nabla.dot_l(scp.frame.e2, metric),
    )
}

/// The tabulated expansions of the projected acceleration, used as oracles
/// for [`projected_acceleration`]. Available for the three non-Levi-Civita
/// connections.
pub fn projected_acceleration_expansion(
    kind: ConnectionKind,
    metric: MetricParam,
    scp: &SurfaceCurvePoint,
) -> Result<(f64, f64)> {
    let l = metric.l();
    let sl = metric.sqrt_l();
    let f = &scp.frame;
    let cp = &scp.cp;
    let (v1, v2) = (cp.vel[0], cp.vel[1]);
    let (acc1, acc2) = (cp.acc[0], cp.acc[1]);
    let w = cp.omega;
    let (ca, cb, cw) = match kind {
        ConnectionKind::SvK1 => (
            acc1 + l * w * v2 / 2.0,
            acc2 - l * w * v1 / 2.0,
            cp.omega_dot,
        ),
        ConnectionKind::SvK2 => (
            acc1,
            acc2 - l * w * v1 / 2.0,
            cp.omega_dot + v1 * v2 / 2.0,
        ),
        ConnectionKind::Adapted => (acc1, acc2, cp.omega_dot),
        ConnectionKind::LeviCivita => {
            return Err(Error::UnsupportedConnection {
                kind,
                what: "a tabulated projected-acceleration expansion",
            })
        }
    };
    let c1 = f.qbar * ca - f.pbar * cb;
    let c2 = f.rbar_l * f.pbar * ca + f.rbar_l * f.qbar * cb - (f.l / f.l_l) * sl * cw;
    Ok((c1, c2))
}

/// Finite-L geodesic curvature. Unsigned uses the intrinsic analogue of the
/// ambient definition; signed pairs the projected acceleration with J_L(γ̇).
pub fn geodesic_curvature(
    kind: ConnectionKind,
    metric: MetricParam,
    scp: &SurfaceCurvePoint,
    signed: bool,
    orientation: Orientation,
    thr: &Thresholds,
) -> Result<f64> {
    let (c1, c2) = projected_acceleration(kind, metric, scp);
    let (a, b) = (scp.a, scp.b);
    let s = a * a + b * b;
    if signed {
        // J_L(a e1 + b e2) = a e2 − b e1.
        Ok(orientation.sign() * (c2 * a - c1 * b) / s.powf(1.5))
    } else {
        let term1 = (c1 * c1 + c2 * c2) / (s * s);
        let ip = c1 * a + c2 * b;
        let term2 = ip * ip / (s * s * s);
        let rad = clamp_radicand(term1 - term2, term1.abs().max(term2.abs()), thr)?;
        Ok(rad.sqrt())
    }
}

/// Limit result for geodesic curvature; `value` is signed only for the
/// signed variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLimitResult {
    pub branch: LimitBranch,
    pub value: f64,
    pub marginal: bool,
}

/// L → ∞ geodesic curvature on the surface.
pub fn geodesic_curvature_limit(
    kind: ConnectionKind,
    scp: &SurfaceCurvePoint,
    signed: bool,
    orientation: Orientation,
    thr: &Thresholds,
) -> Result<SignedLimitResult> {
    let cp = &scp.cp;
    let f = &scp.frame;
    let eh = thr.horizontal(cp.speed);
    let aw = cp.omega.abs();
    let marginal = aw > eh && aw <= thr.marginal_band * eh;
    let sigma = orientation.sign();

    if aw > eh {
        let base = match kind {
            ConnectionKind::SvK1 => (f.pbar * cp.vel[0] + f.qbar * cp.vel[1]) / (2.0 * aw),
            ConnectionKind::SvK2 => f.pbar * cp.vel[0] / (2.0 * aw),
            ConnectionKind::Adapted => 0.0,
            ConnectionKind::LeviCivita => {
                return Err(Error::UnsupportedConnection {
                    kind,
                    what: "the geodesic curvature limit",
                })
            }
        };
        let value = if signed { sigma * base } else { base.abs() };
        return Ok(SignedLimitResult {
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
                what: "the geodesic curvature limit",
            })
        }
    };

    if disc.abs() <= eh {
        return Ok(SignedLimitResult {
            branch: LimitBranch::HorizontalFinite,
            value: 0.0,
            marginal,
        });
    }

    let denom = f.qbar * cp.vel[0] - f.pbar * cp.vel[1];
    if denom.abs() <= eh {
        return Err(Error::DegenerateDenominator { t: cp.t });
    }
    let value = if signed {
        sigma * (-denom) * disc / denom.abs().powi(3)
    } else {
        disc.abs() / (denom * denom)
    };
    Ok(SignedLimitResult {
        branch: LimitBranch::HorizontalDivergent,
        value,
        marginal,
    })
}

/// The product (signed limit geodesic curvature) × (limit length density
/// |ω(γ̇)|), in the form with |ω| cancelled. This is the boundary integrand
/// of the limit Gauss-Bonnet identity; the cancelled form stays finite at
/// isolated horizontal points, where the measure vanishes.
pub fn signed_limit_length_product(
    kind: ConnectionKind,
    scp: &SurfaceCurvePoint,
    orientation: Orientation,
) -> Result<f64> {
    let f = &scp.frame;
    let cp = &scp.cp;
    let base = match kind {
        ConnectionKind::SvK1 => (f.pbar * cp.vel[0] + f.qbar * cp.vel[1]) / 2.0,
        ConnectionKind::SvK2 => f.pbar * cp.vel[0] / 2.0,
        ConnectionKind::Adapted => 0.0,
        ConnectionKind::LeviCivita => {
            return Err(Error::UnsupportedConnection {
                kind,
                what: "the limit boundary integrand",
            })
        }
    };
    Ok(orientation.sign() * base)
}
