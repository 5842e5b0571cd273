//! Implicit surfaces: the adapted frame, second fundamental forms, mean and
//! Gauss curvature, and their L → ∞ limits.
//!
//! For a defining function u with X1u = p, X2u = q and X̃3u = r, write
//! l = √(p²+q²), l_L = √(p²+q²+r²), and normalize p̄ = p/l, q̄ = q/l,
//! p̄_L = p/l_L, q̄_L = q/l_L, r̄_L = r/l_L. Away from characteristic points
//! (where l = 0) the surface carries the g_L-orthonormal frame
//!
//! ```text
//! v_L = p̄_L X1 + q̄_L X2 + r̄_L X̃3          (unit normal)
//! e1  = q̄ X1 − p̄ X2                         (horizontal tangent)
//! e2  = r̄_L p̄ X1 + r̄_L q̄ X2 − (l/l_L) X̃3   (completing tangent)
//! ```
//!
//! The second fundamental form entries ⟨∇_{e_i} v_L, e_j⟩_L are computed by
//! differentiating the normal field directly (first-order jets of p, q, r
//! built from the Hessian of u) plus the connection's coefficient table;
//! the tabulated closed forms for each connection are carried alongside as
//! oracles. Gauss curvature comes from the Gauss equation
//! K_surf = K_amb + det II, which holds for all four metric connections.

use serde::{Deserialize, Serialize};

use crate::connection::{coeff_table, sectional, ConnectionKind};
use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::heis::{FrameVector, MetricParam, Point};
use crate::jet::{FieldJet, Jet2};
use crate::tol::Thresholds;

/// A surface given as the zero set of `u`, optionally with a chart used by
/// the integration layer.
#[derive(Debug, Clone)]
pub struct ImplicitSurface {
    pub u: Expr,
    pub chart: Option<Chart>,
}

impl ImplicitSurface {
    pub fn new(u: Expr) -> Self {
        ImplicitSurface { u, chart: None }
    }

    pub fn parse(u: &str) -> Result<Self> {
        Ok(ImplicitSurface::new(expr::parse(u)?))
    }
}

/// Parameter chart (s1, s2) ↦ (x1, x2, x3) over a rectangle or disk.
#[derive(Debug, Clone)]
pub struct Chart {
    pub map: [Expr; 3],
    pub domain: ChartDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChartDomain {
    Rect { s1: (f64, f64), s2: (f64, f64) },
    Disk { center: [f64; 2], radius: f64 },
}

/// The full symbol set of the surface frame at a non-characteristic point.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceFrame {
    pub point: Point,
    pub metric: MetricParam,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub l: f64,
    pub l_l: f64,
    pub pbar: f64,
    pub qbar: f64,
    pub pbar_l: f64,
    pub qbar_l: f64,
    pub rbar_l: f64,
    /// Unit normal, as X-frame coefficients.
    pub v_l: FrameVector,
    /// Horizontal unit tangent.
    pub e1: FrameVector,
    /// Completing unit tangent; (e1, e2) is the working orientation.
    pub e2: FrameVector,
}

/// First-order jets of every frame symbol, for formulas that differentiate
/// them once more.
pub(crate) struct SurfaceJets {
    pub point: Point,
    pub metric: MetricParam,
    pub u3: FieldJet,
    pub p: FieldJet,
    pub q: FieldJet,
    pub r: FieldJet,
    pub l: FieldJet,
    pub l_l: FieldJet,
    pub pbar: FieldJet,
    pub qbar: FieldJet,
    pub pbar_l: FieldJet,
    pub qbar_l: FieldJet,
    pub rbar_l: FieldJet,
}

/// X-frame derivatives of a first-order field jet at `pt`:
/// [X1 f, X2 f, X3 f].
pub(crate) fn frame_derivatives(f: FieldJet, pt: Point) -> [f64; 3] {
    [
        f.g[0] - 0.5 * pt.x2 * f.g[2],
        f.g[1] + 0.5 * pt.x1 * f.g[2],
        f.g[2],
    ]
}

/// Directional derivative of `f` along a frame vector at `pt`.
fn directional(f: FieldJet, dir: FrameVector, pt: Point) -> f64 {
    let d = frame_derivatives(f, pt);
    dir.a1 * d[0] + dir.a2 * d[1] + dir.a3 * d[2]
}

pub(crate) fn surface_jets(
    u: &Expr,
    point: Point,
    metric: MetricParam,
    thr: &Thresholds,
) -> Result<SurfaceJets> {
    let uj: Jet2 = expr::eval_field_jet(u, point)?;
    let grad_norm = (uj.d[0] * uj.d[0] + uj.d[1] * uj.d[1] + uj.d[2] * uj.d[2]).sqrt();
    if grad_norm <= 1e-14 {
        return Err(Error::DegenerateSurface {
            point: point.to_array(),
        });
    }
    if uj.v.abs() > thr.on_surface(grad_norm) {
        return Err(Error::OffSurface {
            point: point.to_array(),
            u_value: uj.v,
        });
    }

    // First-order jets of the coordinate partials of u; their gradients are
    // the rows of u's Hessian.
    let h = uj.hess_matrix();
    let u1 = FieldJet { v: uj.d[0], g: h[0] };
    let u2 = FieldJet { v: uj.d[1], g: h[1] };
    let u3 = FieldJet { v: uj.d[2], g: h[2] };
    let x1 = FieldJet { v: point.x1, g: [1.0, 0.0, 0.0] };
    let x2 = FieldJet { v: point.x2, g: [0.0, 1.0, 0.0] };

    let p = u1 - x2 * u3.scale(0.5);
    let q = u2 + x1 * u3.scale(0.5);
    let r = u3.scale(metric.inv_sqrt_l());

    let l2 = p * p + q * q;
    if l2.v.sqrt() <= thr.characteristic(grad_norm) {
        return Err(Error::CharacteristicPoint {
            point: point.to_array(),
            l: l2.v.sqrt(),
        });
    }
    let l = l2.sqrt();
    let l_l = (l2 + r * r).sqrt();

    Ok(SurfaceJets {
        point,
        metric,
        u3,
        p,
        q,
        r,
        l,
        l_l,
        pbar: p / l,
        qbar: q / l,
        pbar_l: p / l_l,
        qbar_l: q / l_l,
        rbar_l: r / l_l,
    })
}

impl SurfaceJets {
    pub fn frame(&self) -> SurfaceFrame {
        let isl = self.metric.inv_sqrt_l();
        SurfaceFrame {
            point: self.point,
            metric: self.metric,
            p: self.p.v,
            q: self.q.v,
            r: self.r.v,
            l: self.l.v,
            l_l: self.l_l.v,
            pbar: self.pbar.v,
            qbar: self.qbar.v,
            pbar_l: self.pbar_l.v,
            qbar_l: self.qbar_l.v,
            rbar_l: self.rbar_l.v,
            v_l: FrameVector::new(self.pbar_l.v, self.qbar_l.v, self.rbar_l.v * isl),
            e1: FrameVector::new(self.qbar.v, -self.pbar.v, 0.0),
            e2: FrameVector::new(
                self.rbar_l.v * self.pbar.v,
                self.rbar_l.v * self.qbar.v,
                -(self.l.v / self.l_l.v) * isl,
            ),
        }
    }

    /// X1(p̄) + X2(q̄): the shared L → ∞ mean curvature of all four
    /// connections.
    pub fn horizontal_mean(&self) -> f64 {
        frame_derivatives(self.pbar, self.point)[0] + frame_derivatives(self.qbar, self.point)[1]
    }

    /// ⟨e1, ∇_H f⟩ = q̄ X1(f) − p̄ X2(f); the pairing is L-free because e1
    /// is horizontal.
    fn e1_pair_horizontal_grad(&self, f: FieldJet) -> f64 {
        let d = frame_derivatives(f, self.point);
        self.qbar.v * d[0] - self.pbar.v * d[1]
    }

    /// ⟨e2, ∇_H f⟩_L = r̄_L (p̄ X1(f) + q̄ X2(f)).
    fn e2_pair_horizontal_grad(&self, f: FieldJet) -> f64 {
        let d = frame_derivatives(f, self.point);
        self.rbar_l.v * (self.pbar.v * d[0] + self.qbar.v * d[1])
    }
}

/// The surface frame at a point, checking the on-surface and
/// non-characteristic preconditions.
pub fn surface_frame(
    u: &Expr,
    point: Point,
    metric: MetricParam,
    thr: &Thresholds,
) -> Result<SurfaceFrame> {
    Ok(surface_jets(u, point, metric, thr)?.frame())
}

/// Definition-path second fundamental form: II[i][j] = ⟨∇_{e_i} v_L, e_j⟩_L,
/// differentiating the normal field with first-order jets and adding the
/// coefficient-table terms.
pub fn second_fundamental_form(
    kind: ConnectionKind,
    metric: MetricParam,
    u: &Expr,
    point: Point,
    thr: &Thresholds,
) -> Result<[[f64; 2]; 2]> {
    let sj = surface_jets(u, point, metric, thr)?;
    Ok(ii_from_jets(kind, &sj))
}

pub(crate) fn ii_from_jets(kind: ConnectionKind, sj: &SurfaceJets) -> [[f64; 2]; 2] {
    let frame = sj.frame();
    let table = coeff_table(kind, sj.metric);
    // Normal field components on {X1, X2, X3}.
    let f = [
        sj.pbar_l,
        sj.qbar_l,
        sj.rbar_l.scale(sj.metric.inv_sqrt_l()),
    ];
    let tangents = [frame.e1, frame.e2];
    let mut ii = [[0.0; 2]; 2];
    for (i, ei) in tangents.iter().enumerate() {
        let mut nabla = FrameVector::new(
            directional(f[0], *ei, sj.point),
            directional(f[1], *ei, sj.point),
            directional(f[2], *ei, sj.point),
        );
        for j in 0..3 {
            let c = ei.component(j);
            if c == 0.0 {
                continue;
            }
            for kk in 0..3 {
                let fk = f[kk].v;
                if fk == 0.0 {
                    continue;
                }
                nabla = nabla + table.gamma[j][kk].scale(c * fk);
            }
        }
        for (j, ej) in tangents.iter().enumerate() {
            ii[i][j] = nabla.dot_l(*ej, sj.metric);
        }
    }
    ii
}

/// Tabulated closed form of the second fundamental form for each
/// connection; the oracle against the definition path.
pub fn second_fundamental_form_closed(
    kind: ConnectionKind,
    metric: MetricParam,
    u: &Expr,
    point: Point,
    thr: &Thresholds,
) -> Result<[[f64; 2]; 2]> {
    let sj = surface_jets(u, point, metric, thr)?;
    Ok(ii_closed_from_jets(kind, &sj))
}

pub(crate) fn ii_closed_from_jets(kind: ConnectionKind, sj: &SurfaceJets) -> [[f64; 2]; 2] {
    let sl = sj.metric.sqrt_l();
    let l = sj.l.v;
    let ll = sj.l_l.v;
    let (pb, qb) = (sj.pbar.v, sj.qbar.v);
    let (qbl, rbl) = (sj.qbar_l.v, sj.rbar_l.v);
    let m = sj.horizontal_mean();
    // ⟨e1, ∇_H r̄_L⟩ and ⟨e2, ∇_H (r/l)⟩.
    let a = sj.e1_pair_horizontal_grad(sj.rbar_l);
    let b = sj.e2_pair_horizontal_grad(sj.r / sj.l);
    // X̃3(r̄_L).
    let c = sj.metric.inv_sqrt_l() * frame_derivatives(sj.rbar_l, sj.point)[2];

    let base11 = (l / ll) * m;
    let base12 = -(ll / l) * a;
    let base22 = -(l * l) / (ll * ll) * b + c;

    match kind {
        ConnectionKind::SvK1 => [
            [base11, base12],
            [base12 - sl / 2.0 - (sl / 2.0) * rbl * rbl, base22],
        ],
        ConnectionKind::SvK2 => [
            [
                base11 + sl * pb * qb * rbl / 2.0,
                base12 - (sl / 2.0) * rbl * rbl * qb * qb - (sl / 2.0) * (l / ll) * qb * qbl,
            ],
            [
                base12 - sl / 2.0 + (sl / 2.0) * (l * l) / (ll * ll)
                    - (sl / 2.0) * rbl * rbl * qb * qb,
                base22 - (sl / 2.0) * (l / ll) * pb * qbl * rbl - (sl / 2.0) * pb * qb * rbl.powi(3),
            ],
        ],
        ConnectionKind::Adapted => [
            [base11, base12],
            [
                base12 - sl / 2.0 + (sl / 2.0) * (l * l) / (ll * ll) - (sl / 2.0) * rbl * rbl,
                base22,
            ],
        ],
        // Offsets between this connection and the first splitting
        // connection cancel the √L terms, leaving a symmetric matrix.
        ConnectionKind::LeviCivita => [
            [base11, base12 - sl / 2.0],
            [base12 - sl / 2.0, base22],
        ],
    }
}

/// Shape-operator summary at finite L.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShapeOperatorReport {
    pub ii: [[f64; 2]; 2],
    /// Trace of II: the mean curvature at this L.
    pub mean: f64,
    /// Ambient sectional term −⟨R(e1,e2)e1, e2⟩_L.
    pub k_ambient: f64,
    /// Gauss-equation value: k_ambient + det II.
    pub k_surface: f64,
}

/// Finite-L mean curvature (trace of the definition-path II).
pub fn mean_curvature(
    kind: ConnectionKind,
    metric: MetricParam,
    u: &Expr,
    point: Point,
    thr: &Thresholds,
) -> Result<f64> {
    let ii = second_fundamental_form(kind, metric, u, point, thr)?;
    Ok(ii[0][0] + ii[1][1])
}

/// L → ∞ mean curvature: X1(p̄) + X2(q̄). All four connections share this
/// limit, so no connection argument is taken.
pub fn mean_curvature_limit(u: &Expr, point: Point, thr: &Thresholds) -> Result<f64> {
    // The limit does not involve the metric; any valid L gives the same
    // frame symbols.
    let metric = MetricParam::new(1.0).expect("1 is a valid metric parameter");
    let sj = surface_jets(u, point, metric, thr)?;
    Ok(sj.horizontal_mean())
}

/// Finite-L Gauss curvature through the Gauss equation.
pub fn gauss_curvature(
    kind: ConnectionKind,
    metric: MetricParam,
    u: &Expr,
    point: Point,
    thr: &Thresholds,
) -> Result<ShapeOperatorReport> {
    let sj = surface_jets(u, point, metric, thr)?;
    Ok(gauss_from_jets(kind, &sj))
}

pub(crate) fn gauss_from_jets(kind: ConnectionKind, sj: &SurfaceJets) -> ShapeOperatorReport {
    let frame = sj.frame();
    let ii = ii_from_jets(kind, sj);
    let k_ambient = sectional(kind, sj.metric, frame.e1, frame.e2);
    let det = ii[0][0] * ii[1][1] - ii[0][1] * ii[1][0];
    ShapeOperatorReport {
        ii,
        mean: ii[0][0] + ii[1][1],
        k_ambient,
        k_surface: k_ambient + det,
    }
}

/// L → ∞ Gauss curvature. Defined for the two splitting connections and
/// the flat one; the Levi-Civita limit is a separate classical result that
/// this engine does not reimplement.
pub fn gauss_curvature_limit(
    kind: ConnectionKind,
    u: &Expr,
    point: Point,
    thr: &Thresholds,
) -> Result<f64> {
    let metric = MetricParam::new(1.0).expect("1 is a valid metric parameter");
    let sj = surface_jets(u, point, metric, thr)?;
    gauss_limit_from_jets(kind, &sj)
}

pub(crate) fn gauss_limit_from_jets(kind: ConnectionKind, sj: &SurfaceJets) -> Result<f64> {
    match kind {
        ConnectionKind::SvK1 => {
            let f = sj.u3 / sj.l;
            let pair = sj.e1_pair_horizontal_grad(f);
            let u3 = sj.u3.v;
            Ok(-0.5 * pair - u3 * u3 / (2.0 * sj.l.v * sj.l.v))
        }
        ConnectionKind::SvK2 => {
            let f = sj.u3 / sj.l;
            let pair = sj.e1_pair_horizontal_grad(f);
            let u3 = sj.u3.v;
            let m = sj.horizontal_mean();
            let qb = sj.qbar.v;
            Ok(
                -(sj.pbar.v * qb * u3) / (2.0 * sj.l.v) * m
                    - (qb * qb / 2.0) * (pair + u3 * u3 / (sj.l.v * sj.l.v)),
            )
        }
        ConnectionKind::Adapted => Ok(0.0),
        ConnectionKind::LeviCivita => Err(Error::UnsupportedConnection {
            kind,
            what: "the Gauss curvature limit",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thr() -> Thresholds {
        Thresholds::default()
    }

    fn m(l: f64) -> MetricParam {
        MetricParam::new(l).unwrap()
    }

    fn plane() -> Expr {
        expr::parse("x3").unwrap()
    }

    fn paraboloid() -> Expr {
        expr::parse("x3 - (x1^2 + x2^2)/2").unwrap()
    }

    #[test]
    fn plane_frame_at_unit_point() {
        for l in [1.0, 4.0, 100.0] {
            let f = surface_frame(&plane(), Point::new(1.0, 0.0, 0.0), m(l), &thr()).unwrap();
            assert!((f.p - 0.0).abs() < 1e-15);
            assert!((f.q - 0.5).abs() < 1e-15);
            assert!((f.l - 0.5).abs() < 1e-15);
            assert!((f.r - l.powf(-0.5)).abs() < 1e-15);
            assert!((f.pbar - 0.0).abs() < 1e-15);
            assert!((f.qbar - 1.0).abs() < 1e-15);
            assert_eq!(f.e1, FrameVector::new(1.0, 0.0, 0.0));
            let expected_e2_third = -(f.l / f.l_l) * l.powf(-0.5);
            assert!((f.e2.a3 - expected_e2_third).abs() < 1e-15);
        }
    }

    #[test]
    fn plane_origin_is_characteristic() {
        let err = surface_frame(&plane(), Point::new(0.0, 0.0, 0.0), m(1.0), &thr()).unwrap_err();
        assert!(matches!(err, Error::CharacteristicPoint { .. }));
    }

    #[test]
    fn vertical_translate_has_same_frame() {
        let shifted = expr::parse("x3 - 1").unwrap();
        let a = surface_frame(&plane(), Point::new(1.0, 0.0, 0.0), m(4.0), &thr()).unwrap();
        let b = surface_frame(&shifted, Point::new(1.0, 0.0, 1.0), m(4.0), &thr()).unwrap();
        assert_eq!(a.p, b.p);
        assert_eq!(a.q, b.q);
        assert_eq!(a.e2, b.e2);
    }

    #[test]
    fn off_surface_point_is_rejected() {
        let err = surface_frame(&plane(), Point::new(1.0, 0.0, 0.3), m(1.0), &thr()).unwrap_err();
        assert!(matches!(err, Error::OffSurface { .. }));
    }

    #[test]
    fn frame_is_orthonormal() {
        let u = paraboloid();
        let pts = [
            Point::new(1.0, 0.0, 0.5),
            Point::new(0.3, -0.8, (0.09 + 0.64) / 2.0),
            Point::new(-1.1, 0.4, (1.21 + 0.16) / 2.0),
        ];
        for l in [0.25, 1.0, 1e4] {
            for pt in pts {
                let f = surface_frame(&u, pt, m(l), &thr()).unwrap();
                let vecs = [f.v_l, f.e1, f.e2];
                for i in 0..3 {
                    for j in 0..3 {
                        let want = if i == j { 1.0 } else { 0.0 };
                        let got = vecs[i].dot_l(vecs[j], f.metric);
                        assert!(
                            (got - want).abs() < 1e-10,
                            "L={} ({}, {}): {}",
                            l,
                            i,
                            j,
                            got
                        );
                    }
                }
                assert!((f.pbar * f.pbar + f.qbar * f.qbar - 1.0).abs() < 1e-12);
                assert_eq!(f.e1.a3, 0.0);
            }
        }
    }

    #[test]
    fn plane_h11_vanishes() {
        let ii = second_fundamental_form(
            ConnectionKind::SvK1,
            m(4.0),
            &plane(),
            Point::new(1.0, 0.0, 0.0),
            &thr(),
        )
        .unwrap();
        assert!(ii[0][0].abs() < 1e-12, "h11 = {}", ii[0][0]);
    }

    #[test]
    fn closed_form_matches_definition_on_paraboloid() {
        let u = paraboloid();
        let pts = [
            Point::new(1.0, 0.0, 0.5),
            Point::new(0.4, 0.7, (0.16 + 0.49) / 2.0),
        ];
        for kind in ConnectionKind::ALL {
            for l in [0.3, 1.0, 25.0, 1e4] {
                for pt in pts {
                    let a = second_fundamental_form(kind, m(l), &u, pt, &thr()).unwrap();
                    let b =
                        second_fundamental_form_closed(kind, m(l), &u, pt, &thr()).unwrap();
                    for i in 0..2 {
                        for j in 0..2 {
                            assert!(
                                (a[i][j] - b[i][j]).abs() <= 1e-9 * (1.0 + b[i][j].abs()),
                                "{} L={} [{}][{}]: {} vs {}",
                                kind,
                                l,
                                i,
                                j,
                                a[i][j],
                                b[i][j]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn svk1_and_adapted_share_h11() {
        let u = paraboloid();
        let pt = Point::new(0.9, -0.2, (0.81 + 0.04) / 2.0);
        let l = m(7.0);
        let a = second_fundamental_form(ConnectionKind::SvK1, l, &u, pt, &thr()).unwrap();
        let b = second_fundamental_form(ConnectionKind::Adapted, l, &u, pt, &thr()).unwrap();
        assert!((a[0][0] - b[0][0]).abs() < 1e-12);
    }

    #[test]
    fn svk1_off_diagonal_defect() {
        // h12 − h21 for the first splitting connection is √L/2 (1 + r̄_L²).
        let u = paraboloid();
        let pt = Point::new(0.8, 0.5, (0.64 + 0.25) / 2.0);
        for l in [0.5, 2.0, 50.0] {
            let metric = m(l);
            let sj = surface_jets(&u, pt, metric, &thr()).unwrap();
            let ii = ii_from_jets(ConnectionKind::SvK1, &sj);
            let rbl = sj.rbar_l.v;
            let want = metric.sqrt_l() / 2.0 * (1.0 + rbl * rbl);
            assert!(
                ((ii[0][1] - ii[1][0]) - want).abs() < 1e-10 * (1.0 + want),
                "L = {}: {} vs {}",
                l,
                ii[0][1] - ii[1][0],
                want
            );
        }
    }

    #[test]
    fn levi_civita_ii_is_symmetric() {
        let u = paraboloid();
        let pt = Point::new(0.6, 0.3, (0.36 + 0.09) / 2.0);
        for l in [0.5, 1.0, 9.0] {
            let ii =
                second_fundamental_form(ConnectionKind::LeviCivita, m(l), &u, pt, &thr()).unwrap();
            assert!(
                (ii[0][1] - ii[1][0]).abs() < 1e-10 * (1.0 + ii[0][1].abs()),
                "L = {}: {:?}",
                l,
                ii
            );
        }
    }

    #[test]
    fn plane_mean_curvature_limit_is_zero() {
        for pt in [Point::new(1.0, 0.0, 0.0), Point::new(-0.3, 1.7, 0.0)] {
            let h = mean_curvature_limit(&plane(), pt, &thr()).unwrap();
            assert!(h.abs() < 1e-12, "{}", h);
        }
    }

    #[test]
    fn mean_curvature_approaches_limit_on_paraboloid() {
        let u = paraboloid();
        let pt = Point::new(1.0, 0.0, 0.5);
        let limit = mean_curvature_limit(&u, pt, &thr()).unwrap();
        for kind in ConnectionKind::ALL {
            let h = mean_curvature(kind, m(1e8), &u, pt, &thr()).unwrap();
            assert!(
                (h - limit).abs() <= 1e-3 * (1.0 + limit.abs()),
                "{}: {} vs {}",
                kind,
                h,
                limit
            );
        }
    }

    #[test]
    fn svk1_ambient_sectional_is_minus_half_l_rbar_sq() {
        let u = paraboloid();
        let pt = Point::new(0.5, -0.9, (0.25 + 0.81) / 2.0);
        for l in [0.5, 3.0, 1e3] {
            let metric = m(l);
            let sj = surface_jets(&u, pt, metric, &thr()).unwrap();
            let rep = gauss_from_jets(ConnectionKind::SvK1, &sj);
            let want = -(l / 2.0) * sj.rbar_l.v * sj.rbar_l.v;
            assert!(
                (rep.k_ambient - want).abs() < 1e-11 * (1.0 + want.abs()),
                "L = {}: {} vs {}",
                l,
                rep.k_ambient,
                want
            );
        }
    }

    #[test]
    fn flat_kinds_have_zero_ambient_term() {
        let u = plane();
        let pt = Point::new(1.0, 0.0, 0.0);
        for kind in [ConnectionKind::SvK2, ConnectionKind::Adapted] {
            let rep = gauss_curvature(kind, m(3.0), &u, pt, &thr()).unwrap();
            assert_eq!(rep.k_ambient, 0.0, "{}", kind);
        }
    }

    #[test]
    fn plane_gauss_limit_svk1_is_inverse_square_radius() {
        for (x1, x2) in [(1.0, 0.0), (0.6, 0.8), (0.3, -0.4)] {
            let rho2: f64 = x1 * x1 + x2 * x2;
            let k = gauss_curvature_limit(
                ConnectionKind::SvK1,
                &plane(),
                Point::new(x1, x2, 0.0),
                &thr(),
            )
            .unwrap();
            assert!(
                (k + 1.0 / rho2).abs() < 1e-12,
                "({}, {}): {}",
                x1,
                x2,
                k
            );
        }
    }

    #[test]
    fn plane_gauss_limit_svk2_at_unit_point() {
        let k = gauss_curvature_limit(
            ConnectionKind::SvK2,
            &plane(),
            Point::new(1.0, 0.0, 0.0),
            &thr(),
        )
        .unwrap();
        assert!((k + 1.0).abs() < 1e-12, "{}", k);
    }

    #[test]
    fn adapted_gauss_limit_is_zero() {
        let k = gauss_curvature_limit(
            ConnectionKind::Adapted,
            &paraboloid(),
            Point::new(1.0, 0.0, 0.5),
            &thr(),
        )
        .unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn levi_civita_gauss_limit_is_unsupported() {
        assert!(matches!(
            gauss_curvature_limit(
                ConnectionKind::LeviCivita,
                &plane(),
                Point::new(1.0, 0.0, 0.0),
                &thr()
            ),
            Err(Error::UnsupportedConnection { .. })
        ));
    }

    #[test]
    fn finite_l_gauss_approaches_limit_on_plane() {
        let pt = Point::new(1.0, 0.0, 0.0);
        let lim = gauss_curvature_limit(ConnectionKind::SvK1, &plane(), pt, &thr()).unwrap();
        let rep = gauss_curvature(ConnectionKind::SvK1, m(1e8), &plane(), pt, &thr()).unwrap();
        assert!(
            (rep.k_surface - lim).abs() <= 1e-3 * (1.0 + lim.abs()),
            "{} vs {}",
            rep.k_surface,
            lim
        );
    }
}
