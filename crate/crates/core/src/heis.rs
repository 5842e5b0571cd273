//! The Heisenberg group: left-invariant frame, contact form and metric family.
//!
//! The group is R³ with coordinates (x1, x2, x3). The left-invariant frame is
//!
//! ```text
//! X1 = ∂x1 − (x2/2) ∂x3,   X2 = ∂x2 + (x1/2) ∂x3,   X3 = ∂x3,
//! ```
//!
//! with the single nonzero bracket [X1, X2] = X3. The contact form is
//! ω = dx3 + (x2 dx1 − x1 dx2)/2, so ω(v) is exactly the X3-coefficient of a
//! tangent vector expressed in the frame. For a parameter L > 0 the metric
//! g_L makes {X1, X2, L^{-1/2} X3} orthonormal; sub-Riemannian quantities
//! arise as L → ∞ limits.
//!
//! Every tangent vector crosses module boundaries as a [`FrameVector`]
//! (coefficients on {X1, X2, X3}); conversion from coordinate components
//! happens once, at ingestion.
//!
//! The group law (a,b,c) ★ (x,y,z) = (a+x, b+y, c+z−(xb−ya)/2) is recorded
//! here for reference only; nothing in the engine depends on it.

use crate::error::{Error, Result};

/// A point of the group in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }
}

/// A tangent vector as coefficients on the left-invariant frame
/// {X1, X2, X3}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
    };

    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        FrameVector { a1, a2, a3 }
    }

    /// The i-th frame basis vector, i ∈ {0, 1, 2}.
    pub fn basis(i: usize) -> Self {
        let mut v = FrameVector::ZERO;
        *v.component_mut(i) = 1.0;
        v
    }

    pub fn component(&self, i: usize) -> f64 {
        match i {
            0 => self.a1,
            1 => self.a2,
            _ => self.a3,
        }
    }

    pub fn component_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.a1,
            1 => &mut self.a2,
            _ => &mut self.a3,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        FrameVector::new(self.a1 * k, self.a2 * k, self.a3 * k)
    }

    /// g_L inner product: ⟨X1,X1⟩ = ⟨X2,X2⟩ = 1, ⟨X3,X3⟩ = L.
    pub fn dot_l(self, other: FrameVector, metric: MetricParam) -> f64 {
        self.a1 * other.a1 + self.a2 * other.a2 + metric.l() * self.a3 * other.a3
    }

    pub fn norm_sq_l(self, metric: MetricParam) -> f64 {
        self.dot_l(self, metric)
    }

    pub fn norm_l(self, metric: MetricParam) -> f64 {
        self.norm_sq_l(metric).sqrt()
    }

    /// Euclidean norm of the coefficient triple; used for scale-relative
    /// thresholds, not for geometry.
    pub fn coeff_norm(self) -> f64 {
        (self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3).sqrt()
    }
}

impl std::ops::Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3)
    }
}

impl std::ops::Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3)
    }
}

impl std::ops::Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        self.scale(-1.0)
    }
}

/// The metric parameter L > 0 of the family g_L.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MetricParam(f64);

impl MetricParam {
    pub fn new(l: f64) -> Result<Self> {
        if l.is_finite() && l > 0.0 {
            Ok(MetricParam(l))
        } else {
            Err(Error::MetricParam { value: l })
        }
    }

    pub fn l(self) -> f64 {
        self.0
    }

    pub fn sqrt_l(self) -> f64 {
        self.0.sqrt()
    }

    /// Coefficient turning an X̃3 = L^{-1/2} X3 component into an X3
    /// component.
    pub fn inv_sqrt_l(self) -> f64 {
        1.0 / self.0.sqrt()
    }
}

/// Value of the contact form on a coordinate tangent vector at `p`.
pub fn omega(p: Point, v: [f64; 3]) -> f64 {
    v[2] + 0.5 * (p.x2 * v[0] - p.x1 * v[1])
}

/// Express a coordinate tangent vector in the left-invariant frame. The X3
/// coefficient is exactly ω(v) at p.
pub fn frame_from_coordinate(p: Point, v: [f64; 3]) -> FrameVector {
    FrameVector::new(v[0], v[1], omega(p, v))
}

/// Inverse of [`frame_from_coordinate`].
pub fn coordinate_from_frame(p: Point, fv: FrameVector) -> [f64; 3] {
    [
        fv.a1,
        fv.a2,
        fv.a3 - 0.5 * (p.x2 * fv.a1 - p.x1 * fv.a2),
    ]
}

/// d/dt of t ↦ ω(γ̇(t)). The velocity cross terms cancel, leaving
/// γ̈3 + (γ2 γ̈1 − γ1 γ̈2)/2.
pub fn omega_dot(p: Point, acc: [f64; 3]) -> f64 {
    acc[2] + 0.5 * (p.x2 * acc[0] - p.x1 * acc[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_equals_coordinate_at_origin() {
        let p = Point::new(0.0, 0.0, 0.0);
        let fv = frame_from_coordinate(p, [1.0, 0.0, 0.0]);
        assert_eq!(fv, FrameVector::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn frame_conversion_off_origin() {
        let fv = frame_from_coordinate(Point::new(1.0, 0.0, 0.0), [0.0, 1.0, 0.0]);
        assert_eq!(fv, FrameVector::new(0.0, 1.0, -0.5));
        let fv = frame_from_coordinate(Point::new(0.0, 1.0, 0.0), [1.0, 0.0, 0.0]);
        assert_eq!(fv, FrameVector::new(1.0, 0.0, 0.5));
    }

    #[test]
    fn frame_third_component_is_omega() {
        let p = Point::new(0.3, -1.8, 2.2);
        let v = [0.7, 0.4, -0.9];
        assert_eq!(frame_from_coordinate(p, v).a3, omega(p, v));
    }

    #[test]
    fn coordinate_round_trip() {
        let p = Point::new(-0.4, 1.1, 0.2);
        let v = [0.5, -0.25, 2.0];
        let back = coordinate_from_frame(p, frame_from_coordinate(p, v));
        for i in 0..3 {
            assert!((back[i] - v[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn omega_on_horizontal_line_vanishes() {
        for t in [0.0, 0.5, 2.0] {
            let p = Point::new(t, 0.0, 0.0);
            assert_eq!(omega(p, [1.0, 0.0, 0.0]), 0.0);
        }
    }

    #[test]
    fn omega_on_unit_circle_is_minus_half() {
        for t in [0.0f64, 0.7, 2.1, 4.9] {
            let p = Point::new(t.cos(), t.sin(), 0.0);
            let v = [-t.sin(), t.cos(), 0.0];
            assert!((omega(p, v) + 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn omega_on_lifted_parabola_is_t() {
        for t in [0.0, 0.3, -1.2] {
            let p = Point::new(t, 0.0, t * t / 2.0);
            let v = [1.0, 0.0, t];
            assert!((omega(p, v) - t).abs() < 1e-15);
        }
    }

    #[test]
    fn metric_inner_products() {
        let l4 = MetricParam::new(4.0).unwrap();
        let x3 = FrameVector::new(0.0, 0.0, 1.0);
        assert_eq!(x3.dot_l(x3, l4), 4.0);
        let x1 = FrameVector::new(1.0, 0.0, 0.0);
        let x2 = FrameVector::new(0.0, 1.0, 0.0);
        assert_eq!(x1.dot_l(x2, l4), 0.0);
        let l1 = MetricParam::new(1.0).unwrap();
        let ones = FrameVector::new(1.0, 1.0, 1.0);
        assert_eq!(ones.dot_l(ones, l1), 3.0);
    }

    #[test]
    fn normalized_vertical_vector_has_unit_norm() {
        let mut l = 1.0;
        while l <= 1e8 {
            let m = MetricParam::new(l).unwrap();
            let v = FrameVector::new(0.0, 0.0, m.inv_sqrt_l());
            assert!((v.norm_l(m) - 1.0).abs() < 1e-12, "L = {}", l);
            l *= 10.0;
        }
    }

    #[test]
    fn metric_param_rejects_nonpositive() {
        assert!(MetricParam::new(0.0).is_err());
        assert!(MetricParam::new(-1.0).is_err());
        assert!(MetricParam::new(f64::NAN).is_err());
    }
}
