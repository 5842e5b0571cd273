//! Second-order forward-mode jets in up to three variables.
//!
//! A [`Jet2`] carries a value together with its gradient and Hessian with
//! respect to the active variables. Arithmetic propagates derivatives through
//! the product, quotient and chain rules, so any composite expression
//! evaluated on jets yields exact first and second partials up to roundoff,
//! with no finite-difference step to tune.
//!
//! [`FieldJet`] is the first-order sibling: value plus coordinate gradient.
//! It carries quantities that are themselves built from derivatives of a
//! defining function (where one more differentiation is needed but a full
//! second-order jet is not available).

/// Index pairs of the packed symmetric Hessian, in storage order
/// (11, 12, 13, 22, 23, 33).
pub const HESS_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Packed index of Hessian entry (i, j).
const HESS_INDEX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];

/// Domain violation inside jet arithmetic; the expression evaluator attaches
/// the source span and evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetDomainError {
    pub func: &'static str,
    pub arg: f64,
}

type JetResult = Result<Jet2, JetDomainError>;

/// Value, gradient and Hessian of a scalar at a point.
///
/// The Hessian is stored as its six independent entries, which keeps it
/// exactly symmetric by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d: [f64; 3],
    pub h: [f64; 6],
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        v: 0.0,
        d: [0.0; 3],
        h: [0.0; 6],
    };

    pub fn constant(v: f64) -> Self {
        Jet2 {
            v,
            d: [0.0; 3],
            h: [0.0; 6],
        }
    }

    /// Seed an independent variable occupying `slot`.
    pub fn variable(v: f64, slot: usize) -> Self {
        let mut d = [0.0; 3];
        d[slot] = 1.0;
        Jet2 { v, d, h: [0.0; 6] }
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[HESS_INDEX[i][j]]
    }

    /// Hessian as a full symmetric 3×3 matrix.
    pub fn hess_matrix(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.hess(i, j);
            }
        }
        m
    }

    pub fn scale(self, k: f64) -> Self {
        Jet2 {
            v: self.v * k,
            d: self.d.map(|x| x * k),
            h: self.h.map(|x| x * k),
        }
    }

    /// Unary chain rule: given f(v), f'(v), f''(v) produce the jet of f∘self.
    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        let mut h = [0.0; 6];
        for (k, &(i, j)) in HESS_PAIRS.iter().enumerate() {
            h[k] = df * self.h[k] + ddf * self.d[i] * self.d[j];
        }
        Jet2 {
            v: f,
            d: self.d.map(|x| df * x),
            h,
        }
    }

    pub fn recip(self) -> JetResult {
        if self.v == 0.0 {
            return Err(JetDomainError {
                func: "recip",
                arg: 0.0,
            });
        }
        let c = 1.0 / self.v;
        Ok(self.chain(c, -c * c, 2.0 * c * c * c))
    }

    pub fn try_div(self, rhs: Jet2) -> JetResult {
        if rhs.v == 0.0 {
            return Err(JetDomainError {
                func: "divide",
                arg: 0.0,
            });
        }
        Ok(self * rhs.recip()?)
    }

    pub fn sin(self) -> Jet2 {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet2 {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(self) -> Jet2 {
        let t = self.v.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn exp(self) -> Jet2 {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> JetResult {
        if self.v <= 0.0 {
            return Err(JetDomainError {
                func: "log",
                arg: self.v,
            });
        }
        let inv = 1.0 / self.v;
        Ok(self.chain(self.v.ln(), inv, -inv * inv))
    }

    pub fn sqrt(self) -> JetResult {
        if self.v <= 0.0 {
            return Err(JetDomainError {
                func: "sqrt",
                arg: self.v,
            });
        }
        let s = self.v.sqrt();
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * self.v)))
    }

    pub fn sinh(self) -> Jet2 {
        let sh = self.v.sinh();
        self.chain(sh, self.v.cosh(), sh)
    }

    pub fn cosh(self) -> Jet2 {
        let ch = self.v.cosh();
        self.chain(ch, self.v.sinh(), ch)
    }

    pub fn atan(self) -> Jet2 {
        let w = 1.0 + self.v * self.v;
        self.chain(self.v.atan(), 1.0 / w, -2.0 * self.v / (w * w))
    }

    /// Absolute value; undefined (domain error) at zero, where the
    /// derivative does not exist.
    pub fn abs(self) -> JetResult {
        if self.v == 0.0 {
            return Err(JetDomainError {
                func: "abs",
                arg: 0.0,
            });
        }
        let s = self.v.signum();
        Ok(self.chain(self.v.abs(), s, 0.0))
    }

    /// Integer power by binary exponentiation (repeated multiplication), so
    /// integral exponents stay exact for negative and zero bases.
    pub fn powi(self, n: i32) -> JetResult {
        if n < 0 {
            return self.powi(-n)?.recip().map_err(|_| JetDomainError {
                func: "pow",
                arg: 0.0,
            });
        }
        let mut acc = Jet2::constant(1.0);
        let mut base = self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Ok(acc)
    }

    /// Real power; requires a strictly positive base.
    pub fn powf(self, b: f64) -> JetResult {
        if self.v <= 0.0 {
            return Err(JetDomainError {
                func: "pow",
                arg: self.v,
            });
        }
        let f = self.v.powf(b);
        let df = b * self.v.powf(b - 1.0);
        let ddf = b * (b - 1.0) * self.v.powf(b - 2.0);
        Ok(self.chain(f, df, ddf))
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl std::ops::Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut d = [0.0; 3];
        let mut h = [0.0; 6];
        for i in 0..3 {
            d[i] = self.d[i] + rhs.d[i];
        }
        for k in 0..6 {
            h[k] = self.h[k] + rhs.h[k];
        }
        Jet2 {
            v: self.v + rhs.v,
            d,
            h,
        }
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut d = [0.0; 3];
        for i in 0..3 {
            d[i] = self.d[i] * rhs.v + rhs.d[i] * self.v;
        }
        let mut h = [0.0; 6];
        for (k, &(i, j)) in HESS_PAIRS.iter().enumerate() {
            h[k] = self.h[k] * rhs.v
                + rhs.h[k] * self.v
                + self.d[i] * rhs.d[j]
                + self.d[j] * rhs.d[i];
        }
        Jet2 {
            v: self.v * rhs.v,
            d,
            h,
        }
    }
}

/// First-order jet of a scalar field: value plus coordinate gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub v: f64,
    pub g: [f64; 3],
}

impl FieldJet {
    pub fn constant(v: f64) -> Self {
        FieldJet { v, g: [0.0; 3] }
    }

    pub fn scale(self, k: f64) -> Self {
        FieldJet {
            v: self.v * k,
            g: self.g.map(|x| x * k),
        }
    }

    /// Square root; caller guarantees a strictly positive value.
    pub fn sqrt(self) -> Self {
        debug_assert!(self.v > 0.0);
        let s = self.v.sqrt();
        let k = 0.5 / s;
        FieldJet {
            v: s,
            g: self.g.map(|x| k * x),
        }
    }
}

impl std::ops::Neg for FieldJet {
    type Output = FieldJet;
    fn neg(self) -> FieldJet {
        self.scale(-1.0)
    }
}

impl std::ops::Add for FieldJet {
    type Output = FieldJet;
    fn add(self, rhs: FieldJet) -> FieldJet {
        FieldJet {
            v: self.v + rhs.v,
            g: [
                self.g[0] + rhs.g[0],
                self.g[1] + rhs.g[1],
                self.g[2] + rhs.g[2],
            ],
        }
    }
}

impl std::ops::Sub for FieldJet {
    type Output = FieldJet;
    fn sub(self, rhs: FieldJet) -> FieldJet {
        self + (-rhs)
    }
}

impl std::ops::Mul for FieldJet {
    type Output = FieldJet;
    fn mul(self, rhs: FieldJet) -> FieldJet {
        let mut g = [0.0; 3];
        for i in 0..3 {
            g[i] = self.g[i] * rhs.v + rhs.g[i] * self.v;
        }
        FieldJet {
            v: self.v * rhs.v,
            g,
        }
    }
}

impl std::ops::Div for FieldJet {
    type Output = FieldJet;
    fn div(self, rhs: FieldJet) -> FieldJet {
        debug_assert!(rhs.v != 0.0);
        let inv = 1.0 / rhs.v;
        let mut g = [0.0; 3];
        for i in 0..3 {
            g[i] = (self.g[i] - self.v * inv * rhs.g[i]) * inv;
        }
        FieldJet {
            v: self.v * inv,
            g,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: f64) -> Jet2 {
        Jet2::variable(v, 0)
    }
    fn y(v: f64) -> Jet2 {
        Jet2::variable(v, 1)
    }

    #[test]
    fn product_rule_holds_at_jet_level() {
        let a = x(1.3).sin() + y(0.7).exp();
        let b = x(1.3) * y(0.7) + Jet2::constant(2.0);
        let c = a * b;
        for i in 0..3 {
            let expect = a.v * b.d[i] + b.v * a.d[i];
            assert!((c.d[i] - expect).abs() <= 4.0 * f64::EPSILON * expect.abs().max(1.0));
        }
    }

    #[test]
    fn bilinear_product_jet() {
        // f = x*y at (2, 3): value 6, gradient (3, 2), mixed second partial 1.
        let f = x(2.0) * y(3.0);
        assert_eq!(f.v, 6.0);
        assert_eq!(f.d, [3.0, 2.0, 0.0]);
        assert_eq!(f.hess(0, 1), 1.0);
        assert_eq!(f.hess(0, 0), 0.0);
        assert_eq!(f.hess(1, 1), 0.0);
    }

    #[test]
    fn sin_jet_at_zero() {
        let f = x(0.0).sin();
        assert_eq!(f.v, 0.0);
        assert_eq!(f.d, [1.0, 0.0, 0.0]);
        assert_eq!(f.hess(0, 0), 0.0);
    }

    #[test]
    fn quotient_matches_closed_form() {
        // d/dx (x / (1 + x^2)) = (1 - x^2) / (1 + x^2)^2
        let v = 0.8;
        let f = x(v).try_div(x(v) * x(v) + Jet2::constant(1.0)).unwrap();
        let w = 1.0 + v * v;
        assert!((f.d[0] - (1.0 - v * v) / (w * w)).abs() < 1e-14);
    }

    #[test]
    fn integer_power_handles_negative_base() {
        let f = x(-2.0).powi(3).unwrap();
        assert_eq!(f.v, -8.0);
        assert_eq!(f.d[0], 12.0);
        assert_eq!(f.hess(0, 0), -12.0);
    }

    #[test]
    fn real_power_requires_positive_base() {
        assert!(x(-1.0).powf(0.5).is_err());
        let f = x(4.0).powf(0.5).unwrap();
        assert!((f.v - 2.0).abs() < 1e-15);
        assert!((f.d[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn abs_rejects_zero() {
        assert!(x(0.0).abs().is_err());
        let f = x(-3.0).abs().unwrap();
        assert_eq!(f.v, 3.0);
        assert_eq!(f.d[0], -1.0);
    }

    #[test]
    fn field_jet_quotient() {
        let a = FieldJet {
            v: 2.0,
            g: [1.0, 0.0, 0.0],
        };
        let b = FieldJet {
            v: 4.0,
            g: [0.0, 2.0, 0.0],
        };
        let q = a / b;
        assert_eq!(q.v, 0.5);
        assert_eq!(q.g, [0.25, -0.25, 0.0]);
    }
}
