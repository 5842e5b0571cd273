//! Numeric thresholds used by classification and validity checks.

/// Tunable tolerances. The defaults are what the test suite and CLI use;
/// scene files may override the quadrature tolerances.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    /// A curve point is rejected as non-regular when |dγ/dt| falls below this.
    pub eps_regular: f64,
    /// Horizontality threshold factor: a velocity is treated as horizontal
    /// when |ω(γ̇)| ≤ eps_horizontal_factor · (1 + |γ̇|).
    pub eps_horizontal_factor: f64,
    /// Width of the marginal-classification band, as a multiple of the
    /// horizontality threshold.
    pub marginal_band: f64,
    /// Characteristic-point threshold factor: relative to 1 + |∇u|.
    pub eps_characteristic_factor: f64,
    /// On-surface threshold factor: relative to 1 + |∇u|.
    pub eps_on_surface_factor: f64,
    /// Tangency tolerance for curves that claim to lie on a surface.
    pub eps_tangency: f64,
    /// Radicand clamp for curvature square roots, relative to the magnitude
    /// of the two competing terms.
    pub radicand_clamp: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            eps_regular: 1e-12,
            eps_horizontal_factor: 1e-9,
            marginal_band: 1e3,
            eps_characteristic_factor: 1e-8,
            eps_on_surface_factor: 1e-8,
            eps_tangency: 1e-8,
            radicand_clamp: 1e-12,
        }
    }
}

impl Thresholds {
    /// Horizontality threshold for a velocity of the given Euclidean norm.
    pub fn horizontal(&self, speed: f64) -> f64 {
        self.eps_horizontal_factor * (1.0 + speed)
    }

    /// Characteristic threshold for a surface with the given Euclidean
    /// gradient norm.
    pub fn characteristic(&self, grad_norm: f64) -> f64 {
        self.eps_characteristic_factor * (1.0 + grad_norm)
    }

    /// On-surface threshold for the given gradient norm.
    pub fn on_surface(&self, grad_norm: f64) -> f64 {
        self.eps_on_surface_factor * (1.0 + grad_norm)
    }
}
