//! Numerical engine for curvature in the Heisenberg group under the
//! Riemannian approximation scheme: curve curvature, geodesic curvature of
//! curves on surfaces, second fundamental forms and Gauss curvature for
//! four affine connections, their L → ∞ limits, and numeric verification of
//! the associated Gauss-Bonnet identities.
//!
//! Module map:
//!
//! * [`expr`] — expression parser and second-order jet evaluator.
//! * [`jet`] — forward-mode jet arithmetic.
//! * [`heis`] — the group frame, contact form and metric family.
//! * [`connection`] — coefficient tables and curvature tensors.
//! * [`curve`] — ambient curve curvature and its limits.
//! * [`surface`] — surface frames, second fundamental forms, Gauss
//!   curvature and limits.
//! * [`surface_curve`] — geodesic curvature of curves on surfaces.
//! * [`quad`] — adaptive Gauss-Kronrod quadrature.
//! * [`gb`] — scenes, limit measures and Gauss-Bonnet residuals.
//! * [`scene`] — the scene file format.
//! * [`verify`] — the seeded property suite behind `verify`.

pub mod connection;
pub mod curve;
pub mod error;
pub mod expr;
pub mod gb;
pub mod heis;
pub mod jet;
pub mod quad;
pub mod scene;
pub mod surface;
pub mod surface_curve;
pub mod tol;
pub mod verify;

pub use connection::ConnectionKind;
pub use error::{Error, ErrorCategory, Result};
pub use heis::{FrameVector, MetricParam, Point};
pub use surface_curve::Orientation;
pub use tol::Thresholds;
