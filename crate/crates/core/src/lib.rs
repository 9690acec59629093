//! Closed polygons in R^5 and their quaternionic models.
//!
//! The crate is generic over the scalar type (`f32` or `f64`) through
//! [`Real`]; the aliases at the crate root fix it to `f64`.

// NaN inputs must fail the `!(x < tol)` style checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barycenter;
pub mod bridge;
pub mod error;
pub mod gt;
pub mod moebius;
pub mod polygon;
pub mod quat;
pub mod scalar;
pub mod tolerance;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub use barycenter::{BarycenterResult, WeightedConfiguration};
pub use bridge::{ComplexLineConfig, StabilityReport, Su4Configuration};
pub use gt::{GTPattern, GrassmannPoint, QuatHermitian};
pub use moebius::{BallPoint, HP1Point, HalfSpacePoint, S4Point, Sl2hElement};
pub use polygon::{DegeneracyKind, DegeneracyReport, PolygonConfig};

pub type Quat = quat::Quaternion<f64>;
pub type QuatMat = quat::QuatMatrix<f64>;
pub type CMat = quat::CMatrix<f64>;
pub type RMat = quat::RMatrix<f64>;
