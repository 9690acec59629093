use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Invariants of `SO(2)` acting on pairs `(X, Y)` of plane vectors by
/// `(h X, h^{-1} Y)`:
///
/// `p1 = |X|^2`, `p2 = |Y|^2`, `p3 = x1 y1 - x2 y2`, `p4 = x2 y1 + x1 y2`.
///
/// `p3 + i p4` is the complex product `(x1 + i x2)(y1 + i y2)`, which gives the
/// relation `p1 p2 = p3^2 + p4^2`.
pub fn so2_invariants<T: Real>(x: [T; 2], y: [T; 2]) -> [T; 4] {
    [
        x[0] * x[0] + x[1] * x[1],
        y[0] * y[0] + y[1] * y[1],
        x[0] * y[0] - x[1] * y[1],
        x[1] * y[0] + x[0] * y[1],
    ]
}

/// A pair with the given invariants: `(sqrt(p1), 0)` and `(p3, p4) / sqrt(p1)`.
/// Requires `p1 > 0`.
pub fn so2_realize<T: Real>(p: [T; 4]) -> Option<([T; 2], [T; 2])> {
    if !(p[0] > T::zero()) {
        return None;
    }
    let s = p[0].sqrt();
    Some(([s, T::zero()], [p[2] / s, p[3] / s]))
}

/// Rotation invariants of a pair of vectors in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct So3Invariants<T> {
    pub xx: T,
    pub yy: T,
    pub xy: T,
    /// `|X x Y|^2`
    pub cross_sq: T,
}

impl<T: Real> So3Invariants<T> {
    /// `(X.Y)^2 + |X x Y|^2 - |X|^2 |Y|^2`, zero by the Lagrange identity.
    pub fn lagrange_defect(&self) -> T {
        self.xy * self.xy + self.cross_sq - self.xx * self.yy
    }
}

pub fn so3_invariants<T: Real>(x: [T; 3], y: [T; 3]) -> So3Invariants<T> {
    let c = [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ];
    So3Invariants {
        xx: x[0] * x[0] + x[1] * x[1] + x[2] * x[2],
        yy: y[0] * y[0] + y[1] * y[1] + y[2] * y[2],
        xy: x[0] * y[0] + x[1] * y[1] + x[2] * y[2],
        cross_sq: c[0] * c[0] + c[1] * c[1] + c[2] * c[2],
    }
}
