use serde::{Deserialize, Serialize};

/// Tolerances threaded through the pipelines. All must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum |sum r_i u_i| accepted as a closed polygon.
    pub closure: f64,
    /// Relative singular-value threshold for numerical rank.
    pub rank: f64,
    /// Residual target for the barycenter solver.
    pub solver: f64,
    /// Default absolute tolerance for scalar comparisons.
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            closure: 1e-10,
            rank: 1e-8,
            solver: 1e-12,
            equality: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("closure", self.closure),
            ("rank", self.rank),
            ("solver", self.solver),
            ("equality", self.equality),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance `{name}` must be positive, got {v}"));
            }
        }
        Ok(())
    }
}
