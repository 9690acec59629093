//! Closed n-gons in R^5 with prescribed side lengths.
//!
//! A polygon is stored as side lengths `r_i` and unit edge directions `u_i`;
//! vertices are `v_1 = 0`, `v_{k+1} = v_k + r_k u_k`. Diagonals are numbered
//! from 1 as in `d_i = v_{i+2} - v_1`, `i = 1..=n-3`.

mod bending;
mod classify;
mod invariants;
mod sampler;
mod weights;

pub use bending::{
    angle_chart_dims, bend, canonical_planar, rotation_fixing, AngleChart, Rotation5,
};
pub use classify::{
    classify, closure_jacobian, closure_jacobian_rank, span_basis, span_rank, stratum_dimension,
    DegeneracyKind, DegeneracyReport, LocalModel,
};
pub use invariants::{so2_invariants, so2_realize, so3_invariants, So3Invariants};
pub use sampler::{sample_closed, SamplerOptions};
pub use weights::{check_weights, WeightCheck, MAX_EXHAUSTIVE_SIDES};

use serde::{Deserialize, Deserializer, Serialize};

use crate::barycenter::WeightedConfiguration;
use crate::error::{Error, Result};
use crate::moebius::S4Point;
use crate::scalar::Real;
use crate::vector::{self, Vec5};

/// Side lengths and unit edge directions of an n-gon in R^5.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct PolygonConfig<T> {
    r: Vec<T>,
    edges: Vec<S4Point<T>>,
}

impl<T: Real> PolygonConfig<T> {
    /// Side lengths must be positive and match the edge count. Closure is not
    /// required here; see [`PolygonConfig::check_closed`].
    pub fn new(r: Vec<T>, edges: Vec<S4Point<T>>) -> Result<Self> {
        if r.len() != edges.len() {
            return Err(Error::Dimension(format!(
                "{} side lengths for {} edges",
                r.len(),
                edges.len()
            )));
        }
        if let Some(x) = r.iter().find(|x| !(**x > T::zero()) || !x.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "side length {x} is not positive"
            )));
        }
        Ok(PolygonConfig { r, edges })
    }

    /// Builds the polygon through the given vertices (`v_1` first). The last
    /// edge closes back to `v_1`.
    pub fn from_vertices(vertices: &[Vec5<T>]) -> Result<Self> {
        let n = vertices.len();
        let mut r = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(n);
        for k in 0..n {
            let e = vector::sub(&vertices[(k + 1) % n], &vertices[k]);
            r.push(vector::norm(&e));
            edges.push(S4Point::new(e)?);
        }
        Self::new(r, edges)
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn side_lengths(&self) -> &[T] {
        &self.r
    }

    pub fn edges(&self) -> &[S4Point<T>] {
        &self.edges
    }

    /// `v_1 .. v_n`, with `v_1 = 0`.
    pub fn vertices(&self) -> Vec<Vec5<T>> {
        let mut out = Vec::with_capacity(self.n());
        let mut v = vector::zero();
        for (u, &r) in self.edges.iter().zip(&self.r) {
            out.push(v);
            v = vector::axpy(&v, r, u.coords());
        }
        out
    }

    /// `sum r_i u_i`
    pub fn closure_vector(&self) -> Vec5<T> {
        self.edges
            .iter()
            .zip(&self.r)
            .fold(vector::zero(), |acc, (u, &r)| {
                vector::axpy(&acc, r, u.coords())
            })
    }

    pub fn closure_residual(&self) -> T {
        vector::norm(&self.closure_vector())
    }

    pub fn check_closed(&self, tol: T) -> Result<()> {
        let res = self.closure_residual();
        if res < tol {
            Ok(())
        } else {
            Err(Error::ClosureViolation {
                residual: res.as_f64(),
            })
        }
    }

    /// Edge directions as a weighted configuration on S^4.
    pub fn to_configuration(&self) -> WeightedConfiguration<T> {
        WeightedConfiguration::new(self.r.clone(), self.edges.clone())
            .expect("side lengths are positive and match the edges")
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for PolygonConfig<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
        struct Raw<T> {
            r: Vec<T>,
            edges: Vec<S4Point<T>>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        Self::new(raw.r, raw.edges).map_err(serde::de::Error::custom)
    }
}

/// The `n - 3` diagonals `d_i = v_{i+2} - v_1` and their lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct DiagonalData<T> {
    pub diagonals: Vec<Vec5<T>>,
    pub lengths: Vec<T>,
}

pub fn diagonal_lengths<T: Real>(p: &PolygonConfig<T>) -> DiagonalData<T> {
    let n = p.n();
    let count = n.saturating_sub(3);
    let mut diagonals = Vec::with_capacity(count);
    let mut acc = vector::zero();
    for k in 0..(count + 1) {
        acc = vector::axpy(&acc, p.r[k], p.edges[k].coords());
        if k >= 1 {
            diagonals.push(acc);
        }
    }
    let lengths = diagonals.iter().map(|d| vector::norm(d)).collect();
    DiagonalData { diagonals, lengths }
}
