use serde::{Deserialize, Serialize};

use super::PolygonConfig;
use crate::quat::linalg::numerical_rank;
use crate::quat::RMatrix;
use crate::scalar::Real;
use crate::vector::{self, Vec5};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyKind {
    /// Edges span 4 or 5 dimensions; trivial stabilizer in SO(5).
    Nondegenerate,
    /// Edges span 3 dimensions; stabilizer SO(2).
    Type2,
    /// Edges span a plane; stabilizer SO(3).
    Type3,
    /// All edges on one line.
    Linear,
}

impl DegeneracyKind {
    pub fn from_span_rank(rank: usize) -> Self {
        match rank {
            0 | 1 => DegeneracyKind::Linear,
            2 => DegeneracyKind::Type3,
            3 => DegeneracyKind::Type2,
            _ => DegeneracyKind::Nondegenerate,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DegeneracyKind::Nondegenerate => "nondegenerate",
            DegeneracyKind::Type2 => "type2",
            DegeneracyKind::Type3 => "type3",
            DegeneracyKind::Linear => "linear",
        }
    }
}

/// Neighbourhood model `R^trivial_factor_dim x cone`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalModel {
    pub trivial_factor_dim: usize,
    pub cone: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub span_rank: usize,
    pub kind: DegeneracyKind,
    pub local_model: LocalModel,
}

fn superscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

pub fn local_model(kind: DegeneracyKind, n: usize) -> LocalModel {
    let (dim, cone) = match kind {
        DegeneracyKind::Nondegenerate => ((4 * n).saturating_sub(15), "smooth".to_string()),
        DegeneracyKind::Type2 => (
            (2 * n).saturating_sub(6),
            format!("(R²){}/SO(2)", superscript(n.saturating_sub(4))),
        ),
        DegeneracyKind::Type3 => (
            n.saturating_sub(3),
            format!("(R³){}/SO(3)", superscript(n.saturating_sub(3))),
        ),
        DegeneracyKind::Linear => (0, "unmodeled (SO(4) stabilizer)".to_string()),
    };
    LocalModel {
        trivial_factor_dim: dim,
        cone,
    }
}

fn edge_matrix<T: Real>(p: &PolygonConfig<T>) -> RMatrix<T> {
    RMatrix::from_fn(5, p.n(), |i, j| p.edges()[j].coords()[i])
}

/// Numerical rank of the `5 x n` matrix of unit edges, relative to the
/// largest singular value.
pub fn span_rank<T: Real>(p: &PolygonConfig<T>, rank_tol: T) -> usize {
    numerical_rank(&edge_matrix(p), rank_tol)
}

pub fn classify<T: Real>(p: &PolygonConfig<T>, rank_tol: T) -> DegeneracyReport {
    let span_rank = span_rank(p, rank_tol);
    let kind = DegeneracyKind::from_span_rank(span_rank);
    DegeneracyReport {
        span_rank,
        kind,
        local_model: local_model(kind, p.n()),
    }
}

/// Greedy pivoted Gram-Schmidt: repeatedly takes the candidate with the
/// largest component orthogonal to the basis so far, stopping at `k` vectors
/// or when that component drops below `tol`.
fn pivoted_basis<T: Real>(cands: &[Vec5<T>], k: usize, tol: T) -> Vec<Vec5<T>> {
    let mut rest: Vec<Vec5<T>> = cands.to_vec();
    let mut basis: Vec<Vec5<T>> = Vec::new();
    while basis.len() < k {
        let Some((idx, n)) = rest
            .iter()
            .map(|v| vector::norm(v))
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        else {
            break;
        };
        if !(n > tol) {
            break;
        }
        let q = vector::scale(&rest[idx], n.recip());
        for v in rest.iter_mut() {
            *v = vector::axpy(v, -vector::dot(v, &q), &q);
        }
        basis.push(q);
    }
    basis
}

/// Orthonormal basis of the span of the edges.
pub fn span_basis<T: Real>(p: &PolygonConfig<T>, rank_tol: T) -> Vec<Vec5<T>> {
    let k = span_rank(p, rank_tol);
    let cands: Vec<Vec5<T>> = p.edges().iter().map(|u| *u.coords()).collect();
    pivoted_basis(&cands, k, rank_tol)
}

/// Orthonormal basis of `u^perp` inside `span(space)`; `space` orthonormal.
fn tangent_in<T: Real>(u: &Vec5<T>, space: &[Vec5<T>]) -> Vec<Vec5<T>> {
    let projected: Vec<Vec5<T>> = space
        .iter()
        .map(|b| vector::axpy(b, -vector::dot(b, u), u))
        .collect();
    pivoted_basis(&projected, space.len().saturating_sub(1), T::lit(1e-6))
}

fn jacobian_within<T: Real>(p: &PolygonConfig<T>, space: &[Vec5<T>]) -> RMatrix<T> {
    let mut cols: Vec<Vec5<T>> = Vec::new();
    for (u, &r) in p.edges().iter().zip(p.side_lengths()) {
        for t in tangent_in(u.coords(), space) {
            cols.push(vector::scale(&t, r));
        }
    }
    RMatrix::from_fn(5, cols.len(), |i, j| cols[j][i])
}

/// Differential of `U -> sum r_i u_i` on the product of spheres, as a
/// `5 x 4n` matrix in orthonormal tangent frames.
pub fn closure_jacobian<T: Real>(p: &PolygonConfig<T>) -> RMatrix<T> {
    let full: Vec<Vec5<T>> = (0..5).map(vector::basis).collect();
    jacobian_within(p, &full)
}

pub fn closure_jacobian_rank<T: Real>(p: &PolygonConfig<T>, rank_tol: T) -> usize {
    numerical_rank(&closure_jacobian(p), rank_tol)
}

/// Dimension of the stratum of polygons spanning a `k`-dimensional subspace
/// like `p`, modulo rotations of that subspace:
/// `n (k - 1) - rank(closure Jacobian within the span) - k (k - 1) / 2`.
///
/// Gives `4n - 15` for spatial polygons, `2n - 6` for 3-dimensional ones and
/// `n - 3` for planar ones.
pub fn stratum_dimension<T: Real>(p: &PolygonConfig<T>, rank_tol: T) -> usize {
    let space = span_basis(p, rank_tol);
    let k = space.len();
    if k == 0 {
        return 0;
    }
    let jac = jacobian_within(p, &space);
    let rho = if jac.cols() == 0 {
        0
    } else {
        numerical_rank(&jac, rank_tol)
    };
    (p.n() * (k - 1)).saturating_sub(rho + k * (k - 1) / 2)
}
