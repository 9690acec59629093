//! The real structure `theta` on complex matrices and on lines in CP^3, the
//! map from closed polygons to sums of matrices in su(4)*, and the weighted
//! stability test for configurations of lines in CP^3.
//!
//! `J = [[0, I], [-I, 0]]` pairs coordinate `k` with `k + n` of C^(2n), the
//! pairing under which the image of `nu` is exactly the fixed locus of
//! `theta(C) = -J conj(C) J`.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::gt::edge_to_block;
use crate::moebius::HP1Point;
use crate::polygon::PolygonConfig;
use crate::quat::linalg::{
    hermitian_eigen, hermitian_eigenvalues, normalized_det, orthonormal_columns,
};
use crate::quat::{gaussian, CMatrix, QuatMatrix};
use crate::scalar::Real;
use crate::vector;

/// Two lines meet when `|det [L1 | L2]|` of their orthonormal bases is below this.
pub const INTERSECTION_TOL: f64 = 1e-10;
/// Incidence of computed points, lines and planes (sine of principal angles).
pub const INCIDENCE_TOL: f64 = 1e-8;
/// Slack in the weight inequalities.
pub const WEIGHT_TOL: f64 = 1e-12;

fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `J v` for `v` in C^(2n).
fn apply_j<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = v.len() / 2;
    (0..2 * n)
        .map(|k| if k < n { v[k + n] } else { -v[k - n] })
        .collect()
}

/// `theta(C) = -J conj(C) J`.
pub fn theta_matrix<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !m.is_square() || !m.rows().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "theta needs an even square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows() / 2;
    // Blockwise: [[P, Q], [R, S]] -> [[conj S, -conj R], [-conj Q, conj P]].
    Ok(CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ii, jj) = (i % n, j % n);
        let src = m[((1 - bi) * n + ii, (1 - bj) * n + jj)].conj();
        if bi == bj {
            src
        } else {
            -src
        }
    }))
}

/// `|theta(C) - C|_F`
pub fn theta_defect<T: Real>(m: &CMatrix<T>) -> Result<T> {
    Ok((&theta_matrix(m)? - m).frobenius())
}

fn check_line<T: Real>(l: &CMatrix<T>) -> Result<CMatrix<T>> {
    if l.rows() != 4 || l.cols() != 2 {
        return Err(Error::Dimension(format!(
            "a line in CP^3 is a 4x2 matrix, got {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    let q = orthonormal_columns(l, T::lit(1e-10));
    if q.cols() != 2 {
        return Err(Error::RankDeficient { expected: 2 });
    }
    Ok(q)
}

/// Basis `J conj(L)` of the image of the 2-plane spanned by `L`.
pub fn theta_grassmann<T: Real>(l: &CMatrix<T>) -> Result<CMatrix<T>> {
    check_line(l)?;
    let cols: Vec<Vec<Complex<T>>> = (0..2)
        .map(|j| apply_j(&l.column(j).iter().map(|z| z.conj()).collect::<Vec<_>>()))
        .collect();
    Ok(CMatrix::from_fn(4, 2, |i, j| cols[j][i]))
}

/// Largest sine of the principal angles between two subspaces of equal
/// dimension, each given by spanning columns.
pub fn span_distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let qa = orthonormal_columns(a, T::lit(1e-12));
    let qb = orthonormal_columns(b, T::lit(1e-12));
    if qa.cols() != qb.cols() {
        return T::one();
    }
    residual_outside(&qa, &qb).max(residual_outside(&qb, &qa))
}

/// `max_j |(I - Q Q*) x_j|` over unit columns `x_j` of `x`; `q` orthonormal.
fn residual_outside<T: Real>(q: &CMatrix<T>, x: &CMatrix<T>) -> T {
    let proj = &(q * &q.adjoint()) * x;
    let diff = x - &proj;
    (0..x.cols())
        .map(|j| {
            let num = diff
                .column(j)
                .iter()
                .fold(T::zero(), |a, z| a + z.norm_sqr());
            let den = x.column(j).iter().fold(T::zero(), |a, z| a + z.norm_sqr());
            if den > T::zero() {
                (num / den).sqrt()
            } else {
                T::zero()
            }
        })
        .fold(T::zero(), T::max)
}

/// The theta-fixed line `nu((q1, q2)^t)` in C^4 of a point of HP^1.
pub fn hp1_line<T: Real>(p: &HP1Point<T>) -> CMatrix<T> {
    QuatMatrix::from_fn(2, 1, |i, _| if i == 0 { p.q1() } else { p.q2() }).nu()
}

/// Sum of matrices `A_i` in the coadjoint orbit of `diag(r_i, -r_i, r_i, -r_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct Su4Configuration<T: Real> {
    pub weights: Vec<T>,
    pub matrices: Vec<CMatrix<T>>,
}

/// Residuals of the defining properties of an [`Su4Configuration`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su4Residuals {
    /// `|sum A_i|_F`
    pub sum: f64,
    /// Largest eigenvalue error against `(r, r, -r, -r)`.
    pub spectrum: f64,
    /// Largest `|theta(A_i) - A_i|_F`.
    pub theta: f64,
    /// Largest `|A_i - A_i^*|_F`.
    pub hermitian: f64,
}

impl<T: Real> Su4Configuration<T> {
    pub fn residuals(&self) -> Result<Su4Residuals> {
        let mut sum = CMatrix::<T>::zeros(4, 4);
        let (mut spectrum, mut theta, mut hermitian) = (T::zero(), T::zero(), T::zero());
        for (a, &r) in self.matrices.iter().zip(&self.weights) {
            sum = &sum + a;
            let ev = hermitian_eigenvalues(a)?;
            let want = [r, r, -r, -r];
            for (x, y) in ev.iter().zip(want) {
                spectrum = spectrum.max((*x - y).abs());
            }
            theta = theta.max(theta_defect(a)?);
            hermitian = hermitian.max(a.hermitian_defect());
        }
        Ok(Su4Residuals {
            sum: sum.frobenius().as_f64(),
            spectrum: spectrum.as_f64(),
            theta: theta.as_f64(),
            hermitian: hermitian.as_f64(),
        })
    }
}

/// `A_i = nu(B_i)` with `B_i` the traceless quaternionic Hermitian block of
/// the edge vector `r_i u_i`. Requires closure to `closure_tol`.
pub fn psi_map<T: Real>(p: &PolygonConfig<T>, closure_tol: T) -> Result<Su4Configuration<T>> {
    p.check_closed(closure_tol)?;
    let matrices = p
        .edges()
        .iter()
        .zip(p.side_lengths())
        .map(|(u, &r)| edge_to_block(&vector::scale(u.coords(), r)).nu())
        .collect();
    Ok(Su4Configuration {
        weights: p.side_lengths().to_vec(),
        matrices,
    })
}

/// Weighted lines in CP^3, each a rank-2 `4 x 2` complex matrix. Weights are
/// rescaled to sum to 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct ComplexLineConfig<T: Real> {
    weights: Vec<T>,
    lines: Vec<CMatrix<T>>,
}

impl<T: Real> ComplexLineConfig<T> {
    pub fn new(weights: Vec<T>, lines: Vec<CMatrix<T>>) -> Result<Self> {
        if weights.len() != lines.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} lines",
                weights.len(),
                lines.len()
            )));
        }
        if lines.is_empty() {
            return Err(Error::InvalidWeights("no lines".into()));
        }
        if let Some(w) = weights
            .iter()
            .find(|w| !(**w > T::zero()) || !w.is_finite())
        {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        for l in &lines {
            check_line(l)?;
        }
        let total = weights.iter().fold(T::zero(), |a, &w| a + w);
        let two = T::lit(2.0);
        let weights = if (total - two).abs() <= T::epsilon() * T::lit(8.0) {
            weights
        } else {
            weights.into_iter().map(|w| two * w / total).collect()
        };
        Ok(ComplexLineConfig { weights, lines })
    }

    /// Lines with standard normal complex entries.
    pub fn random<R: Rng + ?Sized>(weights: Vec<T>, rng: &mut R) -> Result<Self> {
        let lines = (0..weights.len())
            .map(|_| random_cmatrix(4, 2, rng))
            .collect();
        Self::new(weights, lines)
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn lines(&self) -> &[CMatrix<T>] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Applies `g` to every line.
    pub fn transform(&self, g: &CMatrix<T>) -> Result<Self> {
        let lines = self
            .lines
            .iter()
            .map(|l| g.checked_mul(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.weights.clone(), lines)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for ComplexLineConfig<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
        struct Raw<T: Real> {
            weights: Vec<T>,
            lines: Vec<CMatrix<T>>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        Self::new(raw.weights, raw.lines).map_err(serde::de::Error::custom)
    }
}

/// Matrix with i.i.d. standard complex normal entries.
pub fn random_cmatrix<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(gaussian(rng), gaussian(rng))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityCondition {
    /// Lines through a point: weight `< 1`.
    Point,
    /// Lines meeting a line, plus twice those equal to it: weight `< 2`.
    Line,
    /// Lines inside a plane: weight `< 1`.
    Plane,
}

impl StabilityCondition {
    pub fn bound(self) -> f64 {
        match self {
            StabilityCondition::Line => 2.0,
            _ => 1.0,
        }
    }
}

/// A point, line or plane at which the strict inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct Witness<T: Real> {
    pub condition: StabilityCondition,
    /// Orthonormal basis of the witness subspace of C^4.
    pub subspace: CMatrix<T>,
    /// Indices of the lines counted (coincident lines counted twice for lines).
    pub lines: Vec<usize>,
    pub weight: f64,
    pub bound: f64,
    /// The non-strict inequality fails too.
    pub breaks_semistability: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct StabilityReport<T: Real> {
    /// Stable relative to the candidate set.
    pub stable: bool,
    /// Semistable relative to the candidate set.
    pub semistable: bool,
    pub witnesses: Vec<Witness<T>>,
    pub candidates: CandidateCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCounts {
    pub points: usize,
    pub lines: usize,
    pub planes: usize,
}

struct Incidence<T: Real> {
    bases: Vec<CMatrix<T>>,
    weights: Vec<T>,
}

impl<T: Real> Incidence<T> {
    fn meets(&self, i: usize, l: &CMatrix<T>) -> bool {
        let m = self.bases[i].hstack(l).expect("both have 4 rows");
        normalized_det(&m)
            .map(|d| d < T::lit(INTERSECTION_TOL))
            .unwrap_or(false)
    }

    fn same(&self, i: usize, l: &CMatrix<T>) -> bool {
        residual_outside(l, &self.bases[i]) < T::lit(INCIDENCE_TOL)
    }

    fn contains_point(&self, i: usize, p: &CMatrix<T>) -> bool {
        residual_outside(&self.bases[i], p) < T::lit(INCIDENCE_TOL)
    }

    fn inside(&self, i: usize, plane: &CMatrix<T>) -> bool {
        residual_outside(plane, &self.bases[i]) < T::lit(INCIDENCE_TOL)
    }

    fn point_weight(&self, p: &CMatrix<T>) -> (T, Vec<usize>) {
        let idx: Vec<usize> = (0..self.bases.len())
            .filter(|&i| self.contains_point(i, p))
            .collect();
        (self.sum(&idx), idx)
    }

    fn line_weight(&self, l: &CMatrix<T>) -> (T, Vec<usize>) {
        let mut idx = Vec::new();
        let mut w = T::zero();
        for i in 0..self.bases.len() {
            if self.same(i, l) {
                w += self.weights[i] + self.weights[i];
                idx.push(i);
            } else if self.meets(i, l) {
                w += self.weights[i];
                idx.push(i);
            }
        }
        (w, idx)
    }

    fn plane_weight(&self, plane: &CMatrix<T>) -> (T, Vec<usize>) {
        let idx: Vec<usize> = (0..self.bases.len())
            .filter(|&i| self.inside(i, plane))
            .collect();
        (self.sum(&idx), idx)
    }

    fn sum(&self, idx: &[usize]) -> T {
        idx.iter().fold(T::zero(), |a, &i| a + self.weights[i])
    }
}

/// Unit vector spanning the (numerically) one-dimensional kernel of `a`,
/// taken as the eigenvector of `a* a` with the smallest eigenvalue.
fn kernel_vector<T: Real>(a: &CMatrix<T>) -> Result<Vec<Complex<T>>> {
    let eig = hermitian_eigen(&(&a.adjoint() * a))?;
    let k = eig.values.len() - 1;
    Ok(eig.vectors.column(k))
}

/// Eigenvectors of `a* a` whose eigenvalues fall below `(tol * sigma_max)^2`,
/// at least `min` of them.
fn kernel<T: Real>(a: &CMatrix<T>, tol: T, min: usize) -> Result<CMatrix<T>> {
    let eig = hermitian_eigen(&(&a.adjoint() * a))?;
    let top = eig.values[0].max(T::zero());
    let n = eig.values.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&k| eig.values[k] <= tol * tol * top)
        .collect();
    if idx.len() < min {
        idx = (n - min..n).collect();
    }
    Ok(CMatrix::from_fn(a.cols(), idx.len(), |i, j| {
        eig.vectors[(i, idx[j])]
    }))
}

fn column<T: Real>(v: &[Complex<T>]) -> CMatrix<T> {
    CMatrix::from_fn(v.len(), 1, |i, _| v[i])
}

/// Intersection point of two meeting lines (orthonormal bases).
fn intersection_point<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let stacked = a.hstack(&-b)?;
    let v = kernel_vector(&stacked)?;
    let p = a.apply(&v[..2]);
    Ok(orthonormal_columns(&column(&p), T::lit(1e-12)))
}

/// Plucker coordinates `p_ij = u_i v_j - u_j v_i` in the order 12, 13, 14, 23, 24, 34.
pub fn plucker<T: Real>(l: &CMatrix<T>) -> [Complex<T>; 6] {
    let (u, v) = (l.column(0), l.column(1));
    let p = |i: usize, j: usize| u[i] * v[j] - u[j] * v[i];
    [p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(1, 3), p(2, 3)]
}

/// Bilinear form whose vanishing on two Plucker vectors means the lines meet.
pub fn plucker_pairing<T: Real>(x: &[Complex<T>; 6], p: &[Complex<T>; 6]) -> Complex<T> {
    x[0] * p[5] - x[1] * p[4] + x[2] * p[3] + x[3] * p[2] - x[4] * p[1] + x[5] * p[0]
}

/// Line with Plucker vector `x` (assumed on the Klein quadric): the column
/// space of the antisymmetric matrix `X_ij = x_ij`.
fn line_from_plucker<T: Real>(x: &[Complex<T>; 6]) -> Option<CMatrix<T>> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut m = CMatrix::<T>::zeros(4, 4);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        m[(i, j)] = x[k];
        m[(j, i)] = -x[k];
    }
    let q = orthonormal_columns(&m, T::lit(1e-6));
    (q.cols() == 2).then_some(q)
}

/// Common transversals of four lines: Plucker vectors orthogonal to all four
/// under [`plucker_pairing`] and lying on the Klein quadric.
pub fn transversals<T: Real>(lines: [&CMatrix<T>; 4]) -> Result<Vec<CMatrix<T>>> {
    let rows: Vec<[Complex<T>; 6]> = lines
        .iter()
        .map(|l| {
            let p = plucker(l);
            [p[5], -p[4], p[3], p[2], -p[1], p[0]]
        })
        .collect();
    let a = CMatrix::from_fn(4, 6, |i, j| rows[i][j]);
    let k = kernel(&a, T::lit(1e-9), 2)?;
    if k.cols() != 2 {
        return Ok(Vec::new());
    }
    let k1: [Complex<T>; 6] = std::array::from_fn(|i| k[(i, 0)]);
    let k2: [Complex<T>; 6] = std::array::from_fn(|i| k[(i, 1)]);
    let half = c(T::lit(0.5));
    let qa = plucker_pairing(&k1, &k1) * half;
    let qb = plucker_pairing(&k1, &k2);
    let qc = plucker_pairing(&k2, &k2) * half;
    // qa s^2 + qb s t + qc t^2 = 0
    let mut params: Vec<(Complex<T>, Complex<T>)> = Vec::new();
    let tiny = T::lit(1e-12);
    if qa.norm() <= tiny && qb.norm() <= tiny && qc.norm() <= tiny {
        params.push((c(T::one()), Complex::zero()));
        params.push((Complex::zero(), c(T::one())));
    } else if qa.norm() >= qc.norm() {
        let disc = (qb * qb - qa * qc * c(T::lit(4.0))).sqrt();
        for s in [(-qb + disc), (-qb - disc)] {
            params.push((s / (qa + qa), c(T::one())));
        }
    } else {
        let disc = (qb * qb - qa * qc * c(T::lit(4.0))).sqrt();
        for t in [(-qb + disc), (-qb - disc)] {
            params.push((c(T::one()), t / (qc + qc)));
        }
    }
    Ok(params
        .into_iter()
        .filter_map(|(s, t)| {
            let x: [Complex<T>; 6] = std::array::from_fn(|i| k1[i] * s + k2[i] * t);
            line_from_plucker(&x)
        })
        .collect())
}

/// Line through point `p` meeting lines `a` and `b`, when unique.
fn transversal_through<T: Real>(
    p: &CMatrix<T>,
    a: &CMatrix<T>,
    b: &CMatrix<T>,
) -> Result<Option<CMatrix<T>>> {
    let pa = p.hstack(a)?;
    let pb = p.hstack(b)?;
    let stacked = pa.hstack(&-&pb)?;
    let k = kernel(&stacked, T::lit(1e-9), 2)?;
    if k.cols() != 2 {
        return Ok(None);
    }
    let pts = CMatrix::from_fn(4, 2, |i, j| {
        (0..3).fold(Complex::zero(), |acc, r| acc + pa[(i, r)] * k[(r, j)])
    });
    let q = orthonormal_columns(&pts, T::lit(1e-6));
    Ok((q.cols() == 2).then_some(q))
}

/// Evaluates the three weighted incidence conditions over a finite candidate
/// set:
///
/// * points: pairwise intersections of the lines, and one point on each line;
/// * lines: the lines themselves, joins of two intersection points, the line
///   through each candidate point meeting two further lines, and the common
///   transversals of every four lines;
/// * planes: spans of intersecting pairs, and of each line with a basis vector.
///
/// A reported violation is always genuine. `stable` means stable relative to
/// these candidates.
pub fn line_stability<T: Real>(cfg: &ComplexLineConfig<T>) -> Result<StabilityReport<T>> {
    let n = cfg.len();
    let bases: Vec<CMatrix<T>> = cfg.lines.iter().map(check_line).collect::<Result<_>>()?;
    let inc = Incidence {
        bases: bases.clone(),
        weights: cfg.weights.clone(),
    };

    let mut meeting: Vec<(usize, usize)> = Vec::new();
    let mut points: Vec<CMatrix<T>> = Vec::new();
    let mut crossings: Vec<CMatrix<T>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if inc.same(i, &bases[j]) || !inc.meets(i, &bases[j]) {
                continue;
            }
            meeting.push((i, j));
            let p = intersection_point(&bases[i], &bases[j])?;
            if p.cols() == 1 {
                crossings.push(p);
            }
        }
    }
    points.extend(crossings.iter().cloned());
    for b in &bases {
        let v: Vec<Complex<T>> = (0..4)
            .map(|k| b[(k, 0)] + b[(k, 1)] * Complex::new(T::lit(0.618), T::lit(0.309)))
            .collect();
        points.push(orthonormal_columns(&column(&v), T::lit(1e-12)));
    }

    let mut lines: Vec<CMatrix<T>> = bases.clone();
    for a in 0..crossings.len() {
        for b in (a + 1)..crossings.len() {
            let j = orthonormal_columns(&crossings[a].hstack(&crossings[b])?, T::lit(1e-6));
            if j.cols() == 2 {
                lines.push(j);
            }
        }
    }
    for p in &points {
        for a in 0..n {
            if inc.contains_point(a, p) {
                continue;
            }
            for b in (a + 1)..n {
                if inc.contains_point(b, p) {
                    continue;
                }
                if let Some(l) = transversal_through(p, &bases[a], &bases[b])? {
                    lines.push(l);
                }
            }
        }
    }
    for_each_quadruple(n, |q| {
        let t = transversals([&bases[q[0]], &bases[q[1]], &bases[q[2]], &bases[q[3]]])?;
        lines.extend(t);
        Ok(())
    })?;

    let mut planes: Vec<CMatrix<T>> = Vec::new();
    for &(i, j) in &meeting {
        let p = orthonormal_columns(&bases[i].hstack(&bases[j])?, T::lit(1e-6));
        if p.cols() == 3 {
            planes.push(p);
        }
    }
    for b in &bases {
        for k in 0..4 {
            let e = CMatrix::from_fn(
                4,
                1,
                |i, _| if i == k { c(T::one()) } else { Complex::zero() },
            );
            let p = orthonormal_columns(&b.hstack(&e)?, T::lit(1e-6));
            if p.cols() == 3 {
                planes.push(p);
                break;
            }
        }
    }

    let mut witnesses: Vec<Witness<T>> = Vec::new();
    let mut seen: std::collections::BTreeSet<(StabilityCondition, Vec<usize>)> = Default::default();
    let wtol = T::lit(WEIGHT_TOL);
    let mut record =
        |condition: StabilityCondition, subspace: &CMatrix<T>, (w, idx): (T, Vec<usize>)| {
            let bound = T::lit(condition.bound());
            if w < bound - wtol || !seen.insert((condition, idx.clone())) {
                return;
            }
            witnesses.push(Witness {
                condition,
                subspace: subspace.clone(),
                lines: idx,
                weight: w.as_f64(),
                bound: bound.as_f64(),
                breaks_semistability: w > bound + wtol,
            });
        };
    for p in &points {
        record(StabilityCondition::Point, p, inc.point_weight(p));
    }
    for l in &lines {
        record(StabilityCondition::Line, l, inc.line_weight(l));
    }
    for p in &planes {
        record(StabilityCondition::Plane, p, inc.plane_weight(p));
    }

    let stable = witnesses.is_empty();
    let semistable = !witnesses.iter().any(|w| w.breaks_semistability);
    Ok(StabilityReport {
        stable,
        semistable,
        witnesses,
        candidates: CandidateCounts {
            points: points.len(),
            lines: lines.len(),
            planes: planes.len(),
        },
    })
}

fn for_each_quadruple(n: usize, mut f: impl FnMut([usize; 4]) -> Result<()>) -> Result<()> {
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    f([a, b, c, d])?;
                }
            }
        }
    }
    Ok(())
}

/// Builds lines from pairs of points given as columns.
pub fn line_through<T: Real>(u: [Complex<T>; 4], v: [Complex<T>; 4]) -> CMatrix<T> {
    CMatrix::from_fn(4, 2, |i, j| if j == 0 { u[i] } else { v[i] })
}

/// Reference configurations for the three stability regimes.
pub mod fixtures {
    use super::*;

    fn random_point<T: Real, R: Rng + ?Sized>(rng: &mut R) -> [Complex<T>; 4] {
        std::array::from_fn(|_| Complex::new(gaussian(rng), gaussian(rng)))
    }

    fn basis<T: Real>(k: usize) -> [Complex<T>; 4] {
        std::array::from_fn(|i| if i == k { c(T::one()) } else { Complex::zero() })
    }

    /// Five random lines with weight 2/5 each: stable.
    pub fn generic_stable<T: Real, R: Rng + ?Sized>(rng: &mut R) -> ComplexLineConfig<T> {
        ComplexLineConfig::random(vec![T::lit(0.4); 5], rng).expect("random lines have rank 2")
    }

    /// Three lines through `e_1` carrying weight 1.1, plus two random lines:
    /// unstable at that point.
    pub fn concurrent_unstable<T: Real, R: Rng + ?Sized>(rng: &mut R) -> ComplexLineConfig<T> {
        let mut lines: Vec<CMatrix<T>> = (0..3)
            .map(|_| line_through(basis(0), random_point(rng)))
            .collect();
        lines.extend((0..2).map(|_| random_cmatrix(4, 2, rng)));
        let w = [0.4, 0.4, 0.3, 0.45, 0.45].map(T::lit).to_vec();
        ComplexLineConfig::new(w, lines).expect("random lines have rank 2")
    }

    /// Five lines of weight 2/5 each meeting `span(e_1, e_2)` at distinct
    /// points: that line attains the bound 2, so the configuration is
    /// semistable but not stable.
    pub fn transversal_semistable<T: Real, R: Rng + ?Sized>(rng: &mut R) -> ComplexLineConfig<T> {
        let lines: Vec<CMatrix<T>> = (0..5)
            .map(|_| {
                let t: Complex<T> = Complex::new(gaussian(rng), gaussian(rng));
                let on_axis: [Complex<T>; 4] = std::array::from_fn(|i| match i {
                    0 => c(T::one()),
                    1 => t,
                    _ => Complex::zero(),
                });
                line_through(on_axis, random_point(rng))
            })
            .collect();
        ComplexLineConfig::new(vec![T::lit(0.4); 5], lines).expect("random lines have rank 2")
    }

    /// `span(e_1, e_2)`
    pub fn axis<T: Real>() -> CMatrix<T> {
        line_through(basis(0), basis(1))
    }
}
