//! Quaternionic Hermitian spectra, Gel'fand-Tsetlin patterns and the
//! Grassmannian picture of closed polygons.
//!
//! A point of the quaternionic Grassmannian of 2-planes in H^n is stored as
//! an `n x 2` matrix `M` with rows `(a_j, b_j)`. Unit quaternions act on the
//! left of each row (the torus-like `Sigma^n` action) and `Sp(2)` acts on the
//! right. Row `j` determines an edge of a polygon in R^5 through the
//! traceless part of `row_j^* row_j`:
//!
//! `[[t, q], [conj(q), -t]] <-> (t, q_w, q_x, q_y, q_z)`, with
//! `t = (|a|^2 - |b|^2) / 2`, `q = conj(a) b` and length `(|a|^2 + |b|^2) / 2`.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moebius::S4Point;
use crate::polygon::PolygonConfig;
use crate::quat::linalg::hermitian_eigenvalues;
use crate::quat::{random_quaternion_matrix, CMatrix, QuatMatrix, Quaternion};
use crate::scalar::Real;
use crate::vector::Vec5;

/// Largest accepted `|A - A*|_F`, relative to `max(1, max |A_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest accepted gap inside an eigenvalue pair, relative to `max(1, |lambda|)`.
pub const PAIRING_TOL: f64 = 1e-6;
/// Slack allowed in the interlacing inequalities.
pub const INTERLACING_TOL: f64 = 1e-8;
/// Closure precondition for [`polygon_from_grassmann`].
pub const LEVEL_SET_TOL: f64 = 1e-8;
/// Agreement required between the spectra of `M_i^* M_i` and `M_i M_i^*`.
pub const SPECTRUM_TOL: f64 = 1e-9;

fn scale_of<T: Real>(a: &QuatMatrix<T>) -> T {
    a.max_abs().max(T::one())
}

/// Checks `A = A*` to [`HERMITIAN_TOL`].
pub fn check_hermitian<T: Real>(a: &QuatMatrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "Hermitian matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermitian_defect();
    if defect > T::lit(HERMITIAN_TOL) * scale_of(a) {
        return Err(Error::NotHermitian {
            residual: defect.as_f64(),
        });
    }
    Ok(())
}

/// Quaternionic Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatHermitian<T: Real>(QuatMatrix<T>);

impl<T: Real> QuatHermitian<T> {
    /// Validates Hermiticity, then replaces `A` by `(A + A*) / 2` so the
    /// stored matrix is exactly Hermitian.
    pub fn new(a: QuatMatrix<T>) -> Result<Self> {
        check_hermitian(&a)?;
        let half = T::lit(0.5);
        Ok(QuatHermitian((&a + &a.adjoint()).scale(half)))
    }

    pub fn diagonal(d: &[T]) -> Self {
        QuatHermitian(QuatMatrix::diagonal(
            &d.iter().map(|&x| Quaternion::real(x)).collect::<Vec<_>>(),
        ))
    }

    /// `(B + B*) / 2` for `B` with standard normal entries.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let b = random_quaternion_matrix::<T, R>(n, n, rng);
        QuatHermitian((&b + &b.adjoint()).scale(T::lit(0.5)))
    }

    pub fn matrix(&self) -> &QuatMatrix<T> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// Upper-left `k x k` corner.
    pub fn leading(&self, k: usize) -> Self {
        QuatHermitian(self.0.leading(k))
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        quat_hermitian_eigenvalues(&self.0)
    }
}

impl<T: Real + Serialize> Serialize for QuatHermitian<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for QuatHermitian<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = QuatMatrix::<T>::deserialize(d)?;
        Self::new(m).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues of a complex matrix that are expected to come in equal pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSpectrum<T> {
    /// One value per pair, non-increasing.
    pub values: Vec<T>,
    /// Largest gap inside a pair.
    pub max_gap: T,
}

/// Pairs adjacent entries of a non-increasing list. Fails if a pair is
/// wider than `PAIRING_TOL * max(1, |lambda|)`.
pub fn pair_eigenvalues<T: Real>(sorted: &[T]) -> Result<PairedSpectrum<T>> {
    if !sorted.len().is_multiple_of(2) {
        return Err(Error::Dimension("odd number of eigenvalues".into()));
    }
    let mut values = Vec::with_capacity(sorted.len() / 2);
    let mut max_gap = T::zero();
    for (index, pair) in sorted.chunks(2).enumerate() {
        let gap = (pair[0] - pair[1]).abs();
        let mid = (pair[0] + pair[1]) * T::lit(0.5);
        if gap > T::lit(PAIRING_TOL) * mid.abs().max(T::one()) {
            return Err(Error::PairingFailure {
                index,
                gap: gap.as_f64(),
            });
        }
        max_gap = max_gap.max(gap);
        values.push(mid);
    }
    Ok(PairedSpectrum { values, max_gap })
}

/// Eigenvalues of a complex Hermitian matrix, paired as for the image of a
/// quaternionic one. A Hermitian input outside that image usually fails
/// with [`Error::PairingFailure`].
pub fn paired_spectrum<T: Real>(c: &CMatrix<T>) -> Result<PairedSpectrum<T>> {
    pair_eigenvalues(&hermitian_eigenvalues(c)?)
}

/// Spectrum of `nu(A)` with its pair gaps.
pub fn quat_hermitian_spectrum<T: Real>(a: &QuatMatrix<T>) -> Result<PairedSpectrum<T>> {
    check_hermitian(a)?;
    paired_spectrum(&a.nu())
}

/// The `n` real eigenvalues of a quaternionic Hermitian matrix, non-increasing.
pub fn quat_hermitian_eigenvalues<T: Real>(a: &QuatMatrix<T>) -> Result<Vec<T>> {
    Ok(quat_hermitian_spectrum(a)?.values)
}

/// Eigenvalues of `[[alpha, q], [conj(q), beta]]`, larger first.
pub fn hermitian2_eigenvalues<T: Real>(alpha: T, beta: T, q: Quaternion<T>) -> (T, T) {
    let half = T::lit(0.5);
    let m = (alpha + beta) * half;
    let s = ((alpha - beta) * half).hypot(q.norm());
    (m + s, m - s)
}

/// Eigenvalues of every upper-left corner: `levels[j - 1]` holds the `j`
/// eigenvalues of `A^(j)`, non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct GTPattern<T> {
    levels: Vec<Vec<T>>,
}

impl<T: Real> GTPattern<T> {
    /// Checks the triangular shape and interlacing
    /// `lambda_i^(j) >= lambda_i^(j-1) >= lambda_(i+1)^(j)` up to `tol`.
    pub fn new(levels: Vec<Vec<T>>, tol: T) -> Result<Self> {
        for (j, level) in levels.iter().enumerate() {
            if level.len() != j + 1 {
                return Err(Error::Dimension(format!(
                    "level {} has {} entries",
                    j + 1,
                    level.len()
                )));
            }
        }
        let p = GTPattern { levels };
        if let Some(err) = p.first_violation(tol) {
            return Err(err);
        }
        Ok(p)
    }

    pub fn levels(&self) -> &[Vec<T>] {
        &self.levels
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }

    /// `lambda_i^(j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.levels[j - 1][i - 1]
    }

    /// Largest amount by which any interlacing inequality fails (zero or
    /// negative when all hold).
    pub fn max_violation(&self) -> T {
        let mut worst = T::neg_infinity();
        for j in 2..=self.size() {
            let (hi, lo) = (&self.levels[j - 1], &self.levels[j - 2]);
            for i in 0..j - 1 {
                worst = worst.max(lo[i] - hi[i]).max(hi[i + 1] - lo[i]);
            }
        }
        for level in &self.levels {
            for w in level.windows(2) {
                worst = worst.max(w[1] - w[0]);
            }
        }
        if worst == T::neg_infinity() {
            T::zero()
        } else {
            worst
        }
    }

    fn first_violation(&self, tol: T) -> Option<Error> {
        for j in 2..=self.size() {
            let (hi, lo) = (&self.levels[j - 1], &self.levels[j - 2]);
            for i in 0..j - 1 {
                let amount = (lo[i] - hi[i]).max(hi[i + 1] - lo[i]);
                if amount > tol {
                    return Some(Error::Interlacing {
                        level: j,
                        index: i + 1,
                        amount: amount.as_f64(),
                    });
                }
            }
        }
        None
    }
}

impl<T: Real + Serialize> Serialize for GTPattern<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.levels.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for GTPattern<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let levels = Vec::<Vec<T>>::deserialize(d)?;
        let scale = levels
            .iter()
            .flatten()
            .fold(T::one(), |m, x| m.max(x.abs()));
        Self::new(levels, T::lit(INTERLACING_TOL) * scale).map_err(serde::de::Error::custom)
    }
}

/// Gel'fand-Tsetlin pattern of a quaternionic Hermitian matrix.
pub fn gt_pattern<T: Real>(a: &QuatMatrix<T>) -> Result<GTPattern<T>> {
    check_hermitian(a)?;
    let levels = (1..=a.rows())
        .map(|j| quat_hermitian_eigenvalues(&a.leading(j)))
        .collect::<Result<Vec<_>>>()?;
    GTPattern::new(levels, T::lit(INTERLACING_TOL) * scale_of(a))
}

/// Gram matrix of points of HP^(p-1).
///
/// Row `l` of `w` holds homogeneous coordinates of one point; each row is
/// scaled to unit length first. Entry `(a, b)` is `sum_l w_l^(a) conj(w_l^(b))`.
/// The result is Hermitian, positive semidefinite, of rank at most `p`, and
/// changes to `u G u*` when every coordinate vector is replaced by `u w`.
pub fn gram_map<T: Real>(w: &QuatMatrix<T>) -> Result<QuatMatrix<T>> {
    let p = w.cols();
    let mut g = QuatMatrix::zeros(p, p);
    for l in 0..w.rows() {
        let row = w.row(l);
        let n = row
            .iter()
            .fold(T::zero(), |acc, q| acc + q.norm_sqr())
            .sqrt();
        if !(n > T::zero()) {
            return Err(Error::ZeroVector);
        }
        let unit: Vec<Quaternion<T>> = row.iter().map(|&q| q / n).collect();
        for a in 0..p {
            for b in 0..p {
                g[(a, b)] += unit[a] * unit[b].conj();
            }
        }
    }
    Ok(g)
}

/// Row norms `x_j = |a_j|^2 + |b_j|^2`.
pub fn tri_momentum<T: Real>(m: &GrassmannPoint<T>) -> Vec<T> {
    (0..m.n())
        .map(|j| {
            m.0.row(j)
                .iter()
                .fold(T::zero(), |acc, q| acc + q.norm_sqr())
        })
        .collect()
}

/// Edge vector `(t, q)` and length of one row.
pub fn row_edge<T: Real>(a: Quaternion<T>, b: Quaternion<T>) -> (Vec5<T>, T) {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    let half = T::lit(0.5);
    let q = a.conj() * b;
    ([(na - nb) * half, q.w, q.x, q.y, q.z], (na + nb) * half)
}

/// `(t, q) -> [[t, q], [conj(q), -t]]`.
pub fn edge_to_block<T: Real>(e: &Vec5<T>) -> QuatMatrix<T> {
    let q = Quaternion::new(e[1], e[2], e[3], e[4]);
    QuatMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Quaternion::real(e[0]),
        (0, 1) => q,
        (1, 0) => q.conj(),
        _ => Quaternion::real(-e[0]),
    })
}

/// Inverse of [`edge_to_block`] on the traceless part of a 2x2 Hermitian block.
pub fn block_to_edge<T: Real>(b: &QuatMatrix<T>) -> Vec5<T> {
    let half = T::lit(0.5);
    let t = (b[(0, 0)].w - b[(1, 1)].w) * half;
    let q = b[(0, 1)];
    [t, q.w, q.x, q.y, q.z]
}

/// Rank-2 `n x 2` quaternionic matrix with rows `(a_j, b_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint<T: Real>(QuatMatrix<T>);

impl<T: Real> GrassmannPoint<T> {
    /// Requires shape `n x 2` and both eigenvalues of `M^* M` above
    /// `rank_tol` times the larger one.
    pub fn new(m: QuatMatrix<T>, rank_tol: T) -> Result<Self> {
        if m.cols() != 2 || m.rows() < 2 {
            return Err(Error::Dimension(format!(
                "Grassmann point must be n x 2 with n >= 2, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let p = GrassmannPoint(m);
        let (l1, l2) = p.total_gram_eigenvalues();
        if !(l2 > rank_tol * l1) {
            return Err(Error::RankDeficient { expected: 2 });
        }
        Ok(p)
    }

    /// Standard normal entries.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let m = random_quaternion_matrix::<T, R>(n, 2, rng);
            if let Ok(p) = Self::new(m, T::lit(1e-6)) {
                return p;
            }
        }
    }

    /// Random point on the level set `M^* M = total I`, i.e. a closed polygon
    /// with perimeter `total`.
    pub fn random_closed<R: Rng + ?Sized>(n: usize, total: T, rng: &mut R) -> Self {
        let p = Self::random(n, rng);
        let q = p.polar_normalize();
        GrassmannPoint(q.0.scale(total.sqrt()))
    }

    pub fn matrix(&self) -> &QuatMatrix<T> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    /// `M^* M`
    pub fn total_gram(&self) -> QuatMatrix<T> {
        &self.0.adjoint() * &self.0
    }

    fn total_gram_eigenvalues(&self) -> (T, T) {
        let g = self.total_gram();
        hermitian2_eigenvalues(g[(0, 0)].w, g[(1, 1)].w, g[(0, 1)])
    }

    /// `M (M^* M)^(-1/2)`, so that `M^* M = I`. Uses `G = m I + T` with
    /// `T^2 = |T|^2 I` to write `G^(-1/2) = alpha I + beta T`.
    pub fn polar_normalize(&self) -> Self {
        let g = self.total_gram();
        let half = T::lit(0.5);
        let m = (g[(0, 0)].w + g[(1, 1)].w) * half;
        let mut t = g.clone();
        t[(0, 0)] = Quaternion::real(g[(0, 0)].w - m);
        t[(1, 1)] = Quaternion::real(g[(1, 1)].w - m);
        let s = ((g[(0, 0)].w - g[(1, 1)].w) * half).hypot(g[(0, 1)].norm());
        let f = |x: T| x.sqrt().recip();
        let alpha = (f(m + s) + f(m - s)) * half;
        let beta = if s > T::lit(1e-8) * m {
            (f(m + s) - f(m - s)) / (s + s)
        } else {
            -half * m.powi(3).sqrt().recip()
        };
        let root = &QuatMatrix::identity(2).scale(alpha) + &t.scale(beta);
        GrassmannPoint(&self.0 * &root)
    }

    /// Left multiplication of row `j` by `sigma[j]`.
    pub fn act_torus(&self, sigma: &[Quaternion<T>]) -> Self {
        let mut m = self.0.clone();
        for (j, s) in sigma.iter().enumerate().take(self.n()) {
            for k in 0..2 {
                m[(j, k)] = *s * m[(j, k)];
            }
        }
        GrassmannPoint(m)
    }

    /// Right multiplication by a 2x2 matrix.
    pub fn act_right(&self, g: &QuatMatrix<T>) -> Self {
        GrassmannPoint(&self.0 * g)
    }

    /// First `i` rows.
    pub fn truncated(&self, i: usize) -> QuatMatrix<T> {
        self.0.top_rows(i)
    }
}

impl<T: Real + Serialize> Serialize for GrassmannPoint<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for GrassmannPoint<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = QuatMatrix::<T>::deserialize(d)?;
        Self::new(m, T::lit(1e-12)).map_err(serde::de::Error::custom)
    }
}

/// Polygon whose edges are the rows of `M`. Requires `M^* M` to be a
/// multiple of the identity to [`LEVEL_SET_TOL`] (relative to its trace).
pub fn polygon_from_grassmann<T: Real>(m: &GrassmannPoint<T>) -> Result<PolygonConfig<T>> {
    let g = m.total_gram();
    let c = (g[(0, 0)].w + g[(1, 1)].w) * T::lit(0.5);
    let off = (&g - &QuatMatrix::identity(2).scale(c)).frobenius();
    if off > T::lit(LEVEL_SET_TOL) * c.max(T::one()) {
        return Err(Error::ClosureViolation {
            residual: off.as_f64(),
        });
    }
    let mut r = Vec::with_capacity(m.n());
    let mut edges = Vec::with_capacity(m.n());
    for j in 0..m.n() {
        let row = m.matrix().row(j);
        let (e, len) = row_edge(row[0], row[1]);
        r.push(len);
        edges.push(S4Point::new(e)?);
    }
    PolygonConfig::new(r, edges)
}

/// Eigenvalues `(lambda_1, lambda_2)` of `M_i^* M_i` for `i = 1..=n`, each
/// checked against the nonzero spectrum of `M_i M_i^*` to [`SPECTRUM_TOL`].
pub fn partial_gram_spectra<T: Real>(m: &GrassmannPoint<T>) -> Result<Vec<(T, T)>> {
    let mut out = Vec::with_capacity(m.n());
    let mut g = QuatMatrix::<T>::zeros(2, 2);
    for i in 1..=m.n() {
        let row = m.matrix().row(i - 1);
        for a in 0..2 {
            for b in 0..2 {
                g[(a, b)] += row[a].conj() * row[b];
            }
        }
        let (l1, l2) = hermitian2_eigenvalues(g[(0, 0)].w, g[(1, 1)].w, g[(0, 1)]);
        let mi = m.truncated(i);
        let outer = &mi * &mi.adjoint();
        let spec = quat_hermitian_eigenvalues(&outer)?;
        let tol = T::lit(SPECTRUM_TOL) * l1.max(T::one());
        let mut gap = T::zero();
        for (k, &x) in spec.iter().enumerate() {
            let expected = match k {
                0 => l1,
                1 => l2,
                _ => T::zero(),
            };
            gap = gap.max((x - expected).abs());
        }
        if i == 1 {
            gap = gap.max(l2.abs());
        }
        if gap > tol {
            return Err(Error::SpectrumMismatch {
                index: i,
                gap: gap.as_f64(),
            });
        }
        out.push((l1, l2));
    }
    Ok(out)
}

/// `(lambda_1 - lambda_2) / 2` for each prefix: the length of
/// `sum_{j <= i} r_j u_j`. Entry `i + 1` (0-based `i`) is the polygon
/// diagonal `d_i`.
pub fn prefix_lengths<T: Real>(m: &GrassmannPoint<T>) -> Result<Vec<T>> {
    let half = T::lit(0.5);
    Ok(partial_gram_spectra(m)?
        .into_iter()
        .map(|(a, b)| (a - b) * half)
        .collect())
}

/// Hermitian matrix `sum_j row_j^* row_j` restricted to its traceless part,
/// as an edge vector. Zero exactly on the closure level set.
pub fn closure_edge<T: Real>(m: &GrassmannPoint<T>) -> Vec5<T> {
    block_to_edge(&m.total_gram())
}
