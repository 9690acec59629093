use std::fmt::Debug;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::quaternion::Quaternion;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Matrix entry: a real, complex or quaternionic scalar over a `Real` field.
pub trait Entry:
    Copy
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
{
    type Real: Real;

    fn conj(self) -> Self;
    fn norm_sqr(self) -> Self::Real;
    fn from_real(x: Self::Real) -> Self;
    fn scale(self, s: Self::Real) -> Self;
    fn real_part(self) -> Self::Real;
}

impl<T: Real> Entry for T {
    type Real = T;
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn norm_sqr(self) -> T {
        self * self
    }
    #[inline]
    fn from_real(x: T) -> Self {
        x
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        self * s
    }
    #[inline]
    fn real_part(self) -> T {
        self
    }
}

impl<T: Real> Entry for Complex<T> {
    type Real = T;
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    #[inline]
    fn from_real(x: T) -> Self {
        Complex::new(x, T::zero())
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        self * s
    }
    #[inline]
    fn real_part(self) -> T {
        self.re
    }
}

impl<T: Real> Entry for Quaternion<T> {
    type Real = T;
    #[inline]
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    #[inline]
    fn norm_sqr(self) -> T {
        Quaternion::norm_sqr(self)
    }
    #[inline]
    fn from_real(x: T) -> Self {
        Quaternion::real(x)
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        self * s
    }
    #[inline]
    fn real_part(self) -> T {
        self.w
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

pub type QuatMatrix<T> = Matrix<Quaternion<T>>;
pub type CMatrix<T> = Matrix<Complex<T>>;
pub type RMatrix<T> = Matrix<T>;

impl<E: Entry> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { E::one() } else { E::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<E>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diagonal(diag: &[E]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { E::zero() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose `A* = conj(A)^t`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(Entry::conj)
    }

    pub fn map<F: Entry>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn scale(&self, s: E::Real) -> Self {
        self.map(|e| e.scale(s))
    }

    /// Left multiplication of every entry by a scalar.
    pub fn left_mul(&self, s: E) -> Self {
        self.map(|e| s * e)
    }

    /// Right multiplication of every entry by a scalar.
    pub fn right_mul(&self, s: E) -> Self {
        self.map(|e| e * s)
    }

    /// Upper-left `k x k` corner.
    pub fn leading(&self, k: usize) -> Self {
        self.submatrix(0..k, 0..k)
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(r0 + i, c0 + j)])
    }

    /// First `k` rows.
    pub fn top_rows(&self, k: usize) -> Self {
        self.submatrix(0..k, 0..self.cols)
    }

    pub fn frobenius_sqr(&self) -> E::Real {
        self.data
            .iter()
            .fold(E::Real::zero(), |acc, &e| acc + e.norm_sqr())
    }

    pub fn frobenius(&self) -> E::Real {
        self.frobenius_sqr().sqrt()
    }

    pub fn max_abs(&self) -> E::Real {
        self.data
            .iter()
            .fold(E::Real::zero(), |acc, &e| acc.max(e.norm_sqr().sqrt()))
    }

    /// Frobenius norm of `A - A*`; zero iff Hermitian.
    pub fn hermitian_defect(&self) -> E::Real {
        if !self.is_square() {
            return E::Real::infinity();
        }
        (self - &self.adjoint()).frobenius()
    }

    pub fn is_hermitian(&self, tol: E::Real) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn trace(&self) -> E {
        (0..self.rows.min(self.cols)).fold(E::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[E]) -> Vec<E> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(E::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row count".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx] + a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Entry> Mul for &Matrix<E> {
    type Output = Matrix<E>;
    fn mul(self, rhs: &Matrix<E>) -> Matrix<E> {
        self.checked_mul(rhs).expect("matrix product dimensions")
    }
}

impl<E: Entry> Add for &Matrix<E> {
    type Output = Matrix<E>;
    fn add(self, rhs: &Matrix<E>) -> Matrix<E> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum dimensions"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<E: Entry> Sub for &Matrix<E> {
    type Output = Matrix<E>;
    fn sub(self, rhs: &Matrix<E>) -> Matrix<E> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix difference dimensions"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<E: Entry> Neg for &Matrix<E> {
    type Output = Matrix<E>;
    fn neg(self) -> Matrix<E> {
        self.map(|e| -e)
    }
}

impl<E: Entry + Serialize> Serialize for Matrix<E> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de, E: Entry + Deserialize<'de>> Deserialize<'de> for Matrix<E> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<E>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> QuatMatrix<T> {
    /// Complex block image `A + B j -> [[A, B], [-conj(B), conj(A)]]`.
    pub fn nu(&self) -> CMatrix<T> {
        let (r, c) = (self.rows, self.cols);
        CMatrix::from_fn(2 * r, 2 * c, |i, j| {
            let (z1, z2) = self[(i % r, j % c)].complex_pair();
            match (i < r, j < c) {
                (true, true) => z1,
                (true, false) => z2,
                (false, true) => -z2.conj(),
                (false, false) => z1.conj(),
            }
        })
    }

    /// Inverse of `nu`: reads `A` and `B` off the top blocks and checks the
    /// bottom blocks have the `[-conj(B), conj(A)]` form.
    pub fn from_nu(c: &CMatrix<T>, tol: T) -> Result<Self> {
        if !c.rows.is_multiple_of(2) || !c.cols.is_multiple_of(2) {
            return Err(Error::Dimension(
                "complex image must have even dimensions".into(),
            ));
        }
        let (r, k) = (c.rows / 2, c.cols / 2);
        let q = Self::from_fn(r, k, |i, j| {
            Quaternion::from_complex_pair(c[(i, j)], c[(i, j + k)])
        });
        let residual = (&q.nu() - c).frobenius();
        if residual > tol {
            return Err(Error::NotQuaternionic {
                residual: residual.as_f64(),
            });
        }
        Ok(q)
    }

    /// Inverse by Gauss-Jordan elimination with row pivoting; scalars act from the left.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| {
                a[(x, col)]
                    .norm_sqr()
                    .partial_cmp(&a[(y, col)].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a[(piv, col)].norm() <= T::epsilon() * scale * T::lit(16.0) {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].inverse()?;
            for j in 0..n {
                a[(col, j)] = p * a[(col, j)];
                inv[(col, j)] = p * inv[(col, j)];
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                    inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
                }
            }
        }
        Some(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;
    type C = Complex<f64>;

    #[test]
    fn nu_of_j_and_i() {
        let j = QuatMatrix::from_rows(&[vec![Q::j()]]).unwrap().nu();
        let expected = CMatrix::from_rows(&[
            vec![C::new(0.0, 0.0), C::new(1.0, 0.0)],
            vec![C::new(-1.0, 0.0), C::new(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(j, expected);

        let i = QuatMatrix::from_rows(&[vec![Q::i()]]).unwrap().nu();
        let expected = CMatrix::from_rows(&[
            vec![C::new(0.0, 1.0), C::new(0.0, 0.0)],
            vec![C::new(0.0, 0.0), C::new(0.0, -1.0)],
        ])
        .unwrap();
        assert_eq!(i, expected);
    }

    #[test]
    fn nu_roundtrip_and_rejection() {
        let m = QuatMatrix::from_rows(&[
            vec![Q::new(1.0, 2.0, 3.0, 4.0), Q::new(0.5, 0.0, -1.0, 2.0)],
            vec![Q::new(0.0, 1.0, 0.0, 0.0), Q::new(-2.0, 0.0, 1.0, 1.0)],
        ])
        .unwrap();
        let back = QuatMatrix::from_nu(&m.nu(), 1e-14).unwrap();
        assert_eq!(back, m);

        let mut c = m.nu();
        c[(3, 3)] += C::new(0.1, 0.0);
        assert!(matches!(
            QuatMatrix::from_nu(&c, 1e-12),
            Err(Error::NotQuaternionic { .. })
        ));
    }

    #[test]
    fn quaternionic_inverse() {
        let m = QuatMatrix::from_rows(&[
            vec![Q::new(1.0, 2.0, 3.0, 4.0), Q::new(0.5, 0.0, -1.0, 2.0)],
            vec![Q::new(0.0, 1.0, 0.0, 0.0), Q::new(-2.0, 0.0, 1.0, 1.0)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        let id = &m * &inv;
        assert!((&id - &QuatMatrix::identity(2)).frobenius() < 1e-13);
        let id = &inv * &m;
        assert!((&id - &QuatMatrix::identity(2)).frobenius() < 1e-13);

        let singular =
            QuatMatrix::from_rows(&[vec![Q::one(), Q::one()], vec![Q::one(), Q::one()]]).unwrap();
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn leading_and_adjoint() {
        let m = RMatrix::from_fn(3, 3, |i, j| (3 * i + j) as f64);
        assert_eq!(m.leading(2).as_slice(), &[0.0, 1.0, 3.0, 4.0]);
        assert_eq!(m.adjoint(), m.transpose());
        assert!(!m.is_hermitian(1e-12));
    }

    #[test]
    fn json_nested_arrays() {
        let m = QuatMatrix::from_rows(&[vec![Q::one(), Q::i()]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0]]]");
        let back: QuatMatrix<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<QuatMatrix<f64>>("[[[1,0,0,0]],[]]").is_err());
    }
}
