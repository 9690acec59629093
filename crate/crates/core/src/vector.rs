//! Helpers for fixed-size real vectors, mostly points of R^5.

use crate::scalar::Real;

pub type Vec5<T> = [T; 5];

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

#[inline]
pub fn add<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| a[i] + b[i])
}

#[inline]
pub fn sub<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| a[i] - b[i])
}

#[inline]
pub fn scale<T: Real, const N: usize>(a: &[T; N], s: T) -> [T; N] {
    std::array::from_fn(|i| a[i] * s)
}

/// `a + s b`
#[inline]
pub fn axpy<T: Real, const N: usize>(a: &[T; N], s: T, b: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| a[i] + s * b[i])
}

pub fn zero<T: Real, const N: usize>() -> [T; N] {
    [T::zero(); N]
}

pub fn basis<T: Real, const N: usize>(k: usize) -> [T; N] {
    std::array::from_fn(|i| if i == k { T::one() } else { T::zero() })
}

/// Unit vector along `a`, or `None` if `a` is zero.
pub fn normalize<T: Real, const N: usize>(a: &[T; N]) -> Option<[T; N]> {
    let n = norm(a);
    (n > T::zero()).then(|| scale(a, n.recip()))
}

pub fn to_array<T: Real, const N: usize>(v: &[T]) -> Option<[T; N]> {
    (v.len() == N).then(|| std::array::from_fn(|i| v[i]))
}

/// Apply a row-major `N x N` matrix.
pub fn mat_apply<T: Real, const N: usize>(m: &[[T; N]; N], v: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| dot(&m[i], v))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` when a pivot falls below `1e-13` of the largest entry.
pub fn solve<T: Real, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, x| m.max(x.abs()));
    if !(scale > T::zero()) {
        return None;
    }
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].abs() < T::lit(1e-13) * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in (col + 1)..N {
            let f = a[i][col] / a[col][col];
            for j in col..N {
                a[i][j] -= f * a[col][j];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = [T::zero(); N];
    for i in (0..N).rev() {
        let mut acc = b[i];
        for j in (i + 1)..N {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Determinant by elimination with partial pivoting.
pub fn det<T: Real, const N: usize>(mut a: [[T; N]; N]) -> T {
    let mut d = T::one();
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[piv][col].is_zero() {
            return T::zero();
        }
        if piv != col {
            a.swap(col, piv);
            d = -d;
        }
        d *= a[col][col];
        for i in (col + 1)..N {
            let f = a[i][col] / a[col][col];
            for j in col..N {
                a[i][j] -= f * a[col][j];
            }
        }
    }
    d
}

pub fn mat_mul<T: Real, const N: usize>(a: &[[T; N]; N], b: &[[T; N]; N]) -> [[T; N]; N] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..N).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]))
    })
}

pub fn transpose<T: Real, const N: usize>(a: &[[T; N]; N]) -> [[T; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn identity<T: Real, const N: usize>() -> [[T; N]; N] {
    std::array::from_fn(|i| basis(i))
}

/// Frobenius distance between two square matrices.
pub fn mat_dist<T: Real, const N: usize>(a: &[[T; N]; N], b: &[[T; N]; N]) -> T {
    let mut s = T::zero();
    for i in 0..N {
        for j in 0..N {
            let d = a[i][j] - b[i][j];
            s += d * d;
        }
    }
    s.sqrt()
}
