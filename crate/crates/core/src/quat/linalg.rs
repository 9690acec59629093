//! Small dense kernels: a cyclic Jacobi eigensolver for complex Hermitian
//! matrices, one-sided Jacobi singular values, LU determinants and null
//! spaces. Sizes in this crate stay below ~20, so none of this is blocked.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{CMatrix, RMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    /// Eigenvalues sorted non-increasing.
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix<T>,
}

/// Cyclic Jacobi diagonalization of a complex Hermitian matrix.
///
/// Sweeps until the off-diagonal Frobenius norm falls below
/// `1e-12 * max(1, |A|_F)` (scaled to the precision of `T`).
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(
            "eigenproblem needs a square matrix".into(),
        ));
    }
    let n = a.rows();
    let mut m = a.clone();
    // Symmetrize so tiny representation errors do not stall the sweep.
    for i in 0..n {
        m[(i, i)] = Complex::new(m[(i, i)].re, T::zero());
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * T::lit(0.5);
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::<T>::identity(n);
    let scale = T::one().max(a.frobenius());
    let target = (T::lit(1e-12).max(T::epsilon() * T::lit(64.0))) * scale;

    let off = |m: &CMatrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&m) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                iterations: sweeps,
                residual: off(&m).as_f64(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let abs = apq.norm();
                if abs <= T::min_positive_value() {
                    continue;
                }
                let phase = apq / abs;
                let tau = (m[(q, q)].re - m[(p, p)].re) / (abs + abs);
                let t = if tau >= T::zero() {
                    (tau + (T::one() + tau * tau).sqrt()).recip()
                } else {
                    -(-tau + (T::one() + tau * tau).sqrt()).recip()
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                // R = [[c, s e], [-s conj(e), c]] in the (p, q) plane; m <- R* m R.
                let rpq = phase * s;
                let rqp = -phase.conj() * s;
                let cc = Complex::new(c, T::zero());
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * cc + mkq * rqp;
                    m[(k, q)] = mkp * rpq + mkq * cc;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = cc * mpk + rqp.conj() * mqk;
                    m[(q, k)] = rpq.conj() * mpk + cc * mqk;
                }
                m[(p, q)] = Complex::zero();
                m[(q, p)] = Complex::zero();
                m[(p, p)] = Complex::new(m[(p, p)].re, T::zero());
                m[(q, q)] = Complex::new(m[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cc + vkq * rqp;
                    v[(k, q)] = vkp * rpq + vkq * cc;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        m[(y, y)]
            .re
            .partial_cmp(&m[(x, x)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, sorted non-increasing.
pub fn hermitian_eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<T>> {
    hermitian_eigen(a).map(|e| e.values)
}

/// Singular values of a real matrix by one-sided Jacobi (Hestenes), sorted
/// non-increasing. Small singular values keep relative accuracy, which the
/// numerical-rank decisions rely on.
pub fn singular_values<T: Real>(a: &RMatrix<T>) -> Vec<T> {
    // Orthogonalize the columns of the taller orientation.
    let m = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.transpose()
    };
    let (rows, cols) = (m.rows(), m.cols());
    let mut cs: Vec<Vec<T>> = (0..cols).map(|j| m.column(j)).collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..rows {
                    alpha += cs[p][i] * cs[p][i];
                    beta += cs[q][i] * cs[q][i];
                    gamma += cs[p][i] * cs[q][i];
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma.is_zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                for i in 0..rows {
                    let xp = cs[p][i];
                    let xq = cs[q][i];
                    cs[p][i] = c * xp - s * xq;
                    cs[q][i] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cs
        .iter()
        .map(|c| c.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank<T: Real>(a: &RMatrix<T>, rel_tol: T) -> usize {
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or_else(T::zero);
    if top <= T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Determinant by LU with partial pivoting.
pub fn complex_det<T: Real>(a: &CMatrix<T>) -> Result<Complex<T>> {
    if !a.is_square() {
        return Err(Error::Dimension("determinant needs a square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Complex::<T>::one();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| {
                m[(x, col)]
                    .norm_sqr()
                    .partial_cmp(&m[(y, col)].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[(piv, col)].norm_sqr().is_zero() {
            return Ok(Complex::zero());
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(piv, j)];
                m[(piv, j)] = m[(col, j)];
                m[(col, j)] = tmp;
            }
            det = -det;
        }
        let p = m[(col, col)];
        det *= p;
        for i in (col + 1)..n {
            let f = m[(i, col)] / p;
            if f.norm_sqr().is_zero() {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    Ok(det)
}

/// `|det A| / prod_j |A e_j|`, a scale-free singularity measure in `[0, 1]`
/// (Hadamard's inequality).
pub fn normalized_det<T: Real>(a: &CMatrix<T>) -> Result<T> {
    let det = complex_det(a)?.norm();
    let mut denom = T::one();
    for j in 0..a.cols() {
        let n = a
            .column(j)
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt();
        if n.is_zero() {
            return Ok(T::zero());
        }
        denom *= n;
    }
    Ok(det / denom)
}

/// Orthonormal basis of the (numerical) null space of `a`, as columns.
///
/// Uses the eigenvectors of `a* a` whose eigenvalues fall below
/// `(rel_tol * sigma_max)^2`.
pub fn null_space<T: Real>(a: &CMatrix<T>, rel_tol: T) -> Result<CMatrix<T>> {
    let gram = &a.adjoint() * a;
    let eig = hermitian_eigen(&gram)?;
    let top = eig
        .values
        .first()
        .copied()
        .unwrap_or_else(T::zero)
        .max(T::zero());
    let cut = rel_tol * rel_tol * top;
    let idx: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] <= cut)
        .collect();
    let n = a.cols();
    Ok(CMatrix::from_fn(n, idx.len(), |i, j| {
        eig.vectors[(i, idx[j])]
    }))
}

/// Gram-Schmidt on the columns of `a`; returns the orthonormal columns that
/// survive the relative threshold.
pub fn orthonormal_columns<T: Real>(a: &CMatrix<T>, rel_tol: T) -> CMatrix<T> {
    let scale = a.max_abs();
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    for j in 0..a.cols() {
        let mut v = a.column(j);
        // Two passes of classical Gram-Schmidt for stability.
        for _ in 0..2 {
            for b in &basis {
                let proj = b
                    .iter()
                    .zip(&v)
                    .fold(Complex::zero(), |acc: Complex<T>, (x, y)| {
                        acc + x.conj() * y
                    });
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= *bi * proj;
                }
            }
        }
        let n = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if n > rel_tol * scale.max(T::min_positive_value()) {
            basis.push(v.iter().map(|z| z / n).collect());
        }
    }
    CMatrix::from_fn(a.rows(), basis.len(), |i, j| basis[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix<f64> {
        let g = CMatrix::from_fn(n, n, |_, _| {
            C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        &g + &g.adjoint()
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..8 {
            let a = random_hermitian(n, &mut rng);
            let e = hermitian_eigen(&a).unwrap();
            let d =
                CMatrix::diagonal(&e.values.iter().map(|&x| C::new(x, 0.0)).collect::<Vec<_>>());
            let rec = &(&e.vectors * &d) * &e.vectors.adjoint();
            assert!((&rec - &a).frobenius() < 1e-11, "n = {n}");
            let vv = &e.vectors.adjoint() * &e.vectors;
            assert!((&vv - &CMatrix::identity(n)).frobenius() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigenvalues_of_real_2x2() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1
        let a = CMatrix::from_rows(&[
            vec![C::new(2.0, 0.0), C::new(1.0, 0.0)],
            vec![C::new(1.0, 0.0), C::new(2.0, 0.0)],
        ])
        .unwrap();
        let v = hermitian_eigenvalues(&a).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_match_eigen_of_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = RMatrix::from_fn(5, 7, |_, _| rng.random_range(-1.0..1.0));
        let sv = singular_values(&a);
        let gram = (&a * &a.transpose()).map(|x| C::new(x, 0.0));
        let ev = hermitian_eigenvalues(&gram).unwrap();
        for (s, e) in sv.iter().zip(&ev) {
            assert!((s * s - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_detects_dependency() {
        // third column = first + second
        let a = RMatrix::from_fn(5, 3, |i, j| match j {
            0 => (i as f64).sin(),
            1 => (i as f64 * 0.7).cos(),
            _ => (i as f64).sin() + (i as f64 * 0.7).cos(),
        });
        assert_eq!(numerical_rank(&a, 1e-8), 2);
        assert_eq!(numerical_rank(&RMatrix::<f64>::zeros(3, 3), 1e-8), 0);
    }

    #[test]
    fn det_and_null_space() {
        let a = CMatrix::from_rows(&[
            vec![C::new(1.0, 1.0), C::new(2.0, 0.0)],
            vec![C::new(0.0, 2.0), C::new(1.0, -1.0)],
        ])
        .unwrap();
        // (1+i)(1-i) - 2*(2i) = 2 - 4i
        let d = complex_det(&a).unwrap();
        assert!((d - C::new(2.0, -4.0)).norm() < 1e-14);

        let s = CMatrix::from_rows(&[
            vec![C::new(1.0, 0.0), C::new(2.0, 0.0)],
            vec![C::new(2.0, 0.0), C::new(4.0, 0.0)],
        ])
        .unwrap();
        assert!(normalized_det(&s).unwrap() < 1e-15);
        let ns = null_space(&s, 1e-8).unwrap();
        assert_eq!(ns.cols(), 1);
        let image = s.apply(&ns.column(0));
        assert!(image.iter().all(|z| z.norm() < 1e-12));
    }
}
