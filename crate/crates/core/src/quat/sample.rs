//! Seeded sampling. Every function takes the generator by reference; there
//! is no global RNG state.

use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::QuatMatrix;
use super::quaternion::Quaternion;
use crate::scalar::Real;

/// One standard normal draw.
pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Quaternion with i.i.d. standard normal coefficients.
pub fn random_quaternion<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Quaternion<T> {
    Quaternion::new(gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng))
}

/// Uniform point on the unit sphere S^3.
pub fn random_unit_quaternion<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Quaternion<T> {
    loop {
        if let Some(q) = random_quaternion::<T, R>(rng).normalized() {
            return q;
        }
    }
}

/// Uniform point on the unit sphere in `R^dim`.
pub fn random_unit_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<T> {
    loop {
        let v: Vec<T> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        if n > T::lit(1e-6) {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn random_quaternion_matrix<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> QuatMatrix<T> {
    QuatMatrix::from_fn(rows, cols, |_, _| random_quaternion(rng))
}

/// Random element of Sp(n): quaternionic Gram-Schmidt on the columns of a
/// Gaussian matrix. Scalars act on the right, so the projection of `v` on a
/// unit column `u` is `u (u* v)`.
pub fn random_symplectic<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> QuatMatrix<T> {
    'retry: loop {
        let g = random_quaternion_matrix::<T, R>(n, n, rng);
        let mut cols: Vec<Vec<Quaternion<T>>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = g.column(j);
            for _ in 0..2 {
                for u in &cols {
                    let c = u
                        .iter()
                        .zip(&v)
                        .fold(Quaternion::zero(), |acc, (a, b)| acc + a.conj() * *b);
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= *ui * c;
                    }
                }
            }
            let norm = v.iter().fold(T::zero(), |a, q| a + q.norm_sqr()).sqrt();
            if norm < T::lit(1e-6) {
                continue 'retry;
            }
            cols.push(v.into_iter().map(|q| q / norm).collect());
        }
        return QuatMatrix::from_fn(n, n, |i, j| cols[j][i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symplectic_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            let u = random_symplectic::<f64, _>(n, &mut rng);
            let err = (&(&u.adjoint() * &u) - &QuatMatrix::identity(n)).frobenius();
            assert!(err < 1e-12, "n = {n}: {err}");
        }
    }

    #[test]
    fn n1_gives_unit_quaternion() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_symplectic::<f64, _>(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn seeded_determinism() {
        let a = random_symplectic::<f64, _>(2, &mut ChaCha8Rng::seed_from_u64(42));
        let b = random_symplectic::<f64, _>(2, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }

    #[test]
    fn unit_vectors_have_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = random_unit_vector::<f64, _>(5, &mut rng);
            let n: f64 = v.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }
}
