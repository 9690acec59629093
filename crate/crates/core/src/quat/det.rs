use super::linalg::complex_det;
use super::matrix::QuatMatrix;
use super::quaternion::Quaternion;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dieudonne determinant of `[[a, b], [c, d]]` in closed form:
/// `D^2 = |a|^2 |d|^2 + |b|^2 |c|^2 - 2 Re(a conj(c) d conj(b))`.
///
/// Equals `|det nu(g)|^(1/2)`; reduces to `|ad - bc|` when the entries commute.
pub fn dieudonne_det2<T: Real>(
    a: Quaternion<T>,
    b: Quaternion<T>,
    c: Quaternion<T>,
    d: Quaternion<T>,
) -> T {
    let cross = (a * c.conj() * d * b.conj()).w;
    let sq = a.norm_sqr() * d.norm_sqr() + b.norm_sqr() * c.norm_sqr() - (cross + cross);
    sq.max(T::zero()).sqrt()
}

/// Dieudonne determinant of a square quaternionic matrix, `|det nu(A)|^(1/2)`.
pub fn dieudonne_det<T: Real>(m: &QuatMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 2 {
        return Ok(dieudonne_det2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]));
    }
    Ok(complex_det(&m.nu())?.norm().sqrt())
}
