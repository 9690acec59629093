//! The quaternionic projective line and hyperbolic 5-space.
//!
//! Three models of the same space are kept in sync:
//!
//! * [`HP1Point`]: homogeneous coordinates `[q1 : q2]`, scalars acting on the right;
//! * [`HalfSpacePoint`]: `(v, x5)` with `v` a quaternion and `x5 >= 0`, plus a
//!   tagged point at infinity;
//! * [`BallPoint`] / [`S4Point`]: the closed unit ball in R^5 and its boundary.
//!
//! `SL(2, H)` acts on all of them. Internally the ball action goes through the
//! positive Hermitian matrix `P = I + [[-y5, y'], [conj(y'), y5]]`, on which
//! `g` acts by `P -> g P g*`. The same formula covers interior and boundary
//! points (on the boundary `P = 2 w w*` for a unit representative `w`).

use std::ops::Mul;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quat::{dieudonne_det2, random_quaternion, random_symplectic, QuatMatrix, Quaternion};
use crate::scalar::Real;
use crate::vector::{self, Vec5};

type Q<T> = Quaternion<T>;

// ---------------------------------------------------------------------------
// group elements

/// `g = [[a, b], [c, d]]` with Dieudonne determinant 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2hElement<T> {
    a: Quaternion<T>,
    b: Quaternion<T>,
    c: Quaternion<T>,
    d: Quaternion<T>,
}

impl<T: Real> Sl2hElement<T> {
    /// Rescales `[[a, b], [c, d]]` to determinant 1. Fails on singular input.
    pub fn new(a: Q<T>, b: Q<T>, c: Q<T>, d: Q<T>) -> Result<Self> {
        let det = dieudonne_det2(a, b, c, d);
        let scale = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        if !(det > T::lit(1e-14) * scale) {
            return Err(Error::RankDeficient { expected: 2 });
        }
        let s = det.sqrt().recip();
        Ok(Self::raw(a * s, b * s, c * s, d * s))
    }

    fn raw(a: Q<T>, b: Q<T>, c: Q<T>, d: Q<T>) -> Self {
        Sl2hElement { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(Q::one(), Q::zero(), Q::zero(), Q::one())
    }

    /// `diag(s, 1/s)` for real `s > 0`.
    pub fn dilation(s: T) -> Self {
        Self::raw(Q::real(s), Q::zero(), Q::zero(), Q::real(s.recip()))
    }

    pub fn from_matrix(m: &QuatMatrix<T>) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::Dimension(format!(
                "group element must be 2x2, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Self::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    }

    pub fn to_matrix(&self) -> QuatMatrix<T> {
        QuatMatrix::from_fn(2, 2, |i, j| self.entries()[2 * i + j])
    }

    /// `[a, b, c, d]`
    pub fn entries(&self) -> [Q<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> T {
        dieudonne_det2(self.a, self.b, self.c, self.d)
    }

    pub fn compose(&self, h: &Self) -> Self {
        Self::raw(
            self.a * h.a + self.b * h.c,
            self.a * h.b + self.b * h.d,
            self.c * h.a + self.d * h.c,
            self.c * h.b + self.d * h.d,
        )
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::raw(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .to_matrix()
            .inverse()
            .expect("determinant-one elements are invertible");
        Self::raw(inv[(0, 0)], inv[(0, 1)], inv[(1, 0)], inv[(1, 1)])
    }

    /// `|g* g - I|_F`; zero exactly on Sp(2).
    pub fn symplectic_defect(&self) -> T {
        let m = self.to_matrix();
        (&(&m.adjoint() * &m) - &QuatMatrix::identity(2)).frobenius()
    }

    /// `g (q1, q2)^t`
    pub fn apply(&self, q1: Q<T>, q2: Q<T>) -> (Q<T>, Q<T>) {
        (self.a * q1 + self.b * q2, self.c * q1 + self.d * q2)
    }

    /// Gaussian entries rescaled to determinant 1.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let e: [Q<T>; 4] = std::array::from_fn(|_| random_quaternion(rng));
            if let Ok(g) = Self::new(e[0], e[1], e[2], e[3]) {
                return g;
            }
        }
    }

    /// Random element of the maximal compact subgroup Sp(2).
    pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u = random_symplectic::<T, R>(2, rng);
        Self::raw(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
    }

    /// An Sp(2) element sending the boundary point `p` to `e5 = [0 : 1]`.
    pub fn rotation_to_pole(p: &HP1Point<T>) -> Self {
        let (q1, q2) = (p.q1, p.q2);
        // Complete w = (q1, q2) to an orthonormal basis; U = [w_perp | w].
        let seed = if q1.norm_sqr() <= q2.norm_sqr() {
            (Q::one(), Q::zero())
        } else {
            (Q::zero(), Q::one())
        };
        let c = q1.conj() * seed.0 + q2.conj() * seed.1;
        let (u1, u2) = (seed.0 - q1 * c, seed.1 - q2 * c);
        let n = (u1.norm_sqr() + u2.norm_sqr()).sqrt();
        let (u1, u2) = (u1 / n, u2 / n);
        // U maps e2 to w, so U* maps w to e2.
        Self::raw(u1, q1, u2, q2).adjoint()
    }
}

impl<T: Real> Mul for Sl2hElement<T> {
    type Output = Self;
    fn mul(self, h: Self) -> Self {
        self.compose(&h)
    }
}

impl<T: Real + Serialize> Serialize for Sl2hElement<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Sl2hElement<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c, d] = <[Q<T>; 4]>::deserialize(d)?;
        let g = Self::raw(a, b, c, d);
        let det = g.det();
        if (det - T::one()).abs() > T::lit(1e-8) {
            return Err(serde::de::Error::custom(format!(
                "group element has Dieudonne determinant {det}, expected 1"
            )));
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// points

/// A point `[q1 : q2]` of HP^1, stored with `|q1|^2 + |q2|^2 = 1` and the
/// first nonzero coordinate in the order `q2, q1` real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HP1Point<T> {
    q1: Quaternion<T>,
    q2: Quaternion<T>,
}

impl<T: Real> HP1Point<T> {
    pub fn new(q1: Q<T>, q2: Q<T>) -> Result<Self> {
        Self::canonical(q1, q2).ok_or(Error::ZeroVector)
    }

    fn canonical(q1: Q<T>, q2: Q<T>) -> Option<Self> {
        let n = (q1.norm_sqr() + q2.norm_sqr()).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return None;
        }
        let (q1, q2) = (q1 / n, q2 / n);
        let gauge = if q2.norm() > T::epsilon() { q2 } else { q1 };
        let u = gauge.conj() / gauge.norm();
        Some(HP1Point {
            q1: q1 * u,
            q2: q2 * u,
        })
    }

    /// `[v : 1]`
    pub fn from_chart(v: Q<T>) -> Self {
        Self::canonical(v, Q::one()).expect("second coordinate is nonzero")
    }

    /// `[1 : 0]`
    pub fn infinity() -> Self {
        HP1Point {
            q1: Q::one(),
            q2: Q::zero(),
        }
    }

    pub fn q1(&self) -> Q<T> {
        self.q1
    }

    pub fn q2(&self) -> Q<T> {
        self.q2
    }

    /// `v = q1 q2^{-1}`, or `None` at infinity.
    pub fn chart(&self) -> Option<Q<T>> {
        if self.q2.norm() > T::epsilon() {
            Some(self.q1 * self.q2.inverse()?)
        } else {
            None
        }
    }

    pub fn to_s4(&self) -> S4Point<T> {
        hp1_to_s4(self)
    }

    /// Chordal distance between the images on S^4; zero iff the points agree
    /// up to the right action of unit quaternions.
    pub fn distance(&self, other: &Self) -> T {
        vector::dist(self.to_s4().coords(), other.to_s4().coords())
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.distance(other) <= tol
    }
}

impl<T: Real + Serialize> Serialize for HP1Point<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.q1, self.q2].serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for HP1Point<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [q1, q2] = <[Q<T>; 2]>::deserialize(d)?;
        let c = Self::new(q1, q2).map_err(serde::de::Error::custom)?;
        // Keep already-canonical input bit-exact.
        let tol = T::epsilon() * T::from(16.0).unwrap();
        if (c.q1 - q1).norm() <= tol && (c.q2 - q2).norm() <= tol {
            Ok(HP1Point { q1, q2 })
        } else {
            Ok(c)
        }
    }
}

/// A unit vector in R^5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct S4Point<T>(Vec5<T>);

impl<T: Real> S4Point<T> {
    /// Normalizes `v`; fails on the zero vector.
    pub fn new(v: Vec5<T>) -> Result<Self> {
        vector::normalize(&v).map(S4Point).ok_or(Error::ZeroVector)
    }

    /// Keeps `v` bit for bit; `None` unless `| |v| - 1 | <= 1e-9`.
    pub fn from_unit(v: Vec5<T>) -> Option<Self> {
        ((vector::norm(&v) - T::one()).abs() <= T::lit(1e-9)).then_some(S4Point(v))
    }

    pub fn basis(k: usize) -> Self {
        S4Point(vector::basis(k))
    }

    pub fn coords(&self) -> &Vec5<T> {
        &self.0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v = crate::quat::random_unit_vector::<T, R>(5, rng);
        S4Point(std::array::from_fn(|i| v[i]))
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for S4Point<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <Vec5<T>>::deserialize(d)?;
        S4Point::from_unit(v).ok_or_else(|| {
            serde::de::Error::custom(format!("point on S^4 has norm {}", vector::norm(&v)))
        })
    }
}

/// A point of the closed unit ball in R^5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BallPoint<T>(Vec5<T>);

impl<T: Real> BallPoint<T> {
    /// Accepts `|y| <= 1` up to a relative slack of `1e-12`.
    pub fn new(v: Vec5<T>) -> Result<Self> {
        let n = vector::norm(&v);
        if !(n <= T::one() + T::lit(1e-12)) {
            return Err(Error::OutsideBall { norm: n.as_f64() });
        }
        Ok(BallPoint(v))
    }

    pub fn origin() -> Self {
        BallPoint(vector::zero())
    }

    pub fn coords(&self) -> &Vec5<T> {
        &self.0
    }

    pub fn norm(&self) -> T {
        vector::norm(&self.0)
    }

    /// Within `tol` of the unit sphere.
    pub fn is_boundary(&self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    /// Uniform in the ball of radius `radius`.
    pub fn random<R: Rng + ?Sized>(radius: T, rng: &mut R) -> Self {
        let dir = S4Point::<T>::random(rng);
        let t = T::lit(rng.random::<f64>()).powf(T::lit(0.2)) * radius;
        BallPoint(vector::scale(dir.coords(), t))
    }
}

impl<T: Real> From<S4Point<T>> for BallPoint<T> {
    fn from(p: S4Point<T>) -> Self {
        BallPoint(p.0)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for BallPoint<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <Vec5<T>>::deserialize(d)?;
        Self::new(v).map_err(serde::de::Error::custom)
    }
}

/// Upper half-space `{x5 >= 0}` together with its point at infinity.
/// `height == 0` is the boundary copy of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    rename_all = "snake_case",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub enum HalfSpacePoint<T> {
    Finite { v: Quaternion<T>, height: T },
    Infinity,
}

impl<T: Real> HalfSpacePoint<T> {
    pub fn new(v: Q<T>, height: T) -> Result<Self> {
        if !(height >= T::zero()) || !height.is_finite() || !v.is_finite() {
            return Err(Error::Dimension(format!(
                "half-space height must be finite and nonnegative, got {height}"
            )));
        }
        Ok(HalfSpacePoint::Finite { v, height })
    }

    pub fn is_boundary(&self) -> bool {
        match self {
            HalfSpacePoint::Finite { height, .. } => height.is_zero(),
            HalfSpacePoint::Infinity => true,
        }
    }
}

// ---------------------------------------------------------------------------
// conversions

/// `[q1 : q2] -> (2 q1 conj(q2), |q2|^2 - |q1|^2) / (|q1|^2 + |q2|^2)`.
///
/// `[0 : 1]` goes to `e5`, `[1 : 1]` to `e1` and `[1 : 0]` to `-e5`.
pub fn hp1_to_s4<T: Real>(p: &HP1Point<T>) -> S4Point<T> {
    let n = p.q1.norm_sqr() + p.q2.norm_sqr();
    let m = (p.q1 * p.q2.conj()) * (T::lit(2.0) / n);
    let y5 = (p.q2.norm_sqr() - p.q1.norm_sqr()) / n;
    S4Point([m.w, m.x, m.y, m.z, y5])
}

pub fn s4_to_hp1<T: Real>(p: &S4Point<T>) -> HP1Point<T> {
    let y = p.coords();
    let m = Q::new(y[0], y[1], y[2], y[3]);
    let half = T::lit(0.5);
    // |q2|^2 = (1 + y5)/2 and 2 q1 conj(q2) = m; pick the better-conditioned chart.
    let (q1, q2) = if y[4] >= T::zero() {
        let q2 = ((T::one() + y[4]) * half).sqrt();
        (m * (half / q2), Q::real(q2))
    } else {
        let q1 = ((T::one() - y[4]) * half).sqrt();
        (Q::real(q1), m.conj() * (half / q1))
    };
    HP1Point::canonical(q1, q2).expect("unit point has a nonzero representative")
}

/// `y' = 2 v / (1 + |x|^2)`, `y5 = (1 - |x|^2) / (1 + |x|^2)`.
pub fn halfspace_to_ball<T: Real>(x: &HalfSpacePoint<T>) -> BallPoint<T> {
    match *x {
        HalfSpacePoint::Infinity => BallPoint(vector::scale(&vector::basis(4), -T::one())),
        HalfSpacePoint::Finite { v, height } => {
            let r2 = v.norm_sqr() + height * height;
            let den = T::one() + r2;
            let m = v * (T::lit(2.0) / den);
            BallPoint([m.w, m.x, m.y, m.z, (T::one() - r2) / den])
        }
    }
}

/// Inverse of [`halfspace_to_ball`]; `-e5` maps to the tagged infinity.
pub fn ball_to_halfspace<T: Real>(y: &BallPoint<T>) -> HalfSpacePoint<T> {
    let c = y.coords();
    let opp = T::one() + c[4];
    let m = Q::new(c[0], c[1], c[2], c[3]);
    if opp <= T::epsilon() && m.norm() <= T::epsilon().sqrt() {
        return HalfSpacePoint::Infinity;
    }
    let slack = T::one() - vector::dot(c, c);
    let height = if slack > T::lit(4.0) * T::epsilon() {
        slack.sqrt() / opp
    } else {
        T::zero()
    };
    HalfSpacePoint::Finite { v: m / opp, height }
}

/// Boundary points only: `[v : 1]` or `[1 : 0]`.
pub fn halfspace_to_hp1<T: Real>(x: &HalfSpacePoint<T>) -> Result<HP1Point<T>> {
    match *x {
        HalfSpacePoint::Infinity => Ok(HP1Point::infinity()),
        HalfSpacePoint::Finite { v, height } if height.is_zero() => Ok(HP1Point::from_chart(v)),
        HalfSpacePoint::Finite { .. } => Err(Error::Dimension(
            "interior half-space point has no HP^1 image".into(),
        )),
    }
}

pub fn hp1_to_halfspace<T: Real>(p: &HP1Point<T>) -> HalfSpacePoint<T> {
    match p.chart() {
        Some(v) => HalfSpacePoint::Finite {
            v,
            height: T::zero(),
        },
        None => HalfSpacePoint::Infinity,
    }
}

// ---------------------------------------------------------------------------
// actions

/// `g [q1 : q2] = [a q1 + b q2 : c q1 + d q2]`.
pub fn mobius_hp1<T: Real>(g: &Sl2hElement<T>, p: &HP1Point<T>) -> HP1Point<T> {
    let (q1, q2) = g.apply(p.q1, p.q2);
    HP1Point::canonical(q1, q2).expect("invertible element maps nonzero vectors to nonzero vectors")
}

/// Half-space action.
///
/// With `x = (v, x5)` and `|x|^2 = |v|^2 + x5^2`:
///
/// ```text
/// v  -> (|x|^2 a c* + b v* c* + a v d* + b d*) / den
/// x5 -> x5 / den,    den = |x|^2 |c|^2 + d v* c* + c v d* + |d|^2
/// ```
///
/// evaluated as `den = |c v + d|^2 + x5^2 |c|^2` and numerator
/// `(a v + b)(c v + d)* + x5^2 a c*`, which is the same expression without the
/// cancellation. On the boundary this is `(a v + b)(c v + d)^{-1}`; boundary
/// points near `g^{-1}(inf)` go through homogeneous coordinates instead.
pub fn mobius_halfspace<T: Real>(g: &Sl2hElement<T>, x: &HalfSpacePoint<T>) -> HalfSpacePoint<T> {
    let (v, h) = match *x {
        HalfSpacePoint::Infinity => {
            return hp1_to_halfspace(&mobius_hp1(g, &HP1Point::infinity()));
        }
        HalfSpacePoint::Finite { v, height } => (v, height),
    };
    let Sl2hElement { a, b, c, d } = *g;
    let h2 = h * h;
    let cvd = c * v + d;
    let den = cvd.norm_sqr() + h2 * c.norm_sqr();
    if h.is_zero() && cvd.norm_sqr() < T::lit(1e-16) * (c.norm_sqr() * v.norm_sqr() + d.norm_sqr())
    {
        return hp1_to_halfspace(&mobius_hp1(g, &HP1Point::from_chart(v)));
    }
    let num = (a * v + b) * cvd.conj() + a * c.conj() * h2;
    HalfSpacePoint::Finite {
        v: num / den,
        height: h / den,
    }
}

/// Ball action `P -> g P g*` with `P = I + [[-y5, y'], [conj(y'), y5]]`.
pub fn mobius_ball<T: Real>(g: &Sl2hElement<T>, y: &BallPoint<T>) -> BallPoint<T> {
    let c = y.coords();
    let m = Q::new(c[0], c[1], c[2], c[3]);
    let p11 = T::one() - c[4];
    let p22 = T::one() + c[4];
    let Sl2hElement { a, b, c: gc, d } = *g;
    // rows of g P
    let r11 = a * p11 + b * m.conj();
    let r12 = a * m + b * p22;
    let r21 = gc * p11 + d * m.conj();
    let r22 = gc * m + d * p22;
    // (g P g*)_{ij} = r_i1 conj(g_j1) + r_i2 conj(g_j2)
    let n11 = (r11 * a.conj() + r12 * b.conj()).w;
    let n12 = r11 * gc.conj() + r12 * d.conj();
    let n22 = (r21 * gc.conj() + r22 * d.conj()).w;
    let tr = n11 + n22;
    let yp = n12 * (T::lit(2.0) / tr);
    BallPoint([yp.w, yp.x, yp.y, yp.z, (n22 - n11) / tr])
}

/// Boundary action on S^4, renormalized against rounding drift.
pub fn mobius_s4<T: Real>(g: &Sl2hElement<T>, p: &S4Point<T>) -> S4Point<T> {
    let y = mobius_ball(g, &BallPoint(p.0));
    S4Point::new(y.0).expect("boundary maps to boundary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type P = HP1Point<f64>;
    type G = Sl2hElement<f64>;

    fn close5(a: &Vec5<f64>, b: &Vec5<f64>, tol: f64) -> bool {
        vector::dist(a, b) < tol
    }

    #[test]
    fn distinguished_points() {
        assert_eq!(
            P::from_chart(Quaternion::zero()).to_s4().coords(),
            &[0.0, 0.0, 0.0, 0.0, 1.0]
        );
        let e1 = P::from_chart(Quaternion::one()).to_s4();
        assert!(close5(e1.coords(), &[1.0, 0.0, 0.0, 0.0, 0.0], 1e-15));
        assert_eq!(P::infinity().to_s4().coords(), &[0.0, 0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn canonical_gauge() {
        let u = Quaternion::new(0.5, 0.5, 0.5, 0.5);
        let p = P::new(
            Quaternion::new(1.0, 2.0, 0.0, 0.0) * u,
            Quaternion::real(2.0) * u,
        )
        .unwrap();
        assert!(p.q2().imag().norm() < 1e-15 && p.q2().w > 0.0);
        assert!((p.q1().norm_sqr() + p.q2().norm_sqr() - 1.0).abs() < 1e-15);
        assert!(P::new(Quaternion::zero(), Quaternion::zero()).is_err());
    }

    #[test]
    fn quarter_turn_on_hp1() {
        let g = G::new(
            Quaternion::zero(),
            Quaternion::one(),
            -Quaternion::one(),
            Quaternion::zero(),
        )
        .unwrap();
        let p = mobius_hp1(&g, &P::from_chart(Quaternion::one()));
        assert!(p.approx_eq(
            &P::new(Quaternion::one(), -Quaternion::one()).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn dilation_on_hp1() {
        let s = 1.7;
        let v = Quaternion::new(0.3, -1.0, 0.2, 0.8);
        let p = mobius_hp1(&G::dilation(s), &P::from_chart(v));
        assert!((p.chart().unwrap() - v * (s * s)).norm() < 1e-14);
    }

    #[test]
    fn dilation_on_halfspace_and_ball() {
        let g = G::dilation(2f64.sqrt());
        let x = HalfSpacePoint::new(Quaternion::zero(), 1.0).unwrap();
        match mobius_halfspace(&g, &x) {
            HalfSpacePoint::Finite { v, height } => {
                assert!(v.norm() < 1e-15);
                assert!((height - 2.0).abs() < 1e-14);
            }
            HalfSpacePoint::Infinity => panic!("finite point sent to infinity"),
        }
        let y = mobius_ball(&g, &BallPoint::origin());
        assert!(close5(y.coords(), &[0.0, 0.0, 0.0, 0.0, -0.6], 1e-15));
    }

    #[test]
    fn symplectic_elements_fix_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let k = G::random_symplectic(&mut rng);
            assert!(mobius_ball(&k, &BallPoint::origin()).norm() < 1e-14);
            let y = BallPoint::random(0.9, &mut rng);
            assert!((mobius_ball(&k, &y).norm() - y.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_to_pole_hits_e5() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let p = S4Point::<f64>::random(&mut rng);
            let k = G::rotation_to_pole(&s4_to_hp1(&p));
            assert!(k.symplectic_defect() < 1e-13);
            assert!(close5(mobius_s4(&k, &p).coords(), &vector::basis(4), 1e-12));
        }
        let k = G::rotation_to_pole(&P::infinity());
        assert!(close5(
            mobius_s4(&k, &S4Point::basis(4).neg()).coords(),
            &vector::basis(4),
            1e-15
        ));
    }

    #[test]
    fn boundary_map_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let p = S4Point::<f64>::random(&mut rng);
            let back = hp1_to_s4(&s4_to_hp1(&p));
            assert!(close5(back.coords(), p.coords(), 1e-14));
        }
    }

    #[test]
    fn infinity_maps_through_lft() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = G::random(&mut rng);
        let [a, _, c, _] = g.entries();
        match mobius_halfspace(&g, &HalfSpacePoint::Infinity) {
            HalfSpacePoint::Finite { v, height } => {
                assert_eq!(height, 0.0);
                assert!((v - a * c.inverse().unwrap()).norm() < 1e-12);
            }
            HalfSpacePoint::Infinity => panic!("generic g moves infinity"),
        }
    }

    #[test]
    fn json_shapes() {
        let g = G::dilation(2.0);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            "[[2.0,0.0,0.0,0.0],[0.0,0.0,0.0,0.0],[0.0,0.0,0.0,0.0],[0.5,0.0,0.0,0.0]]"
        );
        let back: G = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<G>("[[2,0,0,0],[0,0,0,0],[0,0,0,0],[2,0,0,0]]").is_err());

        let p = P::from_chart(Quaternion::new(1.0, 0.0, 0.0, 0.0));
        let back: P = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert!(back.approx_eq(&p, 1e-15));

        let x = HalfSpacePoint::Finite {
            v: Quaternion::real(1.0),
            height: 0.5,
        };
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<HalfSpacePoint<f64>>(&s).unwrap(), x);
        assert_eq!(
            serde_json::to_string(&HalfSpacePoint::<f64>::Infinity).unwrap(),
            "\"infinity\""
        );
    }

    trait Neg5 {
        fn neg(self) -> Self;
    }
    impl Neg5 for S4Point<f64> {
        fn neg(self) -> Self {
            S4Point(vector::scale(&self.0, -1.0))
        }
    }
}
