//! Weighted point configurations on S^4 and their conformal barycenter.
//!
//! A configuration `(u_i, r_i)` with `sum r_i = 2` is the measure
//! `mu = 1/2 sum r_i delta_{u_i}`. Its center of mass is `C(mu) = 1/2 sum r_i u_i`.
//!
//! The conformal barycenter `B(mu)` is the point `y` of the open ball such that
//! moving `y` to the origin by a Mobius map also moves the center of mass to
//! the origin. In the ball coordinates used by [`crate::moebius`] the
//! translation taking `y` to `0` acts on a boundary point `u` by
//!
//! ```text
//! u' = (s u + ((y.u)/(1 + s) - 1) y) / (1 - y.u),    s = sqrt(1 - |y|^2)
//! ```
//!
//! and [`conformal_field`] is `F(y) = 1/2 sum r_i u_i'`. `F(0) = C(mu)`, and
//! `B(g mu) = g B(mu)` holds for every `g` in `SL(2, H)`.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{mobius_s4, s4_to_hp1, BallPoint, S4Point, Sl2hElement};
use crate::scalar::Real;
use crate::vector::{self, Vec5};

/// Points closer than this (chordal distance) form one atom.
pub const ATOM_MERGE_TOL: f64 = 1e-9;

/// Newton iteration cap.
pub const MAX_ITERATIONS: usize = 200;

/// Starting points are clipped to this radius.
const START_RADIUS: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct WeightedConfiguration<T> {
    weights: Vec<T>,
    points: Vec<S4Point<T>>,
}

impl<T: Real> WeightedConfiguration<T> {
    /// Weights must be positive; they are rescaled to sum to 2.
    pub fn new(weights: Vec<T>, points: Vec<S4Point<T>>) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty configuration".into()));
        }
        if let Some(w) = weights
            .iter()
            .find(|w| !(**w > T::zero()) || !w.is_finite())
        {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        let total = weights.iter().fold(T::zero(), |a, &w| a + w);
        let two = T::lit(2.0);
        let weights = if (total - two).abs() <= T::lit(8.0) * T::epsilon() {
            weights
        } else {
            weights.into_iter().map(|w| w * two / total).collect()
        };
        Ok(WeightedConfiguration { weights, points })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn points(&self) -> &[S4Point<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `C(mu) = 1/2 sum r_i u_i`
    pub fn center_of_mass(&self) -> Vec5<T> {
        center_of_mass(self)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for WeightedConfiguration<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
        struct Raw<T> {
            weights: Vec<T>,
            points: Vec<S4Point<T>>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        Self::new(raw.weights, raw.points).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct BarycenterResult<T> {
    pub barycenter: BallPoint<T>,
    /// `|F(B)|` at the returned point.
    pub residual: T,
    pub iterations: usize,
    /// `|F|` at the start and after each accepted step.
    pub residual_history: Vec<T>,
}

pub fn center_of_mass<T: Real>(cfg: &WeightedConfiguration<T>) -> Vec5<T> {
    let half = T::lit(0.5);
    cfg.points
        .iter()
        .zip(&cfg.weights)
        .fold(vector::zero(), |acc, (p, &r)| {
            vector::axpy(&acc, half * r, p.coords())
        })
}

/// Largest total weight carried by a single atom (points merged at
/// [`ATOM_MERGE_TOL`]).
pub fn max_atom_weight<T: Real>(cfg: &WeightedConfiguration<T>) -> T {
    let n = cfg.len();
    let tol = T::lit(ATOM_MERGE_TOL);
    // union-find over the "closer than tol" graph
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if vector::dist(cfg.points[i].coords(), cfg.points[j].coords()) < tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut sums = vec![T::zero(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        sums[root] += cfg.weights[i];
    }
    sums.into_iter().fold(T::zero(), T::max)
}

/// Every atom carries total weight strictly below 1 (half the total mass).
pub fn is_stable<T: Real>(cfg: &WeightedConfiguration<T>) -> bool {
    max_atom_weight(cfg) < T::one()
}

fn check_interior<T: Real>(y: &BallPoint<T>) -> Result<()> {
    let n = y.norm();
    if n < T::one() {
        Ok(())
    } else {
        Err(Error::OutsideBall { norm: n.as_f64() })
    }
}

/// `1/2 sum ((1 - |y|^2) / |y - u_i|^2)^4 r_i (u_i - y)`.
///
/// The orientation `u_i - y` makes the value at the origin the center of mass.
pub fn xi_field<T: Real>(cfg: &WeightedConfiguration<T>, y: &BallPoint<T>) -> Result<Vec5<T>> {
    check_interior(y)?;
    let y = y.coords();
    let half = T::lit(0.5);
    let slack = T::one() - vector::dot(y, y);
    Ok(cfg
        .points
        .iter()
        .zip(&cfg.weights)
        .fold(vector::zero(), |acc, (p, &r)| {
            let diff = vector::sub(p.coords(), y);
            let f = slack / vector::dot(&diff, &diff);
            let f2 = f * f;
            vector::axpy(&acc, half * r * f2 * f2, &diff)
        }))
}

/// Image of the boundary point `u` under the translation taking `y` to `0`.
fn translate<T: Real>(y: &Vec5<T>, s: T, u: &Vec5<T>) -> Vec5<T> {
    let yu = vector::dot(y, u);
    let c = yu / (T::one() + s) - T::one();
    let den = T::one() - yu;
    std::array::from_fn(|a| (s * u[a] + c * y[a]) / den)
}

/// `F(y) = C(T_y mu)` where `T_y` is the translation taking `y` to the origin.
pub fn conformal_field<T: Real>(
    cfg: &WeightedConfiguration<T>,
    y: &BallPoint<T>,
) -> Result<Vec5<T>> {
    check_interior(y)?;
    let y = y.coords();
    let s = (T::one() - vector::dot(y, y)).sqrt();
    let half = T::lit(0.5);
    Ok(cfg
        .points
        .iter()
        .zip(&cfg.weights)
        .fold(vector::zero(), |acc, (p, &r)| {
            vector::axpy(&acc, half * r, &translate(y, s, p.coords()))
        }))
}

/// `dF_a / dy_b` of [`conformal_field`], row-major.
pub fn conformal_field_jacobian<T: Real>(
    cfg: &WeightedConfiguration<T>,
    y: &BallPoint<T>,
) -> Result<[[T; 5]; 5]> {
    check_interior(y)?;
    let y = y.coords();
    let one = T::one();
    let s = (one - vector::dot(y, y)).sqrt();
    let half = T::lit(0.5);
    let mut jac = [[T::zero(); 5]; 5];
    for (p, &r) in cfg.points.iter().zip(&cfg.weights) {
        let u = p.coords();
        let yu = vector::dot(y, u);
        let c = yu / (one + s) - one;
        let den = one - yu;
        // ds/dy = -y/s;  d(yu/(1+s))/dy = u/(1+s) + yu y / (s (1+s)^2)
        let k = yu / (s * (one + s) * (one + s));
        let num: Vec5<T> = std::array::from_fn(|a| s * u[a] + c * y[a]);
        for a in 0..5 {
            for b in 0..5 {
                let dc = u[b] / (one + s) + k * y[b];
                let mut dn = -u[a] * y[b] / s + y[a] * dc;
                if a == b {
                    dn += c;
                }
                jac[a][b] += half * r * (dn / den + num[a] * u[b] / (den * den));
            }
        }
    }
    Ok(jac)
}

/// Tries `y + t step` for `t = 1, 1/2, ...` and returns the first point
/// inside the ball with a strictly smaller residual.
fn line_search<T: Real>(
    cfg: &WeightedConfiguration<T>,
    y: &Vec5<T>,
    step: &Vec5<T>,
    current: T,
) -> Option<(Vec5<T>, T)> {
    let mut t = T::one();
    for _ in 0..60 {
        let cand = vector::axpy(y, t, step);
        if vector::norm(&cand) < T::one() {
            let f = conformal_field(cfg, &BallPoint::new(cand).ok()?).ok()?;
            let r = vector::norm(&f);
            if r < current {
                return Some((cand, r));
            }
        }
        t *= T::lit(0.5);
    }
    None
}

/// Zero of [`conformal_field`] by damped Newton.
///
/// Starts from the center of mass clipped to radius 0.9; each step is halved
/// until it stays in the ball and lowers `|F|`. When the Jacobian is singular
/// or the Newton direction fails, falls back to `y + (1 - |y|^2) F(y)`.
/// Converged once `|F| < max(tol, 32 n eps)`.
pub fn conformal_barycenter<T: Real>(
    cfg: &WeightedConfiguration<T>,
    tol: T,
) -> Result<BarycenterResult<T>> {
    let atom = max_atom_weight(cfg);
    if atom >= T::one() {
        return Err(Error::Unstable {
            atom_weight: atom.as_f64(),
        });
    }
    let floor = T::lit(32.0) * T::from_usize(cfg.len()).unwrap_or_else(T::one) * T::epsilon();
    let target = tol.max(floor);

    let mut y = cfg.center_of_mass();
    let r0 = vector::norm(&y);
    let clip = T::lit(START_RADIUS);
    if r0 > clip {
        y = vector::scale(&y, clip / r0);
    }
    let mut f = conformal_field(cfg, &BallPoint::new(y)?)?;
    let mut res = vector::norm(&f);
    let mut history = vec![res];
    let mut iterations = 0;
    while res >= target {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NonConvergence {
                iterations,
                residual: res.as_f64(),
            });
        }
        iterations += 1;
        let yb = BallPoint::new(y)?;
        let newton = conformal_field_jacobian(cfg, &yb)
            .ok()
            .and_then(|j| vector::solve(j, vector::scale(&f, -T::one())));
        let accepted = newton
            .and_then(|d| line_search(cfg, &y, &d, res))
            .or_else(|| {
                let damp = T::one() - vector::dot(&y, &y);
                line_search(cfg, &y, &vector::scale(&f, damp), res)
            });
        match accepted {
            Some((ny, nr)) => {
                y = ny;
                res = nr;
                f = conformal_field(cfg, &BallPoint::new(y)?)?;
                history.push(res);
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: res.as_f64(),
                })
            }
        }
    }
    Ok(BarycenterResult {
        barycenter: BallPoint::new(y)?,
        residual: res,
        iterations,
        residual_history: history,
    })
}

/// Moves every point by the boundary action of `g`; weights are unchanged.
pub fn pushforward<T: Real>(
    g: &Sl2hElement<T>,
    cfg: &WeightedConfiguration<T>,
) -> WeightedConfiguration<T> {
    WeightedConfiguration {
        weights: cfg.weights.clone(),
        points: cfg.points.iter().map(|p| mobius_s4(g, p)).collect(),
    }
}

/// The element taking the interior point `b` to the origin:
/// rotate `b` onto the `e5` axis, dilate along it, rotate back.
pub fn translation_to_origin<T: Real>(b: &BallPoint<T>) -> Sl2hElement<T> {
    let beta = b.norm();
    if !(beta > T::zero()) {
        return Sl2hElement::identity();
    }
    let dir = S4Point::new(*b.coords()).expect("nonzero");
    let k = Sl2hElement::rotation_to_pole(&s4_to_hp1(&dir));
    // diag(s, 1/s) sends beta e5 to 0 when s^4 = (1 + beta) / (1 - beta).
    let s = ((T::one() + beta) / (T::one() - beta)).powf(T::lit(0.25));
    k.adjoint() * Sl2hElement::dilation(s) * k
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct Normalization<T> {
    pub g: Sl2hElement<T>,
    pub configuration: WeightedConfiguration<T>,
    /// `|C(g mu)|`
    pub center_residual: T,
    /// Barycenter solves performed (0 when the input was already centered).
    pub solves: usize,
    /// Solver report of the first solve, if any.
    pub solver: Option<BarycenterResult<T>>,
}

/// Finds `g` with `|C(g mu)| < tol` and returns it with the moved
/// configuration. Returns the identity when `mu` is already centered.
pub fn normalize_configuration<T: Real>(
    cfg: &WeightedConfiguration<T>,
    tol: T,
) -> Result<Normalization<T>> {
    let solver_tol = tol * T::lit(1e-2);
    let mut g = Sl2hElement::identity();
    let mut current = cfg.clone();
    let mut first = None;
    let mut solves = 0;
    loop {
        let c = vector::norm(&current.center_of_mass());
        if c < tol {
            return Ok(Normalization {
                g,
                configuration: current,
                center_residual: c,
                solves,
                solver: first,
            });
        }
        if solves == 3 {
            return Err(Error::NonConvergence {
                iterations: solves,
                residual: c.as_f64(),
            });
        }
        let res = conformal_barycenter(&current, solver_tol)?;
        let step = translation_to_origin(&res.barycenter);
        g = step * g;
        current = pushforward(&g, cfg);
        solves += 1;
        first.get_or_insert(res);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::mobius_ball;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Cfg = WeightedConfiguration<f64>;

    fn cross_polytope() -> Cfg {
        let mut pts = Vec::new();
        for k in 0..5 {
            let mut v = [0.0; 5];
            v[k] = 1.0;
            pts.push(S4Point::new(v).unwrap());
            v[k] = -1.0;
            pts.push(S4Point::new(v).unwrap());
        }
        Cfg::new(vec![1.0; 10], pts).unwrap()
    }

    fn random_cfg(n: usize, rng: &mut ChaCha8Rng) -> Cfg {
        use rand::Rng;
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let p = (0..n).map(|_| S4Point::random(rng)).collect();
        Cfg::new(w, p).unwrap()
    }

    #[test]
    fn weights_normalized_to_two() {
        let c = cross_polytope();
        let s: f64 = c.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn stability_examples() {
        let pts: Vec<_> = (0..4).map(S4Point::<f64>::basis).collect();
        assert!(is_stable(&Cfg::new(vec![0.5; 4], pts).unwrap()));
        let e1 = S4Point::basis(0);
        let tight = Cfg::new(vec![0.5, 0.5, 1.0], vec![e1, e1, S4Point::basis(1)]).unwrap();
        assert!(!is_stable(&tight));
    }

    #[test]
    fn fields_at_origin_are_center_of_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = random_cfg(7, &mut rng);
        let c = cfg.center_of_mass();
        let xi = xi_field(&cfg, &BallPoint::origin()).unwrap();
        let f = conformal_field(&cfg, &BallPoint::origin()).unwrap();
        assert!(vector::dist(&xi, &c) < 1e-15);
        assert!(vector::dist(&f, &c) < 1e-15);
        assert!(xi_field(&cfg, &BallPoint::new([1.0, 0.0, 0.0, 0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn field_is_center_of_translated_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let cfg = random_cfg(6, &mut rng);
            let y = BallPoint::random(0.8, &mut rng);
            let moved = pushforward(&translation_to_origin(&y), &cfg);
            let f = conformal_field(&cfg, &y).unwrap();
            // the two translations differ by a rotation, so compare norms
            assert!((vector::norm(&f) - vector::norm(&moved.center_of_mass())).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = random_cfg(9, &mut rng);
        let y = BallPoint::random(0.7, &mut rng);
        let jac = conformal_field_jacobian(&cfg, &y).unwrap();
        let h = 1e-6;
        for b in 0..5 {
            let mut yp = *y.coords();
            let mut ym = *y.coords();
            yp[b] += h;
            ym[b] -= h;
            let fp = conformal_field(&cfg, &BallPoint::new(yp).unwrap()).unwrap();
            let fm = conformal_field(&cfg, &BallPoint::new(ym).unwrap()).unwrap();
            for a in 0..5 {
                let fd = (fp[a] - fm[a]) / (2.0 * h);
                assert!(
                    (fd - jac[a][b]).abs() < 1e-7,
                    "({a},{b}): {fd} vs {}",
                    jac[a][b]
                );
            }
        }
    }

    #[test]
    fn symmetric_configuration_has_zero_barycenter() {
        let r = conformal_barycenter(&cross_polytope(), 1e-12).unwrap();
        assert!(r.barycenter.norm() < 1e-12);
    }

    #[test]
    fn barycenter_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let cfg = random_cfg(8, &mut rng);
            let g = Sl2hElement::random(&mut rng);
            let b = conformal_barycenter(&cfg, 1e-12).unwrap().barycenter;
            let gb = conformal_barycenter(&pushforward(&g, &cfg), 1e-12)
                .unwrap()
                .barycenter;
            assert!(vector::dist(mobius_ball(&g, &b).coords(), gb.coords()) < 1e-8);
        }
    }

    #[test]
    fn residuals_decrease() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cfg = pushforward(&Sl2hElement::random(&mut rng), &random_cfg(12, &mut rng));
        let r = conformal_barycenter(&cfg, 1e-12).unwrap();
        assert!(r.residual_history.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(r.residual_history.len(), r.iterations + 1);
    }

    #[test]
    fn unstable_is_rejected() {
        let e1 = S4Point::basis(0);
        let cfg = Cfg::new(
            vec![1.0, 0.5, 0.5],
            vec![e1, S4Point::basis(1), S4Point::basis(2)],
        )
        .unwrap();
        assert!(matches!(
            conformal_barycenter(&cfg, 1e-12),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn normalization_centers_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = random_cfg(20, &mut rng);
        let n = normalize_configuration(&cfg, 1e-9).unwrap();
        assert!(vector::norm(&n.configuration.center_of_mass()) < 1e-9);
        let again = normalize_configuration(&n.configuration, 1e-9).unwrap();
        assert_eq!(again.g, Sl2hElement::identity());
        assert_eq!(again.solves, 0);
    }

    #[test]
    fn translation_sends_point_to_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let y = BallPoint::random(0.99, &mut rng);
            let g = translation_to_origin(&y);
            assert!(mobius_ball(&g, &y).norm() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = cross_polytope();
        let s = serde_json::to_string(&cfg).unwrap();
        assert!(s.starts_with("{\"weights\":[0.2,"));
        let back: Cfg = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<Cfg>("{\"weights\":[1.0],\"points\":[]}").is_err());
    }
}
