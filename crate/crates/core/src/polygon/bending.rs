use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{diagonal_lengths, PolygonConfig};
use crate::error::{Error, Result};
use crate::moebius::S4Point;
use crate::quat::gaussian;
use crate::scalar::Real;
use crate::vector::{self, Vec5};

/// Row-major 5x5 rotation matrix.
pub type Rotation5<T> = [[T; 5]; 5];

const ROTATION_TOL: f64 = 1e-10;
const GENERIC_TOL: f64 = 1e-9;

/// Orthonormal basis of R^5 whose first vector is `axis / |axis|`.
fn frame_from<T: Real>(axis: &Vec5<T>) -> [Vec5<T>; 5] {
    let mut basis: Vec<Vec5<T>> = Vec::with_capacity(5);
    if let Some(a) = vector::normalize(axis) {
        basis.push(a);
    }
    let mut cands: Vec<Vec5<T>> = (0..5).map(vector::basis).collect();
    while basis.len() < 5 {
        for c in cands.iter_mut() {
            for b in &basis {
                *c = vector::axpy(c, -vector::dot(c, b), b);
            }
        }
        let (idx, n) = cands
            .iter()
            .map(|c| vector::norm(c))
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("five candidates");
        basis.push(vector::scale(&cands[idx], n.recip()));
        cands.swap_remove(idx);
    }
    std::array::from_fn(|i| basis[i])
}

/// Haar-random rotation of R^m, returned as columns.
fn random_so<T: Real, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<Vec<T>> {
    loop {
        let mut cols: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut ok = true;
        for _ in 0..m {
            let mut v: Vec<T> = (0..m).map(|_| gaussian(rng)).collect();
            for _ in 0..2 {
                for c in &cols {
                    let d = vector::dot(&v, c);
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= d * *ci;
                    }
                }
            }
            let n = vector::norm(&v);
            if n < T::lit(1e-6) {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
        if !ok {
            continue;
        }
        if m > 0 {
            let mut a = vec![vec![T::zero(); m]; m];
            for (j, c) in cols.iter().enumerate() {
                for i in 0..m {
                    a[i][j] = c[i];
                }
            }
            if det_dyn(a) < T::zero() {
                for x in cols[0].iter_mut() {
                    *x = -*x;
                }
            }
        }
        return cols;
    }
}

fn det_dyn<T: Real>(mut a: Vec<Vec<T>>) -> T {
    let m = a.len();
    let mut d = T::one();
    for col in 0..m {
        let piv = (col..m)
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
            a.swap(piv, col);
            d = -d;
        }
        d *= a[col][col];
        for i in (col + 1)..m {
            let f = a[i][col] / a[col][col];
            for j in col..m {
                let v = a[col][j];
                a[i][j] -= f * v;
            }
        }
    }
    d
}

/// Random rotation of R^5 fixing `axis`: Haar-random on the orthogonal
/// complement. A zero axis gives a Haar-random rotation of R^5.
pub fn rotation_fixing<T: Real, R: Rng + ?Sized>(axis: &Vec5<T>, rng: &mut R) -> Rotation5<T> {
    let frame = frame_from(axis);
    let fixed = usize::from(vector::normalize(axis).is_some());
    let m = 5 - fixed;
    let r = random_so::<T, R>(m, rng);
    // K = F diag(I_fixed, R) F^t with F the frame as columns.
    let mut k = [[T::zero(); 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            let mut s = T::zero();
            for i in 0..5 {
                for j in 0..5 {
                    let inner = if i < fixed || j < fixed {
                        if i == j {
                            T::one()
                        } else {
                            T::zero()
                        }
                    } else {
                        r[j - fixed][i - fixed]
                    };
                    s += frame[i][a] * inner * frame[j][b];
                }
            }
            k[a][b] = s;
        }
    }
    k
}

/// Rotates the edges `u_1 .. u_{i+1}` by `k`, which must be a proper rotation
/// fixing the diagonal `d_i = v_{i+2} - v_1` (`i` counted from 1). Equivalently,
/// the vertices `v_2 .. v_{i+1}` turn about the line through `v_1` and `v_{i+2}`.
pub fn bend<T: Real>(p: &PolygonConfig<T>, i: usize, k: &Rotation5<T>) -> Result<PolygonConfig<T>> {
    let n = p.n();
    if i == 0 || i + 3 > n {
        return Err(Error::Dimension(format!(
            "diagonal index {i} outside 1..={}",
            n.saturating_sub(3)
        )));
    }
    let tol = T::lit(ROTATION_TOL);
    let orth = vector::mat_dist(
        &vector::mat_mul(&vector::transpose(k), k),
        &vector::identity(),
    );
    let det = vector::det(*k);
    let d = diagonal_lengths(p).diagonals[i - 1];
    let moved = vector::dist(&vector::mat_apply(k, &d), &d) / T::one().max(vector::norm(&d));
    let residual = orth.max((det - T::one()).abs()).max(moved);
    if !(residual <= tol) {
        return Err(Error::BadRotation {
            residual: residual.as_f64(),
        });
    }
    let edges = p
        .edges()
        .iter()
        .enumerate()
        .map(|(j, u)| {
            if j <= i {
                S4Point::new(vector::mat_apply(k, u.coords()))
            } else {
                Ok(*u)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PolygonConfig::new(p.side_lengths().to_vec(), edges)
}

/// The planar representative with the same side and diagonal lengths.
///
/// Triangles `(l_i, r_{i+2}, l_{i+1})` are laid out in the `e1 e2` plane
/// starting from `v_3 = l_1 e1` with `v_2` on the positive `e2` side. Each new
/// vertex `v_{i+3}` goes on the opposite side of the line through `v_1` and
/// `v_{i+2}` from `v_{i+1}`, so the segment `v_{i+1} v_{i+3}` meets the line
/// carrying `d_i`. The last triangle is `(l_{n-3}, r_{n-1}, r_n)`.
pub fn canonical_planar<T: Real>(p: &PolygonConfig<T>) -> Result<PolygonConfig<T>> {
    let n = p.n();
    if n < 4 {
        return Err(Error::TooFewSides { n, min: 4 });
    }
    let r = p.side_lengths();
    let scale = r.iter().fold(T::zero(), |a, &x| a + x);
    let tol = T::lit(GENERIC_TOL) * scale;
    let closure = p.closure_residual();
    if closure > T::lit(1e-8) * scale {
        return Err(Error::ClosureViolation {
            residual: closure.as_f64(),
        });
    }
    let ell = diagonal_lengths(p).lengths;
    for (k, &l) in ell.iter().enumerate() {
        if l <= tol {
            return Err(Error::NotGeneric {
                diagonal: k + 1,
                reason: format!("diagonal length {l} vanishes"),
            });
        }
    }
    for k in 0..ell.len().saturating_sub(1) {
        if (ell[k] + r[k + 2] - ell[k + 1]).abs() <= tol {
            return Err(Error::NotGeneric {
                diagonal: k + 1,
                reason: format!("l_{} + r_{} = l_{} (aligned triangle)", k + 1, k + 3, k + 2),
            });
        }
    }

    // Planar vertices as (x, y); v[0] = v_1 = origin.
    let mut v: Vec<[T; 2]> = Vec::with_capacity(n);
    v.push([T::zero(), T::zero()]);
    let third = [ell[0], T::zero()];
    let (x, h) = apex(ell[0], r[0], r[1]);
    v.push([x, h]);
    v.push(third);
    // targets[i] = |v_{i+3} - v_1| for the vertex placed at step i
    let mut targets: Vec<T> = ell[1..].to_vec();
    targets.push(r[n - 1]);
    for (step, &target) in targets.iter().enumerate() {
        // place v_{step+4} (1-based) from the diagonal v_1 -> v_{step+3}
        let base = v[step + 2];
        let prev = v[step + 1];
        let len = (base[0] * base[0] + base[1] * base[1]).sqrt();
        let e = [base[0] / len, base[1] / len];
        let nrm = [-e[1], e[0]];
        let side = prev[0] * nrm[0] + prev[1] * nrm[1];
        // distance `target` from v_1 and r_{step+3} from base
        let (x, h) = apex(len, target, r[step + 2]);
        let h = if side > T::zero() { -h } else { h };
        v.push([x * e[0] + h * nrm[0], x * e[1] + h * nrm[1]]);
    }
    let verts: Vec<Vec5<T>> = v
        .iter()
        .map(|q| [q[0], q[1], T::zero(), T::zero(), T::zero()])
        .collect();
    let mut edges = Vec::with_capacity(n);
    for k in 0..n {
        edges.push(S4Point::new(vector::sub(&verts[(k + 1) % n], &verts[k]))?);
    }
    PolygonConfig::new(r.to_vec(), edges)
}

/// Apex of a triangle on the base `[0, base]` of the x axis with side `a`
/// from the origin and `b` from the other end: `(x, h)` with `h >= 0`.
fn apex<T: Real>(base: T, a: T, b: T) -> (T, T) {
    let x = (base * base + a * a - b * b) / (base + base);
    let h = (a * a - x * x).max(T::zero()).sqrt();
    (x, h)
}

/// Dimension count of the action-angle chart on generic polygons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleChart {
    /// `1 + 2 + 3 (n - 5) = 3n - 12`
    pub angles: usize,
    /// `n - 3` diagonal lengths
    pub actions: usize,
    /// `4n - 15`
    pub total: usize,
}

pub fn angle_chart_dims(n: usize) -> Result<AngleChart> {
    if n < 5 {
        return Err(Error::TooFewSides { n, min: 5 });
    }
    let angles = 1 + 2 + 3 * (n - 5);
    let actions = n - 3;
    Ok(AngleChart {
        angles,
        actions,
        total: angles + actions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{classify, sample_closed, SamplerOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lengths(p: &PolygonConfig<f64>) -> Vec<f64> {
        diagonal_lengths(p).lengths
    }

    fn assert_same_data(a: &PolygonConfig<f64>, b: &PolygonConfig<f64>, tol: f64) {
        assert_eq!(a.side_lengths(), b.side_lengths());
        for (x, y) in lengths(a).iter().zip(lengths(b)) {
            assert!((x - y).abs() < tol, "{x} vs {y}");
        }
        assert!(b.closure_residual() < tol);
    }

    #[test]
    fn rotation_fixing_fixes_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let axis = [0.3, -1.0, 2.0, 0.1, 0.5];
        let k = rotation_fixing(&axis, &mut rng);
        assert!(vector::dist(&vector::mat_apply(&k, &axis), &axis) < 1e-14);
        assert!((vector::det(k) - 1.0f64).abs() < 1e-13);
        let kt = vector::mat_mul(&vector::transpose(&k), &k);
        assert!(vector::mat_dist(&kt, &vector::identity()) < 1e-14);
    }

    #[test]
    fn identity_bend_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = sample_closed(
            &[1.0, 1.2, 0.8, 1.1, 0.9],
            &SamplerOptions::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(bend(&p, 1, &vector::identity()).unwrap(), p);
    }

    #[test]
    fn bends_preserve_lengths_and_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = sample_closed(
            &[1.0, 1.2, 0.8, 1.1, 0.9, 1.3],
            &SamplerOptions::default(),
            &mut rng,
        )
        .unwrap();
        for i in 1..=3 {
            let d = diagonal_lengths(&p).diagonals[i - 1];
            let k1 = rotation_fixing(&d, &mut rng);
            let k2 = rotation_fixing(&d, &mut rng);
            let once = bend(&p, i, &k1).unwrap();
            assert_same_data(&p, &once, 1e-10);
            let twice = bend(&once, i, &k2).unwrap();
            let product = bend(&p, i, &vector::mat_mul(&k2, &k1)).unwrap();
            for (a, b) in twice.edges().iter().zip(product.edges()) {
                assert!(vector::dist(a.coords(), b.coords()) < 1e-12);
            }
        }
    }

    #[test]
    fn bend_rejects_bad_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = sample_closed(&[1.0; 5], &SamplerOptions::default(), &mut rng).unwrap();
        let k = rotation_fixing(&[1.0, 0.0, 0.0, 0.0, 0.0], &mut rng);
        assert!(matches!(bend(&p, 1, &k), Err(Error::BadRotation { .. })));
        assert!(bend(&p, 3, &vector::identity()).is_err());
    }

    #[test]
    fn planar_quadrilateral_bends_out_of_plane() {
        let verts: Vec<Vec5<f64>> = [(0.0, 0.0), (1.0, -0.6), (2.0, 0.0), (0.8, 1.1)]
            .iter()
            .map(|&(x, y)| [x, y, 0.0, 0.0, 0.0])
            .collect();
        let p = PolygonConfig::from_vertices(&verts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = rotation_fixing(&diagonal_lengths(&p).diagonals[0], &mut rng);
        let q = bend(&p, 1, &k).unwrap();
        assert_same_data(&p, &q, 1e-12);
        assert_eq!(classify(&q, 1e-8).span_rank, 3);
    }

    #[test]
    fn canonical_planar_keeps_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 5..9 {
            let r: Vec<f64> = (0..n).map(|k| 1.0 + 0.1 * k as f64).collect();
            let p = sample_closed(&r, &SamplerOptions::default(), &mut rng).unwrap();
            let c = canonical_planar(&p).unwrap();
            assert_same_data(&p, &c, 1e-10);
            assert!(classify(&c, 1e-8).span_rank <= 2);
            // idempotent up to congruence: same vertices here, since the frame is fixed
            let cc = canonical_planar(&c).unwrap();
            for (a, b) in c.vertices().iter().zip(cc.vertices()) {
                assert!(vector::dist(a, &b) < 1e-9);
            }
        }
    }

    #[test]
    fn canonical_rule_segments_cross_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = sample_closed(
            &[1.0, 0.9, 1.4, 1.1, 0.7, 1.2, 1.0],
            &SamplerOptions::default(),
            &mut rng,
        )
        .unwrap();
        let c = canonical_planar(&p).unwrap();
        let v = c.vertices();
        for i in 0..(c.n() - 3) {
            // v_{i+2} and v_{i+4} (1-based) lie on opposite sides of the line through v_1, v_{i+3}
            let d = v[i + 2];
            let cross = |q: &Vec5<f64>| d[0] * q[1] - d[1] * q[0];
            let next = if i + 3 < c.n() { v[i + 3] } else { v[0] };
            assert!(cross(&v[i + 1]) * cross(&next) <= 1e-12);
        }
    }

    #[test]
    fn zero_diagonal_is_not_generic() {
        let verts: Vec<Vec5<f64>> = [
            (0.0, 0.0, 0.0),
            (1.0, 0.0, 0.0),
            (0.0, 0.0, 0.0),
            (0.0, 1.0, 0.5),
            (0.5, 0.5, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| [x, y, z, 0.0, 0.0])
        .collect();
        // v_3 = v_1, so l_1 = 0
        let p = PolygonConfig::from_vertices(&verts).unwrap();
        assert!(matches!(
            canonical_planar(&p),
            Err(Error::NotGeneric { diagonal: 1, .. })
        ));
    }

    #[test]
    fn chart_dimensions() {
        assert_eq!(
            angle_chart_dims(5).unwrap(),
            AngleChart {
                angles: 3,
                actions: 2,
                total: 5
            }
        );
        assert_eq!(
            angle_chart_dims(6).unwrap(),
            AngleChart {
                angles: 6,
                actions: 3,
                total: 9
            }
        );
        assert!(angle_chart_dims(4).is_err());
    }
}
