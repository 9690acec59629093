use rand::Rng;

use super::weights::check_weights;
use super::PolygonConfig;
use crate::error::{Error, Result};
use crate::moebius::S4Point;
use crate::scalar::Real;
use crate::vector::{self, Vec5};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerOptions<T> {
    /// Required closure residual `|sum r_i u_i|`.
    pub tol: T,
    /// Projection steps per attempt.
    pub max_steps: usize,
    /// Fresh random starts before giving up.
    pub max_attempts: usize,
}

impl<T: Real> Default for SamplerOptions<T> {
    fn default() -> Self {
        SamplerOptions {
            tol: T::lit(1e-10),
            max_steps: 500,
            max_attempts: 50,
        }
    }
}

/// Random closed polygon with side lengths `r`.
///
/// Draws `u_i` uniformly on S^4 and projects onto `sum r_i u_i = 0` by
/// Gauss-Newton on the product of spheres: with `P_i = I - u_i u_i^t`, the
/// minimum-norm tangent correction is `delta_i = r_i P_i lambda` where
/// `(sum r_i^2 P_i) lambda = -sum r_i u_i`. Each step is followed by
/// renormalization and halved until the residual drops.
pub fn sample_closed<T: Real, R: Rng + ?Sized>(
    r: &[T],
    opts: &SamplerOptions<T>,
    rng: &mut R,
) -> Result<PolygonConfig<T>> {
    let total = r.iter().fold(T::zero(), |a, &x| a + x);
    let max = r.iter().fold(T::zero(), |a, &x| a.max(x));
    if !(max + max <= total) {
        return Err(Error::Inadmissible {
            max: max.as_f64(),
            total: total.as_f64(),
        });
    }
    if r.len() <= super::weights::MAX_EXHAUSTIVE_SIDES {
        check_weights(r)?;
    }
    let target = opts.tol * T::lit(1e-2);
    let mut best = T::infinity();
    for _ in 0..opts.max_attempts {
        let mut u: Vec<Vec5<T>> = (0..r.len())
            .map(|_| *S4Point::<T>::random(rng).coords())
            .collect();
        let mut res = residual(r, &u);
        for _ in 0..opts.max_steps {
            if res < target {
                break;
            }
            match project_step(r, &u, res) {
                Some((next, next_res)) => {
                    u = next;
                    res = next_res;
                }
                None => break,
            }
        }
        best = best.min(res);
        if res < opts.tol {
            let edges = u
                .into_iter()
                .map(S4Point::new)
                .collect::<Result<Vec<_>>>()?;
            return PolygonConfig::new(r.to_vec(), edges);
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_attempts * opts.max_steps,
        residual: best.as_f64(),
    })
}

fn closure<T: Real>(r: &[T], u: &[Vec5<T>]) -> Vec5<T> {
    u.iter()
        .zip(r)
        .fold(vector::zero(), |acc, (ui, &ri)| vector::axpy(&acc, ri, ui))
}

fn residual<T: Real>(r: &[T], u: &[Vec5<T>]) -> T {
    vector::norm(&closure(r, u))
}

fn project_step<T: Real>(r: &[T], u: &[Vec5<T>], res: T) -> Option<(Vec<Vec5<T>>, T)> {
    let s = closure(r, u);
    let mut m = [[T::zero(); 5]; 5];
    for (ui, &ri) in u.iter().zip(r) {
        let w = ri * ri;
        for a in 0..5 {
            m[a][a] += w;
            for b in 0..5 {
                m[a][b] -= w * ui[a] * ui[b];
            }
        }
    }
    let lambda = vector::solve(m, vector::scale(&s, -T::one()))?;
    let deltas: Vec<Vec5<T>> = u
        .iter()
        .zip(r)
        .map(|(ui, &ri)| {
            let along = vector::dot(ui, &lambda);
            std::array::from_fn(|a| ri * (lambda[a] - along * ui[a]))
        })
        .collect();
    let mut t = T::one();
    for _ in 0..30 {
        let cand: Option<Vec<Vec5<T>>> = u
            .iter()
            .zip(&deltas)
            .map(|(ui, di)| vector::normalize(&vector::axpy(ui, t, di)))
            .collect();
        if let Some(cand) = cand {
            let cr = residual(r, &cand);
            if cr < res {
                return Some((cand, cr));
            }
        }
        t *= T::lit(0.5);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equilateral_hexagon_closes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = sample_closed(&[1.0; 6], &SamplerOptions::default(), &mut rng).unwrap();
        assert!(p.closure_residual() < 1e-10);
    }

    #[test]
    fn seeded_determinism() {
        let r = [1.0, 2.0, 1.5, 0.7, 1.1];
        let a = sample_closed(
            &r,
            &SamplerOptions::default(),
            &mut ChaCha8Rng::seed_from_u64(3),
        )
        .unwrap();
        let b = sample_closed(
            &r,
            &SamplerOptions::default(),
            &mut ChaCha8Rng::seed_from_u64(3),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inadmissible_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err =
            sample_closed(&[3.0, 1.0, 1.0, 0.5], &SamplerOptions::default(), &mut rng).unwrap_err();
        assert!(matches!(err, Error::Inadmissible { .. }));
    }
}
