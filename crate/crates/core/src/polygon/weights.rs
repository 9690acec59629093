use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest `n` for which the `2^(n-1)` signed sums are enumerated.
pub const MAX_EXHAUSTIVE_SIDES: usize = 24;

const SIGNED_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCheck {
    /// `2 max r_j <= sum r_i`
    pub admissible: bool,
    /// No signed sum `r_1 +- r_2 +- ... +- r_n` vanishes.
    pub nondegenerate: bool,
}

pub fn check_weights<T: Real>(r: &[T]) -> Result<WeightCheck> {
    if r.is_empty() {
        return Err(Error::InvalidWeights("no side lengths".into()));
    }
    if let Some(x) = r.iter().find(|x| !(**x > T::zero()) || !x.is_finite()) {
        return Err(Error::InvalidWeights(format!(
            "side length {x} is not positive"
        )));
    }
    if r.len() > MAX_EXHAUSTIVE_SIDES {
        return Err(Error::TooManySides {
            n: r.len(),
            max: MAX_EXHAUSTIVE_SIDES,
        });
    }
    let total = r.iter().fold(T::zero(), |a, &x| a + x);
    let max = r.iter().fold(T::zero(), |a, &x| a.max(x));
    let admissible = max + max <= total;

    // Walk the sign patterns of r_2..r_n in Gray-code order so each step
    // flips one sign. The running sum starts from r_1 + ... + r_n.
    let tol = T::lit(SIGNED_SUM_TOL);
    let mut sum = total;
    let mut signs = vec![true; r.len()];
    let mut nondegenerate = sum.abs() > tol;
    let patterns: u64 = 1 << (r.len() - 1);
    for step in 1..patterns {
        if !nondegenerate {
            break;
        }
        let bit = step.trailing_zeros() as usize + 1;
        let two = r[bit] + r[bit];
        if signs[bit] {
            sum -= two;
        } else {
            sum += two;
        }
        signs[bit] = !signs[bit];
        nondegenerate = sum.abs() > tol;
    }
    Ok(WeightCheck {
        admissible,
        nondegenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(
            check_weights(&[1.0, 1.0, 1.0, 1.0]).unwrap(),
            WeightCheck {
                admissible: true,
                nondegenerate: false
            }
        );
        assert_eq!(
            check_weights(&[2.0, 1.0, 1.0, 1.0]).unwrap(),
            WeightCheck {
                admissible: true,
                nondegenerate: true
            }
        );
        assert!(!check_weights(&[3.0, 1.0, 1.0, 0.5]).unwrap().admissible);
    }

    #[test]
    fn brute_force_agrees() {
        let r: [f64; 6] = [0.7, 1.3, 0.4, 0.9, 1.1, 0.2];
        let mut zero = false;
        for mask in 0..(1u32 << 5) {
            let mut s = r[0];
            for k in 1..6 {
                s += if mask >> (k - 1) & 1 == 1 {
                    -r[k]
                } else {
                    r[k]
                };
            }
            zero |= s.abs() <= 1e-12;
        }
        assert_eq!(check_weights(&r).unwrap().nondegenerate, !zero);
        // 0.7 - 1.3 + 0.4 - 0.9 + 1.1 = 0, so this one is degenerate
        assert!(
            !check_weights(&[0.7, 1.3, 0.4, 0.9, 1.1])
                .unwrap()
                .nondegenerate
        );
    }

    #[test]
    fn refuses_large_n_and_bad_input() {
        assert!(matches!(
            check_weights(&[1.0; 25]),
            Err(Error::TooManySides { n: 25, .. })
        ));
        assert!(check_weights(&[1.0, -1.0, 1.0]).is_err());
        assert!(check_weights::<f64>(&[]).is_err());
    }
}
