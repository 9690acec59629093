use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quatpoly::barycenter::is_stable;
use quatpoly::polygon::{
    bend, canonical_planar, check_weights, classify, diagonal_lengths, rotation_fixing,
    sample_closed, so3_invariants, PolygonConfig, SamplerOptions,
};
use quatpoly::vector::{self, Vec5};

fn sample(seed: u64, lo: usize, hi: usize) -> (PolygonConfig<f64>, ChaCha8Rng) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = r.random_range(lo..hi);
    let w = loop {
        let w: Vec<f64> = (0..n).map(|_| r.random_range(0.5..1.5)).collect();
        let c = check_weights(&w).unwrap();
        if c.admissible && c.nondegenerate {
            break w;
        }
    };
    (
        sample_closed(&w, &SamplerOptions::default(), &mut r).unwrap(),
        r,
    )
}

/// Pairwise vertex distances: a complete congruence invariant.
fn distance_matrix(p: &PolygonConfig<f64>) -> Vec<f64> {
    let v = p.vertices();
    let mut out = Vec::new();
    for a in 0..v.len() {
        for b in (a + 1)..v.len() {
            out.push(vector::dist(&v[a], &v[b]));
        }
    }
    out
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_are_closed_and_stable(seed in any::<u64>()) {
        let (p, _) = sample(seed, 4, 12);
        prop_assert!(p.closure_residual() < 1e-10);
        prop_assert!(is_stable(&p.to_configuration()));
    }

    #[test]
    fn bending_keeps_diagonals(seed in any::<u64>()) {
        let (p, mut r) = sample(seed, 5, 10);
        let i = r.random_range(1..=p.n() - 3);
        let d = diagonal_lengths(&p);
        let k = rotation_fixing(&d.diagonals[i - 1], &mut r);
        let q = bend(&p, i, &k).unwrap();
        prop_assert!(max_gap(&d.lengths, &diagonal_lengths(&q).lengths) < 1e-10);
        prop_assert!(max_gap(p.side_lengths(), q.side_lengths()) < 1e-12);
        prop_assert!(q.closure_residual() < 1e-10);
    }

    #[test]
    fn consecutive_diagonals_satisfy_triangle_inequalities(seed in any::<u64>()) {
        let (p, _) = sample(seed, 5, 12);
        let l = diagonal_lengths(&p).lengths;
        let r = p.side_lengths();
        for i in 0..l.len() - 1 {
            // Triangle (v_1, v_{i+2}, v_{i+3}) with sides l_i, r_{i+2}, l_{i+1}.
            let side = r[i + 2];
            prop_assert!((l[i] - side).abs() <= l[i + 1] + 1e-10);
            prop_assert!(l[i + 1] <= l[i] + side + 1e-10);
        }
    }

    #[test]
    fn canonical_planar_is_idempotent_up_to_congruence(seed in any::<u64>()) {
        let (p, _) = sample(seed, 5, 10);
        let c = canonical_planar(&p).unwrap();
        let cc = canonical_planar(&c).unwrap();
        prop_assert!(max_gap(&distance_matrix(&c), &distance_matrix(&cc)) < 1e-9);
        prop_assert!(classify(&c, 1e-8).span_rank <= 2);
    }

    #[test]
    fn classification_is_rotation_invariant(seed in any::<u64>()) {
        let (p, mut r) = sample(seed, 4, 9);
        let axis: Vec5<f64> = vector::basis(0);
        let k = rotation_fixing(&axis, &mut r);
        let edges = p
            .edges()
            .iter()
            .map(|u| quatpoly::S4Point::new(vector::mat_apply(&k, u.coords())).unwrap())
            .collect();
        let q = PolygonConfig::new(p.side_lengths().to_vec(), edges).unwrap();
        prop_assert_eq!(classify(&p, 1e-8), classify(&q, 1e-8));
    }

    #[test]
    fn lagrange_identity(x in prop::array::uniform3(-5.0f64..5.0), y in prop::array::uniform3(-5.0f64..5.0)) {
        prop_assert!(so3_invariants(x, y).lagrange_defect().abs() < 1e-10);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let (p, _) = sample(seed, 3, 10);
        let s = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<PolygonConfig<f64>>(&s).unwrap(), p);
    }
}
