use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quatpoly::bridge::{
    fixtures, line_stability, psi_map, random_cmatrix, span_distance, theta_defect,
    theta_grassmann, theta_matrix, ComplexLineConfig,
};
use quatpoly::polygon::{
    check_weights, closure_jacobian_rank, sample_closed, stratum_dimension, SamplerOptions,
};
use quatpoly::quat::random_quaternion_matrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_is_an_involution(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let c = random_cmatrix::<f64, _>(2 * n, 2 * n, &mut r);
        let back = theta_matrix(&theta_matrix(&c).unwrap()).unwrap();
        prop_assert!((&back - &c).frobenius() < 1e-14);
        let q = random_quaternion_matrix::<f64, _>(n, n, &mut r);
        prop_assert!(theta_defect(&q.nu()).unwrap() < 1e-14);
    }

    #[test]
    fn theta_on_lines_is_an_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_cmatrix::<f64, _>(4, 2, &mut r);
        let tt = theta_grassmann(&theta_grassmann(&l).unwrap()).unwrap();
        prop_assert!(span_distance(&tt, &l) < 1e-12);
    }

    #[test]
    fn psi_lands_in_fixed_locus_with_right_dimension(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(5..9);
        let w = loop {
            let w: Vec<f64> = (0..n).map(|_| r.random_range(0.5..1.5)).collect();
            let c = check_weights(&w).unwrap();
            if c.admissible && c.nondegenerate {
                break w;
            }
        };
        let p = sample_closed(&w, &SamplerOptions::default(), &mut r).unwrap();
        let res = psi_map(&p, 1e-10).unwrap().residuals().unwrap();
        prop_assert!(res.sum < 1e-9 && res.spectrum < 1e-8 && res.theta < 1e-12);
        prop_assert_eq!(closure_jacobian_rank(&p, 1e-8), 5);
        prop_assert_eq!(stratum_dimension(&p, 1e-8), 4 * n - 15);
    }

    #[test]
    fn stability_is_projectively_invariant(seed in any::<u64>(), which in 0usize..3) {
        let mut r = rng(seed);
        let cfg: ComplexLineConfig<f64> = match which {
            0 => fixtures::generic_stable(&mut r),
            1 => fixtures::concurrent_unstable(&mut r),
            _ => fixtures::transversal_semistable(&mut r),
        };
        let base = line_stability(&cfg).unwrap();
        let g = random_cmatrix::<f64, _>(4, 4, &mut r);
        let moved = line_stability(&cfg.transform(&g).unwrap()).unwrap();
        prop_assert_eq!((base.stable, base.semistable), (moved.stable, moved.semistable));
    }
}
