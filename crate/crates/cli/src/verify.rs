//! The invariant battery behind `quatpoly verify`.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use quatpoly::barycenter::{conformal_barycenter, is_stable, normalize_configuration, pushforward};
use quatpoly::bridge::{fixtures, line_stability, psi_map, random_cmatrix, ComplexLineConfig};
use quatpoly::gt::{
    gt_pattern, paired_spectrum, polygon_from_grassmann, prefix_lengths,
    quat_hermitian_eigenvalues, quat_hermitian_spectrum, GrassmannPoint, QuatHermitian,
    PAIRING_TOL,
};
use quatpoly::moebius::{
    hp1_to_s4, mobius_ball, mobius_hp1, BallPoint, HP1Point, S4Point, Sl2hElement,
};
use quatpoly::polygon::{
    bend, canonical_planar, check_weights, classify, closure_jacobian_rank, diagonal_lengths,
    rotation_fixing, sample_closed, so2_invariants, PolygonConfig, SamplerOptions,
};
use quatpoly::quat::{dieudonne_det2, random_quaternion, random_quaternion_matrix, CMatrix};
use quatpoly::vector;
use quatpoly::{Tolerances, WeightedConfiguration};

use crate::commands::item_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
}

/// Stand-in for a measurement that could not be taken.
const UNMEASURED: f64 = f64::MAX;

impl Check {
    fn new(name: &str, measured: f64, comparison: Comparison, threshold: f64) -> Self {
        let passed = match comparison {
            Comparison::Lt => measured < threshold,
            Comparison::Le => measured <= threshold,
            Comparison::Gt => measured > threshold,
            Comparison::Ge => measured >= threshold,
        };
        Check {
            name: name.to_string(),
            passed,
            measured,
            comparison,
            threshold,
        }
    }

    fn below(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, measured, Comparison::Lt, threshold)
    }

    fn none(name: &str, failures: usize) -> Self {
        Self::new(name, failures as f64, Comparison::Le, 0.0)
    }

    fn failed(name: &str, comparison: Comparison, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            passed: false,
            measured: UNMEASURED,
            comparison,
            threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyData {
    pub cases: usize,
    pub checks: Vec<Check>,
}

struct Env<'a> {
    cases: usize,
    tol: &'a Tolerances,
}

impl Env<'_> {
    fn sampler(&self) -> SamplerOptions<f64> {
        SamplerOptions {
            tol: self.tol.closure,
            ..SamplerOptions::default()
        }
    }

    fn polygon(&self, n: usize, rng: &mut ChaCha8Rng) -> Option<PolygonConfig<f64>> {
        let w = loop {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
            let c = check_weights(&w).ok()?;
            if c.admissible && c.nondegenerate {
                break w;
            }
        };
        sample_closed(&w, &self.sampler(), rng).ok()
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn algebra(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut assoc = 0.0f64;
    for _ in 0..env.cases * 10 {
        let (p, q, r) = (
            random_quaternion::<f64, _>(rng),
            random_quaternion(rng),
            random_quaternion(rng),
        );
        assoc = assoc.max(((p * q) * r - p * (q * r)).norm());
    }
    let mut nu = 0.0f64;
    let mut det = 0.0f64;
    for _ in 0..env.cases {
        let a = random_quaternion_matrix::<f64, _>(3, 3, rng);
        let b = random_quaternion_matrix::<f64, _>(3, 3, rng);
        nu = nu.max((&(&a * &b).nu() - &(&a.nu() * &b.nu())).frobenius());
        let g = random_quaternion_matrix::<f64, _>(2, 2, rng);
        let h = random_quaternion_matrix::<f64, _>(2, 2, rng);
        let gh = &g * &h;
        let d = |m: &quatpoly::QuatMat| dieudonne_det2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let want = d(&g) * d(&h);
        det = det.max((d(&gh) - want).abs() / want.max(1.0));
    }
    vec![
        Check::below("quaternion_associativity", assoc, 1e-10),
        Check::below("nu_homomorphism", nu, 1e-10),
        Check::below("dieudonne_multiplicativity", det, 1e-10),
    ]
}

fn boundary(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut worst = 0.0f64;
    for _ in 0..env.cases {
        let g = Sl2hElement::<f64>::random(rng);
        let Ok(p) = HP1Point::new(random_quaternion(rng), random_quaternion(rng)) else {
            continue;
        };
        let lft = hp1_to_s4(&mobius_hp1(&g, &p));
        let ball = mobius_ball(&g, &BallPoint::from(hp1_to_s4(&p)));
        worst = worst.max(vector::dist(lft.coords(), ball.coords()));
    }
    vec![Check::below("boundary_action", worst, 1e-10)]
}

fn barycenter(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    const NAMES: [&str; 3] = [
        "barycenter_field",
        "barycenter_equivariance",
        "normalization_center",
    ];
    let (mut field, mut equi, mut center) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..env.cases.div_ceil(4) {
        let n = rng.random_range(5..=50);
        let w = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let pts = (0..n).map(|_| S4Point::random(rng)).collect();
        let Ok(cfg) = WeightedConfiguration::new(w, pts) else {
            continue;
        };
        let g = Sl2hElement::random(rng);
        let (Ok(b), Ok(gb), Ok(norm)) = (
            conformal_barycenter(&cfg, 1e-12),
            conformal_barycenter(&pushforward(&g, &cfg), 1e-12),
            normalize_configuration(&cfg, 1e-10),
        ) else {
            return NAMES
                .iter()
                .map(|s| Check::failed(s, Comparison::Lt, 0.0))
                .collect();
        };
        field = field.max(b.residual).max(gb.residual);
        equi = equi.max(vector::dist(
            mobius_ball(&g, &b.barycenter).coords(),
            gb.barycenter.coords(),
        ));
        center = center.max(norm.center_residual);
    }
    vec![
        Check::below(NAMES[0], field, 1e-10),
        Check::below(NAMES[1], equi, 1e-7),
        Check::below(NAMES[2], center, 1e-9),
    ]
}

fn polygons(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (mut rank_misses, mut unstable, mut missing) = (0, 0, 0);
    for _ in 0..env.cases {
        let n = rng.random_range(5..=7);
        match env.polygon(n, rng) {
            Some(p) => {
                rank_misses += usize::from(closure_jacobian_rank(&p, env.tol.rank) != 5);
                unstable += usize::from(!is_stable(&p.to_configuration()));
            }
            None => missing += 1,
        }
    }
    let mut degenerate = 0;
    for _ in 0..env.cases {
        match env.polygon(4, rng) {
            Some(p) => degenerate += usize::from(classify(&p, env.tol.rank).span_rank <= 3),
            None => missing += 1,
        }
    }
    vec![
        Check::none("sampler_failures", missing),
        Check::none("closure_jacobian_rank", rank_misses),
        Check::none("closure_implies_stability", unstable),
        Check::new(
            "n4_degenerate_fraction",
            degenerate as f64 / env.cases.max(1) as f64,
            Comparison::Ge,
            1.0,
        ),
    ]
}

fn invariants(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut so2 = 0.0f64;
    for _ in 0..env.cases * 10 {
        let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let y = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let p = so2_invariants::<f64>(x, y);
        so2 = so2.max((p[0] * p[1] - p[2] * p[2] - p[3] * p[3]).abs());
    }
    let (mut drift, mut planar, mut planar_rank, mut failures) = (0.0f64, 0.0f64, 0, 0);
    for _ in 0..env.cases {
        let n = rng.random_range(5..=8);
        let Some(p) = env.polygon(n, rng) else {
            failures += 1;
            continue;
        };
        let d = diagonal_lengths(&p);
        let i = rng.random_range(1..=n - 3);
        let k = rotation_fixing(&d.diagonals[i - 1], rng);
        match bend(&p, i, &k) {
            Ok(q) => {
                drift = drift.max(max_of(
                    d.lengths
                        .iter()
                        .zip(&diagonal_lengths(&q).lengths)
                        .map(|(a, b)| (a - b).abs()),
                ))
            }
            Err(_) => failures += 1,
        }
        match canonical_planar(&p) {
            Ok(c) => {
                planar = planar.max(max_of(
                    d.lengths
                        .iter()
                        .zip(&diagonal_lengths(&c).lengths)
                        .map(|(a, b)| (a - b).abs()),
                ));
                planar_rank = planar_rank.max(classify(&c, env.tol.rank).span_rank);
            }
            Err(_) => failures += 1,
        }
    }
    vec![
        Check::below("so2_relation", so2, 1e-12),
        Check::none("bend_or_planar_failures", failures),
        Check::below("bend_preserves_diagonals", drift, 1e-10),
        Check::below("canonical_planar_diagonals", planar, 1e-10),
        Check::new(
            "canonical_planar_rank",
            planar_rank as f64,
            Comparison::Le,
            2.0,
        ),
    ]
}

fn hermitian(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (mut violation, mut gap, mut failures) = (0.0f64, 0.0f64, 0);
    for size in 2..=6 {
        for _ in 0..env.cases {
            let a = QuatHermitian::<f64>::random(size, rng);
            match (gt_pattern(a.matrix()), quat_hermitian_spectrum(a.matrix())) {
                (Ok(p), Ok(s)) => {
                    violation = violation.max(p.max_violation());
                    gap = gap.max(s.max_gap);
                }
                _ => failures += 1,
            }
        }
    }
    // Complex Hermitian but outside the image of nu: its eigenvalues do not
    // come in pairs, and the pairing step has to say so.
    let injected = CMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            Complex::new((i + 1) as f64, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let rejected = match paired_spectrum(&injected) {
        Err(quatpoly::Error::PairingFailure { gap, .. }) => Check::new(
            "non_quaternionic_rejected",
            gap,
            Comparison::Gt,
            PAIRING_TOL,
        ),
        _ => Check::failed("non_quaternionic_rejected", Comparison::Gt, PAIRING_TOL),
    };
    vec![
        Check::none("gt_failures", failures),
        Check::new("gt_interlacing", violation, Comparison::Le, 1e-8),
        Check::below("eigenvalue_pair_gap", gap, 1e-9),
        rejected,
    ]
}

fn grassmann(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (mut spectra, mut diagonals, mut failures) = (0.0f64, 0.0f64, 0);
    for _ in 0..env.cases {
        let n = rng.random_range(4..=9);
        let m = GrassmannPoint::<f64>::random_closed(n, 2.0, rng);
        let (Ok(p), Ok(prefix)) = (polygon_from_grassmann(&m), prefix_lengths(&m)) else {
            failures += 1;
            continue;
        };
        for i in 1..=n {
            let t = m.truncated(i);
            let (Ok(mut small), Ok(mut big)) = (
                quat_hermitian_eigenvalues(&(&t.adjoint() * &t)),
                quat_hermitian_eigenvalues(&(&t * &t.adjoint())),
            ) else {
                failures += 1;
                continue;
            };
            small.sort_by(|a, b| b.total_cmp(a));
            big.sort_by(|a, b| b.total_cmp(a));
            big.resize(big.len().max(2), 0.0);
            for (k, &x) in big.iter().enumerate() {
                let want = if k < 2 { small[k] } else { 0.0 };
                spectra = spectra.max((x - want).abs());
            }
        }
        let v = p.vertices();
        for i in 1..=n - 3 {
            diagonals = diagonals.max((prefix[i] - vector::norm(&v[i + 1])).abs());
        }
    }
    vec![
        Check::none("grassmann_failures", failures),
        Check::below("grassmann_partial_spectra", spectra, 1e-9),
        Check::below("grassmann_diagonals", diagonals, 1e-9),
    ]
}

fn bridge(env: &Env, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (mut sum, mut spectrum, mut theta, mut failures) = (0.0f64, 0.0f64, 0.0f64, 0);
    for _ in 0..env.cases {
        let n = rng.random_range(5..=8);
        let res = env
            .polygon(n, rng)
            .and_then(|p| psi_map(&p, env.tol.closure).ok())
            .and_then(|c| c.residuals().ok());
        match res {
            Some(r) => {
                sum = sum.max(r.sum);
                spectrum = spectrum.max(r.spectrum);
                theta = theta.max(r.theta);
            }
            None => failures += 1,
        }
    }
    let mut wrong = 0;
    let mut moved = 0;
    for _ in 0..env.cases.div_ceil(10) {
        let cases: [(ComplexLineConfig<f64>, bool, bool); 3] = [
            (fixtures::generic_stable(rng), true, true),
            (fixtures::concurrent_unstable(rng), false, false),
            (fixtures::transversal_semistable(rng), false, true),
        ];
        for (cfg, stable, semistable) in cases {
            let g = random_cmatrix::<f64, _>(4, 4, rng);
            match (
                line_stability(&cfg),
                cfg.transform(&g).and_then(|c| line_stability(&c)),
            ) {
                (Ok(a), Ok(b)) => {
                    wrong += usize::from((a.stable, a.semistable) != (stable, semistable));
                    moved += usize::from((a.stable, a.semistable) != (b.stable, b.semistable));
                }
                _ => failures += 1,
            }
        }
    }
    vec![
        Check::none("bridge_failures", failures),
        Check::below("psi_sum", sum, 1e-9),
        Check::below("psi_spectrum", spectrum, 1e-8),
        Check::below("psi_theta_fixed", theta, 1e-12),
        Check::none("stability_fixture_verdicts", wrong),
        Check::none("stability_projective_invariance", moved),
    ]
}

type Group = fn(&Env, &mut ChaCha8Rng) -> Vec<Check>;

const GROUPS: [Group; 8] = [
    algebra, boundary, barycenter, polygons, invariants, hermitian, grassmann, bridge,
];

/// Runs every check group on its own random stream; results keep the
/// fixed group order whatever the thread count.
pub fn run(seed: u64, cases: usize, tol: &Tolerances) -> VerifyData {
    let env = Env { cases, tol };
    let checks = GROUPS
        .par_iter()
        .enumerate()
        .map(|(i, group)| group(&env, &mut item_rng(seed, i as u64)))
        .collect::<Vec<_>>()
        .concat();
    VerifyData { cases, checks }
}
