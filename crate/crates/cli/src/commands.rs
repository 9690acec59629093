use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use quatpoly::barycenter::{normalize_configuration, Normalization};
use quatpoly::bridge::{fixtures, line_stability};
use quatpoly::gt::{
    closure_edge, gt_pattern, partial_gram_spectra, polygon_from_grassmann, prefix_lengths,
    quat_hermitian_spectrum,
};
use quatpoly::polygon::{
    bend, classify, diagonal_lengths, rotation_fixing, sample_closed, Rotation5, SamplerOptions,
    MAX_EXHAUSTIVE_SIDES,
};
use quatpoly::quat::QuatMatrix;
use quatpoly::vector;
use quatpoly::{
    ComplexLineConfig, DegeneracyKind, DegeneracyReport, GTPattern, GrassmannPoint, PolygonConfig,
    QuatHermitian, S4Point, StabilityReport, Tolerances, WeightedConfiguration,
};

use crate::args::{BendArgs, Fixture, GtArgs, NormalizeArgs, SampleArgs, StabilityArgs};
use crate::artifact::Artifact;
use crate::error::{CliError, CliResult};
use crate::input::{self, load_polygons, parse, read_json};

/// Generator for item `index` of a run: one ChaCha stream per item, so
/// results do not depend on scheduling or thread count.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub struct Ctx {
    pub seed: u64,
    pub tol: Tolerances,
}

impl Ctx {
    pub fn artifact<D>(
        &self,
        command: &str,
        residuals: BTreeMap<String, f64>,
        data: D,
    ) -> Artifact<D> {
        Artifact {
            command: command.to_string(),
            seed: self.seed,
            tolerances: self.tol,
            residuals,
            data,
        }
    }
}

fn residuals<const N: usize>(items: [(&str, f64); N]) -> BTreeMap<String, f64> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn max_closure(ps: &[PolygonConfig<f64>]) -> f64 {
    ps.iter().map(|p| p.closure_residual()).fold(0.0, f64::max)
}

fn require_closed(ps: &[PolygonConfig<f64>], tol: f64) -> CliResult<()> {
    for (i, p) in ps.iter().enumerate() {
        let res = p.closure_residual();
        if !(res <= tol) {
            return Err(CliError::invariant(
                "closure",
                format!("polygon {i} has closure residual {res:e} > {tol:e}"),
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- sample

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleData {
    pub weights: Vec<f64>,
    pub polygons: Vec<PolygonConfig<f64>>,
}

pub fn parse_weights(spec: &str, n: Option<usize>) -> CliResult<Vec<f64>> {
    let w = if spec.trim().eq_ignore_ascii_case("equal") {
        vec![1.0; n.ok_or_else(|| CliError::usage("--weights equal needs --n"))?]
    } else {
        let w = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::usage(format!("bad weight `{s}`: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        if let Some(n) = n.filter(|&n| n != w.len()) {
            return Err(CliError::usage(format!(
                "--n {n} but {} weights given",
                w.len()
            )));
        }
        w
    };
    if let Some(x) = w.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(CliError::usage(format!(
            "weights must be positive, got {x}"
        )));
    }
    if w.len() < 3 {
        return Err(CliError::usage(format!(
            "need at least 3 sides, got {}",
            w.len()
        )));
    }
    Ok(w)
}

pub fn sample(ctx: &Ctx, a: &SampleArgs) -> CliResult<Artifact<SampleData>> {
    let weights = parse_weights(&a.weights, a.n)?;
    if weights.len() > MAX_EXHAUSTIVE_SIDES && !a.allow_large {
        return Err(CliError::usage(format!(
            "n = {} exceeds {MAX_EXHAUSTIVE_SIDES}; the weight check is skipped only with --allow-large",
            weights.len()
        )));
    }
    let opts = SamplerOptions {
        tol: ctx.tol.closure,
        ..SamplerOptions::default()
    };
    let polygons = (0..a.count)
        .into_par_iter()
        .map(|i| sample_closed(&weights, &opts, &mut item_rng(ctx.seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    require_closed(&polygons, ctx.tol.closure)?;
    Ok(ctx.artifact(
        "sample",
        residuals([("max_closure", max_closure(&polygons))]),
        SampleData { weights, polygons },
    ))
}

// -------------------------------------------------------------- classify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyEntry {
    pub index: usize,
    pub closure_residual: f64,
    pub report: DegeneracyReport,
}

pub type ClassifyData = Vec<ClassifyEntry>;

pub fn classify_cmd(ctx: &Ctx, input: &std::path::Path) -> CliResult<Artifact<ClassifyData>> {
    let polygons = load_polygons(input)?;
    require_closed(&polygons, ctx.tol.closure)?;
    let entries = polygons
        .par_iter()
        .enumerate()
        .map(|(index, p)| ClassifyEntry {
            index,
            closure_residual: p.closure_residual(),
            report: classify(p, ctx.tol.rank),
        })
        .collect();
    Ok(ctx.artifact(
        "classify",
        residuals([("max_closure", max_closure(&polygons))]),
        entries,
    ))
}

// ------------------------------------------------------------- normalize

pub type NormalizeData = Normalization<f64>;

fn load_configuration(path: &std::path::Path) -> CliResult<WeightedConfiguration<f64>> {
    let v = read_json(path)?;
    if v.get("points").is_some() {
        parse(v, "weighted configuration")
    } else {
        let ps = input::polygons_from_value(v)?;
        match ps.as_slice() {
            [p] => Ok(p.to_configuration()),
            _ => Err(CliError::usage(format!(
                "expected one configuration, found {}",
                ps.len()
            ))),
        }
    }
}

pub fn normalize(ctx: &Ctx, a: &NormalizeArgs) -> CliResult<Artifact<NormalizeData>> {
    let cfg = match (&a.input, a.random) {
        (Some(path), _) => load_configuration(path)?,
        (None, Some(n)) => {
            let mut rng = item_rng(ctx.seed, 0);
            let points = (0..n).map(|_| S4Point::random(&mut rng)).collect();
            WeightedConfiguration::new(vec![1.0; n], points)?
        }
        (None, None) => return Err(CliError::usage("normalize needs --input or --random")),
    };
    let out = normalize_configuration(&cfg, ctx.tol.closure)?;
    if !(out.center_residual < ctx.tol.closure) {
        return Err(CliError::invariant(
            "normalization_center",
            format!("|C| = {:e} >= {:e}", out.center_residual, ctx.tol.closure),
        ));
    }
    let mut res = residuals([("center_of_mass", out.center_residual)]);
    if let Some(s) = &out.solver {
        res.insert("barycenter_field".to_string(), s.residual);
    }
    Ok(ctx.artifact("normalize", res, out))
}

// -------------------------------------------------------------------- gt

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "input", rename_all = "snake_case")]
pub enum GtData {
    Hermitian {
        matrix: QuatHermitian<f64>,
        eigenvalues: Vec<f64>,
        pattern: GTPattern<f64>,
    },
    Grassmann {
        point: GrassmannPoint<f64>,
        /// Top two eigenvalues of `M_i* M_i`, i = 1..=n.
        partial_spectra: Vec<[f64; 2]>,
        /// `(lambda_1 - lambda_2) / 2` of `M_i* M_i`.
        prefix_lengths: Vec<f64>,
        /// The closed polygon, when the point lies on the closure level set.
        polygon: Option<PolygonConfig<f64>>,
    },
}

fn hermitian_data(ctx: &Ctx, m: QuatHermitian<f64>) -> CliResult<Artifact<GtData>> {
    let spectrum = quat_hermitian_spectrum(m.matrix())?;
    let pattern = gt_pattern(m.matrix())?;
    let res = residuals([
        ("eigenvalue_pair_gap", spectrum.max_gap),
        ("interlacing_violation", pattern.max_violation()),
    ]);
    Ok(ctx.artifact(
        "gt",
        res,
        GtData::Hermitian {
            matrix: m,
            eigenvalues: spectrum.values,
            pattern,
        },
    ))
}

fn grassmann_data(ctx: &Ctx, point: GrassmannPoint<f64>) -> CliResult<Artifact<GtData>> {
    let spectra = partial_gram_spectra(&point)?;
    let prefix = prefix_lengths(&point)?;
    let closure = vector::norm(&closure_edge(&point));
    let polygon = match polygon_from_grassmann(&point) {
        Ok(p) => Some(p),
        Err(quatpoly::Error::ClosureViolation { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(ctx.artifact(
        "gt",
        residuals([("closure", closure)]),
        GtData::Grassmann {
            point,
            partial_spectra: spectra.into_iter().map(|(a, b)| [a, b]).collect(),
            prefix_lengths: prefix,
            polygon,
        },
    ))
}

pub fn gt(ctx: &Ctx, a: &GtArgs) -> CliResult<Artifact<GtData>> {
    let mut rng = item_rng(ctx.seed, 0);
    if let Some(path) = &a.hermitian {
        let m: QuatMatrix<f64> = parse(read_json(path)?, "quaternionic matrix")?;
        return hermitian_data(ctx, QuatHermitian::new(m)?);
    }
    if let Some(n) = a.random_hermitian {
        if n == 0 {
            return Err(CliError::usage("matrix size must be positive"));
        }
        return hermitian_data(ctx, QuatHermitian::random(n, &mut rng));
    }
    if let Some(path) = &a.grassmann {
        let m: QuatMatrix<f64> = parse(read_json(path)?, "quaternionic matrix")?;
        return grassmann_data(ctx, GrassmannPoint::new(m, ctx.tol.rank)?);
    }
    if let Some(n) = a.random_grassmann {
        if n < 2 {
            return Err(CliError::usage("a Grassmann point needs at least 2 rows"));
        }
        return grassmann_data(ctx, GrassmannPoint::random_closed(n, 2.0, &mut rng));
    }
    Err(CliError::usage("gt needs one input source"))
}

// ------------------------------------------------------------- stability

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityData {
    pub configuration: ComplexLineConfig<f64>,
    pub report: StabilityReport<f64>,
}

pub fn stability(ctx: &Ctx, a: &StabilityArgs) -> CliResult<Artifact<StabilityData>> {
    let configuration = match (&a.input, a.fixture) {
        (Some(path), _) => parse(read_json(path)?, "line configuration")?,
        (None, Some(f)) => {
            let mut rng = item_rng(ctx.seed, 0);
            match f {
                Fixture::Generic => fixtures::generic_stable(&mut rng),
                Fixture::Concurrent => fixtures::concurrent_unstable(&mut rng),
                Fixture::Transversal => fixtures::transversal_semistable(&mut rng),
            }
        }
        (None, None) => return Err(CliError::usage("stability needs --input or --fixture")),
    };
    let report = line_stability(&configuration)?;
    let excess = report
        .witnesses
        .iter()
        .map(|w| w.weight - w.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut res = residuals([(
        "weight_sum",
        (configuration.weights().iter().sum::<f64>() - 2.0).abs(),
    )]);
    if excess.is_finite() {
        res.insert("max_witness_excess".to_string(), excess);
    }
    Ok(ctx.artifact(
        "stability",
        res,
        StabilityData {
            configuration,
            report,
        },
    ))
}

// ------------------------------------------------------------------ bend

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BendData {
    pub diagonal: usize,
    pub rotation_seed: u64,
    pub rotation: Rotation5<f64>,
    pub polygon: PolygonConfig<f64>,
}

pub fn bend_cmd(ctx: &Ctx, a: &BendArgs) -> CliResult<Artifact<BendData>> {
    let polygons = load_polygons(&a.input)?;
    let p = polygons.get(a.index).ok_or_else(|| {
        CliError::usage(format!(
            "index {} out of range ({} polygons)",
            a.index,
            polygons.len()
        ))
    })?;
    require_closed(std::slice::from_ref(p), ctx.tol.closure)?;
    let n = p.n();
    if n < 4 || a.diagonal == 0 || a.diagonal > n - 3 {
        return Err(CliError::usage(format!(
            "diagonal must lie in 1..={} for n = {n}",
            n.saturating_sub(3)
        )));
    }
    let before = diagonal_lengths(p);
    let rotation_seed = a.rotation_seed.unwrap_or(ctx.seed);
    let rotation = rotation_fixing(
        &before.diagonals[a.diagonal - 1],
        &mut item_rng(rotation_seed, 0),
    );
    let polygon = bend(p, a.diagonal, &rotation)?;
    let after = diagonal_lengths(&polygon);
    let drift = before
        .lengths
        .iter()
        .zip(&after.lengths)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let closure = polygon.closure_residual();
    if !(drift <= ctx.tol.equality) {
        return Err(CliError::invariant(
            "bend_preserves_diagonals",
            format!("diagonal lengths moved by {drift:e}"),
        ));
    }
    require_closed(std::slice::from_ref(&polygon), ctx.tol.closure)?;
    Ok(ctx.artifact(
        "bend",
        residuals([("closure", closure), ("diagonal_drift", drift)]),
        BendData {
            diagonal: a.diagonal,
            rotation_seed,
            rotation,
            polygon,
        },
    ))
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    pub kind: DegeneracyKind,
    pub span_rank: usize,
    pub closure_residual: f64,
    pub diagonals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportData {
    pub n: usize,
    pub rows: Vec<ReportRow>,
    /// Polygons per degeneracy kind; every kind is listed.
    pub counts: BTreeMap<String, usize>,
}

pub fn report(ctx: &Ctx, input: &std::path::Path) -> CliResult<Artifact<ReportData>> {
    let polygons = load_polygons(input)?;
    let n = polygons.first().map_or(0, |p| p.n());
    if let Some(p) = polygons.iter().find(|p| p.n() != n) {
        return Err(CliError::usage(format!(
            "mixed ensemble: n = {n} and n = {}",
            p.n()
        )));
    }
    require_closed(&polygons, ctx.tol.closure)?;
    let rows: Vec<ReportRow> = polygons
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let c = classify(p, ctx.tol.rank);
            ReportRow {
                index,
                kind: c.kind,
                span_rank: c.span_rank,
                closure_residual: p.closure_residual(),
                diagonals: diagonal_lengths(p).lengths,
            }
        })
        .collect();
    let mut counts: BTreeMap<String, usize> = [
        DegeneracyKind::Nondegenerate,
        DegeneracyKind::Type2,
        DegeneracyKind::Type3,
        DegeneracyKind::Linear,
    ]
    .iter()
    .map(|k| (k.name().to_string(), 0))
    .collect();
    for r in &rows {
        *counts.get_mut(r.kind.name()).expect("all kinds listed") += 1;
    }
    Ok(ctx.artifact(
        "report",
        residuals([("max_closure", max_closure(&polygons))]),
        ReportData { n, rows, counts },
    ))
}
