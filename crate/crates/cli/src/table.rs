//! CSV forms of the ensemble artifacts (`sample` and `report`).

use std::collections::BTreeMap;

use quatpoly::{DegeneracyKind, PolygonConfig, S4Point};

use crate::artifact::{csv_header, fmt_f64, parse_f64, split_csv, Artifact};
use crate::commands::{ReportData, ReportRow, SampleData};
use crate::error::{CliError, CliResult};

fn malformed(m: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("malformed CSV table: {m}"))
}

fn write_rows(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn read_rows(body: &str) -> CliResult<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r
        .headers()
        .map_err(malformed)?
        .iter()
        .map(String::from)
        .collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
        .collect::<Result<_, _>>()
        .map_err(malformed)?;
    Ok((header, rows))
}

/// Columns: `index, closure_residual, r_1..r_n, u_1_1..u_n_5`.
pub fn write_sample_csv(a: &Artifact<SampleData>) -> String {
    let n = a.data.weights.len();
    let mut header = vec!["index".to_string(), "closure_residual".to_string()];
    header.extend((1..=n).map(|i| format!("r_{i}")));
    for i in 1..=n {
        header.extend((1..=5).map(|k| format!("u_{i}_{k}")));
    }
    let rows = a.data.polygons.iter().enumerate().map(|(idx, p)| {
        let mut row = vec![idx.to_string(), fmt_f64(p.closure_residual())];
        row.extend(p.side_lengths().iter().map(|&x| fmt_f64(x)));
        for u in p.edges() {
            row.extend(u.coords().iter().map(|&x| fmt_f64(x)));
        }
        row
    });
    csv_header(a, &[]) + &write_rows(header, rows)
}

pub fn read_sample_csv(text: &str) -> CliResult<Artifact<SampleData>> {
    let (meta, body) = split_csv(text)?;
    if meta.command != "sample" {
        return Err(malformed(format!(
            "expected a sample table, found `{}`",
            meta.command
        )));
    }
    let (header, rows) = read_rows(&body)?;
    let n = header.iter().filter(|h| h.starts_with("r_")).count();
    if header.len() != 2 + 6 * n {
        return Err(malformed(format!("{} columns for n = {n}", header.len())));
    }
    let mut weights = Vec::new();
    let mut polygons = Vec::with_capacity(rows.len());
    for (idx, row) in rows.iter().enumerate() {
        if row[0] != idx.to_string() {
            return Err(malformed(format!("row {idx} has index {}", row[0])));
        }
        let r = row[2..2 + n]
            .iter()
            .map(|s| parse_f64(s))
            .collect::<CliResult<Vec<_>>>()?;
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let start = 2 + n + 5 * i;
            let mut v = [0.0; 5];
            for (k, s) in row[start..start + 5].iter().enumerate() {
                v[k] = parse_f64(s)?;
            }
            edges.push(S4Point::from_unit(v).ok_or_else(|| {
                malformed(format!("row {idx}: edge {} is not a unit vector", i + 1))
            })?);
        }
        weights = r.clone();
        polygons
            .push(PolygonConfig::new(r, edges).map_err(|e| malformed(format!("row {idx}: {e}")))?);
    }
    Ok(Artifact {
        command: meta.command,
        seed: meta.seed,
        tolerances: meta.tolerances,
        residuals: meta.residuals,
        data: SampleData { weights, polygons },
    })
}

/// Columns: `index, kind, span_rank, closure_residual, l_1..l_{n-3}`; the
/// classification counts go in the metadata lines.
pub fn write_report_csv(a: &Artifact<ReportData>) -> String {
    let d = &a.data;
    let mut extra = vec![("n".to_string(), d.n.to_string())];
    extra.extend(
        d.counts
            .iter()
            .map(|(k, v)| (format!("count.{k}"), v.to_string())),
    );
    let mut header: Vec<String> = ["index", "kind", "span_rank", "closure_residual"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=d.n.saturating_sub(3)).map(|i| format!("l_{i}")));
    let rows = d.rows.iter().map(|r| {
        let mut row = vec![
            r.index.to_string(),
            r.kind.name().to_string(),
            r.span_rank.to_string(),
            fmt_f64(r.closure_residual),
        ];
        row.extend(r.diagonals.iter().map(|&x| fmt_f64(x)));
        row
    });
    csv_header(a, &extra) + &write_rows(header, rows)
}

fn parse_kind(s: &str) -> CliResult<DegeneracyKind> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| malformed(format!("unknown kind `{s}`")))
}

pub fn read_report_csv(text: &str) -> CliResult<Artifact<ReportData>> {
    let (meta, body) = split_csv(text)?;
    if meta.command != "report" {
        return Err(malformed(format!(
            "expected a report table, found `{}`",
            meta.command
        )));
    }
    let int = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| malformed(format!("`{s}`: {e}")))
    };
    let n = int(meta
        .extra
        .get("n")
        .ok_or_else(|| malformed("missing `n`"))?)?;
    let mut counts = BTreeMap::new();
    for (k, v) in &meta.extra {
        if let Some(kind) = k.strip_prefix("count.") {
            counts.insert(kind.to_string(), int(v)?);
        }
    }
    let (_, rows) = read_rows(&body)?;
    let rows = rows
        .iter()
        .map(|row| {
            if row.len() != 4 + n.saturating_sub(3) {
                return Err(malformed(format!("row of length {}", row.len())));
            }
            Ok(ReportRow {
                index: int(&row[0])?,
                kind: parse_kind(&row[1])?,
                span_rank: int(&row[2])?,
                closure_residual: parse_f64(&row[3])?,
                diagonals: row[4..]
                    .iter()
                    .map(|s| parse_f64(s))
                    .collect::<CliResult<_>>()?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Artifact {
        command: meta.command,
        seed: meta.seed,
        tolerances: meta.tolerances,
        residuals: meta.residuals,
        data: ReportData { n, rows, counts },
    })
}
