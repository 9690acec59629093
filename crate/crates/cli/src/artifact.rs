//! Output envelope shared by every subcommand.
//!
//! JSON is the canonical form. Floats are written as the shortest decimal
//! that parses back to the same `f64`, so reading and re-emitting an
//! artifact reproduces it byte for byte.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use quatpoly::Tolerances;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact<D> {
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub residuals: BTreeMap<String, f64>,
    pub data: D,
}

impl<D: Serialize> Artifact<D> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }
}

pub fn from_json<D: DeserializeOwned>(text: &str) -> CliResult<Artifact<D>> {
    serde_json::from_str(text).map_err(|e| CliError::usage(format!("malformed artifact: {e}")))
}

/// Metadata lines `# key=value` heading a CSV table.
pub fn csv_header<D>(a: &Artifact<D>, extra: &[(String, String)]) -> String {
    let t = &a.tolerances;
    let mut out = format!("# command={}\n# seed={}\n", a.command, a.seed);
    for (k, v) in [
        ("closure", t.closure),
        ("rank", t.rank),
        ("solver", t.solver),
        ("equality", t.equality),
    ] {
        out.push_str(&format!("# tol.{k}={v:?}\n"));
    }
    for (k, v) in &a.residuals {
        out.push_str(&format!("# residual.{k}={v:?}\n"));
    }
    for (k, v) in extra {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out
}

/// Parsed `# key=value` lines and the remaining CSV body.
pub struct CsvMeta {
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub residuals: BTreeMap<String, f64>,
    pub extra: BTreeMap<String, String>,
}

pub fn split_csv(text: &str) -> CliResult<(CsvMeta, String)> {
    let bad = |m: String| CliError::usage(format!("malformed CSV artifact: {m}"));
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| bad(format!("metadata line `{line}`")))?;
            meta.insert(k.to_string(), v.to_string());
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut take = |k: &str| meta.remove(k).ok_or_else(|| bad(format!("missing `{k}`")));
    let float = |s: String| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
    let command = take("command")?;
    let seed = take("seed")?
        .parse()
        .map_err(|e| bad(format!("seed: {e}")))?;
    let tolerances = Tolerances {
        closure: float(take("tol.closure")?)?,
        rank: float(take("tol.rank")?)?,
        solver: float(take("tol.solver")?)?,
        equality: float(take("tol.equality")?)?,
    };
    let mut residuals = BTreeMap::new();
    let mut extra = BTreeMap::new();
    for (k, v) in meta {
        match k.strip_prefix("residual.") {
            Some(name) => {
                residuals.insert(name.to_string(), float(v)?);
            }
            None => {
                extra.insert(k, v);
            }
        }
    }
    Ok((
        CsvMeta {
            command,
            seed,
            tolerances,
            residuals,
            extra,
        },
        body,
    ))
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn parse_f64(s: &str) -> CliResult<f64> {
    s.trim()
        .parse()
        .map_err(|e| CliError::usage(format!("malformed number `{s}`: {e}")))
}
