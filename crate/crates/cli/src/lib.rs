//! Reproducible pipelines over the `quatpoly` library.
//!
//! Every subcommand produces one [`Artifact`]: the seed, the tolerances,
//! the residuals it measured, and its payload. Artifacts are deterministic
//! in (command, seed, tolerances) and independent of the thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod artifact;
pub mod commands;
pub mod error;
pub mod input;
pub mod table;
pub mod verify;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub use artifact::Artifact;
pub use error::{CliError, CliResult};

use args::{Cli, Command, Format};
use commands::Ctx;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "QUATPOLY_THREADS";

/// Rendered output plus an error to report after writing it.
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

fn json<D: Serialize>(format: Format, a: &Artifact<D>) -> CliResult<Outcome> {
    if format == Format::Csv {
        return Err(CliError::usage(format!(
            "`{}` has no CSV form; CSV is available for sample and report",
            a.command
        )));
    }
    Ok(Outcome {
        text: a.to_json(),
        failure: None,
    })
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let ctx = Ctx {
        seed: cli.run.seed,
        tol: cli.run.tolerances()?,
    };
    let format = cli.run.format;
    match &cli.command {
        Command::Sample(a) => {
            let art = commands::sample(&ctx, a)?;
            match format {
                Format::Csv => Ok(Outcome {
                    text: table::write_sample_csv(&art),
                    failure: None,
                }),
                Format::Json => json(format, &art),
            }
        }
        Command::Classify(a) => json(format, &commands::classify_cmd(&ctx, &a.input)?),
        Command::Normalize(a) => json(format, &commands::normalize(&ctx, a)?),
        Command::Gt(a) => json(format, &commands::gt(&ctx, a)?),
        Command::Stability(a) => json(format, &commands::stability(&ctx, a)?),
        Command::Bend(a) => json(format, &commands::bend_cmd(&ctx, a)?),
        Command::Report(a) => {
            let art = commands::report(&ctx, &a.input)?;
            match format {
                Format::Csv => Ok(Outcome {
                    text: table::write_report_csv(&art),
                    failure: None,
                }),
                Format::Json => json(format, &art),
            }
        }
        Command::Verify(a) => {
            let data = verify::run(ctx.seed, a.cases, &ctx.tol);
            let residuals = data
                .checks
                .iter()
                .map(|c| (c.name.clone(), c.measured))
                .collect();
            let failed: Vec<&str> = data
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            let failure = (!failed.is_empty()).then(|| {
                CliError::invariant(failed[0], format!("failed checks: {}", failed.join(", ")))
            });
            for c in &data.checks {
                eprintln!(
                    "{} {:<34} {:>12.3e} {} {:.0e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    serde_json::to_value(c.comparison)
                        .expect("comparison serializes")
                        .as_str()
                        .unwrap_or("?"),
                    c.threshold
                );
            }
            let mut out = json(format, &ctx.artifact("verify", residuals, data))?;
            out.failure = failure;
            Ok(out)
        }
    }
}

/// Worker count from [`THREADS_VAR`], if set.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::usage(format!("{THREADS_VAR}: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!(
                "{THREADS_VAR} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Output {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Output {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Parses nothing; runs a parsed command inside a pool honoring
/// [`THREADS_VAR`] and writes its output. Returns the exit code.
pub fn run(cli: Cli) -> u8 {
    let result = thread_cap().and_then(|cap| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cap {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
        let outcome = pool.install(|| execute(&cli))?;
        write_output(cli.run.out.as_deref(), &outcome.text)?;
        outcome.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("quatpoly: {e}");
            e.exit_code()
        }
    }
}
