use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced to the shell. Each maps to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant { invariant: String, detail: String },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn invariant(name: &str, detail: impl Into<String>) -> Self {
        CliError::Invariant {
            invariant: name.to_string(),
            detail: detail.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Invariant { .. } => 4,
            CliError::Output { .. } => 1,
        }
    }
}

/// Name of the invariant a library error reports, if it reports one.
pub fn invariant_name(e: &quatpoly::Error) -> Option<&'static str> {
    use quatpoly::Error::*;
    Some(match e {
        NotHermitian { .. } => "hermitian",
        PairingFailure { .. } => "eigenvalue_pairing",
        Interlacing { .. } => "interlacing",
        SpectrumMismatch { .. } => "partial_spectra",
        OutsideBall { .. } => "open_ball",
        Unstable { .. } => "stability",
        ClosureViolation { .. } => "closure",
        NotQuaternionic { .. } => "quaternionic_structure",
        NotGeneric { .. } => "genericity",
        BadRotation { .. } => "rotation_fixes_diagonal",
        RankDeficient { .. } => "rank",
        _ => return None,
    })
}

impl From<quatpoly::Error> for CliError {
    fn from(e: quatpoly::Error) -> Self {
        if e.is_non_convergence() {
            return CliError::NonConvergence(e.to_string());
        }
        match invariant_name(&e) {
            Some(name) => CliError::invariant(name, e.to_string()),
            None => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
