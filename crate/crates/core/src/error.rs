use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shift parameter z = {0} is unsupported (need z >= -1)")]
    InvalidShift(i64),

    #[error("invalid precision settings: {0}")]
    InvalidPrecision(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("only {achieved} digits agree under precision escalation, {requested} requested")]
    NotCertified { requested: u32, achieved: u32 },

    #[error("could not bracket the saddle point for n = {n}")]
    NoBracket { n: u64 },

    #[error("root solver did not converge for n = {n}: {reason}")]
    NoConvergence { n: u64, reason: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("b-file line {line}: {msg}")]
    BFileParse { line: usize, msg: String },

    #[error("b-file format: {0}")]
    BFileFormat(String),

    #[error("fetch of {url} failed: {reason}")]
    Fetch { url: String, reason: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}
