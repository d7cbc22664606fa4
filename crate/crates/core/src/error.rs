use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    /// Input bytes do not follow the expected file layout.
    #[error("format error: {0}")]
    Format(String),

    /// A compressed stream decoded into something structurally impossible.
    #[error("corrupt stream: {0}")]
    Corrupt(String),

    /// Caller passed incompatible inputs (depth mismatch, wrong codebook count, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Argument outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("bit stream exhausted")]
    UnexpectedEof,

    #[error("symbol {0} is not in the code alphabet")]
    UnknownSymbol(u32),

    #[error("cannot build code: {0}")]
    Build(String),
}

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::Corrupt(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Usage(_) | Error::Domain(_) => 2,
            Error::Format(_)
            | Error::Corrupt(_)
            | Error::UnexpectedEof
            | Error::UnknownSymbol(_)
            | Error::Build(_) => 3,
        }
    }

    /// Reinterpret bit-level failures as stream corruption when they surface
    /// from inside a frame payload.
    pub(crate) fn into_corrupt(self) -> Self {
        match self {
            Error::UnexpectedEof => Error::corrupt("payload ended mid-codeword"),
            Error::UnknownSymbol(s) => Error::corrupt(format!("invalid symbol {s}")),
            other => other,
        }
    }
}
