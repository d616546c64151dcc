use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_COMPUTATION: u8 = 3;
pub const EXIT_NETWORK: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}:{line}: {msg}", path.display())]
    Config { path: PathBuf, line: usize, msg: String },

    #[error(transparent)]
    Core(#[from] fibeuler::Error),

    #[error("{0}")]
    Gate(String),

    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use fibeuler::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } => EXIT_USAGE,
            CliError::Core(E::InvalidShift(_) | E::InvalidPrecision(_) | E::Domain(_)) => EXIT_USAGE,
            CliError::Core(E::Fetch { .. }) => EXIT_NETWORK,
            CliError::Core(_) | CliError::Gate(_) | CliError::Io(_) => EXIT_COMPUTATION,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let core = |e| CliError::Core(e).exit_code();
        assert_eq!(core(fibeuler::Error::InvalidShift(-2)), EXIT_USAGE);
        assert_eq!(core(fibeuler::Error::NotCertified { requested: 40, achieved: 12 }), EXIT_COMPUTATION);
        assert_eq!(core(fibeuler::Error::Fetch { url: "u".into(), reason: "r".into() }), EXIT_NETWORK);
        assert_eq!(CliError::Gate("g".into()).exit_code(), EXIT_COMPUTATION);
        assert_eq!(CliError::Usage("u".into()).exit_code(), EXIT_USAGE);
    }
}
