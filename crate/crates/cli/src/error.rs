use thiserror::Error;

/// Process exit status for each failure class.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ASSERTION: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } => exit::CONFIG,
            Self::Numeric(_) => exit::NUMERIC,
        }
    }
}

/// Parameter and range problems are configuration errors; everything the
/// numerics raise at run time is a numeric error.
impl From<gamma2lab_core::Error> for CliError {
    fn from(e: gamma2lab_core::Error) -> Self {
        use gamma2lab_core::Error as E;
        match e {
            E::Parameter(_) | E::Range { .. } => Self::Config(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
