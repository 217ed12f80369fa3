//! The single JSON document each run emits.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ReportDocument<T: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Effective configuration with every default resolved.
    pub config: RunConfig,
    /// True when every non-exploratory check passed.
    pub pass: bool,
    pub results: T,
}

impl<T: Serialize> ReportDocument<T> {
    pub fn new(command: &'static str, config: &RunConfig, pass: bool, results: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "gamma2lab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: config.clone(),
            pass,
            results,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Numeric(format!("report serialization: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    /// Writes to `path`, or to stdout when no path is configured.
    pub fn emit(&self, path: Option<&Path>) -> CliResult<()> {
        let text = self.to_json()?;
        match path {
            Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            }),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
        }
    }
}
