use std::path::Path;

use deloc_core::{MeasureOptions, Normalization, Tolerances};
use serde::Deserialize;

use crate::args::MeasureFlags;
use crate::error::{CliError, CliResult};
use crate::output;

/// Optional defaults file. Every key may be omitted.
///
/// ```toml
/// normalize = false
/// threads = 4
/// max_determinants = 50000
///
/// [tolerances]
/// trace = 1e-9
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub normalize: Option<bool>,
    pub threads: Option<usize>,
    pub max_determinants: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = output::read(path)?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn measure_options(&self, flags: &MeasureFlags) -> MeasureOptions {
        let mut tolerances = self.tolerances;
        if let Some(t) = flags.trace_tol {
            tolerances.trace = t;
        }
        let normalize = flags.normalize().or(self.normalize).unwrap_or(true);
        MeasureOptions {
            normalization: Normalization::from_flag(normalize),
            tolerances,
        }
    }

    pub fn max_determinants(&self, flag: Option<usize>) -> Option<usize> {
        flag.or(self.max_determinants)
    }
}
