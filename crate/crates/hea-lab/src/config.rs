//! Config resolution for the CLI: every subcommand takes an optional JSON
//! config file (flat object) plus flags that mirror its keys in kebab-case;
//! flags override file values and required keys are validated before any
//! computation runs.

use std::path::{Path, PathBuf};

use hea_core::hea::{AngleConvention, Boundary};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::LabError;

pub struct ConfigSource {
    file: serde_json::Map<String, Value>,
}

impl ConfigSource {
    pub fn load(path: Option<&Path>) -> Result<Self, LabError> {
        let file = match path {
            None => serde_json::Map::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| LabError::Config(format!("cannot read {}: {e}", p.display())))?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(map)) => map,
                    Ok(_) => {
                        return Err(LabError::Config(format!(
                            "{}: config must be a JSON object",
                            p.display()
                        )))
                    }
                    Err(e) => {
                        return Err(LabError::Config(format!("{}: {e}", p.display())))
                    }
                }
            }
        };
        Ok(ConfigSource { file })
    }

    fn file_value<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, LabError> {
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| LabError::Config(format!("config key {key:?}: {e}"))),
        }
    }

    /// Flag wins over file; a missing key is a config error.
    pub fn required<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<T, LabError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        self.file_value(key)?
            .ok_or_else(|| LabError::Config(format!("missing required key {key:?} (flag --{})", key.replace('_', "-"))))
    }

    pub fn optional<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, LabError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.file_value(key)?.unwrap_or(default))
    }
}

pub fn parse_boundary(text: &str) -> Result<Boundary, LabError> {
    match text {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        other => Err(LabError::Config(format!(
            "boundary must be \"open\" or \"periodic\", got {other:?}"
        ))),
    }
}

pub fn parse_convention(text: &str) -> Result<AngleConvention, LabError> {
    match text {
        "half" => Ok(AngleConvention::Half),
        "full" => Ok(AngleConvention::Full),
        other => Err(LabError::Config(format!(
            "convention must be \"half\" or \"full\", got {other:?}"
        ))),
    }
}

/// Output paths of one subcommand run.
pub struct OutputPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub plot: PathBuf,
}

impl OutputPaths {
    pub fn new(out_dir: &Path, stem: &str) -> Self {
        OutputPaths {
            csv: out_dir.join(format!("{stem}.csv")),
            summary: out_dir.join(format!("{stem}_summary.json")),
            plot: out_dir.join(format!("{stem}.svg")),
        }
    }
}
