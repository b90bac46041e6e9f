//! Run configuration. Defaults, then a TOML file, then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{GbcoMode, ResponseOptions};
use crate::error::{Error, Result};
use crate::hierarchy::HierarchyConfig;

/// Which output files a run writes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportToggles {
    pub metrics_csv: bool,
    pub windows_csv: bool,
    pub graphml: bool,
    pub dot: bool,
}

impl Default for ExportToggles {
    fn default() -> Self {
        ExportToggles {
            metrics_csv: true,
            windows_csv: false,
            graphml: false,
            dot: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Newline-delimited JSON corpus.
    pub corpus: Option<PathBuf>,
    /// Orientation keyword file; the bundled lexicon when unset.
    pub lexicon: Option<PathBuf>,
    /// Polar-term file; the bundled list when unset.
    pub polarity_lexicon: Option<PathBuf>,
    /// Token counts for the complexity reference; the corpus itself when unset.
    pub reference_dictionary: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Tumbling window length for rotating leadership.
    pub window_hours: u32,
    /// Responses later than this are not matched to their contact.
    pub response_cutoff_hours: Option<f64>,
    pub gbco_mode: GbcoMode,
    pub hierarchy: HierarchyConfig,
    pub export: ExportToggles,
    /// Seed for corpus synthesis.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            lexicon: None,
            polarity_lexicon: None,
            reference_dictionary: None,
            output_dir: None,
            window_hours: 24,
            response_cutoff_hours: None,
            gbco_mode: GbcoMode::Group,
            hierarchy: HierarchyConfig::default(),
            export: ExportToggles::default(),
            seed: 2017,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Reads a TOML file. Relative paths inside it are resolved against the
    /// file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&s)?;
        if let Some(base) = path.parent() {
            for p in [
                &mut cfg.corpus,
                &mut cfg.lexicon,
                &mut cfg.polarity_lexicon,
                &mut cfg.reference_dictionary,
                &mut cfg.output_dir,
            ]
            .into_iter()
            .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_hours == 0 {
            return Err(Error::InvalidConfig("window_hours must be positive".into()));
        }
        if let Some(c) = self.response_cutoff_hours {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "response_cutoff_hours must be positive, got {c}"
                )));
            }
        }
        self.hierarchy.validate()
    }

    /// Fails if an input path that is set does not exist.
    pub fn check_inputs(&self) -> Result<()> {
        let inputs = [
            &self.corpus,
            &self.lexicon,
            &self.polarity_lexicon,
            &self.reference_dictionary,
        ];
        for p in inputs.into_iter().flatten() {
            if !p.is_file() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ));
            }
        }
        Ok(())
    }

    pub fn window_secs(&self) -> i64 {
        i64::from(self.window_hours) * 3600
    }

    pub fn response_options(&self) -> ResponseOptions {
        ResponseOptions {
            cutoff_secs: self
                .response_cutoff_hours
                .map(|h| (h * 3600.0).round() as i64),
        }
    }
}
