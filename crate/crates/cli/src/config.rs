use std::path::{Path, PathBuf};

use serde::Deserialize;

use pro2eq_core::cayley_oracle::{DEFAULT_BUDGET, DEFAULT_MARGIN};
use pro2eq_core::towers::DEFAULT_DEPTH;

use crate::CliError;

/// Contents of a `--config` TOML file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub annotations: Option<PathBuf>,
    pub depth: Option<usize>,
    pub budget: Option<usize>,
    pub margin: Option<usize>,
    pub strict_paper: Option<bool>,
    pub cache: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let mut cfg: ConfigFile = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.annotations, &mut cfg.cache].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Effective settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Config {
    pub annotations: Option<PathBuf>,
    pub depth: usize,
    pub budget: usize,
    pub margin: usize,
    pub strict_paper: bool,
    pub cache: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            annotations: None,
            depth: DEFAULT_DEPTH,
            budget: DEFAULT_BUDGET,
            margin: DEFAULT_MARGIN,
            strict_paper: false,
            cache: None,
        }
    }
}

impl Config {
    pub fn merge(file: ConfigFile) -> Self {
        let d = Config::default();
        Config {
            annotations: file.annotations,
            depth: file.depth.unwrap_or(d.depth),
            budget: file.budget.unwrap_or(d.budget),
            margin: file.margin.unwrap_or(d.margin),
            strict_paper: file.strict_paper.unwrap_or(false),
            cache: file.cache,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("depth", self.depth), ("budget", self.budget), ("margin", self.margin)] {
            if v == 0 {
                return Err(CliError::config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}
