//! Flat key/value configuration with a fixed precedence chain:
//! command-line flag, then the `QMZV_ORDER` environment variable (order
//! only), then the config file, then built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Truncation defaults shared by the subcommands.
#[derive(Debug, Clone)]
pub struct Config {
    /// q-expansion truncation order.
    pub default_order: usize,
    /// Per-variable degree cap for mould symmetry checks.
    pub default_degree: u16,
    /// Bimould depth bound for construction contexts.
    pub default_depth: usize,
    /// Where the depth-two constant table comes from: `builtin` solves it,
    /// anything else is a path to a JSON table.
    pub beta_source: BetaSource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BetaSource {
    Builtin,
    Path(PathBuf),
}

impl Default for Config {
    fn default() -> Self {
        Config {
            default_order: 50,
            default_degree: 4,
            default_depth: 2,
            beta_source: BetaSource::Builtin,
        }
    }
}

impl Config {
    /// Load configuration: the explicit `--config` path must exist; the
    /// implicit `./qmzv.toml` is optional.  The `QMZV_ORDER` environment
    /// variable overrides the file's `default_order`.
    pub fn load(explicit: Option<&Path>) -> Result<Config> {
        let mut cfg = Config::default();
        let path = match explicit {
            Some(p) => {
                if !p.exists() {
                    bail!("config file {} does not exist", p.display());
                }
                Some(p.to_path_buf())
            }
            None => {
                let p = PathBuf::from("qmzv.toml");
                p.exists().then_some(p)
            }
        };
        if let Some(p) = path {
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("reading {}", p.display()))?;
            cfg.apply_file(&text)
                .with_context(|| format!("parsing {}", p.display()))?;
        }
        if let Ok(v) = std::env::var("QMZV_ORDER") {
            cfg.default_order = v
                .parse()
                .with_context(|| format!("QMZV_ORDER must be a positive integer, got '{v}'"))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = text.parse()?;
        for (key, value) in table {
            match key.as_str() {
                "default_order" => {
                    self.default_order = as_positive(&value, &key)? as usize;
                }
                "default_degree" => {
                    self.default_degree = u16::try_from(as_positive(&value, &key)?)
                        .map_err(|_| anyhow::anyhow!("{key} is too large"))?;
                }
                "default_depth" => {
                    self.default_depth = as_positive(&value, &key)? as usize;
                }
                "beta_source" => {
                    let s = value
                        .as_str()
                        .with_context(|| format!("{key} must be a string"))?;
                    self.beta_source = if s == "builtin" {
                        BetaSource::Builtin
                    } else {
                        BetaSource::Path(PathBuf::from(s))
                    };
                }
                other => bail!("unknown config key '{other}' (flat keys only)"),
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.default_order < 1 {
            bail!("default_order must be at least 1");
        }
        if self.default_degree < 1 {
            bail!("default_degree must be at least 1");
        }
        if !(1..=3).contains(&self.default_depth) {
            bail!("default_depth must be between 1 and 3");
        }
        Ok(())
    }
}

fn as_positive(value: &toml::Value, key: &str) -> Result<i64> {
    let n = value
        .as_integer()
        .with_context(|| format!("{key} must be an integer"))?;
    if n < 1 {
        bail!("{key} must be positive");
    }
    Ok(n)
}
