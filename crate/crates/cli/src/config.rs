//! Project configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use solsim::embedding::TrainConfig;
use solsim::simindex::check_threshold;
use solsim::tokenizer::{Level, Mode};

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub clone: f64,
    pub bug: f64,
    pub validate: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { clone: 0.95, bug: 0.90, validate: 0.90 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub corpus_dir: Option<PathBuf>,
    pub bugdb_path: Option<PathBuf>,
    /// Model file per level, keyed `contract`, `function` or `statement`.
    pub models: BTreeMap<String, PathBuf>,
    /// Matrix file per level and mode, keyed like `statement.structural`.
    pub matrices: BTreeMap<String, PathBuf>,
    pub thresholds: Thresholds,
    pub train: TrainConfig,
    /// Seed for corpus sampling.
    pub sample_seed: u64,
}

impl ProjectConfig {
    /// Reads a TOML config. Relative paths are taken from the file's
    /// directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = solsim::artifact::read_to_string(path)?;
        let mut cfg: ProjectConfig = toml::from_str(&text)
            .map_err(|e| UsageError::Config(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.corpus_dir.iter_mut().for_each(rebase);
        cfg.bugdb_path.iter_mut().for_each(rebase);
        cfg.models.values_mut().for_each(rebase);
        cfg.matrices.values_mut().for_each(rebase);
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        let t = self.thresholds;
        for (name, v) in [("clone", t.clone), ("bug", t.bug), ("validate", t.validate)] {
            check_threshold(v).map_err(|e| UsageError::Config(format!("thresholds.{name}: {e}")))?;
        }
        for key in self.models.keys() {
            key.parse::<Level>().map_err(|e| UsageError::Config(format!("models.{key}: {e}")))?;
        }
        for key in self.matrices.keys() {
            parse_matrix_key(key).map_err(|e| UsageError::Config(format!("matrices.{key}: {e}")))?;
        }
        self.train.validate().map_err(|e| UsageError::Config(format!("train: {e}")))?;
        Ok(())
    }

    pub fn model_for(&self, level: Level) -> Option<PathBuf> {
        self.models.get(level.as_str()).cloned()
    }

    pub fn matrix_for(&self, level: Level, mode: Mode) -> Option<PathBuf> {
        self.matrices.get(&format!("{level}.{mode}")).cloned()
    }
}

fn parse_matrix_key(key: &str) -> Result<(Level, Mode), String> {
    let (l, m) = key.split_once('.').ok_or("expected `<level>.<mode>`")?;
    Ok((l.parse()?, m.parse()?))
}

/// The flag value if given, else the config value, else a usage error
/// naming both.
pub fn pick(flag: Option<PathBuf>, config: Option<PathBuf>, what: &str) -> anyhow::Result<PathBuf> {
    flag.or(config).ok_or_else(|| UsageError::Usage(format!("no {what} given and the config sets none")).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_are_rebased_and_checked() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("solsim.toml");
        std::fs::write(
            &p,
            "corpus_dir = \"corpus\"\n[models]\nstatement = \"m/s.smemb\"\n[matrices]\n\"statement.basic\" = \"/abs.smmat\"\n[thresholds]\nbug = 0.85\n[train]\nepochs = 3\n",
        )
        .unwrap();
        let c = ProjectConfig::load(&p).unwrap();
        assert_eq!(c.corpus_dir.as_deref(), Some(dir.path().join("corpus").as_path()));
        assert_eq!(c.model_for(Level::Statement).unwrap(), dir.path().join("m/s.smemb"));
        assert_eq!(c.matrix_for(Level::Statement, Mode::Basic).unwrap(), PathBuf::from("/abs.smmat"));
        assert_eq!(c.thresholds, Thresholds { bug: 0.85, ..Thresholds::default() });
        assert_eq!(c.train.epochs, 3);
        assert_eq!(c.train.dim, 150);
    }

    #[test]
    fn bad_values_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        for bad in ["[thresholds]\nclone = 1.5\n", "[models]\nblock = \"x\"\n", "unknown = 1\n", "[train]\ndim = 0\n"] {
            std::fs::write(&p, bad).unwrap();
            assert!(ProjectConfig::load(&p).is_err(), "{bad}");
        }
    }
}
