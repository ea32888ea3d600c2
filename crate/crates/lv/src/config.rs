//! Run settings: built-in defaults, overridden by a TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use lv_core::decoder::{FirstLayerMode, Variant};
use lv_core::{SmoothingConfig, TrainOptions};
use serde::Deserialize;

use crate::error::{LvError, Result};

/// Settings as read from a config file or the command line; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub tagset: Option<PathBuf>,
    pub variant: Option<String>,
    pub lambda_max: Option<f64>,
    pub alpha: Option<f64>,
    pub log_floor: Option<f64>,
    pub prefix_len: Option<usize>,
    pub first_layer: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub topk: Option<usize>,
    pub folds: Option<usize>,
    pub test_fraction: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| LvError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| LvError::io(path, e))?;
        RunConfig::from_toml(&text)
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            corpus: over.corpus.or(self.corpus),
            tagset: over.tagset.or(self.tagset),
            variant: over.variant.or(self.variant),
            lambda_max: over.lambda_max.or(self.lambda_max),
            alpha: over.alpha.or(self.alpha),
            log_floor: over.log_floor.or(self.log_floor),
            prefix_len: over.prefix_len.or(self.prefix_len),
            first_layer: over.first_layer.or(self.first_layer),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            topk: over.topk.or(self.topk),
            folds: over.folds.or(self.folds),
            test_fraction: over.test_fraction.or(self.test_fraction),
        }
    }

    pub fn resolve(&self) -> Result<Settings> {
        let defaults = TrainOptions::default();
        let variant = match &self.variant {
            Some(v) => v.parse().map_err(|e: lv_core::Error| LvError::Usage(e.to_string()))?,
            None => Variant::DoubleTransfer,
        };
        let first_layer = match &self.first_layer {
            Some(m) => m.parse().map_err(|e: lv_core::Error| LvError::Usage(e.to_string()))?,
            None => FirstLayerMode::Gold,
        };
        let train = TrainOptions {
            smoothing: SmoothingConfig {
                alpha: self.alpha.unwrap_or(defaults.smoothing.alpha),
                log_floor: self.log_floor.unwrap_or(defaults.smoothing.log_floor),
            },
            prefix_len: self.prefix_len.unwrap_or(defaults.prefix_len),
            lambda_max: self.lambda_max.unwrap_or(defaults.lambda_max),
        };
        train.validate().map_err(|e| LvError::Usage(e.to_string()))?;
        let topk = self.topk.unwrap_or(3);
        if topk == 0 {
            return Err(LvError::Usage("--topk must be at least 1".to_string()));
        }
        let folds = self.folds.unwrap_or(10);
        if folds == 0 {
            return Err(LvError::Usage("--folds must be at least 1".to_string()));
        }
        let test_fraction = self.test_fraction.unwrap_or(0.2);
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(LvError::Usage(format!("test fraction {test_fraction} is outside (0, 1)")));
        }
        Ok(Settings {
            corpus: self.corpus.clone(),
            tagset: self.tagset.clone(),
            variant,
            first_layer,
            train,
            seed: self.seed.unwrap_or(0),
            out: self.out.clone(),
            topk,
            folds,
            test_fraction,
        })
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub corpus: Option<PathBuf>,
    pub tagset: Option<PathBuf>,
    pub variant: Variant,
    pub first_layer: FirstLayerMode,
    pub train: TrainOptions,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub topk: usize,
    pub folds: usize,
    pub test_fraction: f64,
}

impl Settings {
    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus.as_deref().ok_or_else(|| LvError::Usage("a corpus is required (--corpus)".to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_reference_setup() {
        let s = RunConfig::default().resolve().unwrap();
        assert_eq!(s.train.lambda_max, 4.0);
        assert_eq!(s.first_layer, FirstLayerMode::Gold);
        assert_eq!(s.variant, Variant::DoubleTransfer);
        assert_eq!((s.topk, s.folds, s.test_fraction), (3, 10, 0.2));
    }

    #[test]
    fn flags_override_the_file() {
        let file = RunConfig::from_toml("variant = \"mono2\"\nalpha = 0.5\nseed = 3\n").unwrap();
        let flags = RunConfig { seed: Some(9), ..RunConfig::default() };
        let s = file.overlay(flags).resolve().unwrap();
        assert_eq!(s.variant, Variant::MonoSecond);
        assert_eq!(s.train.smoothing.alpha, 0.5);
        assert_eq!(s.seed, 9);
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        assert!(RunConfig::from_toml("colour = 1\n").is_err());
        let bad = RunConfig { lambda_max: Some(0.0), ..RunConfig::default() };
        assert_eq!(bad.resolve().unwrap_err().exit_code(), 2);
        let bad = RunConfig { variant: Some("triple".into()), ..RunConfig::default() };
        assert!(bad.resolve().is_err());
    }
}
