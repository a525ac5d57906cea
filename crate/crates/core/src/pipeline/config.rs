use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::descriptors::{FeatureConfig, DEFAULT_ENTROPY_BINS};
use crate::raster::{DEFAULT_MIN_TUMOR_AREA, DEFAULT_TISSUE_FRACTION};
use crate::contour::DEFAULT_SMOOTHING_FRACTION;
use crate::survival::CvOptions;

use super::{io_err, PipelineError, Result};

/// Every tunable of a run. Parsed from flat `key = value` text.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_dir: Option<PathBuf>,
    pub min_tumor_area: usize,
    pub tissue_fraction: f64,
    pub smoothing_fraction: f64,
    pub entropy_bins: usize,
    pub n_lambda: usize,
    pub lambda_min_ratio: f64,
    pub folds: usize,
    pub seed: u64,
    /// Features missing in a larger share of subjects are dropped before fitting.
    pub missing_threshold: f64,
    /// Worker threads for extraction; 0 lets rayon decide.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input_dir: None,
            min_tumor_area: DEFAULT_MIN_TUMOR_AREA,
            tissue_fraction: DEFAULT_TISSUE_FRACTION,
            smoothing_fraction: DEFAULT_SMOOTHING_FRACTION,
            entropy_bins: DEFAULT_ENTROPY_BINS,
            n_lambda: 100,
            lambda_min_ratio: 0.001,
            folds: 10,
            seed: 1,
            missing_threshold: 0.2,
            threads: 0,
        }
    }
}

impl RunConfig {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        std::fs::read_to_string(path).map_err(io_err(path))?.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(PipelineError::Config { line: 0, message });
        if self.min_tumor_area == 0 {
            return bad("min_tumor_area must be positive".into());
        }
        if !(self.tissue_fraction > 0.0 && self.tissue_fraction <= 1.0) {
            return bad(format!("tissue_fraction {} outside (0, 1]", self.tissue_fraction));
        }
        if !(self.smoothing_fraction > 0.0 && self.smoothing_fraction <= 1.0) {
            return bad(format!("smoothing_fraction {} outside (0, 1]", self.smoothing_fraction));
        }
        if self.entropy_bins == 0 {
            return bad("entropy_bins must be positive".into());
        }
        if self.n_lambda == 0 {
            return bad("n_lambda must be positive".into());
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return bad(format!("lambda_min_ratio {} outside (0, 1)", self.lambda_min_ratio));
        }
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        if !(self.missing_threshold > 0.0 && self.missing_threshold <= 1.0) {
            return bad(format!("missing_threshold {} outside (0, 1]", self.missing_threshold));
        }
        Ok(())
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            smoothing_fraction: self.smoothing_fraction,
            entropy_bins: self.entropy_bins,
        }
    }

    pub fn cv_options(&self) -> CvOptions {
        CvOptions {
            folds: self.folds,
            seed: self.seed,
            n_lambda: self.n_lambda,
            min_ratio: self.lambda_min_ratio,
            ..CvOptions::default()
        }
    }
}

fn parse_field<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| PipelineError::Config {
        line,
        message: format!("bad value {value:?} for {key}"),
    })
}

impl FromStr for RunConfig {
    type Err = PipelineError;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| PipelineError::Config {
                line,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "input_dir" => cfg.input_dir = Some(PathBuf::from(value)),
                "min_tumor_area" => cfg.min_tumor_area = parse_field(line, key, value)?,
                "tissue_fraction" => cfg.tissue_fraction = parse_field(line, key, value)?,
                "smoothing_fraction" => cfg.smoothing_fraction = parse_field(line, key, value)?,
                "entropy_bins" => cfg.entropy_bins = parse_field(line, key, value)?,
                "n_lambda" => cfg.n_lambda = parse_field(line, key, value)?,
                "lambda_min_ratio" => cfg.lambda_min_ratio = parse_field(line, key, value)?,
                "folds" => cfg.folds = parse_field(line, key, value)?,
                "seed" => cfg.seed = parse_field(line, key, value)?,
                "missing_threshold" => cfg.missing_threshold = parse_field(line, key, value)?,
                "threads" => cfg.threads = parse_field(line, key, value)?,
                other => {
                    return Err(PipelineError::Config {
                        line,
                        message: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
