//! Orchestration: heat maps to feature tables, patient aggregation,
//! standardisation, model fitting and report files.

mod clinical;
mod config;
mod extract;
mod model;
mod report;
pub mod svg;
pub mod synthetic;
mod table;

pub use clinical::{read_clinical, read_slide_map, ClinicalRecord, SlideMap, Stage};
pub use config::RunConfig;
pub use extract::{
    extract_directory, extract_heatmap, extract_slide, heatmap_files, slide_id_of, write_failures, BatchExtraction,
    SlideExtraction, SlideFailure, TumorRow,
};
pub use model::{
    adjusted_cox, clinical_covariates, fit_model, join_clinical, predict, read_univariate, sibling,
    univariate_cox, univariate_to_csv, AdjustedRow, FitArtifacts, Model, ModelTerm, UnivariateRow,
};
pub use report::{build_report, write_report, CvCurve, Report, ReportInputs};
pub use table::{aggregate_patients, median, DataTable, FeatureRow, FeatureTable, Imputation, StandardizationStats};

use std::path::Path;

use thiserror::Error;

use crate::raster::RasterError;
use crate::survival::SurvivalError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: String, message: String },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Survival(#[from] SurvivalError),
    #[error("slides without a patient: {}", .0.join(", "))]
    UnmappedSlides(Vec<String>),
    #[error("column mismatch: {0}")]
    ColumnMismatch(String),
    #[error("duplicate key {0}")]
    DuplicateKey(String),
    #[error("missing {stage} output: {detail}")]
    MissingStage { stage: &'static str, detail: String },
    #[error("no usable data: {0}")]
    NoData(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub(crate) fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> PipelineError + '_ {
    move |e| PipelineError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Shortest text that parses back to the same value; empty when missing.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

pub(crate) fn parse_value(s: &str) -> std::result::Result<Option<f64>, String> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| format!("{s:?} is not a number"))
}
