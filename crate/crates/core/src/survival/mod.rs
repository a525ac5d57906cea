//! Survival analysis: Kaplan-Meier curves, the log-rank test, Cox
//! proportional hazards (plain and lasso-penalised), cross-validated penalty
//! selection and Harrell's concordance.

mod concordance;
mod cox;
mod cv;
mod data;
mod km;
mod lasso;
mod logrank;
mod risk;

pub use concordance::{dichotomize, harrell_c, harrell_counts, ConcordanceCounts, RiskGroup};
pub use cox::{cox_fit, partial_loglik, CoxFit, CoxOptions, Ties};
pub use cv::{cv_select_lambda, stratified_folds, CvOptions, CvResult};
pub use data::{column_stats, SurvivalData, SurvivalRecord};
pub use km::{km_estimate, KmCurve};
pub use lasso::{cox_lasso, lambda_grid, lambda_max, LassoOptions, LassoPath};
pub use logrank::{logrank_test, LogRank};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurvivalError {
    #[error("no records")]
    Empty,
    #[error("record {index}: {message}")]
    InvalidRecord { index: usize, message: String },
    #[error("covariate {name:?} has {found} values, expected {expected}")]
    ColumnLength { name: String, expected: usize, found: usize },
    #[error("group {0} is empty")]
    EmptyGroup(&'static str),
    #[error("no events in the data")]
    NoEvents,
    #[error("covariate {0:?} is constant")]
    ConstantCovariate(String),
    #[error("information matrix is singular")]
    Singular,
    #[error("covariate {name:?} is not standardised (mean {mean:e}, sd {sd})")]
    NotStandardized { name: String, mean: f64, sd: f64 },
    #[error("need at least {needed} subjects for {folds}-fold cross-validation, found {found}")]
    TooFewSubjects { needed: usize, folds: usize, found: usize },
    #[error("could not draw {folds} folds that each contain an event after {attempts} attempts")]
    FoldsWithoutEvents { folds: usize, attempts: usize },
    #[error("invalid option: {0}")]
    InvalidOption(String),
}
