use std::collections::HashMap;
use std::path::Path;

use log::warn;
use rayon::prelude::*;

use crate::survival::{cox_fit, cv_select_lambda, CoxOptions, CvResult, RiskGroup, SurvivalData};

use super::{
    csv_err, format_value, io_err, ClinicalRecord, DataTable, FeatureTable, Imputation, PipelineError, Result,
    RunConfig, SlideMap, Stage, StandardizationStats,
};

/// One feature of the fitted risk score.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTerm {
    pub feature: String,
    /// Fills missing cells before scaling.
    pub median: f64,
    pub mean: f64,
    pub sd: f64,
    /// Coefficient on the standardized feature.
    pub coefficient: f64,
}

/// Lasso-Cox risk score on standardized patient-level features.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub terms: Vec<ModelTerm>,
}

const MODEL_HEADER: [&str; 5] = ["feature", "median", "mean", "sd", "coefficient"];

impl Model {
    pub fn active(&self) -> impl Iterator<Item = &ModelTerm> {
        self.terms.iter().filter(|t| t.coefficient != 0.0)
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(MODEL_HEADER).expect("writing to memory");
        for t in &self.terms {
            w.write_record([
                t.feature.clone(),
                format_value(Some(t.median)),
                format_value(Some(t.mean)),
                format_value(Some(t.sd)),
                format_value(Some(t.coefficient)),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(io_err(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(PipelineError::MissingStage {
                stage: "fit",
                detail: format!("{} not found", path.display()),
            });
        }
        let rows = read_numeric_csv(path, &MODEL_HEADER)?;
        let terms = rows
            .into_iter()
            .map(|(feature, v)| ModelTerm {
                feature,
                median: v[0],
                mean: v[1],
                sd: v[2],
                coefficient: v[3],
            })
            .collect();
        Ok(Model { terms })
    }
}

/// Rows of a CSV whose first column is a label and the rest numbers.
fn read_numeric_csv(path: &Path, header: &[&str]) -> Result<Vec<(String, Vec<f64>)>> {
    let bad = |message: String| PipelineError::Csv {
        path: path.display().to_string(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found = rdr.headers().map_err(csv_err(path))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(bad(format!("expected header {}", header.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let values = rec
            .iter()
            .skip(1)
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("line {}: {s:?}", i + 2))))
            .collect::<Result<Vec<f64>>>()?;
        out.push((rec[0].to_string(), values));
    }
    Ok(out)
}

/// Clinical covariates complete and non-constant over `records`, stage I as reference.
pub fn clinical_covariates(records: &[&ClinicalRecord]) -> Vec<(String, Vec<f64>)> {
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let mut candidates: Vec<(String, Vec<Option<f64>>)> = vec![
        ("age".into(), records.iter().map(|r| r.age).collect()),
        ("female_vs_male".into(), records.iter().map(|r| r.female.map(flag)).collect()),
        ("smoker_vs_non_smoker".into(), records.iter().map(|r| r.smoker.map(flag)).collect()),
    ];
    for stage in [Stage::II, Stage::III, Stage::IV] {
        candidates.push((
            format!("stage_{}_vs_I", stage.label()),
            records.iter().map(|r| r.stage.map(|s| flag(s == stage))).collect(),
        ));
    }
    candidates
        .into_iter()
        .filter_map(|(name, col)| {
            let col: Option<Vec<f64>> = col.into_iter().collect();
            let col = col?;
            let first = *col.first()?;
            col.iter().any(|&v| v != first).then_some((name, col))
        })
        .collect()
}

/// Rows of `table` whose id has a clinical record, with those records.
pub fn join_clinical<'a>(
    table: &DataTable,
    id_to_patient: impl Fn(&str) -> Option<String>,
    clinical: &'a [ClinicalRecord],
) -> (DataTable, Vec<&'a ClinicalRecord>) {
    let by_id: HashMap<&str, &ClinicalRecord> = clinical.iter().map(|r| (r.patient_id.as_str(), r)).collect();
    let mut idx = Vec::new();
    let mut recs = Vec::new();
    for (i, id) in table.ids.iter().enumerate() {
        match id_to_patient(id).and_then(|p| by_id.get(p.as_str())) {
            Some(r) => {
                idx.push(i);
                recs.push(*r);
            }
            None => warn!("{} {id} has no clinical record; skipped", table.id_column),
        }
    }
    let joined = DataTable {
        id_column: table.id_column.clone(),
        columns: table.columns.clone(),
        ids: idx.iter().map(|&i| table.ids[i].clone()).collect(),
        values: idx.iter().map(|&i| table.values[i].clone()).collect(),
    };
    (joined, recs)
}

/// Univariate Cox result for one standardized feature.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateRow {
    pub feature: String,
    pub coefficient: f64,
    pub hazard_ratio: f64,
    pub se: f64,
    pub robust_se: f64,
    /// Wald p-value from the robust SE.
    pub p_value: f64,
    pub n: usize,
}

pub(crate) const UNIVARIATE_HEADER: [&str; 7] =
    ["feature", "coefficient", "hazard_ratio", "se", "robust_se", "p_value", "n"];

pub fn univariate_to_csv(rows: &[UnivariateRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(UNIVARIATE_HEADER).expect("writing to memory");
    for r in rows {
        w.write_record([
            r.feature.clone(),
            format_value(Some(r.coefficient)),
            format_value(Some(r.hazard_ratio)),
            format_value(Some(r.se)),
            format_value(Some(r.robust_se)),
            format_value(Some(r.p_value)),
            r.n.to_string(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
}

pub fn read_univariate(path: &Path) -> Result<Vec<UnivariateRow>> {
    Ok(read_numeric_csv(path, &UNIVARIATE_HEADER)?
        .into_iter()
        .map(|(feature, v)| UnivariateRow {
            feature,
            coefficient: v[0],
            hazard_ratio: v[1],
            se: v[2],
            robust_se: v[3],
            p_value: v[4],
            n: v[5] as usize,
        })
        .collect())
}

/// One Cox model per feature on slide-level primary tumors: the feature is
/// standardized over the slides used, adjusted for the available clinical
/// covariates, with robust SEs clustered by patient.
pub fn univariate_cox(slides: &DataTable, map: &SlideMap, clinical: &[ClinicalRecord]) -> Vec<UnivariateRow> {
    let (joined, recs) = join_clinical(slides, |s| map.get(s).cloned(), clinical);
    let mut cluster_ids: HashMap<&str, usize> = HashMap::new();
    let clusters: Vec<usize> = recs
        .iter()
        .map(|r| {
            let next = cluster_ids.len();
            *cluster_ids.entry(r.patient_id.as_str()).or_insert(next)
        })
        .collect();

    let fits: Vec<Option<UnivariateRow>> = (0..joined.columns.len())
        .into_par_iter()
        .map(|j| {
            let name = &joined.columns[j];
            let rows: Vec<usize> = (0..joined.len()).filter(|&i| joined.values[i][j].is_some()).collect();
            let x: Vec<f64> = rows.iter().map(|&i| joined.values[i][j].unwrap()).collect();
            let n = x.len() as f64;
            let mean = x.iter().sum::<f64>() / n;
            let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            if rows.is_empty() || !(sd > 1e-12 * mean.abs().max(f64::MIN_POSITIVE)) {
                warn!("univariate {name}: no variation, skipped");
                return None;
            }
            let sub: Vec<&ClinicalRecord> = rows.iter().map(|&i| recs[i]).collect();
            let mut names = vec![name.clone()];
            let mut columns = vec![x.iter().map(|v| (v - mean) / sd).collect::<Vec<f64>>()];
            for (cname, col) in clinical_covariates(&sub) {
                names.push(cname);
                columns.push(col);
            }
            let data = SurvivalData::with_clusters(
                sub.iter().map(|r| r.time).collect(),
                sub.iter().map(|r| r.event).collect(),
                columns,
                names,
                rows.iter().map(|&i| clusters[i]).collect(),
            );
            let fit = match data.and_then(|d| cox_fit(&d, &CoxOptions::default())) {
                Ok(f) => f,
                Err(e) => {
                    warn!("univariate {name}: {e}");
                    return None;
                }
            };
            if !fit.converged {
                warn!("univariate {name}: {}", fit.diagnostics.join("; "));
            }
            Some(UnivariateRow {
                feature: name.clone(),
                coefficient: fit.coefficients[0],
                hazard_ratio: fit.coefficients[0].exp(),
                se: fit.se[0],
                robust_se: fit.robust_se[0],
                p_value: fit.p_values(true)[0],
                n: rows.len(),
            })
        })
        .collect();
    fits.into_iter().flatten().collect()
}

/// Everything `fit` produces.
#[derive(Debug, Clone, PartialEq)]
pub struct FitArtifacts {
    pub model: Model,
    pub univariate: Vec<UnivariateRow>,
    pub cv: CvResult,
    pub imputation: Imputation,
    pub dropped_constant: Vec<String>,
    pub n_patients: usize,
}

impl FitArtifacts {
    /// `lambda,mean_error,se_error,nonzero,selected` per grid point.
    pub fn cv_csv(&self) -> String {
        let cv = &self.cv;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CV_HEADER).expect("writing to memory");
        for k in 0..cv.lambdas.len() {
            let selected = match (k == cv.index_min, k == cv.index_1se) {
                (true, true) => "min+1se",
                (true, false) => "min",
                (false, true) => "1se",
                _ => "",
            };
            w.write_record([
                format_value(Some(cv.lambdas[k])),
                format_value(Some(cv.mean_error[k])),
                format_value(Some(cv.se_error[k])),
                cv.path.nonzero(k).to_string(),
                selected.to_string(),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
    }

    /// Coefficient path: one row per lambda, one column per feature.
    pub fn path_csv(&self) -> String {
        let path = &self.cv.path;
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = std::iter::once("lambda").chain(path.names.iter().map(String::as_str)).collect();
        w.write_record(&header).expect("writing to memory");
        for (lambda, beta) in path.lambdas.iter().zip(&path.coefficients) {
            let rec: Vec<String> = std::iter::once(format_value(Some(*lambda)))
                .chain(beta.iter().map(|&b| format_value(Some(b))))
                .collect();
            w.write_record(&rec).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
    }

    /// Writes `model.csv` and its siblings `<stem>_univariate.csv`,
    /// `<stem>_cv.csv` and `<stem>_path.csv`.
    pub fn write(&self, model_path: &Path) -> Result<()> {
        self.model.write(model_path)?;
        for (suffix, text) in [
            ("univariate", univariate_to_csv(&self.univariate)),
            ("cv", self.cv_csv()),
            ("path", self.path_csv()),
        ] {
            let p = sibling(model_path, suffix);
            std::fs::write(&p, text).map_err(io_err(&p))?;
        }
        Ok(())
    }
}

pub(crate) const CV_HEADER: [&str; 5] = ["lambda", "mean_error", "se_error", "nonzero", "selected"];

/// `dir/model.csv` with suffix `cv` is `dir/model_cv.csv`.
pub fn sibling(model_path: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = model_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    model_path.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// Univariate screening on slides, then lasso-Cox with cross-validated λ on
/// standardized patient-level medians. The model uses the λ_1se fit.
pub fn fit_model(
    features: &FeatureTable,
    map: &SlideMap,
    clinical: &[ClinicalRecord],
    cfg: &RunConfig,
) -> Result<FitArtifacts> {
    cfg.validate()?;
    let univariate = univariate_cox(&features.primary_by_slide(), map, clinical);

    let patients = super::aggregate_patients(features, map)?;
    let (patients, recs) = join_clinical(&patients, |p| Some(p.to_string()), clinical);
    if patients.is_empty() {
        return Err(PipelineError::NoData("no patient has both features and clinical data".into()));
    }
    let imputation = Imputation::learn(&patients, cfg.missing_threshold);
    let filled = imputation.apply(&patients)?;
    let (stats, dropped_constant) = StandardizationStats::learn(&filled);
    if stats.columns.is_empty() {
        return Err(PipelineError::NoData("every feature was dropped".into()));
    }
    let z = stats.standardize(&filled)?;
    let columns: Vec<Vec<f64>> = (0..z.columns.len())
        .map(|j| z.values.iter().map(|row| row[j].expect("imputed")).collect())
        .collect();
    let data = SurvivalData::new(
        recs.iter().map(|r| r.time).collect(),
        recs.iter().map(|r| r.event).collect(),
        columns,
        z.columns.clone(),
    )?;
    let cv = cv_select_lambda(&data, &cfg.cv_options())?;

    let beta = cv.coefficients_1se();
    let terms = stats
        .columns
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let m = imputation.columns.iter().position(|c| c == name).expect("imputed column");
            ModelTerm {
                feature: name.clone(),
                median: imputation.medians[m],
                mean: stats.means[j],
                sd: stats.sds[j],
                coefficient: beta[j],
            }
        })
        .collect();
    Ok(FitArtifacts {
        model: Model { terms },
        univariate,
        cv,
        imputation,
        dropped_constant,
        n_patients: patients.len(),
    })
}

/// Risk scores of the rows of `table` with training medians, means and SDs.
pub fn predict(model: &Model, table: &DataTable) -> Result<Vec<f64>> {
    let active: Vec<&ModelTerm> = model.active().collect();
    let names: Vec<String> = active.iter().map(|t| t.feature.clone()).collect();
    let sel = table.select(&names)?;
    Ok(sel
        .values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&active)
                .map(|(v, t)| t.coefficient * (v.unwrap_or(t.median) - t.mean) / t.sd)
                .sum()
        })
        .collect())
}

/// Cox term of the adjusted validation model.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedRow {
    pub term: String,
    pub coefficient: f64,
    pub hazard_ratio: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub p_value: f64,
}

/// Cox model of the risk group adjusted for the clinical covariates, with 95% CIs.
pub fn adjusted_cox(groups: &[RiskGroup], records: &[&ClinicalRecord]) -> Result<Vec<AdjustedRow>> {
    let mut names = vec!["high_vs_low_risk".to_string()];
    let mut columns = vec![groups.iter().map(|&g| f64::from(u8::from(g == RiskGroup::High))).collect()];
    for (name, col) in clinical_covariates(records) {
        names.push(name);
        columns.push(col);
    }
    let data = SurvivalData::new(
        records.iter().map(|r| r.time).collect(),
        records.iter().map(|r| r.event).collect(),
        columns,
        names,
    )?;
    let fit = cox_fit(&data, &CoxOptions::default())?;
    if !fit.converged {
        warn!("adjusted Cox: {}", fit.diagnostics.join("; "));
    }
    let ci = fit.hazard_ratio_intervals(0.95, false);
    let p = fit.p_values(false);
    Ok(fit
        .names
        .iter()
        .enumerate()
        .map(|(j, term)| AdjustedRow {
            term: term.clone(),
            coefficient: fit.coefficients[j],
            hazard_ratio: fit.coefficients[j].exp(),
            ci_lower: ci[j].0,
            ci_upper: ci[j].1,
            p_value: p[j],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, age: Option<f64>, stage: Option<Stage>) -> ClinicalRecord {
        ClinicalRecord {
            patient_id: id.into(),
            time: 1.0,
            event: true,
            age,
            female: Some(id.len() % 2 == 0),
            smoker: Some(true),
            stage,
        }
    }

    #[test]
    fn clinical_design_skips_incomplete_and_constant_columns() {
        let recs = [
            record("a", Some(50.0), Some(Stage::I)),
            record("bb", Some(60.0), Some(Stage::III)),
            record("c", None, Some(Stage::III)),
        ];
        let refs: Vec<&ClinicalRecord> = recs.iter().collect();
        let names: Vec<String> = clinical_covariates(&refs).into_iter().map(|c| c.0).collect();
        assert_eq!(names, vec!["female_vs_male", "stage_III_vs_I"]);
    }

    #[test]
    fn prediction_uses_training_scaling_and_medians() {
        let model = Model {
            terms: vec![
                ModelTerm { feature: "x".into(), median: 3.0, mean: 2.0, sd: 2.0, coefficient: 0.5 },
                ModelTerm { feature: "gone".into(), median: 0.0, mean: 0.0, sd: 1.0, coefficient: 0.0 },
            ],
        };
        let table = DataTable {
            id_column: "patient_id".into(),
            columns: vec!["x".into()],
            ids: vec!["p".into(), "q".into()],
            values: vec![vec![Some(6.0)], vec![None]],
        };
        assert_eq!(predict(&model, &table).unwrap(), vec![1.0, 0.25]);
        let empty = DataTable { columns: vec!["y".into()], ..table };
        assert!(matches!(predict(&model, &empty), Err(PipelineError::ColumnMismatch(_))));
    }

    #[test]
    fn model_csv_round_trip_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.csv");
        assert!(matches!(Model::read(&path), Err(PipelineError::MissingStage { stage: "fit", .. })));
        let model = Model {
            terms: vec![ModelTerm { feature: "perimeter".into(), median: 61.5, mean: 60.1, sd: 0.1, coefficient: -0.3 }],
        };
        model.write(&path).unwrap();
        assert_eq!(Model::read(&path).unwrap(), model);
        assert_eq!(sibling(&path, "cv"), dir.path().join("model_cv.csv"));
    }
}
