use std::collections::BTreeMap;
use std::path::Path;

use crate::survival::{dichotomize, harrell_c, km_estimate, logrank_test, RiskGroup};

use super::model::{read_univariate, sibling, univariate_to_csv, CV_HEADER};
use super::svg::{bar_chart, line_chart, Series};
use super::{
    adjusted_cox, aggregate_patients, csv_err, format_value, io_err, join_clinical, predict, read_clinical,
    read_slide_map, ClinicalRecord, DataTable, FeatureTable, Model, PipelineError, Result, UnivariateRow,
};

/// Cross-validation curve as stored next to the model.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCurve {
    pub lambdas: Vec<f64>,
    pub mean_error: Vec<f64>,
    pub se_error: Vec<f64>,
    pub nonzero: Vec<usize>,
    pub index_min: Option<usize>,
    pub index_1se: Option<usize>,
}

impl CvCurve {
    pub fn read(path: &Path) -> Result<Self> {
        let bad = |message: String| PipelineError::Csv {
            path: path.display().to_string(),
            message,
        };
        let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
        if rdr.headers().map_err(csv_err(path))?.iter().ne(CV_HEADER) {
            return Err(bad(format!("expected header {}", CV_HEADER.join(","))));
        }
        let mut c = CvCurve {
            lambdas: Vec::new(),
            mean_error: Vec::new(),
            se_error: Vec::new(),
            nonzero: Vec::new(),
            index_min: None,
            index_1se: None,
        };
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err(path))?;
            let num = |j: usize| rec[j].parse::<f64>().map_err(|_| bad(format!("line {}: {:?}", k + 2, &rec[j])));
            c.lambdas.push(num(0)?);
            c.mean_error.push(num(1)?);
            c.se_error.push(num(2)?);
            c.nonzero.push(num(3)? as usize);
            if rec[4].contains("min") {
                c.index_min = Some(k);
            }
            if rec[4].contains("1se") {
                c.index_1se = Some(k);
            }
        }
        Ok(c)
    }
}

/// Fitted artifacts plus the cohort to score.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportInputs {
    pub model: Model,
    pub univariate: Vec<UnivariateRow>,
    pub cv: CvCurve,
    /// Patient-level raw features of the cohort being scored.
    pub patients: DataTable,
    pub clinical: Vec<ClinicalRecord>,
}

fn require(stage: &'static str, path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(PipelineError::MissingStage {
            stage,
            detail: format!("{} not found", path.display()),
        })
    }
}

impl ReportInputs {
    /// Reads the `fit` outputs next to `model_path` and aggregates the cohort.
    pub fn load(model_path: &Path, features: &Path, map: &Path, clinical: &Path) -> Result<Self> {
        let uni = sibling(model_path, "univariate");
        let cv = sibling(model_path, "cv");
        for p in [model_path, uni.as_path(), cv.as_path()] {
            require("fit", p)?;
        }
        require("extract", features)?;
        require("aggregate", map)?;
        require("clinical", clinical)?;
        let table = FeatureTable::read(features)?;
        Ok(ReportInputs {
            model: Model::read(model_path)?,
            univariate: read_univariate(&uni)?,
            cv: CvCurve::read(&cv)?,
            patients: aggregate_patients(&table, &read_slide_map(map)?)?,
            clinical: read_clinical(clinical)?,
        })
    }
}

/// Report files by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub files: BTreeMap<String, String>,
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
}

fn num(x: f64) -> String {
    format_value(Some(x))
}

fn group_name(g: RiskGroup) -> &'static str {
    match g {
        RiskGroup::Low => "low",
        RiskGroup::High => "high",
    }
}

pub fn build_report(inputs: &ReportInputs) -> Result<Report> {
    let model = &inputs.model;
    if model.terms.is_empty() {
        return Err(PipelineError::MissingStage {
            stage: "fit",
            detail: "the model has no terms".into(),
        });
    }
    if inputs.univariate.is_empty() {
        return Err(PipelineError::MissingStage {
            stage: "fit",
            detail: "no univariate results".into(),
        });
    }
    let mut files = BTreeMap::new();

    files.insert("univariate.csv".into(), univariate_to_csv(&inputs.univariate));

    let active: Vec<_> = model.active().collect();
    files.insert(
        "lasso_coefficients.csv".into(),
        csv_text(
            &["feature", "coefficient", "hazard_ratio"],
            active.iter().map(|t| vec![t.feature.clone(), num(t.coefficient), num(t.coefficient.exp())]),
        ),
    );
    let mut importance: Vec<(String, f64)> = active.iter().map(|t| (t.feature.clone(), t.coefficient)).collect();
    importance.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
    files.insert(
        "importance.csv".into(),
        csv_text(
            &["feature", "abs_coefficient", "coefficient"],
            importance.iter().map(|(f, c)| vec![f.clone(), num(c.abs()), num(*c)]),
        ),
    );
    files.insert("importance.svg".into(), bar_chart("Lasso coefficient importance", &importance));

    let cv = &inputs.cv;
    files.insert(
        "cv_curve.csv".into(),
        csv_text(
            &["lambda", "log_lambda", "mean_error", "se_error", "nonzero"],
            (0..cv.lambdas.len()).map(|k| {
                vec![
                    num(cv.lambdas[k]),
                    num(cv.lambdas[k].ln()),
                    num(cv.mean_error[k]),
                    num(cv.se_error[k]),
                    cv.nonzero[k].to_string(),
                ]
            }),
        ),
    );
    let pts = |f: &dyn Fn(usize) -> f64| (0..cv.lambdas.len()).map(|k| (cv.lambdas[k].ln(), f(k))).collect();
    let cv_series = [
        Series { label: "mean error".into(), points: pts(&|k| cv.mean_error[k]), step: false, dashed: false },
        Series { label: "+1 SE".into(), points: pts(&|k| cv.mean_error[k] + cv.se_error[k]), step: false, dashed: true },
        Series { label: "-1 SE".into(), points: pts(&|k| cv.mean_error[k] - cv.se_error[k]), step: false, dashed: true },
    ];
    let note = cv.index_1se.map(|k| format!("lambda_1se = {:.4}", cv.lambdas[k]));
    files.insert(
        "cv_curve.svg".into(),
        line_chart("Cross-validated error", "log(lambda)", "1 - C", &cv_series, note.as_deref()),
    );

    // validation: score, split at the median, compare the groups
    let (patients, recs) = join_clinical(&inputs.patients, |p| Some(p.to_string()), &inputs.clinical);
    if patients.is_empty() {
        return Err(PipelineError::NoData("no scored patient has clinical data".into()));
    }
    let scores = predict(model, &patients)?;
    let groups = dichotomize(&scores);
    let times: Vec<f64> = recs.iter().map(|r| r.time).collect();
    let events: Vec<bool> = recs.iter().map(|r| r.event).collect();
    files.insert(
        "scores.csv".into(),
        csv_text(
            &["patient_id", "risk_score", "risk_group", "time", "event"],
            (0..scores.len()).map(|i| {
                vec![
                    patients.ids[i].clone(),
                    num(scores[i]),
                    group_name(groups[i]).into(),
                    num(times[i]),
                    u8::from(events[i]).to_string(),
                ]
            }),
        ),
    );

    let high: Vec<bool> = groups.iter().map(|&g| g == RiskGroup::High).collect();
    let lr = logrank_test(&times, &events, &high)?;
    let c_index = harrell_c(&scores, &times, &events);
    files.insert(
        "km_logrank.csv".into(),
        csv_text(
            &["chi_square", "df", "p_value", "c_index"],
            [vec![num(lr.chi_square), "1".into(), num(lr.p_value), format_value(c_index)]],
        ),
    );
    let mut km_rows = Vec::new();
    let mut km_series = Vec::new();
    for g in [RiskGroup::Low, RiskGroup::High] {
        let idx: Vec<usize> = (0..groups.len()).filter(|&i| groups[i] == g).collect();
        let t: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
        let e: Vec<bool> = idx.iter().map(|&i| events[i]).collect();
        let km = km_estimate(&t, &e)?;
        let mut points = vec![(0.0, 1.0)];
        for k in 0..km.times.len() {
            km_rows.push(vec![
                group_name(g).into(),
                num(km.times[k]),
                num(km.survival[k]),
                km.at_risk[k].to_string(),
                km.events[k].to_string(),
                km.censored[k].to_string(),
            ]);
            points.push((km.times[k], km.survival[k]));
        }
        km_series.push(Series {
            label: format!("{} risk (n = {})", group_name(g), idx.len()),
            points,
            step: true,
            dashed: false,
        });
    }
    files.insert(
        "km.csv".into(),
        csv_text(&["group", "time", "survival", "at_risk", "events", "censored"], km_rows),
    );
    files.insert(
        "km.svg".into(),
        line_chart(
            "Kaplan-Meier by predicted risk group",
            "time",
            "survival",
            &km_series,
            Some(&format!("log-rank p = {:.4}", lr.p_value)),
        ),
    );

    let adjusted = adjusted_cox(&groups, &recs)?;
    files.insert(
        "adjusted_cox.csv".into(),
        csv_text(
            &["term", "coefficient", "hazard_ratio", "ci_lower", "ci_upper", "p_value"],
            adjusted.iter().map(|r| {
                vec![
                    r.term.clone(),
                    num(r.coefficient),
                    num(r.hazard_ratio),
                    num(r.ci_lower),
                    num(r.ci_upper),
                    num(r.p_value),
                ]
            }),
        ),
    );

    Ok(Report { files })
}

pub fn write_report(report: &Report, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (name, text) in &report.files {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(io_err(&p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ModelTerm;

    fn inputs(n: usize) -> ReportInputs {
        let ids: Vec<String> = (0..n).map(|i| format!("p{i:02}")).collect();
        let clinical = ids
            .iter()
            .enumerate()
            .map(|(i, id)| ClinicalRecord {
                patient_id: id.clone(),
                time: if i % 2 == 0 { 1.0 + i as f64 } else { 40.0 - i as f64 },
                event: i % 5 != 0,
                age: Some(50.0 + (i * 7 % 13) as f64),
                female: Some(i % 3 == 0),
                smoker: None,
                stage: None,
            })
            .collect();
        ReportInputs {
            model: Model {
                terms: vec![ModelTerm { feature: "x".into(), median: 0.0, mean: 0.0, sd: 1.0, coefficient: 0.7 }],
            },
            univariate: vec![UnivariateRow {
                feature: "x".into(),
                coefficient: 0.5,
                hazard_ratio: 0.5f64.exp(),
                se: 0.1,
                robust_se: 0.12,
                p_value: 0.01,
                n,
            }],
            cv: CvCurve {
                lambdas: vec![1.0, 0.1],
                mean_error: vec![0.5, 0.4],
                se_error: vec![0.02, 0.03],
                nonzero: vec![0, 1],
                index_min: Some(1),
                index_1se: Some(1),
            },
            patients: DataTable {
                id_column: "patient_id".into(),
                columns: vec!["x".into()],
                ids,
                values: (0..n).map(|i| vec![Some(if i % 2 == 0 { 1.0 } else { -1.0 } * i as f64)]).collect(),
            },
            clinical,
        }
    }

    #[test]
    fn bundle_has_every_table() {
        let report = build_report(&inputs(30)).unwrap();
        let names: Vec<&str> = report.files.keys().map(String::as_str).collect();
        for f in [
            "adjusted_cox.csv",
            "cv_curve.csv",
            "cv_curve.svg",
            "importance.csv",
            "importance.svg",
            "km.csv",
            "km.svg",
            "km_logrank.csv",
            "lasso_coefficients.csv",
            "scores.csv",
            "univariate.csv",
        ] {
            assert!(names.contains(&f), "missing {f}");
        }
        assert!(report.files["univariate.csv"].starts_with("feature,coefficient,hazard_ratio,se,robust_se,p_value"));
        let km = &report.files["km.csv"];
        assert!(km.contains("\nlow,") && km.contains("\nhigh,"));
        assert_eq!(report.files["km_logrank.csv"].lines().count(), 2);
        assert_eq!(report.files["km.svg"].matches("<path").count(), 3);
        let adj = &report.files["adjusted_cox.csv"];
        assert!(adj.contains("\nhigh_vs_low_risk,") && adj.contains("\nage,") && !adj.contains("smoker"));
    }

    #[test]
    fn empty_model_is_a_missing_stage() {
        let mut i = inputs(10);
        i.model.terms.clear();
        assert!(matches!(build_report(&i), Err(PipelineError::MissingStage { stage: "fit", .. })));
    }

    #[test]
    fn missing_files_name_the_stage() {
        let dir = tempfile::tempdir().unwrap();
        let p = |n: &str| dir.path().join(n);
        match ReportInputs::load(&p("model.csv"), &p("f.csv"), &p("m.csv"), &p("c.csv")) {
            Err(PipelineError::MissingStage { stage, .. }) => assert_eq!(stage, "fit"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
