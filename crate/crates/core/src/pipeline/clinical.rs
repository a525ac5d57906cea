use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use super::{csv_err, PipelineError, Result};

/// Slide id to patient id.
pub type SlideMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    I,
    II,
    III,
    IV,
}

impl Stage {
    /// Accepts roman or arabic numerals, an optional `stage` prefix and a
    /// sub-stage letter (`IIIA` is stage III).
    pub fn parse(text: &str) -> Option<Stage> {
        let t = text.trim().to_ascii_uppercase();
        let t = t.strip_prefix("STAGE").unwrap_or(&t).trim();
        let t = t.trim_end_matches(['A', 'B', 'C']);
        match t {
            "I" | "1" => Some(Stage::I),
            "II" | "2" => Some(Stage::II),
            "III" | "3" => Some(Stage::III),
            "IV" | "4" => Some(Stage::IV),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Stage::I => "I",
            Stage::II => "II",
            Stage::III => "III",
            Stage::IV => "IV",
        }
    }
}

/// One patient's outcome and clinical covariates. Covariates are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct ClinicalRecord {
    pub patient_id: String,
    pub time: f64,
    pub event: bool,
    pub age: Option<f64>,
    /// 1 for female.
    pub female: Option<bool>,
    pub smoker: Option<bool>,
    pub stage: Option<Stage>,
}

fn parse_flag(s: &str, yes: &[&str], no: &[&str]) -> std::result::Result<Option<bool>, String> {
    let t = s.trim().to_ascii_lowercase();
    if t.is_empty() || t == "na" {
        Ok(None)
    } else if t == "1" || yes.contains(&t.as_str()) {
        Ok(Some(true))
    } else if t == "0" || no.contains(&t.as_str()) {
        Ok(Some(false))
    } else {
        Err(format!("unrecognised value {s:?}"))
    }
}

/// Reads `patient_id,time,event` plus optional `age,gender,smoking,stage`
/// columns, in any order.
pub fn read_clinical(path: &Path) -> Result<Vec<ClinicalRecord>> {
    let bad = |message: String| PipelineError::Csv {
        path: path.display().to_string(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = rdr.headers().map_err(csv_err(path))?.clone();
    let find = |name: &str| header.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let required = |name: &str| find(name).ok_or_else(|| bad(format!("missing column {name}")));
    let (pid, time, event) = (required("patient_id")?, required("time")?, required("event")?);
    let (age, gender, smoking, stage) = (find("age"), find("gender"), find("smoking"), find("stage"));

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = i + 2;
        let at = |m: String| bad(format!("line {line}: {m}"));
        let field = |j: Option<usize>| j.map(|j| rec[j].trim()).filter(|s| !s.is_empty() && *s != "NA");

        let patient_id = rec[pid].trim().to_string();
        if !seen.insert(patient_id.clone()) {
            return Err(PipelineError::DuplicateKey(format!("patient {patient_id}")));
        }
        let t: f64 = rec[time].trim().parse().map_err(|_| at(format!("time {:?}", &rec[time])))?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(at(format!("time {t} must be finite and non-negative")));
        }
        let event = parse_flag(&rec[event], &["true", "dead", "yes"], &["false", "alive", "no"])
            .map_err(at)?
            .ok_or_else(|| at("event is missing".into()))?;
        let age = field(age)
            .map(|s| s.parse::<f64>().map_err(|_| at(format!("age {s:?}"))))
            .transpose()?;
        let female = field(gender)
            .map(|s| parse_flag(s, &["f", "female"], &["m", "male"]).map_err(at))
            .transpose()?
            .flatten();
        let smoker = field(smoking)
            .map(|s| parse_flag(s, &["yes", "smoker", "true"], &["no", "non-smoker", "never", "false"]).map_err(at))
            .transpose()?
            .flatten();
        let stage = field(stage)
            .map(|s| Stage::parse(s).ok_or_else(|| at(format!("stage {s:?}"))))
            .transpose()?;
        out.push(ClinicalRecord {
            patient_id,
            time: t,
            event,
            age,
            female,
            smoker,
            stage,
        });
    }
    Ok(out)
}

/// Reads a `slide_id,patient_id` table.
pub fn read_slide_map(path: &Path) -> Result<SlideMap> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = rdr.headers().map_err(csv_err(path))?.clone();
    let find = |name: &str| {
        header.iter().position(|h| h.trim() == name).ok_or_else(|| PipelineError::Csv {
            path: path.display().to_string(),
            message: format!("missing column {name}"),
        })
    };
    let (s, p) = (find("slide_id")?, find("patient_id")?);
    let mut map = SlideMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(path))?;
        let slide = rec[s].trim().to_string();
        if map.insert(slide.clone(), rec[p].trim().to_string()).is_some() {
            return Err(PipelineError::DuplicateKey(format!("slide {slide}")));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_spellings() {
        assert_eq!(Stage::parse("IIIA"), Some(Stage::III));
        assert_eq!(Stage::parse("stage ii"), Some(Stage::II));
        assert_eq!(Stage::parse("4"), Some(Stage::IV));
        assert_eq!(Stage::parse("IB"), Some(Stage::I));
        assert_eq!(Stage::parse("V"), None);
    }

    #[test]
    fn reads_mixed_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clinical.csv");
        std::fs::write(
            &path,
            "stage,patient_id,time,event,age,gender,smoking\nIIA,p1,3.5,1,61,F,1\nI,p2,10,0,,male,NA\n",
        )
        .unwrap();
        let recs = read_clinical(&path).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].stage, Some(Stage::II));
        assert_eq!(recs[0].female, Some(true));
        assert_eq!(recs[1].age, None);
        assert_eq!(recs[1].smoker, None);
        assert!(!recs[1].event);

        std::fs::write(&path, "patient_id,time\np1,3\n").unwrap();
        assert!(read_clinical(&path).is_err());
        std::fs::write(&path, "patient_id,time,event\np1,3,1\np1,4,0\n").unwrap();
        assert!(matches!(read_clinical(&path), Err(PipelineError::DuplicateKey(_))));
    }
}
