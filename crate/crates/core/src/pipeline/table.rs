use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use log::warn;

use crate::descriptors::{ExtendedFeature, Feature};

use super::{csv_err, format_value, io_err, parse_value, BatchExtraction, PipelineError, Result, SlideMap};

const KEY_COLUMNS: [&str; 4] = ["slide_id", "tissue_id", "tumor_id", "is_primary"];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub slide_id: String,
    pub tissue_id: u32,
    pub tumor_id: u32,
    pub is_primary: bool,
    pub values: Vec<Option<f64>>,
}

/// One row per tumor keyed by `(slide_id, tissue_id, tumor_id)`: the 30
/// descriptors in fixed order, optionally followed by the extended ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

fn canonical_columns(extended: bool) -> Vec<String> {
    let mut cols: Vec<String> = Feature::ALL.iter().map(|f| f.name().to_string()).collect();
    if extended {
        cols.extend(ExtendedFeature::ALL.iter().map(|f| f.name().to_string()));
    }
    cols
}

impl FeatureTable {
    pub fn from_batch(batch: &BatchExtraction, extended: bool) -> Self {
        let columns = canonical_columns(extended);
        let rows = batch
            .rows()
            .map(|r| {
                let mut values: Vec<Option<f64>> = match &r.features {
                    Some(f) => f.canonical.values().to_vec(),
                    None => vec![None; Feature::ALL.len()],
                };
                if extended {
                    match &r.features {
                        Some(f) => values.extend_from_slice(f.extended.values()),
                        None => values.extend(std::iter::repeat_n(None, ExtendedFeature::ALL.len())),
                    }
                }
                FeatureRow {
                    slide_id: r.slide_id.clone(),
                    tissue_id: r.tissue_id,
                    tumor_id: r.tumor_id,
                    is_primary: r.is_primary,
                    values,
                }
            })
            .collect();
        Self { columns, rows }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn primary(&self) -> FeatureTable {
        FeatureTable {
            columns: self.columns.clone(),
            rows: self.rows.iter().filter(|r| r.is_primary).cloned().collect(),
        }
    }

    /// Primary tumors as a table keyed by slide.
    pub fn primary_by_slide(&self) -> DataTable {
        let rows: Vec<&FeatureRow> = self.rows.iter().filter(|r| r.is_primary).collect();
        DataTable {
            id_column: "slide_id".into(),
            columns: self.columns.clone(),
            ids: rows.iter().map(|r| r.slide_id.clone()).collect(),
            values: rows.iter().map(|r| r.values.clone()).collect(),
        }
    }

    pub fn write_to<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(self.columns.iter().map(String::as_str)).collect();
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.slide_id.clone(),
                r.tissue_id.to_string(),
                r.tumor_id.to_string(),
                u8::from(r.is_primary).to_string(),
            ];
            rec.extend(r.values.iter().map(|&v| format_value(v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(io_err(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(io_err(path))?;
        Self::read_from(file, &path.display().to_string())
    }

    pub fn read_from<R: Read>(input: R, source: &str) -> Result<Self> {
        let bad = |message: String| PipelineError::Csv {
            path: source.to_string(),
            message,
        };
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.len() < KEY_COLUMNS.len() || KEY_COLUMNS.iter().zip(header.iter()).any(|(a, b)| *a != b) {
            return Err(bad(format!("header must start with {}", KEY_COLUMNS.join(","))));
        }
        let columns: Vec<String> = header.iter().skip(KEY_COLUMNS.len()).map(str::to_string).collect();
        if columns != canonical_columns(false) && columns != canonical_columns(true) {
            return Err(PipelineError::ColumnMismatch(format!(
                "{source}: feature columns differ from the descriptor list"
            )));
        }

        let mut rows = Vec::new();
        let mut keys = HashSet::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let int = |j: usize| {
                rec[j]
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| bad(format!("line {line}: {} {:?} is not an integer", KEY_COLUMNS[j], &rec[j])))
            };
            let (tissue_id, tumor_id) = (int(1)?, int(2)?);
            let is_primary = match rec[3].trim() {
                "1" | "true" => true,
                "0" | "false" => false,
                other => return Err(bad(format!("line {line}: is_primary {other:?}"))),
            };
            let values = rec
                .iter()
                .skip(KEY_COLUMNS.len())
                .map(parse_value)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|m| bad(format!("line {line}: {m}")))?;
            let slide_id = rec[0].to_string();
            if !keys.insert((slide_id.clone(), tissue_id, tumor_id)) {
                return Err(PipelineError::DuplicateKey(format!("{slide_id}/{tissue_id}/{tumor_id}")));
            }
            rows.push(FeatureRow {
                slide_id,
                tissue_id,
                tumor_id,
                is_primary,
                values,
            });
        }
        Ok(Self { columns, rows })
    }
}

/// Numeric table with one string key per row; missing cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub id_column: String,
    pub columns: Vec<String>,
    pub ids: Vec<String>,
    /// Row-major.
    pub values: Vec<Vec<Option<f64>>>,
}

impl DataTable {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, j: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|row| row[j]).collect()
    }

    /// Rows whose id satisfies `keep`, in the original order.
    pub fn filter_rows(&self, keep: impl Fn(&str) -> bool) -> DataTable {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.ids[i])).collect();
        DataTable {
            id_column: self.id_column.clone(),
            columns: self.columns.clone(),
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            values: idx.iter().map(|&i| self.values[i].clone()).collect(),
        }
    }

    /// The named columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<DataTable> {
        let missing: Vec<&str> = names
            .iter()
            .filter(|n| self.column_index(n).is_none())
            .map(String::as_str)
            .collect();
        if !missing.is_empty() {
            return Err(PipelineError::ColumnMismatch(format!("table lacks {}", missing.join(", "))));
        }
        let idx: Vec<usize> = names.iter().map(|n| self.column_index(n).unwrap()).collect();
        Ok(DataTable {
            id_column: self.id_column.clone(),
            columns: names.to_vec(),
            ids: self.ids.clone(),
            values: self.values.iter().map(|row| idx.iter().map(|&j| row[j]).collect()).collect(),
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = std::iter::once(self.id_column.as_str())
            .chain(self.columns.iter().map(String::as_str))
            .collect();
        w.write_record(&header).expect("writing to memory");
        for (id, row) in self.ids.iter().zip(&self.values) {
            let rec: Vec<String> = std::iter::once(id.clone()).chain(row.iter().map(|&v| format_value(v))).collect();
            w.write_record(&rec).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(io_err(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
        let header = rdr.headers().map_err(csv_err(path))?.clone();
        if header.is_empty() {
            return Err(PipelineError::Csv {
                path: path.display().to_string(),
                message: "empty header".into(),
            });
        }
        let mut table = DataTable {
            id_column: header[0].to_string(),
            columns: header.iter().skip(1).map(str::to_string).collect(),
            ids: Vec::new(),
            values: Vec::new(),
        };
        let mut seen = HashSet::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err(path))?;
            let row = rec
                .iter()
                .skip(1)
                .map(parse_value)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|message| PipelineError::Csv {
                    path: path.display().to_string(),
                    message: format!("line {}: {message}", i + 2),
                })?;
            if !seen.insert(rec[0].to_string()) {
                return Err(PipelineError::DuplicateKey(rec[0].to_string()));
            }
            table.ids.push(rec[0].to_string());
            table.values.push(row);
        }
        Ok(table)
    }
}

/// Median of the values; the midpoint for an even count.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// Per-patient medians over the primary-tumor rows of that patient's slides.
///
/// Every slide in the table must be mapped. Patients are sorted by id.
pub fn aggregate_patients(table: &FeatureTable, map: &SlideMap) -> Result<DataTable> {
    let unmapped: BTreeSet<&str> = table
        .rows
        .iter()
        .filter(|r| !map.contains_key(&r.slide_id))
        .map(|r| r.slide_id.as_str())
        .collect();
    if !unmapped.is_empty() {
        return Err(PipelineError::UnmappedSlides(unmapped.into_iter().map(str::to_string).collect()));
    }
    let mut groups: BTreeMap<&str, Vec<&FeatureRow>> = BTreeMap::new();
    for r in table.rows.iter().filter(|r| r.is_primary) {
        groups.entry(map[&r.slide_id].as_str()).or_default().push(r);
    }
    let k = table.columns.len();
    let mut out = DataTable {
        id_column: "patient_id".into(),
        columns: table.columns.clone(),
        ids: Vec::with_capacity(groups.len()),
        values: Vec::with_capacity(groups.len()),
    };
    for (patient, rows) in groups {
        let row = (0..k)
            .map(|j| {
                let present: Vec<f64> = rows.iter().filter_map(|r| r.values[j]).collect();
                median(&present)
            })
            .collect();
        out.ids.push(patient.to_string());
        out.values.push(row);
    }
    Ok(out)
}

/// Columns kept after the missing-share rule and the value filling their gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputation {
    pub columns: Vec<String>,
    pub medians: Vec<f64>,
    pub dropped: Vec<String>,
}

impl Imputation {
    /// Drops columns missing in more than `threshold` of the rows; the rest are
    /// filled with the column median.
    pub fn learn(table: &DataTable, threshold: f64) -> Self {
        let n = table.len();
        let mut out = Imputation {
            columns: Vec::new(),
            medians: Vec::new(),
            dropped: Vec::new(),
        };
        for (j, name) in table.columns.iter().enumerate() {
            let present: Vec<f64> = table.values.iter().filter_map(|row| row[j]).collect();
            let missing_share = if n == 0 { 1.0 } else { (n - present.len()) as f64 / n as f64 };
            match median(&present) {
                Some(m) if missing_share <= threshold => {
                    out.columns.push(name.clone());
                    out.medians.push(m);
                }
                _ => {
                    warn!("dropping {name}: missing in {:.1}% of rows", 100.0 * missing_share);
                    out.dropped.push(name.clone());
                }
            }
        }
        out
    }

    pub fn apply(&self, table: &DataTable) -> Result<DataTable> {
        let mut t = table.select(&self.columns)?;
        for row in &mut t.values {
            for (v, &m) in row.iter_mut().zip(&self.medians) {
                v.get_or_insert(m);
            }
        }
        Ok(t)
    }
}

/// Per-column mean and (population) SD learned on a training table.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationStats {
    pub columns: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl StandardizationStats {
    /// Learns stats from the present cells of each column. Constant and
    /// all-missing columns are left out; their names are returned.
    pub fn learn(table: &DataTable) -> (Self, Vec<String>) {
        let mut stats = StandardizationStats {
            columns: Vec::new(),
            means: Vec::new(),
            sds: Vec::new(),
        };
        let mut dropped = Vec::new();
        for (j, name) in table.columns.iter().enumerate() {
            let x: Vec<f64> = table.values.iter().filter_map(|row| row[j]).collect();
            let n = x.len() as f64;
            let mean = x.iter().sum::<f64>() / n;
            let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if x.is_empty() || !sd.is_finite() || sd <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                warn!("dropping {name}: zero standard deviation");
                dropped.push(name.clone());
                continue;
            }
            stats.columns.push(name.clone());
            stats.means.push(mean);
            stats.sds.push(sd);
        }
        (stats, dropped)
    }

    /// `(x - mean) / sd` on the stats' columns; other columns are discarded.
    pub fn standardize(&self, table: &DataTable) -> Result<DataTable> {
        let mut t = table.select(&self.columns)?;
        for row in &mut t.values {
            for ((v, &m), &s) in row.iter_mut().zip(&self.means).zip(&self.sds) {
                *v = v.map(|x| (x - m) / s);
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(columns: &[&str], rows: &[(&str, Vec<Option<f64>>)]) -> DataTable {
        DataTable {
            id_column: "id".into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            ids: rows.iter().map(|r| r.0.to_string()).collect(),
            values: rows.iter().map(|r| r.1.clone()).collect(),
        }
    }

    fn feature_rows(rows: &[(&str, u32, bool, f64)]) -> FeatureTable {
        let columns = canonical_columns(false);
        FeatureTable {
            rows: rows
                .iter()
                .map(|&(slide, tumor, primary, v)| {
                    let mut values = vec![None; columns.len()];
                    values[0] = Some(v);
                    FeatureRow {
                        slide_id: slide.into(),
                        tissue_id: 1,
                        tumor_id: tumor,
                        is_primary: primary,
                        values,
                    }
                })
                .collect(),
            columns,
        }
    }

    fn slide_map(pairs: &[(&str, &str)]) -> SlideMap {
        pairs.iter().map(|(s, p)| (s.to_string(), p.to_string())).collect()
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[1.0, 3.0, 10.0]), Some(3.0));
        assert_eq!(median(&[1.0, 3.0]), Some(2.0));
        assert_eq!(median(&[7.5]), Some(7.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn aggregation_uses_primary_rows_only() {
        let t = feature_rows(&[
            ("a1", 1, true, 1.0),
            ("a1", 2, false, 100.0),
            ("a2", 1, true, 3.0),
            ("a3", 1, true, 10.0),
            ("b1", 1, true, 1.0),
            ("b2", 1, true, 3.0),
            ("c1", 1, true, 4.0),
        ]);
        let map = slide_map(&[("a1", "A"), ("a2", "A"), ("a3", "A"), ("b1", "B"), ("b2", "B"), ("c1", "C")]);
        let agg = aggregate_patients(&t, &map).unwrap();
        assert_eq!(agg.ids, vec!["A", "B", "C"]);
        assert_eq!(agg.column(0), vec![Some(3.0), Some(2.0), Some(4.0)]);
        assert_eq!(agg.column(1), vec![None, None, None]);
    }

    #[test]
    fn unmapped_slides_are_listed() {
        let t = feature_rows(&[("a1", 1, true, 1.0), ("z9", 1, true, 2.0), ("z8", 2, false, 2.0)]);
        match aggregate_patients(&t, &slide_map(&[("a1", "A")])) {
            Err(PipelineError::UnmappedSlides(ids)) => assert_eq!(ids, vec!["z8", "z9"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn training_stats_standardize_training_table() {
        let t = table(
            &["x", "y", "c"],
            &[
                ("1", vec![Some(1.0), Some(10.0), Some(0.1)]),
                ("2", vec![Some(2.0), Some(-4.0), Some(0.1)]),
                ("3", vec![Some(7.0), Some(3.5), Some(0.1)]),
                ("4", vec![Some(-3.0), Some(0.25), Some(0.1)]),
            ],
        );
        let (stats, dropped) = StandardizationStats::learn(&t);
        assert_eq!(dropped, vec!["c"]);
        let z = stats.standardize(&t).unwrap();
        assert_eq!(z.columns, vec!["x", "y"]);
        for j in 0..2 {
            let col: Vec<f64> = z.column(j).into_iter().map(Option::unwrap).collect();
            let mean = col.iter().sum::<f64>() / 4.0;
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0).sqrt();
            assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn validation_uses_training_stats() {
        let train = table(&["x"], &[("1", vec![Some(0.0)]), ("2", vec![Some(2.0)])]);
        let valid = table(&["x", "extra"], &[("9", vec![Some(5.0), Some(1.0)]), ("8", vec![None, None])]);
        let (stats, _) = StandardizationStats::learn(&train);
        let z = stats.standardize(&valid).unwrap();
        assert_eq!(z.column(0), vec![Some(4.0), None]);
        let other = table(&["y"], &[("1", vec![Some(1.0)])]);
        assert!(matches!(stats.standardize(&other), Err(PipelineError::ColumnMismatch(_))));
    }

    #[test]
    fn imputation_threshold() {
        let t = table(
            &["full", "some", "most"],
            &[
                ("1", vec![Some(1.0), None, None]),
                ("2", vec![Some(2.0), Some(4.0), None]),
                ("3", vec![Some(3.0), Some(6.0), Some(1.0)]),
                ("4", vec![Some(4.0), Some(8.0), None]),
                ("5", vec![Some(5.0), Some(9.0), None]),
            ],
        );
        let imp = Imputation::learn(&t, 0.2);
        assert_eq!(imp.columns, vec!["full", "some"]);
        assert_eq!(imp.dropped, vec!["most"]);
        let filled = imp.apply(&t).unwrap();
        assert_eq!(filled.values[0], vec![Some(1.0), Some(7.0)]);
    }

    #[test]
    fn feature_csv_round_trip() {
        let mut t = feature_rows(&[("s1", 1, true, 0.1), ("s1", 2, false, 1.0 / 3.0)]);
        t.rows[1].values[5] = Some(-2.5e-17);
        let text = t.to_csv_string();
        assert!(text.starts_with("slide_id,tissue_id,tumor_id,is_primary,aspect_ratio,"));
        let back = FeatureTable::read_from(text.as_bytes(), "mem").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let t = feature_rows(&[("s1", 1, true, 0.1), ("s1", 1, false, 0.2)]);
        let text = t.to_csv_string();
        assert!(matches!(
            FeatureTable::read_from(text.as_bytes(), "mem"),
            Err(PipelineError::DuplicateKey(_))
        ));
    }
}
