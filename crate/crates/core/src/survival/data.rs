use super::SurvivalError;

/// One subject as read from a table.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalRecord {
    pub subject_id: String,
    pub time: f64,
    pub event: bool,
    pub covariates: Vec<f64>,
    pub cluster_id: String,
}

/// Column-major survival data with integer cluster labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalData {
    pub times: Vec<f64>,
    pub events: Vec<bool>,
    /// `columns[j][i]` is covariate `j` of subject `i`.
    pub columns: Vec<Vec<f64>>,
    pub names: Vec<String>,
    /// Subjects sharing a label are one cluster for robust variances.
    pub clusters: Vec<usize>,
}

impl SurvivalData {
    /// Every subject in its own cluster.
    pub fn new(
        times: Vec<f64>,
        events: Vec<bool>,
        columns: Vec<Vec<f64>>,
        names: Vec<String>,
    ) -> Result<Self, SurvivalError> {
        let n = times.len();
        Self::with_clusters(times, events, columns, names, (0..n).collect())
    }

    pub fn with_clusters(
        times: Vec<f64>,
        events: Vec<bool>,
        columns: Vec<Vec<f64>>,
        names: Vec<String>,
        clusters: Vec<usize>,
    ) -> Result<Self, SurvivalError> {
        let n = times.len();
        if n == 0 {
            return Err(SurvivalError::Empty);
        }
        if events.len() != n || clusters.len() != n {
            return Err(SurvivalError::InvalidOption(format!(
                "{n} times, {} events, {} cluster labels",
                events.len(),
                clusters.len()
            )));
        }
        if names.len() != columns.len() {
            return Err(SurvivalError::InvalidOption(format!(
                "{} names for {} covariates",
                names.len(),
                columns.len()
            )));
        }
        if let Some(i) = times.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(SurvivalError::InvalidRecord {
                index: i,
                message: format!("time {} is not positive", times[i]),
            });
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(SurvivalError::ColumnLength {
                    name: name.clone(),
                    expected: n,
                    found: col.len(),
                });
            }
            if let Some(i) = col.iter().position(|x| !x.is_finite()) {
                return Err(SurvivalError::InvalidRecord {
                    index: i,
                    message: format!("covariate {name} is not finite"),
                });
            }
        }
        Ok(Self {
            times,
            events,
            columns,
            names,
            clusters,
        })
    }

    /// Builds the column-major form; cluster labels are numbered in order of appearance.
    pub fn from_records(names: Vec<String>, records: &[SurvivalRecord]) -> Result<Self, SurvivalError> {
        let mut columns = vec![Vec::with_capacity(records.len()); names.len()];
        let mut ids = std::collections::HashMap::new();
        let mut clusters = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.covariates.len() != names.len() {
                return Err(SurvivalError::InvalidRecord {
                    index: i,
                    message: format!("{} covariates, expected {}", r.covariates.len(), names.len()),
                });
            }
            for (col, &x) in columns.iter_mut().zip(&r.covariates) {
                col.push(x);
            }
            let next = ids.len();
            clusters.push(*ids.entry(r.cluster_id.as_str()).or_insert(next));
        }
        Self::with_clusters(
            records.iter().map(|r| r.time).collect(),
            records.iter().map(|r| r.event).collect(),
            columns,
            names,
            clusters,
        )
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_covariates(&self) -> usize {
        self.columns.len()
    }

    pub fn n_events(&self) -> usize {
        self.events.iter().filter(|&&e| e).count()
    }

    /// The rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> SurvivalData {
        SurvivalData {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            events: idx.iter().map(|&i| self.events[i]).collect(),
            columns: self.columns.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect(),
            names: self.names.clone(),
            clusters: idx.iter().map(|&i| self.clusters[i]).collect(),
        }
    }

    /// Only the covariates at `cols`.
    pub fn select(&self, cols: &[usize]) -> SurvivalData {
        SurvivalData {
            times: self.times.clone(),
            events: self.events.clone(),
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
            names: cols.iter().map(|&j| self.names[j].clone()).collect(),
            clusters: self.clusters.clone(),
        }
    }

    /// Linear predictor `x_i . beta` for every subject.
    pub fn linear_predictor(&self, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![0.0; self.len()];
        for (col, &b) in self.columns.iter().zip(beta) {
            if b != 0.0 {
                for (e, x) in eta.iter_mut().zip(col) {
                    *e += b * x;
                }
            }
        }
        eta
    }
}

/// Population mean and standard deviation of a column.
pub fn column_stats(col: &[f64]) -> (f64, f64) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
