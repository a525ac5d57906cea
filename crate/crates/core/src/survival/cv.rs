use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::lasso::fit_path;
use super::{column_stats, harrell_c, lambda_grid, lambda_max, LassoOptions, LassoPath, SurvivalData, SurvivalError, Ties};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub n_lambda: usize,
    pub min_ratio: f64,
    pub ties: Ties,
    pub max_attempts: usize,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 1,
            n_lambda: 100,
            min_ratio: 0.001,
            ties: Ties::Efron,
            max_attempts: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub lambdas: Vec<f64>,
    /// Mean over folds of `1 - C` on the held-out subjects.
    pub mean_error: Vec<f64>,
    pub se_error: Vec<f64>,
    pub index_min: usize,
    pub index_1se: usize,
    pub lambda_min: f64,
    pub lambda_1se: f64,
    /// Fold of every subject.
    pub fold_of: Vec<usize>,
    /// Path fitted on all subjects.
    pub path: LassoPath,
}

impl CvResult {
    pub fn coefficients_1se(&self) -> &[f64] {
        &self.path.coefficients[self.index_1se]
    }

    pub fn coefficients_min(&self) -> &[f64] {
        &self.path.coefficients[self.index_min]
    }
}

/// Fold labels stratified on the event indicator: events and censored
/// subjects are shuffled separately and dealt round-robin.
pub fn stratified_folds(events: &[bool], folds: usize, seed: u64, max_attempts: usize) -> Result<Vec<usize>, SurvivalError> {
    for attempt in 0..max_attempts as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut dead: Vec<usize> = (0..events.len()).filter(|&i| events[i]).collect();
        let mut alive: Vec<usize> = (0..events.len()).filter(|&i| !events[i]).collect();
        dead.shuffle(&mut rng);
        alive.shuffle(&mut rng);
        let offset = (rng.next_u64_mod(folds as u64)) as usize;
        let mut fold_of = vec![0; events.len()];
        for (pos, &i) in dead.iter().chain(&alive).enumerate() {
            fold_of[i] = (pos + offset) % folds;
        }
        let mut has_event = vec![false; folds];
        for &i in &dead {
            has_event[fold_of[i]] = true;
        }
        if has_event.iter().all(|&h| h) {
            return Ok(fold_of);
        }
    }
    Err(SurvivalError::FoldsWithoutEvents {
        folds,
        attempts: max_attempts,
    })
}

trait NextMod {
    fn next_u64_mod(&mut self, m: u64) -> u64;
}

impl NextMod for ChaCha8Rng {
    fn next_u64_mod(&mut self, m: u64) -> u64 {
        rand::Rng::random_range(self, 0..m)
    }
}

/// Standardises `train` by its own statistics and applies them to `test`.
fn restandardize(train: &mut SurvivalData, test: &mut SurvivalData) {
    for (tr, te) in train.columns.iter_mut().zip(test.columns.iter_mut()) {
        let (mean, sd) = column_stats(tr);
        let scale = if sd > 0.0 { 1.0 / sd } else { 0.0 };
        for x in tr.iter_mut().chain(te.iter_mut()) {
            *x = (*x - mean) * scale;
        }
    }
}

/// K-fold cross-validation of the lasso path, scored by `1 - C` on held-out folds.
pub fn cv_select_lambda(data: &SurvivalData, opts: &CvOptions) -> Result<CvResult, SurvivalError> {
    let k = opts.folds;
    if k < 2 {
        return Err(SurvivalError::InvalidOption(format!("{k} folds")));
    }
    if data.len() < 2 * k {
        return Err(SurvivalError::TooFewSubjects {
            needed: 2 * k,
            folds: k,
            found: data.len(),
        });
    }
    let lasso = LassoOptions {
        ties: opts.ties,
        ..LassoOptions::default()
    };
    let lmax = lambda_max(data, opts.ties);
    if lmax <= 0.0 {
        return Err(SurvivalError::InvalidOption("score at zero vanishes, no penalty grid".into()));
    }
    let lambdas = lambda_grid(lmax, opts.n_lambda, opts.min_ratio);
    let path = super::cox_lasso(data, &lambdas, &lasso)?;
    let fold_of = stratified_folds(&data.events, k, opts.seed, opts.max_attempts)?;

    let per_fold: Vec<Option<Vec<f64>>> = (0..k)
        .into_par_iter()
        .map(|f| {
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] != f).collect();
            let test_idx: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] == f).collect();
            let (mut train, mut test) = (data.subset(&train_idx), data.subset(&test_idx));
            restandardize(&mut train, &mut test);
            let fold_path = fit_path(&train, &lambdas, &lasso)?;
            Ok(fold_path
                .coefficients
                .iter()
                .map(|beta| {
                    let scores = test.linear_predictor(beta);
                    harrell_c(&scores, &test.times, &test.events).map(|c| 1.0 - c)
                })
                .collect::<Option<Vec<f64>>>())
        })
        .collect::<Result<_, SurvivalError>>()?;

    let scored: Vec<&Vec<f64>> = per_fold.iter().flatten().collect();
    if scored.len() < 2 {
        return Err(SurvivalError::InvalidOption("fewer than two folds have comparable pairs".into()));
    }
    let m = scored.len() as f64;
    let (mut mean_error, mut se_error) = (Vec::new(), Vec::new());
    for l in 0..lambdas.len() {
        let mean = scored.iter().map(|e| e[l]).sum::<f64>() / m;
        let var = scored.iter().map(|e| (e[l] - mean).powi(2)).sum::<f64>() / (m - 1.0);
        mean_error.push(mean);
        se_error.push((var / m).sqrt());
    }
    // first (largest) lambda wins ties
    let index_min = (0..lambdas.len()).fold(0, |best, l| if mean_error[l] < mean_error[best] { l } else { best });
    let bound = mean_error[index_min] + se_error[index_min];
    let index_1se = (0..lambdas.len()).find(|&l| mean_error[l] <= bound).unwrap_or(index_min);

    Ok(CvResult {
        lambda_min: lambdas[index_min],
        lambda_1se: lambdas[index_1se],
        lambdas,
        mean_error,
        se_error,
        index_min,
        index_1se,
        fold_of,
        path,
    })
}
