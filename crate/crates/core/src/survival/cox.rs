use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use super::risk::{derivatives, score_residuals, Derivatives, RiskSets};
use super::{SurvivalData, SurvivalError};

/// How tied event times share a risk set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ties {
    #[default]
    Efron,
    Breslow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoxOptions {
    pub ties: Ties,
    pub max_iter: usize,
    /// Stop when the log partial likelihood changes by less than this.
    pub tol: f64,
    /// Group score residuals by `SurvivalData::clusters` for the robust variance.
    pub cluster: bool,
}

impl Default for CoxOptions {
    fn default() -> Self {
        Self {
            ties: Ties::Efron,
            max_iter: 25,
            tol: 1e-9,
            cluster: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoxFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub se: Vec<f64>,
    /// Sandwich standard errors, grouped by cluster when requested.
    pub robust_se: Vec<f64>,
    /// Inverse information, row-major.
    pub covariance: Vec<f64>,
    pub robust_covariance: Vec<f64>,
    pub loglik: f64,
    pub loglik_null: f64,
    /// `U(0)' I(0)^-1 U(0)`.
    pub score_test: f64,
    pub iterations: usize,
    /// False when the iteration limit was hit or the likelihood is still
    /// rising along some coefficient (monotone likelihood).
    pub converged: bool,
    pub diagnostics: Vec<String>,
}

impl CoxFit {
    pub fn hazard_ratios(&self) -> Vec<f64> {
        self.coefficients.iter().map(|b| b.exp()).collect()
    }

    fn ses(&self, robust: bool) -> &[f64] {
        if robust {
            &self.robust_se
        } else {
            &self.se
        }
    }

    /// Two-sided Wald p-values.
    pub fn p_values(&self, robust: bool) -> Vec<f64> {
        let norm = Normal::standard();
        self.coefficients
            .iter()
            .zip(self.ses(robust))
            .map(|(b, se)| 2.0 * norm.sf((b / se).abs()))
            .collect()
    }

    /// Wald confidence intervals for the hazard ratios.
    pub fn hazard_ratio_intervals(&self, level: f64, robust: bool) -> Vec<(f64, f64)> {
        let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
        self.coefficients
            .iter()
            .zip(self.ses(robust))
            .map(|(b, se)| ((b - z * se).exp(), (b + z * se).exp()))
            .collect()
    }
}

/// Log partial likelihood at `beta`.
pub fn partial_loglik(data: &SurvivalData, beta: &[f64], ties: Ties) -> f64 {
    let rs = RiskSets::new(&data.times);
    derivatives(&rs, &data.events, &data.linear_predictor(beta), &[], ties).loglik
}

fn cholesky(info: &[f64], k: usize) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>, SurvivalError> {
    DMatrix::from_row_slice(k, k, info)
        .cholesky()
        .ok_or(SurvivalError::Singular)
}

/// Newton-Raphson fit of the Cox model with step-halving.
pub fn cox_fit(data: &SurvivalData, opts: &CoxOptions) -> Result<CoxFit, SurvivalError> {
    let k = data.n_covariates();
    if k == 0 {
        return Err(SurvivalError::InvalidOption("no covariates".into()));
    }
    if data.n_events() == 0 {
        return Err(SurvivalError::NoEvents);
    }
    for (name, col) in data.names.iter().zip(&data.columns) {
        if col.iter().all(|&x| x == col[0]) {
            return Err(SurvivalError::ConstantCovariate(name.clone()));
        }
    }
    let rs = RiskSets::new(&data.times);
    let cols: Vec<&[f64]> = data.columns.iter().map(|c| c.as_slice()).collect();
    let eval = |beta: &[f64]| derivatives(&rs, &data.events, &data.linear_predictor(beta), &cols, opts.ties);

    let mut beta = vec![0.0; k];
    let mut cur: Derivatives = eval(&beta);
    let loglik_null = cur.loglik;
    let u0 = DVector::from_column_slice(&cur.score);
    let score_test = u0.dot(&cholesky(&cur.information, k)?.solve(&u0));

    let mut iterations = 0;
    let mut converged = false;
    let mut last_step = vec![f64::INFINITY; k];
    while iterations < opts.max_iter {
        iterations += 1;
        let step = cholesky(&cur.information, k)?.solve(&DVector::from_column_slice(&cur.score));
        let mut scale = 1.0;
        let (next_beta, next) = loop {
            let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + scale * s).collect();
            let d = eval(&trial);
            if d.loglik.is_finite() && d.loglik >= cur.loglik || scale < 1e-10 {
                break (trial, d);
            }
            scale /= 2.0;
        };
        let change = (next.loglik - cur.loglik).abs();
        last_step = next_beta.iter().zip(&beta).map(|(a, b)| a - b).collect();
        beta = next_beta;
        cur = next;
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    let mut diagnostics = Vec::new();
    if !converged {
        diagnostics.push(format!(
            "stopped after {iterations} iterations, log-likelihood {}",
            cur.loglik
        ));
    }
    // a converged fit ends with a tiny step; an unbounded coefficient keeps moving
    for (j, s) in last_step.iter().enumerate() {
        if converged && s.abs() > 1e-3 * beta[j].abs().max(1.0) {
            converged = false;
            diagnostics.push(format!(
                "coefficient {:?} may be infinite (monotone likelihood)",
                data.names[j]
            ));
        }
    }
    for d in &diagnostics {
        log::debug!("Cox fit: {d}");
    }

    let chol = cholesky(&cur.information, k)?;
    let inv = chol.inverse();
    let se = (0..k).map(|j| inv[(j, j)].sqrt()).collect();

    let resid = score_residuals(&rs, &data.events, &data.linear_predictor(&beta), &cols, opts.ties);
    let mut grouped: std::collections::BTreeMap<usize, Vec<f64>> = std::collections::BTreeMap::new();
    for (i, r) in resid.iter().enumerate() {
        let key = if opts.cluster { data.clusters[i] } else { i };
        let acc = grouped.entry(key).or_insert_with(|| vec![0.0; k]);
        for p in 0..k {
            acc[p] += r[p];
        }
    }
    let mut meat = DMatrix::<f64>::zeros(k, k);
    for s in grouped.values() {
        let v = DVector::from_column_slice(s);
        meat += &v * v.transpose();
    }
    let robust = &inv * meat * &inv;
    let robust_se = (0..k).map(|j| robust[(j, j)].sqrt()).collect();

    Ok(CoxFit {
        names: data.names.clone(),
        coefficients: beta,
        se,
        robust_se,
        covariance: inv.transpose().as_slice().to_vec(),
        robust_covariance: robust.transpose().as_slice().to_vec(),
        loglik: cur.loglik,
        loglik_null,
        score_test,
        iterations,
        converged,
        diagnostics,
    })
}
