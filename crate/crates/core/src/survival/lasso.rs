use super::risk::{derivatives, RiskSets};
use super::{column_stats, SurvivalData, SurvivalError, Ties};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    pub ties: Ties,
    /// Stop once a Newton step moves no coefficient by more than this.
    pub tol: f64,
    /// Cap on coordinate sweeps over the quadratic models at one penalty.
    pub max_sweeps: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self {
            ties: Ties::Efron,
            tol: 1e-7,
            max_sweeps: 10_000,
        }
    }
}

/// Coefficients along a decreasing penalty grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoPath {
    pub names: Vec<String>,
    pub lambdas: Vec<f64>,
    /// `coefficients[k]` is the fit at `lambdas[k]`.
    pub coefficients: Vec<Vec<f64>>,
    pub sweeps: Vec<usize>,
    pub converged: Vec<bool>,
}

impl LassoPath {
    pub fn nonzero(&self, k: usize) -> usize {
        self.coefficients[k].iter().filter(|&&b| b != 0.0).count()
    }
}

/// Smallest penalty at which every coefficient is zero: `max_j |U_j(0)| / n`.
pub fn lambda_max(data: &SurvivalData, ties: Ties) -> f64 {
    let rs = RiskSets::new(&data.times);
    let cols: Vec<&[f64]> = data.columns.iter().map(|c| c.as_slice()).collect();
    let zero = vec![0.0; data.len()];
    let mut top = 0.0f64;
    for col in cols {
        let d = derivatives(&rs, &data.events, &zero, &[col], ties);
        top = top.max(d.score[0].abs());
    }
    top / data.len() as f64
}

/// `count` log-spaced values from `max` down to `min_ratio * max`.
pub fn lambda_grid(max: f64, count: usize, min_ratio: f64) -> Vec<f64> {
    if count == 1 {
        return vec![max];
    }
    let (hi, lo) = (max.ln(), (max * min_ratio).ln());
    (0..count)
        .map(|k| (hi + (lo - hi) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

const STANDARD_TOL: f64 = 1e-6;

/// Penalised fit minimising `-loglik / n + lambda * |beta|_1` at each grid value,
/// warm-started down the grid. Covariates must have mean 0 and SD 1.
pub fn cox_lasso(data: &SurvivalData, lambdas: &[f64], opts: &LassoOptions) -> Result<LassoPath, SurvivalError> {
    for (name, col) in data.names.iter().zip(&data.columns) {
        let (mean, sd) = column_stats(col);
        if mean.abs() > STANDARD_TOL || (sd - 1.0).abs() > STANDARD_TOL {
            return Err(SurvivalError::NotStandardized {
                name: name.clone(),
                mean,
                sd,
            });
        }
    }
    fit_path(data, lambdas, opts)
}

pub(crate) fn fit_path(data: &SurvivalData, lambdas: &[f64], opts: &LassoOptions) -> Result<LassoPath, SurvivalError> {
    if data.n_events() == 0 {
        return Err(SurvivalError::NoEvents);
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) || lambdas.windows(2).any(|w| w[1] > w[0]) {
        return Err(SurvivalError::InvalidOption(
            "penalties must be non-negative and non-increasing".into(),
        ));
    }
    let n = data.len() as f64;
    let p = data.n_covariates();
    let rs = RiskSets::new(&data.times);
    let cols: Vec<&[f64]> = data.columns.iter().map(|c| c.as_slice()).collect();
    let loglik = |eta: &[f64]| derivatives(&rs, &data.events, eta, &[], opts.ties).loglik;
    let l1 = |b: &[f64]| b.iter().map(|x| x.abs()).sum::<f64>();

    let mut beta = vec![0.0; p];
    let mut eta = vec![0.0; data.len()];
    let mut path = LassoPath {
        names: data.names.clone(),
        lambdas: lambdas.to_vec(),
        coefficients: Vec::with_capacity(lambdas.len()),
        sweeps: Vec::with_capacity(lambdas.len()),
        converged: Vec::with_capacity(lambdas.len()),
    };
    for &lambda in lambdas {
        let mut sweeps = 0;
        let mut converged = false;
        for _ in 0..MAX_NEWTON_STEPS {
            // quadratic model of -loglik/n around beta
            let d = derivatives(&rs, &data.events, &eta, &cols, opts.ties);
            let g: Vec<f64> = d.score.iter().map(|u| -u / n).collect();
            let h: Vec<f64> = d.information.iter().map(|v| v / n).collect();

            // lasso on the model by coordinate descent; hz = H (z - beta)
            let mut z = beta.clone();
            let mut hz = vec![0.0; p];
            let mut inner_done = false;
            while sweeps < opts.max_sweeps {
                sweeps += 1;
                let mut max_change = 0.0f64;
                for j in 0..p {
                    let hjj = h[j * p + j];
                    if hjj <= 0.0 {
                        continue;
                    }
                    let grad = g[j] + hz[j];
                    let zj = soft_threshold(hjj * z[j] - grad, lambda) / hjj;
                    let step = zj - z[j];
                    if step != 0.0 {
                        z[j] = zj;
                        for (k, v) in hz.iter_mut().enumerate() {
                            *v += h[k * p + j] * step;
                        }
                        max_change = max_change.max(step.abs());
                    }
                }
                if max_change < INNER_TOL_FACTOR * opts.tol {
                    inner_done = true;
                    break;
                }
            }

            let dir: Vec<f64> = z.iter().zip(&beta).map(|(a, b)| a - b).collect();
            let size = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if size < opts.tol {
                converged = inner_done;
                break;
            }
            // backtracking on the true objective
            let before = -d.loglik / n + lambda * l1(&beta);
            let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() + lambda * (l1(&z) - l1(&beta));
            let mut t = 1.0;
            let mut trial = vec![0.0; p];
            let mut trial_eta = vec![0.0; eta.len()];
            let accepted = loop {
                for (tb, (b, dv)) in trial.iter_mut().zip(beta.iter().zip(&dir)) {
                    *tb = b + t * dv;
                }
                for (i, te) in trial_eta.iter_mut().enumerate() {
                    *te = eta[i] + t * cols.iter().zip(&dir).map(|(c, dv)| c[i] * dv).sum::<f64>();
                }
                let after = -loglik(&trial_eta) / n + lambda * l1(&trial);
                if after <= before + ARMIJO * t * slope.min(0.0) + 1e-15 * before.abs() {
                    break true;
                }
                t /= 2.0;
                if t < 1e-12 {
                    break false;
                }
            };
            if !accepted {
                break;
            }
            beta = trial;
            eta = trial_eta;
            if t * size < opts.tol {
                converged = inner_done;
                break;
            }
        }
        if !converged {
            log::debug!("lasso at lambda {lambda:e} did not converge ({sweeps} sweeps)");
        }
        path.coefficients.push(beta.clone());
        path.sweeps.push(sweeps);
        path.converged.push(converged);
    }
    let stalled = path.converged.iter().filter(|c| !**c).count();
    if stalled > 0 {
        log::warn!("lasso path: {stalled} of {} penalties hit the sweep limit", lambdas.len());
    }
    Ok(path)
}

const MAX_NEWTON_STEPS: usize = 100;
const INNER_TOL_FACTOR: f64 = 0.01;
const ARMIJO: f64 = 1e-4;

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standardized(cols: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        cols.into_iter()
            .map(|c| {
                let (m, s) = column_stats(&c);
                c.iter().map(|x| (x - m) / s).collect()
            })
            .collect()
    }

    fn toy() -> SurvivalData {
        let cols = standardized(vec![
            vec![0.3, -1.0, 2.0, 0.5, -0.2, 1.1, 0.0, -0.7, 0.9, 1.5],
            vec![1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
        ]);
        SurvivalData::new(
            vec![5.0, 3.0, 9.0, 1.0, 7.0, 2.0, 4.0, 6.0, 8.0, 2.5],
            vec![true, true, false, true, true, false, true, true, true, false],
            cols,
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn grid_is_log_spaced_and_decreasing() {
        let g = lambda_grid(2.0, 100, 0.001);
        assert_eq!(g.len(), 100);
        assert!((g[0] - 2.0).abs() < 1e-15 && (g[99] - 0.002).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn lambda_max_zeroes_everything() {
        let d = toy();
        let lmax = lambda_max(&d, Ties::Efron);
        let path = cox_lasso(&d, &[lmax * 1.0001, lmax], &LassoOptions::default()).unwrap();
        assert_eq!(path.nonzero(0), 0);
        assert_eq!(path.nonzero(1), 0);
        let below = cox_lasso(&d, &[lmax * 0.9], &LassoOptions::default()).unwrap();
        assert_eq!(below.nonzero(0), 1);
    }

    #[test]
    fn rejects_raw_covariates() {
        let mut d = toy();
        d.columns[0][0] += 1.0;
        assert!(matches!(
            cox_lasso(&d, &[0.1], &LassoOptions::default()),
            Err(SurvivalError::NotStandardized { .. })
        ));
    }

    #[test]
    fn rejects_increasing_grid() {
        assert!(cox_lasso(&toy(), &[0.1, 0.2], &LassoOptions::default()).is_err());
    }

    #[test]
    fn soft_threshold_shrinks() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }
}
