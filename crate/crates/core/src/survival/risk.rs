//! Risk-set sums shared by the Cox fit, its residuals and the lasso path.

use super::Ties;

/// Subjects grouped by distinct observation time, latest time first.
#[derive(Debug, Clone)]
pub(crate) struct RiskSets {
    order: Vec<usize>,
    groups: Vec<(usize, usize)>,
}

impl RiskSets {
    pub fn new(times: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[b].total_cmp(&times[a]).then(a.cmp(&b)));
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=order.len() {
            if i == order.len() || times[order[i]] != times[order[start]] {
                groups.push((start, i));
                start = i;
            }
        }
        Self { order, groups }
    }
}

/// Log partial likelihood, score and observed information for the covariates in `cols`.
#[derive(Debug, Clone)]
pub(crate) struct Derivatives {
    pub loglik: f64,
    pub score: Vec<f64>,
    /// Row-major `k x k`.
    pub information: Vec<f64>,
}

fn weights(eta: &[f64]) -> Vec<f64> {
    // the likelihood is unchanged by a common shift of eta
    let top = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    eta.iter().map(|e| (e - top).exp()).collect()
}

fn tie_fraction(ties: Ties, l: usize, d: usize) -> f64 {
    match ties {
        Ties::Efron => l as f64 / d as f64,
        Ties::Breslow => 0.0,
    }
}

pub(crate) fn derivatives(rs: &RiskSets, events: &[bool], eta: &[f64], cols: &[&[f64]], ties: Ties) -> Derivatives {
    let k = cols.len();
    let w = weights(eta);
    let top = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut s0, mut s1, mut s2) = (0.0, vec![0.0; k], vec![0.0; k * k]);
    let (mut d1, mut d2) = (vec![0.0; k], vec![0.0; k * k]);
    let mut out = Derivatives {
        loglik: 0.0,
        score: vec![0.0; k],
        information: vec![0.0; k * k],
    };
    let (mut t1, mut t2) = (vec![0.0; k], vec![0.0; k * k]);

    for &(a, b) in &rs.groups {
        let members = &rs.order[a..b];
        let mut d = 0usize;
        let mut d0 = 0.0;
        d1.iter_mut().for_each(|x| *x = 0.0);
        d2.iter_mut().for_each(|x| *x = 0.0);
        for &i in members {
            let wi = w[i];
            s0 += wi;
            for p in 0..k {
                let xp = cols[p][i];
                s1[p] += wi * xp;
                for q in 0..k {
                    s2[p * k + q] += wi * xp * cols[q][i];
                }
            }
            if events[i] {
                d += 1;
                d0 += wi;
                out.loglik += eta[i];
                for p in 0..k {
                    let xp = cols[p][i];
                    out.score[p] += xp;
                    d1[p] += wi * xp;
                    for q in 0..k {
                        d2[p * k + q] += wi * xp * cols[q][i];
                    }
                }
            }
        }
        for l in 0..d {
            let f = tie_fraction(ties, l, d);
            let r0 = s0 - f * d0;
            out.loglik -= r0.ln() + top;
            for p in 0..k {
                t1[p] = (s1[p] - f * d1[p]) / r0;
            }
            for p in 0..k {
                out.score[p] -= t1[p];
                for q in 0..k {
                    t2[p * k + q] = (s2[p * k + q] - f * d2[p * k + q]) / r0;
                    out.information[p * k + q] += t2[p * k + q] - t1[p] * t1[q];
                }
            }
        }
    }
    out
}

/// Per-subject score residuals; their sum is the score vector.
pub(crate) fn score_residuals(
    rs: &RiskSets,
    events: &[bool],
    eta: &[f64],
    cols: &[&[f64]],
    ties: Ties,
) -> Vec<Vec<f64>> {
    let k = cols.len();
    let n = eta.len();
    let w = weights(eta);

    // per group: sum_l 1/r0 and sum_l xbar/r0 for subjects at risk with full weight,
    // the same sums with the Efron down-weighting for the tied deaths, and mean_l xbar
    struct Terms {
        inv: f64,
        xbar: Vec<f64>,
        inv_dead: f64,
        xbar_dead: Vec<f64>,
        mean_xbar: Vec<f64>,
    }
    let mut terms: Vec<Option<Terms>> = Vec::with_capacity(rs.groups.len());
    let (mut s0, mut s1) = (0.0, vec![0.0; k]);
    for &(a, b) in &rs.groups {
        let members = &rs.order[a..b];
        let (mut d, mut d0, mut d1) = (0usize, 0.0, vec![0.0; k]);
        for &i in members {
            s0 += w[i];
            for p in 0..k {
                s1[p] += w[i] * cols[p][i];
            }
            if events[i] {
                d += 1;
                d0 += w[i];
                for p in 0..k {
                    d1[p] += w[i] * cols[p][i];
                }
            }
        }
        if d == 0 {
            terms.push(None);
            continue;
        }
        let mut t = Terms {
            inv: 0.0,
            xbar: vec![0.0; k],
            inv_dead: 0.0,
            xbar_dead: vec![0.0; k],
            mean_xbar: vec![0.0; k],
        };
        for l in 0..d {
            let f = tie_fraction(ties, l, d);
            let r0 = s0 - f * d0;
            t.inv += 1.0 / r0;
            t.inv_dead += (1.0 - f) / r0;
            for p in 0..k {
                let xb = (s1[p] - f * d1[p]) / r0;
                t.xbar[p] += xb / r0;
                t.xbar_dead[p] += (1.0 - f) * xb / r0;
                t.mean_xbar[p] += xb / d as f64;
            }
        }
        terms.push(Some(t));
    }

    // cumulative sums over event times strictly earlier than each group
    let mut resid = vec![vec![0.0; k]; n];
    let (mut cum_inv, mut cum_xbar) = (0.0, vec![0.0; k]);
    for (g, &(a, b)) in rs.groups.iter().enumerate().rev() {
        let t = terms[g].as_ref();
        for &i in &rs.order[a..b] {
            let (mut inv, mut xbar) = (cum_inv, cum_xbar.clone());
            if let Some(t) = t {
                let (own_inv, own_xbar) = if events[i] {
                    (t.inv_dead, &t.xbar_dead)
                } else {
                    (t.inv, &t.xbar)
                };
                inv += own_inv;
                for p in 0..k {
                    xbar[p] += own_xbar[p];
                }
            }
            for p in 0..k {
                let x = cols[p][i];
                let mut r = -w[i] * (x * inv - xbar[p]);
                if events[i] {
                    r += x - t.map_or(0.0, |t| t.mean_xbar[p]);
                }
                resid[i][p] = r;
            }
        }
        if let Some(t) = t {
            cum_inv += t.inv;
            for p in 0..k {
                cum_xbar[p] += t.xbar[p];
            }
        }
    }
    resid
}
