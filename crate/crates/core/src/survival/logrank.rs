use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::SurvivalError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRank {
    pub chi_square: f64,
    pub p_value: f64,
    /// Observed and expected events in the `true` group.
    pub observed: f64,
    pub expected: f64,
    pub variance: f64,
}

/// Two-sample log-rank test; `group[i]` splits the subjects in two.
pub fn logrank_test(times: &[f64], events: &[bool], group: &[bool]) -> Result<LogRank, SurvivalError> {
    if times.len() != events.len() || times.len() != group.len() {
        return Err(SurvivalError::InvalidOption("inputs differ in length".into()));
    }
    if !group.iter().any(|&g| g) {
        return Err(SurvivalError::EmptyGroup("first"));
    }
    if group.iter().all(|&g| g) {
        return Err(SurvivalError::EmptyGroup("second"));
    }
    let mut idx: Vec<usize> = (0..times.len()).collect();
    idx.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let (mut n, mut n1) = (times.len() as f64, group.iter().filter(|&&g| g).count() as f64);
    let (mut observed, mut expected, mut variance) = (0.0, 0.0, 0.0);
    // O - E written as (d1 n2 - d2 n1) / n so that swapping the labels flips its sign exactly
    let mut o_minus_e = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let t = times[idx[i]];
        let (mut d, mut d1, mut m, mut m1) = (0.0, 0.0, 0.0, 0.0);
        while i < idx.len() && times[idx[i]] == t {
            let k = idx[i];
            m += 1.0;
            if group[k] {
                m1 += 1.0;
            }
            if events[k] {
                d += 1.0;
                if group[k] {
                    d1 += 1.0;
                }
            }
            i += 1;
        }
        if d > 0.0 {
            let n2 = n - n1;
            observed += d1;
            expected += d * n1 / n;
            o_minus_e += (d1 * n2 - (d - d1) * n1) / n;
            if n > 1.0 {
                variance += d * (n1 * n2) * (n - d) / (n * n * (n - 1.0));
            }
        }
        n -= m;
        n1 -= m1;
    }
    let chi_square = if variance > 0.0 {
        o_minus_e * o_minus_e / variance
    } else {
        0.0
    };
    let p_value = ChiSquared::new(1.0).expect("one degree of freedom").sf(chi_square);
    Ok(LogRank {
        chi_square,
        p_value,
        observed,
        expected,
        variance,
    })
}
