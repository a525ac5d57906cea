use super::SurvivalError;

/// Product-limit survival curve evaluated at every distinct observation time.
#[derive(Debug, Clone, PartialEq)]
pub struct KmCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
    pub censored: Vec<usize>,
}

impl KmCurve {
    /// Right-continuous step function: 1 before the first time.
    pub fn at(&self, t: f64) -> f64 {
        match self.times.partition_point(|&s| s <= t) {
            0 => 1.0,
            k => self.survival[k - 1],
        }
    }

    /// Smallest time with survival at or below one half.
    pub fn median(&self) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.survival)
            .find(|&(_, &s)| s <= 0.5)
            .map(|(&t, _)| t)
    }
}

pub fn km_estimate(times: &[f64], events: &[bool]) -> Result<KmCurve, SurvivalError> {
    if times.is_empty() {
        return Err(SurvivalError::Empty);
    }
    if times.len() != events.len() {
        return Err(SurvivalError::InvalidOption("times and events differ in length".into()));
    }
    let mut idx: Vec<usize> = (0..times.len()).collect();
    idx.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut curve = KmCurve {
        times: Vec::new(),
        survival: Vec::new(),
        at_risk: Vec::new(),
        events: Vec::new(),
        censored: Vec::new(),
    };
    let mut remaining = times.len();
    let mut s = 1.0;
    let mut i = 0;
    while i < idx.len() {
        let t = times[idx[i]];
        let mut j = i;
        let mut d = 0;
        while j < idx.len() && times[idx[j]] == t {
            d += usize::from(events[idx[j]]);
            j += 1;
        }
        if d > 0 {
            s *= (remaining - d) as f64 / remaining as f64;
        }
        curve.times.push(t);
        curve.survival.push(s);
        curve.at_risk.push(remaining);
        curve.events.push(d);
        curve.censored.push(j - i - d);
        remaining -= j - i;
        i = j;
    }
    Ok(curve)
}
