/// Pair counts behind Harrell's C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConcordanceCounts {
    pub concordant: u64,
    pub tied_risk: u64,
    pub comparable: u64,
}

impl ConcordanceCounts {
    /// `(concordant + tied / 2) / comparable`, missing without comparable pairs.
    pub fn c_index(&self) -> Option<f64> {
        (self.comparable > 0).then(|| (2 * self.concordant + self.tied_risk) as f64 / (2 * self.comparable) as f64)
    }
}

struct Fenwick(Vec<u64>);

impl Fenwick {
    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted ranks `< i`.
    fn below(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// A pair is comparable when the shorter time is an event; it is concordant
/// when that subject also has the higher risk score.
pub fn harrell_counts(scores: &[f64], times: &[f64], events: &[bool]) -> ConcordanceCounts {
    let n = scores.len();
    assert!(times.len() == n && events.len() == n, "inputs differ in length");
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rank = |s: f64| sorted.binary_search_by(|x| x.total_cmp(&s)).unwrap();

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| times[b].total_cmp(&times[a]));
    let mut tree = Fenwick(vec![0; sorted.len() + 1]);
    let mut inserted = 0u64;
    let mut out = ConcordanceCounts::default();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && times[idx[j]] == times[idx[i]] {
            j += 1;
        }
        for &a in &idx[i..j] {
            if events[a] {
                let r = rank(scores[a]);
                let below = tree.below(r);
                let tied = tree.below(r + 1) - below;
                out.comparable += inserted;
                out.concordant += below;
                out.tied_risk += tied;
            }
        }
        for &a in &idx[i..j] {
            tree.add(rank(scores[a]));
            inserted += 1;
        }
        i = j;
    }
    out
}

pub fn harrell_c(scores: &[f64], times: &[f64], events: &[bool]) -> Option<f64> {
    harrell_counts(scores, times, events).c_index()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RiskGroup {
    Low,
    High,
}

/// Median split; scores equal to the median go to the low group.
pub fn dichotomize(scores: &[f64]) -> Vec<RiskGroup> {
    if scores.is_empty() {
        return Vec::new();
    }
    let mut s = scores.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    let median = if s.len() % 2 == 1 { s[m] } else { (s[m - 1] + s[m]) / 2.0 };
    scores
        .iter()
        .map(|&x| if x > median { RiskGroup::High } else { RiskGroup::Low })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use RiskGroup::*;

    #[test]
    fn perfect_ordering() {
        let t = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(harrell_c(&[4.0, 3.0, 2.0, 1.0], &t, &[true; 4]), Some(1.0));
        assert_eq!(harrell_c(&[1.0, 2.0, 3.0, 4.0], &t, &[true; 4]), Some(0.0));
        assert_eq!(harrell_c(&[7.0; 4], &t, &[true; 4]), Some(0.5));
    }

    #[test]
    fn censoring_rule() {
        // the censored subject at t = 1 is comparable to nobody
        let c = harrell_counts(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0], &[false, true, true]);
        assert_eq!(c.comparable, 1);
        assert_eq!(c.concordant, 0);
        assert_eq!(harrell_c(&[0.0, 1.0], &[1.0, 2.0], &[false, false]), None);
        // tied times are not comparable
        assert_eq!(harrell_counts(&[0.0, 1.0], &[2.0, 2.0], &[true, true]).comparable, 0);
    }

    #[test]
    fn median_split() {
        assert_eq!(dichotomize(&[1.0, 2.0, 3.0, 4.0]), vec![Low, Low, High, High]);
        assert_eq!(dichotomize(&[1.0, 1.0, 1.0]), vec![Low, Low, Low]);
        assert_eq!(dichotomize(&[5.0, 1.0]), vec![High, Low]);
    }
}
