use super::moments::FLAT_TOLERANCE;
use super::DescriptorError;
use crate::contour::{CurvatureCode, RadialSignal};

/// Histogram resolution for the radial entropy.
pub const DEFAULT_ENTROPY_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureDescriptors {
    pub bending_energy: f64,
    pub total_abs_curvature: f64,
}

pub fn curvature_descriptors(k: &CurvatureCode) -> Result<CurvatureDescriptors, DescriptorError> {
    let v = k.values();
    if v.is_empty() {
        return Err(DescriptorError::ShortSignal(0));
    }
    let n = v.len() as f64;
    Ok(CurvatureDescriptors {
        bending_energy: v.iter().map(|&x| f64::from(x).powi(2)).sum::<f64>() / n,
        total_abs_curvature: v.iter().map(|&x| f64::from(x).abs()).sum::<f64>() / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDescriptors {
    pub radial_mean: f64,
    pub radial_sd: f64,
    /// `mean / sd`, missing for a constant signal.
    pub radial_circularity: Option<f64>,
    pub radial_entropy: f64,
    pub area_ratio: f64,
    pub zero_crossing_count: usize,
    pub avg_roughness_index: f64,
    pub margin_fluctuation: f64,
}

pub fn radial_descriptors(signal: &RadialSignal) -> Result<RadialDescriptors, DescriptorError> {
    radial_descriptors_with(&signal.normalized, &signal.smoothed, DEFAULT_ENTROPY_BINS)
}

/// Statistics of the normalised radial lengths `r` and their smoothed copy `s`.
pub fn radial_descriptors_with(r: &[f64], s: &[f64], bins: usize) -> Result<RadialDescriptors, DescriptorError> {
    let n = r.len();
    if n < 2 || s.len() != n {
        return Err(DescriptorError::ShortSignal(n));
    }
    if bins == 0 {
        return Err(DescriptorError::NoBins);
    }
    let nf = n as f64;
    let (mean, sd) = mean_sd(r.iter().copied());
    let flat = sd <= FLAT_TOLERANCE * mean.abs();

    let mut hist = vec![0usize; bins];
    for &x in r {
        let k = ((x * bins as f64).floor().max(0.0) as usize).min(bins - 1);
        hist[k] += 1;
    }
    let radial_entropy = -hist
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / nf;
            p * p.ln()
        })
        .sum::<f64>();

    let area_ratio = r.iter().filter(|&&x| x > mean).map(|&x| x - mean).sum::<f64>() / (nf * mean);
    let zero_crossing_count = (0..n)
        .filter(|&i| (r[i] - mean) * (r[(i + 1) % n] - mean) < 0.0)
        .count();

    let l = ((0.1 * nf).round() as usize).max(2);
    let segments = n / l;
    let avg_roughness_index = if segments == 0 {
        0.0
    } else {
        let total: f64 = (0..segments * l).map(|k| (r[k] - r[(k + 1) % n]).abs()).sum();
        total / segments as f64
    };

    let (_, margin_fluctuation) = mean_sd(r.iter().zip(s).map(|(a, b)| a - b));

    Ok(RadialDescriptors {
        radial_mean: mean,
        radial_sd: if flat { 0.0 } else { sd },
        radial_circularity: (!flat).then(|| mean / sd),
        radial_entropy,
        area_ratio,
        zero_crossing_count,
        avg_roughness_index,
        margin_fluctuation,
    })
}

/// Population mean and standard deviation.
fn mean_sd(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
