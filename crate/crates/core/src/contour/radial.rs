use super::{polygon_centroid, ContourError, PointF, PolygonChain};

/// Default smoothing window as a fraction of the boundary point count.
pub const DEFAULT_SMOOTHING_FRACTION: f64 = 0.10;

/// Distances from each boundary point to the polygon centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSignal {
    pub raw: Vec<f64>,
    /// `raw / max(raw)`.
    pub normalized: Vec<f64>,
    /// Forward mean filter of `normalized`, truncated at the end of the chain.
    pub smoothed: Vec<f64>,
    pub centroid: PointF,
    pub window: usize,
}

impl RadialSignal {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

pub fn radial_signal(chain: &PolygonChain) -> Result<RadialSignal, ContourError> {
    radial_signal_with(chain, DEFAULT_SMOOTHING_FRACTION)
}

/// Radial lengths with a smoothing window of `max(1, round(fraction * n))` points.
///
/// `smoothed_i = (1/w) * sum_{j=i}^{i+w-1} [j <= n] * normalized_j`; the divisor
/// stays `w` even where the window runs past the last point.
pub fn radial_signal_with(chain: &PolygonChain, fraction: f64) -> Result<RadialSignal, ContourError> {
    let centroid = polygon_centroid(chain)?;
    let raw: Vec<f64> = chain
        .vertices()
        .iter()
        .map(|p| p.to_f64().dist(centroid))
        .collect();
    if let Some(i) = raw.iter().position(|&r| r == 0.0) {
        return Err(ContourError::DegenerateRadial(i));
    }
    let max = raw.iter().copied().fold(0.0, f64::max);
    let normalized: Vec<f64> = raw.iter().map(|r| r / max).collect();

    let n = normalized.len();
    let window = ((fraction * n as f64).round() as usize).max(1);
    let smoothed = (0..n)
        .map(|i| normalized[i..(i + window).min(n)].iter().sum::<f64>() / window as f64)
        .collect();

    Ok(RadialSignal {
        raw,
        normalized,
        smoothed,
        centroid,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::Point;

    fn chain(pts: &[(i64, i64)]) -> PolygonChain {
        PolygonChain::from_vertices(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    /// The twelve lattice points on the circle of radius 5, clockwise.
    pub(crate) fn lattice_circle() -> PolygonChain {
        chain(&[
            (0, -5),
            (-3, -4),
            (-4, -3),
            (-5, 0),
            (-4, 3),
            (-3, 4),
            (0, 5),
            (3, 4),
            (4, 3),
            (5, 0),
            (4, -3),
            (3, -4),
        ])
    }

    #[test]
    fn circle_is_flat() {
        let s = radial_signal(&lattice_circle()).unwrap();
        assert_eq!(s.window, 1);
        for (&a, &b) in s.normalized.iter().zip(&s.smoothed) {
            assert!((a - 1.0).abs() < 1e-12);
            assert!((b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn square_ring_of_eight() {
        let c = chain(&[(1, 1), (1, 2), (1, 3), (2, 3), (3, 3), (3, 2), (3, 1), (2, 1)]);
        let s = radial_signal(&c).unwrap();
        assert_eq!(s.centroid, PointF::new(2.0, 2.0));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (i, &v) in s.normalized.iter().enumerate() {
            let expected = if i % 2 == 0 { 1.0 } else { r };
            assert!((v - expected).abs() < 1e-12, "{i}: {v}");
        }
    }

    #[test]
    fn unit_window_is_identity() {
        let c = chain(&[(0, 0), (0, 3), (2, 5), (6, 4), (5, 0)]);
        let s = radial_signal_with(&c, 0.0).unwrap();
        assert_eq!(s.window, 1);
        assert_eq!(s.smoothed, s.normalized);
    }

    #[test]
    fn truncated_window_damps_the_tail() {
        let c = chain(&[(0, 0), (0, 3), (2, 5), (6, 4), (5, 0)]);
        let s = radial_signal_with(&c, 0.4).unwrap();
        assert_eq!(s.window, 2);
        assert!((s.smoothed[4] - s.normalized[4] / 2.0).abs() < 1e-15);
    }
}
