use super::DescriptorError;
use crate::raster::BinaryMask;

/// Ordinary, central and normalised central moments of a region, with
/// `l` the column and `w` the row of each foreground cell in the parent grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMoments {
    max_order: usize,
    ordinary: Vec<f64>,
    central: Vec<f64>,
    /// `(l̄, w̄)`.
    pub centroid: (f64, f64),
}

impl RegionMoments {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn index(&self, p: usize, q: usize) -> usize {
        assert!(p <= self.max_order && q <= self.max_order, "moment order out of range");
        p * (self.max_order + 1) + q
    }

    pub fn m(&self, p: usize, q: usize) -> f64 {
        self.ordinary[self.index(p, q)]
    }

    pub fn mu(&self, p: usize, q: usize) -> f64 {
        self.central[self.index(p, q)]
    }

    /// `eta_pq = mu_pq / mu_00^((p+q+2)/2)`, defined for `p + q >= 2`.
    pub fn eta(&self, p: usize, q: usize) -> Option<f64> {
        if p + q < 2 {
            return None;
        }
        let mu00 = self.mu(0, 0);
        Some(self.mu(p, q) / mu00.powf((p + q + 2) as f64 / 2.0))
    }
}

pub fn region_moments(mask: &BinaryMask, max_order: usize) -> Result<RegionMoments, DescriptorError> {
    if mask.is_empty() {
        return Err(DescriptorError::EmptyMask);
    }
    if max_order < 2 {
        return Err(DescriptorError::MomentOrder(max_order));
    }
    let k = max_order + 1;
    let cells: Vec<(f64, f64)> = mask.cells().map(|(r, c)| (c as f64, r as f64)).collect();

    let accumulate = |shift: (f64, f64)| {
        let mut out = vec![0.0; k * k];
        for &(l, w) in &cells {
            let (dl, dw) = (l - shift.0, w - shift.1);
            let mut lp = 1.0;
            for p in 0..k {
                let mut wq = 1.0;
                for q in 0..k {
                    out[p * k + q] += lp * wq;
                    wq *= dw;
                }
                lp *= dl;
            }
        }
        out
    };

    let ordinary = accumulate((0.0, 0.0));
    let m00 = ordinary[0];
    let centroid = (ordinary[k] / m00, ordinary[1] / m00);
    let central = accumulate(centroid);
    Ok(RegionMoments {
        max_order,
        ordinary,
        central,
        centroid,
    })
}

/// The first three Hu invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuMoments {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

pub fn hu_moments(mask: &BinaryMask) -> Result<HuMoments, DescriptorError> {
    hu_from(&region_moments(mask, 3)?)
}

pub fn hu_from(m: &RegionMoments) -> Result<HuMoments, DescriptorError> {
    if m.max_order() < 3 {
        return Err(DescriptorError::MomentOrder(m.max_order()));
    }
    let eta = |p, q| m.eta(p, q).unwrap();
    let (n20, n02, n11) = (eta(2, 0), eta(0, 2), eta(1, 1));
    let (n30, n03, n21, n12) = (eta(3, 0), eta(0, 3), eta(2, 1), eta(1, 2));
    Ok(HuMoments {
        h1: n20 + n02,
        h2: (n20 - n02).powi(2) + 4.0 * n11 * n11,
        h3: (n30 - 3.0 * n12).powi(2) + (3.0 * n21 - n03).powi(2),
    })
}

/// Moments of the raw radial lengths, orders 0 through 4.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMoments {
    pub m: [f64; 5],
    pub mu: [f64; 5],
    /// `m_p / mu_2^(p/2)`; missing when the signal is constant.
    pub m_norm: Option<[f64; 5]>,
    pub mu_norm: Option<[f64; 5]>,
    pub f1: f64,
    pub f2: Option<f64>,
    pub f3: Option<f64>,
}

/// Relative spread below which a signal counts as constant.
pub(crate) const FLAT_TOLERANCE: f64 = 1e-12;

pub fn boundary_moments(raw: &[f64]) -> Result<BoundaryMoments, DescriptorError> {
    if raw.len() < 2 {
        return Err(DescriptorError::ShortSignal(raw.len()));
    }
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let m: [f64; 5] = std::array::from_fn(|p| raw.iter().map(|r| r.powi(p as i32)).sum::<f64>() / n);
    let mut mu: [f64; 5] = std::array::from_fn(|p| raw.iter().map(|r| (r - mean).powi(p as i32)).sum::<f64>() / n);
    mu[1] = 0.0;

    let flat = mu[2].sqrt() <= FLAT_TOLERANCE * mean.abs();
    if flat {
        return Ok(BoundaryMoments {
            m,
            mu,
            m_norm: None,
            mu_norm: None,
            f1: 0.0,
            f2: None,
            f3: None,
        });
    }
    let scale = |p: usize| mu[2].powf(p as f64 / 2.0);
    Ok(BoundaryMoments {
        m,
        mu,
        m_norm: Some(std::array::from_fn(|p| m[p] / scale(p))),
        mu_norm: Some(std::array::from_fn(|p| mu[p] / scale(p))),
        f1: mu[2].sqrt() / m[1],
        f2: Some(mu[3] / scale(3)),
        f3: Some(mu[4] / (mu[2] * mu[2])),
    })
}
