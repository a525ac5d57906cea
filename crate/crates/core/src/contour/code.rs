use std::f64::consts::{FRAC_PI_4, PI};

use super::{ContourError, PolygonChain};

/// Freeman direction of every chain edge, in `0..=7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCode {
    codes: Vec<u8>,
}

impl ChainCode {
    pub fn new(codes: Vec<u8>) -> Self {
        assert!(codes.iter().all(|&c| c < 8), "chain codes live in 0..=7");
        Self { codes }
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Signed turn between consecutive chain codes, in `-4..=3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureCode {
    values: Vec<i8>,
}

impl CurvatureCode {
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Direction code of `p_i - p_{i+1}`: the atan2 angle lifted to `[0, 2pi)` and
/// rounded to the nearest multiple of `pi/4`; a rounded 8 wraps to 0.
pub fn chain_code(chain: &PolygonChain) -> Result<ChainCode, ContourError> {
    let codes = chain
        .points()
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let d = w[0] - w[1];
            if d.x == 0 && d.y == 0 {
                return Err(ContourError::RepeatedPoint(i));
            }
            let theta = (d.y as f64).atan2(d.x as f64);
            let lifted = if theta < 0.0 { theta + 2.0 * PI } else { theta };
            Ok(((lifted / FRAC_PI_4).round() as u8) % 8)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ChainCode { codes })
}

/// `kappa_i = ((c_i - c_{i+1} + 4) mod 8) - 4`, with `c_{n+1} = c_1`.
pub fn curvature_code(code: &ChainCode) -> CurvatureCode {
    let c = code.codes();
    let n = c.len();
    let values = (0..n)
        .map(|i| {
            let diff = c[i] as i8 - c[(i + 1) % n] as i8;
            (diff + 4).rem_euclid(8) - 4
        })
        .collect();
    CurvatureCode { values }
}
