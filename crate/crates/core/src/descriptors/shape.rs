use std::f64::consts::PI;

use super::DescriptorError;
use crate::contour::{BoundingBoxChain, ConvexHullChain, PolygonChain};
use crate::raster::{erosion_depth, BinaryMask};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskDescriptors {
    /// Height over width of the tight bounding box.
    pub aspect_ratio: f64,
    pub net_area: usize,
    /// Erosions until the region vanishes.
    pub thickness: usize,
    /// `net_area / (2 * thickness^2)`.
    pub elongation: f64,
}

pub fn mask_descriptors(mask: &BinaryMask) -> Result<MaskDescriptors, DescriptorError> {
    if mask.is_empty() {
        return Err(DescriptorError::EmptyMask);
    }
    let net_area = mask.count();
    let thickness = erosion_depth(mask);
    Ok(MaskDescriptors {
        aspect_ratio: mask.height() as f64 / mask.width() as f64,
        net_area,
        thickness,
        elongation: net_area as f64 / (2.0 * (thickness * thickness) as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonDescriptors {
    pub perimeter: f64,
    pub filled_area: f64,
    pub compactness: f64,
    pub roundness: f64,
    /// Missing when `P^2 < 16 A`: no rectangle has this perimeter and area.
    pub fibre_length: Option<f64>,
    pub fibre_width: Option<f64>,
}

pub fn polygon_descriptors(chain: &PolygonChain) -> Result<PolygonDescriptors, DescriptorError> {
    let p = chain.perimeter();
    let a = chain.area();
    if a <= 0.0 {
        return Err(DescriptorError::ZeroArea);
    }
    let mut disc = p * p - 16.0 * a;
    if disc < 0.0 && disc > -1e-12 * p * p {
        disc = 0.0;
    }
    let fibre_length = (disc >= 0.0).then(|| (p - disc.sqrt()) / 4.0);
    Ok(PolygonDescriptors {
        perimeter: p,
        filled_area: a,
        compactness: p * p / a,
        roundness: 4.0 * PI * a / (p * p),
        fibre_length,
        fibre_width: fibre_length.map(|l| a / l),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullDescriptors {
    pub circularity: f64,
    pub convexity: f64,
    pub density: f64,
}

pub fn hull_descriptors(chain: &PolygonChain, hull: &ConvexHullChain) -> Result<HullDescriptors, DescriptorError> {
    let (hp, ha) = (hull.perimeter(), hull.area());
    if ha <= 0.0 {
        return Err(DescriptorError::DegenerateHull);
    }
    let a = chain.area();
    Ok(HullDescriptors {
        circularity: 4.0 * PI * a / (hp * hp),
        convexity: hp / chain.perimeter(),
        density: a / ha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDescriptors {
    pub major_axis_length: f64,
    /// Direction of the longest side in `[0, pi)`.
    pub major_axis_angle: f64,
    pub minor_axis_length: f64,
    pub eccentricity: f64,
    pub rectangularity: f64,
    /// `major / fibre_length`, missing with the fibre length.
    pub curl: Option<f64>,
}

const SIDE_TIE: f64 = 1e-9;

pub fn box_descriptors(
    chain: &PolygonChain,
    bbox: &BoundingBoxChain,
    fibre_length: Option<f64>,
) -> Result<BoxDescriptors, DescriptorError> {
    let sides = bbox.sides();
    let lengths = sides.map(|s| s.x.hypot(s.y));
    let major = lengths.iter().copied().fold(0.0, f64::max);
    let minor = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    if minor <= SIDE_TIE * major {
        return Err(DescriptorError::DegenerateBox);
    }
    let angle = sides
        .iter()
        .zip(lengths)
        .filter(|&(_, len)| len >= major * (1.0 - SIDE_TIE))
        .map(|(s, _)| {
            let a = s.y.atan2(s.x).rem_euclid(PI);
            if PI - a < SIDE_TIE {
                0.0
            } else {
                a
            }
        })
        .fold(f64::INFINITY, f64::min);
    Ok(BoxDescriptors {
        major_axis_length: major,
        major_axis_angle: angle,
        minor_axis_length: minor,
        eccentricity: major / minor,
        rectangularity: chain.area() / bbox.area(),
        curl: fibre_length.map(|l| major / l),
    })
}
