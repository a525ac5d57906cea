//! Boundary-based representations of a region: the traced polygon chain and
//! everything derived from it (convex hull, minimum-area rectangle, chain and
//! curvature codes, radial lengths).

mod chain;
mod code;
mod hull;
mod radial;
mod rect;
mod trace;

pub use chain::{polygon_centroid, Point, PointF, PolygonChain};
pub use code::{chain_code, curvature_code, ChainCode, CurvatureCode};
pub use hull::{convex_hull, ConvexHullChain};
pub use radial::{radial_signal, radial_signal_with, RadialSignal, DEFAULT_SMOOTHING_FRACTION};
pub use rect::{min_area_rect, BoundingBoxChain};
pub use trace::{trace_boundary, trace_boundary_in};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContourError {
    #[error("region is empty")]
    EmptyRegion,
    #[error("region has {0} 4-connected components, expected one")]
    MultipleComponents(usize),
    #[error("single-cell region has no boundary polygon")]
    SingleCell,
    #[error("grid height {grid_height} cannot hold a region reaching row {needed}")]
    FrameTooSmall { grid_height: usize, needed: usize },
    #[error("boundary trace did not return to its start")]
    TraceDidNotClose,
    #[error("polygon chain is not closed")]
    NotClosed,
    #[error("polygon has zero signed area")]
    DegeneratePolygon,
    #[error("all points are collinear, no convex hull")]
    DegenerateHull,
    #[error("chain points {0} and its successor coincide, edge has no direction")]
    RepeatedPoint(usize),
    #[error("boundary point {0} coincides with the centroid")]
    DegenerateRadial(usize),
}

/// Every representation derived from one region mask.
#[derive(Debug, Clone)]
pub struct Representations {
    pub chain: PolygonChain,
    pub hull: ConvexHullChain,
    pub bounding_box: BoundingBoxChain,
    pub chain_code: ChainCode,
    pub curvature: CurvatureCode,
    pub radial: RadialSignal,
}

impl Representations {
    pub fn from_chain(chain: PolygonChain, smoothing_fraction: f64) -> Result<Self, ContourError> {
        let hull = convex_hull(&chain)?;
        let bounding_box = min_area_rect(&hull)?;
        let chain_code = chain_code(&chain)?;
        let curvature = curvature_code(&chain_code);
        let radial = radial_signal_with(&chain, smoothing_fraction)?;
        Ok(Self {
            chain,
            hull,
            bounding_box,
            chain_code,
            curvature,
            radial,
        })
    }
}
