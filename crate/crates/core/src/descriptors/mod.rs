//! Shape, boundary and topology descriptors of a single tumor region.

mod boundary;
mod features;
mod moments;
mod shape;
mod topology;

pub use boundary::{
    curvature_descriptors, radial_descriptors, radial_descriptors_with, CurvatureDescriptors, RadialDescriptors,
    DEFAULT_ENTROPY_BINS,
};
pub use features::{
    tumor_features, ExtendedFeature, ExtendedFeatures, Feature, FeatureConfig, FeatureVector, TumorFeatures,
};
pub use moments::{boundary_moments, hu_from, hu_moments, region_moments, BoundaryMoments, HuMoments, RegionMoments};
pub use shape::{
    box_descriptors, hull_descriptors, mask_descriptors, polygon_descriptors, BoxDescriptors, HullDescriptors,
    MaskDescriptors, PolygonDescriptors,
};
pub use topology::{topology_descriptors, TopologyDescriptors};

use thiserror::Error;

use crate::contour::ContourError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescriptorError {
    #[error("mask is empty")]
    EmptyMask,
    #[error("moment order {0} is below 2")]
    MomentOrder(usize),
    #[error("signal of length {0} is too short")]
    ShortSignal(usize),
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error("polygon encloses no area")]
    ZeroArea,
    #[error("convex hull encloses no area")]
    DegenerateHull,
    #[error("bounding box has a zero-length side")]
    DegenerateBox,
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error("{feature}: {source}")]
    Feature {
        feature: &'static str,
        #[source]
        source: Box<DescriptorError>,
    },
}

impl DescriptorError {
    pub(crate) fn for_feature(self, feature: Feature) -> Self {
        DescriptorError::Feature {
            feature: feature.name(),
            source: Box::new(self),
        }
    }
}
