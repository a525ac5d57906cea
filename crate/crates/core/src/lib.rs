pub mod contour;
pub mod descriptors;
pub mod raster;
pub mod pipeline;
pub mod survival;
