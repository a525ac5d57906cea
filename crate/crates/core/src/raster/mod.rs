//! Heat-map ingestion and the morphological steps that turn a heat map into
//! tissue regions, tumor regions and tumor holes.

mod heatmap;
mod label;
mod mask;
mod morphology;
mod segment;

pub use heatmap::{CellClass, HeatMap};
pub use label::{label_components, Connectivity, LabeledGrid};
pub use mask::BinaryMask;
pub use morphology::{erode, erosion_depth, fill_holes};
pub use segment::{
    segment_tissues, segment_tissues_with, segment_tumors, segment_tumors_with,
    TumorSegmentation, DEFAULT_MIN_TUMOR_AREA, DEFAULT_TISSUE_FRACTION,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}{}: {message}", .column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },
    #[error("line {line}: ragged row with {found} cells, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
}
