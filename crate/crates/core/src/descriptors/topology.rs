use crate::raster::{fill_holes, label_components, BinaryMask, Connectivity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopologyDescriptors {
    pub n_holes: usize,
    pub n_components: usize,
    /// Components minus holes.
    pub euler: i64,
}

pub fn topology_descriptors(mask: &BinaryMask) -> TopologyDescriptors {
    let holes = fill_holes(mask).difference(mask);
    let n_holes = label_components(&holes, Connectivity::Four).count() as usize;
    let n_components = label_components(mask, Connectivity::Four).count() as usize;
    TopologyDescriptors {
        n_holes,
        n_components,
        euler: n_components as i64 - n_holes as i64,
    }
}
