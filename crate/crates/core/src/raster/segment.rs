use super::{
    fill_holes, label_components, BinaryMask, CellClass, Connectivity, HeatMap, LabeledGrid,
};

/// Smallest tumor kept by default, in heat-map cells.
pub const DEFAULT_MIN_TUMOR_AREA: usize = 150;

/// Tissue regions smaller than this fraction of the largest one are dropped.
pub const DEFAULT_TISSUE_FRACTION: f64 = 0.25;

/// Tumors of one tissue region and the holes each of them encloses.
///
/// Both grids share the tissue mask's frame. Tumor codes are `1..=k` in
/// decreasing area; a hole cell carries the code of the tumor enclosing it
/// (the innermost one when tumors are nested).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TumorSegmentation {
    pub tumors: LabeledGrid,
    pub holes: LabeledGrid,
    /// Tumor areas; index `k` is tumor `k + 1`.
    pub areas: Vec<usize>,
}

impl TumorSegmentation {
    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn tumor(&self, id: u32) -> BinaryMask {
        self.tumors.component(id)
    }

    /// Hole cells assigned to tumor `id`.
    pub fn holes_of(&self, id: u32) -> BinaryMask {
        self.holes.component(id)
    }
}

/// Components of `mask` sorted by decreasing area, ties kept in raster order.
fn components_by_area(mask: &BinaryMask) -> Vec<BinaryMask> {
    let grid = label_components(mask, Connectivity::Four);
    let mut comps: Vec<BinaryMask> = grid.components();
    // stable sort keeps the raster order of first cells for equal areas
    comps.sort_by_key(|m| std::cmp::Reverse(m.count()));
    comps
}

/// Tissue regions (non-empty cells, 4-connected) passing the fraction-of-largest rule.
pub fn segment_tissues(hm: &HeatMap) -> Vec<BinaryMask> {
    segment_tissues_with(hm, DEFAULT_TISSUE_FRACTION)
}

pub fn segment_tissues_with(hm: &HeatMap, fraction: f64) -> Vec<BinaryMask> {
    let tissue = hm.mask_where(|c| c != CellClass::Empty);
    let comps = components_by_area(&tissue);
    let Some(largest) = comps.first().map(|m| m.count()) else {
        return Vec::new();
    };
    let cutoff = largest as f64 * fraction;
    comps
        .into_iter()
        .filter(|m| m.count() as f64 >= cutoff)
        .collect()
}

pub fn segment_tumors(tissue: &BinaryMask, hm: &HeatMap) -> TumorSegmentation {
    segment_tumors_with(tissue, hm, DEFAULT_MIN_TUMOR_AREA)
}

/// Tumor cells inside `tissue`, grouped 4-connected, small ones discarded.
pub fn segment_tumors_with(tissue: &BinaryMask, hm: &HeatMap, min_area: usize) -> TumorSegmentation {
    let (r0, c0) = tissue.origin();
    let (w, h) = (tissue.width(), tissue.height());
    let tumor_cells = BinaryMask::from_fn(tissue.origin(), w, h, |r, c| {
        tissue.get(r as isize, c as isize) && hm.get(r0 + r, c0 + c) == CellClass::Tumor
    });

    let kept: Vec<BinaryMask> = components_by_area(&tumor_cells)
        .into_iter()
        .filter(|m| m.count() >= min_area)
        .collect();

    let mut tumor_labels = vec![0u32; w * h];
    let mut hole_labels = vec![0u32; w * h];
    let mut areas = Vec::with_capacity(kept.len());
    for (k, tumor) in kept.iter().enumerate() {
        let id = k as u32 + 1;
        areas.push(tumor.count());
        for (r, c) in tumor.cells() {
            tumor_labels[(r - r0) * w + (c - c0)] = id;
        }
        // later (smaller) tumors overwrite, so nested holes go to the innermost tumor
        let holes = fill_holes(tumor).difference(tumor);
        for (r, c) in holes.cells() {
            hole_labels[(r - r0) * w + (c - c0)] = id;
        }
    }

    TumorSegmentation {
        tumors: LabeledGrid::from_parts(tissue.origin(), w, h, tumor_labels),
        holes: LabeledGrid::from_parts(tissue.origin(), w, h, hole_labels),
        areas,
    }
}
