use super::BinaryMask;

/// Pixel adjacency used when grouping cells into components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// Edge neighbours only.
    #[default]
    Four,
    /// Edge and corner neighbours.
    Eight,
}

/// Integer labelling of a mask's frame: 0 is background, `1..=count` are components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGrid {
    origin: (usize, usize),
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: u32,
}

impl LabeledGrid {
    pub fn from_parts(
        origin: (usize, usize),
        width: usize,
        height: usize,
        labels: Vec<u32>,
    ) -> Self {
        assert_eq!(labels.len(), width * height);
        let count = labels.iter().copied().max().unwrap_or(0);
        Self {
            origin,
            width,
            height,
            labels,
            count,
        }
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Label at a local `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    /// Label at an absolute parent-grid position, 0 outside the frame.
    pub fn at(&self, row: usize, col: usize) -> u32 {
        if row < self.origin.0 || col < self.origin.1 {
            return 0;
        }
        let (r, c) = (row - self.origin.0, col - self.origin.1);
        if r < self.height && c < self.width {
            self.labels[r * self.width + c]
        } else {
            0
        }
    }

    /// Cell counts; index `k` holds the area of label `k + 1`.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0; self.count as usize];
        for &l in &self.labels {
            if l > 0 {
                areas[l as usize - 1] += 1;
            }
        }
        areas
    }

    pub fn component(&self, label: u32) -> BinaryMask {
        BinaryMask::from_fn(self.origin, self.width, self.height, |r, c| {
            label != 0 && self.labels[r * self.width + c] == label
        })
    }

    pub fn components(&self) -> Vec<BinaryMask> {
        (1..=self.count).map(|l| self.component(l)).collect()
    }
}

struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new() -> Self {
        // slot 0 is unused so provisional labels start at 1
        Self {
            parent: vec![0],
            rank: vec![0],
        }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.rank.push(0);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
    }
}

/// Two-pass union-find labelling over the mask's tight frame.
///
/// Final labels follow the raster order of each component's first cell.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> LabeledGrid {
    let (w, h) = (mask.width(), mask.height());
    let bits = mask.bits();
    let mut provisional = vec![0u32; w * h];
    let mut sets = DisjointSet::new();

    for r in 0..h {
        for c in 0..w {
            if !bits[r * w + c] {
                continue;
            }
            let mut neighbours = [0u32; 4];
            let mut k = 0;
            if c > 0 {
                neighbours[k] = provisional[r * w + c - 1];
                k += 1;
            }
            if r > 0 {
                neighbours[k] = provisional[(r - 1) * w + c];
                k += 1;
                if connectivity == Connectivity::Eight {
                    if c > 0 {
                        neighbours[k] = provisional[(r - 1) * w + c - 1];
                        k += 1;
                    }
                    if c + 1 < w {
                        neighbours[k] = provisional[(r - 1) * w + c + 1];
                        k += 1;
                    }
                }
            }
            let mut label = 0;
            for &n in neighbours[..k].iter().filter(|&&n| n != 0) {
                if label == 0 {
                    label = n;
                } else {
                    sets.union(label, n);
                }
            }
            if label == 0 {
                label = sets.make();
            }
            provisional[r * w + c] = label;
        }
    }

    let mut final_of_root = vec![0u32; sets.parent.len()];
    let mut next = 0u32;
    let labels = provisional
        .iter()
        .map(|&p| {
            if p == 0 {
                return 0;
            }
            let root = sets.find(p) as usize;
            if final_of_root[root] == 0 {
                next += 1;
                final_of_root[root] = next;
            }
            final_of_root[root]
        })
        .collect();

    LabeledGrid {
        origin: mask.origin(),
        width: w,
        height: h,
        labels,
        count: next,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_one_component() {
        let m = BinaryMask::from_cells([(4, 7)]);
        let g = label_components(&m, Connectivity::Four);
        assert_eq!(g.count(), 1);
        assert_eq!(g.at(4, 7), 1);
        assert_eq!(g.areas(), vec![1]);
    }

    #[test]
    fn diagonal_contact_depends_on_connectivity() {
        let m = BinaryMask::from_rows((0, 0), &["#.", ".#"]);
        assert_eq!(label_components(&m, Connectivity::Four).count(), 2);
        assert_eq!(label_components(&m, Connectivity::Eight).count(), 1);
    }

    #[test]
    fn empty_mask_has_no_labels() {
        let g = label_components(&BinaryMask::empty(), Connectivity::Four);
        assert_eq!(g.count(), 0);
        assert!(g.areas().is_empty());
    }

    #[test]
    fn labels_follow_first_cell_raster_order() {
        // U shape: both arms start on row 0, merge on row 2
        let m = BinaryMask::from_rows((0, 0), &["#.#.#", "#.#..", "###.#"]);
        let g = label_components(&m, Connectivity::Four);
        assert_eq!(g.count(), 3);
        assert_eq!(g.get(0, 0), 1);
        assert_eq!(g.get(0, 2), 1);
        assert_eq!(g.get(0, 4), 2);
        assert_eq!(g.get(2, 4), 3);
        assert_eq!(g.areas(), vec![7, 1, 1]);
    }

    #[test]
    fn components_reassemble_the_mask() {
        let m = BinaryMask::from_rows((3, 1), &["##..#", "....#", "#.#.."]);
        let g = label_components(&m, Connectivity::Four);
        let total: usize = g.components().iter().map(|c| c.count()).sum();
        assert_eq!(total, m.count());
        assert_eq!(g.count(), 4);
    }
}
