use std::fmt;

/// A binary region stored in the tight bounding box of its foreground.
///
/// `origin` is the `(row, col)` of the box's top-left cell in the parent grid.
/// Every constructor crops to the tight box, so two masks holding the same
/// cell set compare equal regardless of how they were built. The empty mask
/// is `0 x 0` at origin `(0, 0)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    origin: (usize, usize),
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// Builds a mask from a row-major bit grid placed at `origin`.
    ///
    /// Panics if `bits.len() != width * height`.
    pub fn new(origin: (usize, usize), width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "bit grid does not match dimensions");
        Self::tighten(origin, width, height, &bits)
    }

    pub fn empty() -> Self {
        Self {
            origin: (0, 0),
            width: 0,
            height: 0,
            bits: Vec::new(),
        }
    }

    pub fn from_fn(
        origin: (usize, usize),
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self::tighten(origin, width, height, &bits)
    }

    /// Builds a mask from absolute `(row, col)` cells. Duplicates are allowed.
    pub fn from_cells<I: IntoIterator<Item = (usize, usize)>>(cells: I) -> Self {
        let cells: Vec<(usize, usize)> = cells.into_iter().collect();
        if cells.is_empty() {
            return Self::empty();
        }
        let r0 = cells.iter().map(|c| c.0).min().unwrap();
        let r1 = cells.iter().map(|c| c.0).max().unwrap();
        let c0 = cells.iter().map(|c| c.1).min().unwrap();
        let c1 = cells.iter().map(|c| c.1).max().unwrap();
        let width = c1 - c0 + 1;
        let height = r1 - r0 + 1;
        let mut bits = vec![false; width * height];
        for (r, c) in cells {
            bits[(r - r0) * width + (c - c0)] = true;
        }
        Self {
            origin: (r0, c0),
            width,
            height,
            bits,
        }
    }

    /// Parses a picture such as `["##.", ".#."]`; `#` and `1` are foreground.
    pub fn from_rows(origin: (usize, usize), rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
        Self::from_fn(origin, width, height, |r, c| {
            matches!(rows[r].chars().nth(c), Some('#') | Some('1'))
        })
    }

    fn tighten(origin: (usize, usize), width: usize, height: usize, bits: &[bool]) -> Self {
        let mut r0 = usize::MAX;
        let mut r1 = 0;
        let mut c0 = usize::MAX;
        let mut c1 = 0;
        for r in 0..height {
            for c in 0..width {
                if bits[r * width + c] {
                    r0 = r0.min(r);
                    r1 = r1.max(r);
                    c0 = c0.min(c);
                    c1 = c1.max(c);
                }
            }
        }
        if r0 == usize::MAX {
            return Self::empty();
        }
        let w = c1 - c0 + 1;
        let h = r1 - r0 + 1;
        let mut out = Vec::with_capacity(w * h);
        for r in r0..=r1 {
            out.extend_from_slice(&bits[r * width + c0..=r * width + c1]);
        }
        Self {
            origin: (origin.0 + r0, origin.1 + c0),
            width: w,
            height: h,
            bits: out,
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

    /// Row-major bits of the tight box.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Local lookup; out-of-box cells are background.
    pub fn get(&self, row: isize, col: isize) -> bool {
        if row < 0 || col < 0 {
            return false;
        }
        let (r, c) = (row as usize, col as usize);
        r < self.height && c < self.width && self.bits[r * self.width + c]
    }

    /// Lookup by absolute parent-grid coordinates.
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.origin.0
            && col >= self.origin.1
            && self.get((row - self.origin.0) as isize, (col - self.origin.1) as isize)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Absolute foreground cells in raster order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (r0, c0) = self.origin;
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (r0 + i / w, c0 + i % w))
    }

    /// The same cell set moved to a new origin.
    pub fn with_origin(&self, origin: (usize, usize)) -> Self {
        Self {
            origin: if self.is_empty() { (0, 0) } else { origin },
            ..self.clone()
        }
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.cells().all(|(r, c)| other.contains(r, c))
    }

    /// Cells of `self` that are not in `other`.
    pub fn difference(&self, other: &BinaryMask) -> BinaryMask {
        let (r0, c0) = self.origin;
        Self::from_fn(self.origin, self.width, self.height, |r, c| {
            self.bits[r * self.width + c] && !other.contains(r0 + r, c0 + c)
        })
    }

    pub fn intersection(&self, other: &BinaryMask) -> BinaryMask {
        let (r0, c0) = self.origin;
        Self::from_fn(self.origin, self.width, self.height, |r, c| {
            self.bits[r * self.width + c] && other.contains(r0 + r, c0 + c)
        })
    }

    /// Quarter turn of the box contents (clockwise on screen), origin kept.
    pub fn rotate90(&self) -> BinaryMask {
        let (h, w) = (self.height, self.width);
        Self::from_fn(self.origin, h, w, |r, c| self.bits[(h - 1 - c) * w + r])
    }

    /// Mirror left-right within the box, origin kept.
    pub fn flip_horizontal(&self) -> BinaryMask {
        let w = self.width;
        Self::from_fn(self.origin, w, self.height, |r, c| self.bits[r * w + (w - 1 - c)])
    }
}

impl fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "BinaryMask {{ origin: {:?}, {}x{} }}",
            self.origin, self.height, self.width
        )?;
        for r in 0..self.height {
            let line: String = (0..self.width)
                .map(|c| if self.bits[r * self.width + c] { '#' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}
