use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{BinaryMask, RasterError};

/// Class assigned to one heat-map cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    Empty = 0,
    NonMalignant = 1,
    Tumor = 2,
}

impl CellClass {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(CellClass::Empty),
            1 => Some(CellClass::NonMalignant),
            2 => Some(CellClass::Tumor),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

/// A reconstructed heat map: one class label per patch, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeatMap {
    width: usize,
    height: usize,
    cells: Vec<CellClass>,
}

impl HeatMap {
    pub fn new(width: usize, height: usize, cells: Vec<CellClass>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::Parse {
                line: 1,
                column: None,
                message: format!("dimensions must be positive, got {width} x {height}"),
            });
        }
        if cells.len() != width * height {
            return Err(RasterError::Parse {
                line: 1,
                column: None,
                message: format!(
                    "expected {} cells for {width} x {height}, got {}",
                    width * height,
                    cells.len()
                ),
            });
        }
        Ok(Self {
            width,
            height,
            cells,
        })
    }

    /// Builds a heat map from a picture: `.` empty, `n` non-malignant, `T` tumor
    /// (digits `0`/`1`/`2` also accepted).
    pub fn from_picture(rows: &[&str]) -> Result<Self, RasterError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut cells = Vec::with_capacity(width * height);
        for (r, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(RasterError::RaggedRow {
                    line: r + 1,
                    expected: width,
                    found: row.chars().count(),
                });
            }
            for (c, ch) in row.chars().enumerate() {
                let class = match ch {
                    '.' | '0' => CellClass::Empty,
                    'n' | '1' => CellClass::NonMalignant,
                    'T' | '2' => CellClass::Tumor,
                    other => {
                        return Err(RasterError::Parse {
                            line: r + 1,
                            column: Some(c + 1),
                            message: format!("unknown picture symbol {other:?}"),
                        })
                    }
                };
                cells.push(class);
            }
        }
        Self::new(width, height, cells)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, RasterError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| RasterError::Io {
            path: path.display().to_string(),
            source,
        })?;
        text.parse()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> CellClass {
        self.cells[row * self.width + col]
    }

    pub fn cells(&self) -> &[CellClass] {
        &self.cells
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }

    /// Mask of every cell satisfying `pred`, in full-grid coordinates.
    pub fn mask_where(&self, pred: impl Fn(CellClass) -> bool) -> BinaryMask {
        BinaryMask::from_fn((0, 0), self.width, self.height, |r, c| pred(self.get(r, c)))
    }
}

impl FromStr for HeatMap {
    type Err = RasterError;

    /// Text grid: a `W H` header line, then `H` lines of `W` whitespace-separated
    /// labels in `{0, 1, 2}`. Blank trailing lines are ignored.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| RasterError::Parse {
                line: 1,
                column: None,
                message: "missing `W H` header".into(),
            })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || RasterError::Parse {
            line: 1,
            column: None,
            message: format!("malformed header {header:?}, expected `W H`"),
        };
        if dims.len() != 2 {
            return Err(bad_header());
        }
        let width: usize = dims[0].parse().map_err(|_| bad_header())?;
        let height: usize = dims[1].parse().map_err(|_| bad_header())?;
        if width == 0 || height == 0 {
            return Err(bad_header());
        }

        let mut cells = Vec::with_capacity(width * height);
        let mut rows = 0;
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = idx + 1;
            if rows == height {
                return Err(RasterError::Parse {
                    line: line_no,
                    column: None,
                    message: format!("more than {height} rows"),
                });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != width {
                return Err(RasterError::RaggedRow {
                    line: line_no,
                    expected: width,
                    found: fields.len(),
                });
            }
            for (col, field) in fields.iter().enumerate() {
                let class = field
                    .parse::<u8>()
                    .ok()
                    .and_then(CellClass::from_code)
                    .ok_or_else(|| RasterError::Parse {
                        line: line_no,
                        column: Some(col + 1),
                        message: format!("label {field:?} is not one of 0, 1, 2"),
                    })?;
                cells.push(class);
            }
            rows += 1;
        }
        if rows != height {
            return Err(RasterError::Parse {
                line: text.lines().count() + 1,
                column: None,
                message: format!("expected {height} rows, found {rows}"),
            });
        }
        Self::new(width, height, cells)
    }
}

impl fmt::Display for HeatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.width, self.height)?;
        for row in self.cells.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|c| c.code().to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
