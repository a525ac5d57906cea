use std::collections::VecDeque;

use super::BinaryMask;

/// Fills every background pocket that cannot reach the frame border through
/// 4-connected background cells.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    if mask.is_empty() {
        return BinaryMask::empty();
    }
    // one cell of padding so the outside is a single connected background
    let (w, h) = (mask.width() + 2, mask.height() + 2);
    let fg = |r: usize, c: usize| mask.get(r as isize - 1, c as isize - 1);
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    outside[0] = true;
    while let Some((r, c)) = queue.pop_front() {
        let mut visit = |nr: usize, nc: usize| {
            let i = nr * w + nc;
            if !outside[i] && !fg(nr, nc) {
                outside[i] = true;
                queue.push_back((nr, nc));
            }
        };
        if r > 0 {
            visit(r - 1, c);
        }
        if r + 1 < h {
            visit(r + 1, c);
        }
        if c > 0 {
            visit(r, c - 1);
        }
        if c + 1 < w {
            visit(r, c + 1);
        }
    }
    BinaryMask::from_fn(mask.origin(), mask.width(), mask.height(), |r, c| {
        !outside[(r + 1) * w + (c + 1)]
    })
}

/// Binary erosion by the 3x3 cross. Cells outside the frame count as background.
pub fn erode(mask: &BinaryMask) -> BinaryMask {
    BinaryMask::from_fn(mask.origin(), mask.width(), mask.height(), |r, c| {
        let (r, c) = (r as isize, c as isize);
        mask.get(r, c)
            && mask.get(r - 1, c)
            && mask.get(r + 1, c)
            && mask.get(r, c - 1)
            && mask.get(r, c + 1)
    })
}

/// Number of cross erosions needed before the mask vanishes (0 for an empty mask).
pub fn erosion_depth(mask: &BinaryMask) -> usize {
    let mut current = mask.clone();
    let mut steps = 0;
    while !current.is_empty() {
        current = erode(&current);
        steps += 1;
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_square_fills_to_itself() {
        let m = BinaryMask::from_rows((2, 2), &["###", "###"]);
        assert_eq!(fill_holes(&m), m);
    }

    #[test]
    fn ring_fills_center() {
        let ring = BinaryMask::from_rows((0, 0), &["###", "#.#", "###"]);
        let solid = BinaryMask::from_rows((0, 0), &["###", "###", "###"]);
        assert_eq!(fill_holes(&ring), solid);
    }

    #[test]
    fn diagonal_leak_is_still_a_hole() {
        // the centre only touches the outside through a corner
        let m = BinaryMask::from_rows((0, 0), &["##.", "#.#", "###"]);
        assert_eq!(fill_holes(&m).count(), 8);
    }

    #[test]
    fn erode_single_cell_and_row() {
        assert!(erode(&BinaryMask::from_cells([(3, 3)])).is_empty());
        assert!(erode(&BinaryMask::from_rows((0, 0), &["#####"])).is_empty());
    }

    #[test]
    fn erode_square_keeps_centre() {
        let m = BinaryMask::from_rows((5, 5), &["###", "###", "###"]);
        assert_eq!(erode(&m), BinaryMask::from_cells([(6, 6)]));
        assert_eq!(erosion_depth(&m), 2);
    }

    #[test]
    fn depth_of_row_is_one() {
        assert_eq!(erosion_depth(&BinaryMask::from_rows((0, 0), &["#####"])), 1);
        assert_eq!(erosion_depth(&BinaryMask::empty()), 0);
    }
}
