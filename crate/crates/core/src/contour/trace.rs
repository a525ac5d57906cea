use super::{ContourError, Point, PolygonChain};
use crate::raster::{label_components, BinaryMask, Connectivity};

/// Moore neighbourhood in clockwise order (y up), starting west.
const RING: [Point; 8] = [
    Point::new(-1, 0),
    Point::new(-1, 1),
    Point::new(0, 1),
    Point::new(1, 1),
    Point::new(1, 0),
    Point::new(1, -1),
    Point::new(0, -1),
    Point::new(-1, -1),
];

fn ring_index(d: Point) -> usize {
    RING.iter()
        .position(|&r| r == d)
        .expect("backtrack cell must be a Moore neighbour")
}

/// Traces the outer boundary with `y = H - 1 - row`, where `H` is the
/// smallest grid height that holds the mask at its origin.
pub fn trace_boundary(mask: &BinaryMask) -> Result<PolygonChain, ContourError> {
    trace_boundary_in(mask, mask.origin().0 + mask.height())
}

/// Clockwise Moore-neighbour trace of a single 4-connected region, starting at
/// its lowest left-most cell, in a parent grid of `grid_height` rows.
///
/// Vertices are cell centres with `x = column` and `y = grid_height - 1 - row`.
/// Tracing stops once the first move out of the start cell is about to repeat,
/// which is Jacob's stopping rule expressed on (cell, next cell) pairs. Holes are
/// not visited; cells on one-cell-wide spurs are visited on the way out and back.
pub fn trace_boundary_in(mask: &BinaryMask, grid_height: usize) -> Result<PolygonChain, ContourError> {
    if mask.is_empty() {
        return Err(ContourError::EmptyRegion);
    }
    let components = label_components(mask, Connectivity::Four).count();
    if components != 1 {
        return Err(ContourError::MultipleComponents(components as usize));
    }
    let cells = mask.count();
    if cells < 2 {
        return Err(ContourError::SingleCell);
    }
    let (r0, c0) = mask.origin();
    if grid_height < r0 + mask.height() {
        return Err(ContourError::FrameTooSmall {
            grid_height,
            needed: r0 + mask.height(),
        });
    }

    let h = mask.height() as i64;
    let fg = |p: Point| mask.get((h - 1 - p.y) as isize, p.x as isize);

    // lowest row of the box is local y = 0; it always holds a foreground cell
    let start_x = (0..mask.width() as i64)
        .find(|&x| fg(Point::new(x, 0)))
        .expect("tight mask has a foreground cell on its last row");
    let start = Point::new(start_x, 0);

    let mut points = vec![start];
    let mut current = start;
    let mut backtrack = 0usize; // west of the start cell is background
    let mut first_move: Option<Point> = None;
    let limit = 8 * cells + 8;

    loop {
        let (dir, next) = (1..=8)
            .map(|i| (backtrack + i) % 8)
            .map(|d| (d, current + RING[d]))
            .find(|&(_, q)| fg(q))
            .expect("a connected region with two cells has a neighbour");

        if current == start {
            match first_move {
                Some(m) if m == next => break,
                None => first_move = Some(next),
                _ => {}
            }
        }

        let behind = current + RING[(dir + 7) % 8];
        backtrack = ring_index(behind - next);
        current = next;
        points.push(current);
        if points.len() > limit {
            return Err(ContourError::TraceDidNotClose);
        }
    }

    let dx = c0 as i64;
    let dy = grid_height as i64 - r0 as i64 - h;
    let points = points
        .into_iter()
        .map(|p| Point::new(p.x + dx, p.y + dy))
        .collect();
    PolygonChain::new(points)
}
