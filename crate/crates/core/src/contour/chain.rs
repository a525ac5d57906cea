use std::ops::{Add, Sub};

use super::ContourError;

/// A lattice point; `x` grows to the right and `y` grows upward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn to_f64(self) -> PointF {
        PointF::new(self.x as f64, self.y as f64)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// A real-valued point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointF {
    pub x: f64,
    pub y: f64,
}

impl PointF {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, o: PointF) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// Twice the signed area of `a, b, c`; positive when the turn is counter-clockwise.
pub(crate) fn orient(a: Point, b: Point, c: Point) -> i128 {
    let (ux, uy) = ((b.x - a.x) as i128, (b.y - a.y) as i128);
    let (vx, vy) = ((c.x - a.x) as i128, (c.y - a.y) as i128);
    ux * vy - uy * vx
}

/// Twice the signed shoelace area of an open vertex ring.
pub(crate) fn double_area(ring: &[Point]) -> i128 {
    let n = ring.len();
    (0..n)
        .map(|i| {
            let (p, q) = (ring[i], ring[(i + 1) % n]);
            p.x as i128 * q.y as i128 - q.x as i128 * p.y as i128
        })
        .sum()
}

pub(crate) fn ring_perimeter(ring: &[Point]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| ring[i].to_f64().dist(ring[(i + 1) % n].to_f64()))
        .sum()
}

/// Closed sequence of boundary lattice points; the last point repeats the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonChain {
    points: Vec<Point>,
}

impl PolygonChain {
    /// Takes an already-closed point list (`first == last`).
    pub fn new(points: Vec<Point>) -> Result<Self, ContourError> {
        if points.len() < 2 || points.first() != points.last() {
            return Err(ContourError::NotClosed);
        }
        Ok(Self { points })
    }

    /// Closes an open vertex ring by repeating its first vertex.
    pub fn from_vertices(mut vertices: Vec<Point>) -> Result<Self, ContourError> {
        let first = *vertices.first().ok_or(ContourError::NotClosed)?;
        vertices.push(first);
        Self::new(vertices)
    }

    /// All `n + 1` points including the closing repeat.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The `n` distinct positions of the traversal (closing repeat dropped).
    pub fn vertices(&self) -> &[Point] {
        &self.points[..self.points.len() - 1]
    }

    /// Number of edges `n`.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Shoelace area with sign; negative for clockwise traversal.
    pub fn signed_area(&self) -> f64 {
        double_area(self.vertices()) as f64 / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        ring_perimeter(self.vertices())
    }

    /// The same cycle started at vertex `k`.
    pub fn rotated(&self, k: usize) -> PolygonChain {
        let v = self.vertices();
        let k = k % v.len();
        let mut out: Vec<Point> = v[k..].iter().chain(&v[..k]).copied().collect();
        out.push(out[0]);
        PolygonChain { points: out }
    }

    pub fn scaled(&self, k: i64) -> PolygonChain {
        PolygonChain {
            points: self.points.iter().map(|p| Point::new(p.x * k, p.y * k)).collect(),
        }
    }

    pub fn translated(&self, dx: i64, dy: i64) -> PolygonChain {
        PolygonChain {
            points: self.points.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect(),
        }
    }
}

/// Area centroid of a closed polygon from the signed shoelace sums.
pub fn polygon_centroid(chain: &PolygonChain) -> Result<PointF, ContourError> {
    let v = chain.vertices();
    let n = v.len();
    let mut area2 = 0i128;
    let mut cx = 0i128;
    let mut cy = 0i128;
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        let cross = p.x as i128 * q.y as i128 - q.x as i128 * p.y as i128;
        area2 += cross;
        cx += (p.x + q.x) as i128 * cross;
        cy += (p.y + q.y) as i128 * cross;
    }
    if area2 == 0 {
        return Err(ContourError::DegeneratePolygon);
    }
    // x_c = sum / (6A) = sum / (3 * 2A)
    let denom = 3.0 * area2 as f64;
    Ok(PointF::new(cx as f64 / denom, cy as f64 / denom))
}
