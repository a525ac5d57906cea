use std::collections::{HashSet, VecDeque};

use super::chain::{double_area, orient, ring_perimeter};
use super::{ContourError, Point, PolygonChain};

/// Strictly convex hull of a polygon chain, clockwise from its lowest
/// left-most vertex. Vertices are a subset of the chain's vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexHullChain {
    points: Vec<Point>,
}

impl ConvexHullChain {
    /// Closed point list (first vertex repeated at the end).
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn vertices(&self) -> &[Point] {
        &self.points[..self.points.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn area(&self) -> f64 {
        (double_area(self.vertices()) as f64 / 2.0).abs()
    }

    pub fn perimeter(&self) -> f64 {
        ring_perimeter(self.vertices())
    }

    /// Whether `p` lies inside or on the hull (exact lattice test).
    pub fn contains(&self, p: Point) -> bool {
        let v = self.vertices();
        // clockwise: every edge keeps the interior on its right
        (0..v.len()).all(|i| orient(v[i], v[(i + 1) % v.len()], p) <= 0)
    }
}

/// Convex hull of the chain, clockwise from its lowest left-most vertex.
///
/// Simple chains use Melkman's linear deque algorithm. Traced chains that
/// revisit cells (one-cell spurs, pinches) are only weakly simple and can
/// leave the deque through an edge it no longer watches, so those fall back
/// to a monotone-chain hull of the distinct vertices.
pub fn convex_hull(chain: &PolygonChain) -> Result<ConvexHullChain, ContourError> {
    let mut pts: Vec<Point> = Vec::with_capacity(chain.len());
    for &p in chain.vertices() {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let mut seen = HashSet::with_capacity(pts.len());
    let ccw = if pts.iter().all(|&p| seen.insert(p)) {
        melkman(&pts)?
    } else {
        monotone_chain(pts)
    };
    let ccw = strictly_convex(ccw);
    if ccw.len() < 3 {
        return Err(ContourError::DegenerateHull);
    }
    Ok(ConvexHullChain {
        points: anchor_clockwise(ccw),
    })
}

/// Counter-clockwise hull ring of a simple polyline.
fn melkman(pts: &[Point]) -> Result<Vec<Point>, ContourError> {

    // the leading collinear run collapses to its two extreme points
    let a = pts[0];
    let Some(k) = pts
        .iter()
        .skip(1)
        .position(|&p| p != a)
        .map(|i| i + 1)
        .and_then(|first| {
            let b = pts[first];
            pts.iter().position(|&p| orient(a, b, p) != 0)
        })
    else {
        return Err(ContourError::DegenerateHull);
    };
    let run = &pts[..k];
    let lo = *run.iter().min().unwrap();
    let hi = *run.iter().max().unwrap();
    let third = pts[k];

    let mut dq: VecDeque<Point> = if orient(lo, hi, third) > 0 {
        VecDeque::from([third, lo, hi, third])
    } else {
        VecDeque::from([third, hi, lo, third])
    };

    for &v in &pts[k + 1..] {
        let t = dq.len() - 1;
        if orient(dq[0], dq[1], v) > 0 && orient(dq[t - 1], dq[t], v) > 0 {
            continue;
        }
        while dq.len() > 2 {
            let t = dq.len() - 1;
            if orient(dq[t - 1], dq[t], v) > 0 {
                break;
            }
            dq.pop_back();
        }
        dq.push_back(v);
        while dq.len() > 2 {
            if orient(dq[0], dq[1], v) > 0 {
                break;
            }
            dq.pop_front();
        }
        dq.push_front(v);
    }

    // the last point sits at both ends
    dq.pop_back();
    Ok(dq.into_iter().collect())
}

/// Counter-clockwise hull ring of an arbitrary point set, collinear points dropped.
fn monotone_chain(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_unstable();
    pts.dedup();
    let mut ring: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for pass in [&pts[..], &pts.iter().rev().copied().collect::<Vec<_>>()[..]] {
        let floor = ring.len();
        for &p in pass {
            while ring.len() >= floor + 2 && orient(ring[ring.len() - 2], ring[ring.len() - 1], p) <= 0 {
                ring.pop();
            }
            ring.push(p);
        }
        ring.pop();
    }
    ring
}

fn strictly_convex(mut ring: Vec<Point>) -> Vec<Point> {
    loop {
        let n = ring.len();
        if n < 3 {
            return ring;
        }
        let drop = (0..n).find(|&i| {
            let (p, q, r) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            q == p || orient(p, q, r) <= 0
        });
        match drop {
            Some(i) => {
                ring.remove(i);
            }
            None => return ring,
        }
    }
}

/// Reverses a counter-clockwise ring and starts it at the lowest left-most vertex.
fn anchor_clockwise(mut ring: Vec<Point>) -> Vec<Point> {
    ring.reverse();
    let start = (0..ring.len())
        .min_by_key(|&i| (ring[i].y, ring[i].x))
        .unwrap();
    ring.rotate_left(start);
    ring.push(ring[0]);
    ring
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(pts: &[(i64, i64)]) -> PolygonChain {
        PolygonChain::from_vertices(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn verts(h: &ConvexHullChain) -> Vec<(i64, i64)> {
        h.vertices().iter().map(|p| (p.x, p.y)).collect()
    }

    #[test]
    fn convex_chain_is_its_own_hull() {
        let c = chain(&[(1, 0), (0, 2), (2, 3), (4, 1)]);
        let h = convex_hull(&c).unwrap();
        assert_eq!(verts(&h), vec![(1, 0), (0, 2), (2, 3), (4, 1)]);
    }

    #[test]
    fn notch_is_removed() {
        let c = chain(&[(0, 0), (0, 2), (1, 1), (2, 2), (2, 0)]);
        let h = convex_hull(&c).unwrap();
        assert_eq!(verts(&h), vec![(0, 0), (0, 2), (2, 2), (2, 0)]);
    }

    #[test]
    fn counter_clockwise_input_is_reoriented() {
        let c = chain(&[(0, 0), (2, 0), (2, 2), (1, 1), (0, 2)]);
        let h = convex_hull(&c).unwrap();
        assert_eq!(verts(&h), vec![(0, 0), (0, 2), (2, 2), (2, 0)]);
    }

    #[test]
    fn collinear_points_rejected() {
        let c = chain(&[(0, 0), (1, 1), (2, 2), (1, 1)]);
        assert!(matches!(convex_hull(&c), Err(ContourError::DegenerateHull)));
    }

    #[test]
    fn straight_runs_collapse() {
        let c = chain(&[(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0)]);
        let h = convex_hull(&c).unwrap();
        assert_eq!(verts(&h), vec![(0, 0), (0, 2), (2, 2), (2, 0)]);
        assert!(h.contains(Point::new(1, 1)));
        assert!(!h.contains(Point::new(3, 1)));
        assert_eq!(h.area(), 4.0);
    }
}
