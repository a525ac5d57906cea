use super::{ConvexHullChain, ContourError, PointF};

/// Minimum-area enclosing rectangle: four corners, clockwise from the lowest
/// left-most corner.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBoxChain {
    corners: [PointF; 4],
}

impl BoundingBoxChain {
    pub fn corners(&self) -> &[PointF; 4] {
        &self.corners
    }

    /// Side vectors `b_i = B_i - B_{i+1}` (cyclic).
    pub fn sides(&self) -> [PointF; 4] {
        std::array::from_fn(|i| {
            let (p, q) = (self.corners[i], self.corners[(i + 1) % 4]);
            PointF::new(p.x - q.x, p.y - q.y)
        })
    }

    pub fn area(&self) -> f64 {
        let s = self.sides();
        s[0].x.hypot(s[0].y) * s[1].x.hypot(s[1].y)
    }

    pub fn contains(&self, p: PointF, tol: f64) -> bool {
        (0..4).all(|i| {
            let (a, b) = (self.corners[i], self.corners[(i + 1) % 4]);
            let len = a.dist(b);
            let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            // clockwise ring: inside is on the right, cross <= 0
            len == 0.0 || cross / len <= tol
        })
    }
}

/// Rotating-calipers scan over the hull edges; each candidate rectangle has one
/// side on a hull edge and the smallest one wins (first on ties).
pub fn min_area_rect(hull: &ConvexHullChain) -> Result<BoundingBoxChain, ContourError> {
    if hull.len() < 3 {
        return Err(ContourError::DegenerateHull);
    }
    // work counter-clockwise
    let mut v: Vec<PointF> = hull.vertices().iter().map(|p| p.to_f64()).collect();
    v.reverse();
    let n = v.len();

    let dot = |a: PointF, b: PointF| a.x * b.x + a.y * b.y;
    let sub = |a: PointF, b: PointF| PointF::new(a.x - b.x, a.y - b.y);

    let mut best: Option<(f64, [PointF; 4])> = None;
    // support indices: farthest along the edge, farthest from it, farthest back
    let (mut i_max, mut i_far, mut i_min) = (1usize, 1usize, 0usize);
    for e in 0..n {
        let p = v[e];
        let d = sub(v[(e + 1) % n], p);
        let len = d.x.hypot(d.y);
        let u = PointF::new(d.x / len, d.y / len);
        let normal = PointF::new(-u.y, u.x);

        let along = |i: usize| dot(sub(v[i % n], p), u);
        let away = |i: usize| dot(sub(v[i % n], p), normal);

        if e == 0 {
            i_max = e + 1;
        }
        i_max = i_max.max(e + 1);
        while along(i_max + 1) > along(i_max) {
            i_max += 1;
        }
        i_far = i_far.max(i_max);
        while away(i_far + 1) > away(i_far) {
            i_far += 1;
        }
        if e == 0 {
            i_min = i_far;
        }
        i_min = i_min.max(i_far);
        while along(i_min + 1) < along(i_min) {
            i_min += 1;
        }

        let (lo, hi, height) = (along(i_min), along(i_max), away(i_far));
        let area = (hi - lo) * height;
        if best.as_ref().is_none_or(|(a, _)| area < *a) {
            let at = |s: f64, t: f64| {
                PointF::new(p.x + s * u.x + t * normal.x, p.y + s * u.y + t * normal.y)
            };
            best = Some((area, [at(lo, 0.0), at(hi, 0.0), at(hi, height), at(lo, height)]));
        }
    }

    let (_, ccw) = best.expect("hull has at least three edges");
    Ok(BoundingBoxChain {
        corners: anchor_clockwise(ccw),
    })
}

fn anchor_clockwise(ccw: [PointF; 4]) -> [PointF; 4] {
    let cw = [ccw[0], ccw[3], ccw[2], ccw[1]];
    let min_y = cw.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let start = (0..4)
        .filter(|&i| cw[i].y - min_y <= 1e-9)
        .min_by(|&a, &b| cw[a].x.total_cmp(&cw[b].x))
        .unwrap();
    std::array::from_fn(|i| cw[(start + i) % 4])
}
