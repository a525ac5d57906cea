//! Generators and brute-force oracles shared by the integration suites.
//!
//! Everything here is written independently of the library algorithms it
//! checks: flood fills instead of union-find, gift wrapping instead of the
//! deque hull, angle sweeps instead of calipers, pair enumeration instead of
//! the sorted concordance count.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use tumor_shape::contour::{Point, PointF, PolygonChain};
use tumor_shape::raster::BinaryMask;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- raster

pub fn random_mask(rng: &mut impl Rng, size: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn((0, 0), size, size, |_, _| rng.random_bool(density))
}

/// A 4-connected blob grown from the centre of a `size x size` frame.
pub fn random_blob(rng: &mut impl Rng, size: usize, cells: usize) -> BinaryMask {
    let mut set = BTreeSet::from([(size / 2, size / 2)]);
    let mut frontier: Vec<(usize, usize)> = Vec::new();
    let push_neighbours = |frontier: &mut Vec<(usize, usize)>, (r, c): (usize, usize)| {
        if r > 0 {
            frontier.push((r - 1, c));
        }
        if c > 0 {
            frontier.push((r, c - 1));
        }
        if r + 1 < size {
            frontier.push((r + 1, c));
        }
        if c + 1 < size {
            frontier.push((r, c + 1));
        }
    };
    push_neighbours(&mut frontier, (size / 2, size / 2));
    while set.len() < cells && !frontier.is_empty() {
        let i = rng.random_range(0..frontier.len());
        let cell = frontier.swap_remove(i);
        if set.insert(cell) {
            push_neighbours(&mut frontier, cell);
        }
    }
    BinaryMask::from_cells(set)
}

/// A thin random-walk region: exercises one-cell spurs and pinch points.
pub fn random_walk_blob(rng: &mut impl Rng, size: usize, steps: usize) -> BinaryMask {
    let (mut r, mut c) = (size as i64 / 2, size as i64 / 2);
    let mut set = BTreeSet::from([(r as usize, c as usize)]);
    for _ in 0..steps {
        let (dr, dc) = [(0, 1), (1, 0), (0, -1), (-1, 0)][rng.random_range(0..4)];
        r = (r + dr).clamp(0, size as i64 - 1);
        c = (c + dc).clamp(0, size as i64 - 1);
        set.insert((r as usize, c as usize));
    }
    BinaryMask::from_cells(set)
}

/// Flood-fill component labelling: returns one cell set per component.
pub fn flood_components(cells: &BTreeSet<(i64, i64)>, eight: bool) -> Vec<BTreeSet<(i64, i64)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut dirs = vec![(0, 1), (1, 0), (0, -1), (-1, 0)];
    if eight {
        dirs.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
    }
    for &start in cells {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some((r, c)) = stack.pop() {
            comp.insert((r, c));
            for &(dr, dc) in &dirs {
                let q = (r + dr, c + dc);
                if cells.contains(&q) && seen.insert(q) {
                    stack.push(q);
                }
            }
        }
        out.push(comp);
    }
    out
}

pub fn mask_cells(mask: &BinaryMask) -> BTreeSet<(i64, i64)> {
    mask.cells().map(|(r, c)| (r as i64, c as i64)).collect()
}

/// Hole cells: background cells of the padded box with no 4-path to its border.
pub fn flood_holes(mask: &BinaryMask) -> BTreeSet<(i64, i64)> {
    if mask.is_empty() {
        return BTreeSet::new();
    }
    let fg = mask_cells(mask);
    let (r0, c0) = (mask.origin().0 as i64 - 1, mask.origin().1 as i64 - 1);
    let (r1, c1) = (r0 + mask.height() as i64 + 1, c0 + mask.width() as i64 + 1);
    let background: BTreeSet<(i64, i64)> = (r0..=r1)
        .flat_map(|r| (c0..=c1).map(move |c| (r, c)))
        .filter(|p| !fg.contains(p))
        .collect();
    flood_components(&background, false)
        .into_iter()
        .filter(|comp| !comp.iter().any(|&(r, c)| r == r0 || r == r1 || c == c0 || c == c1))
        .flatten()
        .collect()
}

/// Whether two labellings describe the same partition (bijective relabelling).
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if (x == 0) != (y == 0) {
            return false;
        }
        if *fwd.entry(x).or_insert(y) != y || *back.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------- geometry

fn cross(o: Point, a: Point, b: Point) -> i128 {
    (a.x - o.x) as i128 * (b.y - o.y) as i128 - (a.y - o.y) as i128 * (b.x - o.x) as i128
}

fn dist2(a: Point, b: Point) -> i128 {
    let (dx, dy) = ((a.x - b.x) as i128, (a.y - b.y) as i128);
    dx * dx + dy * dy
}

/// Jarvis march; returns the strictly convex hull vertex set.
pub fn gift_wrap(points: &[Point]) -> BTreeSet<Point> {
    let pts: Vec<Point> = points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let start = *pts.iter().min().unwrap();
    let mut hull = BTreeSet::new();
    let mut current = start;
    loop {
        hull.insert(current);
        let mut cand = if pts[0] == current { pts[1] } else { pts[0] };
        for &p in &pts {
            if p == current {
                continue;
            }
            let o = cross(current, cand, p);
            // keep the most clockwise candidate, farthest on ties
            if o < 0 || (o == 0 && dist2(current, p) > dist2(current, cand)) {
                cand = p;
            }
        }
        current = cand;
        if current == start {
            break;
        }
        assert!(hull.len() <= pts.len(), "gift wrap did not close");
    }
    hull
}

fn rect_area_at(pts: &[PointF], angle: f64) -> f64 {
    let (s, c) = angle.sin_cos();
    let (mut lo_u, mut hi_u, mut lo_v, mut hi_v) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        let u = p.x * c + p.y * s;
        let v = -p.x * s + p.y * c;
        lo_u = lo_u.min(u);
        hi_u = hi_u.max(u);
        lo_v = lo_v.min(v);
        hi_v = hi_v.max(v);
    }
    (hi_u - lo_u) * (hi_v - lo_v)
}

/// Minimum enclosing-rectangle area over orientations `0, step, 2 step, ...` in [0°, 90°).
pub fn sweep_min_rect_area(points: &[Point], step_deg: f64) -> f64 {
    let pts: Vec<PointF> = points.iter().map(|p| p.to_f64()).collect();
    let steps = (90.0 / step_deg).round() as usize;
    (0..steps)
        .map(|k| rect_area_at(&pts, (k as f64 * step_deg).to_radians()))
        .fold(f64::INFINITY, f64::min)
}

/// The same sweep, then a second sweep 1000x finer across the coarse step
/// either side of every coarse local minimum within 1% of the best.
pub fn refined_sweep_min_rect_area(points: &[Point], step_deg: f64) -> f64 {
    let pts: Vec<PointF> = points.iter().map(|p| p.to_f64()).collect();
    let steps = (90.0 / step_deg).round() as usize;
    let coarse: Vec<f64> = (0..steps)
        .map(|k| rect_area_at(&pts, (k as f64 * step_deg).to_radians()))
        .collect();
    let best = coarse.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = best;
    for k in 0..steps {
        let (prev, next) = (coarse[(k + steps - 1) % steps], coarse[(k + 1) % steps]);
        if coarse[k] > prev || coarse[k] > next || coarse[k] > best * 1.01 {
            continue;
        }
        for j in -1000..=1000 {
            let a = (k as f64 + j as f64 / 1000.0) * step_deg;
            out = out.min(rect_area_at(&pts, a.to_radians()));
        }
    }
    out
}

/// Centroid by fanning triangles from the first vertex.
pub fn fan_centroid(vertices: &[Point]) -> PointF {
    let p0 = vertices[0].to_f64();
    let (mut area, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for w in vertices[1..].windows(2) {
        let (a, b) = (w[0].to_f64(), w[1].to_f64());
        let t = ((a.x - p0.x) * (b.y - p0.y) - (a.y - p0.y) * (b.x - p0.x)) / 2.0;
        area += t;
        cx += t * (p0.x + a.x + b.x) / 3.0;
        cy += t * (p0.y + a.y + b.y) / 3.0;
    }
    PointF::new(cx / area, cy / area)
}

fn on_segment(p: Point, q: Point, r: Point) -> bool {
    q.x >= p.x.min(r.x) && q.x <= p.x.max(r.x) && q.y >= p.y.min(r.y) && q.y <= p.y.max(r.y)
}

/// Any contact between two closed segments.
pub fn segments_touch(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1).signum();
    let d2 = cross(q1, q2, p2).signum();
    let d3 = cross(p1, p2, q1).signum();
    let d4 = cross(p1, p2, q2).signum();
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, p1, q2))
        || (d2 == 0 && on_segment(q1, p2, q2))
        || (d3 == 0 && on_segment(p1, q1, p2))
        || (d4 == 0 && on_segment(p1, q2, p2))
}

/// Interiors cross transversally (touching and overlapping do not count).
pub fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1).signum();
    let d2 = cross(q1, q2, p2).signum();
    let d3 = cross(p1, p2, q1).signum();
    let d4 = cross(p1, p2, q2).signum();
    d1 * d2 < 0 && d3 * d4 < 0
}

pub fn is_strictly_simple(v: &[Point]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// A random star-shaped simple polygon with integer vertices.
pub fn random_simple_polygon(rng: &mut impl Rng) -> PolygonChain {
    loop {
        let n = rng.random_range(3..40);
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(|a, b| a.total_cmp(b));
        let cx = rng.random_range(-50..50) as f64;
        let cy = rng.random_range(-50..50) as f64;
        let mut v: Vec<Point> = angles
            .iter()
            .map(|&a| {
                let r = rng.random_range(5.0..60.0);
                Point::new((cx + r * a.cos()).round() as i64, (cy + r * a.sin()).round() as i64)
            })
            .collect();
        v.dedup();
        if v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        if v.len() < 3 || !is_strictly_simple(&v) {
            continue;
        }
        let area2: i128 = (0..v.len())
            .map(|i| cross(Point::new(0, 0), v[i], v[(i + 1) % v.len()]))
            .sum();
        if area2 == 0 {
            continue;
        }
        if rng.random_bool(0.5) {
            v.reverse();
        }
        return PolygonChain::from_vertices(v).unwrap();
    }
}

// ---------------------------------------------------------------- descriptors

/// All eight symmetries of the square grid applied to a mask.
pub fn grid_symmetries(mask: &BinaryMask) -> Vec<BinaryMask> {
    let mut out = Vec::new();
    let mut m = mask.clone();
    for _ in 0..4 {
        out.push(m.clone());
        out.push(m.flip_horizontal());
        m = m.rotate90();
    }
    out
}

/// Naive radial statistics, written out term by term.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveRadial {
    pub mean: f64,
    pub sd: f64,
    pub entropy: f64,
    pub area_ratio: f64,
    pub zero_crossings: usize,
    pub roughness: f64,
    pub margin: f64,
}

pub fn naive_radial(r: &[f64], s: &[f64], bins: usize) -> NaiveRadial {
    let n = r.len();
    let mut mean = 0.0;
    for x in r {
        mean += x / n as f64;
    }
    let mut var = 0.0;
    for x in r {
        var += (x - mean) * (x - mean) / n as f64;
    }
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for x in r {
        let mut k = 0;
        while k + 1 < bins && *x >= (k + 1) as f64 / bins as f64 {
            k += 1;
        }
        *counts.entry(k).or_default() += 1;
    }
    let mut entropy = 0.0;
    for c in counts.values() {
        let p = *c as f64 / n as f64;
        entropy -= p * p.ln();
    }
    let mut outside = 0.0;
    for x in r {
        if *x > mean {
            outside += x - mean;
        }
    }
    let mut zero_crossings = 0;
    for i in 0..n {
        let j = if i + 1 == n { 0 } else { i + 1 };
        if (r[i] - mean) * (r[j] - mean) < 0.0 {
            zero_crossings += 1;
        }
    }
    let l = std::cmp::max(2, (n as f64 / 10.0).round() as usize);
    let segments = n / l;
    let mut rough = 0.0;
    for j in 0..segments {
        let mut seg = 0.0;
        for k in j * l..(j + 1) * l {
            seg += (r[k] - r[(k + 1) % n]).abs();
        }
        rough += seg;
    }
    let d: Vec<f64> = r.iter().zip(s).map(|(a, b)| a - b).collect();
    let dm = d.iter().sum::<f64>() / n as f64;
    let margin = (d.iter().map(|x| (x - dm).powi(2)).sum::<f64>() / n as f64).sqrt();
    NaiveRadial {
        mean,
        sd: var.sqrt(),
        entropy,
        area_ratio: outside / (n as f64 * mean),
        zero_crossings,
        roughness: if segments == 0 { 0.0 } else { rough / segments as f64 },
        margin,
    }
}

/// Raw and central moments of a sequence for orders 0..=4.
pub fn naive_moments(r: &[f64]) -> ([f64; 5], [f64; 5]) {
    let n = r.len() as f64;
    let m1 = r.iter().sum::<f64>() / n;
    let mut m = [0.0; 5];
    let mut mu = [0.0; 5];
    for &x in r {
        let (mut a, mut b) = (1.0, 1.0);
        for p in 0..5 {
            m[p] += a / n;
            mu[p] += b / n;
            a *= x;
            b *= x - m1;
        }
    }
    (m, mu)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

// ---------------------------------------------------------------- survival

/// Exact log partial likelihood with Breslow ties, one risk set at a time.
pub fn brute_loglik(times: &[f64], events: &[bool], cols: &[Vec<f64>], beta: &[f64]) -> f64 {
    let eta = |i: usize| cols.iter().zip(beta).map(|(c, b)| c[i] * b).sum::<f64>();
    let mut ll = 0.0;
    for i in 0..times.len() {
        if events[i] {
            let risk: f64 = (0..times.len()).filter(|&j| times[j] >= times[i]).map(|j| eta(j).exp()).sum();
            ll += eta(i) - risk.ln();
        }
    }
    ll
}

/// Golden-section maximiser of a unimodal function on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    (lo + hi) / 2.0
}

/// Concordant, tied and comparable pair counts by enumerating every pair.
pub fn brute_concordance(scores: &[f64], times: &[f64], events: &[bool]) -> (u64, u64, u64) {
    let (mut conc, mut tied, mut comp) = (0, 0, 0);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if events[i] && times[i] < times[j] {
                comp += 1;
                if scores[i] > scores[j] {
                    conc += 1;
                } else if scores[i] == scores[j] {
                    tied += 1;
                }
            }
        }
    }
    (conc, tied, comp)
}

/// Kaplan-Meier value at `t` from the definition: product over event times up to `t`.
pub fn brute_km(times: &[f64], events: &[bool], t: f64) -> f64 {
    let mut event_times: Vec<f64> = times.iter().zip(events).filter(|(_, &e)| e).map(|(&s, _)| s).collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();
    let mut s = 1.0;
    for &u in event_times.iter().filter(|&&u| u <= t) {
        let at_risk = times.iter().filter(|&&x| x >= u).count() as f64;
        let deaths = times.iter().zip(events).filter(|(&x, &e)| e && x == u).count() as f64;
        s *= 1.0 - deaths / at_risk;
    }
    s
}

/// Log-rank chi-square summed over every distinct event time.
pub fn brute_logrank(times: &[f64], events: &[bool], group: &[bool]) -> f64 {
    let mut event_times: Vec<f64> = times.iter().zip(events).filter(|(_, &e)| e).map(|(&s, _)| s).collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();
    let (mut o_minus_e, mut v) = (0.0, 0.0);
    for &u in &event_times {
        let at_risk: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= u).collect();
        let n = at_risk.len() as f64;
        let n1 = at_risk.iter().filter(|&&i| group[i]).count() as f64;
        let d = at_risk.iter().filter(|&&i| times[i] == u && events[i]).count() as f64;
        let d1 = at_risk.iter().filter(|&&i| times[i] == u && events[i] && group[i]).count() as f64;
        o_minus_e += d1 - d * n1 / n;
        if n > 1.0 {
            v += d * n1 * (n - n1) * (n - d) / (n * n * (n - 1.0));
        }
    }
    if v > 0.0 {
        o_minus_e * o_minus_e / v
    } else {
        0.0
    }
}

/// Proportional-hazards data: standard-normal covariates, exponential event
/// times with log-hazard `x . beta`, independent exponential censoring.
pub fn simulate_cox(rng: &mut impl Rng, n: usize, beta: &[f64], censor_rate: f64) -> (Vec<f64>, Vec<bool>, Vec<Vec<f64>>) {
    let normal = |rng: &mut dyn rand::RngCore| {
        let (u1, u2): (f64, f64) = (rng.random_range(f64::EPSILON..1.0), rng.random());
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let cols: Vec<Vec<f64>> = beta.iter().map(|_| (0..n).map(|_| normal(rng)).collect()).collect();
    let mut times = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    for i in 0..n {
        let eta: f64 = cols.iter().zip(beta).map(|(c, b)| c[i] * b).sum();
        let t = -rng.random_range(f64::EPSILON..1.0f64).ln() / eta.exp();
        let c = -rng.random_range(f64::EPSILON..1.0f64).ln() / censor_rate;
        times.push(t.min(c));
        events.push(t <= c);
    }
    (times, events, cols)
}

pub fn standardize_columns(cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    cols.iter()
        .map(|c| {
            let n = c.len() as f64;
            let m = c.iter().sum::<f64>() / n;
            let s = (c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
            c.iter().map(|x| (x - m) / s).collect()
        })
        .collect()
}
