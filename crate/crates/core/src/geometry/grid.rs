use super::{GeometryError, GoalEllipse, Point2, Segment};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Length of the 8-connected grid path from `start` to the first cell whose
/// center lies in `e`.
///
/// Cells touched by a wall are blocked and diagonal steps may not cut a
/// blocked corner. The cell holding `start` is always the source. The
/// octile metric overestimates Euclidean length by at most ~8.24%, so this
/// is only a bounded-error cross-check for the visibility-graph search.
pub fn grid_path_oracle(
    start: Point2,
    e: &GoalEllipse,
    walls: &[Segment],
    cell: f64,
) -> Result<f64, GeometryError> {
    if !(cell > 0.0) || !cell.is_finite() {
        return Err(GeometryError::InvalidArgument(format!(
            "cell size must be positive, got {cell}"
        )));
    }
    if e.contains(start) {
        return Ok(0.0);
    }
    let reach = e.semi_major();
    let mut lo = Point2::new(
        start.x.min(e.center().x - reach),
        start.y.min(e.center().y - reach),
    );
    let mut hi = Point2::new(
        start.x.max(e.center().x + reach),
        start.y.max(e.center().y + reach),
    );
    for w in walls {
        for p in [w.a, w.b] {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
    }
    let margin = 2.0 + 4.0 * cell;
    lo = lo - Point2::new(margin, margin);
    hi = hi + Point2::new(margin, margin);
    let nx = ((hi.x - lo.x) / cell).ceil() as usize;
    let ny = ((hi.y - lo.y) / cell).ceil() as usize;
    let idx = |i: usize, j: usize| j * nx + i;
    let center = |i: usize, j: usize| {
        Point2::new(lo.x + (i as f64 + 0.5) * cell, lo.y + (j as f64 + 0.5) * cell)
    };

    let mut blocked = vec![false; nx * ny];
    for w in walls {
        let to_i = |x: f64| (((x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
        let to_j = |y: f64| (((y - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
        let (i0, i1) = (to_i(w.a.x.min(w.b.x)), to_i(w.a.x.max(w.b.x)));
        let (j0, j1) = (to_j(w.a.y.min(w.b.y)), to_j(w.a.y.max(w.b.y)));
        for j in j0.saturating_sub(1)..=(j1 + 1).min(ny - 1) {
            for i in i0.saturating_sub(1)..=(i1 + 1).min(nx - 1) {
                // shared cell edges must coincide exactly; pad against rounding
                let pad = Point2::new(1e-9, 1e-9);
                let bl = Point2::new(lo.x + i as f64 * cell, lo.y + j as f64 * cell);
                let tr = Point2::new(lo.x + (i + 1) as f64 * cell, lo.y + (j + 1) as f64 * cell);
                if segment_hits_box(w, bl - pad, tr + pad) {
                    blocked[idx(i, j)] = true;
                }
            }
        }
    }

    let si = (((start.x - lo.x) / cell).floor() as usize).min(nx - 1);
    let sj = (((start.y - lo.y) / cell).floor() as usize).min(ny - 1);
    let source = idx(si, sj);
    blocked[source] = false;

    let mut dist = vec![f64::INFINITY; nx * ny];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    let diag = std::f64::consts::SQRT_2 * cell;
    while let Some(Entry(d, k)) = heap.pop() {
        if d > dist[k] {
            continue;
        }
        let (i, j) = (k % nx, k / nx);
        if e.contains(center(i, j)) {
            return Ok(d);
        }
        for (di, dj) in [
            (-1, 0),
            (1, 0),
            (0, -1),
            (0, 1),
            (-1, -1),
            (-1, 1),
            (1, -1),
            (1, 1),
        ] {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            if ni < 0 || nj < 0 || ni >= nx as isize || nj >= ny as isize {
                continue;
            }
            let (ni, nj) = (ni as usize, nj as usize);
            let nk = idx(ni, nj);
            if blocked[nk] {
                continue;
            }
            let step = if di != 0 && dj != 0 {
                if blocked[idx(ni, j)] || blocked[idx(i, nj)] {
                    continue;
                }
                diag
            } else {
                cell
            };
            let nd = d + step;
            if nd < dist[nk] {
                dist[nk] = nd;
                heap.push(Entry(nd, nk));
            }
        }
    }
    Err(GeometryError::Unreachable { x: start.x, y: start.y })
}

/// Liang-Barsky clip of a segment against a closed axis-aligned box.
fn segment_hits_box(s: &Segment, lo: Point2, hi: Point2) -> bool {
    let d = s.direction();
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [
        (-d.x, s.a.x - lo.x),
        (d.x, hi.x - s.a.x),
        (-d.y, s.a.y - lo.y),
        (d.y, hi.y - s.a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
