use super::{
    closest_point_on_ellipse, segment_intersects_walls, GeometryError, GoalEllipse, Point2,
    Segment, LENGTH_TIE_EPS,
};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const DEFAULT_ELLIPSE_SAMPLES: usize = 64;

/// Offset of the helper nodes placed next to wall endpoints.
const CORNER_NUDGE: f64 = 1e-7;

/// Mutual-visibility graph over query points and wall endpoints.
///
/// Besides the edge set, every node records the directions of the walls
/// incident to it. Where two or more walls meet, the directions split the
/// neighbourhood into sectors and a path may only turn at (or pass
/// through) the node within one sector; a closed corner cannot be slipped
/// through even though its walls are merely touched at their endpoints.
#[derive(Debug, Clone)]
pub struct VisibilityGraph {
    nodes: Vec<Point2>,
    adjacency: Vec<Vec<(usize, f64)>>,
    obstacles: Vec<Segment>,
    rays: Vec<Vec<f64>>,
}

impl VisibilityGraph {
    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn obstacles(&self) -> &[Segment] {
        &self.obstacles
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn adjacency(&self) -> &[Vec<(usize, f64)>] {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].iter().any(|&(k, _)| k == j)
    }

    /// Undirected edges as `(i, j, weight)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| {
            adj.iter()
                .filter(move |&&(j, _)| i < j)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Shortest distances from `source` honouring junction sectors.
    /// Returns per-node distance and the node path to each node.
    pub fn shortest_from(&self, source: usize) -> (Vec<f64>, impl Fn(usize) -> Vec<Point2> + '_) {
        let n = self.nodes.len();
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for r in &self.rays {
            let last = *offset.last().unwrap();
            offset.push(last + sector_count(r));
        }
        let states = offset[n];
        let mut owner = vec![0; states];
        for i in 0..n {
            owner[offset[i]..offset[i + 1]].fill(i);
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); states];
        for (i, j, w) in self.edges() {
            let si = offset[i] + sector_of(&self.rays[i], self.nodes[j] - self.nodes[i]);
            let sj = offset[j] + sector_of(&self.rays[j], self.nodes[i] - self.nodes[j]);
            adj[si].push((sj, w));
            adj[sj].push((si, w));
        }
        // a virtual root feeds every sector of the source node
        let root = states;
        adj.push((offset[source]..offset[source + 1]).map(|s| (s, 0.0)).collect());
        let (dist_s, prev_s) = dijkstra(&adj, root);
        let mut dist = vec![f64::INFINITY; n];
        let mut best_state = vec![None; n];
        for s in 0..states {
            let i = owner[s];
            if dist_s[s] < dist[i] {
                dist[i] = dist_s[s];
                best_state[i] = Some(s);
            }
        }
        let nodes = &self.nodes;
        let trace = move |target: usize| {
            let mut path = Vec::new();
            let mut at = best_state[target];
            while let Some(s) = at {
                if s == root {
                    break;
                }
                path.push(nodes[owner[s]]);
                at = prev_s[s];
            }
            path.reverse();
            path
        };
        (dist, trace)
    }
}

fn sector_count(rays: &[f64]) -> usize {
    rays.len().max(1)
}

/// Index of the sector containing direction `d` among sorted ray angles.
fn sector_of(rays: &[f64], d: Point2) -> usize {
    if rays.len() <= 1 {
        return 0;
    }
    let a = d.y.atan2(d.x);
    // sector k spans (rays[k], rays[k+1]); the last one wraps around
    match rays.iter().rposition(|&r| r < a) {
        Some(k) => k,
        None => rays.len() - 1,
    }
}

/// Directions of walls leaving `p`, sorted by angle.
fn incident_rays(p: Point2, walls: &[Segment]) -> Vec<f64> {
    let ang = |d: Point2| d.y.atan2(d.x);
    let mut rays = Vec::new();
    for w in walls {
        if w.a.dist(p) <= LENGTH_TIE_EPS {
            rays.push(ang(w.b - w.a));
        } else if w.b.dist(p) <= LENGTH_TIE_EPS {
            rays.push(ang(w.a - w.b));
        } else if w.distance_to(p) <= LENGTH_TIE_EPS {
            rays.push(ang(w.b - w.a));
            rays.push(ang(w.a - w.b));
        }
    }
    rays.sort_by(f64::total_cmp);
    rays
}

/// Points just off `p` on the bisector of every free sector around it, so
/// paths can run along a wall face (which the collinear-overlap rule blocks)
/// and then turn around the wall's end.
fn sector_nudges(p: Point2, rays: &[f64]) -> Vec<Point2> {
    use std::f64::consts::{PI, TAU};
    let at = |a: f64| p + Point2::new(a.cos(), a.sin()) * CORNER_NUDGE;
    match rays.len() {
        0 => Vec::new(),
        1 => vec![at(rays[0] + PI)],
        n => (0..n)
            .filter_map(|k| {
                let lo = rays[k];
                let hi = if k + 1 < n { rays[k + 1] } else { rays[0] + TAU };
                (hi - lo > 1e-9).then(|| at(0.5 * (lo + hi)))
            })
            .collect(),
    }
}

/// Nodes are `start`, then `targets` in order, then each distinct wall
/// endpoint not already present.
pub fn build_visibility_graph(
    start: Point2,
    targets: &[Point2],
    walls: &[Segment],
) -> VisibilityGraph {
    let mut nodes = Vec::with_capacity(1 + targets.len() + 2 * walls.len());
    nodes.push(start);
    nodes.extend_from_slice(targets);
    push_wall_endpoints(&mut nodes, walls);
    build_graph_with(nodes, walls, |s| !segment_intersects_walls(s, walls))
}

pub(crate) fn push_wall_endpoints(nodes: &mut Vec<Point2>, walls: &[Segment]) {
    for w in walls {
        for p in [w.a, w.b] {
            if !nodes.contains(&p) {
                nodes.push(p);
            }
        }
    }
}

/// Connects every node pair whose segment passes `visible` and does not
/// cross a closed wall junction in its interior.
pub(crate) fn build_graph_with(
    nodes: Vec<Point2>,
    obstacles: &[Segment],
    visible: impl Fn(&Segment) -> bool,
) -> VisibilityGraph {
    let n = nodes.len();
    let rays: Vec<Vec<f64>> = nodes.iter().map(|&p| incident_rays(p, obstacles)).collect();
    let junctions: Vec<usize> = (0..n).filter(|&k| rays[k].len() >= 2).collect();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = Segment::new(nodes[i], nodes[j]);
            if !visible(&s) {
                continue;
            }
            let slips = junctions.iter().any(|&k| {
                let q = nodes[k];
                q.dist(s.a) > LENGTH_TIE_EPS
                    && q.dist(s.b) > LENGTH_TIE_EPS
                    && s.distance_to(q) <= LENGTH_TIE_EPS
                    && sector_of(&rays[k], s.a - q) != sector_of(&rays[k], s.b - q)
            });
            if slips {
                continue;
            }
            let w = s.length();
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
    }
    VisibilityGraph {
        nodes,
        adjacency,
        obstacles: obstacles.to_vec(),
        rays,
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest distances and predecessor links.
pub fn dijkstra(adjacency: &[Vec<(usize, f64)>], source: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = adjacency.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, w) in &adjacency[node] {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                prev[next] = Some(node);
                heap.push(HeapEntry { dist: nd, node: next });
            }
        }
    }
    (dist, prev)
}

/// Picks the closest of `candidates` (node indices); ties within
/// [`LENGTH_TIE_EPS`] go to the earliest candidate.
fn best_target(dist: &[f64], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for c in candidates {
        if !dist[c].is_finite() {
            continue;
        }
        match best {
            Some(b) if dist[c] >= dist[b] - LENGTH_TIE_EPS => {}
            _ => best = Some(c),
        }
    }
    best
}

/// Shortest obstacle-avoiding path from `start` to the ellipse region.
///
/// The region is targeted through `n_samples` boundary points plus the
/// analytic closest boundary point. Besides the wall endpoints, the search
/// may turn at helper points [`CORNER_NUDGE`] away from them. Returns `(0, [start])` when `start`
/// already lies in the ellipse.
pub fn shortest_path_to_ellipse(
    start: Point2,
    e: &GoalEllipse,
    walls: &[Segment],
    n_samples: usize,
) -> Result<(f64, Vec<Point2>), GeometryError> {
    if n_samples < 8 {
        return Err(GeometryError::InvalidArgument(format!(
            "n_samples must be at least 8, got {n_samples}"
        )));
    }
    if e.contains(start) {
        return Ok((0.0, vec![start]));
    }
    let mut targets = e.sample_boundary(n_samples);
    let (closest, _) = closest_point_on_ellipse(start, e)?;
    targets.push(closest);
    let mut nodes = Vec::with_capacity(1 + targets.len() + 4 * walls.len());
    nodes.push(start);
    nodes.extend_from_slice(&targets);
    push_wall_endpoints(&mut nodes, walls);
    let mut corners = Vec::new();
    push_wall_endpoints(&mut corners, walls);
    for q in corners {
        nodes.extend(sector_nudges(q, &incident_rays(q, walls)));
    }
    let graph = build_graph_with(nodes, walls, |s| !segment_intersects_walls(s, walls));
    let (dist, trace) = graph.shortest_from(0);
    let best = best_target(&dist, 1..=targets.len())
        .ok_or(GeometryError::Unreachable { x: start.x, y: start.y })?;
    Ok((dist[best], trace(best)))
}

/// Shortest path between two points over a prebuilt node set.
/// `nodes[0]` is the source and `nodes[1]` the destination.
pub(crate) fn shortest_path_between(
    graph: &VisibilityGraph,
) -> Result<(f64, Vec<Point2>), GeometryError> {
    let nodes = graph.nodes();
    if nodes[0] == nodes[1] {
        return Ok((0.0, vec![nodes[0]]));
    }
    let (dist, trace) = graph.shortest_from(0);
    if !dist[1].is_finite() {
        return Err(GeometryError::Unreachable {
            x: nodes[0].x,
            y: nodes[0].y,
        });
    }
    Ok((dist[1], trace(1)))
}
