use super::{DoorId, FloorPlan, FloorPlanError, RoomId};
use crate::geometry::{dijkstra, Point2};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NavNode {
    Door(DoorId),
    /// Stand-in for "somewhere in this room", placed at an interior point.
    Room(RoomId),
}

/// Full-knowledge routing graph: door midpoints linked through the rooms
/// they share, weighted by in-room shortest path length.
///
/// Agents never consult it; it serves as a global-knowledge baseline.
#[derive(Debug, Clone)]
pub struct NavGraph {
    nodes: Vec<NavNode>,
    positions: Vec<Point2>,
    adjacency: Vec<Vec<(usize, f64)>>,
    index: BTreeMap<NavNode, usize>,
}

impl NavGraph {
    pub fn build(plan: &FloorPlan) -> Result<Self, FloorPlanError> {
        let mut g = NavGraph {
            nodes: Vec::new(),
            positions: Vec::new(),
            adjacency: Vec::new(),
            index: BTreeMap::new(),
        };
        for d in plan.doors() {
            g.add_node(NavNode::Door(d.id.clone()), d.midpoint());
        }
        for r in plan.rooms() {
            let anchor = r.boundary.interior_point();
            let rn = g.add_node(NavNode::Room(r.id.clone()), anchor);
            let doors = plan.doors_of(&r.id);
            for (i, d) in doors.iter().enumerate() {
                let di = g.index[&NavNode::Door(d.id.clone())];
                let (w, _) = plan.room_path(&r.id, anchor, d.midpoint())?;
                g.add_edge(rn, di, w);
                for e in &doors[i + 1..] {
                    let ei = g.index[&NavNode::Door(e.id.clone())];
                    let (w, _) = plan.room_path(&r.id, d.midpoint(), e.midpoint())?;
                    g.add_edge(di, ei, w);
                }
            }
        }
        Ok(g)
    }

    fn add_node(&mut self, n: NavNode, p: Point2) -> usize {
        let i = self.nodes.len();
        self.index.insert(n.clone(), i);
        self.nodes.push(n);
        self.positions.push(p);
        self.adjacency.push(Vec::new());
        i
    }

    fn add_edge(&mut self, a: usize, b: usize, w: f64) {
        // two rooms may both link the same door pair; keep the shorter
        if let Some(e) = self.adjacency[a].iter_mut().find(|(k, _)| *k == b) {
            if w < e.1 {
                e.1 = w;
                if let Some(r) = self.adjacency[b].iter_mut().find(|(k, _)| *k == a) {
                    r.1 = w;
                }
            }
            return;
        }
        self.adjacency[a].push((b, w));
        self.adjacency[b].push((a, w));
    }

    pub fn nodes(&self) -> &[NavNode] {
        &self.nodes
    }

    pub fn position(&self, n: &NavNode) -> Option<Point2> {
        self.index.get(n).map(|&i| self.positions[i])
    }

    pub fn weight(&self, a: &NavNode, b: &NavNode) -> Option<f64> {
        let (ia, ib) = (*self.index.get(a)?, *self.index.get(b)?);
        self.adjacency[ia].iter().find(|(k, _)| *k == ib).map(|&(_, w)| w)
    }

    /// Undirected edges as `(a, b, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (&NavNode, &NavNode, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(move |(i, adj)| {
            adj.iter()
                .filter(move |(j, _)| i < *j)
                .map(move |&(j, w)| (&self.nodes[i], &self.nodes[j], w))
        })
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let (dist, _) = dijkstra(&self.adjacency, 0);
        dist.iter().all(|d| d.is_finite())
    }

    /// Length and door sequence of the shortest route from the room anchor
    /// to any exit door midpoint.
    pub fn shortest_exit_route(
        &self,
        plan: &FloorPlan,
        from: &RoomId,
    ) -> Option<(f64, Vec<DoorId>)> {
        let src = *self.index.get(&NavNode::Room(from.clone()))?;
        let (dist, prev) = dijkstra(&self.adjacency, src);
        let (best, len) = plan
            .exit_door_ids()
            .iter()
            .filter_map(|id| {
                let i = self.index[&NavNode::Door(id.clone())];
                dist[i].is_finite().then_some((i, dist[i]))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        let mut doors = Vec::new();
        let mut at = Some(best);
        while let Some(i) = at {
            if let NavNode::Door(d) = &self.nodes[i] {
                doors.push(d.clone());
            }
            at = prev[i];
        }
        doors.reverse();
        Some((len, doors))
    }
}
