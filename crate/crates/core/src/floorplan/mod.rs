//! The building: rooms, doorways between them, room classes and the
//! scenario file format.

mod navgraph;
mod scenario;

use crate::geometry::{
    build_graph_with, segment_intersects_walls, shortest_path_between, GeometryError, Point2,
    Polygon, Segment, LENGTH_TIE_EPS,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

pub use navgraph::{NavGraph, NavNode};
pub use scenario::{
    parse_scenario, parse_scenario_bytes, serialize_scenario, AgentSpec, Scenario, ScenarioError,
    FORMAT_VERSION,
};

/// Tolerance for a door lying on a room boundary.
pub const DOOR_ON_BOUNDARY_EPS: f64 = 1e-6;

/// Inward offset of the auxiliary nodes used for in-room routing.
const NUDGE: f64 = 1e-6;

macro_rules! string_id {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

string_id!(RoomId);
string_id!(DoorId);

impl RoomId {
    /// Reserved id of the pseudo-room beyond the exit doors.
    pub const OUTSIDE: &'static str = "outside";

    pub fn outside() -> Self {
        RoomId(Self::OUTSIDE.to_owned())
    }

    pub fn is_outside(&self) -> bool {
        self.0 == Self::OUTSIDE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoomClass {
    /// Corridors, lobbies, stairs: rooms that serve movement.
    Circulation,
    /// Offices, store rooms and any other room with a dedicated use.
    Common,
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: RoomId,
    pub boundary: Polygon,
    pub class: RoomClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Door {
    pub id: DoorId,
    pub segment: Segment,
    pub room_a: RoomId,
    /// Another room or [`RoomId::OUTSIDE`].
    pub room_b: RoomId,
}

impl Door {
    pub fn midpoint(&self) -> Point2 {
        self.segment.midpoint()
    }

    pub fn is_exit(&self) -> bool {
        self.room_b.is_outside()
    }

    pub fn connects(&self, room: &RoomId) -> bool {
        &self.room_a == room || &self.room_b == room
    }

    /// The room on the far side when entering from `room`.
    pub fn other_side(&self, room: &RoomId) -> Option<&RoomId> {
        if &self.room_a == room {
            Some(&self.room_b)
        } else if &self.room_b == room {
            Some(&self.room_a)
        } else {
            None
        }
    }
}

/// One broken invariant, tied to the entity that breaks it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub entity: String,
    pub reason: String,
}

impl ValidationIssue {
    pub fn new(entity: impl fmt::Display, reason: impl Into<String>) -> Self {
        Self {
            entity: entity.to_string(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.reason)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FloorPlanError {
    #[error("point ({x}, {y}) lies outside all rooms")]
    OutsideAllRooms { x: f64, y: f64 },
    #[error("unknown room {0}")]
    UnknownRoom(RoomId),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A validated, immutable building model.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorPlan {
    rooms: Vec<Room>,
    doors: Vec<Door>,
    exit_door_ids: Vec<DoorId>,
    room_index: BTreeMap<RoomId, usize>,
    door_index: BTreeMap<DoorId, usize>,
}

impl FloorPlan {
    /// Checks every room, door and plan-level invariant and reports all
    /// violations found.
    pub fn new(rooms: Vec<Room>, doors: Vec<Door>) -> Result<Self, Vec<ValidationIssue>> {
        let mut issues = Vec::new();
        let mut room_index = BTreeMap::new();
        for (i, r) in rooms.iter().enumerate() {
            if r.id.as_str().is_empty() {
                issues.push(ValidationIssue::new(format!("room #{i}"), "empty id"));
            } else if r.id.is_outside() || r.class == RoomClass::Outside {
                issues.push(ValidationIssue::new(
                    &r.id,
                    "the outside is implicit; reference it as \"outside\" from exit doors",
                ));
            }
            if room_index.insert(r.id.clone(), i).is_some() {
                issues.push(ValidationIssue::new(&r.id, "duplicate room id"));
            }
        }
        for i in 0..rooms.len() {
            for j in (i + 1)..rooms.len() {
                if rooms[i].boundary.interiors_overlap(&rooms[j].boundary) {
                    issues.push(ValidationIssue::new(
                        &rooms[i].id,
                        format!("interior overlaps room {}", rooms[j].id),
                    ));
                }
            }
        }

        let mut door_index = BTreeMap::new();
        let mut doors = doors;
        for (i, d) in doors.iter_mut().enumerate() {
            if d.id.as_str().is_empty() {
                issues.push(ValidationIssue::new(format!("door #{i}"), "empty id"));
            }
            if door_index.insert(d.id.clone(), i).is_some() {
                issues.push(ValidationIssue::new(&d.id, "duplicate door id"));
            }
            if d.room_a.is_outside() {
                std::mem::swap(&mut d.room_a, &mut d.room_b);
            }
            if d.room_a == d.room_b {
                issues.push(ValidationIssue::new(&d.id, "connects a room to itself"));
            }
            if !d.segment.a.is_finite() || !d.segment.b.is_finite() {
                issues.push(ValidationIssue::new(&d.id, "non-finite endpoint"));
                continue;
            }
            if d.segment.length() <= LENGTH_TIE_EPS {
                issues.push(ValidationIssue::new(&d.id, "zero-length doorway"));
                continue;
            }
            for side in [&d.room_a, &d.room_b] {
                if side.is_outside() {
                    continue;
                }
                match room_index.get(side) {
                    None => issues.push(ValidationIssue::new(
                        &d.id,
                        format!("references unknown room {side}"),
                    )),
                    Some(&ri) => {
                        let covered = boundary_coverage(&d.segment, &rooms[ri].boundary);
                        if covered < d.segment.length() - DOOR_ON_BOUNDARY_EPS {
                            issues.push(ValidationIssue::new(
                                &d.id,
                                format!("does not lie on the boundary of room {side}"),
                            ));
                        }
                    }
                }
            }
        }
        for i in 0..doors.len() {
            for j in (i + 1)..doors.len() {
                let shared = doors[i].connects(&doors[j].room_a)
                    || doors[i].connects(&doors[j].room_b);
                if shared && collinear_overlap(&doors[i].segment, &doors[j].segment) > LENGTH_TIE_EPS
                {
                    issues.push(ValidationIssue::new(
                        &doors[i].id,
                        format!("overlaps door {}", doors[j].id),
                    ));
                }
            }
        }

        if issues.is_empty() {
            if let Some(r) = disconnected_room(&rooms, &doors) {
                issues.push(ValidationIssue::new(r, "not connected to the rest of the plan"));
            }
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        let mut exit_door_ids: Vec<DoorId> =
            doors.iter().filter(|d| d.is_exit()).map(|d| d.id.clone()).collect();
        exit_door_ids.sort();
        Ok(FloorPlan {
            rooms,
            doors,
            exit_door_ids,
            room_index,
            door_index,
        })
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn doors(&self) -> &[Door] {
        &self.doors
    }

    pub fn exit_door_ids(&self) -> &[DoorId] {
        &self.exit_door_ids
    }

    pub fn room(&self, id: &RoomId) -> Option<&Room> {
        self.room_index.get(id).map(|&i| &self.rooms[i])
    }

    pub fn door(&self, id: &DoorId) -> Option<&Door> {
        self.door_index.get(id).map(|&i| &self.doors[i])
    }

    pub fn class_of(&self, id: &RoomId) -> Option<RoomClass> {
        if id.is_outside() {
            Some(RoomClass::Outside)
        } else {
            self.room(id).map(|r| r.class)
        }
    }

    /// Doors incident to `room`, ordered by id.
    pub fn doors_of(&self, room: &RoomId) -> Vec<&Door> {
        let mut v: Vec<&Door> = self.doors.iter().filter(|d| d.connects(room)).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    pub fn walls_of(&self, room: &RoomId) -> Result<Vec<Segment>, FloorPlanError> {
        let r = self
            .room(room)
            .ok_or_else(|| FloorPlanError::UnknownRoom(room.clone()))?;
        let doors: Vec<Door> = self.doors_of(room).into_iter().cloned().collect();
        Ok(walls_of(r, &doors))
    }

    /// Every wall segment of every room.
    pub fn all_walls(&self) -> Vec<Segment> {
        self.rooms
            .iter()
            .flat_map(|r| {
                let doors: Vec<Door> = self.doors_of(&r.id).into_iter().cloned().collect();
                walls_of(r, &doors)
            })
            .collect()
    }

    pub fn locate_room(&self, p: Point2) -> Result<RoomId, FloorPlanError> {
        locate_room(p, self)
    }

    /// Shortest path between two points of the same room that stays inside
    /// it, with its walls and doorways as obstacles.
    pub fn room_path(
        &self,
        room: &RoomId,
        from: Point2,
        to: Point2,
    ) -> Result<(f64, Vec<Point2>), FloorPlanError> {
        let r = self
            .room(room)
            .ok_or_else(|| FloorPlanError::UnknownRoom(room.clone()))?;
        let doors: Vec<Door> = self.doors_of(room).into_iter().cloned().collect();
        Ok(room_path(r, &doors, from, to)?)
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        let mut it = self.rooms.iter().map(|r| r.boundary.bbox());
        let first = it.next().unwrap_or_default();
        it.fold(first, |(lo, hi), (l, h)| {
            (
                Point2::new(lo.x.min(l.x), lo.y.min(l.y)),
                Point2::new(hi.x.max(h.x), hi.y.max(h.y)),
            )
        })
    }

    /// The same plan with every coordinate multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> FloorPlan {
        let mut out = self.clone();
        for r in &mut out.rooms {
            r.boundary = r.boundary.scaled(s);
        }
        for d in &mut out.doors {
            d.segment = Segment::new(d.segment.a * s, d.segment.b * s);
        }
        out
    }
}

/// Length of `door` covered by collinear boundary edges of `poly`.
fn boundary_coverage(door: &Segment, poly: &Polygon) -> f64 {
    poly.edges()
        .filter(|e| {
            e.distance_to_line(door.a) <= DOOR_ON_BOUNDARY_EPS
                && e.distance_to_line(door.b) <= DOOR_ON_BOUNDARY_EPS
        })
        .map(|e| collinear_overlap(door, &e))
        .sum()
}

/// Overlap length of two segments assumed to share a carrier line.
fn collinear_overlap(s: &Segment, t: &Segment) -> f64 {
    if s.distance_to_line(t.a) > DOOR_ON_BOUNDARY_EPS || s.distance_to_line(t.b) > DOOR_ON_BOUNDARY_EPS
    {
        return 0.0;
    }
    let (t0, t1) = (s.project(t.a), s.project(t.b));
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    ((hi.min(1.0) - lo.max(0.0)) * s.length()).max(0.0)
}

impl Segment {
    fn distance_to_line(&self, p: Point2) -> f64 {
        let d = self.direction();
        (p - self.a).cross(d).abs() / d.norm()
    }
}

/// First room (by id) not reachable from the others through doors.
fn disconnected_room(rooms: &[Room], doors: &[Door]) -> Option<RoomId> {
    let mut ids: Vec<&RoomId> = rooms.iter().map(|r| &r.id).collect();
    ids.sort();
    let first = *ids.first()?;
    let mut adj: BTreeMap<&RoomId, Vec<&RoomId>> = BTreeMap::new();
    for d in doors {
        adj.entry(&d.room_a).or_default().push(&d.room_b);
        adj.entry(&d.room_b).or_default().push(&d.room_a);
    }
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(r) = queue.pop_front() {
        for &n in adj.get(r).into_iter().flatten() {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    ids.into_iter().find(|r| !seen.contains(r)).cloned()
}

/// Boundary of `room` with the doorway gaps cut out.
pub fn walls_of(room: &Room, doors: &[Door]) -> Vec<Segment> {
    let mut walls = Vec::new();
    for edge in room.boundary.edges() {
        // (t_start, p_start, t_end, p_end) per doorway lying on this edge
        let mut gaps: Vec<(f64, Point2, f64, Point2)> = doors
            .iter()
            .filter(|d| d.connects(&room.id))
            .filter(|d| collinear_overlap(&edge, &d.segment) > LENGTH_TIE_EPS)
            .map(|d| {
                let (mut ta, mut pa) = (edge.project(d.segment.a), d.segment.a);
                let (mut tb, mut pb) = (edge.project(d.segment.b), d.segment.b);
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                    std::mem::swap(&mut pa, &mut pb);
                }
                if ta <= 0.0 {
                    (ta, pa) = (0.0, edge.a);
                }
                if tb >= 1.0 {
                    (tb, pb) = (1.0, edge.b);
                }
                (ta, pa, tb, pb)
            })
            .collect();
        gaps.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (mut t, mut p) = (0.0, edge.a);
        for (ga, pa, gb, pb) in gaps {
            if (ga - t) * edge.length() > LENGTH_TIE_EPS {
                walls.push(Segment::new(p, pa));
            }
            if gb > t {
                (t, p) = (gb, pb);
            }
        }
        if (1.0 - t) * edge.length() > LENGTH_TIE_EPS {
            walls.push(Segment::new(p, edge.b));
        }
    }
    walls
}

/// Doors incident to `room`, ordered by id.
pub fn doors_of<'a>(room: &Room, plan: &'a FloorPlan) -> Vec<&'a Door> {
    plan.doors_of(&room.id)
}

/// The room containing `p`; boundary points go to the smallest room id.
pub fn locate_room(p: Point2, plan: &FloorPlan) -> Result<RoomId, FloorPlanError> {
    plan.rooms
        .iter()
        .filter(|r| r.boundary.contains(p))
        .map(|r| &r.id)
        .min()
        .cloned()
        .ok_or(FloorPlanError::OutsideAllRooms { x: p.x, y: p.y })
}

/// In-room shortest path. Doorways count as obstacles so the path cannot
/// leave the room; auxiliary nodes nudged just inside the boundary let it
/// run parallel to walls, which the collinear-overlap rule otherwise blocks.
pub fn room_path(
    room: &Room,
    doors: &[Door],
    from: Point2,
    to: Point2,
) -> Result<(f64, Vec<Point2>), GeometryError> {
    let poly = &room.boundary;
    if !poly.contains(from) || !poly.contains(to) {
        let p = if poly.contains(from) { to } else { from };
        return Err(GeometryError::Unreachable { x: p.x, y: p.y });
    }
    if from == to {
        return Ok((0.0, vec![from]));
    }
    let walls = walls_of(room, doors);
    let mut obstacles = walls.clone();
    obstacles.extend(doors.iter().filter(|d| d.connects(&room.id)).map(|d| d.segment));

    let mut nodes = vec![from, to];
    let mut aux = Vec::new();
    for w in &walls {
        for q in [w.a, w.b] {
            if nodes.contains(&q) {
                continue;
            }
            nodes.push(q);
            let dir = match poly.vertices().iter().position(|v| v.dist(q) <= LENGTH_TIE_EPS) {
                Some(i) => poly.inward_bisector(i),
                None => inward_normal_at(poly, q),
            };
            aux.push(q + dir * NUDGE);
        }
    }
    for d in doors.iter().filter(|d| d.connects(&room.id)) {
        let m = d.midpoint();
        aux.push(m + inward_normal_at(poly, m) * NUDGE);
    }
    nodes.extend(aux.into_iter().filter(|&q| poly.contains_strictly(q)));

    let graph = build_graph_with(nodes, &obstacles, |s| {
        !segment_intersects_walls(s, &obstacles) && poly.contains_segment(s)
    });
    shortest_path_between(&graph)
}

/// Left normal of the boundary edge nearest to `p` (interior side for CCW).
fn inward_normal_at(poly: &Polygon, p: Point2) -> Point2 {
    poly.edges()
        .min_by(|a, b| a.distance_to(p).total_cmp(&b.distance_to(p)))
        .map(|e| e.direction().normalized().perp())
        .unwrap_or_default()
}
