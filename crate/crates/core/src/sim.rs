//! Run engine: constant-speed waypoint following, door transitions, and
//! trajectory and decision recording.

use crate::cogmap::{CogMapError, CognitiveMap};
use crate::floorplan::{AgentSpec, Door, FloorPlan, FloorPlanError, Room, RoomId};
use crate::geometry::{GeometryError, Point2};
use crate::wayfinding::{next_decision, Decision, Mode, WayfindingError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt::Write as _;

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid run parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    FloorPlan(#[from] FloorPlanError),
    #[error("cannot walk inside room {room}: {source}")]
    Unwalkable { room: RoomId, source: GeometryError },
    #[error(transparent)]
    Wayfinding(WayfindingError),
    #[error(transparent)]
    CogMap(#[from] CogMapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub dt: f64,
    pub step_limit: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Exited,
    NoRoute,
    StepLimit,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Exited => "exited",
            Outcome::NoRoute => "no_route",
            Outcome::StepLimit => "step_limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    EnterRoom,
    ChooseDoor,
    Backtrack,
    ReachEllipse,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub room: RoomId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.samples.iter().map(|s| Point2::new(s.x, s.y))
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Polyline length through all samples.
    pub fn polyline_length(&self) -> f64 {
        let pts: Vec<Point2> = self.points().collect();
        pts.windows(2).map(|w| w[0].dist(w[1])).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub agent_id: String,
    pub outcome: Outcome,
    /// Room sequence: the start room, then each room as it is entered.
    pub rooms_visited: Vec<RoomId>,
    pub path_length: f64,
    pub decisions: Vec<Decision>,
    pub trajectory: Trajectory,
}

impl RunResult {
    pub fn backtracks(&self) -> usize {
        self.trajectory.count(EventKind::Backtrack)
    }

    /// `outcome=exited path_length=12.345 rooms=S>C>E backtracks=0`
    pub fn summary_line(&self) -> String {
        let rooms: Vec<&str> = self.rooms_visited.iter().map(|r| r.as_str()).collect();
        format!(
            "agent={} outcome={} path_length={:.3} rooms={} backtracks={}",
            self.agent_id,
            self.outcome.as_str(),
            self.path_length,
            rooms.join(">"),
            self.backtracks()
        )
    }

    /// Trajectory as CSV with columns `t,x,y,room_id`.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("t,x,y,room_id\n");
        for s in &self.trajectory.samples {
            let _ = writeln!(out, "{:.6},{:.9},{:.9},{}", s.t, s.x, s.y, s.room);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: String,
    pub position: Point2,
    pub speed: f64,
    pub current_room: RoomId,
    pub map: CognitiveMap,
    pub waypoints: VecDeque<Point2>,
}

impl AgentState {
    pub fn new(plan: &FloorPlan, spec: &AgentSpec) -> Result<Self, SimError> {
        let room = plan.locate_room(spec.start)?;
        let map = CognitiveMap::new(
            room.clone(),
            spec.goal_ellipses.clone(),
            spec.initial_classes(plan),
            spec.strategy.clone(),
        );
        Ok(Self {
            id: spec.id.clone(),
            position: spec.start,
            speed: spec.speed,
            current_room: room,
            map,
            waypoints: VecDeque::new(),
        })
    }

    pub fn decide(&self, plan: &FloorPlan) -> Result<Decision, WayfindingError> {
        next_decision(&self.current_room, plan, &self.map, self.position)
    }
}

/// In-room walk from `from` to `to`, both inside `room` or on its doorways.
pub fn plan_waypoints(
    from: Point2,
    to: Point2,
    room: &Room,
    doors: &[Door],
) -> Result<Vec<Point2>, GeometryError> {
    crate::floorplan::room_path(room, doors, from, to).map(|(_, path)| path)
}

struct Recorder {
    steps: u64,
    dt: f64,
    trajectory: Trajectory,
    path_length: f64,
}

impl Recorder {
    fn t(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    fn sample(&mut self, p: Point2, room: &RoomId) {
        self.trajectory.samples.push(Sample {
            t: self.t(),
            x: p.x,
            y: p.y,
            room: room.clone(),
        });
    }

    fn event(&mut self, kind: EventKind, detail: impl Into<String>) {
        let t = self.t();
        self.trajectory.events.push(Event {
            t,
            kind,
            detail: detail.into(),
        });
    }
}

/// Runs one agent until it leaves the building, runs out of options or hits
/// the step limit.
pub fn run_agent(
    plan: &FloorPlan,
    spec: &AgentSpec,
    params: &RunParams,
) -> Result<RunResult, SimError> {
    if !(params.dt > 0.0) || !params.dt.is_finite() {
        return Err(SimError::InvalidParams(format!("dt must be positive, got {}", params.dt)));
    }
    if !(spec.speed > 0.0) || !spec.speed.is_finite() {
        return Err(SimError::InvalidParams(format!(
            "speed must be positive, got {}",
            spec.speed
        )));
    }
    let mut st = AgentState::new(plan, spec)?;
    let mut rec = Recorder {
        steps: 0,
        dt: params.dt,
        trajectory: Trajectory::default(),
        path_length: 0.0,
    };
    let mut rooms_visited = vec![st.current_room.clone()];
    let mut decisions = Vec::new();
    rec.sample(st.position, &st.current_room);
    rec.event(EventKind::EnterRoom, st.current_room.as_str());
    let total_goals = st.map.goal_ellipses.len();
    let mut reached = 0;
    check_goal(&mut st, &mut rec, &mut reached, total_goals);

    let step_budget = st.speed * params.dt;
    let outcome = 'run: loop {
        let decision = match st.decide(plan) {
            Ok(d) => d,
            Err(WayfindingError::NoRouteFound(_)) => break 'run Outcome::NoRoute,
            Err(e) => return Err(SimError::Wayfinding(e)),
        };
        let door = plan
            .door(&decision.chosen)
            .expect("decisions name doors of the plan")
            .clone();
        let kind = match decision.mode {
            Mode::Backtrack => EventKind::Backtrack,
            Mode::Directed | Mode::Explore => EventKind::ChooseDoor,
        };
        rec.event(kind, door.id.as_str());
        let mode = decision.mode;
        decisions.push(decision);

        let room = plan
            .room(&st.current_room)
            .ok_or_else(|| FloorPlanError::UnknownRoom(st.current_room.clone()))?;
        let doors: Vec<Door> = plan.doors_of(&room.id).into_iter().cloned().collect();
        let path = plan_waypoints(st.position, door.midpoint(), room, &doors).map_err(|e| {
            SimError::Unwalkable {
                room: room.id.clone(),
                source: e,
            }
        })?;
        st.waypoints = path.into_iter().skip(1).collect();

        while let Some(&wp) = st.waypoints.front() {
            let d = st.position.dist(wp);
            if d <= 1e-12 {
                st.position = wp;
                st.waypoints.pop_front();
                continue;
            }
            if rec.steps >= params.step_limit {
                break 'run Outcome::StepLimit;
            }
            rec.steps += 1;
            // stop at every waypoint so each tick moves along one straight edge
            let next = if d <= step_budget {
                st.waypoints.pop_front();
                wp
            } else {
                st.position.lerp(wp, step_budget / d)
            };
            rec.path_length += st.position.dist(next);
            st.position = next;
            rec.sample(st.position, &st.current_room);
            check_goal(&mut st, &mut rec, &mut reached, total_goals);
        }

        if door.is_exit() {
            rec.event(EventKind::Exit, door.id.as_str());
            break 'run Outcome::Exited;
        }
        let next_room = door
            .other_side(&st.current_room)
            .expect("chosen door belongs to the current room")
            .clone();
        if mode == Mode::Backtrack {
            st.map.pop_entry()?;
        } else {
            st.map.record_entry(next_room.clone(), door.id.clone());
        }
        st.current_room = next_room;
        rec.event(EventKind::EnterRoom, st.current_room.as_str());
        rooms_visited.push(st.current_room.clone());
    };

    Ok(RunResult {
        agent_id: st.id,
        outcome,
        rooms_visited,
        path_length: rec.path_length,
        decisions,
        trajectory: rec.trajectory,
    })
}

/// Emits `reach_ellipse` once per goal and moves on to the next goal, if any.
fn check_goal(st: &mut AgentState, rec: &mut Recorder, reached: &mut usize, total: usize) {
    if *reached == total || !st.map.is_goal_reached(st.position) {
        return;
    }
    rec.event(EventKind::ReachEllipse, format!("goal {}", *reached));
    *reached += 1;
    st.map.advance_goal();
}

/// Independent runs in parallel; results keep the input order.
pub fn run_batch(
    runs: &[(&FloorPlan, &AgentSpec)],
    params: &RunParams,
) -> Vec<Result<RunResult, SimError>> {
    runs.par_iter()
        .map(|(plan, spec)| run_agent(plan, spec, params))
        .collect()
}
