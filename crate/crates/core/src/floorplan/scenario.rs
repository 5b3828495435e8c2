//! Scenario documents.
//!
//! ```json
//! {
//!   "meta":   { "units": "meters", "format_version": 1 },
//!   "rooms":  [ { "id": "R1", "class": "common", "vertices": [[0,0],[4,0],[4,3],[0,3]] } ],
//!   "doors":  [ { "id": "D1", "endpoints": [[1,0],[2,0]], "room_a": "R1", "room_b": "outside" } ],
//!   "agents": [ { "id": "A1", "start": [2,1],
//!                 "goal_ellipses": [ { "center": [9,0], "semi_major": 2, "semi_minor": 1, "rotation": 0 } ],
//!                 "strategies": { "use_circulation_preference": false, "n_ellipse_samples": 64 },
//!                 "rng_seed": 0 } ]
//! }
//! ```
//!
//! Unknown keys are rejected anywhere in the document. Optional agent keys:
//! `speed` (m/s, default 1) and `known_classes` (room id -> class). When
//! `known_classes` is absent and circulation preference is on, the agent
//! recognises every room's class.

use super::{Door, DoorId, FloorPlan, Room, RoomClass, RoomId, ValidationIssue};
use crate::cogmap::StrategyConfig;
use crate::geometry::{GoalEllipse, Point2, Polygon, Segment};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}", format_issues(.0))]
    Invalid(Vec<ValidationIssue>),
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    let lines: Vec<String> = issues.iter().map(|i| format!("  {i}")).collect();
    format!("{} validation error(s):\n{}", issues.len(), lines.join("\n"))
}

impl ScenarioError {
    pub fn issues(&self) -> &[ValidationIssue] {
        match self {
            ScenarioError::Invalid(v) => v,
            ScenarioError::Parse { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: String,
    pub start: Point2,
    pub goal_ellipses: Vec<GoalEllipse>,
    pub strategy: StrategyConfig,
    pub rng_seed: u64,
    pub speed: f64,
    pub known_classes: Option<BTreeMap<RoomId, RoomClass>>,
}

impl AgentSpec {
    pub fn new(id: impl Into<String>, start: Point2, goal: GoalEllipse) -> Self {
        Self {
            id: id.into(),
            start,
            goal_ellipses: vec![goal],
            strategy: StrategyConfig::default(),
            rng_seed: 0,
            speed: 1.0,
            known_classes: None,
        }
    }

    /// Classes the agent can tell apart at the start of a run.
    pub fn initial_classes(&self, plan: &FloorPlan) -> BTreeMap<RoomId, RoomClass> {
        match &self.known_classes {
            Some(k) => k.clone(),
            None if self.strategy.use_circulation_preference => plan
                .rooms()
                .iter()
                .map(|r| (r.id.clone(), r.class))
                .collect(),
            None => BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plan: FloorPlan,
    pub agents: Vec<AgentSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaRecord {
    units: String,
    format_version: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomRecord {
    id: String,
    class: RoomClass,
    vertices: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DoorRecord {
    id: String,
    endpoints: [[f64; 2]; 2],
    room_a: String,
    room_b: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipseRecord {
    center: [f64; 2],
    semi_major: f64,
    semi_minor: f64,
    #[serde(default)]
    rotation: f64,
}

fn default_speed() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentRecord {
    id: String,
    start: [f64; 2],
    goal_ellipses: Vec<EllipseRecord>,
    #[serde(default)]
    strategies: StrategyConfig,
    #[serde(default)]
    rng_seed: u64,
    #[serde(default = "default_speed")]
    speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    known_classes: Option<BTreeMap<String, RoomClass>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioRecord {
    meta: MetaRecord,
    rooms: Vec<RoomRecord>,
    doors: Vec<DoorRecord>,
    #[serde(default)]
    agents: Vec<AgentRecord>,
}

pub fn parse_scenario_bytes(bytes: &[u8]) -> Result<Scenario, ScenarioError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let prefix = &bytes[..e.valid_up_to()];
        let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = prefix.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        ScenarioError::Parse {
            line,
            column,
            message: "invalid UTF-8".into(),
        }
    })?;
    parse_scenario(text)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let rec: ScenarioRecord = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_record(rec).map_err(ScenarioError::Invalid)
}

fn from_record(rec: ScenarioRecord) -> Result<Scenario, Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    if rec.meta.units != "meters" {
        issues.push(ValidationIssue::new(
            "meta",
            format!("units must be \"meters\", got {:?}", rec.meta.units),
        ));
    }
    if rec.meta.format_version != FORMAT_VERSION {
        issues.push(ValidationIssue::new(
            "meta",
            format!("unsupported format_version {}", rec.meta.format_version),
        ));
    }

    let mut rooms = Vec::new();
    for r in rec.rooms {
        let verts: Vec<Point2> = r.vertices.iter().map(|&v| v.into()).collect();
        match Polygon::new(verts) {
            Ok(boundary) => rooms.push(Room {
                id: RoomId(r.id),
                boundary,
                class: r.class,
            }),
            Err(e) => issues.push(ValidationIssue::new(&r.id, e.to_string())),
        }
    }
    let doors: Vec<Door> = rec
        .doors
        .into_iter()
        .map(|d| Door {
            id: DoorId(d.id),
            segment: Segment::new(d.endpoints[0].into(), d.endpoints[1].into()),
            room_a: RoomId(d.room_a),
            room_b: RoomId(d.room_b),
        })
        .collect();
    if !issues.is_empty() {
        return Err(issues);
    }
    let plan = FloorPlan::new(rooms, doors)?;

    let mut agents = Vec::new();
    let mut seen = BTreeSet::new();
    for a in rec.agents {
        let before = issues.len();
        if !seen.insert(a.id.clone()) {
            issues.push(ValidationIssue::new(&a.id, "duplicate agent id"));
        }
        let start: Point2 = a.start.into();
        if !start.is_finite() || plan.locate_room(start).is_err() {
            issues.push(ValidationIssue::new(&a.id, format!("start {start} is outside all rooms")));
        }
        if a.goal_ellipses.is_empty() {
            issues.push(ValidationIssue::new(&a.id, "needs at least one goal ellipse"));
        }
        let mut goals = Vec::new();
        for (k, e) in a.goal_ellipses.iter().enumerate() {
            match GoalEllipse::new(e.center.into(), e.semi_major, e.semi_minor, e.rotation) {
                Ok(g) => goals.push(g),
                Err(err) => issues.push(ValidationIssue::new(
                    format!("{}.goal_ellipses[{k}]", a.id),
                    err.to_string(),
                )),
            }
        }
        if a.strategies.n_ellipse_samples < 8 {
            issues.push(ValidationIssue::new(
                &a.id,
                format!(
                    "n_ellipse_samples must be at least 8, got {}",
                    a.strategies.n_ellipse_samples
                ),
            ));
        }
        if !(a.speed > 0.0) || !a.speed.is_finite() {
            issues.push(ValidationIssue::new(&a.id, format!("speed must be positive, got {}", a.speed)));
        }
        let known_classes = a.known_classes.map(|k| {
            k.into_iter()
                .map(|(room, class)| {
                    let id = RoomId(room);
                    if plan.room(&id).is_none() {
                        issues.push(ValidationIssue::new(
                            &a.id,
                            format!("known_classes references unknown room {id}"),
                        ));
                    }
                    (id, class)
                })
                .collect()
        });
        if issues.len() == before {
            agents.push(AgentSpec {
                id: a.id,
                start,
                goal_ellipses: goals,
                strategy: a.strategies,
                rng_seed: a.rng_seed,
                speed: a.speed,
                known_classes,
            });
        }
    }
    if !issues.is_empty() {
        return Err(issues);
    }
    Ok(Scenario { plan, agents })
}

fn to_record(s: &Scenario) -> ScenarioRecord {
    ScenarioRecord {
        meta: MetaRecord {
            units: "meters".into(),
            format_version: FORMAT_VERSION,
        },
        rooms: s
            .plan
            .rooms()
            .iter()
            .map(|r| RoomRecord {
                id: r.id.0.clone(),
                class: r.class,
                vertices: r.boundary.vertices().iter().map(|&p| p.into()).collect(),
            })
            .collect(),
        doors: s
            .plan
            .doors()
            .iter()
            .map(|d| DoorRecord {
                id: d.id.0.clone(),
                endpoints: [d.segment.a.into(), d.segment.b.into()],
                room_a: d.room_a.0.clone(),
                room_b: d.room_b.0.clone(),
            })
            .collect(),
        agents: s
            .agents
            .iter()
            .map(|a| AgentRecord {
                id: a.id.clone(),
                start: a.start.into(),
                goal_ellipses: a
                    .goal_ellipses
                    .iter()
                    .map(|e| EllipseRecord {
                        center: e.center().into(),
                        semi_major: e.semi_major(),
                        semi_minor: e.semi_minor(),
                        rotation: e.rotation(),
                    })
                    .collect(),
                strategies: a.strategy.clone(),
                rng_seed: a.rng_seed,
                speed: a.speed,
                known_classes: a
                    .known_classes
                    .as_ref()
                    .map(|k| k.iter().map(|(r, c)| (r.0.clone(), *c)).collect()),
            })
            .collect(),
    }
}

/// Pretty-printed scenario document; parses back to an equal [`Scenario`].
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&to_record(s)).expect("scenario is serialisable");
    out.push('\n');
    out
}
