//! Door choice: score the doorways of the current room against the goal
//! region, apply the strategy order, and fall back to exploration or
//! backtracking.

use crate::cogmap::{CognitiveMap, StrategyConfig};
use crate::floorplan::{DoorId, FloorPlan, FloorPlanError, RoomId};
use crate::geometry::{shortest_path_to_ellipse, Point2, LENGTH_TIE_EPS};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum WayfindingError {
    #[error("no route found from room {0}")]
    NoRouteFound(RoomId),
    #[error("agent has no goal ellipse")]
    NoGoal,
    #[error(transparent)]
    FloorPlan(#[from] FloorPlanError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Directed,
    Explore,
    Backtrack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoorScore {
    pub door: DoorId,
    pub leads_to: RoomId,
    /// Door midpoint to goal region with the current room's walls as the
    /// only obstacles. Infinite (null in dumps) when unreachable.
    #[serde(with = "inf_as_null")]
    pub path_len: f64,
    pub leads_to_circulation: bool,
    pub visited_target: bool,
    /// `min path_len / path_len` over the room's doors.
    pub weight: f64,
    /// In-room walk from the agent to the door midpoint, when computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approach: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub room: RoomId,
    pub chosen: DoorId,
    pub mode: Mode,
    pub all_scores: Vec<DoorScore>,
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Scores every door of `room` against the current goal.
pub fn score_doors(
    room: &RoomId,
    plan: &FloorPlan,
    map: &CognitiveMap,
    agent_pos: Point2,
) -> Result<Vec<DoorScore>, WayfindingError> {
    let goal = map.current_goal().ok_or(WayfindingError::NoGoal)?;
    let walls = plan.walls_of(room)?;
    let cfg = &map.strategy;
    let mut scores = Vec::new();
    for d in plan.doors_of(room) {
        let leads_to = d.other_side(room).cloned().unwrap_or_else(RoomId::outside);
        let path_len = shortest_path_to_ellipse(d.midpoint(), goal, &walls, cfg.n_ellipse_samples)
            .map_or(f64::INFINITY, |(len, _)| len);
        let approach = if cfg.include_approach_distance {
            Some(plan.room_path(room, agent_pos, d.midpoint())?.0)
        } else {
            None
        };
        scores.push(DoorScore {
            door: d.id.clone(),
            leads_to_circulation: map.leads_to_circulation(&leads_to),
            visited_target: map.is_visited(&leads_to),
            leads_to,
            path_len,
            weight: 0.0,
            approach,
        });
    }
    fill_weights(&mut scores);
    Ok(scores)
}

fn fill_weights(scores: &mut [DoorScore]) {
    let min = scores.iter().map(|s| s.path_len).fold(f64::INFINITY, f64::min);
    for s in scores {
        s.weight = if !s.path_len.is_finite() {
            0.0
        } else if min > 0.0 {
            min / s.path_len
        } else if s.path_len == 0.0 {
            1.0
        } else {
            0.0
        };
    }
}

fn effective_len(s: &DoorScore) -> f64 {
    s.path_len + s.approach.unwrap_or(0.0)
}

/// Picks the best candidate by `key`, restricted to circulation doors when
/// the preference is on and one exists. Ties within [`LENGTH_TIE_EPS`] go to
/// the lowest door id.
fn pick<'a>(
    candidates: Vec<&'a DoorScore>,
    cfg: &StrategyConfig,
    key: impl Fn(&DoorScore) -> f64,
) -> Option<&'a DoorScore> {
    let mut pool = candidates;
    if cfg.use_circulation_preference && pool.iter().any(|s| s.leads_to_circulation) {
        pool.retain(|s| s.leads_to_circulation);
    }
    let best = pool.iter().map(|s| key(s)).fold(f64::INFINITY, f64::min);
    pool.into_iter()
        .filter(|s| key(s) <= best + LENGTH_TIE_EPS)
        .min_by(|a, b| a.door.cmp(&b.door))
}

fn backtrack(
    room: &RoomId,
    map: &CognitiveMap,
    all_scores: Vec<DoorScore>,
) -> Result<Decision, WayfindingError> {
    let door = map
        .peek_entry()
        .ok_or_else(|| WayfindingError::NoRouteFound(room.clone()))?;
    Ok(Decision {
        room: room.clone(),
        chosen: door.clone(),
        mode: Mode::Backtrack,
        all_scores,
    })
}

/// Directed choice among doors to unvisited rooms with finite scores; the
/// entry door on top of the stack when none is left.
pub fn choose_door(
    room: &RoomId,
    scores: Vec<DoorScore>,
    map: &CognitiveMap,
    cfg: &StrategyConfig,
) -> Result<Decision, WayfindingError> {
    let candidates = scores
        .iter()
        .filter(|s| !s.visited_target && s.path_len.is_finite())
        .collect();
    match pick(candidates, cfg, effective_len) {
        Some(s) => Ok(Decision {
            room: room.clone(),
            chosen: s.door.clone(),
            mode: Mode::Directed,
            all_scores: scores.clone(),
        }),
        None => backtrack(room, map, scores),
    }
}

/// Heads for the nearest door (by in-room walk) into an unvisited room.
pub fn explore_step(
    room: &RoomId,
    plan: &FloorPlan,
    map: &CognitiveMap,
    agent_pos: Point2,
) -> Result<Decision, WayfindingError> {
    let mut scores = score_doors(room, plan, map, agent_pos)?;
    for s in &mut scores {
        if s.approach.is_none() && !s.visited_target {
            let mid = plan.door(&s.door).map(|d| d.midpoint()).unwrap_or(agent_pos);
            s.approach = Some(plan.room_path(room, agent_pos, mid).map_or(f64::INFINITY, |r| r.0));
        }
    }
    let candidates = scores
        .iter()
        .filter(|s| !s.visited_target && s.approach.is_some_and(f64::is_finite))
        .collect();
    let chosen = pick(candidates, &map.strategy, |s| s.approach.unwrap_or(f64::INFINITY))
        .map(|s| s.door.clone());
    match chosen {
        Some(door) => Ok(Decision {
            room: room.clone(),
            chosen: door,
            mode: Mode::Explore,
            all_scores: scores,
        }),
        None => backtrack(room, map, scores),
    }
}

/// Exit door of the current room if there is one, otherwise exploration
/// inside the goal region and directed choice outside it.
pub fn next_decision(
    room: &RoomId,
    plan: &FloorPlan,
    map: &CognitiveMap,
    agent_pos: Point2,
) -> Result<Decision, WayfindingError> {
    // doors_of is id-ordered, so the first of several equally near exits wins
    let mut exit: Option<(f64, &DoorId)> = None;
    for d in plan.doors_of(room).into_iter().filter(|d| d.is_exit()) {
        let len = plan
            .room_path(room, agent_pos, d.midpoint())
            .map_or(f64::INFINITY, |r| r.0);
        if len.is_finite() && exit.is_none_or(|(b, _)| len < b - LENGTH_TIE_EPS) {
            exit = Some((len, &d.id));
        }
    }
    if let Some((_, id)) = exit {
        return Ok(Decision {
            room: room.clone(),
            chosen: id.clone(),
            mode: Mode::Directed,
            all_scores: score_doors(room, plan, map, agent_pos)?,
        });
    }
    if map.is_goal_reached(agent_pos) {
        explore_step(room, plan, map, agent_pos)
    } else {
        let scores = score_doors(room, plan, map, agent_pos)?;
        choose_door(room, scores, map, &map.strategy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{Door, Room, RoomClass};
    use crate::geometry::{GoalEllipse, Polygon, Segment};
    use std::collections::BTreeMap;

    fn rect(id: &str, x0: f64, y0: f64, x1: f64, y1: f64, class: RoomClass) -> Room {
        Room {
            id: id.into(),
            boundary: Polygon::new(vec![
                Point2::new(x0, y0),
                Point2::new(x1, y0),
                Point2::new(x1, y1),
                Point2::new(x0, y1),
            ])
            .unwrap(),
            class,
        }
    }

    fn door(id: &str, a: (f64, f64), b: (f64, f64), ra: &str, rb: &str) -> Door {
        Door {
            id: id.into(),
            segment: Segment::new(Point2::new(a.0, a.1), Point2::new(b.0, b.1)),
            room_a: ra.into(),
            room_b: rb.into(),
        }
    }

    /// Room R in the middle, W to its west (common), E to its east
    /// (circulation), N to its north (common). Exit from N.
    fn cross() -> FloorPlan {
        FloorPlan::new(
            vec![
                rect("R", 0., 0., 4., 4., RoomClass::Common),
                rect("W", -4., 0., 0., 4., RoomClass::Common),
                rect("E", 4., 0., 8., 4., RoomClass::Circulation),
                rect("N", 0., 4., 4., 8., RoomClass::Common),
            ],
            vec![
                door("DW", (0., 1.), (0., 2.), "R", "W"),
                door("DE", (4., 1.), (4., 2.), "R", "E"),
                door("DN", (1., 4.), (2., 4.), "R", "N"),
                door("DX", (1., 8.), (2., 8.), "N", "outside"),
            ],
        )
        .unwrap()
    }

    fn map_with(goal: GoalEllipse, circ: bool, plan: &FloorPlan) -> CognitiveMap {
        let classes: BTreeMap<_, _> = if circ {
            plan.rooms().iter().map(|r| (r.id.clone(), r.class)).collect()
        } else {
            BTreeMap::new()
        };
        let cfg = StrategyConfig {
            use_circulation_preference: circ,
            ..StrategyConfig::default()
        };
        CognitiveMap::new("R".into(), vec![goal], classes, cfg)
    }

    #[test]
    fn single_door_scores_the_beeline() {
        let plan = FloorPlan::new(
            vec![rect("R", 0., 0., 4., 4., RoomClass::Common)],
            vec![door("D", (4., 1.), (4., 3.), "R", "outside")],
        )
        .unwrap();
        let goal = GoalEllipse::circle(Point2::new(10., 2.), 1.0).unwrap();
        let map = map_with(goal, false, &plan);
        let s = score_doors(&"R".into(), &plan, &map, Point2::new(1., 1.)).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].path_len - 5.0).abs() < 1e-9);
        assert_eq!(s[0].leads_to, RoomId::outside());
    }

    #[test]
    fn near_door_beats_far_door() {
        let plan = cross();
        let goal = GoalEllipse::circle(Point2::new(-10., 1.5), 1.0).unwrap();
        let map = map_with(goal, false, &plan);
        let s = score_doors(&"R".into(), &plan, &map, Point2::new(2., 2.)).unwrap();
        let by = |id: &str| s.iter().find(|x| x.door.as_str() == id).unwrap().path_len;
        assert!(by("DW") < by("DE"));
        let d = choose_door(&"R".into(), s, &map, &map.strategy).unwrap();
        assert_eq!(d.chosen.as_str(), "DW");
        assert_eq!(d.mode, Mode::Directed);
    }

    #[test]
    fn inside_the_ellipse_everything_scores_zero() {
        let plan = cross();
        let goal = GoalEllipse::circle(Point2::new(2., 2.), 20.0).unwrap();
        let map = map_with(goal, false, &plan);
        let s = score_doors(&"R".into(), &plan, &map, Point2::new(2., 2.)).unwrap();
        assert!(s.iter().all(|x| x.path_len == 0.0 && x.weight == 1.0));
        let d = next_decision(&"R".into(), &plan, &map, Point2::new(2., 2.)).unwrap();
        assert_eq!(d.mode, Mode::Explore);
    }

    #[test]
    fn circulation_preference_dominates_length() {
        let plan = cross();
        let goal = GoalEllipse::circle(Point2::new(-10., 1.5), 1.0).unwrap();
        let map = map_with(goal, true, &plan);
        let d = next_decision(&"R".into(), &plan, &map, Point2::new(2., 2.)).unwrap();
        assert_eq!(d.chosen.as_str(), "DE");
    }

    #[test]
    fn all_neighbours_visited_means_backtrack() {
        let plan = cross();
        let goal = GoalEllipse::circle(Point2::new(-10., 1.5), 1.0).unwrap();
        let mut map = map_with(goal, false, &plan);
        map.record_entry("R".into(), "DN".into());
        for r in ["W", "E", "N"] {
            map.visited_rooms.insert(r.into());
        }
        let d = next_decision(&"R".into(), &plan, &map, Point2::new(2., 2.)).unwrap();
        assert_eq!(d.mode, Mode::Backtrack);
        assert_eq!(d.chosen.as_str(), "DN");
    }

    #[test]
    fn exhausted_with_empty_stack_is_no_route() {
        let plan = cross();
        let goal = GoalEllipse::circle(Point2::new(-10., 1.5), 1.0).unwrap();
        let mut map = map_with(goal, false, &plan);
        for r in ["W", "E", "N"] {
            map.visited_rooms.insert(r.into());
        }
        assert_eq!(
            next_decision(&"R".into(), &plan, &map, Point2::new(2., 2.)),
            Err(WayfindingError::NoRouteFound("R".into()))
        );
    }

    #[test]
    fn exit_door_has_priority() {
        let plan = cross();
        let goal = GoalEllipse::circle(Point2::new(-10., 1.5), 1.0).unwrap();
        let map = map_with(goal, false, &plan);
        let d = next_decision(&"N".into(), &plan, &map, Point2::new(2., 6.)).unwrap();
        assert_eq!(d.chosen.as_str(), "DX");
    }

    #[test]
    fn explore_takes_the_nearest_unvisited_door() {
        let plan = cross();
        let goal = GoalEllipse::circle(Point2::new(2., 2.), 20.0).unwrap();
        let mut map = map_with(goal, false, &plan);
        let near_east = Point2::new(3.5, 1.5);
        let d = explore_step(&"R".into(), &plan, &map, near_east).unwrap();
        assert_eq!(d.chosen.as_str(), "DE");
        map.visited_rooms.insert("E".into());
        let d = explore_step(&"R".into(), &plan, &map, near_east).unwrap();
        assert_eq!(d.chosen.as_str(), "DN");
    }

    #[test]
    fn ties_go_to_the_lowest_id() {
        let plan = FloorPlan::new(
            vec![
                rect("R", 0., 0., 4., 4., RoomClass::Common),
                rect("A", 4., 0., 8., 2., RoomClass::Common),
                rect("B", 4., 2., 8., 4., RoomClass::Common),
            ],
            vec![
                door("Z", (4., 0.5), (4., 1.5), "R", "A"),
                door("Y", (4., 2.5), (4., 3.5), "R", "B"),
            ],
        )
        .unwrap();
        let goal = GoalEllipse::circle(Point2::new(20., 2.), 1.0).unwrap();
        let map = map_with(goal, false, &plan);
        let d = next_decision(&"R".into(), &plan, &map, Point2::new(1., 2.)).unwrap();
        assert_eq!(d.chosen.as_str(), "Y");
    }

    #[test]
    fn infinite_scores_round_trip_as_null() {
        let s = DoorScore {
            door: "D".into(),
            leads_to: "R".into(),
            path_len: f64::INFINITY,
            leads_to_circulation: false,
            visited_target: false,
            weight: 0.0,
            approach: None,
        };
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"path_len\":null"));
        assert_eq!(serde_json::from_str::<DoorScore>(&json).unwrap(), s);
    }
}
