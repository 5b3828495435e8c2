//! Per-agent knowledge: remembered goal regions, room classes the agent
//! can recognise, where it has been, and the doors it came through.

use crate::floorplan::{DoorId, RoomClass, RoomId};
use crate::geometry::{GoalEllipse, Point2, DEFAULT_ELLIPSE_SAMPLES};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    LowestDoorId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategyConfig {
    /// Prefer doorways into circulation rooms over any path-length gain.
    pub use_circulation_preference: bool,
    pub n_ellipse_samples: usize,
    pub tie_break: TieBreak,
    /// Add the in-room walk to each doorway to its score. Off by default:
    /// doorways are ranked by their distance to the goal region alone.
    pub include_approach_distance: bool,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            use_circulation_preference: false,
            n_ellipse_samples: DEFAULT_ELLIPSE_SAMPLES,
            tie_break: TieBreak::LowestDoorId,
            include_approach_distance: false,
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CogMapError {
    #[error("entry stack is empty")]
    EmptyStack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CognitiveMap {
    /// Current goal first.
    pub goal_ellipses: Vec<GoalEllipse>,
    pub known_classes: BTreeMap<RoomId, RoomClass>,
    pub visited_rooms: BTreeSet<RoomId>,
    pub traversed_doors: BTreeSet<DoorId>,
    /// Doors through which each room on the current forward path was entered.
    pub entry_stack: Vec<DoorId>,
    pub strategy: StrategyConfig,
}

impl CognitiveMap {
    pub fn new(
        start_room: RoomId,
        goal_ellipses: Vec<GoalEllipse>,
        known_classes: BTreeMap<RoomId, RoomClass>,
        strategy: StrategyConfig,
    ) -> Self {
        Self {
            goal_ellipses,
            known_classes,
            visited_rooms: BTreeSet::from([start_room]),
            traversed_doors: BTreeSet::new(),
            entry_stack: Vec::new(),
            strategy,
        }
    }

    pub fn current_goal(&self) -> Option<&GoalEllipse> {
        self.goal_ellipses.first()
    }

    /// Drops the current goal if another one follows it.
    pub fn advance_goal(&mut self) -> bool {
        if self.goal_ellipses.len() > 1 {
            self.goal_ellipses.remove(0);
            true
        } else {
            false
        }
    }

    /// Forward move into `room` through `via`.
    pub fn record_entry(&mut self, room: RoomId, via: DoorId) {
        self.visited_rooms.insert(room);
        self.traversed_doors.insert(via.clone());
        self.entry_stack.push(via);
    }

    /// Door leading back along the forward path.
    pub fn pop_entry(&mut self) -> Result<DoorId, CogMapError> {
        self.entry_stack.pop().ok_or(CogMapError::EmptyStack)
    }

    pub fn peek_entry(&self) -> Option<&DoorId> {
        self.entry_stack.last()
    }

    pub fn is_visited(&self, room: &RoomId) -> bool {
        self.visited_rooms.contains(room)
    }

    /// Whether `p` lies in the current goal region.
    pub fn is_goal_reached(&self, p: Point2) -> bool {
        self.current_goal().is_some_and(|e| e.contains(p))
    }

    pub fn leads_to_circulation(&self, room: &RoomId) -> bool {
        self.known_classes.get(room) == Some(&RoomClass::Circulation)
    }
}
