//! Per-episode trajectory records.

use serde::{Deserialize, Serialize};

use crate::geometry::{min_margin_distances, CircleEntity, Emotion, Pose, Vec2};
use crate::grid::EmotionProfile;
use crate::lip::Action;

use super::reward::{intrusions, Intrusion, RewardBreakdown};
use super::DoneStatus;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PedestrianRecord {
    pub position: Vec2,
    pub velocity: Vec2,
    pub emotion: Emotion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub step: u32,
    pub time: f64,
    pub robot: Pose,
    pub v_loc: f64,
    pub action: Action,
    pub pedestrians: Vec<PedestrianRecord>,
    pub reward: RewardBreakdown,
    pub done: DoneStatus,
}

/// Static scene data shared by every record of an episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub seed: u64,
    pub r_robot: f64,
    pub r_ped: f64,
    pub robot_goal: Vec2,
    pub initial_robot: Pose,
    pub statics: Vec<CircleEntity>,
    pub initial_pedestrians: Vec<PedestrianRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
}

impl EpisodeTrace {
    pub fn outcome(&self) -> DoneStatus {
        self.records.last().map_or(DoneStatus::Running, |r| r.done)
    }

    /// Re-evaluates discomfort intrusions of every recorded step under
    /// `profile`, keeping the recorded motion fixed.
    pub fn replay_intrusions(&self, profile: &EmotionProfile) -> Vec<Intrusion> {
        let h = &self.header;
        self.records
            .iter()
            .map(|rec| {
                let mut entities = h.statics.clone();
                entities.extend(
                    rec.pedestrians
                        .iter()
                        .map(|p| CircleEntity::new_pedestrian(p.position, h.r_ped, p.emotion)),
                );
                let robot = CircleEntity::new_robot(rec.robot.position, h.r_robot);
                let d = min_margin_distances(&robot, &entities);
                let emotions: Vec<Emotion> = rec.pedestrians.iter().map(|p| p.emotion).collect();
                intrusions(&d, &emotions, profile, h.r_robot)
            })
            .collect()
    }
}
