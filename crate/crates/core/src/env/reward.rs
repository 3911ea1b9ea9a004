//! Per-step reward: collision, goal progress and emotion-aware discomfort.

use serde::{Deserialize, Serialize};

use crate::geometry::{Emotion, MarginDistances};
use crate::grid::EmotionProfile;

pub const COLLISION_PENALTY: f64 = -0.6;
pub const DISCOMFORT_PENALTY: f64 = -0.1;
pub const GOAL_REWARD: f64 = 0.5;
pub const PROGRESS_GAIN: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_col: f64,
    pub r_goal: f64,
    pub r_emo: f64,
    /// Both the static-discomfort and pedestrian-discomfort penalties fired
    /// and only one was added to `total`.
    pub discomfort_counted_once: bool,
    pub total: f64,
}

/// Class of the entity a discomfort step is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntrusionClass {
    Static,
    Happy,
    Neutral,
    Negative,
}

impl IntrusionClass {
    /// Slot in the `[static, happy, neutral, negative]` counters.
    pub fn slot(self) -> usize {
        match self {
            IntrusionClass::Static => 0,
            IntrusionClass::Happy => 1,
            IntrusionClass::Neutral => 2,
            IntrusionClass::Negative => 3,
        }
    }

    fn from_emotion(e: Emotion) -> Self {
        match e {
            Emotion::Happy => IntrusionClass::Happy,
            Emotion::Neutral => IntrusionClass::Neutral,
            Emotion::Negative => IntrusionClass::Negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Intrusion {
    pub static_zone: bool,
    /// Per pedestrian, whether the robot is inside its discomfort zone.
    pub pedestrians: Vec<bool>,
    /// Nearest intruded entity, if any.
    pub attributed: Option<IntrusionClass>,
}

impl Intrusion {
    pub fn any(&self) -> bool {
        self.attributed.is_some()
    }
}

/// Discomfort-zone intrusions for the robot at the given margin distances.
/// `emotions` is aligned with `distances.per_pedestrian`.
pub fn intrusions(
    distances: &MarginDistances,
    emotions: &[Emotion],
    profile: &EmotionProfile,
    r_robot: f64,
) -> Intrusion {
    let static_zone = distances.static_min < profile.d_static + r_robot;
    let pedestrians: Vec<bool> = distances
        .per_pedestrian
        .iter()
        .zip(emotions)
        .map(|(&d, &e)| d < profile.for_emotion(e) + r_robot)
        .collect();

    let mut best: Option<(f64, IntrusionClass)> =
        static_zone.then_some((distances.static_min, IntrusionClass::Static));
    for ((&d, &e), &inside) in distances.per_pedestrian.iter().zip(emotions).zip(&pedestrians) {
        if inside && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, IntrusionClass::from_emotion(e)));
        }
    }
    Intrusion {
        static_zone,
        pedestrians,
        attributed: best.map(|(_, c)| c),
    }
}

/// Reward for reaching `goal_dist` from `prev_goal_dist` with the robot at
/// the given margin distances.
pub fn compute_reward(
    prev_goal_dist: f64,
    goal_dist: f64,
    distances: &MarginDistances,
    emotions: &[Emotion],
    profile: &EmotionProfile,
    r_robot: f64,
    d_goal: f64,
) -> RewardBreakdown {
    let intrusion = intrusions(distances, emotions, profile, r_robot);

    let r_col = if distances.all_min <= r_robot {
        COLLISION_PENALTY
    } else if intrusion.static_zone {
        DISCOMFORT_PENALTY
    } else {
        0.0
    };
    let r_goal = if goal_dist <= d_goal {
        GOAL_REWARD
    } else {
        PROGRESS_GAIN * (prev_goal_dist - goal_dist)
    };
    let r_emo = if intrusion.pedestrians.iter().any(|&b| b) {
        DISCOMFORT_PENALTY
    } else {
        0.0
    };

    let counted_once = r_col == DISCOMFORT_PENALTY && r_emo == DISCOMFORT_PENALTY;
    let total = if counted_once {
        r_col + r_goal
    } else {
        r_col + r_goal + r_emo
    };
    RewardBreakdown {
        r_col,
        r_goal,
        r_emo,
        discomfort_counted_once: counted_once,
        total,
    }
}

/// Sum of `gamma^k * r_k`.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    rewards
        .iter()
        .rev()
        .fold(0.0, |acc, &r| r + gamma * acc)
}
