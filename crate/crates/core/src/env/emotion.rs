use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Emotion;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EmotionMode {
    /// Emotions drawn once per episode and held.
    #[default]
    FixedRandom,
    /// One pedestrian cycles Happy -> Neutral -> Negative every `period`
    /// seconds, starting from Happy; the rest are drawn once and held.
    Alternating { period: f64, pedestrian: usize },
}

impl EmotionMode {
    pub fn alternating(period: f64) -> Self {
        EmotionMode::Alternating {
            period,
            pedestrian: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EmotionMode::Alternating { period, .. } if !(period > 0.0 && period.is_finite()) => {
                Err(Error::InvalidConfig(format!("emotion period {period}")))
            }
            _ => Ok(()),
        }
    }
}

/// Emotions at `sim_time` given the episode-start emotions.
pub fn advance_emotions(mode: &EmotionMode, initial: &[Emotion], sim_time: f64) -> Vec<Emotion> {
    let mut out = initial.to_vec();
    if let EmotionMode::Alternating { period, pedestrian } = *mode {
        if let Some(e) = out.get_mut(pedestrian) {
            // Step times are multiples of 0.4 s, so guard the boundary against
            // round-off in the product.
            let flips = ((sim_time / period) + 1e-9).floor().max(0.0) as u64;
            for _ in 0..flips % 3 {
                *e = e.next();
            }
        }
    }
    out
}
