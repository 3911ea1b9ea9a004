//! Random scene generation by rejection sampling.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{CircleEntity, Emotion, Vec2};
use crate::orca::OrcaAgent;

use super::config::EnvConfig;
use super::emotion::EmotionMode;

pub const MAX_ATTEMPTS: usize = 10_000;

pub struct Scene {
    pub statics: Vec<CircleEntity>,
    pub pedestrians: Vec<OrcaAgent>,
    pub emotions: Vec<Emotion>,
    pub circle_radius: f64,
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn sample_statics(config: &EnvConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CircleEntity>> {
    let region = &config.static_region;
    let keep_out = config.radii.r_robot + config.static_clearance;
    let mut statics: Vec<CircleEntity> = Vec::with_capacity(config.n_statics);
    for k in 0..config.n_statics {
        let placed = (0..MAX_ATTEMPTS).find_map(|_| {
            let center = Vec2::new(
                uniform(rng, [region.x_min, region.x_max]),
                uniform(rng, [region.y_min, region.y_max]),
            );
            let radius = uniform(rng, config.static_radius_range);
            let clear_of_robot = center.distance(config.robot_start) >= radius + keep_out
                && center.distance(config.robot_goal) >= radius + keep_out;
            let clear_of_others = statics
                .iter()
                .all(|s| center.distance(s.center) >= radius + s.radius);
            (clear_of_robot && clear_of_others).then(|| CircleEntity::new_static(center, radius))
        });
        statics.push(placed.ok_or_else(|| Error::SceneInfeasible {
            what: format!("static obstacle {k}"),
            attempts: MAX_ATTEMPTS,
        })?);
    }
    Ok(statics)
}

fn sample_pedestrians(
    config: &EnvConfig,
    statics: &[CircleEntity],
    circle_radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<OrcaAgent>> {
    let r_ped = config.radii.r_ped;
    let min_gap = 2.0 * r_ped + config.ped_spacing;
    let robot_gap = r_ped + config.radii.r_robot + config.static_clearance;
    let mut starts: Vec<Vec2> = Vec::with_capacity(config.n_pedestrians);
    for k in 0..config.n_pedestrians {
        let placed = (0..MAX_ATTEMPTS).find_map(|_| {
            let p = Vec2::from_angle(rng.random_range(0.0..TAU)) * circle_radius;
            // Goals are antipodal and pedestrians shuttle back and forth, so
            // both ends of the path must leave the robot's start and goal free.
            let keeps_clear = |q: Vec2| {
                q.distance(config.robot_start) >= robot_gap && q.distance(config.robot_goal) >= robot_gap
            };
            let ok = starts.iter().all(|q| p.distance(*q) >= min_gap)
                && keeps_clear(p)
                && keeps_clear(-p)
                && statics.iter().all(|s| p.distance(s.center) >= r_ped + s.radius);
            ok.then_some(p)
        });
        starts.push(placed.ok_or_else(|| Error::SceneInfeasible {
            what: format!("pedestrian {k}"),
            attempts: MAX_ATTEMPTS,
        })?);
    }
    Ok(starts
        .into_iter()
        .map(|p| OrcaAgent::new(p, -p, r_ped, config.ped_pref_speed, config.ped_max_speed()))
        .collect())
}

fn sample_emotions(config: &EnvConfig, rng: &mut ChaCha8Rng) -> Vec<Emotion> {
    let mut emotions: Vec<Emotion> = (0..config.n_pedestrians)
        .map(|_| Emotion::ALL[rng.random_range(0..3)])
        .collect();
    if let EmotionMode::Alternating { pedestrian, .. } = config.emotion_mode {
        if let Some(e) = emotions.get_mut(pedestrian) {
            *e = Emotion::Happy;
        }
    }
    emotions
}

/// Samples statics, then the pedestrian circle, then pedestrian starts,
/// then emotions, in that order from `rng`.
pub fn sample_scene(config: &EnvConfig, rng: &mut ChaCha8Rng) -> Result<Scene> {
    let statics = sample_statics(config, rng)?;
    let circle_radius = uniform(rng, config.ped_circle_radius_range);
    let pedestrians = sample_pedestrians(config, &statics, circle_radius, rng)?;
    let emotions = sample_emotions(config, rng);
    Ok(Scene {
        statics,
        pedestrians,
        emotions,
        circle_radius,
    })
}
