use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::{EmotionProfile, GridLayout, GridSpec};
use crate::lip::{LipParams, PerturbationModel};
use crate::orca::OrcaParams;

use super::emotion::EmotionMode;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn contains(&self, p: Vec2) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Radii {
    pub r_ped: f64,
    pub r_robot: f64,
}

/// Episode configuration. Every field has a default, so config files only
/// need the keys they change.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    pub n_pedestrians: usize,
    pub n_statics: usize,
    pub static_region: Rect,
    pub static_radius_range: [f64; 2],
    pub ped_circle_radius_range: [f64; 2],
    pub ped_pref_speed: f64,
    /// Pedestrian speed cap as a multiple of the preferred speed.
    pub ped_max_speed_factor: f64,
    pub robot_start: Vec2,
    pub robot_goal: Vec2,
    /// Goal-reached threshold, meters.
    pub d_goal: f64,
    /// Episode length limit in walking steps.
    pub timeout_steps: u32,
    pub emotion_mode: EmotionMode,
    pub grid: GridSpec,
    pub lip: LipParams,
    pub radii: Radii,
    pub seed: u64,
    pub profile: EmotionProfile,
    pub orca: OrcaParams,
    pub perturbation: PerturbationModel,
    pub observation: GridLayout,
    /// Minimum gap between a static obstacle and the robot start/goal disks.
    pub static_clearance: f64,
    /// Minimum margin-to-margin gap between pedestrian start positions.
    pub ped_spacing: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            n_pedestrians: 5,
            n_statics: 3,
            static_region: Rect {
                x_min: -3.0,
                x_max: 3.0,
                y_min: -1.5,
                y_max: 1.5,
            },
            static_radius_range: [0.2, 0.4],
            ped_circle_radius_range: [3.5, 4.5],
            ped_pref_speed: 1.0,
            ped_max_speed_factor: 1.2,
            robot_start: Vec2::new(-4.0, 0.0),
            robot_goal: Vec2::new(4.0, 0.0),
            d_goal: 0.1,
            timeout_steps: 250,
            emotion_mode: EmotionMode::FixedRandom,
            grid: GridSpec::default(),
            lip: LipParams::default(),
            radii: Radii {
                r_ped: 0.3,
                r_robot: 0.3,
            },
            seed: 0,
            profile: EmotionProfile::default(),
            orca: OrcaParams::default(),
            perturbation: PerturbationModel::default(),
            observation: GridLayout::Lgm,
            static_clearance: 0.5,
            ped_spacing: 0.5,
        }
    }
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(what.to_string()))
    }
}

fn valid_range(r: [f64; 2]) -> bool {
    r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let region = &self.static_region;
        check(
            region.x_min <= region.x_max && region.y_min <= region.y_max,
            "static_region is empty",
        )?;
        check(
            valid_range(self.static_radius_range) && self.static_radius_range[0] > 0.0,
            "static_radius_range",
        )?;
        check(
            valid_range(self.ped_circle_radius_range) && self.ped_circle_radius_range[0] > 0.0,
            "ped_circle_radius_range",
        )?;
        check(self.ped_pref_speed > 0.0, "ped_pref_speed must be positive")?;
        check(self.ped_max_speed_factor >= 1.0, "ped_max_speed_factor must be >= 1")?;
        check(self.d_goal > 0.0, "d_goal must be positive")?;
        check(self.timeout_steps > 0, "timeout_steps must be positive")?;
        check(
            self.radii.r_ped > 0.0 && self.radii.r_robot > 0.0,
            "radii must be positive",
        )?;
        check(
            self.robot_start.is_finite() && self.robot_goal.is_finite(),
            "robot_start/robot_goal",
        )?;
        check(
            self.static_clearance >= 0.0 && self.ped_spacing >= 0.0,
            "static_clearance/ped_spacing",
        )?;
        self.emotion_mode.validate()?;
        self.grid.validate()?;
        self.lip.validate()?;
        self.profile.validate()?;
        self.orca.validate()?;
        self.perturbation.validate()?;
        self.substeps().map(|_| ())
    }

    /// Crowd substeps per walking step; the step time must be a whole
    /// multiple of the crowd substep.
    pub fn substeps(&self) -> Result<usize> {
        let ratio = self.lip.step_time / self.orca.dt;
        let n = ratio.round();
        if n >= 1.0 && (ratio - n).abs() < 1e-9 {
            Ok(n as usize)
        } else {
            Err(Error::InvalidConfig(format!(
                "step time {} is not a multiple of crowd dt {}",
                self.lip.step_time, self.orca.dt
            )))
        }
    }

    pub fn ped_max_speed(&self) -> f64 {
        self.ped_pref_speed * self.ped_max_speed_factor
    }
}
