//! Reduced-order walker: linear inverted pendulum step transition in the
//! sagittal plane plus a heading command.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Pose, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipParams {
    /// Footstep duration in seconds.
    #[serde(rename = "T")]
    pub step_time: f64,
    /// CoM height in meters.
    #[serde(rename = "H")]
    pub com_height: f64,
    pub g: f64,
    pub u_v_max: f64,
    pub u_dtheta_max: f64,
}

impl Default for LipParams {
    fn default() -> Self {
        LipParams {
            step_time: 0.4,
            com_height: 1.02,
            g: 9.81,
            u_v_max: 0.4,
            u_dtheta_max: 0.2,
        }
    }
}

impl LipParams {
    pub fn omega(&self) -> f64 {
        (self.g / self.com_height).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.step_time,
            self.com_height,
            self.g,
            self.u_v_max,
            self.u_dtheta_max,
        ];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{self:?}")))
        }
    }
}

/// A clamped walking command.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Action {
    /// Sagittal speed at the next foot switch, m/s.
    pub u_v: f64,
    /// Heading increment for the step, radians.
    pub u_dtheta: f64,
}

impl Action {
    pub const fn new(u_v: f64, u_dtheta: f64) -> Self {
        Action { u_v, u_dtheta }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LipState {
    pub pose: Pose,
    /// Sagittal CoM speed at the step-switch instant.
    pub v_loc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    /// Sagittal foot distance relative to the CoM.
    pub foot_distance: f64,
    /// Sagittal CoM increment over the step.
    pub delta_x: f64,
}

pub fn clamp_action(v: f64, dtheta: f64, params: &LipParams) -> Result<Action> {
    if !v.is_finite() || !dtheta.is_finite() {
        return Err(Error::NonFiniteAction { v, dtheta });
    }
    Ok(Action {
        u_v: v.clamp(0.0, params.u_v_max),
        u_dtheta: dtheta.clamp(-params.u_dtheta_max, params.u_dtheta_max),
    })
}

/// One LIP step from switch speed `v_loc` toward commanded speed `u_v`.
pub fn lip_step(v_loc: f64, u_v: f64, params: &LipParams) -> StepOutcome {
    let w = params.omega();
    let wt = w * params.step_time;
    let (c, s) = (wt.cosh(), wt.sinh());
    let foot_distance = (v_loc * c - u_v) / (w * s);
    let delta_x = v_loc * s / w + foot_distance * (1.0 - c);
    StepOutcome {
        foot_distance,
        delta_x,
    }
}

/// Advances the walker by one step: turn by `u_dtheta`, then translate by the
/// LIP increment along the new heading.
pub fn propagate_pose(state: &LipState, action: Action, params: &LipParams) -> LipState {
    propagate_with_outcome(state, action, params).0
}

pub(crate) fn propagate_with_outcome(
    state: &LipState,
    action: Action,
    params: &LipParams,
) -> (LipState, StepOutcome) {
    let outcome = lip_step(state.v_loc, action.u_v, params);
    let heading = wrap_angle(state.pose.heading + action.u_dtheta);
    let position = state.pose.position + Vec2::from_angle(heading) * outcome.delta_x;
    (
        LipState {
            pose: Pose::new(position, heading),
            v_loc: action.u_v,
        },
        outcome,
    )
}

/// Opt-in stand-in for full-body tracking error. Off by default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbationModel {
    pub enabled: bool,
    /// Fraction of the commanded heading change that is not realized.
    pub heading_lag: f64,
    pub heading_noise_std: f64,
    pub lateral_noise_std: f64,
}

impl Default for PerturbationModel {
    fn default() -> Self {
        PerturbationModel {
            enabled: false,
            heading_lag: 0.0,
            heading_noise_std: 0.0,
            lateral_noise_std: 0.0,
        }
    }
}

impl PerturbationModel {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.heading_lag)
            && self.heading_noise_std >= 0.0
            && self.lateral_noise_std >= 0.0
            && self.heading_noise_std.is_finite()
            && self.lateral_noise_std.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{self:?}")))
        }
    }
}

/// Perturbs a commanded step result.
///
/// `prev` is the pose before the step, `commanded` the nominal result and
/// `delta_x` the nominal sagittal increment. The realized heading lags the
/// command by `heading_lag` and picks up Gaussian noise; the position is
/// re-derived along the realized heading and shifted sideways by lateral
/// noise. Draws exactly two normals from `rng` per call when enabled.
pub fn apply_perturbation(
    prev: &Pose,
    commanded: &LipState,
    delta_x: f64,
    model: &PerturbationModel,
    rng: &mut ChaCha8Rng,
) -> LipState {
    if !model.enabled {
        return *commanded;
    }
    let z_heading: f64 = rng.sample(StandardNormal);
    let z_lateral: f64 = rng.sample(StandardNormal);

    let turn = wrap_angle(commanded.pose.heading - prev.heading);
    let mut heading = commanded.pose.heading;
    let mut position = commanded.pose.position;
    if model.heading_lag > 0.0 {
        heading = wrap_angle(heading - model.heading_lag * turn);
        position = prev.position + Vec2::from_angle(heading) * delta_x;
    }
    if model.heading_noise_std > 0.0 {
        heading = wrap_angle(heading + model.heading_noise_std * z_heading);
    }
    if model.lateral_noise_std > 0.0 {
        position += Vec2::from_angle(heading).perp() * (model.lateral_noise_std * z_lateral);
    }
    LipState {
        pose: Pose::new(position, heading),
        v_loc: commanded.v_loc,
    }
}
