//! Model-based walking policies: a dynamic window planner over LIP steps and
//! a greedy go-to-goal rule.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::env::{goal_state, EnvConfig, WorldSnapshot};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec2};
use crate::lip::{propagate_pose, Action, LipParams, LipState};

/// Costs closer than this to the minimum are treated as ties.
const COST_TIE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DwaParams {
    pub v_samples: usize,
    pub dtheta_samples: usize,
    pub horizon_steps: usize,
    /// Clearance checks per walking step; matches the engine's collision substeps by default.
    pub checks_per_step: usize,
    pub w_heading: f64,
    pub w_clearance: f64,
    pub w_velocity: f64,
    /// Clearance, meters, beyond which the clearance cost is zero.
    pub clearance_cap: f64,
}

impl Default for DwaParams {
    fn default() -> Self {
        DwaParams {
            v_samples: 9,
            dtheta_samples: 11,
            horizon_steps: 5,
            checks_per_step: 8,
            w_heading: 1.0,
            w_clearance: 2.0,
            w_velocity: 3.0,
            clearance_cap: 0.5,
        }
    }
}

impl DwaParams {
    pub fn validate(&self) -> Result<()> {
        let weights = [self.w_heading, self.w_clearance, self.w_velocity];
        let bad = if self.v_samples < 2 || self.dtheta_samples < 2 {
            Some("need at least 2 samples per axis")
        } else if self.horizon_steps == 0 || self.checks_per_step == 0 {
            Some("horizon and checks per step must be positive")
        } else if !weights.iter().all(|w| w.is_finite() && *w >= 0.0) {
            Some("weights must be finite and nonnegative")
        } else if weights.iter().all(|w| *w == 0.0) {
            Some("weights must not all be zero")
        } else if !(self.clearance_cap > 0.0 && self.clearance_cap.is_finite()) {
            Some("clearance cap must be positive")
        } else {
            None
        };
        match bad {
            Some(msg) => Err(Error::InvalidParams(format!("dwa: {msg}"))),
            None => Ok(()),
        }
    }

    /// Candidate actions, v-major, both axes ascending.
    pub fn candidates(&self, lip: &LipParams) -> Vec<Action> {
        let nv = self.v_samples - 1;
        let nd = self.dtheta_samples - 1;
        let mut out = Vec::with_capacity(self.v_samples * self.dtheta_samples);
        for i in 0..=nv {
            let v = lip.u_v_max * i as f64 / nv as f64;
            for j in 0..=nd {
                // Symmetric form so the middle sample is exactly zero.
                let d = lip.u_dtheta_max * (2 * j) as f64 / nd as f64 - lip.u_dtheta_max;
                let d = if 2 * j == nd { 0.0 } else { d };
                out.push(Action::new(v, d));
            }
        }
        out
    }
}

/// Walker data a planner needs beyond the world snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkerModel {
    pub lip: LipParams,
    pub radius: f64,
    pub goal_tolerance: f64,
}

impl WalkerModel {
    pub fn from_config(config: &EnvConfig) -> Self {
        WalkerModel {
            lip: config.lip,
            radius: config.radii.r_robot,
            goal_tolerance: config.d_goal,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rollout {
    pub actions: Vec<Action>,
    /// Pose after each simulated step; shorter than the horizon when the
    /// goal disk is entered early.
    pub poses: Vec<Pose>,
    pub min_clearance: f64,
    pub terminal_goal_dist: f64,
    pub terminal_heading_error: f64,
    pub cost: f64,
}

impl Rollout {
    pub fn admissible(&self) -> bool {
        self.min_clearance > 0.0
    }

    fn action(&self) -> Action {
        self.actions[0]
    }
}

/// Smallest robot margin distance to any predicted entity at time `t` from now.
fn clearance_at(world: &WorldSnapshot, position: Vec2, t: f64, radius: f64) -> f64 {
    let statics = world
        .statics
        .iter()
        .map(|s| position.distance(s.center) - s.radius);
    let peds = world
        .pedestrians
        .iter()
        .zip(&world.pedestrian_velocities)
        .map(|(p, &v)| position.distance(p.center + v * t) - p.radius);
    statics.chain(peds).fold(f64::INFINITY, f64::min) - radius
}

/// Rolls `action` out for the planning horizon, holding it constant.
pub fn rollout(
    state: &LipState,
    action: Action,
    world: &WorldSnapshot,
    goal: Vec2,
    params: &DwaParams,
    model: &WalkerModel,
) -> Rollout {
    let t_step = model.lip.step_time;
    let checks = params.checks_per_step;
    let mut current = *state;
    let mut poses = Vec::with_capacity(params.horizon_steps);
    let mut min_clearance = f64::INFINITY;
    let mut reached = false;
    for k in 0..params.horizon_steps {
        let next = propagate_pose(&current, action, &model.lip);
        let (p0, p1) = (current.pose.position, next.pose.position);
        for c in 1..=checks {
            let frac = c as f64 / checks as f64;
            let t = (k as f64 + frac) * t_step;
            let clear = clearance_at(world, p0 + (p1 - p0) * frac, t, model.radius);
            min_clearance = min_clearance.min(clear);
        }
        poses.push(next.pose);
        current = next;
        if next.pose.position.distance(goal) <= model.goal_tolerance {
            reached = true;
            break;
        }
    }
    let g = goal_state(&current.pose, goal);
    let terminal_heading_error = if reached { 0.0 } else { g.bearing.abs() };
    let cost = dwa_cost(terminal_heading_error, min_clearance, action.u_v, params, &model.lip);
    Rollout {
        actions: vec![action; poses.len()],
        poses,
        min_clearance,
        terminal_goal_dist: g.distance,
        terminal_heading_error,
        cost,
    }
}

/// Weighted cost with the weights normalized to sum to one, so that scaling
/// all weights leaves every comparison unchanged.
pub fn dwa_cost(
    heading_error: f64,
    min_clearance: f64,
    u_v: f64,
    params: &DwaParams,
    lip: &LipParams,
) -> f64 {
    let sum = params.w_heading + params.w_clearance + params.w_velocity;
    let cap = params.clearance_cap;
    let heading = heading_error / PI;
    let clearance = 1.0 - min_clearance.clamp(0.0, cap) / cap;
    let velocity = 1.0 - u_v / lip.u_v_max;
    (params.w_heading * heading + params.w_clearance * clearance + params.w_velocity * velocity)
        / sum
}

/// All candidate rollouts in the order of [`DwaParams::candidates`].
pub fn evaluate_candidates(
    state: &LipState,
    world: &WorldSnapshot,
    goal: Vec2,
    params: &DwaParams,
    model: &WalkerModel,
) -> Vec<Rollout> {
    params
        .candidates(&model.lip)
        .into_iter()
        .map(|a| rollout(state, a, world, goal, params, model))
        .collect()
}

/// Tie order: smaller |dtheta|, then larger v, then turning toward the goal.
fn tie_order(a: &Action, b: &Action, turn_sign: f64) -> Ordering {
    a.u_dtheta
        .abs()
        .total_cmp(&b.u_dtheta.abs())
        .then(b.u_v.total_cmp(&a.u_v))
        .then((b.u_dtheta * turn_sign).total_cmp(&(a.u_dtheta * turn_sign)))
}

fn turn_sign(state: &LipState, goal: Vec2) -> f64 {
    if goal_state(&state.pose, goal).bearing >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Picks the admissible minimum-cost rollout from `rollouts`.
pub fn select(rollouts: &[Rollout], turn_sign: f64) -> Option<&Rollout> {
    let best = rollouts
        .iter()
        .filter(|r| r.admissible())
        .map(|r| r.cost)
        .fold(f64::INFINITY, f64::min);
    rollouts
        .iter()
        .filter(|r| r.admissible() && r.cost <= best + COST_TIE)
        .min_by(|a, b| tie_order(&a.action(), &b.action(), turn_sign))
}

/// One DWA decision. Falls back to turning in place toward the goal when no
/// candidate keeps positive clearance.
pub fn dwa_plan(
    state: &LipState,
    world: &WorldSnapshot,
    goal: Vec2,
    params: &DwaParams,
    model: &WalkerModel,
) -> Action {
    let rollouts = evaluate_candidates(state, world, goal, params, model);
    let sign = turn_sign(state, goal);
    match select(&rollouts, sign) {
        Some(r) => r.action(),
        None => Action::new(0.0, sign * model.lip.u_dtheta_max),
    }
}

pub fn greedy_policy(state: &LipState, goal: Vec2, lip: &LipParams) -> Action {
    let bearing = goal_state(&state.pose, goal).bearing;
    let u_v = if bearing.abs() < FRAC_PI_4 { lip.u_v_max } else { 0.0 };
    Action::new(u_v, bearing.clamp(-lip.u_dtheta_max, lip.u_dtheta_max))
}

/// Everything a policy sees at a decision point.
#[derive(Clone, Copy, Debug)]
pub struct PolicyView<'a> {
    pub state: &'a LipState,
    pub world: &'a WorldSnapshot,
    pub goal: Vec2,
    pub model: WalkerModel,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("policy failed: {0}")]
pub struct PolicyError(pub String);

/// A source of actions. Implementations must be deterministic.
pub trait Policy: Send + Sync {
    fn name(&self) -> &str;
    /// Stable description of the policy's parameters, for report hashing.
    fn fingerprint(&self) -> String {
        String::new()
    }
    fn act(&self, view: &PolicyView<'_>) -> Result<Action, PolicyError>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DwaPolicy {
    pub params: DwaParams,
}

impl Policy for DwaPolicy {
    fn name(&self) -> &str {
        "dwa"
    }

    fn fingerprint(&self) -> String {
        format!("{:?}", self.params)
    }

    fn act(&self, view: &PolicyView<'_>) -> Result<Action, PolicyError> {
        Ok(dwa_plan(view.state, view.world, view.goal, &self.params, &view.model))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GreedyPolicy;

impl Policy for GreedyPolicy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn act(&self, view: &PolicyView<'_>) -> Result<Action, PolicyError> {
        Ok(greedy_policy(view.state, view.goal, &view.model.lip))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x: f64, y: f64, heading: f64) -> LipState {
        LipState {
            pose: Pose::new(Vec2::new(x, y), heading),
            v_loc: 0.0,
        }
    }

    fn empty() -> WorldSnapshot {
        WorldSnapshot {
            statics: vec![],
            pedestrians: vec![],
            pedestrian_velocities: vec![],
        }
    }

    fn model() -> WalkerModel {
        WalkerModel::from_config(&EnvConfig::default())
    }

    #[test]
    fn greedy_examples() {
        let lip = LipParams::default();
        let s = at(0.0, 0.0, 0.0);
        assert_eq!(greedy_policy(&s, Vec2::new(4.0, 0.0), &lip), Action::new(0.4, 0.0));
        let g = Vec2::from_angle(0.1) * 3.0;
        let a = greedy_policy(&s, g, &lip);
        assert_eq!(a.u_v, 0.4);
        assert!((a.u_dtheta - 0.1).abs() < 1e-12);
        assert_eq!(greedy_policy(&s, Vec2::new(-4.0, 0.0), &lip), Action::new(0.0, 0.2));
    }

    #[test]
    fn candidate_grid_shape() {
        let c = DwaParams::default().candidates(&LipParams::default());
        assert_eq!(c.len(), 99);
        assert_eq!(c[0], Action::new(0.0, -0.2));
        assert_eq!(c[5], Action::new(0.0, 0.0));
        assert_eq!(c[98], Action::new(0.4, 0.2));
    }

    #[test]
    fn goal_ahead_walks_straight() {
        let a = dwa_plan(&at(-4.0, 0.0, 0.0), &empty(), Vec2::new(4.0, 0.0), &DwaParams::default(), &model());
        assert_eq!(a, Action::new(0.4, 0.0));
    }

    #[test]
    fn closing_ring_falls_back_to_turning() {
        let mut world = empty();
        for k in 0..12 {
            let dir = Vec2::from_angle(k as f64 * PI / 6.0);
            world.pedestrians.push(crate::geometry::CircleEntity::new_pedestrian(
                dir * 1.2,
                0.3,
                crate::geometry::Emotion::Neutral,
            ));
            world.pedestrian_velocities.push(dir * -1.0);
        }
        let rollouts = evaluate_candidates(&at(0.0, 0.0, 0.0), &world, Vec2::new(-1.0, -4.0), &DwaParams::default(), &model());
        assert!(rollouts.iter().all(|r| !r.admissible()));
        let a = dwa_plan(&at(0.0, 0.0, 0.0), &world, Vec2::new(-1.0, -4.0), &DwaParams::default(), &model());
        assert_eq!(a, Action::new(0.0, -0.2));
    }

    #[test]
    fn invalid_params() {
        let p = DwaParams {
            w_heading: 0.0,
            w_clearance: 0.0,
            w_velocity: 0.0,
            ..DwaParams::default()
        };
        assert!(p.validate().is_err());
        assert!(DwaParams { v_samples: 1, ..DwaParams::default() }.validate().is_err());
        assert!(DwaParams::default().validate().is_ok());
    }
}
