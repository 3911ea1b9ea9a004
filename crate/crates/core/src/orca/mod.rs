//! Pedestrian motion by optimal reciprocal collision avoidance.
//!
//! Static obstacles enter as zero-velocity disks for which the pedestrian
//! takes full responsibility. The robot is only seen by pedestrians whose
//! speed exceeds the robot's.

mod lp;

pub use lp::{solve_velocity_lp, HalfPlane};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CircleEntity, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrcaAgent {
    pub position: Vec2,
    pub velocity: Vec2,
    pub radius: f64,
    pub pref_speed: f64,
    pub max_speed: f64,
    /// Current target.
    pub goal: Vec2,
    /// The other endpoint; swapped with `goal` on arrival.
    pub home: Vec2,
    /// Number of goal arrivals so far.
    pub arrivals: u32,
}

impl OrcaAgent {
    pub fn new(position: Vec2, goal: Vec2, radius: f64, pref_speed: f64, max_speed: f64) -> Self {
        OrcaAgent {
            position,
            velocity: Vec2::ZERO,
            radius,
            pref_speed,
            max_speed,
            goal,
            home: position,
            arrivals: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius > 0.0 && self.pref_speed > 0.0 && self.pref_speed <= self.max_speed {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("orca agent {self:?}")))
        }
    }

    /// Velocity toward the goal, capped so the agent lands on the goal rather
    /// than overshooting within one substep.
    pub fn preferred_velocity(&self, dt: f64) -> Vec2 {
        let to_goal = self.goal - self.position;
        let dist = to_goal.length();
        if dist == 0.0 {
            return Vec2::ZERO;
        }
        to_goal / dist * self.pref_speed.min(dist / dt)
    }
}

/// The robot as seen by the crowd.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotAgent {
    pub position: Vec2,
    pub velocity: Vec2,
    pub radius: f64,
    /// Current commanded sagittal speed.
    pub speed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrcaParams {
    pub time_horizon: f64,
    pub time_horizon_obst: f64,
    pub neighbor_dist: f64,
    pub max_neighbors: usize,
    /// Simulation substep, seconds.
    pub dt: f64,
    /// Distance at which a pedestrian counts as arrived.
    pub arrival_threshold: f64,
    /// Clockwise rotation, radians, applied to the preferred velocity of a
    /// pedestrian whose unbiased ORCA velocity is constrained. Everyone
    /// drifting to the same side breaks the symmetric standoffs plain ORCA
    /// settles into. Zero disables it.
    pub pass_bias: f64,
}

impl Default for OrcaParams {
    fn default() -> Self {
        OrcaParams {
            time_horizon: 5.0,
            time_horizon_obst: 5.0,
            neighbor_dist: 10.0,
            max_neighbors: 10,
            dt: 0.05,
            arrival_threshold: 0.1,
            pass_bias: 0.6,
        }
    }
}

impl OrcaParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.time_horizon,
            self.time_horizon_obst,
            self.neighbor_dist,
            self.dt,
            self.arrival_threshold,
        ];
        let bias_ok = (0.0..std::f64::consts::FRAC_PI_2).contains(&self.pass_bias);
        if positive.iter().all(|v| *v > 0.0 && v.is_finite()) && self.max_neighbors > 0 && bias_ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{self:?}")))
        }
    }
}

/// Something an agent must avoid, with its share of the avoidance effort.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub position: Vec2,
    pub velocity: Vec2,
    pub radius: f64,
    /// Fraction of the avoidance taken on by the agent: 1/2 when the
    /// neighbor reciprocates, 1 when it does not.
    pub responsibility: f64,
    pub time_horizon: f64,
}

impl Neighbor {
    pub fn reciprocal(position: Vec2, velocity: Vec2, radius: f64, time_horizon: f64) -> Self {
        Neighbor {
            position,
            velocity,
            radius,
            responsibility: 0.5,
            time_horizon,
        }
    }

    pub fn non_reciprocal(position: Vec2, velocity: Vec2, radius: f64, time_horizon: f64) -> Self {
        Neighbor {
            position,
            velocity,
            radius,
            responsibility: 1.0,
            time_horizon,
        }
    }
}

/// Neighbors pedestrian `index` accounts for: the nearest `max_neighbors`
/// other pedestrians within `neighbor_dist`, plus the robot when
/// `ped_speed > robot.speed`, plus every static within range.
pub fn visible_neighbors(
    index: usize,
    agents: &[OrcaAgent],
    statics: &[CircleEntity],
    robot: Option<&RobotAgent>,
    ped_speed: f64,
    params: &OrcaParams,
) -> Vec<Neighbor> {
    let me = &agents[index];
    let range_sq = params.neighbor_dist * params.neighbor_dist;

    let mut peds: Vec<(f64, usize)> = agents
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != index)
        .map(|(j, a)| ((a.position - me.position).length_squared(), j))
        .filter(|&(d, _)| d < range_sq)
        .collect();
    peds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    peds.truncate(params.max_neighbors);

    let mut out: Vec<Neighbor> = peds
        .into_iter()
        .map(|(_, j)| {
            let a = &agents[j];
            Neighbor::reciprocal(a.position, a.velocity, a.radius, params.time_horizon)
        })
        .collect();

    if let Some(r) = robot {
        if ped_speed > r.speed && (r.position - me.position).length_squared() < range_sq {
            out.push(Neighbor::reciprocal(r.position, r.velocity, r.radius, params.time_horizon));
        }
    }

    out.extend(
        statics
            .iter()
            .filter(|s| (s.center - me.position).length_squared() < range_sq)
            .map(|s| Neighbor::non_reciprocal(s.center, Vec2::ZERO, s.radius, params.time_horizon_obst)),
    );
    out
}

/// One ORCA half-plane per neighbor. `dt` is used for the collision branch
/// when the agent already overlaps a neighbor.
pub fn orca_halfplanes(agent: &OrcaAgent, neighbors: &[Neighbor], dt: f64) -> Vec<HalfPlane> {
    neighbors
        .iter()
        .map(|n| halfplane_for(agent, n, dt))
        .collect()
}

fn halfplane_for(agent: &OrcaAgent, neighbor: &Neighbor, dt: f64) -> HalfPlane {
    let rel_pos = neighbor.position - agent.position;
    let rel_vel = agent.velocity - neighbor.velocity;
    let dist_sq = rel_pos.length_squared();
    let combined_radius = agent.radius + neighbor.radius;
    let combined_radius_sq = combined_radius * combined_radius;

    let (direction, u) = if dist_sq > combined_radius_sq {
        let inv_horizon = 1.0 / neighbor.time_horizon;
        // Vector from the cutoff circle center to the relative velocity.
        let w = rel_vel - rel_pos * inv_horizon;
        let w_len_sq = w.length_squared();
        let dot1 = w.dot(rel_pos);

        if dot1 < 0.0 && dot1 * dot1 > combined_radius_sq * w_len_sq {
            // Project on the cutoff circle.
            let w_len = w_len_sq.sqrt();
            let unit_w = w / w_len;
            (
                Vec2::new(unit_w.y, -unit_w.x),
                unit_w * (combined_radius * inv_horizon - w_len),
            )
        } else {
            // Project on the nearer leg of the cone.
            let leg = (dist_sq - combined_radius_sq).sqrt();
            let direction = if rel_pos.det(w) > 0.0 {
                Vec2::new(
                    rel_pos.x * leg - rel_pos.y * combined_radius,
                    rel_pos.x * combined_radius + rel_pos.y * leg,
                ) / dist_sq
            } else {
                -Vec2::new(
                    rel_pos.x * leg + rel_pos.y * combined_radius,
                    -rel_pos.x * combined_radius + rel_pos.y * leg,
                ) / dist_sq
            };
            (direction, direction * rel_vel.dot(direction) - rel_vel)
        }
    } else {
        // Already overlapping: resolve within one substep.
        let inv_dt = 1.0 / dt;
        let w = rel_vel - rel_pos * inv_dt;
        let w_len = w.length();
        let unit_w = if w_len > 0.0 {
            w / w_len
        } else {
            (-rel_pos).normalize_or_zero()
        };
        (
            Vec2::new(unit_w.y, -unit_w.x),
            unit_w * (combined_radius * inv_dt - w_len),
        )
    };

    HalfPlane::new(agent.velocity + u * neighbor.responsibility, direction.perp())
}

/// New velocity for every pedestrian from the pre-step snapshot.
pub fn compute_velocities(
    agents: &[OrcaAgent],
    statics: &[CircleEntity],
    robot: Option<&RobotAgent>,
    params: &OrcaParams,
) -> Vec<Vec2> {
    (0..agents.len())
        .map(|i| {
            let agent = &agents[i];
            let neighbors = visible_neighbors(i, agents, statics, robot, agent.pref_speed, params);
            let planes = orca_halfplanes(agent, &neighbors, params.dt);
            let pref = agent.preferred_velocity(params.dt);
            let v = solve_velocity_lp(&planes, pref, agent.max_speed);
            if params.pass_bias != 0.0 && (v - pref).length() > 1e-9 {
                solve_velocity_lp(&planes, pref.rotate(-params.pass_bias), agent.max_speed)
            } else {
                v
            }
        })
        .collect()
}

/// Advances every pedestrian by one substep `params.dt`. Velocities are
/// solved against the pre-step snapshot and committed together. A pedestrian
/// within `arrival_threshold` of its goal turns around.
pub fn step_pedestrians(
    agents: &mut [OrcaAgent],
    statics: &[CircleEntity],
    robot: Option<&RobotAgent>,
    params: &OrcaParams,
) {
    let velocities = compute_velocities(agents, statics, robot, params);
    for (agent, v) in agents.iter_mut().zip(velocities) {
        agent.velocity = v;
        agent.position += v * params.dt;
        if agent.position.distance(agent.goal) < params.arrival_threshold {
            std::mem::swap(&mut agent.goal, &mut agent.home);
            agent.arrivals += 1;
        }
    }
}
