//! Episode engine: reset, stepping, termination and observations.

mod config;
mod emotion;
mod reward;
mod scene;
mod trace;

pub use config::{EnvConfig, Radii, Rect};
pub use emotion::{advance_emotions, EmotionMode};
pub use reward::{
    compute_reward, discounted_return, intrusions, Intrusion, IntrusionClass, RewardBreakdown,
    COLLISION_PENALTY, DISCOMFORT_PENALTY, GOAL_REWARD, PROGRESS_GAIN,
};
pub use scene::{sample_scene, Scene, MAX_ATTEMPTS};
pub use trace::{EpisodeTrace, PedestrianRecord, TraceHeader, TraceRecord};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    min_margin_distances, ray_cast, wrap_angle, CircleEntity, Emotion, MarginDistances, Pose, Vec2,
};
use crate::grid::{build_lgm, build_ogm, CellClass, FrameHistory, GridFrame, GridLayout, GridObservation};
use crate::lip::{apply_perturbation, clamp_action, propagate_with_outcome, Action, LipState};
use crate::orca::{step_pedestrians, OrcaAgent, RobotAgent};

/// Stream offset so perturbation noise never shares a stream with scene sampling.
const NOISE_STREAM: u64 = 0x6e6f_6973_6520_7374;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoneStatus {
    Running,
    Goal,
    Collision,
    Timeout,
}

impl DoneStatus {
    pub fn is_done(self) -> bool {
        self != DoneStatus::Running
    }
}

/// Distance and robot-frame bearing of the goal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalState {
    pub distance: f64,
    pub bearing: f64,
}

pub fn goal_state(robot: &Pose, goal: Vec2) -> GoalState {
    let delta = goal - robot.position;
    GoalState {
        distance: delta.length(),
        bearing: wrap_angle(delta.angle() - robot.heading),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub step: u32,
    pub time: f64,
    pub distances: MarginDistances,
    pub intrusion: Intrusion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub observation: GridObservation,
    pub goal_state: GoalState,
    pub last_action: Action,
    pub reward: RewardBreakdown,
    pub done: DoneStatus,
    pub info: StepInfo,
}

/// Entities and pedestrian velocities as seen from outside the engine.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldSnapshot {
    pub statics: Vec<CircleEntity>,
    pub pedestrians: Vec<CircleEntity>,
    pub pedestrian_velocities: Vec<Vec2>,
}

impl WorldSnapshot {
    pub fn entities(&self) -> impl Iterator<Item = &CircleEntity> {
        self.statics.iter().chain(&self.pedestrians)
    }
}

/// One episode state machine.
pub struct Env {
    config: EnvConfig,
    substeps: usize,
    seed: u64,
    robot: LipState,
    last_action: Action,
    pedestrians: Vec<OrcaAgent>,
    initial_emotions: Vec<Emotion>,
    emotions: Vec<Emotion>,
    statics: Vec<CircleEntity>,
    step_count: u32,
    status: DoneStatus,
    prev_goal_dist: f64,
    history: FrameHistory,
    noise: ChaCha8Rng,
    trace: EpisodeTrace,
}

impl Env {
    /// Validates `config` and resets with `config.seed`.
    pub fn new(config: EnvConfig) -> Result<(Env, StepResult)> {
        let seed = config.seed;
        Env::reset_with(config, seed)
    }

    pub fn reset_with(config: EnvConfig, seed: u64) -> Result<(Env, StepResult)> {
        config.validate()?;
        let substeps = config.substeps()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = sample_scene(&config, &mut rng)?;

        let start = config.robot_start;
        let heading = (config.robot_goal - start).angle();
        let robot = LipState {
            pose: Pose::new(start, heading),
            v_loc: 0.0,
        };
        let header = TraceHeader {
            seed,
            r_robot: config.radii.r_robot,
            r_ped: config.radii.r_ped,
            robot_goal: config.robot_goal,
            initial_robot: robot.pose,
            statics: scene.statics.clone(),
            initial_pedestrians: Vec::new(),
        };
        let mut env = Env {
            substeps,
            seed,
            robot,
            last_action: Action::default(),
            initial_emotions: scene.emotions.clone(),
            emotions: scene.emotions,
            pedestrians: scene.pedestrians,
            statics: scene.statics,
            step_count: 0,
            status: DoneStatus::Running,
            prev_goal_dist: 0.0,
            history: FrameHistory::default(),
            noise: ChaCha8Rng::seed_from_u64(seed ^ NOISE_STREAM),
            trace: EpisodeTrace {
                header,
                records: Vec::new(),
            },
            config,
        };
        env.trace.header.initial_pedestrians = env.pedestrian_records();
        env.prev_goal_dist = env.goal_state().distance;

        let distances = env.distances_at(env.robot.pose.position);
        let frame = env.frame()?;
        env.history.push(frame, &env.config.grid);
        let info = env.info(distances);
        let result = StepResult {
            observation: env.history.observation(&env.config.grid)?,
            goal_state: env.goal_state(),
            last_action: env.last_action,
            reward: RewardBreakdown::default(),
            done: DoneStatus::Running,
            info,
        };
        Ok((env, result))
    }

    /// Starts a new episode with the same configuration.
    pub fn reset(&mut self, seed: u64) -> Result<StepResult> {
        let (env, result) = Env::reset_with(self.config.clone(), seed)?;
        *self = env;
        Ok(result)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn robot(&self) -> &LipState {
        &self.robot
    }

    pub fn status(&self) -> DoneStatus {
        self.status
    }

    pub fn step_count(&self) -> u32 {
        self.step_count
    }

    pub fn emotions(&self) -> &[Emotion] {
        &self.emotions
    }

    pub fn pedestrians(&self) -> &[OrcaAgent] {
        &self.pedestrians
    }

    pub fn trace(&self) -> &EpisodeTrace {
        &self.trace
    }

    pub fn into_trace(self) -> EpisodeTrace {
        self.trace
    }

    pub fn goal_state(&self) -> GoalState {
        goal_state(&self.robot.pose, self.config.robot_goal)
    }

    pub fn world(&self) -> WorldSnapshot {
        WorldSnapshot {
            statics: self.statics.clone(),
            pedestrians: self.pedestrian_entities(),
            pedestrian_velocities: self.pedestrians.iter().map(|p| p.velocity).collect(),
        }
    }

    fn pedestrian_entities(&self) -> Vec<CircleEntity> {
        self.pedestrians
            .iter()
            .zip(&self.emotions)
            .map(|(p, &e)| CircleEntity::new_pedestrian(p.position, p.radius, e))
            .collect()
    }

    fn entities(&self) -> Vec<CircleEntity> {
        let mut all = self.statics.clone();
        all.extend(self.pedestrian_entities());
        all
    }

    fn distances_at(&self, position: Vec2) -> MarginDistances {
        let robot = CircleEntity::new_robot(position, self.config.radii.r_robot);
        min_margin_distances(&robot, &self.entities())
    }

    fn info(&self, distances: MarginDistances) -> StepInfo {
        let intrusion = intrusions(
            &distances,
            &self.emotions,
            &self.config.profile,
            self.config.radii.r_robot,
        );
        StepInfo {
            step: self.step_count,
            time: self.step_count as f64 * self.config.lip.step_time,
            distances,
            intrusion,
        }
    }

    fn pedestrian_records(&self) -> Vec<PedestrianRecord> {
        self.pedestrians
            .iter()
            .zip(&self.emotions)
            .map(|(p, &emotion)| PedestrianRecord {
                position: p.position,
                velocity: p.velocity,
                emotion,
            })
            .collect()
    }

    /// Current ego-frame grid frame.
    fn frame(&self) -> Result<GridFrame> {
        let grid = &self.config.grid;
        let pose = self.robot.pose;
        let local: Vec<CircleEntity> = self.entities().iter().map(|e| e.in_frame(&pose)).collect();
        let index = u64::from(self.step_count);
        match self.config.observation {
            GridLayout::Ogm => Ok(build_ogm(&local, &self.config.profile, grid, index)),
            GridLayout::Lgm => {
                // A disk swallowing the sensor blinds every beam at once.
                let (inside, outside): (Vec<CircleEntity>, Vec<CircleEntity>) = local
                    .into_iter()
                    .partition(|e| e.center.length() < e.radius);
                let scan = ray_cast(Pose::default(), &outside, grid.scan_spec())?;
                let mut frame = build_lgm(&scan, &outside, &self.config.profile, grid, index)?;
                if !inside.is_empty() {
                    frame.cells[..grid.size].fill(CellClass::Collision);
                }
                Ok(frame)
            }
        }
    }

    /// Advances one walking step with a raw (unclamped) command.
    pub fn step(&mut self, v: f64, dtheta: f64) -> Result<StepResult> {
        if self.status.is_done() {
            return Err(Error::EpisodeDone);
        }
        let cfg = &self.config;
        let action = clamp_action(v, dtheta, &cfg.lip)?;
        let start = self.robot;
        let (nominal, outcome) = propagate_with_outcome(&start, action, &cfg.lip);
        let next = apply_perturbation(
            &start.pose,
            &nominal,
            outcome.delta_x,
            &cfg.perturbation,
            &mut self.noise,
        );

        let p0 = start.pose.position;
        let p1 = next.pose.position;
        let velocity = (p1 - p0) / cfg.lip.step_time;
        let r_robot = cfg.radii.r_robot;
        let orca = cfg.orca;
        let mut robot_pos = p0;
        let mut collided = false;
        let mut distances = self.distances_at(p0);
        for s in 1..=self.substeps {
            let robot_agent = RobotAgent {
                position: robot_pos,
                velocity,
                radius: r_robot,
                speed: action.u_v,
            };
            step_pedestrians(&mut self.pedestrians, &self.statics, Some(&robot_agent), &orca);
            robot_pos = if s == self.substeps {
                p1
            } else {
                p0 + (p1 - p0) * (s as f64 / self.substeps as f64)
            };
            distances = self.distances_at(robot_pos);
            if distances.all_min <= r_robot {
                collided = true;
                break;
            }
        }

        self.robot = if collided {
            LipState {
                pose: Pose::new(robot_pos, next.pose.heading),
                v_loc: next.v_loc,
            }
        } else {
            next
        };
        self.last_action = action;
        self.step_count += 1;
        let sim_time = self.step_count as f64 * self.config.lip.step_time;
        self.emotions = advance_emotions(&self.config.emotion_mode, &self.initial_emotions, sim_time);

        let goal = self.goal_state();
        let reward = compute_reward(
            self.prev_goal_dist,
            goal.distance,
            &distances,
            &self.emotions,
            &self.config.profile,
            r_robot,
            self.config.d_goal,
        );
        self.prev_goal_dist = goal.distance;
        self.status = if collided {
            DoneStatus::Collision
        } else if goal.distance <= self.config.d_goal {
            DoneStatus::Goal
        } else if self.step_count >= self.config.timeout_steps {
            DoneStatus::Timeout
        } else {
            DoneStatus::Running
        };

        let frame = self.frame()?;
        self.history.push(frame, &self.config.grid);
        let info = self.info(distances);
        self.trace.records.push(TraceRecord {
            step: self.step_count,
            time: sim_time,
            robot: self.robot.pose,
            v_loc: self.robot.v_loc,
            action,
            pedestrians: self.pedestrian_records(),
            reward,
            done: self.status,
        });
        Ok(StepResult {
            observation: self.history.observation(&self.config.grid)?,
            goal_state: goal,
            last_action: action,
            reward,
            done: self.status,
            info,
        })
    }
}
