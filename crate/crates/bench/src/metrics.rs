use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use socnav_core::env::{DoneStatus, Env, EnvConfig, EpisodeTrace};
use socnav_core::planners::{Policy, PolicyView, WalkerModel};

/// Summary of one finished (or aborted) trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub seed: u64,
    pub status: DoneStatus,
    pub steps: u32,
    /// Intruding steps per nearest entity class: static, happy, neutral, negative.
    pub idt: [u64; 4],
    /// Set when the policy or the engine failed mid-episode.
    pub failure: Option<String>,
}

impl EpisodeOutcome {
    pub fn success(&self) -> bool {
        self.failure.is_none() && self.status == DoneStatus::Goal
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub sr: f64,
    /// Mean navigation time of successful trials, seconds.
    pub nt_mean: Option<f64>,
    /// Population standard deviation of the same.
    pub nt_std: Option<f64>,
    pub dt: u64,
    pub idt: [u64; 4],
    pub n_trials: usize,
    pub successes: usize,
    pub collisions: usize,
    pub timeouts: usize,
    pub failures: usize,
    pub config_hash: String,
}

pub fn aggregate(outcomes: &[EpisodeOutcome], step_time: f64, config_hash: String) -> MetricsReport {
    let n = outcomes.len();
    let times: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.success())
        .map(|o| f64::from(o.steps) * step_time)
        .collect();
    let (nt_mean, nt_std) = if times.is_empty() {
        (None, None)
    } else {
        let k = times.len() as f64;
        let mean = times.iter().sum::<f64>() / k;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / k;
        (Some(mean), Some(var.sqrt()))
    };
    let mut idt = [0u64; 4];
    for o in outcomes {
        for (acc, v) in idt.iter_mut().zip(o.idt) {
            *acc += v;
        }
    }
    let count = |s: DoneStatus| {
        outcomes
            .iter()
            .filter(|o| o.failure.is_none() && o.status == s)
            .count()
    };
    MetricsReport {
        sr: if n == 0 { 0.0 } else { times.len() as f64 / n as f64 },
        nt_mean,
        nt_std,
        dt: idt.iter().sum(),
        idt,
        n_trials: n,
        successes: times.len(),
        collisions: count(DoneStatus::Collision),
        timeouts: count(DoneStatus::Timeout),
        failures: outcomes.iter().filter(|o| o.failure.is_some()).count(),
        config_hash,
    }
}

/// Hex sha256 over the canonical JSON of `config` and the policy identity.
pub fn config_hash(config: &EnvConfig, policy: &dyn Policy) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    h.update(b"\npolicy:");
    h.update(policy.name().as_bytes());
    h.update(b"\n");
    h.update(policy.fingerprint().as_bytes());
    hex::encode(h.finalize())
}

/// Runs one episode to termination. Policy or engine errors end the episode
/// as a failure; the partial trace is still returned.
pub fn run_episode(policy: &dyn Policy, config: &EnvConfig, seed: u64) -> (EpisodeOutcome, Option<EpisodeTrace>) {
    let (mut env, _) = match Env::reset_with(config.clone(), seed) {
        Ok(pair) => pair,
        Err(e) => {
            log::warn!("seed {seed}: reset failed: {e}");
            let outcome = EpisodeOutcome {
                seed,
                status: DoneStatus::Running,
                steps: 0,
                idt: [0; 4],
                failure: Some(e.to_string()),
            };
            return (outcome, None);
        }
    };
    let model = WalkerModel::from_config(config);
    let goal = config.robot_goal;
    let mut idt = [0u64; 4];
    let mut failure = None;
    while !env.status().is_done() {
        let world = env.world();
        let view = PolicyView {
            state: env.robot(),
            world: &world,
            goal,
            model,
        };
        let result = policy
            .act(&view)
            .map_err(|e| e.to_string())
            .and_then(|a| env.step(a.u_v, a.u_dtheta).map_err(|e| e.to_string()));
        match result {
            Ok(step) => {
                if let Some(class) = step.info.intrusion.attributed {
                    idt[class.slot()] += 1;
                }
            }
            Err(e) => {
                log::warn!("seed {seed}: episode aborted at step {}: {e}", env.step_count());
                failure = Some(e);
                break;
            }
        }
    }
    let outcome = EpisodeOutcome {
        seed,
        status: env.status(),
        steps: env.step_count(),
        idt,
        failure,
    };
    (outcome, Some(env.into_trace()))
}

/// Runs `n` trials in parallel; trial `t` uses seed `base_seed + t`.
pub fn run_outcomes(policy: &dyn Policy, config: &EnvConfig, n: usize, base_seed: u64) -> Vec<EpisodeOutcome> {
    (0..n as u64)
        .into_par_iter()
        .map(|t| run_episode(policy, config, base_seed.wrapping_add(t)).0)
        .collect()
}

pub fn run_trials(policy: &dyn Policy, config: &EnvConfig, n: usize, base_seed: u64) -> MetricsReport {
    let outcomes = run_outcomes(policy, config, n, base_seed);
    aggregate(&outcomes, config.lip.step_time, config_hash(config, policy))
}
