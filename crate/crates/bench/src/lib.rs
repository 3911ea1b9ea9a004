//! Seeded benchmark harness, episode export and the JSON-lines environment
//! server for the socnav simulator.

pub mod config;
pub mod export;
pub mod metrics;
pub mod protocol;
pub mod server;

use socnav_core::planners::{DwaParams, DwaPolicy, GreedyPolicy, Policy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyKind {
    Dwa,
    Greedy,
}

impl PolicyKind {
    pub fn build(self, dwa: DwaParams) -> Box<dyn Policy> {
        match self {
            PolicyKind::Dwa => Box::new(DwaPolicy { params: dwa }),
            PolicyKind::Greedy => Box::new(GreedyPolicy),
        }
    }
}
