//! Deterministic crowd-navigation simulator for a reduced-order biped.
//!
//! The walker follows a linear-inverted-pendulum step model, pedestrians move
//! by reciprocal collision avoidance, and observations are stacked polar
//! LiDAR grid maps with emotion-dependent discomfort zones.

pub mod env;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod lip;
pub mod orca;
pub mod planners;

pub use error::{Error, Result};
