use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid entity: {0}")]
    InvalidEntity(String),
    #[error("invalid scan spec: {beam_count} beams, max range {max_range}")]
    InvalidScanSpec { beam_count: usize, max_range: f64 },
    #[error("ray origin lies inside entity {index}")]
    OriginInsideEntity { index: usize },
    #[error("non-finite action component ({v}, {dtheta})")]
    NonFiniteAction { v: f64, dtheta: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("scene infeasible: could not place {what} after {attempts} attempts")]
    SceneInfeasible { what: String, attempts: usize },
    #[error("episode already finished")]
    EpisodeDone,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
