//! JSON-lines environment protocol: one request object per line in, one
//! response object per line out.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use socnav_core::env::{DoneStatus, Env, EnvConfig, IntrusionClass, RewardBreakdown, StepResult};
use socnav_core::grid::GridSpec;

pub const PROTOCOL_VERSION: &str = "socnav-jsonl/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    // Empty braces rather than unit variants so stray fields are rejected.
    Hello {},
    Reset {
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<Value>,
    },
    /// The action stays untyped here so arity errors get their own code.
    Step { action: Value },
    Close {},
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    NotReset,
    EpisodeDone,
    BadAction,
    BadRequest,
    ConfigError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBody {
    pub code: ErrorCode,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalStateMsg {
    pub distance: f64,
    pub bearing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationMsg {
    /// `[N][M][M]` intensities, oldest frame first, row 0 at the top.
    pub frames: Vec<Vec<Vec<f64>>>,
    pub goal_state: GoalStateMsg,
    pub last_action: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoMsg {
    pub step: u32,
    pub time: f64,
    /// Robot-center distance to the nearest entity margin; absent in an empty world.
    pub nearest_margin: Option<f64>,
    pub intrusion: Option<IntrusionClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepMsg {
    pub observation: ObservationMsg,
    pub reward: RewardBreakdown,
    pub done: DoneStatus,
    pub info: InfoMsg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelloMsg {
    pub protocol: String,
    pub grid: GridSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Response {
    Error { error: ErrorBody },
    Hello { hello: HelloMsg },
    Closed { closed: bool },
    Step(Box<StepMsg>),
}

impl Response {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        Response::Error {
            error: ErrorBody {
                code,
                message: message.into(),
            },
        }
    }

    pub fn error_code(&self) -> Option<ErrorCode> {
        match self {
            Response::Error { error } => Some(error.code),
            _ => None,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("responses serialize")
    }
}

impl From<&StepResult> for StepMsg {
    fn from(r: &StepResult) -> Self {
        let m = r.observation.shape()[1];
        let frames = r
            .observation
            .frames
            .iter()
            .map(|f| {
                f.cells
                    .chunks(m.max(1))
                    .map(|row| row.iter().map(|c| c.value()).collect())
                    .collect()
            })
            .collect();
        let all_min = r.info.distances.all_min;
        StepMsg {
            observation: ObservationMsg {
                frames,
                goal_state: GoalStateMsg {
                    distance: r.goal_state.distance,
                    bearing: r.goal_state.bearing,
                },
                last_action: [r.last_action.u_v, r.last_action.u_dtheta],
            },
            reward: r.reward,
            done: r.done,
            info: InfoMsg {
                step: r.info.step,
                time: r.info.time,
                nearest_margin: all_min.is_finite().then_some(all_min),
                intrusion: r.info.intrusion.attributed,
            },
        }
    }
}

/// Overlays `patch` onto `base`, recursing into objects.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// `base` with JSON overrides applied. Unknown keys are errors.
pub fn apply_overrides(base: &EnvConfig, overrides: Value) -> Result<EnvConfig, String> {
    if !overrides.is_object() {
        return Err("config overrides must be an object".into());
    }
    let mut value = serde_json::to_value(base).map_err(|e| e.to_string())?;
    merge(&mut value, overrides);
    let config: EnvConfig = serde_json::from_value(value).map_err(|e| e.to_string())?;
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn parse_action(action: &Value) -> Result<[f64; 2], String> {
    let items = action.as_array().ok_or("action must be an array")?;
    if items.len() != 2 {
        return Err(format!("action needs 2 components, got {}", items.len()));
    }
    let v = items[0].as_f64().ok_or("action components must be numbers")?;
    let d = items[1].as_f64().ok_or("action components must be numbers")?;
    Ok([v, d])
}

/// Per-connection protocol state.
pub struct Session {
    base: EnvConfig,
    env: Option<Env>,
    closed: bool,
}

impl Session {
    pub fn new(base: EnvConfig) -> Self {
        Session {
            base,
            env: None,
            closed: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn handle_line(&mut self, line: &str) -> Response {
        match serde_json::from_str::<Request>(line) {
            Ok(req) => self.handle(req),
            Err(e) => Response::error(ErrorCode::BadRequest, e.to_string()),
        }
    }

    pub fn handle(&mut self, req: Request) -> Response {
        match req {
            Request::Hello {} => Response::Hello {
                hello: HelloMsg {
                    protocol: PROTOCOL_VERSION.into(),
                    grid: self.base.grid,
                },
            },
            Request::Close {} => {
                self.closed = true;
                self.env = None;
                Response::Closed { closed: true }
            }
            Request::Reset { seed, config } => {
                let config = match config {
                    Some(o) => match apply_overrides(&self.base, o) {
                        Ok(c) => c,
                        Err(e) => return Response::error(ErrorCode::ConfigError, e),
                    },
                    None => self.base.clone(),
                };
                match Env::reset_with(config, seed) {
                    Ok((env, result)) => {
                        self.env = Some(env);
                        Response::Step(Box::new((&result).into()))
                    }
                    Err(e) => Response::error(ErrorCode::ConfigError, e.to_string()),
                }
            }
            Request::Step { action } => {
                let Some(env) = self.env.as_mut() else {
                    return Response::error(ErrorCode::NotReset, "step before reset");
                };
                let [v, d] = match parse_action(&action) {
                    Ok(a) => a,
                    Err(e) => return Response::error(ErrorCode::BadAction, e),
                };
                if env.status().is_done() {
                    return Response::error(ErrorCode::EpisodeDone, "episode already finished");
                }
                match env.step(v, d) {
                    Ok(result) => Response::Step(Box::new((&result).into())),
                    Err(e) => Response::error(ErrorCode::BadAction, e.to_string()),
                }
            }
        }
    }
}
