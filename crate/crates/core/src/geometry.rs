//! Planar geometry: vectors, poses, disk-shaped entities and a ray-cast
//! LiDAR model against disks.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2-D vector in meters (or m/s in velocity space).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at `angle` radians from the +x axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2 { x: c, y: s }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product (the 2x2 determinant).
    pub fn det(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn length_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).length()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2 { x: -self.y, y: self.x }
    }

    pub fn normalize_or_zero(self) -> Vec2 {
        let len = self.length();
        if len > 0.0 {
            self / len
        } else {
            Vec2::ZERO
        }
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2 {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

/// Position plus heading (radians, counterclockwise from +x).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub heading: f64,
}

impl Pose {
    pub const fn new(position: Vec2, heading: f64) -> Self {
        Pose { position, heading }
    }

    /// Expresses a world-frame point in this pose's ego frame.
    pub fn to_local(&self, world: Vec2) -> Vec2 {
        (world - self.position).rotate(-self.heading)
    }

    pub fn to_world(&self, local: Vec2) -> Vec2 {
        local.rotate(self.heading) + self.position
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Static,
    Pedestrian,
    Robot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emotion {
    Happy,
    Neutral,
    Negative,
}

impl Emotion {
    pub const ALL: [Emotion; 3] = [Emotion::Happy, Emotion::Neutral, Emotion::Negative];

    /// Next emotion in the Happy -> Neutral -> Negative -> Happy cycle.
    pub fn next(self) -> Emotion {
        match self {
            Emotion::Happy => Emotion::Neutral,
            Emotion::Neutral => Emotion::Negative,
            Emotion::Negative => Emotion::Happy,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Emotion::Happy => 0,
            Emotion::Neutral => 1,
            Emotion::Negative => 2,
        }
    }
}

/// Any world object modeled as a disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleEntity {
    pub kind: EntityKind,
    pub center: Vec2,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotion: Option<Emotion>,
}

impl CircleEntity {
    pub fn new_static(center: Vec2, radius: f64) -> Self {
        CircleEntity {
            kind: EntityKind::Static,
            center,
            radius,
            emotion: None,
        }
    }

    pub fn new_pedestrian(center: Vec2, radius: f64, emotion: Emotion) -> Self {
        CircleEntity {
            kind: EntityKind::Pedestrian,
            center,
            radius,
            emotion: Some(emotion),
        }
    }

    pub fn new_robot(center: Vec2, radius: f64) -> Self {
        CircleEntity {
            kind: EntityKind::Robot,
            center,
            radius,
            emotion: None,
        }
    }

    /// Checks the kind-independent invariants: finite center, positive
    /// radius, emotion present iff pedestrian.
    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() || !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidEntity(format!(
                "center {:?} radius {}",
                self.center, self.radius
            )));
        }
        let is_ped = self.kind == EntityKind::Pedestrian;
        if is_ped != self.emotion.is_some() {
            return Err(Error::InvalidEntity(format!(
                "{:?} with emotion {:?}",
                self.kind, self.emotion
            )));
        }
        Ok(())
    }

    /// Distance from `point` to this entity's margin (center distance minus
    /// radius). Negative inside the disk.
    pub fn margin_distance(&self, point: Vec2) -> f64 {
        point.distance(self.center) - self.radius
    }

    pub fn in_frame(&self, pose: &Pose) -> CircleEntity {
        CircleEntity {
            center: pose.to_local(self.center),
            ..*self
        }
    }
}

/// Beam count and maximum range of a LiDAR.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub beam_count: usize,
    pub max_range: f64,
}

impl ScanSpec {
    pub fn new(beam_count: usize, max_range: f64) -> Result<Self> {
        if beam_count == 0 || !(max_range > 0.0) || !max_range.is_finite() {
            return Err(Error::InvalidScanSpec {
                beam_count,
                max_range,
            });
        }
        Ok(ScanSpec {
            beam_count,
            max_range,
        })
    }

    /// Ego-frame bearing of beam `b`: beam 0 along the heading, counterclockwise.
    pub fn bearing(&self, beam: usize) -> f64 {
        TAU * beam as f64 / self.beam_count as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LidarScan {
    pub ranges: Vec<f64>,
    pub spec: ScanSpec,
    pub origin: Pose,
}

impl LidarScan {
    pub fn beam_count(&self) -> usize {
        self.spec.beam_count
    }

    pub fn max_range(&self) -> f64 {
        self.spec.max_range
    }

    /// Ego-frame hit point of beam `b`.
    pub fn local_point(&self, beam: usize) -> Vec2 {
        Vec2::from_angle(self.spec.bearing(beam)) * self.ranges[beam]
    }
}

/// Distance along a unit ray from `origin` to the first crossing of the disk
/// boundary, when the origin is outside the disk. Tangent rays count as hits.
pub(crate) fn ray_disk_entry(origin: Vec2, dir: Vec2, center: Vec2, radius: f64) -> Option<f64> {
    let to_center = center - origin;
    let along = to_center.dot(dir);
    let perp_sq = to_center.length_squared() - along * along;
    let disc = radius * radius - perp_sq;
    if disc < 0.0 {
        return None;
    }
    let t = along - disc.sqrt();
    if t >= 0.0 {
        Some(t)
    } else {
        None
    }
}

/// Casts `spec.beam_count` beams from `pose` against every disk in `entities`.
///
/// Range `b` is the distance to the nearest disk boundary along the beam at
/// bearing `heading + 2*pi*b/K`, or `max_range` when nothing lies within it.
/// Fails when the ray origin lies strictly inside an entity.
pub fn ray_cast(pose: Pose, entities: &[CircleEntity], spec: ScanSpec) -> Result<LidarScan> {
    for (index, e) in entities.iter().enumerate() {
        if pose.position.distance(e.center) < e.radius {
            return Err(Error::OriginInsideEntity { index });
        }
    }
    let ranges = (0..spec.beam_count)
        .map(|b| {
            let dir = Vec2::from_angle(pose.heading + spec.bearing(b));
            entities
                .iter()
                .filter_map(|e| ray_disk_entry(pose.position, dir, e.center, e.radius))
                .fold(spec.max_range, f64::min)
        })
        .collect();
    Ok(LidarScan {
        ranges,
        spec,
        origin: pose,
    })
}

/// Rebuilds a scan from detected object centers (ego frame) by treating
/// every detection as a disk of `fixed_radius`.
pub fn reconstruct_scan(detections: &[Vec2], spec: ScanSpec, fixed_radius: f64) -> Result<LidarScan> {
    if !(fixed_radius > 0.0) {
        return Err(Error::InvalidEntity(format!(
            "reconstruction radius {fixed_radius}"
        )));
    }
    let disks: Vec<CircleEntity> = detections
        .iter()
        .map(|&c| CircleEntity::new_static(c, fixed_radius))
        .collect();
    ray_cast(Pose::default(), &disks, spec)
}

/// Robot-center to entity-margin distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginDistances {
    pub all_min: f64,
    pub static_min: f64,
    /// One entry per pedestrian, in entity order.
    pub per_pedestrian: Vec<f64>,
}

/// Minimum distances from the robot center to entity margins. Empty
/// categories yield `f64::INFINITY`.
pub fn min_margin_distances(robot: &CircleEntity, entities: &[CircleEntity]) -> MarginDistances {
    let mut out = MarginDistances {
        all_min: f64::INFINITY,
        static_min: f64::INFINITY,
        per_pedestrian: Vec::new(),
    };
    for e in entities {
        let d = e.margin_distance(robot.center);
        match e.kind {
            EntityKind::Static => out.static_min = out.static_min.min(d),
            EntityKind::Pedestrian => out.per_pedestrian.push(d),
            EntityKind::Robot => continue,
        }
        out.all_min = out.all_min.min(d);
    }
    out
}
