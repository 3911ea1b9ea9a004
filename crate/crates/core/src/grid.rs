//! Ego-centric grid observations.
//!
//! The polar LiDAR grid map (LGM) has `M` rings of width `L/M`, each split
//! into `M` angular segments, and is flattened so that row `i - 1` holds
//! ring `i` and column `j` holds segment `j` (segment 0 at the heading,
//! counterclockwise). The occupancy grid map (OGM) is an axis-aligned
//! `M x M` square of side `2L` centered on the robot.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ray_disk_entry, CircleEntity, Emotion, EntityKind, LidarScan, ScanSpec, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// LiDAR beam count.
    #[serde(rename = "K")]
    pub beams: usize,
    /// Rings, segments, and the side of the flattened image.
    #[serde(rename = "M")]
    pub size: usize,
    /// Map radius in meters.
    #[serde(rename = "L")]
    pub max_range: f64,
    /// Number of stacked frames.
    #[serde(rename = "N")]
    pub stack: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            beams: 1800,
            size: 100,
            max_range: 6.0,
            stack: 9,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.beams > 0
            && self.size > 0
            && self.size % 2 == 0
            && self.beams % self.size == 0
            && self.max_range > 0.0
            && self.max_range.is_finite()
            && self.stack > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("grid spec {self:?}")))
        }
    }

    pub fn scan_spec(&self) -> ScanSpec {
        ScanSpec {
            beam_count: self.beams,
            max_range: self.max_range,
        }
    }

    pub fn ring_width(&self) -> f64 {
        self.max_range / self.size as f64
    }

    pub fn beams_per_segment(&self) -> usize {
        self.beams / self.size
    }

    /// Ring (1-based) containing range `r > 0`, clamped to `[1, M]`.
    fn ring_of(&self, r: f64) -> usize {
        let ring = (self.size as f64 * r / self.max_range).ceil();
        (ring.max(1.0) as usize).min(self.size)
    }

    /// Center of polar cell `(ring, segment)` in the ego frame.
    pub fn polar_cell_center(&self, ring: usize, segment: usize) -> Vec2 {
        let radius = (ring as f64 - 0.5) * self.ring_width();
        let angle = (segment as f64 + 0.5) * TAU / self.size as f64;
        Vec2::from_angle(angle) * radius
    }

    pub fn ogm_cell_side(&self) -> f64 {
        2.0 * self.max_range / self.size as f64
    }

    /// Center of Cartesian cell `(row, col)`; row 0 is the `+y` edge.
    pub fn ogm_cell_center(&self, row: usize, col: usize) -> Vec2 {
        let s = self.ogm_cell_side();
        Vec2::new(
            -self.max_range + (col as f64 + 0.5) * s,
            self.max_range - (row as f64 + 0.5) * s,
        )
    }
}

/// Cell class, encoded as pixel intensity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CellClass {
    #[default]
    Free,
    Discomfort,
    Collision,
}

impl CellClass {
    pub fn value(self) -> f64 {
        match self {
            CellClass::Free => 0.0,
            CellClass::Discomfort => 0.5,
            CellClass::Collision => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridLayout {
    #[default]
    Lgm,
    Ogm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFrame {
    pub size: usize,
    /// Row-major, `size * size` cells.
    pub cells: Vec<CellClass>,
    /// Walking step at which the frame was taken.
    pub frame_index: u64,
    pub layout: GridLayout,
}

impl GridFrame {
    pub fn empty(size: usize, layout: GridLayout, frame_index: u64) -> Self {
        GridFrame {
            size,
            cells: vec![CellClass::Free; size * size],
            frame_index,
            layout,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> CellClass {
        self.cells[row * self.size + col]
    }

    /// LGM accessor: ring is 1-based.
    pub fn polar(&self, ring: usize, segment: usize) -> CellClass {
        self.get(ring - 1, segment)
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }

    fn mark_collision(&mut self, row: usize, col: usize) {
        self.cells[row * self.size + col] = CellClass::Collision;
    }

    fn mark_discomfort(&mut self, row: usize, col: usize) {
        let cell = &mut self.cells[row * self.size + col];
        if *cell != CellClass::Collision {
            *cell = CellClass::Discomfort;
        }
    }
}

/// `N` frames, oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct GridObservation {
    pub frames: Vec<GridFrame>,
}

impl GridObservation {
    /// Intensities, frame-major then row-major.
    pub fn values(&self) -> Vec<f64> {
        self.frames
            .iter()
            .flat_map(|f| f.cells.iter().map(|c| c.value()))
            .collect()
    }

    /// `[N, M, M]`.
    pub fn shape(&self) -> [usize; 3] {
        let m = self.frames.first().map_or(0, |f| f.size);
        [self.frames.len(), m, m]
    }
}

/// Discomfort distances beyond an entity's margin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmotionProfile {
    pub happy: f64,
    pub neutral: f64,
    pub negative: f64,
    /// Safety margin around static obstacles.
    pub d_static: f64,
}

impl Default for EmotionProfile {
    fn default() -> Self {
        EmotionProfile {
            happy: 0.2,
            neutral: 0.35,
            negative: 0.5,
            d_static: 0.2,
        }
    }
}

impl EmotionProfile {
    /// Same discomfort distance for every pedestrian regardless of emotion.
    pub fn uniform(d_ped: f64, d_static: f64) -> Self {
        EmotionProfile {
            happy: d_ped,
            neutral: d_ped,
            negative: d_ped,
            d_static,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.happy, self.neutral, self.negative, self.d_static];
        let ordered = self.happy <= self.neutral && self.neutral <= self.negative;
        if all.iter().all(|d| *d >= 0.0 && d.is_finite()) && ordered {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("emotion profile {self:?}")))
        }
    }

    pub fn for_emotion(&self, emotion: Emotion) -> f64 {
        match emotion {
            Emotion::Happy => self.happy,
            Emotion::Neutral => self.neutral,
            Emotion::Negative => self.negative,
        }
    }

    /// Width of the discomfort annulus around `entity`, if it has one.
    pub fn discomfort_distance(&self, entity: &CircleEntity) -> Option<f64> {
        match entity.kind {
            EntityKind::Static => Some(self.d_static),
            EntityKind::Pedestrian => entity.emotion.map(|e| self.for_emotion(e)),
            EntityKind::Robot => None,
        }
    }
}

/// Polar cell `(ring, segment)` containing an ego-frame point; `None` at the
/// origin or beyond `L`.
pub fn polar_index(point: Vec2, spec: &GridSpec) -> Option<(usize, usize)> {
    let r = point.length();
    if r == 0.0 || r > spec.max_range || !r.is_finite() {
        return None;
    }
    let ring = spec.ring_of(r);
    let angle = point.angle().rem_euclid(TAU);
    let segment = ((spec.size as f64 * angle / TAU).floor() as usize) % spec.size;
    Some((ring, segment))
}

/// Beams per square meter in ring `ring` (1-based).
pub fn grid_resolution(ring: usize, spec: &GridSpec) -> f64 {
    let m = spec.size as f64;
    spec.beams as f64 * m * m / (PI * spec.max_range * spec.max_range * (2 * ring - 1) as f64)
}

/// Mean LGM resolution over the disk, `(M / (sqrt(pi) L))^2`.
pub fn lgm_mean_resolution(spec: &GridSpec) -> f64 {
    let m = spec.size as f64;
    m * m / (PI * spec.max_range * spec.max_range)
}

/// OGM resolution, `(M / 2L)^2`.
pub fn ogm_resolution(spec: &GridSpec) -> f64 {
    let x = spec.size as f64 / (2.0 * spec.max_range);
    x * x
}

/// Tolerance for matching a scan range to an entity boundary crossing.
const HIT_MATCH_TOL: f64 = 1e-6;

/// Builds a polar grid frame from an ego-frame scan.
///
/// Each beam that returns before `L` marks the cell of its hit point as
/// Collision. When the hit belongs to one of `entities`, the stretch of the
/// beam inside that entity's discomfort disk (radius plus discomfort
/// distance) and before the hit marks its cells as Discomfort. Collision
/// takes precedence.
pub fn build_lgm(
    scan: &LidarScan,
    entities: &[CircleEntity],
    profile: &EmotionProfile,
    spec: &GridSpec,
    frame_index: u64,
) -> Result<GridFrame> {
    if scan.ranges.len() != spec.beams || scan.spec.max_range != spec.max_range {
        return Err(Error::InvalidParams(format!(
            "scan with {} beams / range {} does not match grid {spec:?}",
            scan.ranges.len(),
            scan.spec.max_range
        )));
    }
    let per_segment = spec.beams_per_segment();
    let mut frame = GridFrame::empty(spec.size, GridLayout::Lgm, frame_index);

    for (beam, &range) in scan.ranges.iter().enumerate() {
        if !(range < spec.max_range) {
            continue;
        }
        let segment = beam / per_segment;
        let hit_ring = spec.ring_of(range);
        frame.mark_collision(hit_ring - 1, segment);

        let dir = Vec2::from_angle(spec.scan_spec().bearing(beam));
        let hit_entity = entities
            .iter()
            .filter_map(|e| {
                let t = ray_disk_entry(Vec2::ZERO, dir, e.center, e.radius)?;
                ((t - range).abs() <= HIT_MATCH_TOL).then_some((t, e))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let Some((_, entity)) = hit_entity else {
            continue;
        };
        let Some(extra) = profile.discomfort_distance(entity) else {
            continue;
        };
        let outer = entity.radius + extra;
        let enter = if entity.center.length() <= outer {
            0.0
        } else {
            ray_disk_entry(Vec2::ZERO, dir, entity.center, outer).unwrap_or(range)
        };
        for ring in spec.ring_of(enter)..hit_ring {
            frame.mark_discomfort(ring - 1, segment);
        }
    }
    Ok(frame)
}

/// Builds a Cartesian occupancy frame by cell-center membership: Collision
/// inside any entity disk, Discomfort inside any discomfort disk.
pub fn build_ogm(
    entities: &[CircleEntity],
    profile: &EmotionProfile,
    spec: &GridSpec,
    frame_index: u64,
) -> GridFrame {
    let mut frame = GridFrame::empty(spec.size, GridLayout::Ogm, frame_index);
    let side = spec.ogm_cell_side();
    let l = spec.max_range;
    let m = spec.size;

    // Index range of cells whose centers may lie within `reach` of `c`.
    let span = |lo: f64, hi: f64| -> Option<(usize, usize)> {
        let first = ((lo / side) - 0.5).floor().max(0.0);
        let last = ((hi / side) - 0.5).ceil().min(m as f64 - 1.0);
        (first <= last).then(|| (first as usize, last as usize))
    };

    for pass in [CellClass::Discomfort, CellClass::Collision] {
        for e in entities {
            let reach = match pass {
                CellClass::Collision => e.radius,
                _ => match profile.discomfort_distance(e) {
                    Some(d) => e.radius + d,
                    None => continue,
                },
            };
            let Some((c0, c1)) = span(e.center.x - reach + l, e.center.x + reach + l) else {
                continue;
            };
            let Some((r0, r1)) = span(l - e.center.y - reach, l - e.center.y + reach) else {
                continue;
            };
            for row in r0..=r1 {
                for col in c0..=c1 {
                    let d_sq = (spec.ogm_cell_center(row, col) - e.center).length_squared();
                    if d_sq <= reach * reach {
                        match pass {
                            CellClass::Collision => frame.mark_collision(row, col),
                            _ => frame.mark_discomfort(row, col),
                        }
                    }
                }
            }
        }
    }
    frame
}

/// The newest `N` frames, oldest first. Short histories are padded at the
/// front by repeating the oldest available frame.
pub fn stack_frames<'a, I>(history: I, spec: &GridSpec) -> Result<GridObservation>
where
    I: IntoIterator<Item = &'a GridFrame>,
    I::IntoIter: DoubleEndedIterator + ExactSizeIterator,
{
    let iter = history.into_iter();
    let len = iter.len();
    if len == 0 {
        return Err(Error::InvalidParams("empty frame history".into()));
    }
    let keep: Vec<&GridFrame> = iter.skip(len.saturating_sub(spec.stack)).collect();
    let pad = spec.stack - keep.len();
    let frames = std::iter::repeat_n(keep[0], pad)
        .chain(keep.iter().copied())
        .cloned()
        .collect();
    Ok(GridObservation { frames })
}

/// Bounded frame history for one episode.
#[derive(Clone, Debug, Default)]
pub struct FrameHistory {
    frames: VecDeque<GridFrame>,
}

impl FrameHistory {
    pub fn push(&mut self, frame: GridFrame, spec: &GridSpec) {
        self.frames.push_back(frame);
        while self.frames.len() > spec.stack {
            self.frames.pop_front();
        }
    }

    pub fn clear(&mut self) {
        self.frames.clear();
    }

    pub fn observation(&self, spec: &GridSpec) -> Result<GridObservation> {
        stack_frames(self.frames.iter(), spec)
    }
}
