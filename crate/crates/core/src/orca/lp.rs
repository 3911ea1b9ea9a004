//! Two-dimensional incremental linear program over velocity half-planes,
//! with the three-dimensional fallback that minimizes the largest
//! constraint violation when the half-planes have no common point.

use crate::geometry::Vec2;

const EPSILON: f64 = 1e-9;

/// Velocity-space constraint `(v - point) . normal >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub point: Vec2,
    /// Unit normal pointing into the permitted side.
    pub normal: Vec2,
}

impl HalfPlane {
    pub fn new(point: Vec2, normal: Vec2) -> Self {
        HalfPlane { point, normal }
    }

    /// Boundary direction; the permitted side lies to its left.
    pub fn direction(&self) -> Vec2 {
        Vec2::new(self.normal.y, -self.normal.x)
    }

    fn from_direction(point: Vec2, direction: Vec2) -> Self {
        HalfPlane {
            point,
            normal: direction.perp(),
        }
    }

    /// Signed violation of `v`: positive when `v` is outside.
    pub fn violation(&self, v: Vec2) -> f64 {
        (self.point - v).dot(self.normal)
    }
}

/// Velocity of magnitude at most `max_speed` closest to `preferred` inside
/// every half-plane. When no such velocity exists, returns the velocity that
/// minimizes the largest violation.
pub fn solve_velocity_lp(planes: &[HalfPlane], preferred: Vec2, max_speed: f64) -> Vec2 {
    let mut result = Vec2::ZERO;
    let failed = lp2(planes, max_speed, preferred, false, &mut result);
    if failed < planes.len() {
        lp3(planes, failed, max_speed, &mut result);
    }
    result
}

/// Optimizes along the boundary of plane `index` subject to planes before it.
fn lp1(
    planes: &[HalfPlane],
    index: usize,
    radius: f64,
    opt: Vec2,
    direction_opt: bool,
    result: &mut Vec2,
) -> bool {
    let line = &planes[index];
    let dir = line.direction();
    let dot = line.point.dot(dir);
    let disc = dot * dot + radius * radius - line.point.length_squared();
    if disc < 0.0 {
        // Boundary misses the speed disk entirely.
        return false;
    }
    let sqrt_disc = disc.sqrt();
    let mut t_left = -dot - sqrt_disc;
    let mut t_right = -dot + sqrt_disc;

    for other in &planes[..index] {
        let other_dir = other.direction();
        let denom = dir.det(other_dir);
        let numer = other_dir.det(line.point - other.point);
        if denom.abs() <= EPSILON {
            if numer < 0.0 {
                return false;
            }
            continue;
        }
        let t = numer / denom;
        if denom >= 0.0 {
            t_right = t_right.min(t);
        } else {
            t_left = t_left.max(t);
        }
        if t_left > t_right {
            return false;
        }
    }

    let t = if direction_opt {
        if opt.dot(dir) > 0.0 {
            t_right
        } else {
            t_left
        }
    } else {
        dir.dot(opt - line.point).clamp(t_left, t_right)
    };
    *result = line.point + dir * t;
    true
}

/// Returns `planes.len()` on success, or the index of the first plane that
/// could not be satisfied.
fn lp2(planes: &[HalfPlane], radius: f64, opt: Vec2, direction_opt: bool, result: &mut Vec2) -> usize {
    *result = if direction_opt {
        opt * radius
    } else if opt.length_squared() > radius * radius {
        opt.normalize_or_zero() * radius
    } else {
        opt
    };
    for i in 0..planes.len() {
        if planes[i].violation(*result) > 0.0 {
            let before = *result;
            if !lp1(planes, i, radius, opt, direction_opt, result) {
                *result = before;
                return i;
            }
        }
    }
    planes.len()
}

fn lp3(planes: &[HalfPlane], begin: usize, radius: f64, result: &mut Vec2) {
    let mut distance = 0.0;
    for i in begin..planes.len() {
        let pi = &planes[i];
        if pi.violation(*result) <= distance {
            continue;
        }
        let dir_i = pi.direction();
        let mut projected = Vec::with_capacity(i);
        for pj in &planes[..i] {
            let dir_j = pj.direction();
            let determinant = dir_i.det(dir_j);
            let point = if determinant.abs() <= EPSILON {
                if dir_i.dot(dir_j) > 0.0 {
                    continue;
                }
                (pi.point + pj.point) * 0.5
            } else {
                pi.point + dir_i * (dir_j.det(pi.point - pj.point) / determinant)
            };
            projected.push(HalfPlane::from_direction(point, (dir_j - dir_i).normalize_or_zero()));
        }
        let before = *result;
        if lp2(&projected, radius, pi.normal, true, result) < projected.len() {
            // Only reachable through floating-point round-off.
            *result = before;
        }
        distance = pi.violation(*result);
    }
}
