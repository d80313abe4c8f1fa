//! Human-body self-blockage of the line-of-sight link.
//!
//! A user is a vertical cylinder standing on the floor, holding an
//! upward-facing device on the receiver plane at a fixed horizontal offset
//! in the direction the user faces.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::grid::ReceiverGrid;
use crate::radiometry::{SourcePanel, SourceQuadrature};

/// Finite vertical cylinder. `base` is the centre of the bottom disc on the
/// floor; the body extends `height` upward, i.e. toward smaller `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub base: Vec3,
    pub radius: f64,
    pub height: f64,
}

impl Cylinder {
    /// A zero radius is accepted and describes a body that blocks nothing.
    pub fn new(base: Vec3, radius: f64, height: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("cylinder radius must be >= 0, got {radius}")));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::Domain(format!("cylinder height must be > 0, got {height}")));
        }
        Ok(Self { base, radius, height })
    }

    pub fn top_z(&self) -> f64 {
        self.base.z - self.height
    }
}

/// Body dimensions and placement rules for sampled users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyModel {
    pub radius: f64,
    pub height: f64,
    /// Horizontal distance from the body axis to the device.
    pub device_offset: f64,
    /// Mirror-frame `z` of the floor.
    pub floor_z: f64,
}

/// One randomly placed user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSample {
    pub device: Vec3,
    /// Facing direction, radians in `[0, 2π)` from `+x` toward `+y`.
    pub orientation: f64,
    pub body: Cylinder,
}

/// Draws a user whose device is uniform over `room` (on its receiver plane)
/// and whose orientation is uniform in `[0, 2π)`. The body stands behind the
/// device, `device_offset` away against the facing direction.
pub fn sample_user<R: Rng + ?Sized>(rng: &mut R, room: &ReceiverGrid, body: &BodyModel) -> UserSample {
    let x = room.x_min + rng.gen::<f64>() * room.width;
    let y = room.y_min + rng.gen::<f64>() * room.depth;
    let orientation = rng.gen::<f64>() * std::f64::consts::TAU;
    let (s, c) = orientation.sin_cos();
    let axis = Vec3::new(x - body.device_offset * c, y - body.device_offset * s, body.floor_z);
    UserSample {
        device: Vec3::new(x, y, room.z),
        orientation,
        body: Cylinder {
            base: axis,
            radius: body.radius,
            height: body.height,
        },
    }
}

/// Whether the open segment between `s` and `d` passes through the interior
/// of `body`. Tangent contact does not block.
pub fn segment_blocked(s: Vec3, d: Vec3, body: &Cylinder) -> bool {
    let delta = d - s;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);

    // portion of the segment inside the body's height range
    let (z_top, z_bottom) = (body.top_z(), body.base.z);
    if delta.z == 0.0 {
        if s.z < z_top || s.z > z_bottom {
            return false;
        }
    } else {
        let t1 = (z_top - s.z) / delta.z;
        let t2 = (z_bottom - s.z) / delta.z;
        lo = lo.max(t1.min(t2));
        hi = hi.min(t1.max(t2));
    }
    if lo >= hi {
        return false;
    }

    // portion strictly inside the circle in horizontal projection
    let (ox, oy) = (s.x - body.base.x, s.y - body.base.y);
    let a = delta.x * delta.x + delta.y * delta.y;
    let b = 2.0 * (ox * delta.x + oy * delta.y);
    let c = ox * ox + oy * oy - body.radius * body.radius;
    if a == 0.0 {
        return c < 0.0;
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return false;
    }
    let root = disc.sqrt();
    let t_in = (-b - root) / (2.0 * a);
    let t_out = (-b + root) / (2.0 * a);
    lo.max(t_in) < hi.min(t_out)
}

/// True when the user's body cuts the path from every quadrature cell of
/// the panel to the device.
pub fn los_fully_blocked(user: &UserSample, source: &SourcePanel, quadrature: SourceQuadrature) -> bool {
    quadrature
        .cell_centers(source)
        .into_iter()
        .all(|s| segment_blocked(s, user.device, &user.body))
}

/// Grid map of locations where some sampled user lost every LoS path.
#[derive(Debug, Clone)]
pub struct BlockageMap {
    pub grid: ReceiverGrid,
    pub blocked: Vec<bool>,
}

impl BlockageMap {
    pub fn shaded_fraction(&self) -> f64 {
        self.blocked.iter().filter(|&&b| b).count() as f64 / self.blocked.len() as f64
    }
}

/// Distributes `n_users` random users over `grid` and marks each cell that
/// received at least one fully blocked user.
pub fn potential_blockage_map<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &ReceiverGrid,
    source: &SourcePanel,
    body: &BodyModel,
    quadrature: SourceQuadrature,
    n_users: usize,
) -> BlockageMap {
    let users: Vec<UserSample> = (0..n_users).map(|_| sample_user(rng, grid, body)).collect();
    let cells = quadrature.cell_centers(source);
    let hits: Vec<usize> = users
        .par_iter()
        .filter(|u| cells.iter().all(|&s| segment_blocked(s, u.device, &u.body)))
        .filter_map(|u| grid.locate(u.device.x, u.device.y).map(|(i, j)| grid.index(i, j)))
        .collect();
    let mut blocked = vec![false; grid.len()];
    for k in hits {
        blocked[k] = true;
    }
    BlockageMap { grid: *grid, blocked }
}
