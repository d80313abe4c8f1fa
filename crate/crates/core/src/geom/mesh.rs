//! Midpoint discretization of mirror surfaces into area-weighted samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::shape::{normal_unchecked, paraboloid_coefficients, MirrorShape};
use super::vec3::Vec3;
use crate::error::GeomError;

/// A surface point with its outward unit normal and the area it represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub point: Vec3,
    pub normal: Vec3,
    pub area: f64,
}

/// Number of parameter cells along each surface coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshResolution {
    pub n_u: usize,
    pub n_v: usize,
}

impl MeshResolution {
    pub const MIN: usize = 2;

    pub const fn new(n_u: usize, n_v: usize) -> Self {
        Self { n_u, n_v }
    }

    pub const fn square(n: usize) -> Self {
        Self { n_u: n, n_v: n }
    }

    pub fn doubled(self) -> Self {
        Self::new(self.n_u * 2, self.n_v * 2)
    }

    /// Uniform counts that place about `samples_per_patch` samples across the
    /// smallest mirror region able to reflect the whole source toward a
    /// detector, clamped to `[FLOOR, CEILING]` per axis.
    ///
    /// A convex mirror with local radius of curvature `R` shows a source of
    /// linear size `s` at distance `d` as an image about `s·R / (2d)` across,
    /// and that image is smallest at the paraboloid apex. A coarser mesh
    /// lets the image fall between samples, which reads as spurious shadow.
    pub fn resolving(shape: &MirrorShape, source_size: f64, source_distance: f64, samples_per_patch: f64) -> Self {
        let need = |span: f64, radius: f64| {
            let image = source_size * radius / (2.0 * source_distance);
            let n = (samples_per_patch * span / image).ceil();
            if n.is_finite() {
                (n as usize).clamp(Self::FLOOR, Self::CEILING)
            } else {
                Self::CEILING
            }
        };
        match *shape {
            MirrorShape::Paraboloid { width, depth, height } => Self::new(
                need(width, width * width / (8.0 * depth)),
                need(height, height * height / (8.0 * depth)),
            ),
            MirrorShape::SemiSphere { radius } => {
                let n = need(PI * radius, radius);
                Self::square(n)
            }
            MirrorShape::Plane { .. } => Self::square(Self::FLOOR),
        }
    }

    /// Smallest per-axis count chosen by [`MeshResolution::resolving`].
    pub const FLOOR: usize = 256;
    /// Largest per-axis count chosen by [`MeshResolution::resolving`].
    pub const CEILING: usize = 4096;
}

impl Default for MeshResolution {
    fn default() -> Self {
        Self::square(256)
    }
}

/// Ordered samples covering one mirror.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub shape: MirrorShape,
    pub samples: Vec<SurfaceSample>,
    pub resolution: MeshResolution,
}

impl SurfaceMesh {
    pub fn total_area(&self) -> f64 {
        self.samples.iter().map(|s| s.area).sum()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Discretizes `shape` on a `resolution` parameter grid.
///
/// Parametrizations, all evaluated at cell midpoints and emitted in
/// row-major order (outer index `u`, inner index `v`):
///
/// * paraboloid: `u` along `x`, `v` along `z` over the bounding rectangle of
///   the footprint; cells whose midpoint falls outside the elliptical rim
///   (`y <= 0`) are dropped. Area element `sqrt(1 + y_x² + y_z²) dx dz`.
/// * semi-sphere: `u` is the polar angle from `+z` in `(0, π)`, `v` the
///   azimuth from `+x` toward `+y` in `(0, π)`, which keeps every sample in
///   `y > 0`. Area element `r² sin(θ) dθ dφ`.
/// * plane: `u` along `x`, `v` along `z`, uniform cells.
pub fn mesh_surface(shape: &MirrorShape, resolution: MeshResolution) -> Result<SurfaceMesh, GeomError> {
    if resolution.n_u < MeshResolution::MIN || resolution.n_v < MeshResolution::MIN {
        return Err(GeomError::Resolution {
            n_u: resolution.n_u,
            n_v: resolution.n_v,
        });
    }
    shape.validate()?;
    let (n_u, n_v) = (resolution.n_u, resolution.n_v);
    let mut samples = Vec::with_capacity(n_u * n_v);

    match *shape {
        MirrorShape::Paraboloid { width, depth, height } => {
            let (a, b, c) = paraboloid_coefficients(width, depth, height);
            let dx = width / n_u as f64;
            let dz = height / n_v as f64;
            for i in 0..n_u {
                let x = -width / 2.0 + (i as f64 + 0.5) * dx;
                for j in 0..n_v {
                    let z = -height / 2.0 + (j as f64 + 0.5) * dz;
                    let y = x * x / a + z * z / b + c;
                    if y <= 0.0 {
                        continue;
                    }
                    let (gx, gz) = (2.0 * x / a, 2.0 * z / b);
                    let point = Vec3::new(x, y, z);
                    samples.push(SurfaceSample {
                        point,
                        normal: normal_unchecked(point, shape),
                        area: (1.0 + gx * gx + gz * gz).sqrt() * dx * dz,
                    });
                }
            }
        }
        MirrorShape::SemiSphere { radius } => {
            let d_theta = PI / n_u as f64;
            let d_phi = PI / n_v as f64;
            for i in 0..n_u {
                let theta = (i as f64 + 0.5) * d_theta;
                let (sin_t, cos_t) = theta.sin_cos();
                let area = radius * radius * sin_t * d_theta * d_phi;
                for j in 0..n_v {
                    let phi = (j as f64 + 0.5) * d_phi;
                    let (sin_p, cos_p) = phi.sin_cos();
                    let normal = Vec3::new(sin_t * cos_p, sin_t * sin_p, cos_t);
                    samples.push(SurfaceSample {
                        point: normal * radius,
                        normal,
                        area,
                    });
                }
            }
        }
        MirrorShape::Plane { width, height } => {
            let dx = width / n_u as f64;
            let dz = height / n_v as f64;
            let area = dx * dz;
            for i in 0..n_u {
                let x = -width / 2.0 + (i as f64 + 0.5) * dx;
                for j in 0..n_v {
                    let z = -height / 2.0 + (j as f64 + 0.5) * dz;
                    samples.push(SurfaceSample {
                        point: Vec3::new(x, 0.0, z),
                        normal: Vec3::Y,
                        area,
                    });
                }
            }
        }
    }

    Ok(SurfaceMesh {
        shape: *shape,
        samples,
        resolution,
    })
}
