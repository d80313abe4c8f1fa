//! Mirror surface parametrizations and their normal fields.

use serde::{Deserialize, Serialize};

use super::vec3::Vec3;
use crate::error::GeomError;

/// Distance from the implicit surface below which a point counts as on it.
pub const ON_SURFACE_TOLERANCE: f64 = 1e-9;

/// Wall-mounted mirror shape, centred at the origin of the mirror frame.
///
/// * `Paraboloid` is the elliptic paraboloid `y = x²/A + z²/B + C` with
///   `A = -w²/(4l)`, `B = -h²/(4l)`, `C = l`, restricted to `y > 0`. Its
///   footprint on the wall is the ellipse with axes `w` and `h`.
/// * `SemiSphere` is the half of the sphere of radius `r` with `y > 0`.
/// * `Plane` is a `width × height` rectangle lying on the wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MirrorShape {
    Paraboloid { width: f64, depth: f64, height: f64 },
    SemiSphere { radius: f64 },
    Plane { width: f64, height: f64 },
}

impl MirrorShape {
    /// Builds a paraboloid, routing the zero-depth limit to a flat rectangle.
    pub fn paraboloid(width: f64, depth: f64, height: f64) -> Result<Self, GeomError> {
        if depth == 0.0 {
            return MirrorShape::plane(width, height);
        }
        let shape = MirrorShape::Paraboloid { width, depth, height };
        shape.validate()?;
        Ok(shape)
    }

    pub fn semi_sphere(radius: f64) -> Result<Self, GeomError> {
        let shape = MirrorShape::SemiSphere { radius };
        shape.validate()?;
        Ok(shape)
    }

    pub fn plane(width: f64, height: f64) -> Result<Self, GeomError> {
        let shape = MirrorShape::Plane { width, height };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(GeomError::InvalidDimension { name, value: v })
            }
        };
        match *self {
            MirrorShape::Paraboloid { width, depth, height } => {
                positive("width", width)?;
                positive("height", height)?;
                if depth == 0.0 {
                    return Err(GeomError::DegenerateParaboloid);
                }
                positive("depth", depth)
            }
            MirrorShape::SemiSphere { radius } => positive("radius", radius),
            MirrorShape::Plane { width, height } => {
                positive("width", width)?;
                positive("height", height)
            }
        }
    }

    /// How far the mirror protrudes from the wall into the room.
    pub fn depth(&self) -> f64 {
        match *self {
            MirrorShape::Paraboloid { depth, .. } => depth,
            MirrorShape::SemiSphere { radius } => radius,
            MirrorShape::Plane { .. } => 0.0,
        }
    }

    /// Extent along the wall in `x` and in `z`.
    pub fn wall_extent(&self) -> (f64, f64) {
        match *self {
            MirrorShape::Paraboloid { width, height, .. } => (width, height),
            MirrorShape::SemiSphere { radius } => (2.0 * radius, 2.0 * radius),
            MirrorShape::Plane { width, height } => (width, height),
        }
    }

    /// Area of the mirror's footprint on the wall.
    pub fn wall_area(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            MirrorShape::Paraboloid { width, height, .. } => PI * width * height / 4.0,
            MirrorShape::SemiSphere { radius } => PI * radius * radius,
            MirrorShape::Plane { width, height } => width * height,
        }
    }

    /// Reflective surface area. Closed form for the sphere and the plane;
    /// the paraboloid has no elementary expression and returns `None`.
    pub fn surface_area(&self) -> Option<f64> {
        match *self {
            MirrorShape::Paraboloid { .. } => None,
            MirrorShape::SemiSphere { radius } => Some(2.0 * std::f64::consts::PI * radius * radius),
            MirrorShape::Plane { width, height } => Some(width * height),
        }
    }

    /// Short human-readable label used in output series names.
    pub fn label(&self) -> String {
        match *self {
            MirrorShape::Paraboloid { width, depth, height } => format!("paraboloid(w={width},l={depth},h={height})"),
            MirrorShape::SemiSphere { radius } => format!("semisphere(r={radius})"),
            MirrorShape::Plane { width, height } => format!("plane(w={width},h={height})"),
        }
    }

    /// Signed residual of the implicit surface equation at `p`, in metres
    /// along `y` for the paraboloid and plane and radially for the sphere.
    fn surface_residual(&self, p: Vec3) -> f64 {
        match *self {
            MirrorShape::Paraboloid { width, depth, height } => {
                let (a, b, c) = paraboloid_coefficients(width, depth, height);
                p.y - (p.x * p.x / a + p.z * p.z / b + c)
            }
            MirrorShape::SemiSphere { radius } => p.norm() - radius,
            MirrorShape::Plane { .. } => p.y,
        }
    }
}

/// Coefficients `(A, B, C)` of `y = x²/A + z²/B + C`.
#[inline]
pub fn paraboloid_coefficients(width: f64, depth: f64, height: f64) -> (f64, f64, f64) {
    (-width * width / (4.0 * depth), -height * height / (4.0 * depth), depth)
}

/// Point of the paraboloid above wall coordinates `(x, z)`.
pub fn paraboloid_point(x: f64, z: f64, shape: &MirrorShape) -> Result<Vec3, GeomError> {
    let MirrorShape::Paraboloid { width, depth, height } = *shape else {
        return Err(GeomError::WrongShape("paraboloid"));
    };
    if depth == 0.0 {
        return Err(GeomError::DegenerateParaboloid);
    }
    if !(x.abs() < width / 2.0 && z.abs() < height / 2.0) {
        return Err(GeomError::OutOfDomain { x, z });
    }
    let (a, b, c) = paraboloid_coefficients(width, depth, height);
    let y = x * x / a + z * z / b + c;
    if y <= 0.0 {
        return Err(GeomError::OutOfDomain { x, z });
    }
    Ok(Vec3::new(x, y, z))
}

/// Unit normal at an on-surface point, pointing into the room.
pub fn surface_normal(point: Vec3, shape: &MirrorShape) -> Result<Vec3, GeomError> {
    let residual = shape.surface_residual(point);
    if !(residual.abs() <= ON_SURFACE_TOLERANCE) {
        return Err(GeomError::OffSurface { point, residual });
    }
    Ok(normal_unchecked(point, shape))
}

/// Normal field without the on-surface check; used by the mesher, which
/// only evaluates exact surface points.
pub(crate) fn normal_unchecked(point: Vec3, shape: &MirrorShape) -> Vec3 {
    match *shape {
        MirrorShape::Paraboloid { width, depth, height } => {
            let (a, b, _) = paraboloid_coefficients(width, depth, height);
            Vec3::new(-2.0 * point.x / a, 1.0, -2.0 * point.z / b).normalize()
        }
        MirrorShape::SemiSphere { .. } => point.normalize(),
        MirrorShape::Plane { .. } => Vec3::Y,
    }
}
