//! Law-of-reflection ray transport between the mirror and the source plane.

use super::vec3::Vec3;
use crate::error::GeomError;

/// Direction of the ray that, after specular reflection at a surface with
/// unit normal `normal`, leaves toward `toward_detector`.
///
/// Both inputs are unit vectors; the result is the unit vector travelling
/// from the incident point on the source plane toward the mirror point,
/// `-(2 (n·d) n - d)`. Returns `None` when `toward_detector` lies behind the
/// surface, where a one-sided mirror contributes nothing.
#[inline]
pub fn reflect_incident_direction(toward_detector: Vec3, normal: Vec3) -> Option<Vec3> {
    let cos = normal.dot(toward_detector);
    if cos < 0.0 {
        return None;
    }
    Some(toward_detector - normal * (2.0 * cos))
}

/// Point where the ray arriving at `mirror_point` along `incident_dir`
/// originates on the horizontal plane through `source_center`.
///
/// `incident_dir` points from the source plane toward the mirror point, so
/// the plane is reached by walking backwards along it. `Ok(None)` means the
/// backward ray moves away from the plane.
#[inline]
pub fn intersect_source_plane(
    mirror_point: Vec3,
    incident_dir: Vec3,
    source_center: Vec3,
) -> Result<Option<Vec3>, GeomError> {
    if incident_dir.z == 0.0 {
        return Err(GeomError::ParallelRay);
    }
    let t = (mirror_point.z - source_center.z) / incident_dir.z;
    if !(t > 0.0) {
        return Ok(None);
    }
    let hit = mirror_point - incident_dir * t;
    Ok(Some(Vec3::new(hit.x, hit.y, source_center.z)))
}
