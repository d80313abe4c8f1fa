//! Mirror-frame geometry: vectors, mirror shapes, meshing and reflection.

mod mesh;
mod optics;
mod shape;
mod vec3;

pub use mesh::{mesh_surface, MeshResolution, SurfaceMesh, SurfaceSample};
pub use optics::{intersect_source_plane, reflect_incident_direction};
pub use shape::{paraboloid_coefficients, paraboloid_point, surface_normal, MirrorShape, ON_SURFACE_TOLERANCE};
pub use vec3::Vec3;
