use thiserror::Error;

use crate::geom::Vec3;

/// Geometric failures: bad shape dimensions, out-of-domain evaluation and
/// degenerate rays.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("{name} must be positive and finite, got {value}")]
    InvalidDimension { name: &'static str, value: f64 },
    #[error("paraboloid with zero depth is flat; use a plane mirror")]
    DegenerateParaboloid,
    #[error("wall coordinates ({x}, {z}) lie outside the paraboloid footprint")]
    OutOfDomain { x: f64, z: f64 },
    #[error("operation requires a {0} mirror")]
    WrongShape(&'static str),
    #[error("point {point} is {residual} m off the mirror surface")]
    OffSurface { point: Vec3, residual: f64 },
    #[error("ray is parallel to the source plane")]
    ParallelRay,
    #[error("mesh resolution {n_u}x{n_v} is below the 2x2 minimum")]
    Resolution { n_u: usize, n_v: usize },
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{key}: {message}")]
    Config { key: String, message: String },
    #[error("out of domain: {0}")]
    Domain(String),
    #[error("infeasible geometry: {0}")]
    Geometry(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors caused by the user's configuration rather than the run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::Geom(_) | Error::Domain(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
