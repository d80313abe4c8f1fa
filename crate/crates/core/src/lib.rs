//! Simulation of indoor visible-light links assisted by wall-mounted
//! mirrors: paraboloid, semi-spherical and flat.
//!
//! The crate computes line-of-sight irradiance from an extended Lambertian
//! ceiling panel, mirror-reflected irradiance by exact surface summation and
//! by a single-patch approximation, body-blockage maps, shadowing
//! probabilities and SNR distributions over a receiver grid.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blockage;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod grid;
pub mod metrics;
pub mod nlos;
pub mod radiometry;
pub mod scenario;

pub use error::{Error, GeomError, Result};
