//! Extended Lambertian source, line-of-sight irradiance and the radiance
//! seen at a mirror point along a specular path.
//!
//! Every directional cosine that enters a power computation is clamped at
//! zero from below: the source emits only downward, the detector only
//! accepts light from above and mirrors reflect on their front side only.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::blockage::{segment_blocked, Cylinder};
use crate::error::{Error, Result};
use crate::geom::{intersect_source_plane, reflect_incident_direction, SurfaceSample, Vec3};

/// Lambertian emission order `m = -1 / log2(cos(phi_half))`.
pub fn lambertian_order(half_power_angle: f64) -> Result<f64> {
    if !(half_power_angle > 0.0 && half_power_angle < FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "half-power semi-angle must lie in (0, pi/2) rad, got {half_power_angle}"
        )));
    }
    Ok(-1.0 / half_power_angle.cos().log2())
}

/// Rectangular ceiling panel with uniform Lambertian emission.
///
/// The panel lies in the horizontal plane through `center`, spans `width`
/// along `x` and `length` along `y`, and faces the floor (`+z`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourcePanel {
    center: Vec3,
    width: f64,
    length: f64,
    power: f64,
    half_power_angle: f64,
    order: f64,
    power_density: f64,
}

impl SourcePanel {
    pub fn new(center: Vec3, width: f64, length: f64, power: f64, half_power_angle: f64) -> Result<Self> {
        for (name, v) in [("width", width), ("length", length), ("power", power)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("source {name} must be positive, got {v}")));
            }
        }
        let order = lambertian_order(half_power_angle)?;
        Ok(Self {
            center,
            width,
            length,
            power,
            half_power_angle,
            order,
            power_density: power / (width * length),
        })
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn area(&self) -> f64 {
        self.width * self.length
    }
    /// Total optical power in W.
    pub fn power(&self) -> f64 {
        self.power
    }
    pub fn half_power_angle(&self) -> f64 {
        self.half_power_angle
    }
    /// Lambertian order `m`.
    pub fn order(&self) -> f64 {
        self.order
    }
    /// Emitted power per unit panel area, W/m².
    pub fn power_density(&self) -> f64 {
        self.power_density
    }

    /// `(m + 1) P_S / 2π`, the radiance scale shared by every emission term.
    #[inline]
    pub fn radiance_scale(&self) -> f64 {
        (self.order + 1.0) * self.power_density / (2.0 * PI)
    }

    /// Whether a point of the source plane lies on the panel (edges included).
    #[inline]
    pub fn contains(&self, p: Vec3) -> bool {
        (p.x - self.center.x).abs() <= self.width / 2.0 && (p.y - self.center.y).abs() <= self.length / 2.0
    }

    /// The four panel corners, in the source plane.
    pub fn corners(&self) -> [Vec3; 4] {
        let (hw, hl) = (self.width / 2.0, self.length / 2.0);
        let c = self.center;
        [
            Vec3::new(c.x - hw, c.y - hl, c.z),
            Vec3::new(c.x + hw, c.y - hl, c.z),
            Vec3::new(c.x + hw, c.y + hl, c.z),
            Vec3::new(c.x - hw, c.y + hl, c.z),
        ]
    }

    /// Same panel with a different footprint, keeping the total power.
    pub fn resized(&self, width: f64, length: f64) -> Result<Self> {
        Self::new(self.center, width, length, self.power, self.half_power_angle)
    }
}

/// Midpoint-rule cell counts over the source panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceQuadrature {
    pub n_x: usize,
    pub n_y: usize,
}

impl SourceQuadrature {
    pub const fn new(n_x: usize, n_y: usize) -> Self {
        Self { n_x, n_y }
    }

    pub const fn square(n: usize) -> Self {
        Self { n_x: n, n_y: n }
    }

    /// Centres of the quadrature cells, row-major over `(x, y)`.
    pub fn cell_centers(&self, source: &SourcePanel) -> Vec<Vec3> {
        let c = source.center();
        let dx = source.width() / self.n_x as f64;
        let dy = source.length() / self.n_y as f64;
        let mut out = Vec::with_capacity(self.n_x * self.n_y);
        for i in 0..self.n_x {
            let x = c.x - source.width() / 2.0 + (i as f64 + 0.5) * dx;
            for j in 0..self.n_y {
                let y = c.y - source.length() / 2.0 + (j as f64 + 0.5) * dy;
                out.push(Vec3::new(x, y, c.z));
            }
        }
        out
    }
}

impl Default for SourceQuadrature {
    fn default() -> Self {
        Self::square(50)
    }
}

/// Upward-facing point photodetector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Photodetector {
    pub position: Vec3,
    /// Active area, m².
    pub area: f64,
    /// Responsivity, A/W.
    pub responsivity: f64,
}

/// Line-of-sight irradiance at an upward-facing detector at `d`.
///
/// Midpoint quadrature of `(m+1) P_S / 2π ∫ cos^(m+1)(θ) / |S - D|² dS`.
/// Cells whose straight path to `d` crosses `blocker` contribute nothing.
pub fn los_irradiance(
    d: Vec3,
    source: &SourcePanel,
    quadrature: SourceQuadrature,
    blocker: Option<&Cylinder>,
) -> Result<f64> {
    if quadrature.n_x == 0 || quadrature.n_y == 0 {
        return Err(Error::config(
            "quadrature",
            format!("source quadrature {}x{} has no cells", quadrature.n_x, quadrature.n_y),
        ));
    }
    let exponent = source.order() + 1.0;
    let cell_area = source.area() / (quadrature.n_x * quadrature.n_y) as f64;
    let mut sum = 0.0;
    for s in quadrature.cell_centers(source) {
        if let Some(body) = blocker {
            if segment_blocked(s, d, body) {
                continue;
            }
        }
        let to_d = d - s;
        let dist2 = to_d.norm_squared();
        let cos = (to_d.z / dist2.sqrt()).max(0.0);
        sum += cos.powf(exponent) / dist2;
    }
    Ok(source.radiance_scale() * sum * cell_area)
}

/// Optical power collected by the detector from irradiance `irradiance`.
#[inline]
pub fn los_received_power(irradiance: f64, pd: &Photodetector) -> f64 {
    irradiance * pd.area
}

/// Radiance arriving at mirror sample `r` along the specular path that
/// leaves toward `d`, in W/(m²·sr).
///
/// `None` when the mirror faces away from `d`, or when the path traced back
/// by the law of reflection misses the source panel.
#[inline]
pub fn radiance_at(r: &SurfaceSample, d: Vec3, source: &SourcePanel) -> Option<f64> {
    let toward_d = (d - r.point).try_normalize()?;
    radiance_along(r, toward_d, source)
}

#[inline]
pub(crate) fn radiance_along(r: &SurfaceSample, toward_d: Vec3, source: &SourcePanel) -> Option<f64> {
    let incident = reflect_incident_direction(toward_d, r.normal)?;
    let hit = intersect_source_plane(r.point, incident, source.center()).ok()??;
    if !source.contains(hit) {
        return None;
    }
    // cosine of the emission angle at the panel, measured from its +z normal
    let cos = incident.z;
    if !(cos > 0.0) {
        return None;
    }
    Some(source.radiance_scale() * cos.powf(source.order() - 1.0))
}
