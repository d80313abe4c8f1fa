//! Scenario configuration: a flat `key = value` text schema with defaults
//! for every key, validation that names the offending key, and conversion
//! into the mirror-centred frame used by the solvers.
//!
//! Room coordinates put the origin at a floor-level corner of the mirror
//! wall, `x` along the wall, `y` into the room and heights measured upward.
//! The solvers work in the mirror frame: origin at the mirror centre, `+x`
//! along the wall, `+y` into the room and `+z` toward the floor.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `room.width` | 4 | extent along the mirror wall, m |
//! | `room.depth` | 4 | extent away from the mirror wall, m |
//! | `room.height` | 3 | floor to ceiling, m |
//! | `receiver.height` | 1 | receiver plane above the floor, m |
//! | `mirror.center` | `2, 0, 1` | along wall, off wall (must be 0), above receiver plane |
//! | `mirror.shape` | `paraboloid` | `paraboloid`, `semi_sphere` or `plane` |
//! | `mirror.width` | 0.4 | paraboloid or plane width, m |
//! | `mirror.depth` | 0.1 | paraboloid depth out of the wall, m |
//! | `mirror.height` | 0.5 | paraboloid or plane height, m |
//! | `mirror.radius` | 0.2236 | semi-sphere radius, m |
//! | `mirror.reflectance` | 0.99 | specular reflection coefficient |
//! | `source.height` | 2 | panel above the receiver plane, m |
//! | `source.x` | 0 | panel centre along the wall, from the mirror centre, m |
//! | `source.y` | 2 | panel centre distance from the wall, m |
//! | `source.width` | 0.2 | m |
//! | `source.length` | 0.2 | m |
//! | `source.power` | 20 | optical power, W |
//! | `source.half_angle` | 80 | half-power semi-angle, degrees |
//! | `photodetector.responsivity` | 0.4 | A/W |
//! | `photodetector.area` | 4e-4 | m² |
//! | `noise.psd` | 2.5e-20 | W/Hz |
//! | `noise.bandwidth` | 1e6 | Hz |
//! | `grid.n` | 80 | receiver cells per side |
//! | `mesh.resolution` | `auto` | `auto` or samples per surface axis |
//! | `mesh.samples_per_patch` | 4 | target samples across the source image when `auto` |
//! | `quadrature.n` | 50 | source cells per side for line-of-sight integrals |
//! | `seed` | 1 | random stream seed |
//! | `zero_threshold` | 1e-12 | irradiance treated as none, W/m² |
//! | `blockage.users` | 10000 | sampled users per panel |
//! | `blockage.grid` | 40 | blockage-map cells per side |
//! | `blockage.quadrature` | 20 | source cells per side for blockage tests |
//! | `blockage.panels` | `0.02, 0.5, 1` | square panel sides for the blockage map, m |
//! | `body.radius` | 0.15 | m |
//! | `body.height` | 1.75 | m |
//! | `body.device_offset` | 0.3 | device distance from the body axis, m |
//!
//! Setting `mirror.radius` without `mirror.shape` selects the semi-sphere.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blockage::BodyModel;
use crate::error::{Error, Result};
use crate::geom::{MeshResolution, MirrorShape, Vec3};
use crate::grid::ReceiverGrid;
use crate::metrics::NoiseModel;
use crate::nlos::{resolving_resolution, DEFAULT_SAMPLES_PER_PATCH, ZERO_IRRADIANCE};
use crate::radiometry::{Photodetector, SourcePanel, SourceQuadrature};

/// Which mirror family the scenario mounts on the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Paraboloid,
    SemiSphere,
    Plane,
}

impl ShapeKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "paraboloid" => Some(Self::Paraboloid),
            "semi_sphere" | "semisphere" | "sphere" => Some(Self::SemiSphere),
            "plane" => Some(Self::Plane),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Paraboloid => "paraboloid",
            Self::SemiSphere => "semi_sphere",
            Self::Plane => "plane",
        }
    }
}

/// How the mirror surface is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeshPolicy {
    /// Per-shape counts from [`resolving_resolution`].
    Auto { samples_per_patch: f64 },
    /// The same count along both surface axes.
    Fixed(usize),
}

impl MeshPolicy {
    pub fn resolution(&self, shape: &MirrorShape, source: &SourcePanel) -> MeshResolution {
        match *self {
            MeshPolicy::Auto { samples_per_patch } => resolving_resolution(shape, source, samples_per_patch),
            MeshPolicy::Fixed(n) => MeshResolution::square(n),
        }
    }
}

/// A complete, validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub room_width: f64,
    pub room_depth: f64,
    pub room_height: f64,
    pub receiver_height: f64,
    /// Room coordinates of the mirror centre; `z` is the height above the
    /// receiver plane.
    pub mirror_center: Vec3,
    pub mirror_shape: ShapeKind,
    pub mirror_width: f64,
    pub mirror_depth: f64,
    pub mirror_height: f64,
    pub mirror_radius: f64,
    pub reflectance: f64,
    pub source_height: f64,
    pub source_x: f64,
    pub source_y: f64,
    pub source_width: f64,
    pub source_length: f64,
    pub source_power: f64,
    pub source_half_angle_deg: f64,
    pub responsivity: f64,
    pub detector_area: f64,
    pub noise_psd: f64,
    pub noise_bandwidth: f64,
    pub grid_n: usize,
    pub mesh: MeshPolicy,
    pub quadrature_n: usize,
    pub seed: u64,
    pub zero_threshold: f64,
    pub blockage_users: usize,
    pub blockage_grid_n: usize,
    pub blockage_quadrature_n: usize,
    pub blockage_panels: Vec<f64>,
    pub body_radius: f64,
    pub body_height: f64,
    pub device_offset: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            room_width: 4.0,
            room_depth: 4.0,
            room_height: 3.0,
            receiver_height: 1.0,
            mirror_center: Vec3::new(2.0, 0.0, 1.0),
            mirror_shape: ShapeKind::Paraboloid,
            mirror_width: 0.4,
            mirror_depth: 0.1,
            mirror_height: 0.5,
            mirror_radius: 0.2236,
            reflectance: 0.99,
            source_height: 2.0,
            source_x: 0.0,
            source_y: 2.0,
            source_width: 0.2,
            source_length: 0.2,
            source_power: 20.0,
            source_half_angle_deg: 80.0,
            responsivity: 0.4,
            detector_area: 4e-4,
            noise_psd: 2.5e-20,
            noise_bandwidth: 1e6,
            grid_n: 80,
            mesh: MeshPolicy::Auto {
                samples_per_patch: DEFAULT_SAMPLES_PER_PATCH,
            },
            quadrature_n: 50,
            seed: 1,
            zero_threshold: ZERO_IRRADIANCE,
            blockage_users: 10_000,
            blockage_grid_n: 40,
            blockage_quadrature_n: 20,
            blockage_panels: vec![0.02, 0.5, 1.0],
            body_radius: 0.15,
            body_height: 1.75,
            device_offset: 0.3,
        }
    }
}

const KEYS: &[&str] = &[
    "room.width",
    "room.depth",
    "room.height",
    "receiver.height",
    "mirror.center",
    "mirror.shape",
    "mirror.width",
    "mirror.depth",
    "mirror.height",
    "mirror.radius",
    "mirror.reflectance",
    "source.height",
    "source.x",
    "source.y",
    "source.width",
    "source.length",
    "source.power",
    "source.half_angle",
    "photodetector.responsivity",
    "photodetector.area",
    "noise.psd",
    "noise.bandwidth",
    "grid.n",
    "mesh.resolution",
    "mesh.samples_per_patch",
    "quadrature.n",
    "seed",
    "zero_threshold",
    "blockage.users",
    "blockage.grid",
    "blockage.quadrature",
    "blockage.panels",
    "body.radius",
    "body.height",
    "body.device_offset",
];

/// Reads a scenario from a `key = value` file, or from the `config` object
/// of a run manifest when the path ends in `.json`.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        let manifest: serde_json::Value = serde_json::from_str(&text)?;
        let map = manifest
            .get("config")
            .and_then(|c| c.as_object())
            .ok_or_else(|| Error::config("config", "manifest has no config object"))?;
        let mut pairs = Vec::with_capacity(map.len());
        for (k, v) in map {
            let v = v
                .as_str()
                .ok_or_else(|| Error::config(k.as_str(), "manifest values must be strings"))?;
            pairs.push((k.clone(), v.to_string()));
        }
        ScenarioConfig::from_pairs(pairs)
    } else {
        ScenarioConfig::parse(&text)
    }
}

impl ScenarioConfig {
    /// Parses the flat text schema. Blank lines and `#` comments are
    /// ignored; every key may appear at most once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {}", n + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        Self::from_pairs(pairs)
    }

    /// Applies `key`/`value` overrides on top of the defaults, then
    /// validates.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut seen = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::config(k, "unknown key"));
            }
            if seen.insert(k.clone(), v).is_some() {
                return Err(Error::config(k, "key given more than once"));
            }
        }
        let mut c = Self::default();
        if seen.contains_key("mirror.radius") && !seen.contains_key("mirror.shape") {
            c.mirror_shape = ShapeKind::SemiSphere;
        }
        for (k, v) in &seen {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let f = || parse_f64(key, value);
        let u = || parse_usize(key, value);
        match key {
            "room.width" => self.room_width = f()?,
            "room.depth" => self.room_depth = f()?,
            "room.height" => self.room_height = f()?,
            "receiver.height" => self.receiver_height = f()?,
            "mirror.center" => {
                let v = parse_list(key, value)?;
                if v.len() != 3 {
                    return Err(Error::config(key, format!("expected three numbers, got {}", v.len())));
                }
                self.mirror_center = Vec3::new(v[0], v[1], v[2]);
            }
            "mirror.shape" => {
                self.mirror_shape =
                    ShapeKind::parse(value).ok_or_else(|| Error::config(key, format!("unknown shape `{value}`")))?
            }
            "mirror.width" => self.mirror_width = f()?,
            "mirror.depth" => self.mirror_depth = f()?,
            "mirror.height" => self.mirror_height = f()?,
            "mirror.radius" => self.mirror_radius = f()?,
            "mirror.reflectance" => self.reflectance = f()?,
            "source.height" => self.source_height = f()?,
            "source.x" => self.source_x = f()?,
            "source.y" => self.source_y = f()?,
            "source.width" => self.source_width = f()?,
            "source.length" => self.source_length = f()?,
            "source.power" => self.source_power = f()?,
            "source.half_angle" => self.source_half_angle_deg = f()?,
            "photodetector.responsivity" => self.responsivity = f()?,
            "photodetector.area" => self.detector_area = f()?,
            "noise.psd" => self.noise_psd = f()?,
            "noise.bandwidth" => self.noise_bandwidth = f()?,
            "grid.n" => self.grid_n = u()?,
            "mesh.resolution" => {
                if value == "auto" {
                    if !matches!(self.mesh, MeshPolicy::Auto { .. }) {
                        self.mesh = MeshPolicy::Auto {
                            samples_per_patch: DEFAULT_SAMPLES_PER_PATCH,
                        };
                    }
                } else {
                    self.mesh = MeshPolicy::Fixed(u()?);
                }
            }
            "mesh.samples_per_patch" => {
                let k = f()?;
                if let MeshPolicy::Auto { samples_per_patch } = &mut self.mesh {
                    *samples_per_patch = k;
                }
                if !(k > 0.0) {
                    return Err(Error::config(key, format!("must be positive, got {k}")));
                }
            }
            "quadrature.n" => self.quadrature_n = u()?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::config(key, format!("expected an unsigned integer, got `{value}`")))?
            }
            "zero_threshold" => self.zero_threshold = f()?,
            "blockage.users" => self.blockage_users = u()?,
            "blockage.grid" => self.blockage_grid_n = u()?,
            "blockage.quadrature" => self.blockage_quadrature_n = u()?,
            "blockage.panels" => self.blockage_panels = parse_list(key, value)?,
            "body.radius" => self.body_radius = f()?,
            "body.height" => self.body_height = f()?,
            "body.device_offset" => self.device_offset = f()?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks every value range. Geometry that is valid value by value but
    /// does not fit in the room is reported by [`ScenarioConfig::check_fits`].
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("room.width", self.room_width),
            ("room.depth", self.room_depth),
            ("room.height", self.room_height),
            ("receiver.height", self.receiver_height),
            ("source.height", self.source_height),
            ("source.width", self.source_width),
            ("source.length", self.source_length),
            ("source.power", self.source_power),
            ("photodetector.responsivity", self.responsivity),
            ("photodetector.area", self.detector_area),
            ("noise.psd", self.noise_psd),
            ("noise.bandwidth", self.noise_bandwidth),
            ("body.height", self.body_height),
        ] {
            positive(key, v)?;
        }
        for (key, v) in [
            ("zero_threshold", self.zero_threshold),
            ("body.radius", self.body_radius),
            ("body.device_offset", self.device_offset),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be non-negative, got {v}")));
            }
        }
        for (key, v) in [
            ("mirror.center", self.mirror_center.x),
            ("mirror.center", self.mirror_center.z),
            ("source.x", self.source_x),
            ("source.y", self.source_y),
        ] {
            if !v.is_finite() {
                return Err(Error::config(key, format!("must be finite, got {v}")));
            }
        }
        if self.mirror_center.y != 0.0 {
            return Err(Error::config(
                "mirror.center",
                "the mirror must sit on the wall (second coordinate 0)",
            ));
        }
        if !(0.0..=1.0).contains(&self.reflectance) {
            return Err(Error::config(
                "mirror.reflectance",
                format!("must lie in [0, 1], got {}", self.reflectance),
            ));
        }
        if !(self.source_half_angle_deg > 0.0 && self.source_half_angle_deg < 90.0) {
            return Err(Error::config(
                "source.half_angle",
                format!(
                    "must lie strictly between 0 and 90 degrees, got {}",
                    self.source_half_angle_deg
                ),
            ));
        }
        for (key, v, min) in [
            ("grid.n", self.grid_n, 1),
            ("quadrature.n", self.quadrature_n, 1),
            ("blockage.users", self.blockage_users, 1),
            ("blockage.grid", self.blockage_grid_n, 1),
            ("blockage.quadrature", self.blockage_quadrature_n, 1),
        ] {
            if v < min {
                return Err(Error::config(key, format!("must be at least {min}, got {v}")));
            }
        }
        match self.mesh {
            MeshPolicy::Fixed(n) if n < MeshResolution::MIN => {
                return Err(Error::config(
                    "mesh.resolution",
                    format!("must be at least {}, got {n}", MeshResolution::MIN),
                ));
            }
            MeshPolicy::Auto { samples_per_patch } if !(samples_per_patch > 0.0 && samples_per_patch.is_finite()) => {
                return Err(Error::config(
                    "mesh.samples_per_patch",
                    format!("must be positive, got {samples_per_patch}"),
                ));
            }
            _ => {}
        }
        if self.blockage_panels.is_empty() {
            return Err(Error::config("blockage.panels", "needs at least one panel size"));
        }
        for &p in &self.blockage_panels {
            positive("blockage.panels", p)?;
        }
        self.mirror()?;
        Ok(())
    }

    /// The configured mirror.
    pub fn mirror(&self) -> Result<MirrorShape> {
        let shape = match self.mirror_shape {
            ShapeKind::Paraboloid => MirrorShape::paraboloid(self.mirror_width, self.mirror_depth, self.mirror_height),
            ShapeKind::SemiSphere => MirrorShape::semi_sphere(self.mirror_radius),
            ShapeKind::Plane => MirrorShape::plane(self.mirror_width, self.mirror_height),
        };
        shape.map_err(|e| Error::config(format!("mirror.{}", self.mirror_shape.name()), e.to_string()))
    }

    /// Returns `Error::Geometry` when `shape`, the source panel or the
    /// receiver plane would not fit inside the room.
    pub fn check_fits(&self, shape: &MirrorShape) -> Result<()> {
        let (w, h) = shape.wall_extent();
        let c = self.mirror_center;
        let eps = 1e-12;
        if c.x - w / 2.0 < -eps || c.x + w / 2.0 > self.room_width + eps {
            return Err(Error::Geometry(format!(
                "{} spans x = {}..{} m but the wall is {} m wide",
                shape.label(),
                c.x - w / 2.0,
                c.x + w / 2.0,
                self.room_width
            )));
        }
        let centre = self.receiver_height + c.z;
        if centre - h / 2.0 < -eps || centre + h / 2.0 > self.room_height + eps {
            return Err(Error::Geometry(format!(
                "{} spans heights {}..{} m but the room is {} m tall",
                shape.label(),
                centre - h / 2.0,
                centre + h / 2.0,
                self.room_height
            )));
        }
        if shape.depth() >= self.room_depth {
            return Err(Error::Geometry(format!("{} reaches the opposite wall", shape.label())));
        }
        if self.receiver_height + self.source_height > self.room_height + eps {
            return Err(Error::Geometry(format!(
                "source at {} m above the floor is above the {} m ceiling",
                self.receiver_height + self.source_height,
                self.room_height
            )));
        }
        let sx = c.x + self.source_x;
        if sx - self.source_width / 2.0 < -eps
            || sx + self.source_width / 2.0 > self.room_width + eps
            || self.source_y - self.source_length / 2.0 < -eps
            || self.source_y + self.source_length / 2.0 > self.room_depth + eps
        {
            return Err(Error::Geometry(
                "source panel extends outside the room footprint".into(),
            ));
        }
        Ok(())
    }

    /// Receiver grid with `n × n` cells covering the room footprint, in the
    /// mirror frame.
    pub fn grid_with(&self, n: usize) -> ReceiverGrid {
        ReceiverGrid {
            x_min: -self.mirror_center.x,
            y_min: 0.0,
            width: self.room_width,
            depth: self.room_depth,
            nx: n,
            ny: n,
            z: self.mirror_center.z,
        }
    }

    pub fn grid(&self) -> ReceiverGrid {
        self.grid_with(self.grid_n)
    }

    /// Source centre in the mirror frame.
    pub fn source_center(&self) -> Vec3 {
        Vec3::new(self.source_x, self.source_y, self.mirror_center.z - self.source_height)
    }

    pub fn source(&self) -> Result<SourcePanel> {
        SourcePanel::new(
            self.source_center(),
            self.source_width,
            self.source_length,
            self.source_power,
            self.source_half_angle_deg.to_radians(),
        )
    }

    pub fn quadrature(&self) -> SourceQuadrature {
        SourceQuadrature::square(self.quadrature_n)
    }

    pub fn photodetector(&self, position: Vec3) -> Photodetector {
        Photodetector {
            position,
            area: self.detector_area,
            responsivity: self.responsivity,
        }
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.noise_psd, self.noise_bandwidth)
    }

    /// Mirror-frame `z` of the floor.
    pub fn floor_z(&self) -> f64 {
        self.mirror_center.z + self.receiver_height
    }

    pub fn body(&self) -> BodyModel {
        BodyModel {
            radius: self.body_radius,
            height: self.body_height,
            device_offset: self.device_offset,
            floor_z: self.floor_z(),
        }
    }

    /// Room `(x, y)` of the centre of cell `k` of a grid built by
    /// [`ScenarioConfig::grid_with`].
    pub fn room_xy(&self, grid: &ReceiverGrid, k: usize) -> (f64, f64) {
        let (i, j) = (k % grid.nx, k / grid.nx);
        ((i as f64 + 0.5) * grid.dx(), (j as f64 + 0.5) * grid.dy())
    }

    /// Every key with its resolved value, in schema order. Numbers use
    /// shortest round-trip formatting, so [`ScenarioConfig::from_pairs`]
    /// reproduces the configuration exactly.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let c = self.mirror_center;
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let (mesh_resolution, samples_per_patch) = match self.mesh {
            MeshPolicy::Auto { samples_per_patch } => ("auto".to_string(), samples_per_patch),
            MeshPolicy::Fixed(n) => (n.to_string(), DEFAULT_SAMPLES_PER_PATCH),
        };
        let values: Vec<String> = vec![
            self.room_width.to_string(),
            self.room_depth.to_string(),
            self.room_height.to_string(),
            self.receiver_height.to_string(),
            list(&[c.x, c.y, c.z]),
            self.mirror_shape.name().to_string(),
            self.mirror_width.to_string(),
            self.mirror_depth.to_string(),
            self.mirror_height.to_string(),
            self.mirror_radius.to_string(),
            self.reflectance.to_string(),
            self.source_height.to_string(),
            self.source_x.to_string(),
            self.source_y.to_string(),
            self.source_width.to_string(),
            self.source_length.to_string(),
            self.source_power.to_string(),
            self.source_half_angle_deg.to_string(),
            self.responsivity.to_string(),
            self.detector_area.to_string(),
            self.noise_psd.to_string(),
            self.noise_bandwidth.to_string(),
            self.grid_n.to_string(),
            mesh_resolution,
            samples_per_patch.to_string(),
            self.quadrature_n.to_string(),
            self.seed.to_string(),
            self.zero_threshold.to_string(),
            self.blockage_users.to_string(),
            self.blockage_grid_n.to_string(),
            self.blockage_quadrature_n.to_string(),
            list(&self.blockage_panels),
            self.body_radius.to_string(),
            self.body_height.to_string(),
            self.device_offset.to_string(),
        ];
        KEYS.iter().map(|k| k.to_string()).zip(values).collect()
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be positive, got {v}")))
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|s| parse_f64(key, s.trim())).collect()
}
