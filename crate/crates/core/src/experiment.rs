//! Experiment orchestration and CSV/manifest output.
//!
//! Every experiment has a pure `compute` entry point returning typed rows
//! and a writer used by [`run_experiment`]. Output is deterministic for a
//! given configuration: cells and sweep points are evaluated in parallel
//! but always collected in a fixed order, and numbers are written with
//! shortest round-trip formatting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::blockage::{potential_blockage_map, BlockageMap};
use crate::error::{Error, Result};
use crate::geom::{mesh_surface, MeshResolution, MirrorShape};
use crate::grid::{IrradianceField, ReceiverGrid};
use crate::metrics::{shadowing_probability, snr_db, EmpiricalCdf, LinkState};
use crate::nlos::{NlosField, RelativeErrorField};
use crate::radiometry::{los_irradiance, los_received_power, SourceQuadrature};
use crate::scenario::ScenarioConfig;

/// The studies the runner knows how to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BlockageMap,
    RelativeErrorSweep,
    ShadowingSweep,
    IrradianceField,
    SnrCdf,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::BlockageMap,
        ExperimentKind::RelativeErrorSweep,
        ExperimentKind::ShadowingSweep,
        ExperimentKind::IrradianceField,
        ExperimentKind::SnrCdf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BlockageMap => "blockage-map",
            ExperimentKind::RelativeErrorSweep => "relative-error",
            ExperimentKind::ShadowingSweep => "shadowing-sweep",
            ExperimentKind::IrradianceField => "irradiance-field",
            ExperimentKind::SnrCdf => "snr-cdf",
        }
    }

    /// The CSV file the experiment writes next to `manifest.json`.
    pub fn data_file(self) -> &'static str {
        match self {
            ExperimentKind::BlockageMap => "blockage_map.csv",
            ExperimentKind::RelativeErrorSweep => "relative_error.csv",
            ExperimentKind::ShadowingSweep => "shadowing_sweep.csv",
            ExperimentKind::IrradianceField => "irradiance_grid.csv",
            ExperimentKind::SnrCdf => "snr_cdf.csv",
        }
    }
}

/// Mirror heights swept by the shadowing and relative-error studies, m.
pub const SWEEP_HEIGHTS: [f64; 3] = [0.1, 0.5, 1.0];
/// Paraboloid depths of the shadowing sweep, m; zero is a plane mirror.
pub const SHADOWING_DEPTHS: [f64; 5] = [0.0, 0.05, 0.1, 0.15, 0.2];
/// Paraboloid depths of the relative-error sweep, m.
pub const ERROR_DEPTHS: [f64; 3] = [0.1, 0.15, 0.2];

/// Shadowing-sweep widths: 0.1 to 1.0 m in 0.1 m steps.
pub fn shadowing_widths() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// Relative-error paraboloid widths: 0.2 to 1.0 m in 0.1 m steps.
pub fn error_widths() -> Vec<f64> {
    (2..=10).map(|i| i as f64 / 10.0).collect()
}

/// Relative-error semi-sphere radii: 0.1 to 1.0 m in 0.1 m steps.
pub fn error_radii() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// Depth of the curved paraboloids compared in the SNR study, m.
pub const SNR_PARABOLOID_DEPTH: f64 = 0.1;
/// Width shared by the paraboloid and plane mirrors of the SNR study, m.
pub const SNR_MIRROR_WIDTH: f64 = 0.4;

/// Mirror size class with its wall area and per-family dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSize {
    pub name: &'static str,
    /// Wall footprint area, m².
    pub area: f64,
    pub paraboloid_height: f64,
    pub sphere_radius: f64,
}

/// The three mirror sizes compared in the SNR study.
pub const MIRROR_SIZES: [MirrorSize; 3] = [
    MirrorSize {
        name: "small",
        area: 0.0314,
        paraboloid_height: 0.1,
        sphere_radius: 0.1,
    },
    MirrorSize {
        name: "medium",
        area: 0.1571,
        paraboloid_height: 0.5,
        sphere_radius: 0.2236,
    },
    MirrorSize {
        name: "large",
        area: 0.3142,
        paraboloid_height: 1.0,
        sphere_radius: 0.3162,
    },
];

impl MirrorSize {
    pub fn paraboloid(&self) -> MirrorShape {
        MirrorShape::Paraboloid {
            width: SNR_MIRROR_WIDTH,
            depth: SNR_PARABOLOID_DEPTH,
            height: self.paraboloid_height,
        }
    }

    pub fn semi_sphere(&self) -> MirrorShape {
        MirrorShape::SemiSphere {
            radius: self.sphere_radius,
        }
    }

    /// Flat rectangle with the same wall area and width as the paraboloid.
    pub fn plane(&self) -> MirrorShape {
        MirrorShape::Plane {
            width: SNR_MIRROR_WIDTH,
            height: self.area / SNR_MIRROR_WIDTH,
        }
    }
}

/// Mirror-reflected field of `shape` under `config`, after checking that it
/// fits in the room.
pub fn nlos_field(config: &ScenarioConfig, shape: &MirrorShape, grid: &ReceiverGrid) -> Result<NlosField> {
    config.check_fits(shape)?;
    let source = config.source()?;
    let mesh = mesh_surface(shape, config.mesh.resolution(shape, &source))?;
    NlosField::compute(grid, &mesh, &source, config.reflectance)
}

/// Line-of-sight irradiance at every cell of `grid`.
pub fn los_field(config: &ScenarioConfig, grid: &ReceiverGrid) -> Result<Vec<f64>> {
    let source = config.source()?;
    let quadrature = config.quadrature();
    (0..grid.len())
        .into_par_iter()
        .map(|k| los_irradiance(grid.position(k), &source, quadrature, None))
        .collect()
}

/// Line-of-sight and mirror irradiance of the configured mirror.
pub fn irradiance_field(config: &ScenarioConfig) -> Result<IrradianceField> {
    let grid = config.grid();
    let nlos = nlos_field(config, &config.mirror()?, &grid)?;
    Ok(IrradianceField {
        grid,
        los: los_field(config, &grid)?,
        nlos_exact: nlos.exact,
        nlos_approx: nlos.approx,
    })
}

/// One shadowing-sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowingPoint {
    pub height: f64,
    pub width: f64,
    pub depth: f64,
    pub resolution: MeshResolution,
    pub probability: f64,
}

/// Shadowing probability of paraboloids over heights × depths × widths.
pub fn shadowing_sweep(config: &ScenarioConfig) -> Result<Vec<ShadowingPoint>> {
    let grid = config.grid();
    let source = config.source()?;
    let mut out = Vec::new();
    for &height in &SWEEP_HEIGHTS {
        for &depth in &SHADOWING_DEPTHS {
            for width in shadowing_widths() {
                let shape = MirrorShape::paraboloid(width, depth, height)?;
                let field = nlos_field(config, &shape, &grid)?;
                out.push(ShadowingPoint {
                    height,
                    width,
                    depth,
                    resolution: config.mesh.resolution(&shape, &source),
                    probability: shadowing_probability(&field.exact, config.zero_threshold)?,
                });
            }
        }
    }
    Ok(out)
}

/// Peak relative error of the patch approximation for one mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrorPoint {
    pub shape: MirrorShape,
    pub resolution: MeshResolution,
    /// `None` when every cell was excluded.
    pub peak: Option<f64>,
}

/// Peak relative error for one mirror over the configured grid, excluding
/// cells closer to the wall than the mirror's depth.
pub fn relative_error_point(config: &ScenarioConfig, shape: &MirrorShape) -> Result<RelativeErrorPoint> {
    let grid = config.grid();
    let source = config.source()?;
    let field = nlos_field(config, shape, &grid)?;
    let errors = RelativeErrorField::from_field(&field, shape.depth());
    Ok(RelativeErrorPoint {
        shape: *shape,
        resolution: config.mesh.resolution(shape, &source),
        peak: errors.peak(),
    })
}

/// Paraboloid sweep over heights × depths × widths, then semi-spheres.
pub fn relative_error_sweep(config: &ScenarioConfig) -> Result<Vec<RelativeErrorPoint>> {
    let mut out = Vec::new();
    for &height in &SWEEP_HEIGHTS {
        for &depth in &ERROR_DEPTHS {
            for width in error_widths() {
                out.push(relative_error_point(
                    config,
                    &MirrorShape::paraboloid(width, depth, height)?,
                )?);
            }
        }
    }
    for radius in error_radii() {
        out.push(relative_error_point(config, &MirrorShape::semi_sphere(radius)?)?);
    }
    Ok(out)
}

/// Per-cell SNR of one mirror, with the LoS link blocked or present.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSeries {
    /// `<link>/<family>/<size>`, e.g. `nlos/paraboloid/small`.
    pub name: String,
    pub shape: MirrorShape,
    pub link: LinkState,
    /// SNR in dB per grid cell; `-inf` where no power arrives.
    pub snr_db: Vec<f64>,
}

/// SNR over the grid for the paraboloid, semi-sphere and plane mirror of
/// every size, first with the LoS link blocked and then with it present.
pub fn snr_series(config: &ScenarioConfig) -> Result<Vec<SnrSeries>> {
    let grid = config.grid();
    let noise = config.noise()?;
    let los = los_field(config, &grid)?;
    let mut nlos_series = Vec::new();
    let mut los_series = Vec::new();
    for family in ["paraboloid", "semi_sphere", "plane"] {
        for size in &MIRROR_SIZES {
            let shape = match family {
                "paraboloid" => size.paraboloid(),
                "semi_sphere" => size.semi_sphere(),
                _ => size.plane(),
            };
            let field = nlos_field(config, &shape, &grid)?;
            for (link, sink) in [
                (LinkState::LosBlocked, &mut nlos_series),
                (LinkState::LosPresent, &mut los_series),
            ] {
                let values = (0..grid.len())
                    .map(|k| {
                        let pd = config.photodetector(grid.position(k));
                        let e_nlos = field.exact[k];
                        let p_nlos = if e_nlos < config.zero_threshold {
                            0.0
                        } else {
                            los_received_power(e_nlos, &pd)
                        };
                        snr_db(los_received_power(los[k], &pd), p_nlos, link, &pd, &noise)
                    })
                    .collect();
                let prefix = match link {
                    LinkState::LosBlocked => "nlos",
                    LinkState::LosPresent => "los+nlos",
                };
                sink.push(SnrSeries {
                    name: format!("{prefix}/{family}/{}", size.name),
                    shape,
                    link,
                    snr_db: values,
                });
            }
        }
    }
    nlos_series.extend(los_series);
    Ok(nlos_series)
}

/// Blockage map for a square panel of side `side`.
#[derive(Debug, Clone)]
pub struct PanelBlockage {
    pub side: f64,
    pub map: BlockageMap,
}

/// One blockage map per configured panel size. Every panel sees the same
/// users: the random stream restarts from the seed for each one.
pub fn blockage_maps(config: &ScenarioConfig) -> Result<Vec<PanelBlockage>> {
    let grid = config.grid_with(config.blockage_grid_n);
    let base = config.source()?;
    let body = config.body();
    let quadrature = SourceQuadrature::square(config.blockage_quadrature_n);
    config
        .blockage_panels
        .iter()
        .map(|&side| {
            let source = base.resized(side, side)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let map = potential_blockage_map(&mut rng, &grid, &source, &body, quadrature, config.blockage_users);
            Ok(PanelBlockage { side, map })
        })
        .collect()
}

/// Files written by one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub data: PathBuf,
    pub manifest: PathBuf,
}

/// Runs `kind` and writes its CSV and `manifest.json` into `out_dir`,
/// creating the directory if needed.
pub fn run_experiment(config: &ScenarioConfig, kind: ExperimentKind, out_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    let (csv, summary) = match kind {
        ExperimentKind::IrradianceField => irradiance_csv(config, &irradiance_field(config)?),
        ExperimentKind::ShadowingSweep => shadowing_csv(&shadowing_sweep(config)?),
        ExperimentKind::RelativeErrorSweep => relative_error_csv(&relative_error_sweep(config)?),
        ExperimentKind::SnrCdf => snr_csv(&snr_series(config)?)?,
        ExperimentKind::BlockageMap => blockage_csv(config, &blockage_maps(config)?),
    };
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let data = out_dir.join(kind.data_file());
    std::fs::write(&data, csv).map_err(|e| Error::io(&data, e))?;

    let config_map: Map<String, Value> = config
        .to_pairs()
        .into_iter()
        .map(|(k, v)| (k, Value::String(v)))
        .collect();
    let manifest_value = json!({
        "tool": "mirrorlight",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": kind.name(),
        "seed": config.seed,
        "outputs": [kind.data_file()],
        "config": config_map,
        "summary": summary,
    });
    let manifest = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest_value)?;
    text.push('\n');
    std::fs::write(&manifest, text).map_err(|e| Error::io(&manifest, e))?;
    Ok(RunReport { data, manifest })
}

/// JSON number, or `null` for non-finite values.
fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn irradiance_csv(config: &ScenarioConfig, field: &IrradianceField) -> (String, Value) {
    let mut s = String::from("x_m,y_m,E_los_W_m2,E_nlos_exact_W_m2,E_nlos_approx_W_m2\n");
    for k in 0..field.grid.len() {
        let (x, y) = config.room_xy(&field.grid, k);
        let _ = writeln!(
            s,
            "{x},{y},{},{},{}",
            field.los[k], field.nlos_exact[k], field.nlos_approx[k]
        );
    }
    let shadow = shadowing_probability(&field.nlos_exact, config.zero_threshold).unwrap_or(f64::NAN);
    (s, json!({ "shadowing_probability": num(shadow) }))
}

fn shadowing_csv(points: &[ShadowingPoint]) -> (String, Value) {
    let mut s = String::from("h_par_m,w_par_m,l_par_m,mesh_n_u,mesh_n_v,probability\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            p.height, p.width, p.depth, p.resolution.n_u, p.resolution.n_v, p.probability
        );
    }
    (s, json!({ "points": points.len() }))
}

fn relative_error_csv(points: &[RelativeErrorPoint]) -> (String, Value) {
    let mut s = String::from("shape,w_par_m,l_par_m,h_par_m,r_sph_m,mesh_n_u,mesh_n_v,peak_relative_error\n");
    let mut worst_paraboloid = f64::NAN;
    let mut worst_sphere = f64::NAN;
    for p in points {
        let peak = p.peak.unwrap_or(f64::NAN);
        let (name, w, l, h, r) = match p.shape {
            MirrorShape::Paraboloid { width, depth, height } => {
                worst_paraboloid = worst_paraboloid.max(peak);
                (
                    "paraboloid",
                    width.to_string(),
                    depth.to_string(),
                    height.to_string(),
                    String::new(),
                )
            }
            MirrorShape::SemiSphere { radius } => {
                worst_sphere = worst_sphere.max(peak);
                (
                    "semi_sphere",
                    String::new(),
                    String::new(),
                    String::new(),
                    radius.to_string(),
                )
            }
            MirrorShape::Plane { width, height } => (
                "plane",
                width.to_string(),
                "0".into(),
                height.to_string(),
                String::new(),
            ),
        };
        let _ = writeln!(
            s,
            "{name},{w},{l},{h},{r},{},{},{peak}",
            p.resolution.n_u, p.resolution.n_v
        );
    }
    (
        s,
        json!({
            "peak_paraboloid": num(worst_paraboloid),
            "peak_semi_sphere": num(worst_sphere),
        }),
    )
}

fn snr_csv(series: &[SnrSeries]) -> Result<(String, Value)> {
    let mut s = String::from("series,snr_db,cdf\n");
    let mut summary = Map::new();
    for sr in series {
        let cdf = EmpiricalCdf::new(&sr.snr_db)?;
        // the floor row carries the mass at -inf; later rows are the steps
        let _ = writeln!(s, "{},-inf,{}", sr.name, cdf.floor_mass());
        let mut finite: Vec<f64> = sr.snr_db.iter().copied().filter(|v| v.is_finite()).collect();
        finite.sort_by(f64::total_cmp);
        finite.dedup();
        for v in finite {
            let _ = writeln!(s, "{},{v},{}", sr.name, cdf.eval(v));
        }
        summary.insert(
            sr.name.clone(),
            json!({
                "floor_mass": num(cdf.floor_mass()),
                "median_db": num(cdf.quantile(0.5)),
            }),
        );
    }
    Ok((s, Value::Object(summary)))
}

fn blockage_csv(config: &ScenarioConfig, maps: &[PanelBlockage]) -> (String, Value) {
    let mut s = String::from("panel_side_m,x_m,y_m,blocked\n");
    let mut summary = Map::new();
    for pb in maps {
        for k in 0..pb.map.grid.len() {
            let (x, y) = config.room_xy(&pb.map.grid, k);
            let _ = writeln!(s, "{},{x},{y},{}", pb.side, u8::from(pb.map.blocked[k]));
        }
        summary.insert(
            pb.side.to_string(),
            json!({ "shaded_fraction": num(pb.map.shaded_fraction()) }),
        );
    }
    (s, Value::Object(summary))
}
