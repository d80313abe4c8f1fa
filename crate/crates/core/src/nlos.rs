//! Mirror-reflected (NLoS) irradiance: the exact surface sum over a mesh,
//! the single-patch centroid approximation, and grid evaluation of both.
//!
//! Exact irradiance at a detector `D` sums, over every mesh sample `R`,
//!
//! ```text
//! ρ · L(R ← I) · cosθ_D · cosθ_R · dA / |D - R|²
//! ```
//!
//! where `L` is the source radiance along the specular path (see
//! [`radiance_at`](crate::radiometry::radiance_at)), `cosθ_D` the incidence
//! cosine at the upward-facing detector and `cosθ_R` the angle between the
//! mirror normal and the direction toward `D`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{MeshResolution, MirrorShape, SurfaceMesh, SurfaceSample, Vec3};
use crate::grid::ReceiverGrid;
use crate::radiometry::{radiance_along, SourcePanel};

/// Irradiance below this value (W/m²) is treated as no irradiance at all.
pub const ZERO_IRRADIANCE: f64 = 1e-12;

/// Default number of mesh samples across the smallest source image.
pub const DEFAULT_SAMPLES_PER_PATCH: f64 = 4.0;

/// Mesh resolution for `shape` that places about `samples_per_patch`
/// samples across the image of `source` on the mirror.
pub fn resolving_resolution(shape: &MirrorShape, source: &SourcePanel, samples_per_patch: f64) -> MeshResolution {
    let (w, h) = shape.wall_extent();
    let distance = source.center().norm() + 0.5 * w.hypot(h);
    MeshResolution::resolving(shape, source.width().min(source.length()), distance, samples_per_patch)
}

/// Contribution of one mesh sample to the irradiance at `d`.
#[inline]
pub fn sample_irradiance(sample: &SurfaceSample, d: Vec3, source: &SourcePanel, rho: f64) -> f64 {
    // detectors behind the wall plane are shielded by the wall itself
    if !(d.y > 0.0) {
        return 0.0;
    }
    let offset = d - sample.point;
    let dist2 = offset.norm_squared();
    if dist2 == 0.0 {
        return 0.0;
    }
    let toward_d = offset / dist2.sqrt();
    // upward-facing detector: only light arriving from above counts
    let cos_detector = toward_d.z;
    if !(cos_detector > 0.0) {
        return 0.0;
    }
    let cos_mirror = sample.normal.dot(toward_d);
    if !(cos_mirror > 0.0) {
        return 0.0;
    }
    match radiance_along(sample, toward_d, source) {
        Some(radiance) => rho * radiance * cos_detector * cos_mirror * sample.area / dist2,
        None => 0.0,
    }
}

/// Exact NLoS irradiance at `d` by summing over every mesh sample in order.
pub fn exact_nlos_irradiance(d: Vec3, mesh: &SurfaceMesh, source: &SourcePanel, rho: f64) -> Result<f64> {
    if mesh.is_empty() {
        return Err(Error::config("mesh", "surface mesh has no samples"));
    }
    let mut sum = 0.0;
    for s in &mesh.samples {
        sum += sample_irradiance(s, d, source, rho);
    }
    Ok(sum)
}

/// The part of the mirror that reflects light toward one detector, reduced
/// to a single flat facet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContributingPatch {
    /// Arithmetic mean of the member sample points.
    pub centroid: Vec3,
    /// Unit bisector of the directions from the centroid to the source
    /// centre and to the detector.
    pub normal: Vec3,
    /// Sum of member sample areas, m².
    pub area: f64,
    pub member_count: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct PatchAccumulator {
    point_sum: Vec3,
    area: f64,
    count: usize,
}

impl PatchAccumulator {
    #[inline]
    fn push(&mut self, s: &SurfaceSample) {
        self.point_sum += s.point;
        self.area += s.area;
        self.count += 1;
    }

    fn finish(&self, d: Vec3, source: &SourcePanel) -> Option<ContributingPatch> {
        if self.count == 0 {
            return None;
        }
        let centroid = self.point_sum / self.count as f64;
        let to_source = (source.center() - centroid).try_normalize()?;
        let to_detector = (d - centroid).try_normalize()?;
        let normal = (to_source + to_detector).try_normalize()?;
        Some(ContributingPatch {
            centroid,
            normal,
            area: self.area,
            member_count: self.count,
        })
    }
}

/// Collects the samples that send light to `d` into a single patch.
pub fn contributing_patch(d: Vec3, mesh: &SurfaceMesh, source: &SourcePanel) -> Option<ContributingPatch> {
    let mut acc = PatchAccumulator::default();
    for s in &mesh.samples {
        if sample_irradiance(s, d, source, 1.0) > 0.0 {
            acc.push(s);
        }
    }
    acc.finish(d, source)
}

/// Closed-form irradiance at `d` from the single flat patch, evaluated as if
/// all light left the source centre and struck the patch centroid.
pub fn approx_nlos_irradiance(d: Vec3, patch: Option<&ContributingPatch>, source: &SourcePanel, rho: f64) -> f64 {
    let Some(p) = patch else {
        return 0.0;
    };
    let Some(emission) = (p.centroid - source.center()).try_normalize() else {
        return 0.0;
    };
    let offset = d - p.centroid;
    let dist2 = offset.norm_squared();
    if dist2 == 0.0 {
        return 0.0;
    }
    let toward_d = offset / dist2.sqrt();
    let cos_source = emission.z;
    let cos_detector = toward_d.z.max(0.0);
    let cos_mirror = p.normal.dot(toward_d).max(0.0);
    if !(cos_source > 0.0) {
        return 0.0;
    }
    rho * source.radiance_scale() * p.area * cos_source.powf(source.order() - 1.0) * cos_detector * cos_mirror / dist2
}

/// Exact and approximate NLoS irradiance over a receiver grid.
#[derive(Debug, Clone)]
pub struct NlosField {
    pub grid: ReceiverGrid,
    pub exact: Vec<f64>,
    pub approx: Vec<f64>,
    pub patches: Vec<Option<ContributingPatch>>,
}

impl NlosField {
    /// Evaluates every grid cell against `mesh`.
    ///
    /// Numerically identical to calling [`exact_nlos_irradiance`] and
    /// [`contributing_patch`] per cell: each cell accumulates its samples in
    /// mesh order. Samples are only visited for cells inside the conservative
    /// footprint of the source panel reflected in the sample's tangent plane.
    pub fn compute(grid: &ReceiverGrid, mesh: &SurfaceMesh, source: &SourcePanel, rho: f64) -> Result<Self> {
        if mesh.is_empty() {
            return Err(Error::config("mesh", "surface mesh has no samples"));
        }
        let footprints: Vec<Option<Footprint>> = mesh
            .samples
            .par_iter()
            .map(|s| Footprint::of(s, source, grid))
            .collect();

        // bands of rows are independent; per cell the sample order is fixed
        let band = grid.ny.div_ceil(rayon::current_num_threads().max(1)).max(1);
        let bands: Vec<(Vec<f64>, Vec<PatchAccumulator>)> = (0..grid.ny)
            .step_by(band)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|row0| {
                let row1 = (row0 + band).min(grid.ny);
                let cells = (row1 - row0) * grid.nx;
                let mut exact = vec![0.0; cells];
                let mut acc = vec![PatchAccumulator::default(); cells];
                for (s, fp) in mesh.samples.iter().zip(&footprints) {
                    let Some(fp) = fp else { continue };
                    let (j0, j1) = (fp.rows.0.max(row0), fp.rows.1.min(row1 - 1));
                    if j0 > j1 {
                        continue;
                    }
                    for j in j0..=j1 {
                        for i in fp.cols.0..=fp.cols.1 {
                            let v = sample_irradiance(s, grid.cell_center(i, j), source, rho);
                            if v > 0.0 {
                                let k = (j - row0) * grid.nx + i;
                                exact[k] += v;
                                acc[k].push(s);
                            }
                        }
                    }
                }
                (exact, acc)
            })
            .collect();

        let mut exact = Vec::with_capacity(grid.len());
        let mut accs = Vec::with_capacity(grid.len());
        for (e, a) in bands {
            exact.extend(e);
            accs.extend(a);
        }
        let patches: Vec<Option<ContributingPatch>> = accs
            .iter()
            .enumerate()
            .map(|(k, a)| a.finish(grid.position(k), source))
            .collect();
        let approx = patches
            .iter()
            .enumerate()
            .map(|(k, p)| approx_nlos_irradiance(grid.position(k), p.as_ref(), source, rho))
            .collect();
        Ok(Self {
            grid: *grid,
            exact,
            approx,
            patches,
        })
    }

    /// Fraction of cells that receive no mirror irradiance.
    pub fn shadowed_fraction(&self) -> f64 {
        self.exact.iter().filter(|&&e| e < ZERO_IRRADIANCE).count() as f64 / self.exact.len() as f64
    }
}

/// Cells that a sample can possibly illuminate.
#[derive(Debug, Clone, Copy)]
struct Footprint {
    cols: (usize, usize),
    rows: (usize, usize),
}

impl Footprint {
    /// Bounding box of the panel's image through the sample's tangent plane,
    /// projected from the sample onto the receiver plane. The image of the
    /// rectangle under reflection and central projection is the convex hull
    /// of the projected corners, so the corner bounding box is conservative.
    fn of(s: &SurfaceSample, source: &SourcePanel, grid: &ReceiverGrid) -> Option<Self> {
        let drop = grid.z - s.point.z;
        if !(drop > 0.0) {
            return None;
        }
        let corners = source.corners();
        let mut any_front = false;
        let mut all_down = true;
        let mut any_down = false;
        let mut dirs = [Vec3::ZERO; 4];
        for (dir, c) in dirs.iter_mut().zip(corners) {
            let incoming = s.point - c;
            let cos = s.normal.dot(incoming);
            any_front |= cos < 0.0;
            *dir = incoming - s.normal * (2.0 * cos);
            if dir.z > 0.0 {
                any_down = true;
            } else {
                all_down = false;
            }
        }
        if !any_front || !any_down {
            return None;
        }
        if !all_down {
            // part of the reflected fan runs toward the horizon
            return Some(Self {
                cols: (0, grid.nx - 1),
                rows: (0, grid.ny - 1),
            });
        }
        let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for dir in dirs {
            let t = drop / dir.z;
            let x = s.point.x + t * dir.x;
            let y = s.point.y + t * dir.y;
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
        Some(Self {
            cols: grid.column_span(x_lo, x_hi)?,
            rows: grid.row_span(y_lo, y_hi)?,
        })
    }
}

/// Per-cell relative error `|exact - approx| / exact`.
///
/// `None` marks excluded cells: those closer to the wall than the mirror's
/// depth and those without mirror irradiance.
#[derive(Debug, Clone)]
pub struct RelativeErrorField {
    pub grid: ReceiverGrid,
    pub values: Vec<Option<f64>>,
}

impl RelativeErrorField {
    pub fn from_field(field: &NlosField, wall_clearance: f64) -> Self {
        let values = (0..field.grid.len())
            .map(|k| {
                let d = field.grid.position(k);
                let exact = field.exact[k];
                if d.y < wall_clearance || exact < ZERO_IRRADIANCE {
                    None
                } else {
                    Some((exact - field.approx[k]).abs() / exact)
                }
            })
            .collect();
        Self {
            grid: field.grid,
            values,
        }
    }

    /// Largest relative error over the included cells; `None` when every
    /// cell is excluded.
    pub fn peak(&self) -> Option<f64> {
        self.values.iter().flatten().copied().reduce(f64::max)
    }
}

/// Relative error of the patch approximation over `grid`.
pub fn relative_error_field(
    grid: &ReceiverGrid,
    mesh: &SurfaceMesh,
    source: &SourcePanel,
    rho: f64,
) -> Result<RelativeErrorField> {
    let field = NlosField::compute(grid, mesh, source, rho)?;
    Ok(RelativeErrorField::from_field(&field, mesh.shape.depth()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{mesh_surface, MeshResolution, MirrorShape};

    fn table_source() -> SourcePanel {
        SourcePanel::new(Vec3::new(0.0, 2.0, -1.0), 0.2, 0.2, 20.0, 80f64.to_radians()).unwrap()
    }

    fn grid(n: usize) -> ReceiverGrid {
        ReceiverGrid {
            x_min: -2.0,
            y_min: 0.0,
            width: 4.0,
            depth: 4.0,
            nx: n,
            ny: n,
            z: 1.0,
        }
    }

    #[test]
    fn detector_behind_wall_sees_nothing() {
        let mesh = mesh_surface(&MirrorShape::semi_sphere(0.2).unwrap(), MeshResolution::square(64)).unwrap();
        let e = exact_nlos_irradiance(Vec3::new(0.3, -1.0, 1.0), &mesh, &table_source(), 0.99).unwrap();
        assert_eq!(e, 0.0);
        assert!(contributing_patch(Vec3::new(0.3, -1.0, 1.0), &mesh, &table_source()).is_none());
    }

    #[test]
    fn empty_mesh_is_config_error() {
        let mesh = SurfaceMesh {
            shape: MirrorShape::plane(1.0, 1.0).unwrap(),
            samples: vec![],
            resolution: MeshResolution::square(2),
        };
        assert!(exact_nlos_irradiance(Vec3::new(0.0, 2.0, 1.0), &mesh, &table_source(), 0.99).is_err());
        assert!(NlosField::compute(&grid(4), &mesh, &table_source(), 0.99).is_err());
    }

    #[test]
    fn absent_patch_approximates_to_zero() {
        assert_eq!(
            approx_nlos_irradiance(Vec3::new(0.0, 2.0, 1.0), None, &table_source(), 0.99),
            0.0
        );
    }

    #[test]
    fn culled_field_matches_brute_force_bitwise() {
        let source = table_source();
        let g = grid(20);
        for shape in [
            MirrorShape::semi_sphere(0.3).unwrap(),
            MirrorShape::paraboloid(0.6, 0.1, 0.5).unwrap(),
            MirrorShape::plane(0.4, 0.8).unwrap(),
        ] {
            let mesh = mesh_surface(&shape, MeshResolution::square(48)).unwrap();
            let field = NlosField::compute(&g, &mesh, &source, 0.99).unwrap();
            for k in 0..g.len() {
                let d = g.position(k);
                let brute = exact_nlos_irradiance(d, &mesh, &source, 0.99).unwrap();
                assert_eq!(field.exact[k].to_bits(), brute.to_bits(), "{shape:?} cell {k}");
                assert_eq!(field.patches[k], contributing_patch(d, &mesh, &source));
            }
        }
    }

    #[test]
    fn zero_sets_agree() {
        let mesh = mesh_surface(
            &MirrorShape::paraboloid(1.0, 0.05, 0.5).unwrap(),
            MeshResolution::square(96),
        )
        .unwrap();
        let field = NlosField::compute(&grid(40), &mesh, &table_source(), 0.99).unwrap();
        let mut zeros = 0;
        for (e, a) in field.exact.iter().zip(&field.approx) {
            assert_eq!(*e == 0.0, *a == 0.0);
            zeros += (*e == 0.0) as usize;
        }
        assert!(zeros > 0 && zeros < field.exact.len());
    }

    #[test]
    fn patch_members_are_counted_with_their_area() {
        let mesh = mesh_surface(&MirrorShape::plane(0.4, 0.4).unwrap(), MeshResolution::square(40)).unwrap();
        let d = Vec3::new(0.0, 2.0, 1.0);
        let patch = contributing_patch(d, &mesh, &table_source()).unwrap();
        assert!((patch.area - patch.member_count as f64 * 1e-4).abs() < 1e-15);
        assert!((patch.normal.norm() - 1.0).abs() < 1e-12);
    }
}
