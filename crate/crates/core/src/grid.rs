//! Regular receiver-plane grids and per-cell irradiance fields.

use serde::{Deserialize, Serialize};

use crate::geom::Vec3;

/// Uniform grid of detector positions on the horizontal receiver plane.
///
/// Cells are indexed row-major with `y` as the outer index, so cell
/// `(i, j)` (column `i` along `x`, row `j` along `y`) has index `j * nx + i`.
/// Detector positions are the cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverGrid {
    pub x_min: f64,
    pub y_min: f64,
    pub width: f64,
    pub depth: f64,
    pub nx: usize,
    pub ny: usize,
    /// Height of the receiver plane (mirror-frame `z`, floor-ward).
    pub z: f64,
}

impl ReceiverGrid {
    pub fn dx(&self) -> f64 {
        self.width / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.depth / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn cell_center(&self, i: usize, j: usize) -> Vec3 {
        Vec3::new(
            self.x_min + (i as f64 + 0.5) * self.dx(),
            self.y_min + (j as f64 + 0.5) * self.dy(),
            self.z,
        )
    }

    /// Detector position of the cell with flat index `k`.
    #[inline]
    pub fn position(&self, k: usize) -> Vec3 {
        self.cell_center(k % self.nx, k / self.nx)
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(|k| self.position(k))
    }

    /// Cell containing the horizontal position `(x, y)`, if inside the grid.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = (x - self.x_min) / self.dx();
        let fj = (y - self.y_min) / self.dy();
        if !(fi >= 0.0 && fj >= 0.0) {
            return None;
        }
        let (i, j) = (fi as usize, fj as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    /// Whether `(x, y)` lies inside the grid footprint.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_min + self.width && y >= self.y_min && y <= self.y_min + self.depth
    }

    /// Conservative range of cell columns whose centres can fall in
    /// `[lo, hi]` along `x`, widened by one cell on each side.
    pub(crate) fn column_span(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        span(lo, hi, self.x_min, self.dx(), self.nx)
    }

    pub(crate) fn row_span(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        span(lo, hi, self.y_min, self.dy(), self.ny)
    }
}

fn span(lo: f64, hi: f64, origin: f64, step: f64, n: usize) -> Option<(usize, usize)> {
    let a = ((lo - origin) / step - 0.5).floor() - 1.0;
    let b = ((hi - origin) / step - 0.5).ceil() + 1.0;
    if !(a.is_finite() && b.is_finite()) || b < 0.0 || a > (n - 1) as f64 {
        return None;
    }
    let a = a.max(0.0) as usize;
    let b = (b.min((n - 1) as f64)) as usize;
    Some((a, b))
}

/// Line-of-sight and mirror irradiance over a receiver grid, W/m².
#[derive(Debug, Clone)]
pub struct IrradianceField {
    pub grid: ReceiverGrid,
    pub los: Vec<f64>,
    pub nlos_exact: Vec<f64>,
    pub nlos_approx: Vec<f64>,
}
