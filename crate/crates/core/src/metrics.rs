//! Figures of merit: shadowing probability, SNR and empirical CDFs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radiometry::Photodetector;

/// Additive white Gaussian noise at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// One-sided power spectral density N0, W/Hz.
    pub psd: f64,
    /// Communication bandwidth B, Hz.
    pub bandwidth: f64,
}

impl NoiseModel {
    pub fn new(psd: f64, bandwidth: f64) -> Result<Self> {
        if !(psd > 0.0 && psd.is_finite()) {
            return Err(Error::config("noise.psd", format!("must be positive, got {psd}")));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::config(
                "noise.bandwidth",
                format!("must be positive, got {bandwidth}"),
            ));
        }
        Ok(Self { psd, bandwidth })
    }

    pub fn power(&self) -> f64 {
        self.psd * self.bandwidth
    }
}

/// Whether the direct path from the source reaches the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkState {
    LosPresent,
    LosBlocked,
}

impl LinkState {
    fn indicator(self) -> f64 {
        match self {
            LinkState::LosPresent => 1.0,
            LinkState::LosBlocked => 0.0,
        }
    }
}

/// Fraction of receiver positions whose mirror irradiance is below
/// `threshold` (W/m²), typically
/// [`ZERO_IRRADIANCE`](crate::nlos::ZERO_IRRADIANCE).
pub fn shadowing_probability(nlos: &[f64], threshold: f64) -> Result<f64> {
    if nlos.is_empty() {
        return Err(Error::config("grid", "irradiance field is empty"));
    }
    let shadowed = nlos.iter().filter(|&&e| e < threshold).count();
    Ok(shadowed as f64 / nlos.len() as f64)
}

/// Electrical SNR in dB from received optical powers (W).
///
/// `-inf` when no optical power reaches the detector.
pub fn snr_db(p_los: f64, p_nlos: f64, state: LinkState, pd: &Photodetector, noise: &NoiseModel) -> f64 {
    let current = pd.responsivity * (state.indicator() * p_los + p_nlos);
    10.0 * (current * current / noise.power()).log10()
}

/// Right-continuous empirical distribution with an atom at `-inf`.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
    floor_count: usize,
    total: usize,
}

impl EmpiricalCdf {
    /// Builds the distribution of `values`; `-inf` entries form the floor
    /// mass. NaN and `+inf` are rejected.
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empirical CDF needs at least one value".into()));
        }
        let mut sorted = Vec::with_capacity(values.len());
        let mut floor_count = 0;
        for &v in values {
            if v == f64::NEG_INFINITY {
                floor_count += 1;
            } else if v.is_finite() {
                sorted.push(v);
            } else {
                return Err(Error::Domain(format!("empirical CDF value {v} is not allowed")));
            }
        }
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            sorted,
            floor_count,
            total: values.len(),
        })
    }

    /// Probability mass sitting at `-inf`.
    pub fn floor_mass(&self) -> f64 {
        self.floor_count as f64 / self.total as f64
    }

    /// `P(X <= x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&v| v <= x);
        (self.floor_count + below) as f64 / self.total as f64
    }

    /// Smallest value whose CDF reaches `p`, for `p` in `(0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let rank = (p * self.total as f64).ceil().max(1.0) as usize;
        if rank <= self.floor_count {
            return f64::NEG_INFINITY;
        }
        let idx = (rank - self.floor_count - 1).min(self.sorted.len() - 1);
        self.sorted[idx]
    }

    /// Smallest and largest finite values.
    pub fn finite_range(&self) -> Option<(f64, f64)> {
        Some((*self.sorted.first()?, *self.sorted.last()?))
    }
}

/// Evaluates the empirical CDF of `values` at each of `points`.
pub fn empirical_cdf(values: &[f64], points: &[f64]) -> Result<Vec<(f64, f64)>> {
    let cdf = EmpiricalCdf::new(values)?;
    Ok(points.iter().map(|&x| (x, cdf.eval(x))).collect())
}
