//! Periodic boxes and their discrete frequency lattices.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::FftNd;

/// Default cap on the total number of grid points (2^24).
pub const DEFAULT_MAX_POINTS: usize = 1 << 24;

/// Sign of the phase used by the forward Fourier transform.
///
/// `Plus` is `f̂(ξ) = (2π)^{-n/2} ∫ f(y) e^{+i⟨y,ξ⟩} dy`; `Minus` uses
/// `e^{-i⟨y,ξ⟩}`. Even symbols such as `|ξ|⁴` act identically under both.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Plus,
    Minus,
}

impl Convention {
    /// Factor `σ` such that `∂_j` has symbol `iσξ_j`.
    pub fn derivative_sign(self) -> f64 {
        match self {
            Convention::Plus => -1.0,
            Convention::Minus => 1.0,
        }
    }
}

/// A periodic box `Π [-L_i/2, L_i/2)` sampled with `N_i` points per axis.
///
/// Cloning is cheap; the FFT plans and cached frequency tables are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    extents: Vec<f64>,
    points: Vec<usize>,
    convention: Convention,
    fft: FftNd,
    /// Per-axis wavenumbers in FFT storage order.
    wavenumbers: Vec<Vec<f64>>,
    xi_sq: OnceLock<Arc<[f64]>>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.extents == other.inner.extents
                && self.inner.points == other.inner.points
                && self.inner.convention == other.inner.convention)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("extents", &self.inner.extents)
            .field("points", &self.inner.points)
            .field("convention", &self.inner.convention)
            .finish()
    }
}

impl Grid {
    pub fn new(extents: &[f64], points: &[usize]) -> Result<Self> {
        Self::with_options(extents, points, Convention::default(), DEFAULT_MAX_POINTS)
    }

    /// Cubic box `[-L/2, L/2)^dim` with `n` points per axis.
    pub fn cube(dim: usize, extent: f64, n: usize) -> Result<Self> {
        Self::new(&vec![extent; dim], &vec![n; dim])
    }

    pub fn with_options(
        extents: &[f64],
        points: &[usize],
        convention: Convention,
        max_points: usize,
    ) -> Result<Self> {
        if extents.is_empty() || extents.len() != points.len() {
            return Err(Error::Domain(format!(
                "grid needs one extent per axis (got {} extents, {} point counts)",
                extents.len(),
                points.len()
            )));
        }
        for (axis, (&l, &n)) in extents.iter().zip(points).enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Domain(format!("extent of axis {axis} must be positive, got {l}")));
            }
            if n < 4 || n % 2 != 0 {
                return Err(Error::Domain(format!(
                    "point count of axis {axis} must be even and >= 4, got {n}"
                )));
            }
        }
        let total = points.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        match total {
            Some(t) if t <= max_points => {}
            _ => {
                return Err(Error::Domain(format!(
                    "grid {points:?} exceeds the memory cap of {max_points} points"
                )))
            }
        }
        let wavenumbers = extents
            .iter()
            .zip(points)
            .map(|(&l, &n)| (0..n).map(|i| 2.0 * PI * signed_mode(i, n) as f64 / l).collect())
            .collect();
        Ok(Self {
            inner: Arc::new(GridInner {
                extents: extents.to_vec(),
                points: points.to_vec(),
                convention,
                fft: FftNd::new(points),
                wavenumbers,
                xi_sq: OnceLock::new(),
            }),
        })
    }

    /// Same box and resolution with a different transform convention.
    pub fn with_convention(&self, convention: Convention) -> Self {
        Self::with_options(&self.inner.extents, &self.inner.points, convention, usize::MAX)
            .expect("existing grid is valid")
    }

    /// Same box with the point counts scaled by `factor` per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let points: Vec<usize> = self.inner.points.iter().map(|&n| n * factor).collect();
        Self::with_options(&self.inner.extents, &points, self.inner.convention, DEFAULT_MAX_POINTS)
    }

    pub fn dim(&self) -> usize {
        self.inner.points.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.inner.extents
    }

    pub fn points(&self) -> &[usize] {
        &self.inner.points
    }

    pub fn convention(&self) -> Convention {
        self.inner.convention
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.inner.fft.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.inner.extents[axis] / self.inner.points[axis] as f64
    }

    /// Smallest grid spacing over all axes.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// Volume element `Π L_i / N_i` of the rectangle rule.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.inner.extents.iter().product()
    }

    /// Lattice spacing `2π / L` of axis `axis` in frequency space.
    pub fn freq_step(&self, axis: usize) -> f64 {
        2.0 * PI / self.inner.extents[axis]
    }

    pub fn freq_cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.freq_step(a)).product()
    }

    /// Wavenumbers `ξ = 2πk/L` of one axis, in FFT storage order.
    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.inner.wavenumbers[axis]
    }

    /// Largest `|ξ|` on the lattice (attained at the Nyquist corner).
    pub fn max_frequency(&self) -> f64 {
        (0..self.dim())
            .map(|a| PI * self.inner.points[a] as f64 / self.inner.extents[a])
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Smallest nonzero `|ξ|` on the lattice.
    pub fn min_frequency(&self) -> f64 {
        (0..self.dim()).map(|a| self.freq_step(a)).fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn fft(&self) -> &FftNd {
        &self.inner.fft
    }

    /// Row-major multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let n = self.inner.points[axis];
            idx[axis] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.inner.points).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Coordinates of the samples of one axis: `x_j = -L/2 + j L/N`.
    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        let l = self.inner.extents[axis];
        let h = self.spacing(axis);
        (0..self.inner.points[axis]).map(|j| -0.5 * l + j as f64 * h).collect()
    }

    /// Physical position of a flat index.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(axis, &j)| -0.5 * self.inner.extents[axis] + j as f64 * self.spacing(axis))
            .collect()
    }

    /// Wave vector `ξ` attached to a flat index in frequency storage order.
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.inner.wavenumbers[axis][i])
            .collect()
    }

    /// Signed lattice index `k ∈ [-N/2, N/2)` per axis for a flat index.
    pub fn mode(&self, flat: usize) -> Vec<i64> {
        self.unravel(flat)
            .iter()
            .zip(&self.inner.points)
            .map(|(&i, &n)| signed_mode(i, n))
            .collect()
    }

    /// Flat storage index of a signed lattice mode, if it lies on the lattice.
    pub fn mode_index(&self, mode: &[i64]) -> Option<usize> {
        if mode.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(mode.len());
        for (&k, &n) in mode.iter().zip(&self.inner.points) {
            let half = (n / 2) as i64;
            if k < -half || k >= half {
                return None;
            }
            idx.push(if k < 0 { (k + n as i64) as usize } else { k as usize });
        }
        Some(self.ravel(&idx))
    }

    /// `|ξ|²` for every lattice point in storage order (computed once).
    pub fn xi_squared(&self) -> Arc<[f64]> {
        self.inner
            .xi_sq
            .get_or_init(|| {
                (0..self.len())
                    .map(|flat| self.wavevector(flat).iter().map(|x| x * x).sum())
                    .collect::<Vec<f64>>()
                    .into()
            })
            .clone()
    }
}

/// Signed mode of storage index `i` for an axis with `n` points.
pub(crate) fn signed_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
