use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Whether a field holds physical samples or Fourier coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Physical,
    Frequency,
}

/// Complex samples on a [`Grid`], stored row-major.
///
/// Frequency-space values are stored in FFT order (nonnegative modes
/// first), see [`Grid::wavenumbers`].
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
    space: Space,
}

impl ComplexField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), values: vec![Complex64::default(); grid.len()], space: Space::Physical }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values supplied for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: grid.clone(), values, space })
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Self { grid: grid.clone(), values, space: Space::Physical }
    }

    /// `A e^{i⟨x, ξ_k⟩}` for the lattice mode `k` (signed indices).
    pub fn plane_wave(grid: &Grid, amplitude: f64, mode: &[i64]) -> Result<Self> {
        if grid.mode_index(mode).is_none() {
            return Err(Error::Domain(format!("mode {mode:?} is not on the lattice")));
        }
        let xi: Vec<f64> = mode
            .iter()
            .enumerate()
            .map(|(a, &k)| grid.freq_step(a) * k as f64)
            .collect();
        Ok(Self::from_fn(grid, |x| {
            let phase: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
            Complex64::from_polar(amplitude, phase)
        }))
    }

    /// `A exp(-|x-c|²/(2w²)) e^{i⟨v, x⟩}`.
    pub fn gaussian(grid: &Grid, amplitude: f64, width: f64, center: &[f64], velocity: &[f64]) -> Self {
        Self::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for (a, xa) in x.iter().enumerate() {
                let d = xa - center.get(a).copied().unwrap_or(0.0);
                r2 += d * d;
                phase += velocity.get(a).copied().unwrap_or(0.0) * xa;
            }
            Complex64::from_polar(amplitude * (-0.5 * r2 / (width * width)).exp(), phase)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>, space: Space) -> Self {
        debug_assert_eq!(values.len(), self.grid.len());
        Self { grid: self.grid.clone(), values, space }
    }

    pub fn require_physical(&self, op: &str) -> Result<()> {
        match self.space {
            Space::Physical => Ok(()),
            Space::Frequency => Err(Error::Usage(format!("{op} expects a physical-space field"))),
        }
    }

    pub fn require_same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.with_values(self.values.iter().map(|&z| f(z)).collect(), self.space)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    /// Pointwise `self + c · other`.
    pub fn add_scaled(&self, c: Complex64, other: &ComplexField) -> Result<Self> {
        self.require_same_grid(other)?;
        if self.space != other.space {
            return Err(Error::Usage("cannot combine fields in different spaces".into()));
        }
        Ok(self.with_values(
            self.values.iter().zip(&other.values).map(|(&a, &b)| a + c * b).collect(),
            self.space,
        ))
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// Largest pointwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete `ℓ²` norm of the raw values (no quadrature weight).
    pub fn l2_raw(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
