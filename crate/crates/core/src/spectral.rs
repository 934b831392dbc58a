//! Fourier transforms, multipliers and the biharmonic free propagator.
//!
//! All multiplier operators go through [`Spectrum`], which holds the
//! unnormalized lattice coefficients of a field in the grid's transform
//! convention. Normalization constants cancel inside `F⁻¹ m F`, so only
//! [`transform`] applies them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Space};
use crate::grid::{Convention, Grid};

/// Direction of [`transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub(crate) fn raw_direction(convention: Convention) -> (FftDirection, FftDirection) {
    match convention {
        Convention::Minus => (FftDirection::Forward, FftDirection::Inverse),
        Convention::Plus => (FftDirection::Inverse, FftDirection::Forward),
    }
}

/// `(-1)^{k_1 + ... + k_n}`: the phase picked up by sampling on
/// `[-L/2, L/2)` instead of `[0, L)`.
fn corner_sign(grid: &Grid, flat: usize) -> f64 {
    let parity: usize = grid.unravel(flat).iter().sum();
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Discrete Fourier transform normalized as `(2π)^{-n/2} ∫ f(y) e^{±i⟨y,ξ⟩} dy`
/// (rectangle rule), with the phase sign set by the grid's [`Convention`].
pub fn transform(f: &ComplexField, direction: Direction) -> Result<ComplexField> {
    let grid = f.grid();
    let n = grid.dim() as i32;
    let c = grid.cell_volume() / (2.0 * PI).powf(n as f64 / 2.0);
    let (fwd, back) = raw_direction(grid.convention());
    match (direction, f.space()) {
        (Direction::Forward, Space::Physical) => {
            let mut v = f.values().to_vec();
            grid.fft().process(&mut v, fwd);
            for (i, z) in v.iter_mut().enumerate() {
                *z *= c * corner_sign(grid, i);
            }
            Ok(f.with_values(v, Space::Frequency))
        }
        (Direction::Inverse, Space::Frequency) => {
            let mut v: Vec<Complex64> = f
                .values()
                .iter()
                .enumerate()
                .map(|(i, z)| z * (corner_sign(grid, i) / c))
                .collect();
            grid.fft().process(&mut v, back);
            let scale = 1.0 / grid.len() as f64;
            v.iter_mut().for_each(|z| *z *= scale);
            Ok(f.with_values(v, Space::Physical))
        }
        (Direction::Forward, Space::Frequency) => {
            Err(Error::Usage("forward transform of a frequency-space field".into()))
        }
        (Direction::Inverse, Space::Physical) => {
            Err(Error::Usage("inverse transform of a physical-space field".into()))
        }
    }
}

/// Unnormalized lattice coefficients of a physical field.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(f: &ComplexField) -> Result<Self> {
        f.require_physical("spectral analysis")?;
        let grid = f.grid().clone();
        let mut coeffs = f.values().to_vec();
        grid.fft().process(&mut coeffs, raw_direction(grid.convention()).0);
        Ok(Self { grid, coeffs })
    }

    /// Wraps raw lattice coefficients (FFT storage order, unnormalized).
    pub(crate) fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} coefficients for {} grid points", coeffs.len(), grid.len())));
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Relative weight of the `ξ = 0` coefficient.
    pub fn mean_fraction(&self) -> f64 {
        let total = self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if total == 0.0 {
            0.0
        } else {
            self.coeffs[0].norm() / total
        }
    }

    /// Physical field with coefficients multiplied by `symbol(flat index)`.
    pub fn synthesize(&self, symbol: impl Fn(usize) -> Complex64) -> ComplexField {
        let mut v: Vec<Complex64> =
            self.coeffs.iter().enumerate().map(|(i, &z)| z * symbol(i)).collect();
        self.grid.fft().process(&mut v, raw_direction(self.grid.convention()).1);
        let scale = 1.0 / self.grid.len() as f64;
        v.iter_mut().for_each(|z| *z *= scale);
        ComplexField::from_values(&self.grid, v, Space::Physical).expect("length preserved")
    }

    /// Physical field with coefficients multiplied by `symbol(|ξ|²)`.
    pub fn synthesize_radial(&self, symbol: impl Fn(f64) -> Complex64) -> ComplexField {
        let xi_sq = self.grid.xi_squared();
        self.synthesize(|i| symbol(xi_sq[i]))
    }

    /// Mixed partial derivative `∂_{a_1} ... ∂_{a_m}` of the underlying field.
    pub fn derivative(&self, axes: &[usize]) -> ComplexField {
        let sign = self.grid.convention().derivative_sign();
        self.synthesize(|i| {
            let idx = self.grid.unravel(i);
            axes.iter().fold(Complex64::new(1.0, 0.0), |acc, &a| {
                acc * Complex64::new(0.0, sign * self.grid.wavenumbers(a)[idx[a]])
            })
        })
    }

    pub fn gradient(&self) -> Vec<ComplexField> {
        (0..self.grid.dim()).map(|a| self.derivative(&[a])).collect()
    }

    pub fn laplacian(&self) -> ComplexField {
        self.synthesize_radial(|k2| Complex64::new(-k2, 0.0))
    }
}

/// `F⁻¹(m(ξ) F f)` for a symbol evaluated on the lattice wave vectors.
pub fn apply_multiplier(f: &ComplexField, symbol: impl Fn(&[f64]) -> Complex64) -> Result<ComplexField> {
    let grid = f.grid();
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let xi = grid.wavevector(i);
        let m = symbol(&xi);
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::Domain(format!("multiplier is not finite at ξ = {xi:?}")));
        }
        values.push(m);
    }
    let spec = Spectrum::of(f)?;
    Ok(spec.synthesize(|i| values[i]))
}

/// Free biharmonic flow `e^{itΔ²} f = F⁻¹ e^{it|ξ|⁴} F f`.
pub fn free_propagate(f: &ComplexField, t: f64) -> Result<ComplexField> {
    free_propagate_scaled(f, t, 1.0)
}

/// `e^{it c Δ²} f`, the linear flow of `i∂ₜu + c Δ²u = 0`.
pub fn free_propagate_scaled(f: &ComplexField, t: f64, coeff: f64) -> Result<ComplexField> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("propagation time must be finite, got {t}")));
    }
    f.require_physical("free_propagate")?;
    if t == 0.0 || coeff == 0.0 {
        return Ok(f.clone());
    }
    let spec = Spectrum::of(f)?;
    Ok(spec.synthesize_radial(|k2| Complex64::from_polar(1.0, t * coeff * k2 * k2)))
}

/// `|∇|^s f` with the `ξ = 0` mode sent to zero.
///
/// Negative orders need mean-zero input: the zero coefficient must be
/// below `1e-10` relative to the full coefficient vector.
pub fn fractional_derivative(f: &ComplexField, s: f64) -> Result<ComplexField> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("derivative order must be finite, got {s}")));
    }
    let spec = Spectrum::of(f)?;
    if s < 0.0 && spec.mean_fraction() > 1e-10 {
        return Err(Error::Precondition(format!(
            "|∇|^{s} requires mean-zero input (relative mean {:.3e})",
            spec.mean_fraction()
        )));
    }
    Ok(spec.synthesize_radial(|k2| {
        if k2 == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(k2.powf(0.5 * s), 0.0)
        }
    }))
}

/// Trigonometric-interpolation translate `x ↦ f(x - shift)`.
pub fn translate(f: &ComplexField, shift: &[f64]) -> Result<ComplexField> {
    let grid = f.grid();
    if shift.len() != grid.dim() {
        return Err(Error::Usage(format!("shift has {} components, grid has {}", shift.len(), grid.dim())));
    }
    let sign = grid.convention().derivative_sign();
    let spec = Spectrum::of(f)?;
    Ok(spec.synthesize(|i| {
        let xi = grid.wavevector(i);
        let phase: f64 = xi.iter().zip(shift).map(|(k, s)| k * s).sum();
        Complex64::from_polar(1.0, -sign * phase)
    }))
}
