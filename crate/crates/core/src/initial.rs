//! Named initial-data generators.

use std::path::PathBuf;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, Space};
use crate::grid::Grid;
use crate::littlewood_paley::{lp_project, DyadicScale, LpKind};
use crate::snapshot;

fn default_one() -> f64 {
    1.0
}

/// `A e^{−|x−c|²/(2w²)} e^{i⟨v,x⟩}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    #[serde(default = "default_one")]
    pub amplitude: f64,
    #[serde(default = "default_one")]
    pub width: f64,
    #[serde(default)]
    pub center: Vec<f64>,
    #[serde(default)]
    pub phase_velocity: Vec<f64>,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self { amplitude: 1.0, width: 1.0, center: Vec::new(), phase_velocity: Vec::new() }
    }
}

/// Frequency-side profile `Â e^{−(w|ξ|)⁴}` centred at `c`, scaled so the peak
/// modulus is `amplitude`. Flat up to `|ξ| ≈ 1/w` with a sharp roll-off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BroadbandSpec {
    #[serde(default = "default_one")]
    pub amplitude: f64,
    #[serde(default = "default_one")]
    pub width: f64,
    #[serde(default)]
    pub center: Vec<f64>,
}

/// Complex Gaussian coefficients `a_k ~ (1 + |ξ_k|²)^{−β/2} (X + iY)` on the
/// lattice modes `|k_i| ≤ max_mode`, drawn in a fixed mode order so the same
/// seed gives the same trigonometric polynomial on any compatible grid. The
/// result is rescaled to the requested `L²` norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub seed: u64,
    #[serde(default = "RandomSpec::default_max_mode")]
    pub max_mode: u32,
    /// Envelope power `β`.
    #[serde(default = "RandomSpec::default_envelope")]
    pub envelope: f64,
    #[serde(default = "RandomSpec::default_mean_zero")]
    pub mean_zero: bool,
    /// Keep only `lo ≤ |ξ| ≤ hi`.
    #[serde(default)]
    pub band: Option<[f64; 2]>,
    #[serde(default = "default_one")]
    pub l2_norm: f64,
}

impl RandomSpec {
    fn default_max_mode() -> u32 {
        16
    }
    fn default_envelope() -> f64 {
        2.0
    }
    fn default_mean_zero() -> bool {
        true
    }

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            max_mode: Self::default_max_mode(),
            envelope: Self::default_envelope(),
            mean_zero: true,
            band: None,
            l2_norm: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    Gaussian(GaussianSpec),
    PlaneWave {
        #[serde(default = "default_one")]
        amplitude: f64,
        mode: Vec<i64>,
    },
    /// `P_N` applied to a Gaussian.
    Annulus {
        scale: f64,
        #[serde(default)]
        base: GaussianSpec,
    },
    Broadband(BroadbandSpec),
    Random(RandomSpec),
    Snapshot { path: PathBuf },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Gaussian(GaussianSpec::default())
    }
}

fn pad(v: &[f64], dim: usize, what: &str) -> Result<Vec<f64>> {
    match v.len() {
        0 => Ok(vec![0.0; dim]),
        n if n == dim => Ok(v.to_vec()),
        n => Err(Error::Domain(format!("initial.{what} has {n} components for n = {dim}"))),
    }
}

impl InitialData {
    /// Checks ranges without touching the filesystem.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let dim = grid.dim();
        match self {
            InitialData::Gaussian(g) | InitialData::Annulus { base: g, .. } => {
                pad(&g.center, dim, "center")?;
                pad(&g.phase_velocity, dim, "phase_velocity")?;
                if !(g.width > 0.0 && g.width.is_finite() && g.amplitude.is_finite()) {
                    return Err(Error::Domain("initial gaussian needs finite amplitude and width > 0".into()));
                }
                if let InitialData::Annulus { scale, .. } = self {
                    DyadicScale::from_value(*scale)?;
                }
            }
            InitialData::PlaneWave { mode, amplitude } => {
                if grid.mode_index(mode).is_none() || !amplitude.is_finite() {
                    return Err(Error::Domain(format!("initial.plane_wave.mode {mode:?} is not a lattice mode")));
                }
            }
            InitialData::Broadband(b) => {
                pad(&b.center, dim, "center")?;
                if !(b.width > 0.0 && b.width.is_finite() && b.amplitude.is_finite()) {
                    return Err(Error::Domain("initial broadband needs finite amplitude and width > 0".into()));
                }
            }
            InitialData::Random(r) => {
                if grid.points().iter().any(|&n| r.max_mode as usize >= n / 2) {
                    return Err(Error::Domain(format!(
                        "initial.random.max_mode = {} must stay below N/2 on every axis",
                        r.max_mode
                    )));
                }
                if !(r.envelope.is_finite() && r.l2_norm >= 0.0 && r.l2_norm.is_finite()) {
                    return Err(Error::Domain("initial.random needs finite envelope and l2_norm ≥ 0".into()));
                }
                if let Some([lo, hi]) = r.band {
                    if !(lo >= 0.0 && hi > lo) {
                        return Err(Error::Domain(format!("initial.random.band [{lo}, {hi}] is empty")));
                    }
                }
            }
            InitialData::Zero | InitialData::Snapshot { .. } => {}
        }
        Ok(())
    }

    pub fn build(&self, grid: &Grid) -> Result<ComplexField> {
        self.validate(grid)?;
        let dim = grid.dim();
        match self {
            InitialData::Zero => Ok(ComplexField::zeros(grid)),
            InitialData::Gaussian(g) => Ok(gaussian(grid, g)?),
            InitialData::PlaneWave { amplitude, mode } => ComplexField::plane_wave(grid, *amplitude, mode),
            InitialData::Annulus { scale, base } => {
                lp_project(&gaussian(grid, base)?, DyadicScale::from_value(*scale)?, LpKind::At)
            }
            InitialData::Broadband(b) => broadband(grid, b.amplitude, b.width, &pad(&b.center, dim, "center")?),
            InitialData::Random(r) => random_field(grid, r),
            InitialData::Snapshot { path } => {
                let f = snapshot::read(path)?;
                if f.grid().points() != grid.points() || f.grid().extents() != grid.extents() {
                    return Err(Error::GridMismatch(format!(
                        "snapshot {} has grid {:?} × {:?}, config asks for {:?} × {:?}",
                        path.display(),
                        f.grid().extents(),
                        f.grid().points(),
                        grid.extents(),
                        grid.points()
                    )));
                }
                ComplexField::from_values(grid, f.into_values(), Space::Physical)
            }
        }
    }
}

fn gaussian(grid: &Grid, g: &GaussianSpec) -> Result<ComplexField> {
    let dim = grid.dim();
    Ok(ComplexField::gaussian(
        grid,
        g.amplitude,
        g.width,
        &pad(&g.center, dim, "center")?,
        &pad(&g.phase_velocity, dim, "phase_velocity")?,
    ))
}

/// `Σ_k a_k e^{i⟨ξ_k, x⟩}` sampled on the grid, for coefficients given per lattice index.
fn synthesize_plane_waves(grid: &Grid, coeff: impl Fn(&[i64]) -> Complex64) -> ComplexField {
    // With x_j = −L/2 + j Δx, e^{iξ_k x_j} = (−1)^k e^{2πi kj/N}.
    let mut v: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let k = grid.mode(i);
            let parity: i64 = k.iter().sum();
            let c = coeff(&k);
            if parity.rem_euclid(2) == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    grid.fft().process(&mut v, FftDirection::Inverse);
    ComplexField::from_values(grid, v, Space::Physical).expect("length preserved")
}

/// Super-Gaussian spectrum `e^{−(w|ξ|)⁴}` translated to `center`.
pub fn broadband(grid: &Grid, amplitude: f64, width: f64, center: &[f64]) -> Result<ComplexField> {
    if center.len() != grid.dim() {
        return Err(Error::Domain(format!("broadband center has {} components for n = {}", center.len(), grid.dim())));
    }
    let raw = synthesize_plane_waves(grid, |k| {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for (a, &ka) in k.iter().enumerate() {
            let xi = ka as f64 * grid.freq_step(a);
            r2 += xi * xi;
            phase -= xi * center[a];
        }
        Complex64::from_polar((-(width * width * r2).powi(2)).exp(), phase)
    });
    let peak = raw.max_abs();
    Ok(if peak == 0.0 { raw } else { raw.scale(Complex64::new(amplitude / peak, 0.0)) })
}

pub fn random_field(grid: &Grid, spec: &RandomSpec) -> Result<ComplexField> {
    let dim = grid.dim();
    let k_max = spec.max_mode as i64;
    let side = (2 * k_max + 1) as usize;
    let count = side.pow(dim as u32);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut table = vec![Complex64::default(); count];
    // Canonical order: lexicographic in k ∈ [−K, K]^n, independent of the grid.
    for c in table.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *c = Complex64::new(re, im);
    }
    let index = |k: &[i64]| -> Option<usize> {
        let mut flat = 0usize;
        for &ka in k {
            if ka.abs() > k_max {
                return None;
            }
            flat = flat * side + (ka + k_max) as usize;
        }
        Some(flat)
    };
    let raw = synthesize_plane_waves(grid, |k| {
        let Some(i) = index(k) else { return Complex64::default() };
        if spec.mean_zero && k.iter().all(|&v| v == 0) {
            return Complex64::default();
        }
        let xi2: f64 = k.iter().enumerate().map(|(a, &ka)| (ka as f64 * grid.freq_step(a)).powi(2)).sum();
        if let Some([lo, hi]) = spec.band {
            let r = xi2.sqrt();
            if r < lo || r > hi {
                return Complex64::default();
            }
        }
        table[i] * (1.0 + xi2).powf(-0.5 * spec.envelope)
    });
    let norm = (raw.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_volume()).sqrt();
    if norm == 0.0 {
        return Err(Error::Degenerate("random data has no modes in the requested band".into()));
    }
    Ok(raw.scale(Complex64::new(spec.l2_norm / norm, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Spectrum;

    #[test]
    fn random_field_is_grid_independent() {
        let spec = RandomSpec { max_mode: 6, ..RandomSpec::new(7) };
        let coarse = random_field(&Grid::new(&[10.0], &[32]).unwrap(), &spec).unwrap();
        let fine = random_field(&Grid::new(&[10.0], &[64]).unwrap(), &spec).unwrap();
        for j in 0..32 {
            assert!((coarse.values()[j] - fine.values()[2 * j]).norm() < 1e-12);
        }
        let again = random_field(&Grid::new(&[10.0], &[32]).unwrap(), &spec).unwrap();
        assert_eq!(coarse.values(), again.values());
        assert!(Spectrum::of(&coarse).unwrap().mean_fraction() < 1e-14);
    }

    #[test]
    fn random_band_limits_support() {
        let g = Grid::new(&[2.0 * std::f64::consts::PI], &[64]).unwrap();
        let spec = RandomSpec { max_mode: 20, band: Some([4.0, 8.0]), ..RandomSpec::new(3) };
        let f = random_field(&g, &spec).unwrap();
        let spec_f = Spectrum::of(&f).unwrap();
        for (i, c) in spec_f.coeffs().iter().enumerate() {
            let xi = g.wavevector(i)[0].abs();
            if !(4.0..=8.0).contains(&xi) {
                assert!(c.norm() < 1e-12);
            }
        }
        let empty = RandomSpec { max_mode: 2, band: Some([4.0, 8.0]), ..RandomSpec::new(3) };
        assert!(matches!(random_field(&g, &empty), Err(Error::Degenerate(_))));
    }

    #[test]
    fn broadband_peaks_at_center() {
        let g = Grid::new(&[40.0], &[256]).unwrap();
        let f = broadband(&g, 2.0, 1.0, &[3.125]).unwrap();
        assert!((f.max_abs() - 2.0).abs() < 1e-12);
        let (imax, _) = f.values().iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
        assert!((g.position(imax)[0] - 3.125).abs() < 1e-9);
    }

    #[test]
    fn generator_validation() {
        let g = Grid::new(&[10.0], &[32]).unwrap();
        assert!(InitialData::Annulus { scale: 3.0, base: GaussianSpec::default() }.build(&g).is_err());
        assert!(InitialData::PlaneWave { amplitude: 1.0, mode: vec![40] }.build(&g).is_err());
        assert!(InitialData::Random(RandomSpec { max_mode: 16, ..RandomSpec::new(1) }).build(&g).is_err());
        let data: InitialData = serde_json::from_str(r#"{"gaussian": {"amplitude": 0.5}}"#).unwrap();
        assert_eq!(data.build(&g).unwrap().max_abs(), 0.5);
    }
}
