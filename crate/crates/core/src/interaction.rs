//! Two-point functionals with free-space kernels, evaluated by zero-padded
//! (linear, not circular) FFT convolution.

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::FftNd;
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::norms::hom_sobolev;
use crate::spectral::Spectrum;

/// `(K_c * ρ)(x_i) = Σ_j K_c(x_i − x_j) ρ_j Δx` for each kernel component `c`.
pub(crate) fn linear_convolve(grid: &Grid, rho: &[f64], kernel: impl Fn(&[f64], &mut [f64]), components: usize) -> Vec<Vec<f64>> {
    let dim = grid.dim();
    let padded: Vec<usize> = grid.points().iter().map(|n| 2 * n).collect();
    let fft = FftNd::new(&padded);
    let total = fft.len();
    let unravel = |mut flat: usize| {
        let mut idx = vec![0usize; dim];
        for a in (0..dim).rev() {
            idx[a] = flat % padded[a];
            flat /= padded[a];
        }
        idx
    };
    let ravel = |idx: &[usize]| idx.iter().zip(&padded).fold(0usize, |acc, (i, n)| acc * n + i);

    let mut rho_hat = vec![Complex64::default(); total];
    for (i, &r) in rho.iter().enumerate() {
        rho_hat[ravel(&grid.unravel(i))] = Complex64::new(r, 0.0);
    }
    fft.process(&mut rho_hat, FftDirection::Forward);

    let mut kernels = vec![vec![Complex64::default(); total]; components];
    let mut z = vec![0.0; dim];
    let mut out = vec![0.0; components];
    for m in 0..total {
        let idx = unravel(m);
        for a in 0..dim {
            let n = grid.points()[a] as i64;
            let o = if (idx[a] as i64) < n { idx[a] as i64 } else { idx[a] as i64 - 2 * n };
            z[a] = o as f64 * grid.spacing(a);
        }
        kernel(&z, &mut out);
        for c in 0..components {
            kernels[c][m] = Complex64::new(out[c], 0.0);
        }
    }
    let dv = grid.cell_volume() / total as f64;
    kernels
        .into_iter()
        .map(|mut k| {
            fft.process(&mut k, FftDirection::Forward);
            k.iter_mut().zip(&rho_hat).for_each(|(a, b)| *a *= b);
            fft.process(&mut k, FftDirection::Inverse);
            (0..grid.len()).map(|i| k[ravel(&grid.unravel(i))].re * dv).collect()
        })
        .collect()
}

/// `2 ∫∫ |u(y)|² (x − y)/|x − y| · Im(ū∇u)(x) dx dy`, kernel taken as 0 at `x = y`.
pub fn interaction_morawetz(f: &ComplexField) -> Result<f64> {
    f.require_physical("interaction_morawetz")?;
    let grid = f.grid();
    let rho: Vec<f64> = f.values().iter().map(|z| z.norm_sqr()).collect();
    let fields = linear_convolve(
        grid,
        &rho,
        |z, out| {
            let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (o, zc) in out.iter_mut().zip(z) {
                *o = if r == 0.0 { 0.0 } else { zc / r };
            }
        },
        grid.dim(),
    );
    let grads = Spectrum::of(f)?.gradient();
    let mut sum = 0.0;
    for i in 0..grid.len() {
        let ubar = f.values()[i].conj();
        for (j, g) in grads.iter().enumerate() {
            sum += fields[j][i] * (ubar * g.values()[i]).im;
        }
    }
    Ok(2.0 * sum * grid.cell_volume())
}

/// `|M^i| / (‖u‖²_{L²} ‖u‖²_{Ḣ^{1/2}})`, the constant in the a-priori bound.
pub fn interaction_morawetz_ratio(f: &ComplexField) -> Result<f64> {
    let mi = interaction_morawetz(f)?;
    let l2 = hom_sobolev(f, 0.0)?;
    let half = hom_sobolev(f, 0.5)?;
    let den = l2 * l2 * half * half;
    if den == 0.0 {
        return Err(Error::UndefinedRatio("field has zero mass or zero Ḣ^{1/2} norm".into()));
    }
    Ok(mi.abs() / den)
}

/// `∫∫ |u(x)|² |u(y)|² (|x − y|² + δ²)^{−α/2} dx dy`.
pub fn interaction_potential(f: &ComplexField, alpha: f64, delta: f64) -> Result<f64> {
    f.require_physical("interaction_potential")?;
    if !(alpha.is_finite() && alpha > 0.0 && delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!("interaction potential needs α > 0 and δ > 0, got α = {alpha}, δ = {delta}")));
    }
    let grid = f.grid();
    let rho: Vec<f64> = f.values().iter().map(|z| z.norm_sqr()).collect();
    let conv = linear_convolve(
        grid,
        &rho,
        |z, out| {
            let r2: f64 = z.iter().map(|v| v * v).sum();
            out[0] = (r2 + delta * delta).powf(-0.5 * alpha);
        },
        1,
    );
    Ok(rho.iter().zip(&conv[0]).map(|(a, b)| a * b).sum::<f64>() * grid.cell_volume())
}
