//! Forward wave limit, scattering defect and the inverse wave operator.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{duhamel_fixed_point, evolve_backward, EquationParams, EvolveConfig, Trajectory};
use crate::field::ComplexField;
use crate::norms::{hom_sobolev, inhom_sobolev};
use crate::observables::{energy_with, mass};
use crate::quadrature::{cumulative_simpson, Samples};
use crate::spectral::{free_propagate_scaled, Spectrum};

#[derive(Clone, Debug)]
pub struct ScatterResult {
    pub u_plus: ComplexField,
    pub horizon: f64,
    /// `H²` norm of the Duhamel increment over the last quarter of the window.
    pub tail_estimate: f64,
    /// `|M(u⁺) − M(u₀)| / M(u₀)`.
    pub mass_residual: f64,
    /// `|2E(u₀) − ν⁴‖u⁺‖²_{Ḣ²}| / 2E(u₀)`.
    pub energy_residual: f64,
    /// Increments over the four quarters of the window.
    pub quarter_increments: [f64; 4],
}

fn stored_series(traj: &Trajectory) -> Result<(Vec<f64>, Vec<&ComplexField>)> {
    let mut times = Vec::new();
    let mut fields = Vec::new();
    for s in traj.samples() {
        match &s.field {
            Some(f) => {
                times.push(s.time);
                fields.push(f);
            }
            None => return Err(Error::Usage(format!("trajectory has no stored field at t = {}", s.time))),
        }
    }
    if times.len() < 3 {
        return Err(Error::Usage("wave limit needs at least three stored fields".into()));
    }
    Ok((times, fields))
}

/// `u⁺ ≈ u₀ + iμ∫₀^T e^{−isν⁴Δ²}(|u|²u)(s) ds` by Simpson over the stored fields,
/// which must be equispaced from `t = 0`.
pub fn forward_wave_limit(traj: &Trajectory) -> Result<ScatterResult> {
    let (times, fields) = stored_series(traj)?;
    let params = *traj.params();
    let h = times[1] - times[0];
    let horizon = times[times.len() - 1];
    if times[0] != 0.0 || times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::Usage("wave limit needs equispaced stored fields starting at t = 0".into()));
    }
    let grid = fields[0].grid().clone();
    let xi_sq = grid.xi_squared();
    let nu4 = params.nu4();
    let mu = params.mu();
    // Pulled-back nonlinearity in lattice coefficients.
    let integrand: Vec<Samples<Complex64>> = times
        .iter()
        .zip(&fields)
        .map(|(&t, u)| {
            let forcing = u.map(|z| z * z.norm_sqr() * mu);
            let spec = Spectrum::of(&forcing)?;
            Ok(Samples(
                spec.coeffs().iter().zip(xi_sq.iter()).map(|(c, &k2)| c * Complex64::from_polar(1.0, -t * nu4 * k2 * k2)).collect(),
            ))
        })
        .collect::<Result<_>>()?;
    let integrals = cumulative_simpson(h, &integrand);
    let u0 = fields[0];
    let u0_spec = Spectrum::of(u0)?;
    let build = |coeffs: &[Complex64]| -> Result<ComplexField> {
        Ok(Spectrum::from_coeffs(&grid, coeffs.to_vec())?.synthesize(|_| Complex64::new(1.0, 0.0)))
    };
    let last = &integrals[integrals.len() - 1].0;
    let u_plus_coeffs: Vec<Complex64> = u0_spec.coeffs().iter().zip(last).map(|(a, i)| a + Complex64::i() * i).collect();
    let u_plus = build(&u_plus_coeffs)?;

    let m = integrals.len() - 1;
    let quarter = |a: usize, b: usize| -> Result<f64> {
        let d: Vec<Complex64> = integrals[b].0.iter().zip(&integrals[a].0).map(|(x, y)| x - y).collect();
        inhom_sobolev(&build(&d)?, 2.0)
    };
    let cuts = [0, m / 4, m / 2, 3 * m / 4, m];
    let mut q = [0.0; 4];
    for i in 0..4 {
        q[i] = quarter(cuts[i], cuts[i + 1])?;
    }
    if q[3] > 0.0 && q[3] >= q[2] {
        return Err(Error::Horizon(format!(
            "Duhamel increments are not decreasing over [0, {horizon}] (quarters {q:?}); extend the horizon"
        )));
    }
    let m0 = mass(u0)?;
    let mass_residual = if m0 == 0.0 { 0.0 } else { (mass(&u_plus)? - m0).abs() / m0 };
    let e2 = 2.0 * energy_with(u0, &params)?;
    let hp = hom_sobolev(&u_plus, 2.0)?;
    let energy_residual = if e2 == 0.0 { 0.0 } else { (e2 - nu4 * hp * hp).abs() / e2 };
    Ok(ScatterResult { u_plus, horizon, tail_estimate: q[3], mass_residual, energy_residual, quarter_increments: q })
}

/// `‖e^{−it₁ν⁴Δ²}u(t₁) − e^{−it₂ν⁴Δ²}u(t₂)‖_{H²}`.
pub fn scattering_defect(traj: &Trajectory, t1: f64, t2: f64) -> Result<f64> {
    let nu4 = traj.params().nu4();
    let a = free_propagate_scaled(traj.field_at(t1)?, -t1, nu4)?;
    let b = free_propagate_scaled(traj.field_at(t2)?, -t2, nu4)?;
    inhom_sobolev(&a.sub(&b)?, 2.0)
}

/// Controls for [`inverse_wave_operator`].
#[derive(Clone, Debug, PartialEq)]
pub struct InverseConfig {
    pub params: EquationParams,
    pub t_start: f64,
    pub t_max: f64,
    /// Equispaced Picard nodes on `[t_start, t_max]`.
    pub frames: usize,
    pub tol: f64,
    pub max_iters: usize,
    /// Step and dealiasing for the backward run from `t_start` to 0.
    pub dt: f64,
    pub dealias: bool,
}

/// `W₊(u⁺)`: solve `u(t) = e^{itν⁴Δ²}u⁺ − iμ∫_t^{T} e^{i(t−s)ν⁴Δ²}|u|²u ds`
/// on `[t_start, T]` by contraction, then run the equation back to `t = 0`.
pub fn inverse_wave_operator(u_plus: &ComplexField, cfg: &InverseConfig) -> Result<ComplexField> {
    cfg.params.validate()?;
    if !(cfg.t_start >= 0.0 && cfg.t_max > cfg.t_start) {
        return Err(Error::Domain(format!("need 0 ≤ t_start < t_max, got {} and {}", cfg.t_start, cfg.t_max)));
    }
    let nodes: Vec<f64> = (0..cfg.frames)
        .map(|j| cfg.t_start + (cfg.t_max - cfg.t_start) * j as f64 / (cfg.frames.max(2) - 1) as f64)
        .collect();
    let anchor = free_propagate_scaled(u_plus, cfg.t_max, cfg.params.nu4())?;
    let path = duhamel_fixed_point(&anchor, &nodes, true, &cfg.params, cfg.max_iters, cfg.tol).map_err(|e| match e {
        Error::NonContraction { iterations, residual } => Error::Horizon(format!(
            "wave-operator iteration did not contract on [{}, {}] ({iterations} iterations, residual {residual:.3e}); \
             data too large or window too long",
            cfg.t_start, cfg.t_max
        )),
        other => other,
    })?;
    let at_start = &path[0];
    if cfg.t_start == 0.0 {
        return Ok(at_start.clone());
    }
    let back = EvolveConfig::new(cfg.params, cfg.dt, cfg.t_start).with_dealias(cfg.dealias);
    evolve_backward(at_start, &back)
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectRow {
    pub t1: f64,
    pub t2: f64,
    pub defect: f64,
}

/// JSON report of a scattering run.
#[derive(Clone, Debug, Serialize)]
pub struct ScatterReport {
    pub horizon: f64,
    pub tail_estimate: f64,
    pub mass_residual: f64,
    pub energy_residual: f64,
    pub quarter_increments: [f64; 4],
    pub defects: Vec<DefectRow>,
}

impl ScatterReport {
    pub fn new(result: &ScatterResult, defects: Vec<DefectRow>) -> Self {
        Self {
            horizon: result.horizon,
            tail_estimate: result.tail_estimate,
            mass_residual: result.mass_residual,
            energy_residual: result.energy_residual,
            quarter_increments: result.quarter_increments,
            defects,
        }
    }
}
