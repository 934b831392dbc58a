//! Time integration of `i∂ₜu + ν⁴Δ²u + μ|u|²u = 0`.
//!
//! [`strang_evolve`] is the production integrator (phase – linear – phase
//! Strang splitting with exact substeps); [`picard_solve`] iterates the
//! Duhamel map with Simpson quadrature and serves as an independent oracle.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, Space};
use crate::grid::Grid;
use crate::quadrature::{cumulative_simpson, Samples};
use crate::spectral::raw_direction;

/// `ν` (entering as `ν⁴`) and the nonlinearity sign `μ ∈ {−1, 0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationParams {
    pub dispersion: f64,
    pub nonlinearity: i8,
}

impl Default for EquationParams {
    fn default() -> Self {
        Self { dispersion: 1.0, nonlinearity: 1 }
    }
}

impl EquationParams {
    pub fn new(dispersion: f64, nonlinearity: i8) -> Result<Self> {
        let p = Self { dispersion, nonlinearity };
        p.validate()?;
        Ok(p)
    }

    /// The free equation `i∂ₜu + Δ²u = 0`.
    pub fn linear() -> Self {
        Self { dispersion: 1.0, nonlinearity: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dispersion.is_finite() && self.dispersion >= 0.0) {
            return Err(Error::Domain(format!("equation.dispersion must be finite and ≥ 0, got {}", self.dispersion)));
        }
        if !matches!(self.nonlinearity, -1..=1) {
            return Err(Error::Domain(format!("equation.nonlinearity must be -1, 0 or 1, got {}", self.nonlinearity)));
        }
        Ok(())
    }

    /// Coefficient `ν⁴` of `Δ²`.
    pub fn nu4(&self) -> f64 {
        self.dispersion.powi(4)
    }

    pub fn mu(&self) -> f64 {
        self.nonlinearity as f64
    }
}

/// Step control for [`strang_evolve`].
#[derive(Clone, Debug, PartialEq)]
pub struct EvolveConfig {
    pub params: EquationParams,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub record_every: usize,
    pub snapshot_every: Option<usize>,
    /// Blow-up ceiling as a multiple of the initial `L^∞` norm.
    pub amplitude_ceiling: f64,
}

impl EvolveConfig {
    pub fn new(params: EquationParams, dt: f64, t_end: f64) -> Self {
        Self { params, dt, t_end, dealias: true, record_every: 1, snapshot_every: None, amplitude_ceiling: 1e6 }
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn with_record_every(mut self, stride: usize) -> Self {
        self.record_every = stride;
        self
    }

    pub fn with_snapshots(mut self, stride: usize) -> Self {
        self.snapshot_every = Some(stride);
        self
    }

    /// Number of steps; `t_end` must be a whole number of steps.
    pub fn steps(&self) -> Result<usize> {
        self.validate()?;
        Ok((self.t_end / self.dt).round() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Domain(format!("integrator.dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Domain(format!("integrator.t_end must be positive, got {}", self.t_end)));
        }
        if self.dt >= self.t_end {
            return Err(Error::Domain(format!("integrator.dt = {} must be below t_end = {}", self.dt, self.t_end)));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(Error::Domain(format!(
                "integrator.t_end = {} is not a whole number of steps of dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.record_every == 0 || self.snapshot_every == Some(0) {
            return Err(Error::Domain("output strides must be ≥ 1".into()));
        }
        if !(self.amplitude_ceiling > 1.0) {
            return Err(Error::Domain(format!("amplitude ceiling must exceed 1, got {}", self.amplitude_ceiling)));
        }
        Ok(())
    }
}

/// A quantity recorded along a run.
pub trait Observable: Sync {
    fn name(&self) -> String;
    fn evaluate(&self, u: &ComplexField, params: &EquationParams) -> Result<f64>;
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub time: f64,
    pub field: Option<ComplexField>,
    pub record: Vec<f64>,
}

/// Time-ordered samples of a run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    params: EquationParams,
    columns: Vec<String>,
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(params: EquationParams, columns: Vec<String>) -> Self {
        Self { params, columns, samples: Vec::new() }
    }

    pub fn push(&mut self, sample: Sample) -> Result<()> {
        if let Some(last) = self.samples.last() {
            if !(sample.time > last.time) {
                return Err(Error::Usage(format!("sample time {} does not follow {}", sample.time, last.time)));
            }
        }
        if sample.record.len() != self.columns.len() {
            return Err(Error::Usage(format!(
                "record has {} entries for {} columns",
                sample.record.len(),
                self.columns.len()
            )));
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn params(&self) -> &EquationParams {
        &self.params
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    /// Stored field at the sample closest to `t` (within `1e-9` relative).
    pub fn field_at(&self, t: f64) -> Result<&ComplexField> {
        let tol = 1e-9 * t.abs().max(1.0);
        let s = self
            .samples
            .iter()
            .find(|s| (s.time - t).abs() <= tol)
            .ok_or_else(|| Error::Usage(format!("no sample at t = {t}")))?;
        s.field.as_ref().ok_or_else(|| Error::Usage(format!("no stored field at t = {t}")))
    }

    pub fn last_field(&self) -> Option<&ComplexField> {
        self.samples.iter().rev().find_map(|s| s.field.as_ref())
    }

    /// Values of one record column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.samples.iter().map(|s| s.record[i]).collect())
    }
}

/// Exact flow of `i∂ₜu + μ|u|²u = 0`: `u ↦ u e^{iμ|u|²dt}`.
pub fn nonlinear_phase_step(f: &ComplexField, dt: f64, mu: f64) -> Result<ComplexField> {
    f.require_physical("nonlinear_phase_step")?;
    Ok(f.map(|z| z * Complex64::from_polar(1.0, mu * z.norm_sqr() * dt)))
}

fn phase_in_place(values: &mut [Complex64], theta: f64) {
    if theta != 0.0 {
        for z in values.iter_mut() {
            *z *= Complex64::from_polar(1.0, theta * z.norm_sqr());
        }
    }
}

/// Mask keeping modes with every `|k_i| ≤ ⌊N_i/4⌋`.
pub fn dealias_mask(grid: &Grid) -> Vec<bool> {
    (0..grid.len())
        .map(|i| grid.mode(i).iter().zip(grid.points()).all(|(&k, &n)| k.unsigned_abs() as usize <= n / 4))
        .collect()
}

/// One reusable Strang step.
struct Stepper {
    grid: Grid,
    half_theta: f64,
    /// Linear phase with the mask and FFT normalization folded in.
    linear: Vec<Complex64>,
    post_mask: Option<Vec<f64>>,
}

impl Stepper {
    fn new(grid: &Grid, params: &EquationParams, dt: f64, dealias: bool) -> Self {
        let scale = 1.0 / grid.len() as f64;
        let mask = dealias.then(|| dealias_mask(grid));
        let xi_sq = grid.xi_squared();
        let linear = xi_sq
            .iter()
            .enumerate()
            .map(|(i, &k2)| {
                let keep = mask.as_ref().map_or(true, |m| m[i]);
                if keep {
                    Complex64::from_polar(scale, dt * params.nu4() * k2 * k2)
                } else {
                    Complex64::default()
                }
            })
            .collect();
        let post_mask = mask.map(|m| m.iter().map(|&k| if k { scale } else { 0.0 }).collect());
        Self { grid: grid.clone(), half_theta: 0.5 * dt * params.mu(), linear, post_mask }
    }

    fn step(&self, u: &mut [Complex64]) {
        let fft = self.grid.fft();
        let (fwd, back) = raw_direction(self.grid.convention());
        phase_in_place(u, self.half_theta);
        fft.process(u, fwd);
        u.iter_mut().zip(&self.linear).for_each(|(z, m)| *z *= m);
        fft.process(u, back);
        phase_in_place(u, self.half_theta);
        if let Some(mask) = &self.post_mask {
            if self.half_theta != 0.0 {
                fft.process(u, fwd);
                u.iter_mut().zip(mask).for_each(|(z, m)| *z *= m);
                fft.process(u, back);
            }
        }
    }
}

fn record(u: &ComplexField, observers: &[&dyn Observable], params: &EquationParams) -> Result<Vec<f64>> {
    observers.par_iter().map(|o| o.evaluate(u, params)).collect()
}

/// Strang-split evolution from `t = 0` to `cfg.t_end`.
///
/// Samples are taken at step 0, every `record_every` steps, every
/// `snapshot_every` steps (with the field stored) and at the final step.
pub fn strang_evolve(u0: &ComplexField, cfg: &EvolveConfig, observers: &[&dyn Observable]) -> Result<Trajectory> {
    u0.require_physical("strang_evolve")?;
    let steps = cfg.steps()?;
    let grid = u0.grid().clone();
    let stepper = Stepper::new(&grid, &cfg.params, cfg.dt, cfg.dealias);
    let columns = observers.iter().map(|o| o.name()).collect();
    let mut traj = Trajectory::new(cfg.params, columns);
    let ceiling = cfg.amplitude_ceiling * u0.max_abs();
    let mut state = u0.clone();
    for step in 0..=steps {
        if step > 0 {
            stepper.step(state.values_mut());
            let peak = state.max_abs();
            if !state.is_finite() || !peak.is_finite() {
                return Err(Error::BlowUp { step, time: step as f64 * cfg.dt, reason: "non-finite state".into() });
            }
            if peak > ceiling {
                return Err(Error::BlowUp {
                    step,
                    time: step as f64 * cfg.dt,
                    reason: format!("amplitude {peak:.3e} exceeds ceiling {ceiling:.3e}"),
                });
            }
        }
        let snap = cfg.snapshot_every.is_some_and(|s| step % s == 0);
        if step % cfg.record_every == 0 || snap || step == steps {
            let time = if step == steps { cfg.t_end } else { step as f64 * cfg.dt };
            let field = (snap || (step == steps && cfg.snapshot_every.is_some())).then(|| state.clone());
            traj.push(Sample { time, field, record: record(&state, observers, &cfg.params)? })?;
        }
    }
    Ok(traj)
}

/// Final state of [`strang_evolve`] without bookkeeping.
pub fn evolve_final(u0: &ComplexField, cfg: &EvolveConfig) -> Result<ComplexField> {
    let cfg = EvolveConfig { record_every: usize::MAX, snapshot_every: Some(usize::MAX), ..cfg.clone() };
    let traj = strang_evolve(u0, &cfg, &[])?;
    Ok(traj.last_field().expect("final sample stores its field").clone())
}

/// `u(−T)` from `u(0)`, using `u(t) ↦ conj(u(−t))`.
pub fn evolve_backward(u0: &ComplexField, cfg: &EvolveConfig) -> Result<ComplexField> {
    Ok(evolve_final(&u0.conj(), cfg)?.conj())
}

/// Iterates the Duhamel map around an anchor state on equispaced `nodes`.
///
/// With `anchor_at_end = false` this solves
/// `u(t) = e^{i(t−t₀)ν⁴Δ²}[u(t₀) + iμ∫_{t₀}^t e^{−i(s−t₀)ν⁴Δ²}|u|²u ds]`;
/// with `true` the same equation is anchored at the last node.
pub(crate) fn duhamel_fixed_point(
    anchor: &ComplexField,
    nodes: &[f64],
    anchor_at_end: bool,
    params: &EquationParams,
    max_iters: usize,
    tol: f64,
) -> Result<Vec<ComplexField>> {
    anchor.require_physical("picard_solve")?;
    let grid = anchor.grid().clone();
    let m = nodes.len();
    if m < 2 {
        return Err(Error::Usage("Duhamel iteration needs at least two nodes".into()));
    }
    let order: Vec<usize> = if anchor_at_end { (0..m).rev().collect() } else { (0..m).collect() };
    let t0 = nodes[order[0]];
    let h = nodes[order[1]] - t0;
    let fft = grid.fft();
    let (fwd, back) = raw_direction(grid.convention());
    let xi_sq = grid.xi_squared();
    let nu4 = params.nu4();
    let mu = params.mu();
    let scale = 1.0 / grid.len() as f64;
    // e^{±i(t−t₀)ν⁴|ξ|⁴} per node (in iteration order).
    let phases: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&j| xi_sq.iter().map(|&k2| Complex64::from_polar(1.0, (nodes[j] - t0) * nu4 * k2 * k2)).collect())
        .collect();
    let mut anchor_hat = anchor.values().to_vec();
    fft.process(&mut anchor_hat, fwd);
    let synth = |coeffs: &[Complex64], phase: &[Complex64]| -> Vec<Complex64> {
        let mut v: Vec<Complex64> = coeffs.iter().zip(phase).map(|(c, p)| c * p * scale).collect();
        fft.process(&mut v, back);
        v
    };
    let mut current: Vec<Vec<Complex64>> = phases.iter().map(|p| synth(&anchor_hat, p)).collect();
    let reference = anchor.l2_raw().max(f64::MIN_POSITIVE);
    let mut last_residual = f64::INFINITY;
    for iter in 1..=max_iters {
        let integrands: Vec<Samples<Complex64>> = current
            .par_iter()
            .zip(&phases)
            .map(|(u, p)| {
                let mut g: Vec<Complex64> = u.iter().map(|z| z * z.norm_sqr() * mu).collect();
                fft.process(&mut g, fwd);
                g.iter_mut().zip(p).for_each(|(z, ph)| *z *= ph.conj());
                Samples(g)
            })
            .collect();
        let integrals = cumulative_simpson(h, &integrands);
        let next: Vec<Vec<Complex64>> = integrals
            .par_iter()
            .zip(&phases)
            .map(|(int, p)| {
                let coeffs: Vec<Complex64> =
                    anchor_hat.iter().zip(&int.0).map(|(a, i)| a + Complex64::i() * i).collect();
                synth(&coeffs, p)
            })
            .collect();
        let residual = next
            .iter()
            .zip(&current)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
            / reference;
        current = next;
        if !residual.is_finite() {
            return Err(Error::NonContraction { iterations: iter, residual });
        }
        if residual <= tol {
            let mut out: Vec<ComplexField> = current
                .into_iter()
                .map(|v| ComplexField::from_values(&grid, v, Space::Physical))
                .collect::<Result<_>>()?;
            if anchor_at_end {
                out.reverse();
            }
            return Ok(out);
        }
        if residual >= last_residual {
            return Err(Error::NonContraction { iterations: iter, residual });
        }
        last_residual = residual;
    }
    Err(Error::NonContraction { iterations: max_iters, residual: last_residual })
}

/// Picard iteration of the Duhamel formula on `frames` equispaced nodes of `[0, t_end]`.
///
/// `tol` bounds the sup-in-time `L²` change between iterates, relative to `‖u0‖`.
pub fn picard_solve(
    u0: &ComplexField,
    params: &EquationParams,
    t_end: f64,
    frames: usize,
    max_iters: usize,
    tol: f64,
) -> Result<Trajectory> {
    params.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) || frames < 2 || max_iters == 0 {
        return Err(Error::Domain(format!(
            "picard_solve needs t_end > 0, frames ≥ 2, max_iters ≥ 1 (got {t_end}, {frames}, {max_iters})"
        )));
    }
    let nodes: Vec<f64> = (0..frames).map(|j| t_end * j as f64 / (frames - 1) as f64).collect();
    let fields = duhamel_fixed_point(u0, &nodes, false, params, max_iters, tol)?;
    let mut traj = Trajectory::new(*params, Vec::new());
    for (t, f) in nodes.into_iter().zip(fields) {
        traj.push(Sample { time: t, field: Some(f), record: Vec::new() })?;
    }
    Ok(traj)
}

/// Numerical solution of the `ν`-equation with data `φ` alongside the
/// reference `w⁰(t) = φ e^{iμ|φ|²t}` at the same instants (fields stored at
/// every sample).
pub fn small_dispersion_pair(
    phi: &ComplexField,
    nu: f64,
    t_end: f64,
    cfg: &EvolveConfig,
) -> Result<(Trajectory, Trajectory)> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::Domain(format!("small-dispersion ν must lie in [0, 1), got {nu}")));
    }
    let params = EquationParams { dispersion: nu, ..cfg.params };
    let cfg = EvolveConfig { params, t_end, snapshot_every: Some(cfg.record_every), ..cfg.clone() };
    let numeric = strang_evolve(phi, &cfg, &[])?;
    let mut reference = Trajectory::new(params, Vec::new());
    for s in numeric.samples() {
        let w0 = nonlinear_phase_step(phi, s.time, params.mu())?;
        reference.push(Sample { time: s.time, field: Some(w0), record: Vec::new() })?;
    }
    Ok((numeric, reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::free_propagate;

    fn line(l: f64, n: usize) -> Grid {
        Grid::new(&[l], &[n]).unwrap()
    }

    fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    struct Peak;
    impl Observable for Peak {
        fn name(&self) -> String {
            "peak".into()
        }
        fn evaluate(&self, u: &ComplexField, _: &EquationParams) -> Result<f64> {
            Ok(u.max_abs())
        }
    }

    #[test]
    fn phase_step_examples() {
        let g = line(10.0, 32);
        let f = ComplexField::gaussian(&g, 1.3, 1.0, &[0.5], &[0.7]);
        assert_eq!(max_diff(&nonlinear_phase_step(&f, 0.0, 1.0).unwrap(), &f), 0.0);
        let out = nonlinear_phase_step(&f, 0.37, -1.0).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_field_matches_ode_oracle() {
        // RK4 on the scalar ODE u' = i|u|²u with 10⁴ steps.
        let c = Complex64::new(0.8, -0.5);
        let t = 1.3;
        let mut u = c;
        let n = 10_000;
        let h = t / n as f64;
        let rhs = |u: Complex64| Complex64::i() * u.norm_sqr() * u;
        for _ in 0..n {
            let k1 = rhs(u);
            let k2 = rhs(u + k1 * (h / 2.0));
            let k3 = rhs(u + k2 * (h / 2.0));
            let k4 = rhs(u + k3 * h);
            u += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        }
        let g = line(4.0, 8);
        let f = ComplexField::from_fn(&g, |_| c);
        let out = nonlinear_phase_step(&f, t, 1.0).unwrap();
        assert!(out.values().iter().all(|z| (z - u).norm() < 1e-12));
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = line(10.0, 32);
        let cfg = EvolveConfig::new(EquationParams::default(), 0.01, 0.1).with_snapshots(2);
        let traj = strang_evolve(&ComplexField::zeros(&g), &cfg, &[&Peak]).unwrap();
        assert!(traj.samples().iter().all(|s| s.record[0] == 0.0));
        assert_eq!(traj.len(), 11);
        assert!(traj.samples().iter().filter_map(|s| s.field.as_ref()).all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn linear_run_is_free_flow() {
        let g = line(20.0, 128);
        let u0 = ComplexField::gaussian(&g, 1.0, 1.0, &[0.0], &[1.0]);
        for dealias in [false, true] {
            let cfg = EvolveConfig::new(EquationParams::linear(), 0.01, 0.2).with_dealias(dealias).with_snapshots(5);
            let traj = strang_evolve(&u0, &cfg, &[]).unwrap();
            for s in traj.samples().iter().filter(|s| s.field.is_some()) {
                let free = free_propagate(&u0, s.time).unwrap();
                assert!(max_diff(s.field.as_ref().unwrap(), &free) < 1e-12, "t = {}", s.time);
            }
        }
    }

    #[test]
    fn config_validation() {
        let p = EquationParams::default();
        assert!(EvolveConfig::new(p, 0.0, 1.0).validate().is_err());
        assert!(EvolveConfig::new(p, 1.0, 1.0).validate().is_err());
        assert!(EvolveConfig::new(p, 0.3, 1.0).validate().is_err());
        assert!(EvolveConfig::new(p, 0.1, 1.0).with_record_every(0).validate().is_err());
        assert_eq!(EvolveConfig::new(p, 0.1, 1.0).steps().unwrap(), 10);
        assert!(EquationParams::new(1.0, 2).is_err());
        assert!(EquationParams::new(f64::NAN, 1).is_err());
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        // Data pre-dispersed backwards refocuses; a low ceiling flags the peak.
        let g = line(40.0, 256);
        let u0 = free_propagate(&ComplexField::gaussian(&g, 1.0, 0.5, &[0.0], &[0.0]), -0.5).unwrap();
        let mut cfg = EvolveConfig::new(EquationParams::linear(), 0.01, 0.5).with_dealias(false);
        cfg.amplitude_ceiling = 1.5;
        match strang_evolve(&u0, &cfg, &[]) {
            Err(Error::BlowUp { step, .. }) => assert!(step >= 1),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn mass_is_conserved_by_both_substeps() {
        let g = line(30.0, 256);
        let u0 = ComplexField::gaussian(&g, 1.0, 1.0, &[0.0], &[0.5]);
        let cfg = EvolveConfig::new(EquationParams::default(), 1e-3, 0.5).with_dealias(false);
        let out = evolve_final(&u0, &cfg).unwrap();
        assert!((out.l2_raw() - u0.l2_raw()).abs() < 1e-12 * u0.l2_raw());
    }

    #[test]
    fn time_reversal_recovers_data() {
        let g = line(30.0, 256);
        let u0 = ComplexField::gaussian(&g, 1.0, 1.0, &[0.0], &[0.5]);
        let cfg = EvolveConfig::new(EquationParams::default(), 1e-3, 0.5).with_dealias(false);
        let forward = evolve_final(&u0, &cfg).unwrap();
        let back = evolve_backward(&forward, &cfg).unwrap();
        // Strang splitting is symmetric, so reversal is exact up to roundoff.
        assert!(max_diff(&back, &u0) < 1e-10);
    }

    #[test]
    fn picard_trivial_cases() {
        let g = line(16.0, 64);
        let traj = picard_solve(&ComplexField::zeros(&g), &EquationParams::default(), 0.1, 8, 5, 1e-12).unwrap();
        assert!(traj.samples().iter().all(|s| s.field.as_ref().unwrap().max_abs() == 0.0));

        let u0 = ComplexField::gaussian(&g, 1.0, 1.0, &[0.0], &[0.0]);
        let traj = picard_solve(&u0, &EquationParams::linear(), 0.1, 9, 3, 1e-12).unwrap();
        for s in traj.samples() {
            assert!(max_diff(s.field.as_ref().unwrap(), &free_propagate(&u0, s.time).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn picard_rejects_long_horizon_for_large_data() {
        let g = line(16.0, 64);
        let u0 = ComplexField::gaussian(&g, 4.0, 1.0, &[0.0], &[0.0]);
        let err = picard_solve(&u0, &EquationParams::default(), 2.0, 33, 40, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NonContraction { .. }));
    }

    #[test]
    fn nu_zero_pair_coincides() {
        let g = line(20.0, 128);
        let phi = ComplexField::gaussian(&g, 1.0, 1.0, &[0.0], &[0.0]);
        let cfg = EvolveConfig::new(EquationParams::default(), 1e-2, 0.5).with_dealias(false).with_record_every(10);
        let (num, reference) = small_dispersion_pair(&phi, 0.0, 0.5, &cfg).unwrap();
        assert_eq!(num.times(), reference.times());
        assert_eq!(max_diff(num.samples()[0].field.as_ref().unwrap(), &phi), 0.0);
        for (a, b) in num.samples().iter().zip(reference.samples()) {
            assert!(max_diff(a.field.as_ref().unwrap(), b.field.as_ref().unwrap()) < 1e-12);
        }
    }
}
