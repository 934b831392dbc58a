//! Study drivers and exact scaling / ill-posedness algebra.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{small_dispersion_pair, EvolveConfig};
use crate::exponent::Exponent;
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::initial::{random_field, RandomSpec};
use crate::littlewood_paley::DyadicScale;
use crate::norms::{inhom_sobolev, is_admissible, lebesgue, lebesgue_of_moduli, time_lebesgue, NormSpec};
use crate::observables::mass;
use crate::spectral::{fractional_derivative, free_propagate, translate, Spectrum};

// ---------------------------------------------------------------- scaling

/// Exact `e` with `‖g_{(h,x₀)} u‖ = h^e ‖u‖` (for space-time norms, under
/// `τ u = h² u(h⁴(t − t₀), h(x − x₀))`).
pub fn scaling_exponent(spec: &NormSpec, n: u32) -> Result<Rational64> {
    let two = Rational64::from_integer(2);
    let nr = Rational64::from_integer(n as i64);
    match spec {
        NormSpec::HomSobolev(s) | NormSpec::FullStrichartz(s) => Ok(two + s - nr / 2),
        NormSpec::Lebesgue(p) => Ok(two - nr * p.reciprocal()),
        NormSpec::InhomSobolev(_) => Err(Error::Unsupported(format!("{spec} has no homogeneous scaling"))),
        other => {
            let form = other.space_time_form(n)?.expect("remaining families are space-time");
            Ok(two + Rational64::from_integer(form.derivative as i64)
                - Rational64::from_integer(4) * form.q.reciprocal()
                - nr * form.r.reciprocal())
        }
    }
}

/// `h² u(h(x − x₀))` on the grid with extents divided by `h`.
///
/// `h` must be a power of two so that the new lattice is the old one
/// scaled; the shift by `h x₀` uses trigonometric interpolation.
pub fn apply_rescale_g(f: &ComplexField, h: f64, x0: &[f64]) -> Result<ComplexField> {
    f.require_physical("apply_rescale_g")?;
    DyadicScale::from_value(h)?;
    let grid = f.grid();
    if x0.len() != grid.dim() {
        return Err(Error::Usage(format!("x0 has {} components, grid has {}", x0.len(), grid.dim())));
    }
    let extents: Vec<f64> = grid.extents().iter().map(|l| l / h).collect();
    let target = Grid::with_options(&extents, grid.points(), grid.convention(), usize::MAX)?;
    let shift: Vec<f64> = x0.iter().map(|x| h * x).collect();
    let moved = if shift.iter().all(|&s| s == 0.0) { f.clone() } else { translate(f, &shift)? };
    let values = moved.values().iter().map(|z| z * (h * h)).collect();
    ComplexField::from_values(&target, values, crate::field::Space::Physical)
}

// ---------------------------------------------------------- ill-posedness

/// Exact decimal or fraction: `"0.01"`, `"1e-2"`, `"1/100"`, `"3"`.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Format(format!("cannot read {s:?} as an exact number"));
    if let Some((a, b)) = t.split_once('/') {
        let a = parse_exact(a)?;
        let b = parse_exact(b)?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(a / b);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    if !all.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = all.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut v = BigRational::from_integer(num) * pow(&ten, scale);
    if neg {
        v = -v;
    }
    Ok(v)
}

fn pow(x: &BigRational, e: i32) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// `Some(k)` when `x = 10^k` exactly.
pub fn exact_log10(x: &BigRational) -> Option<i64> {
    if !x.is_positive() {
        return None;
    }
    let ten = BigInt::from(10);
    let strip = |v: &BigInt| -> Option<i64> {
        let mut v = v.clone();
        let mut k = 0;
        while v > BigInt::one() {
            if (&v % &ten) != BigInt::zero() {
                return None;
            }
            v /= &ten;
            k += 1;
        }
        Some(k)
    };
    Some(strip(x.numer())? - strip(x.denom())?)
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IllPosedParams {
    pub n: u32,
    pub epsilon: BigRational,
    pub nu: BigRational,
    /// Horizon of the small-dispersion solution.
    pub t_nu: BigRational,
}

impl IllPosedParams {
    pub fn parse(n: u32, epsilon: &str, nu: &str, t_nu: &str) -> Result<Self> {
        Ok(Self { n, epsilon: parse_exact(epsilon)?, nu: parse_exact(nu)?, t_nu: parse_exact(t_nu)? })
    }
}

/// Exact-arithmetic outcome. Fractional powers are handled by raising every
/// relation to the power `n − 8`, where all exponents become integers.
#[derive(Clone, Debug, Serialize)]
pub struct IllPosedReport {
    pub n: u32,
    pub epsilon: String,
    pub nu: String,
    pub t_nu: String,
    /// `log₁₀ λ` when exact, as `"a/b"`.
    pub lambda_log10: Option<String>,
    pub lambda: f64,
    pub lambda_nu_log10: Option<String>,
    pub lambda_nu: f64,
    pub t_epsilon: f64,
    /// `ε² t_ν⁴`, the inflation lower bound for `‖u(t_ε)‖_{Ḣ²}`.
    pub inflation_lower_bound: f64,
    /// `λ⁴(λν)^{4−n} = ε²`.
    pub identity_lambda: bool,
    /// `λν = (εν²)^{−2/(n−8)}`.
    pub identity_lambda_nu: bool,
    pub lambda_nu_exceeds_one: bool,
    /// `ε² t_ν⁴ > ε^{−2}`.
    pub growth_condition: bool,
    /// `ε^{(16−n)/(n−8)} ν^{4(n−4)/(n−8)} < ε`.
    pub data_condition: bool,
    /// `t_ε = λ^{−4} t_ν < ε`.
    pub short_time_condition: bool,
}

impl IllPosedReport {
    pub fn all_conditions(&self) -> bool {
        self.growth_condition && self.data_condition && self.short_time_condition
    }
}

pub fn illposed_check(p: &IllPosedParams) -> Result<IllPosedReport> {
    if p.n <= 8 {
        return Err(Error::Domain(format!("ill-posedness algebra needs n ≥ 9, got n = {}", p.n)));
    }
    let one = BigRational::one();
    if !(p.epsilon.is_positive() && p.nu.is_positive() && p.nu < one && p.t_nu.is_positive()) {
        return Err(Error::Domain("need ε > 0, 0 < ν < 1, t_ν > 0".into()));
    }
    let n = p.n as i32;
    let d = n - 8;
    let (eps, nu, t) = (&p.epsilon, &p.nu, &p.t_nu);
    // Λ = λ^{n−8} = ε^{−2} ν^{−(n−4)}.
    let big_lambda = pow(eps, -2) * pow(nu, -(n - 4));
    // (i) λ⁴(λν)^{4−n} = ε², raised to n − 8.
    let lhs_i = pow(&big_lambda, 4) * pow(&(&big_lambda * pow(nu, d)), 4 - n);
    let identity_lambda = lhs_i == pow(eps, 2 * d);
    // (ii) (λν)^{n−8} = (εν²)^{−2}.
    let lambda_nu_d = &big_lambda * pow(nu, d);
    let identity_lambda_nu = lambda_nu_d == pow(&(eps * nu * nu), -2);
    let lambda_nu_exceeds_one = lambda_nu_d > one;
    // (iii) t_ε^{n−8} = Λ^{−4} t_ν^{n−8}.
    let t_eps_d = pow(&big_lambda, -4) * pow(t, d);
    let growth_condition = pow(eps, 4) * pow(t, 4) > one;
    let data_condition = pow(eps, 16 - n) * pow(nu, 4 * (n - 4)) < pow(eps, d);
    let short_time_condition = t_eps_d < pow(eps, d);

    let root = |x: &BigRational| to_f64(x).powf(1.0 / d as f64);
    let log10_root = |x: &BigRational| exact_log10(x).map(|k| Rational64::new(k, d as i64).to_string());
    Ok(IllPosedReport {
        n: p.n,
        epsilon: eps.to_string(),
        nu: nu.to_string(),
        t_nu: t.to_string(),
        lambda_log10: log10_root(&big_lambda),
        lambda: root(&big_lambda),
        lambda_nu_log10: log10_root(&lambda_nu_d),
        lambda_nu: root(&lambda_nu_d),
        t_epsilon: root(&t_eps_d),
        inflation_lower_bound: to_f64(&(pow(eps, 2) * pow(t, 4))),
        identity_lambda,
        identity_lambda_nu,
        lambda_nu_exceeds_one,
        growth_condition,
        data_condition,
        short_time_condition,
    })
}

// ------------------------------------------------------------------ fits

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub residual: f64,
    /// `[min x, max x]` of the data used.
    pub window: [f64; 2],
    pub points: usize,
}

/// Least-squares fit of `log y = slope · log x + intercept` on all points.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Usage("fit needs matching x and y".into()));
    }
    let mut pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.len() < 2 {
        return Err(Error::Degenerate(format!("log-log fit needs at least two points, got {}", pts.len())));
    }
    if let Some(&(x, y)) = pts.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Degenerate(format!("log-log fit needs positive finite data, got ({x}, {y})")));
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("log-log fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = lx.iter().zip(&ly).map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
    Ok(FitResult { slope, intercept, residual, window: [pts[0].0, pts[pts.len() - 1].0], points: pts.len() })
}

// ------------------------------------------------------- small dispersion

#[derive(Clone, Debug, Serialize)]
pub struct StudyResult {
    /// `(parameter, value)` rows, sorted by parameter.
    pub rows: Vec<(f64, f64)>,
    pub fit: Option<FitResult>,
}

/// `sup_t ‖w^ν(t) − w⁰(t)‖_{H^k}` for one `ν`.
pub fn small_dispersion_error(phi: &ComplexField, nu: f64, t_end: f64, k: f64, cfg: &EvolveConfig) -> Result<f64> {
    let (num, reference) = small_dispersion_pair(phi, nu, t_end, cfg)?;
    let mut worst: f64 = 0.0;
    for (a, b) in num.samples().iter().zip(reference.samples()) {
        let (Some(fa), Some(fb)) = (&a.field, &b.field) else { continue };
        worst = worst.max(inhom_sobolev(&fa.sub(fb)?, k)?);
    }
    Ok(worst)
}

/// Errors for each `ν` and the log-log fit of error against `ν`.
pub fn smalldisp_study(phi: &ComplexField, nu_list: &[f64], t_end: f64, k: f64, cfg: &EvolveConfig) -> Result<StudyResult> {
    let n = phi.grid().dim() as f64;
    if !(k > n / 2.0) {
        return Err(Error::Precondition(format!("Sobolev order k = {k} must exceed n/2 = {}", n / 2.0)));
    }
    if let Some(nu) = nu_list.iter().find(|&&nu| !(nu > 0.0 && nu < 1.0)) {
        return Err(Error::Domain(format!("ν = {nu} outside (0, 1)")));
    }
    let mut rows: Vec<(f64, f64)> = nu_list
        .par_iter()
        .map(|&nu| {
            small_dispersion_error(phi, nu, t_end, k, cfg)
                .map(|e| (nu, e))
                .map_err(|e| Error::Study { parameter: format!("nu = {nu}"), source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().copied().unzip();
    let fit = fit_loglog(&xs, &ys)?;
    Ok(StudyResult { rows, fit: Some(fit) })
}

/// `‖Δw⁰(t)‖_{L²}` for the reference `w⁰ = φ e^{iμ|φ|²t}` at each time, with
/// the log-log fit against `t`. The chain rule keeps the evaluation exact on
/// the grid however fast the phase oscillates:
/// `Δw⁰ = e^{itρ}(Δφ + 2it∇φ·∇ρ + itφΔρ − t²φ|∇ρ|²)`, `ρ = μ|φ|²`.
pub fn reference_growth(phi: &ComplexField, mu: f64, times: &[f64]) -> Result<StudyResult> {
    phi.require_physical("reference_growth")?;
    let rho = phi.map(|z| Complex64::new(mu * z.norm_sqr(), 0.0));
    let phi_spec = Spectrum::of(phi)?;
    let rho_spec = Spectrum::of(&rho)?;
    let (grad_phi, lap_phi) = (phi_spec.gradient(), phi_spec.laplacian());
    let (grad_rho, lap_rho) = (rho_spec.gradient(), rho_spec.laplacian());
    let dv = phi.grid().cell_volume();
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let it = Complex64::new(0.0, t);
        let sum: f64 = (0..phi.len())
            .map(|i| {
                let mut dot = Complex64::default();
                let mut g2 = 0.0;
                for (gp, gr) in grad_phi.iter().zip(&grad_rho) {
                    dot += gp.values()[i] * gr.values()[i].re;
                    g2 += gr.values()[i].re * gr.values()[i].re;
                }
                let p = phi.values()[i];
                (lap_phi.values()[i] + 2.0 * it * dot + it * p * lap_rho.values()[i].re - t * t * p * g2).norm_sqr()
            })
            .sum();
        rows.push((t, (sum * dv).sqrt()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().copied().unzip();
    let fit = if rows.len() >= 2 { Some(fit_loglog(&xs, &ys)?) } else { None };
    Ok(StudyResult { rows, fit })
}

// ------------------------------------------------------------------ decay

/// Points with some `|x_i| > LEAK_SHELL · L_i` form the wrap-around guard shell.
pub const LEAK_SHELL: f64 = 0.45;
/// Largest tolerated mass fraction in the guard shell.
pub const LEAK_LIMIT: f64 = 0.01;

/// Mass fraction in the outer shell of the box.
pub fn shell_leak(f: &ComplexField) -> Result<f64> {
    let grid = f.grid();
    let total = mass(f)?;
    if total == 0.0 {
        return Ok(0.0);
    }
    let mut outer = 0.0;
    for i in 0..grid.len() {
        let x = grid.position(i);
        if x.iter().zip(grid.extents()).any(|(xa, l)| xa.abs() > LEAK_SHELL * l) {
            outer += f.values()[i].norm_sqr();
        }
    }
    Ok(outer * grid.cell_volume() / total)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayResult {
    pub rows: Vec<(f64, f64)>,
    pub fit: FitResult,
    pub max_leak: f64,
}

/// Fit of `log ‖e^{itΔ²}u₀‖_{L^∞}` against `log t`, guarded against wrap-around.
pub fn decay_study(u0: &ComplexField, t_list: &[f64]) -> Result<DecayResult> {
    if t_list.len() < 2 {
        return Err(Error::Degenerate(format!("decay fit needs at least two times, got {}", t_list.len())));
    }
    let mut rows: Vec<(f64, f64, f64)> = t_list
        .par_iter()
        .map(|&t| {
            let u = free_propagate(u0, t)?;
            Ok((t, lebesgue(&u, Exponent::Infinite)?, shell_leak(&u)?))
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(&(time, _, leaked)) = rows.iter().find(|r| r.2 > LEAK_LIMIT) {
        return Err(Error::Window { time, leaked });
    }
    let max_leak = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.0, r.1)).unzip();
    let fit = fit_loglog(&xs, &ys)?;
    Ok(DecayResult { rows: rows.into_iter().map(|r| (r.0, r.1)).collect(), fit, max_leak })
}

/// `n` geometrically spaced points from `a` to `b` inclusive.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect(),
    }
}

// -------------------------------------------------------- Strichartz gain

/// `‖|∇|^{2/q} e^{itΔ²}u₀‖_{L^q_t L^r_x([0, T])} / ‖u₀‖_{L²}` with
/// `samples` equispaced instants and trapezoid quadrature in time.
pub fn strichartz_ratio(u0: &ComplexField, q: Exponent, r: Exponent, window: f64, samples: usize) -> Result<f64> {
    let n = u0.grid().dim() as u32;
    if !is_admissible(q, r, n) {
        return Err(Error::Domain(format!("pair ({q}, {r}) is not admissible in dimension {n}")));
    }
    if samples < 2 || !(window > 0.0) {
        return Err(Error::Domain("Strichartz ratio needs a positive window and ≥ 2 samples".into()));
    }
    let gain = 2.0 * q.reciprocal().to_f64().unwrap_or(0.0);
    let lifted = if gain == 0.0 { u0.clone() } else { fractional_derivative(u0, gain)? };
    let spec = Spectrum::of(&lifted)?;
    let times: Vec<f64> = (0..samples).map(|i| window * i as f64 / (samples - 1) as f64).collect();
    let norms: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let u = spec.synthesize_radial(|k2| Complex64::from_polar(1.0, t * k2 * k2));
            lebesgue_of_moduli(u.values().iter().map(|z| z.norm()), u.grid().cell_volume(), r)
        })
        .collect();
    let base = lebesgue(u0, Exponent::from_integer(2))?;
    if base == 0.0 {
        return Err(Error::UndefinedRatio("zero initial data".into()));
    }
    Ok(time_lebesgue(&times, &norms, q)? / base)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleStats {
    pub values: Vec<f64>,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl EnsembleStats {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Degenerate("empty ensemble".into()));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let m = sorted.len();
        let median = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
        values.shrink_to_fit();
        Ok(Self { values, min: sorted[0], median, max: sorted[m - 1] })
    }
}

/// Strichartz ratios over a seeded ensemble of mean-zero random data
/// (member `i` uses seed `template.seed + i`).
pub fn strichartz_gain_study(
    ensemble_size: usize,
    q: Exponent,
    r: Exponent,
    grid: &Grid,
    template: &RandomSpec,
    window: f64,
    samples: usize,
) -> Result<EnsembleStats> {
    let n = grid.dim() as u32;
    if !is_admissible(q, r, n) {
        return Err(Error::Domain(format!("pair ({q}, {r}) is not admissible in dimension {n}")));
    }
    let values = (0..ensemble_size)
        .into_par_iter()
        .map(|i| {
            let spec = RandomSpec { seed: template.seed.wrapping_add(i as u64), mean_zero: true, ..template.clone() };
            strichartz_ratio(&random_field(grid, &spec)?, q, r, window, samples)
        })
        .collect::<Result<Vec<_>>>()?;
    EnsembleStats::from_values(values)
}
