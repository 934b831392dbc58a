//! Morawetz action for the smoothed weight `a_δ(x) = (|x|² + δ²)^{1/2}` and
//! the right-hand side of its virial identity.
//!
//! Radial profiles are kept symbolically as sums of `c ρ^p (ρ + δ²)^{q/2}`
//! with `ρ = |x|²`, using `∂_j F = 2x_j F'`, `∂_{jk} F = 2δ_{jk}F' + 4x_j x_k F''`
//! and `ΔF = 2nF' + 4ρF''`, so every derivative up to `Δ³a` is exact.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::spectral::Spectrum;

#[derive(Clone, Debug, PartialEq)]
struct Radial {
    /// `(c, p, q)` for `c ρ^p (ρ + δ²)^{q/2}`.
    terms: Vec<(f64, i32, i32)>,
}

impl Radial {
    fn eval(&self, rho: f64, d2: f64) -> f64 {
        let s = (rho + d2).sqrt();
        self.terms.iter().map(|&(c, p, q)| c * rho.powi(p) * s.powi(q)).sum()
    }

    fn derivative(&self) -> Radial {
        let mut terms = Vec::new();
        for &(c, p, q) in &self.terms {
            if p > 0 {
                terms.push((c * p as f64, p - 1, q));
            }
            terms.push((c * q as f64 / 2.0, p, q - 2));
        }
        Radial { terms }.simplified()
    }

    fn times_rho(&self) -> Radial {
        Radial { terms: self.terms.iter().map(|&(c, p, q)| (c, p + 1, q)).collect() }
    }

    fn scaled(&self, k: f64) -> Radial {
        Radial { terms: self.terms.iter().map(|&(c, p, q)| (c * k, p, q)).collect() }
    }

    fn plus(&self, other: &Radial) -> Radial {
        Radial { terms: self.terms.iter().chain(&other.terms).copied().collect() }.simplified()
    }

    /// Profile of `ΔF` in dimension `n`.
    fn laplacian(&self, n: usize) -> Radial {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        d1.scaled(2.0 * n as f64).plus(&d2.times_rho().scaled(4.0))
    }

    fn simplified(mut self) -> Radial {
        self.terms.sort_by_key(|&(_, p, q)| (p, q));
        let mut out: Vec<(f64, i32, i32)> = Vec::new();
        for (c, p, q) in self.terms {
            match out.last_mut() {
                Some(last) if last.1 == p && last.2 == q => last.0 += c,
                _ => out.push((c, p, q)),
            }
        }
        out.retain(|t| t.0 != 0.0);
        Radial { terms: out }
    }
}

/// `a_δ` and the derivative profiles entering the virial identity.
#[derive(Clone, Debug, PartialEq)]
pub struct MorawetzWeight {
    delta: f64,
    dim: usize,
    a: Radial,
    a1: Radial,
    a2: Radial,
    lap: Radial,
    lap1: Radial,
    lap2: Radial,
    bilap: Radial,
    trilap: Radial,
}

impl MorawetzWeight {
    pub fn new(delta: f64, dim: usize) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Domain(format!("Morawetz smoothing δ must be positive, got {delta}")));
        }
        let a = Radial { terms: vec![(1.0, 0, 1)] };
        let a1 = a.derivative();
        let a2 = a1.derivative();
        let lap = a.laplacian(dim);
        let lap1 = lap.derivative();
        let lap2 = lap1.derivative();
        let bilap = lap.laplacian(dim);
        let trilap = bilap.laplacian(dim);
        Ok(Self { delta, dim, a, a1, a2, lap, lap1, lap2, bilap, trilap })
    }

    /// The default smoothing: one grid spacing.
    pub fn for_grid(grid: &Grid) -> Self {
        Self::new(grid.min_spacing(), grid.dim()).expect("grid spacing is positive")
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn d2(&self) -> f64 {
        self.delta * self.delta
    }

    fn rho(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.a.eval(Self::rho(x), self.d2())
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let f1 = self.a1.eval(Self::rho(x), self.d2());
        x.iter().map(|&xj| 2.0 * xj * f1).collect()
    }

    fn radial_hessian(first: &Radial, second: &Radial, x: &[f64], d2: f64) -> Vec<Vec<f64>> {
        let rho = Self::rho(x);
        let (f1, f2) = (first.eval(rho, d2), second.eval(rho, d2));
        (0..x.len())
            .map(|j| (0..x.len()).map(|k| if j == k { 2.0 * f1 } else { 0.0 } + 4.0 * x[j] * x[k] * f2).collect())
            .collect()
    }

    pub fn hessian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        Self::radial_hessian(&self.a1, &self.a2, x, self.d2())
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        self.lap.eval(Self::rho(x), self.d2())
    }

    /// `∂_{jk}Δa`.
    pub fn hessian_of_laplacian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        Self::radial_hessian(&self.lap1, &self.lap2, x, self.d2())
    }

    pub fn bilaplacian(&self, x: &[f64]) -> f64 {
        self.bilap.eval(Self::rho(x), self.d2())
    }

    pub fn trilaplacian(&self, x: &[f64]) -> f64 {
        self.trilap.eval(Self::rho(x), self.d2())
    }

    fn check_dim(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch(format!("weight built for n = {}, grid has n = {}", self.dim, grid.dim())));
        }
        Ok(())
    }
}

/// Shortest periodic displacement `x − c` in the box.
pub(crate) fn displacement(grid: &Grid, flat: usize, center: &[f64]) -> Vec<f64> {
    grid.position(flat)
        .iter()
        .enumerate()
        .map(|(a, &x)| {
            let l = grid.extents()[a];
            let d = x - center.get(a).copied().unwrap_or(0.0);
            d - l * (d / l).round()
        })
        .collect()
}

/// `2∫ ∂_j a(x − c) Im(ū ∂_j u) dx`.
pub fn morawetz_action(f: &ComplexField, w: &MorawetzWeight, center: &[f64]) -> Result<f64> {
    f.require_physical("morawetz_action")?;
    let grid = f.grid();
    w.check_dim(grid)?;
    let grads = Spectrum::of(f)?.gradient();
    let mut sum = 0.0;
    for i in 0..grid.len() {
        let ga = w.gradient(&displacement(grid, i, center));
        let ubar = f.values()[i].conj();
        for (j, g) in grads.iter().enumerate() {
            sum += ga[j] * (ubar * g.values()[i]).im;
        }
    }
    Ok(2.0 * sum * grid.cell_volume())
}

/// Right-hand side of the virial identity for `i∂ₜu + Δ²u + h = 0`-type forcing:
///
/// `2∫ (2∂_j u ∂_k ū ∂_{jk}Δa − ½Δ³a|u|² − 4∂_{jk}a ∂_{ik}u ∂_{ij}ū
///      + Δ²a|∇u|² + ∂_j a {u, h}_p^j)`
///
/// with `{u, h}_p = Re(u∇h̄ − h∇ū)`. For the cubic equation `h = μ|u|²u`.
pub fn morawetz_action_rhs(
    f: &ComplexField,
    forcing: &ComplexField,
    w: &MorawetzWeight,
    center: &[f64],
) -> Result<f64> {
    f.require_physical("morawetz_action_rhs")?;
    f.require_same_grid(forcing)?;
    let grid = f.grid();
    w.check_dim(grid)?;
    let n = grid.dim();
    let spec = Spectrum::of(f)?;
    let grads = spec.gradient();
    let mut second = vec![vec![None; n]; n];
    for j in 0..n {
        for k in j..n {
            second[j][k] = Some(spec.derivative(&[j, k]));
        }
    }
    let hess = |i: usize, j: usize, p: usize| -> Complex64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        second[a][b].as_ref().expect("upper triangle filled").values()[p]
    };
    let h_grads = Spectrum::of(forcing)?.gradient();
    let mut sum = 0.0;
    for p in 0..grid.len() {
        let x = displacement(grid, p, center);
        let u = f.values()[p];
        let h = forcing.values()[p];
        let du: Vec<Complex64> = grads.iter().map(|g| g.values()[p]).collect();
        let hl = w.hessian_of_laplacian(&x);
        let ha = w.hessian(&x);
        let ga = w.gradient(&x);
        let mut term = -0.5 * w.trilaplacian(&x) * u.norm_sqr();
        let grad_sq: f64 = du.iter().map(|z| z.norm_sqr()).sum();
        term += w.bilaplacian(&x) * grad_sq;
        for j in 0..n {
            for k in 0..n {
                term += 2.0 * hl[j][k] * (du[j] * du[k].conj()).re;
                let mut inner = Complex64::default();
                for i in 0..n {
                    inner += hess(i, k, p) * hess(i, j, p).conj();
                }
                term -= 4.0 * ha[j][k] * inner.re;
            }
            let bracket = (u * h_grads[j].values()[p].conj() - h * du[j].conj()).re;
            term += ga[j] * bracket;
        }
        sum += term;
    }
    Ok(2.0 * sum * grid.cell_volume())
}

/// The cubic forcing `μ|u|²u`.
pub fn cubic_forcing(f: &ComplexField, mu: f64) -> ComplexField {
    f.map(|z| z * z.norm_sqr() * mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(exact: f64, approx: f64, scale: f64) {
        assert!((exact - approx).abs() <= 1e-6 * scale.max(exact.abs()), "{exact} vs {approx}");
    }

    #[test]
    fn profiles_match_finite_differences() {
        for dim in 1..=3 {
            let w = MorawetzWeight::new(0.7, dim).unwrap();
            let h = 1e-3;
            let points: Vec<Vec<f64>> = vec![vec![0.3, -0.4, 0.9], vec![1.1, 0.2, -0.5], vec![0.0, 0.0, 0.0]]
                .into_iter()
                .map(|p: Vec<f64>| p[..dim].to_vec())
                .collect();
            let shifted = |x: &[f64], j: usize, d: f64| {
                let mut y = x.to_vec();
                y[j] += d;
                y
            };
            // Five-point central differences, O(h⁴).
            let d1 = |g: &dyn Fn(&[f64]) -> f64, x: &[f64], j: usize| {
                (-g(&shifted(x, j, 2.0 * h)) + 8.0 * g(&shifted(x, j, h)) - 8.0 * g(&shifted(x, j, -h))
                    + g(&shifted(x, j, -2.0 * h)))
                    / (12.0 * h)
            };
            let lap_fd = |g: &dyn Fn(&[f64]) -> f64, x: &[f64]| {
                (0..dim)
                    .map(|j| {
                        (-g(&shifted(x, j, 2.0 * h)) + 16.0 * g(&shifted(x, j, h)) - 30.0 * g(x)
                            + 16.0 * g(&shifted(x, j, -h))
                            - g(&shifted(x, j, -2.0 * h)))
                            / (12.0 * h * h)
                    })
                    .sum::<f64>()
            };
            for x in &points {
                let val = |y: &[f64]| w.value(y);
                let lapv = |y: &[f64]| w.laplacian(y);
                let bil = |y: &[f64]| w.bilaplacian(y);
                fd_check(w.laplacian(x), lap_fd(&val, x), 1.0);
                fd_check(w.bilaplacian(x), lap_fd(&lapv, x), 10.0);
                fd_check(w.trilaplacian(x), lap_fd(&bil, x), 1000.0);
                let hl = w.hessian_of_laplacian(x);
                for j in 0..dim {
                    fd_check(w.gradient(x)[j], d1(&val, x, j), 1.0);
                    let gj = |y: &[f64]| w.gradient(y)[j];
                    // ∂_jΔa from the profile, then differenced once more.
                    let lap_j = |y: &[f64]| 2.0 * y[j] * w.lap1.eval(MorawetzWeight::rho(y), w.d2());
                    for k in 0..dim {
                        fd_check(w.hessian(x)[j][k], d1(&gj, x, k), 1.0);
                        fd_check(hl[j][k], d1(&lap_j, x, k), 10.0);
                    }
                    fd_check(lap_j(x), d1(&lapv, x, j), 10.0);
                }
            }
        }
    }

    #[test]
    fn smoothing_converges_to_modulus() {
        let w = MorawetzWeight::new(1e-4, 2).unwrap();
        for x in [[0.0f64, 0.0], [1.0, 2.0], [-3.0, 0.5]] {
            let r: f64 = (x[0] * x[0] + x[1] * x[1]).sqrt();
            assert!((w.value(&x) - r).abs() <= 1e-4);
        }
        assert!(MorawetzWeight::new(0.0, 1).is_err());
    }

    #[test]
    fn real_and_zero_fields_have_no_action() {
        let g = Grid::new(&[20.0], &[128]).unwrap();
        let w = MorawetzWeight::for_grid(&g);
        let real = ComplexField::gaussian(&g, 1.0, 1.0, &[0.3], &[0.0]);
        assert!(morawetz_action(&real, &w, &[0.0]).unwrap().abs() < 1e-12);
        let zero = ComplexField::zeros(&g);
        assert_eq!(morawetz_action(&zero, &w, &[0.0]).unwrap(), 0.0);
        assert_eq!(morawetz_action_rhs(&zero, &zero, &w, &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn action_matches_direct_sum_oracle() {
        // 1-D Gaussian × e^{ivx}: Im(ū u') = v|u|² exactly, a'(x) = x / √(x² + δ²).
        let (l, n, v, delta) = (40.0, 512usize, 1.3, 0.5);
        let g = Grid::new(&[l], &[n]).unwrap();
        let f = ComplexField::gaussian(&g, 1.0, 1.0, &[0.7], &[v]);
        let w = MorawetzWeight::new(delta, 1).unwrap();
        let dx = l / n as f64;
        let mut oracle = 0.0;
        for j in 0..n {
            let x = -l / 2.0 + j as f64 * dx;
            let amp2 = (-(x - 0.7) * (x - 0.7)).exp();
            oracle += 2.0 * x / (x * x + delta * delta).sqrt() * v * amp2 * dx;
        }
        let got = morawetz_action(&f, &w, &[0.0]).unwrap();
        assert!((got - oracle).abs() < 1e-8 * oracle.abs());
    }
}
