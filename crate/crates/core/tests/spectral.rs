use std::f64::consts::PI;

use b4nl::initial::{random_field, RandomSpec};
use b4nl::norms::hom_sobolev;
use b4nl::spectral::{apply_multiplier, free_propagate, transform, Direction, Spectrum};
use b4nl::{ComplexField, Convention, Grid};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
    (num / b.l2_raw().powi(2).max(1e-300)).sqrt()
}

fn random(grid: &Grid, seed: u64) -> ComplexField {
    random_field(grid, &RandomSpec { mean_zero: false, ..RandomSpec::new(seed) }).unwrap()
}

fn grids() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (8usize..9, 20.0f64..80.0).prop_map(|(p, l)| Grid::new(&[l], &[1 << p]).unwrap()),
        (5usize..7, 5.0f64..40.0).prop_map(|(p, l)| Grid::new(&[l, 0.7 * l], &[1 << p, 1 << (p - 1)]).unwrap()),
        Just(Grid::new(&[12.0, 12.0, 9.0], &[16, 16, 8]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_and_plancherel(grid in grids(), seed in any::<u64>(), standard in any::<bool>()) {
        let grid = if standard { grid.with_convention(Convention::Minus) } else { grid };
        let f = random(&grid, seed);
        let fh = transform(&f, Direction::Forward).unwrap();
        let back = transform(&fh, Direction::Inverse).unwrap();
        prop_assert!(rel_diff(&back, &f) < 1e-12);
        let lhs = f.l2_raw().powi(2) * grid.cell_volume();
        let rhs = fh.l2_raw().powi(2) * grid.freq_cell_volume();
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs);
    }

    #[test]
    fn multipliers_commute(grid in grids(), seed in any::<u64>(), a in -2.0f64..2.0, b in 0.1f64..3.0) {
        let f = random(&grid, seed);
        let m1 = move |xi: &[f64]| Complex64::new(1.0 + a * xi[0], xi.iter().map(|x| x * x).sum::<f64>() * 0.1);
        let m2 = move |xi: &[f64]| Complex64::from_polar((-b * xi.iter().map(|x| x.abs()).sum::<f64>()).exp(), xi[0]);
        let ab = apply_multiplier(&apply_multiplier(&f, m1).unwrap(), m2).unwrap();
        let ba = apply_multiplier(&apply_multiplier(&f, m2).unwrap(), m1).unwrap();
        prop_assert!(rel_diff(&ab, &ba) < 1e-12);
    }

    #[test]
    fn free_flow_preserves_sobolev_norms_and_is_a_group(
        grid in grids(), seed in any::<u64>(), s in 0.0f64..3.0, t1 in -1.0f64..1.0, t2 in -1.0f64..1.0,
    ) {
        let f = random(&grid, seed);
        let u1 = free_propagate(&f, t1).unwrap();
        let before = hom_sobolev(&f, s).unwrap();
        prop_assert!((hom_sobolev(&u1, s).unwrap() - before).abs() <= 1e-12 * before);
        let composed = free_propagate(&u1, t2).unwrap();
        let direct = free_propagate(&f, t1 + t2).unwrap();
        prop_assert!(rel_diff(&composed, &direct) < 1e-12);
    }

    #[test]
    fn propagator_does_not_see_the_convention(seed in any::<u64>(), t in -2.0f64..2.0) {
        let grid = Grid::new(&[30.0, 20.0], &[32, 16]).unwrap();
        let f = random(&grid, seed);
        let standard = grid.with_convention(Convention::Minus);
        let g = ComplexField::from_values(&standard, f.values().to_vec(), f.space()).unwrap();
        let a = free_propagate(&f, t).unwrap();
        let b = free_propagate(&g, t).unwrap();
        let diff: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-12 * f.max_abs().max(1.0));
    }
}

#[test]
fn derivative_sign_follows_convention() {
    for conv in [Convention::Plus, Convention::Minus] {
        let g = Grid::with_options(&[2.0 * PI], &[64], conv, usize::MAX).unwrap();
        let f = ComplexField::from_fn(&g, |x| Complex64::new(x[0].sin(), 0.0));
        let d = Spectrum::of(&f).unwrap().derivative(&[0]);
        let err = d
            .values()
            .iter()
            .enumerate()
            .map(|(i, z)| (z - Complex64::new(g.position(i)[0].cos(), 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{conv:?}: {err}");
    }
}

/// `e^{itΔ²}` of a Gaussian against a direct quadrature of its Fourier integral.
#[test]
fn free_flow_matches_fourier_integral_quadrature() {
    let (l, n, w, t) = (800.0, 8192, 3.0, 10.0);
    let grid = Grid::new(&[l], &[n]).unwrap();
    let u0 = ComplexField::gaussian(&grid, 1.0, w, &[0.0], &[0.0]);
    let u = free_propagate(&u0, t).unwrap();
    // û₀(ξ) = w e^{−w²ξ²/2}; below 1e−17 beyond |ξ| = 3.2.
    let (xi_max, m) = (3.2, 400_000);
    let h = 2.0 * xi_max / m as f64;
    let oracle = |x: f64| -> Complex64 {
        let mut acc = Complex64::default();
        for j in 0..=m {
            let xi = -xi_max + j as f64 * h;
            let wt = if j == 0 || j == m { 0.5 } else { 1.0 };
            acc += wt * w * (-0.5 * w * w * xi * xi).exp() * Complex64::from_polar(1.0, t * xi.powi(4) + x * xi);
        }
        acc * h / (2.0 * PI).sqrt()
    };
    let peak = u.max_abs();
    for j in (n / 2 - 600..n / 2 + 600).step_by(97) {
        let x = grid.position(j)[0];
        let err = (u.values()[j] - oracle(x)).norm();
        assert!(err < 1e-9 * peak, "x = {x}: {err}");
    }
}
