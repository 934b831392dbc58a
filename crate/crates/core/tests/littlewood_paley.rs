use std::f64::consts::PI;

use b4nl::exponent::Exponent;
use b4nl::initial::{random_field, RandomSpec};
use b4nl::littlewood_paley::{bernstein_ratio, lp_project, lp_symbol, relevant_scales, DyadicScale, LpKind};
use b4nl::norms::lebesgue;
use b4nl::observables::lp_square_function;
use b4nl::spectral::fractional_derivative;
use b4nl::{ComplexField, Grid};
use proptest::prelude::*;

fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn broadband(grid: &Grid, seed: u64) -> ComplexField {
    random_field(grid, &RandomSpec { max_mode: 500, envelope: 0.0, ..RandomSpec::new(seed) }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dyadic_pieces_sum_to_the_identity(seed in any::<u64>(), two_d in any::<bool>()) {
        let grid = if two_d { Grid::new(&[20.0, 13.0], &[64, 32]).unwrap() } else { Grid::new(&[37.0], &[512]).unwrap() };
        let f = random_field(&grid, &RandomSpec { max_mode: 200, envelope: 0.5, ..RandomSpec::new(seed) }).unwrap();
        let mut acc = ComplexField::zeros(&grid);
        for n in relevant_scales(&grid) {
            acc = acc.add_scaled(1.0.into(), &lp_project(&f, n, LpKind::At).unwrap()).unwrap();
        }
        prop_assert!(max_diff(&acc, &f) < 1e-12 * f.max_abs());
    }

    #[test]
    fn low_and_high_parts_split_exactly(seed in any::<u64>(), k in -3i32..6) {
        let grid = Grid::new(&[37.0], &[512]).unwrap();
        let f = broadband(&grid, seed);
        let n = DyadicScale::new(k);
        for (lo, hi) in [(LpKind::AtMost, LpKind::Above), (LpKind::Below, LpKind::AtLeast)] {
            let sum = lp_project(&f, n, lo).unwrap().add_scaled(1.0.into(), &lp_project(&f, n, hi).unwrap()).unwrap();
            prop_assert!(max_diff(&sum, &f) < 1e-12 * f.max_abs());
        }
    }

    #[test]
    fn separated_annuli_are_orthogonal_exactly(seed in any::<u64>(), k in -3i32..6, gap in 2i32..5) {
        let grid = Grid::new(&[37.0], &[512]).unwrap();
        let f = broadband(&grid, seed);
        let (n, m) = (DyadicScale::new(k), DyadicScale::new(k + gap));
        let nm = lp_project(&lp_project(&f, n, LpKind::At).unwrap(), m, LpKind::At).unwrap();
        // The symbols vanish exactly; the composed field only up to transform roundoff.
        prop_assert!(nm.max_abs() < 1e-14 * f.max_abs());
        for xi in grid.wavenumbers(0) {
            prop_assert_eq!(lp_symbol(LpKind::At, n, xi.abs()) * lp_symbol(LpKind::At, m, xi.abs()), 0.0);
        }
    }
}

/// `‖|∇|^s P_N f‖_{L^p} ≈ N^s ‖P_N f‖_{L^p}` with constants independent of `N`.
#[test]
fn bernstein_ratios_are_scale_independent() {
    let grid = Grid::new(&[16.0 * PI], &[1024]).unwrap();
    for seed in 0..4 {
        let f = broadband(&grid, seed);
        for s in [-1.0f64, 0.5, 1.0, 2.0] {
            let annulus = 2f64.powf(s.abs());
            for p in [Exponent::from_integer(2), Exponent::from_integer(4), Exponent::Infinite] {
                let (lo, hi) = if p == Exponent::from_integer(2) { (1.0 / annulus, annulus) } else { (0.5 / annulus, 2.0 * annulus) };
                for n in relevant_scales(&grid) {
                    let r = bernstein_ratio(&f, n, s, p).unwrap();
                    assert!(r >= lo && r <= hi, "seed {seed}, s = {s}, p = {p}, N = {n}: {r}");
                }
            }
        }
    }
}

#[test]
fn zeroth_order_bernstein_ratio_is_one() {
    let grid = Grid::new(&[16.0 * PI], &[256]).unwrap();
    let f = broadband(&grid, 9);
    for n in relevant_scales(&grid) {
        assert!((bernstein_ratio(&f, n, 0.0, Exponent::from_integer(3)).unwrap() - 1.0).abs() < 1e-12);
    }
}

/// Square function against `|∇|^{−1}` in `L⁴` over a seeded ensemble.
#[test]
fn square_function_ensemble_is_comparable_to_negative_derivative() {
    let grid = Grid::new(&[40.0], &[512]).unwrap();
    let l4 = Exponent::from_integer(4);
    let ratios: Vec<f64> = (0..20)
        .map(|seed| {
            let f = random_field(&grid, &RandomSpec { max_mode: 64, envelope: 0.5, ..RandomSpec::new(1000 + seed) }).unwrap();
            let sq = lp_square_function(&f, 1.0).unwrap();
            lebesgue(&sq, l4).unwrap() / lebesgue(&fractional_derivative(&f, -1.0).unwrap(), l4).unwrap()
        })
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi / lo <= 10.0, "ratios in [{lo}, {hi}]");
}
