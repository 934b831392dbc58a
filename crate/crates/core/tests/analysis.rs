use b4nl::analysis::{
    apply_rescale_g, decay_study, fit_loglog, geomspace, illposed_check, scaling_exponent, smalldisp_study,
    strichartz_gain_study, IllPosedParams,
};
use b4nl::initial::{random_field, RandomSpec};
use b4nl::norms::{field_norm, hom_sobolev, lebesgue};
use b4nl::{ComplexField, EquationParams, EvolveConfig, Exponent, Grid, NormSpec};
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn band_limited(seed: u64) -> ComplexField {
    let g = Grid::new(&[20.0], &[256]).unwrap();
    random_field(&g, &RandomSpec { max_mode: 12, mean_zero: false, ..RandomSpec::new(seed) }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rescaled_norms_follow_exact_exponents(seed in any::<u64>(), k in 1i32..4, x0 in -2.0f64..2.0, which in 0usize..6) {
        let spec: NormSpec = ["Hdot^2", "Hdot^1/2", "Hdot^0", "L^2", "L^4", "L^inf"][which].parse().unwrap();
        let f = band_limited(seed);
        let h = 2f64.powi(k);
        // Grid maxima are not translation invariant; sample L^∞ unshifted.
        let x0 = if which == 5 { 0.0 } else { x0 };
        let e = scaling_exponent(&spec, 1).unwrap().to_f64().unwrap();
        let ratio = field_norm(&apply_rescale_g(&f, h, &[x0]).unwrap(), &spec).unwrap() / field_norm(&f, &spec).unwrap();
        prop_assert!((ratio / h.powf(e) - 1.0).abs() < 1e-8, "{}: {} vs {}", spec, ratio, h.powf(e));
    }

    #[test]
    fn illposed_identities_hold_for_powers_of_ten(n in 9u32..16, a in 1u32..4, b in 1u32..5, t in 1u32..4) {
        let p = IllPosedParams::parse(n, &format!("1e-{a}"), &format!("1e-{b}"), &format!("1e{t}")).unwrap();
        let r = illposed_check(&p).unwrap();
        prop_assert!(r.identity_lambda && r.identity_lambda_nu && r.lambda_nu_exceeds_one);
        // log₁₀ λ = (2a + (n − 4)b)/(n − 8).
        let expect = num_rational::Rational64::new((2 * a + (n - 4) * b) as i64, (n - 8) as i64);
        prop_assert_eq!(r.lambda_log10.unwrap(), expect.to_string());
    }
}

/// Each energy term carries its own exponent: `|Δu|²` scales like `h^{2(4 − n/2)}`, `|u|⁴` like `h^{8 − n}`.
#[test]
fn energy_terms_scale_separately() {
    let f = band_limited(3);
    let h = 2.0;
    let g = apply_rescale_g(&f, h, &[0.0]).unwrap();
    let kinetic = |u: &ComplexField| hom_sobolev(u, 2.0).unwrap().powi(2);
    let quartic = |u: &ComplexField| lebesgue(u, Exponent::from_integer(4)).unwrap().powi(4);
    let e_kin = 2.0 * scaling_exponent(&"Hdot^2".parse().unwrap(), 1).unwrap().to_f64().unwrap();
    let e_quart = 4.0 * scaling_exponent(&"L^4".parse().unwrap(), 1).unwrap().to_f64().unwrap();
    assert_eq!((e_kin, e_quart), (7.0, 7.0));
    assert!((kinetic(&g) / kinetic(&f) / h.powf(e_kin) - 1.0).abs() < 1e-8);
    assert!((quartic(&g) / quartic(&f) / h.powf(e_quart) - 1.0).abs() < 1e-8);
}

#[test]
fn critical_norms_are_invariant_in_dimension_eight() {
    for spec in ["Hdot^2", "Z", "W", "M", "S^2"] {
        let spec: NormSpec = spec.parse().unwrap();
        assert_eq!(scaling_exponent(&spec, 8).unwrap(), 0.into(), "{spec}");
    }
}

#[test]
fn small_dispersion_error_is_bounded_by_cube_law() {
    let g = Grid::new(&[40.0], &[256]).unwrap();
    let phi = ComplexField::gaussian(&g, 1.0, 1.0, &[0.0], &[0.0]);
    let cfg = EvolveConfig::new(EquationParams::default(), 2e-3, 0.5).with_record_every(25);
    let study = smalldisp_study(&phi, &[0.1, 0.2, 0.4], 0.5, 2.0, &cfg).unwrap();
    let scaled: Vec<f64> = study.rows.iter().map(|(nu, e)| e / nu.powi(3)).collect();
    for w in scaled.windows(2) {
        assert!(w[0] <= w[1], "error/ν³ {scaled:?}");
    }
    assert!(study.fit.unwrap().slope > 2.5);
}

#[test]
fn short_window_decay_of_narrow_gaussian() {
    let g = Grid::new(&[800.0], &[4096]).unwrap();
    let u0 = ComplexField::gaussian(&g, 1.0, 1.5, &[0.0], &[0.0]);
    let res = decay_study(&u0, &geomspace(5.0, 50.0, 6)).unwrap();
    assert!((res.fit.slope + 0.25).abs() < 0.05, "{:?}", res.fit);
    assert!(res.max_leak < 0.01);
}

#[test]
fn leaking_decay_window_is_rejected() {
    let g = Grid::new(&[40.0], &[512]).unwrap();
    let u0 = ComplexField::gaussian(&g, 1.0, 0.5, &[0.0], &[0.0]);
    assert!(matches!(decay_study(&u0, &[1.0, 5.0]), Err(b4nl::Error::Window { .. })));
}

#[test]
fn strichartz_gain_ratio_is_stable_across_ensemble() {
    let g = Grid::new(&[40.0], &[512]).unwrap();
    let (q, r) = (Exponent::from_integer(4), Exponent::Infinite);
    let stats = strichartz_gain_study(20, q, r, &g, &RandomSpec { max_mode: 40, ..RandomSpec::new(77) }, 1.0, 65).unwrap();
    assert_eq!(stats.values.len(), 20);
    assert!(stats.min > 0.0 && stats.max / stats.min < 10.0, "{stats:?}");
    let again = strichartz_gain_study(20, q, r, &g, &RandomSpec { max_mode: 40, ..RandomSpec::new(77) }, 1.0, 65).unwrap();
    assert_eq!(stats.values, again.values);
}

#[test]
fn exact_power_law_fits_exactly() {
    let xs = geomspace(1.0, 100.0, 7);
    let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.75)).collect();
    let fit = fit_loglog(&xs, &ys).unwrap();
    assert!((fit.slope + 0.75).abs() < 1e-12 && fit.residual < 1e-12);
}
