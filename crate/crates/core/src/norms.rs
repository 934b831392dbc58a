//! Sobolev, Lebesgue and space-time norms, Schrödinger admissibility, and the
//! symbolic norm descriptions used by both numerics and scaling algebra.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::exponent::Exponent;
use crate::field::ComplexField;
use crate::littlewood_paley::{project_spectrum, relevant_scales, LpKind};
use crate::spectral::Spectrum;

/// `(Δx ∑ |v|^p)^{1/p}`, or `max |v|` for `p = ∞`.
pub(crate) fn lebesgue_of_moduli(moduli: impl Iterator<Item = f64>, cell_volume: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => moduli.fold(0.0, f64::max),
        Exponent::Finite(_) => {
            let pf = p.to_f64();
            if pf == 2.0 {
                (cell_volume * moduli.map(|m| m * m).sum::<f64>()).sqrt()
            } else {
                (cell_volume * moduli.map(|m| m.powf(pf)).sum::<f64>()).powf(1.0 / pf)
            }
        }
    }
}

pub fn lebesgue(f: &ComplexField, p: Exponent) -> Result<f64> {
    f.require_physical("L^p norm")?;
    if p.is_below_one() {
        return Err(Error::Domain(format!("Lebesgue exponent must lie in [1, ∞], got {p}")));
    }
    Ok(lebesgue_of_moduli(f.values().iter().map(|z| z.norm()), f.grid().cell_volume(), p))
}

/// `(∫ w(|ξ|²) |f̂|² dξ)^{1/2}` by Parseval on the lattice.
pub(crate) fn weighted_l2(spec: &Spectrum, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = spec.grid();
    let xi_sq = grid.xi_squared();
    let sum: f64 = spec.coeffs().iter().zip(xi_sq.iter()).map(|(c, &k2)| weight(k2) * c.norm_sqr()).sum();
    (grid.cell_volume() / grid.len() as f64 * sum).sqrt()
}

/// `‖|∇|^s f‖_{L²}`; negative `s` needs mean-zero input.
pub fn hom_sobolev(f: &ComplexField, s: f64) -> Result<f64> {
    hom_sobolev_spectrum(&Spectrum::of(f)?, s)
}

pub(crate) fn hom_sobolev_spectrum(spec: &Spectrum, s: f64) -> Result<f64> {
    if s < 0.0 && spec.mean_fraction() > 1e-10 {
        return Err(Error::Precondition(format!("Ḣ^{s} with s < 0 requires mean-zero input")));
    }
    if s == 0.0 {
        return Ok(weighted_l2(spec, |_| 1.0));
    }
    Ok(weighted_l2(spec, |k2| if k2 == 0.0 { 0.0 } else { k2.powf(s) }))
}

/// `‖(1 + |ξ|²)^{s/2} f̂‖_{L²}`.
pub fn inhom_sobolev(f: &ComplexField, s: f64) -> Result<f64> {
    Ok(weighted_l2(&Spectrum::of(f)?, |k2| (1.0 + k2).powf(s)))
}

/// `2 ≤ q, r ≤ ∞`, `(q, r, n) ≠ (2, ∞, 2)` and `2/q + n/r = n/2`, decided exactly.
pub fn is_admissible(q: Exponent, r: Exponent, n: u32) -> bool {
    let half = Rational64::new(1, 2);
    let (iq, ir) = (q.reciprocal(), r.reciprocal());
    if iq > half || ir > half || iq.is_negative() || ir.is_negative() {
        return false;
    }
    if n == 2 && iq == half && ir.is_zero() {
        return false;
    }
    let n = Rational64::from_integer(n as i64);
    Rational64::from_integer(2) * iq + n * ir == n / 2
}

/// Default finite list replacing the supremum over all admissible pairs:
/// `(∞, 2)`, the sharp endpoint when admissible, and three pairs with
/// `1/q = θ/q_min`, `θ ∈ {1/4, 1/2, 3/4}`.
pub fn default_pairs(n: u32) -> Vec<(Exponent, Exponent)> {
    let n_r = Rational64::from_integer(n as i64);
    // Largest admissible 1/q: min(1/2, n/4).
    let iq_max = Rational64::new(1, 2).min(n_r / 4);
    let partner = |iq: Rational64| -> Option<(Exponent, Exponent)> {
        let ir = (n_r / 2 - Rational64::from_integer(2) * iq) / n_r;
        let q = Exponent::from_reciprocal(iq).ok()?;
        let r = Exponent::from_reciprocal(ir).ok()?;
        is_admissible(q, r, n).then_some((q, r))
    };
    let mut out = vec![(Exponent::Infinite, Exponent::from_integer(2))];
    let candidates = [
        iq_max,
        iq_max * Rational64::new(1, 4),
        iq_max * Rational64::new(1, 2),
        iq_max * Rational64::new(3, 4),
    ];
    for iq in candidates {
        if let Some(pair) = partner(iq) {
            if !out.contains(&pair) {
                out.push(pair);
            }
        }
    }
    out
}

/// `‖D^d u‖_{L^q_t L^r_x}`, where `D^0 = 1`, `D^1 = ∇`, `D^2 = Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceTimeForm {
    pub derivative: u32,
    pub q: Exponent,
    pub r: Exponent,
}

/// Symbolic norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormSpec {
    HomSobolev(Rational64),
    InhomSobolev(Rational64),
    Lebesgue(Exponent),
    SpaceTime(Exponent, Exponent),
    Z,
    W,
    M,
    N,
    FullStrichartz(Rational64),
}

impl NormSpec {
    pub fn needs_trajectory(&self) -> bool {
        !matches!(self, NormSpec::HomSobolev(_) | NormSpec::InhomSobolev(_) | NormSpec::Lebesgue(_))
    }

    /// Concrete exponents of the space-time families in dimension `n`.
    pub fn space_time_form(&self, n: u32) -> Result<Option<SpaceTimeForm>> {
        let nn = n as i64;
        let crit = || Rational64::new(nn - 4, 2 * (nn + 4));
        let form = |derivative, iq: Rational64, ir: Rational64| -> Result<SpaceTimeForm> {
            let bad = |which: &str, v: Rational64| {
                Error::Domain(format!("{self} in dimension {n}: 1/{which} = {v} outside [0, 1]"))
            };
            if iq.is_negative() || iq > Rational64::one() {
                return Err(bad("q", iq));
            }
            if ir.is_negative() || ir > Rational64::one() {
                return Err(bad("r", ir));
            }
            Ok(SpaceTimeForm { derivative, q: Exponent::from_reciprocal(iq)?, r: Exponent::from_reciprocal(ir)? })
        };
        Ok(Some(match self {
            NormSpec::SpaceTime(q, r) => SpaceTimeForm { derivative: 0, q: *q, r: *r },
            NormSpec::Z => form(0, crit(), crit())?,
            NormSpec::W => form(1, crit(), Rational64::new(nn * nn - 2 * nn + 8, 2 * nn * (nn + 4)))?,
            NormSpec::M => form(2, crit(), Rational64::new(nn * nn + 16, 2 * nn * (nn + 4)))?,
            NormSpec::N => form(1, Rational64::new(1, 2), Rational64::new(nn + 2, 2 * nn))?,
            _ => return Ok(None),
        }))
    }
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let t = s.trim();
    let bad = || Error::Format(format!("cannot parse order {s:?}; expected an integer or \"a/b\""));
    if let Some((a, b)) = t.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(a, b));
    }
    if let Ok(i) = t.parse::<i64>() {
        return Ok(Rational64::from_integer(i));
    }
    let x: f64 = t.parse().map_err(|_| bad())?;
    Rational64::approximate_float(x)
        .filter(|r| *r.numer() as f64 / *r.denom() as f64 == x)
        .ok_or_else(bad)
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::HomSobolev(s) => write!(f, "Hdot^{s}"),
            NormSpec::InhomSobolev(s) => write!(f, "H^{s}"),
            NormSpec::Lebesgue(p) => write!(f, "L^{p}"),
            NormSpec::SpaceTime(q, r) => write!(f, "L^{q}_t L^{r}_x"),
            NormSpec::Z => f.write_str("Z"),
            NormSpec::W => f.write_str("W"),
            NormSpec::M => f.write_str("M"),
            NormSpec::N => f.write_str("N"),
            NormSpec::FullStrichartz(s) => write!(f, "S^{s}"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    /// Accepts the `Display` forms: `Hdot^s`, `H^s`, `L^p`, `L^q_t L^r_x`,
    /// `Z`, `W`, `M`, `N`, `S^s`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Format(format!("unknown norm {s:?}"));
        match t {
            "Z" => return Ok(NormSpec::Z),
            "W" => return Ok(NormSpec::W),
            "M" => return Ok(NormSpec::M),
            "N" => return Ok(NormSpec::N),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("Hdot^") {
            return Ok(NormSpec::HomSobolev(parse_rational(rest)?));
        }
        if let Some(rest) = t.strip_prefix("H^") {
            return Ok(NormSpec::InhomSobolev(parse_rational(rest)?));
        }
        if let Some(rest) = t.strip_prefix("S^") {
            return Ok(NormSpec::FullStrichartz(parse_rational(rest)?));
        }
        if let Some(rest) = t.strip_prefix("L^") {
            if let Some((q, r)) = rest.split_once("_t") {
                let r = r.trim().strip_prefix("L^").and_then(|r| r.strip_suffix("_x")).ok_or_else(bad)?;
                return Ok(NormSpec::SpaceTime(q.parse()?, r.parse()?));
            }
            return Ok(NormSpec::Lebesgue(rest.parse()?));
        }
        Err(bad())
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Norm of a single field; space-time families need [`trajectory_norm`].
pub fn field_norm(f: &ComplexField, spec: &NormSpec) -> Result<f64> {
    match spec {
        NormSpec::HomSobolev(s) => hom_sobolev(f, rational_to_f64(*s)),
        NormSpec::InhomSobolev(s) => inhom_sobolev(f, rational_to_f64(*s)),
        NormSpec::Lebesgue(p) => lebesgue(f, *p),
        other => Err(Error::Usage(format!("{other} is a space-time norm and needs a trajectory"))),
    }
}

/// `(∫ g(t)^q dt)^{1/q}` by the trapezoid rule, `max g` for `q = ∞`.
pub fn time_lebesgue(times: &[f64], values: &[f64], q: Exponent) -> Result<f64> {
    if times.is_empty() || times.len() != values.len() {
        return Err(Error::Usage("time integral needs matching, non-empty samples".into()));
    }
    if q.is_infinite() {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    let qf = q.to_f64();
    let pw: Vec<f64> = values.iter().map(|v| v.powf(qf)).collect();
    let integral: f64 = times.windows(2).zip(pw.windows(2)).map(|(t, g)| 0.5 * (t[1] - t[0]) * (g[0] + g[1])).sum();
    Ok(integral.powf(1.0 / qf))
}

/// Pointwise modulus of `D^d u`.
fn derivative_moduli(f: &ComplexField, derivative: u32) -> Result<Vec<f64>> {
    match derivative {
        0 => Ok(f.values().iter().map(|z| z.norm()).collect()),
        1 => {
            let grads = Spectrum::of(f)?.gradient();
            Ok((0..f.len()).map(|i| grads.iter().map(|g| g.values()[i].norm_sqr()).sum::<f64>().sqrt()).collect())
        }
        2 => Ok(Spectrum::of(f)?.laplacian().values().iter().map(|z| z.norm()).collect()),
        d => Err(Error::Unsupported(format!("derivative order {d} in a space-time norm"))),
    }
}

fn stored_fields(traj: &Trajectory) -> Result<Vec<&ComplexField>> {
    if traj.is_empty() {
        return Err(Error::Usage("norm of an empty trajectory".into()));
    }
    traj.samples()
        .iter()
        .map(|s| s.field.as_ref().ok_or_else(|| Error::Usage(format!("no stored field at t = {}", s.time))))
        .collect()
}

pub fn space_time_norm(traj: &Trajectory, form: SpaceTimeForm) -> Result<f64> {
    let fields = stored_fields(traj)?;
    let mut per_time = Vec::with_capacity(fields.len());
    for f in &fields {
        let m = derivative_moduli(f, form.derivative)?;
        per_time.push(lebesgue_of_moduli(m.into_iter(), f.grid().cell_volume(), form.r));
    }
    time_lebesgue(&traj.times(), &per_time, form.q)
}

/// `(∑_N N^{2s + 4/a} ‖P_N u‖²_{L^a_t L^b_x})^{1/2}` for one pair, with
/// `sign = -1` giving the dual-side weight `N^{2s − 4/a}` on `L^{a'}_t L^{b'}_x`.
fn dyadic_sum(traj: &Trajectory, s: f64, a: Exponent, b: Exponent, dual: bool) -> Result<f64> {
    let fields = stored_fields(traj)?;
    let times = traj.times();
    let grid = fields[0].grid().clone();
    let spectra: Vec<Spectrum> = fields.iter().map(|f| Spectrum::of(f)).collect::<Result<_>>()?;
    let gain = 4.0 * rational_to_f64(a.reciprocal());
    let (qa, rb, power) = if dual { (a.conjugate()?, b.conjugate()?, 2.0 * s - gain) } else { (a, b, 2.0 * s + gain) };
    let mut total = 0.0;
    for scale in relevant_scales(&grid) {
        let per_time: Vec<f64> = spectra
            .iter()
            .map(|sp| {
                let p = project_spectrum(sp, scale, LpKind::At);
                lebesgue_of_moduli(p.values().iter().map(|z| z.norm()), grid.cell_volume(), rb)
            })
            .collect();
        let v = time_lebesgue(&times, &per_time, qa)?;
        total += scale.value().powf(power) * v * v;
    }
    Ok(total.sqrt())
}

/// Full Strichartz norm: supremum over `pairs` of the dyadic sum.
pub fn full_strichartz(traj: &Trajectory, s: f64, n: u32, pairs: &[(Exponent, Exponent)]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &(a, b) in pairs {
        if !is_admissible(a, b, n) {
            return Err(Error::Domain(format!("pair ({a}, {b}) is not admissible in dimension {n}")));
        }
        best = best.max(dyadic_sum(traj, s, a, b, false)?);
    }
    Ok(best)
}

/// Upper bound for the dual Strichartz norm: the infimum restricted to `pairs`.
pub fn dual_strichartz_upper_bound(traj: &Trajectory, s: f64, n: u32, pairs: &[(Exponent, Exponent)]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for &(a, b) in pairs {
        if !is_admissible(a, b, n) {
            return Err(Error::Domain(format!("pair ({a}, {b}) is not admissible in dimension {n}")));
        }
        best = best.min(dyadic_sum(traj, s, a, b, true)?);
    }
    Ok(best)
}

/// Numeric evaluation of any [`NormSpec`] along a trajectory with stored fields.
/// Single-field norms are taken at the final sample.
pub fn trajectory_norm(traj: &Trajectory, spec: &NormSpec) -> Result<f64> {
    let fields = stored_fields(traj)?;
    let n = fields[0].grid().dim() as u32;
    match spec {
        NormSpec::FullStrichartz(s) => full_strichartz(traj, rational_to_f64(*s), n, &default_pairs(n)),
        other => match other.space_time_form(n)? {
            Some(form) => space_time_norm(traj, form),
            None => field_norm(fields[fields.len() - 1], other),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    use crate::grid::Grid;

    #[test]
    fn admissibility() {
        for n in 1..10 {
            assert!(is_admissible(Exponent::Infinite, Exponent::from_integer(2), n));
        }
        assert!(is_admissible(Exponent::from_integer(2), Exponent::ratio(8, 3), 8));
        assert!(!is_admissible(Exponent::from_integer(2), Exponent::from_integer(3), 8));
        assert!(!is_admissible(Exponent::from_integer(2), Exponent::Infinite, 2));
        assert!(is_admissible(Exponent::from_integer(4), Exponent::Infinite, 1));
        assert!(is_admissible(Exponent::from_integer(8), Exponent::from_integer(4), 1));
        assert!(!is_admissible(Exponent::from_integer(1), Exponent::Infinite, 1));
    }

    #[test]
    fn unique_partner_for_q_two_in_dimension_eight() {
        let hits: Vec<_> = (2..=64i64)
            .flat_map(|num| (1..=8i64).map(move |den| Exponent::ratio(num, den)))
            .filter(|&r| is_admissible(Exponent::from_integer(2), r, 8))
            .collect();
        assert!(hits.iter().all(|&r| r == Exponent::ratio(8, 3)) && !hits.is_empty());
    }

    #[test]
    fn default_pairs_are_admissible() {
        for n in 1..=8 {
            let pairs = default_pairs(n);
            assert!(pairs.len() >= 4, "n = {n}: {pairs:?}");
            assert!(pairs.iter().all(|&(q, r)| is_admissible(q, r, n)));
        }
        assert!(default_pairs(3).contains(&(Exponent::from_integer(2), Exponent::from_integer(6))));
        assert!(!default_pairs(2).contains(&(Exponent::from_integer(2), Exponent::Infinite)));
    }

    #[test]
    fn spec_text_round_trip() {
        for s in ["Hdot^2", "H^-1/2", "L^4", "L^inf", "L^8_t L^4_x", "Z", "W", "M", "N", "S^0", "L^8/3"] {
            let spec: NormSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<NormSpec>().unwrap(), spec);
        }
        assert!("Q".parse::<NormSpec>().is_err());
    }

    #[test]
    fn critical_families_expand() {
        let z = NormSpec::Z.space_time_form(8).unwrap().unwrap();
        assert_eq!((z.q, z.r), (Exponent::from_integer(6), Exponent::from_integer(6)));
        let m = NormSpec::M.space_time_form(8).unwrap().unwrap();
        assert_eq!((m.derivative, m.r), (2, Exponent::ratio(12, 5)));
        assert!(NormSpec::Z.space_time_form(3).is_err());
        assert_eq!(NormSpec::Lebesgue(Exponent::from_integer(2)).space_time_form(3).unwrap(), None);
    }

    #[test]
    fn plane_wave_norms() {
        let g = Grid::new(&[6.0, 4.0], &[16, 16]).unwrap();
        let a = 1.7;
        let pw = ComplexField::plane_wave(&g, a, &[2, 1]).unwrap();
        let xi = ((2.0 * 2.0 * std::f64::consts::PI / 6.0f64).powi(2) + (2.0 * std::f64::consts::PI / 4.0f64).powi(2)).sqrt();
        let l2 = a * g.volume().sqrt();
        assert!((lebesgue(&pw, Exponent::from_integer(2)).unwrap() - l2).abs() < 1e-12 * l2);
        assert!((hom_sobolev(&pw, 0.0).unwrap() - l2).abs() < 1e-12 * l2);
        let h = hom_sobolev(&pw, 1.5).unwrap();
        assert!((h - xi.powf(1.5) * l2).abs() < 1e-12 * h);
        assert!((lebesgue(&pw, Exponent::Infinite).unwrap() - a).abs() < 1e-14);
        let p4 = lebesgue(&pw, Exponent::from_integer(4)).unwrap();
        assert!((p4 - a * g.volume().powf(0.25)).abs() < 1e-12 * p4);
    }

    #[test]
    fn zero_order_paths_agree_on_mean_zero_field() {
        let g = Grid::new(&[10.0], &[64]).unwrap();
        let f = ComplexField::from_fn(&g, |x| {
            let w = 2.0 * std::f64::consts::PI / 10.0;
            Complex64::new((w * x[0]).sin(), 0.4 * (3.0 * w * x[0]).cos())
        });
        let a = hom_sobolev(&f, 0.0).unwrap();
        let b = lebesgue(&f, Exponent::from_integer(2)).unwrap();
        assert!((a - b).abs() < 1e-12 * b);
        assert!(hom_sobolev(&f.map(|z| z + 1.0), -1.0).is_err());
    }

    #[test]
    fn trapezoid_in_time() {
        let t = [0.0, 0.5, 1.0];
        let v = [2.0, 2.0, 2.0];
        assert!((time_lebesgue(&t, &v, Exponent::from_integer(3)).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(time_lebesgue(&t, &[1.0, 3.0, 2.0], Exponent::Infinite).unwrap(), 3.0);
        assert!(time_lebesgue(&[], &[], Exponent::Infinite).is_err());
    }
}
