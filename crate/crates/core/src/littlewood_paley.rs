//! Smooth dyadic frequency projections.
//!
//! The bump is the explicit `C^∞` gluing
//! `ψ(r) = χ(2 − r) / (χ(2 − r) + χ(r − 1))` with `χ(t) = e^{−1/t}` for
//! `t > 0`, so `ψ = 1` on `[0, 1]`, `ψ = 0` on `[2, ∞)` and `ψ(1.5) = 1/2`.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::norms::lebesgue;
use crate::spectral::{fractional_derivative, Spectrum};

/// Radial cutoff profile shared by projections and the local-mass weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BumpProfile;

impl BumpProfile {
    pub fn eval(self, r: f64) -> f64 {
        fn chi(t: f64) -> f64 {
            if t > 0.0 {
                (-1.0 / t).exp()
            } else {
                0.0
            }
        }
        let r = r.abs();
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            let a = chi(2.0 - r);
            a / (a + chi(r - 1.0))
        }
    }
}

/// A dyadic number `2^k`, `k` possibly negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicScale {
    exponent: i32,
}

impl DyadicScale {
    pub fn new(exponent: i32) -> Self {
        Self { exponent }
    }

    /// Accepts only exact powers of two.
    pub fn from_value(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Unsupported(format!("dyadic scale must be a positive power of two, got {value}")));
        }
        let k = value.log2().round() as i32;
        if 2f64.powi(k) != value {
            return Err(Error::Unsupported(format!("{value} is not a power of two")));
        }
        Ok(Self { exponent: k })
    }

    pub fn exponent(self) -> i32 {
        self.exponent
    }

    pub fn value(self) -> f64 {
        2f64.powi(self.exponent)
    }

    pub fn doubled(self) -> Self {
        Self { exponent: self.exponent + 1 }
    }
}

impl Ord for DyadicScale {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exponent.cmp(&other.exponent)
    }
}

impl PartialOrd for DyadicScale {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.exponent)
    }
}

/// Which piece of the dyadic decomposition to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpKind {
    /// `P_{≤N}`: `ψ(ξ/N)`.
    AtMost,
    /// `P_{<N} = P_{≤N} − P_N`: `ψ(2ξ/N)`.
    Below,
    /// `P_N`: `ψ(ξ/N) − ψ(2ξ/N)`.
    At,
    /// `P_{≥N} = P_{>N} + P_N`: `1 − ψ(2ξ/N)`.
    AtLeast,
    /// `P_{>N}`: `1 − ψ(ξ/N)`.
    Above,
}

pub fn lp_symbol(kind: LpKind, scale: DyadicScale, xi_abs: f64) -> f64 {
    let psi = BumpProfile;
    let r = xi_abs / scale.value();
    match kind {
        LpKind::AtMost => psi.eval(r),
        LpKind::Below => psi.eval(2.0 * r),
        LpKind::At => psi.eval(r) - psi.eval(2.0 * r),
        LpKind::AtLeast => 1.0 - psi.eval(2.0 * r),
        LpKind::Above => 1.0 - psi.eval(r),
    }
}

pub fn lp_project(f: &ComplexField, scale: DyadicScale, kind: LpKind) -> Result<ComplexField> {
    Ok(project_spectrum(&Spectrum::of(f)?, scale, kind))
}

pub(crate) fn project_spectrum(spec: &Spectrum, scale: DyadicScale, kind: LpKind) -> ComplexField {
    spec.synthesize_radial(|k2| Complex64::new(lp_symbol(kind, scale, k2.sqrt()), 0.0))
}

/// Dyadic scales whose annuli meet the nonzero lattice frequencies; over
/// this range `Σ_N P_N` is the identity on mean-zero fields.
pub fn relevant_scales(grid: &Grid) -> Vec<DyadicScale> {
    let lo = grid.min_frequency().log2().floor() as i32;
    let hi = grid.max_frequency().log2().ceil() as i32;
    (lo..=hi).map(DyadicScale::new).collect()
}

/// `‖|∇|^s P_N f‖_{L^p} / (N^s ‖P_N f‖_{L^p})`.
pub fn bernstein_ratio(f: &ComplexField, scale: DyadicScale, s: f64, p: Exponent) -> Result<f64> {
    if p.is_below_one() {
        return Err(Error::Domain(format!("Lebesgue exponent must lie in [1, ∞], got {p}")));
    }
    let projected = lp_project(f, scale, LpKind::At)?;
    let base = lebesgue(&projected, p)?;
    let reference = lebesgue(f, p)?;
    if base == 0.0 || base <= 1e-14 * reference {
        return Err(Error::UndefinedRatio(format!("P_{scale} f vanishes")));
    }
    let lifted = fractional_derivative(&projected, s)?;
    Ok(lebesgue(&lifted, p)? / (scale.value().powf(s) * base))
}
