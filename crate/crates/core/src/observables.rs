//! Conserved quantities, local mass, brackets, the dyadic square function,
//! and the named observables recorded as CSV columns.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{EquationParams, Observable};
use crate::exponent::Exponent;
use crate::field::ComplexField;
use crate::interaction::{interaction_morawetz, interaction_potential};
use crate::littlewood_paley::{project_spectrum, relevant_scales, BumpProfile, LpKind};
use crate::morawetz::{displacement, morawetz_action, MorawetzWeight};
use crate::norms::{hom_sobolev, lebesgue};
use crate::spectral::Spectrum;

/// `∫|u|²` by the rectangle rule.
pub fn mass(f: &ComplexField) -> Result<f64> {
    f.require_physical("mass")?;
    Ok(f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * f.grid().cell_volume())
}

/// `∫ (|Δu|²/2 + |u|⁴/4)`.
pub fn energy(f: &ComplexField) -> Result<f64> {
    energy_with(f, &EquationParams::default())
}

/// `∫ (ν⁴|Δu|²/2 + μ|u|⁴/4)`, conserved by the `ν`-equation.
pub fn energy_with(f: &ComplexField, params: &EquationParams) -> Result<f64> {
    f.require_physical("energy")?;
    let lap = Spectrum::of(f)?.laplacian();
    let dv = f.grid().cell_volume();
    let kinetic: f64 = lap.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * dv;
    let quartic: f64 = f.values().iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() * dv;
    Ok(0.5 * params.nu4() * kinetic + 0.25 * params.mu() * quartic)
}

/// `∫|u|² ψ⁴((x − x₀)/R)` with periodic distance to `x₀`.
pub fn local_mass(f: &ComplexField, center: &[f64], radius: f64) -> Result<f64> {
    f.require_physical("local_mass")?;
    let grid = f.grid();
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Domain(format!("local mass radius must be positive, got {radius}")));
    }
    if let Some(l) = grid.extents().iter().find(|&&l| 2.0 * radius > 0.5 * l) {
        return Err(Error::Geometry(format!("ball of radius 2R = {} exceeds the box half-extent {}", 2.0 * radius, 0.5 * l)));
    }
    let psi = BumpProfile;
    let sum: f64 = (0..grid.len())
        .map(|i| {
            let d = displacement(grid, i, center);
            let r = d.iter().map(|v| v * v).sum::<f64>().sqrt() / radius;
            f.values()[i].norm_sqr() * psi.eval(r).powi(4)
        })
        .sum();
    Ok(sum * grid.cell_volume())
}

/// Mass bracket `Im(f ḡ)` and momentum bracket `Re(f∇ḡ − g∇f̄)`, both real.
#[derive(Clone, Debug)]
pub struct Brackets {
    pub mass: Vec<f64>,
    pub momentum: Vec<Vec<f64>>,
}

pub fn brackets(f: &ComplexField, g: &ComplexField) -> Result<Brackets> {
    f.require_physical("brackets")?;
    f.require_same_grid(g)?;
    let df = Spectrum::of(f)?.gradient();
    let dg = Spectrum::of(g)?.gradient();
    let (fv, gv) = (f.values(), g.values());
    let mass = fv.iter().zip(gv).map(|(a, b)| (a * b.conj()).im).collect();
    let momentum = df
        .iter()
        .zip(&dg)
        .map(|(dfj, dgj)| {
            (0..fv.len())
                .map(|i| (fv[i] * dgj.values()[i].conj() - gv[i] * dfj.values()[i].conj()).re)
                .collect()
        })
        .collect();
    Ok(Brackets { mass, momentum })
}

/// `(Σ_N N^{−2σ} |P_N f|²)^{1/2}` over the lattice-relevant scales, as a real field.
pub fn lp_square_function(f: &ComplexField, sigma: f64) -> Result<ComplexField> {
    let spec = Spectrum::of(f)?;
    if sigma > 0.0 && spec.mean_fraction() > 1e-10 {
        return Err(Error::Precondition(format!("square function with σ = {sigma} > 0 requires mean-zero input")));
    }
    let mut acc = vec![0.0; f.len()];
    for scale in relevant_scales(f.grid()) {
        let w = scale.value().powf(-2.0 * sigma);
        let p = project_spectrum(&spec, scale, LpKind::At);
        acc.iter_mut().zip(p.values()).for_each(|(a, z)| *a += w * z.norm_sqr());
    }
    ComplexField::from_values(f.grid(), acc.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect(), f.space())
}

/// Named per-sample observable; the `name` is the CSV header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableKind {
    Mass,
    Energy,
    /// `‖u‖_{Ḣ²}`.
    H2,
    /// `‖u‖_{Ḣ^{1/2}}`.
    Hhalf,
    Linf,
    L4,
    LocalMass { center: Vec<f64>, radius: f64 },
    /// `δ = None` means one grid spacing.
    Morawetz {
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        center: Vec<f64>,
    },
    IntMorawetz,
    /// `∫∫|u|²|u|²(|x−y|² + δ²)^{−5/2}`.
    IntPotential5 { delta: f64 },
}

impl ObservableKind {
    /// Columns recorded when a config lists none.
    pub fn defaults() -> Vec<ObservableKind> {
        vec![ObservableKind::Mass, ObservableKind::Energy, ObservableKind::H2, ObservableKind::Linf, ObservableKind::L4]
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let check_center = |c: &[f64], what: &str| {
            if !c.is_empty() && c.len() != dim {
                return Err(Error::Domain(format!("observables.{what}.center has {} components for n = {dim}", c.len())));
            }
            Ok(())
        };
        match self {
            ObservableKind::LocalMass { center, radius } => {
                check_center(center, "local_mass")?;
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Domain(format!("observables.local_mass.radius must be positive, got {radius}")));
                }
            }
            ObservableKind::Morawetz { delta, center } => {
                check_center(center, "morawetz")?;
                if let Some(d) = delta {
                    if !(*d > 0.0 && d.is_finite()) {
                        return Err(Error::Domain(format!("observables.morawetz.delta must be positive, got {d}")));
                    }
                }
            }
            ObservableKind::IntPotential5 { delta } if !(*delta > 0.0 && delta.is_finite()) => {
                return Err(Error::Domain(format!("observables.int_potential5.delta must be positive, got {delta}")));
            }
            _ => {}
        }
        Ok(())
    }
}

fn padded_center(center: &[f64], dim: usize) -> Vec<f64> {
    if center.is_empty() {
        vec![0.0; dim]
    } else {
        center.to_vec()
    }
}

impl Observable for ObservableKind {
    fn name(&self) -> String {
        match self {
            ObservableKind::Mass => "mass",
            ObservableKind::Energy => "energy",
            ObservableKind::H2 => "h2",
            ObservableKind::Hhalf => "hhalf",
            ObservableKind::Linf => "linf",
            ObservableKind::L4 => "l4",
            ObservableKind::LocalMass { .. } => "local_mass[x0,R]",
            ObservableKind::Morawetz { .. } => "morawetz",
            ObservableKind::IntMorawetz => "int_morawetz",
            ObservableKind::IntPotential5 { .. } => "int_potential5",
        }
        .to_string()
    }

    fn evaluate(&self, u: &ComplexField, params: &EquationParams) -> Result<f64> {
        let dim = u.grid().dim();
        match self {
            ObservableKind::Mass => mass(u),
            ObservableKind::Energy => energy_with(u, params),
            ObservableKind::H2 => hom_sobolev(u, 2.0),
            ObservableKind::Hhalf => hom_sobolev(u, 0.5),
            ObservableKind::Linf => lebesgue(u, Exponent::Infinite),
            ObservableKind::L4 => lebesgue(u, Exponent::from_integer(4)),
            ObservableKind::LocalMass { center, radius } => local_mass(u, &padded_center(center, dim), *radius),
            ObservableKind::Morawetz { delta, center } => {
                let w = match delta {
                    Some(d) => MorawetzWeight::new(*d, dim)?,
                    None => MorawetzWeight::for_grid(u.grid()),
                };
                morawetz_action(u, &w, &padded_center(center, dim))
            }
            ObservableKind::IntMorawetz => interaction_morawetz(u),
            ObservableKind::IntPotential5 { delta } => interaction_potential(u, 5.0, *delta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn mass_examples() {
        let g = Grid::new(&[64.0], &[512]).unwrap();
        assert_eq!(mass(&ComplexField::zeros(&g)).unwrap(), 0.0);
        let gauss = ComplexField::from_fn(&g, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        assert!((mass(&gauss).unwrap() - PI.sqrt()).abs() < 1e-10);
        let g2 = Grid::new(&[3.0, 5.0], &[8, 8]).unwrap();
        let pw = ComplexField::plane_wave(&g2, 0.6, &[1, 2]).unwrap();
        assert!((mass(&pw).unwrap() - 0.36 * 15.0).abs() < 1e-12);
    }

    #[test]
    fn energy_of_plane_wave() {
        let g = Grid::new(&[4.0, 6.0], &[16, 16]).unwrap();
        let a = 0.8;
        let pw = ComplexField::plane_wave(&g, a, &[1, -2]).unwrap();
        let xi2 = (2.0 * PI / 4.0).powi(2) + (4.0 * PI / 6.0).powi(2);
        let expected = 24.0 * (a * a * xi2 * xi2 / 2.0 + a.powi(4) / 4.0);
        assert!((energy(&pw).unwrap() - expected).abs() < 1e-11 * expected);
        assert_eq!(energy(&ComplexField::zeros(&g)).unwrap(), 0.0);
    }

    #[test]
    fn energy_of_gaussian_matches_closed_form() {
        // u = e^{−x²/2}: ∫|u''|² = (3/4)√π, ∫|u|⁴ = √(π/2).
        let g = Grid::new(&[40.0], &[512]).unwrap();
        let u = ComplexField::from_fn(&g, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        let expected = 0.5 * 0.75 * PI.sqrt() + 0.25 * (PI / 2.0).sqrt();
        assert!((energy(&u).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn local_mass_limits() {
        let g = Grid::new(&[64.0], &[512]).unwrap();
        let u = ComplexField::gaussian(&g, 1.0, 1.0, &[0.0], &[0.0]);
        let big = local_mass(&u, &[0.0], 15.0).unwrap();
        assert!((big - mass(&u).unwrap()).abs() < 1e-10);
        assert_eq!(local_mass(&ComplexField::zeros(&g), &[0.0], 1.0).unwrap(), 0.0);
        assert!(matches!(local_mass(&u, &[0.0], 17.0), Err(Error::Geometry(_))));
        let part = local_mass(&u, &[0.0], 1.0).unwrap();
        assert!(part > 0.0 && part < big);
    }

    #[test]
    fn bracket_examples() {
        let g = Grid::new(&[2.0 * PI], &[64]).unwrap();
        let f = ComplexField::gaussian(&g, 1.0, 0.7, &[0.2], &[1.0]);
        let b = brackets(&f, &f).unwrap();
        assert!(b.mass.iter().all(|m| m.abs() < 1e-15));

        let pw = ComplexField::plane_wave(&g, 1.5, &[3]).unwrap();
        let one = ComplexField::from_fn(&g, |_| Complex64::new(1.0, 0.0));
        let b = brackets(&pw, &one).unwrap();
        for (i, m) in b.mass.iter().enumerate() {
            let x = g.position(i)[0];
            assert!((m - 1.5 * (3.0 * x).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn square_function_of_single_mode() {
        let g = Grid::new(&[2.0 * PI], &[64]).unwrap();
        // |ξ| = 4 sits where only P_4 (=1) and P_8 (=0) could see it: ψ(1) − ψ(2) = 1.
        let pw = ComplexField::plane_wave(&g, 1.0, &[4]).unwrap();
        let s = lp_square_function(&pw, 1.0).unwrap();
        assert!(s.values().iter().all(|z| (z.re - 0.25).abs() < 1e-13 && z.im == 0.0));
        let z = lp_square_function(&ComplexField::zeros(&g), 1.0).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert!(lp_square_function(&one_plus(&pw), 1.0).is_err());
    }

    fn one_plus(f: &ComplexField) -> ComplexField {
        f.map(|z| z + 1.0)
    }

    #[test]
    fn column_names() {
        let names: Vec<String> = [
            ObservableKind::Mass,
            ObservableKind::LocalMass { center: vec![], radius: 1.0 },
            ObservableKind::IntPotential5 { delta: 0.1 },
        ]
        .iter()
        .map(|o| o.name())
        .collect();
        assert_eq!(names, ["mass", "local_mass[x0,R]", "int_potential5"]);
        let parsed: Vec<ObservableKind> =
            serde_json::from_str(r#"["mass", {"local_mass": {"center": [0.5], "radius": 2}}, "h2"]"#).unwrap();
        assert_eq!(parsed[1], ObservableKind::LocalMass { center: vec![0.5], radius: 2.0 });
    }
}
