//! Pseudospectral workbench for `i∂ₜu + ν⁴Δ²u + μ|u|²u = 0` on periodic boxes.
//!
//! Layers, bottom up: [`grid`] and [`field`] describe the discretization;
//! [`spectral`] and [`littlewood_paley`] are the Fourier engine;
//! [`evolution`] integrates the equation; [`observables`], [`norms`],
//! [`morawetz`] and [`interaction`] measure solutions; [`analysis`] and
//! [`scattering`] run the studies built on top.

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod exponent;
pub mod fft;
pub mod field;
pub mod grid;
pub mod initial;
pub mod interaction;
pub mod littlewood_paley;
pub mod morawetz;
pub mod norms;
pub mod observables;
pub mod quadrature;
pub mod scattering;
pub mod snapshot;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{EquationParams, EvolveConfig, Observable, Trajectory};
pub use exponent::Exponent;
pub use field::{ComplexField, Space};
pub use grid::{Convention, Grid};
pub use norms::NormSpec;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
