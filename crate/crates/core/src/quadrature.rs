//! Cumulative composite Simpson rule on equispaced nodes.

use std::ops::{Add, Mul};

/// Running integrals `I_j ≈ ∫_{t_0}^{t_j} g`, `t_j = t_0 + j h` (h may be negative).
///
/// Even nodes use composite Simpson; odd nodes add the one-interval
/// three-point rule `h/12 (5g₀ + 8g₁ − g₂)` (its mirror image at the last
/// node), so every partial integral is third-order locally and the full
/// integral is fourth-order when the node count is odd.
pub fn cumulative_simpson<T>(h: f64, g: &[T]) -> Vec<T>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let m = g.len();
    if m == 0 {
        return Vec::new();
    }
    let zero = g[0].clone() * 0.0;
    let mut out = vec![zero; m];
    if m == 2 {
        out[1] = (g[0].clone() + g[1].clone()) * (0.5 * h);
        return out;
    }
    for j in 1..m {
        out[j] = if j % 2 == 0 {
            out[j - 2].clone() + (g[j - 2].clone() + g[j - 1].clone() * 4.0 + g[j].clone()) * (h / 3.0)
        } else if j + 1 < m {
            out[j - 1].clone() + (g[j - 1].clone() * 5.0 + g[j].clone() * 8.0 + g[j + 1].clone() * -1.0) * (h / 12.0)
        } else {
            out[j - 1].clone() + (g[j - 2].clone() * -1.0 + g[j - 1].clone() * 8.0 + g[j].clone() * 5.0) * (h / 12.0)
        };
    }
    out
}

/// Element-wise vector wrapper so fields can go through [`cumulative_simpson`].
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Samples<V>(pub Vec<V>);

impl<V: Copy + Add<Output = V>> Add for Samples<V> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a = *a + b);
        self
    }
}

impl<V: Copy + Mul<f64, Output = V>> Mul<f64> for Samples<V> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a = *a * rhs);
        self
    }
}
