//! Multi-dimensional complex FFT over row-major buffers, built from
//! one-dimensional `rustfft` plans applied axis by axis.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

/// Unnormalized n-dimensional FFT for a fixed shape.
#[derive(Clone)]
pub struct FftNd {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl fmt::Debug for FftNd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftNd").field("shape", &self.shape).finish()
    }
}

impl FftNd {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = shape.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self { shape: shape.to_vec(), forward, inverse }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// In-place transform with kernel `e^{-2πi jk/N}` (forward) or
    /// `e^{+2πi jk/N}` (inverse). No normalization is applied.
    pub fn process(&self, data: &mut [Complex64], direction: FftDirection) {
        assert_eq!(data.len(), self.len(), "buffer does not match FFT shape");
        let plans = match direction {
            FftDirection::Forward => &self.forward,
            FftDirection::Inverse => &self.inverse,
        };
        let ndim = self.shape.len();
        for axis in 0..ndim {
            let len = self.shape[axis];
            let stride: usize = self.shape[axis + 1..].iter().product();
            let plan = &plans[axis];
            if stride == 1 {
                plan.process(data);
                continue;
            }
            // Gather the `stride` lines of each outer block into one batch.
            let block = len * stride;
            let mut lines = vec![Complex64::default(); block];
            for chunk in data.chunks_mut(block) {
                for inner in 0..stride {
                    for i in 0..len {
                        lines[inner * len + i] = chunk[i * stride + inner];
                    }
                }
                plan.process(&mut lines);
                for inner in 0..stride {
                    for i in 0..len {
                        chunk[i * stride + inner] = lines[inner * len + i];
                    }
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.process(data, FftDirection::Forward);
    }

    /// Inverse transform including the `1/len` normalization.
    pub fn inverse_normalized(&self, data: &mut [Complex64]) {
        self.process(data, FftDirection::Inverse);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}
