use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Unnormalized d-dimensional complex FFT built from 1-D transforms.
///
/// Every line is transformed independently and written back by index
/// arithmetic, so the output does not depend on the thread count.
pub(crate) struct NdFft {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl NdFft {
    pub(crate) fn new(n: usize, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        NdFft {
            n,
            dim,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Unnormalized inverse: `inverse(forward(x)) = N^d x`.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        debug_assert_eq!(data.len(), n.pow(self.dim as u32));
        let scratch_len = fft.get_inplace_scratch_len();
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                data.par_chunks_mut(n).for_each_init(
                    || vec![Complex64::default(); scratch_len],
                    |scratch, line| fft.process_with_scratch(line, scratch),
                );
                continue;
            }
            let block = n * stride;
            let src: &[Complex64] = data;
            let mut lines = vec![Complex64::default(); src.len()];
            lines.par_chunks_mut(n).enumerate().for_each_init(
                || vec![Complex64::default(); scratch_len],
                |scratch, (line, buf)| {
                    let base = (line / stride) * block + line % stride;
                    for (p, slot) in buf.iter_mut().enumerate() {
                        *slot = src[base + p * stride];
                    }
                    fft.process_with_scratch(buf, scratch);
                },
            );
            data.par_iter_mut().enumerate().for_each(|(idx, x)| {
                let outer = idx / block;
                let rem = idx % block;
                let pos = rem / stride;
                let inner = rem % stride;
                *x = lines[(outer * stride + inner) * n + pos];
            });
        }
    }
}
