//! Row-wise FFT plumbing over `rustfft`.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans for one transform length. The inverse is
/// unnormalized, as in `rustfft`.
#[derive(Clone)]
pub(crate) struct Plan {
    pub(crate) len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plan {
    pub(crate) fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }

    /// Forward transform of every row of a standard-layout matrix.
    pub(crate) fn forward_rows(&self, m: &mut Array2<Complex64>) {
        self.rows(m, &self.forward);
    }

    pub(crate) fn inverse_rows(&self, m: &mut Array2<Complex64>) {
        self.rows(m, &self.inverse);
    }

    fn rows(&self, m: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(m.ncols(), self.len);
        let scratch_len = fft.get_inplace_scratch_len();
        m.axis_iter_mut(Axis(0)).into_par_iter().for_each_init(
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |scratch, mut row| {
                let slice = row.as_slice_mut().expect("rows are contiguous");
                fft.process_with_scratch(slice, scratch);
            },
        );
    }

    /// Centered transform of every row,
    /// `b_k = sum_m a_m exp(-+ 2 pi i (m - n/2)(k - n/2) / n)`, with `sign`
    /// `-1` for the forward kernel. Needs `n` divisible by 4 so the
    /// `n^2/4` cross term of the modulation drops out.
    pub(crate) fn centered_rows(&self, m: &mut Array2<Complex64>, sign: i32) {
        m.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
            modulate(row.as_slice_mut().expect("rows are contiguous"));
        });
        if sign < 0 {
            self.forward_rows(m);
        } else {
            self.inverse_rows(m);
        }
        m.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
            modulate(row.as_slice_mut().expect("rows are contiguous"));
        });
    }
}

/// Multiplies entry `m` by `(-1)^m`.
fn modulate(buf: &mut [Complex64]) {
    for v in buf.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

/// Owned transpose in standard layout.
pub(crate) fn transposed<T: Clone>(m: &Array2<T>) -> Array2<T> {
    m.t().as_standard_layout().into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn centered_matches_direct_sum() {
        let n = 16;
        let plan = Plan::new(n);
        let a: Vec<Complex64> = (0..n)
            .map(|m| Complex64::new((m as f64 * 0.37).sin(), (m as f64 * 1.3).cos()))
            .collect();
        for sign in [-1, 1] {
            let mut m = Array2::from_shape_vec((1, n), a.clone()).unwrap();
            plan.centered_rows(&mut m, sign);
            let b = m.row(0);
            for k in 0..n {
                let direct: Complex64 = (0..n)
                    .map(|m| {
                        let ph = sign as f64 * 2.0 * PI * (m as f64 - 8.0) * (k as f64 - 8.0) / n as f64;
                        a[m] * Complex64::from_polar(1.0, ph)
                    })
                    .sum();
                assert!((direct - b[k]).norm() < 1e-12);
            }
        }
    }
}
