//! Two-dimensional complex FFT on a row-major `n1 x n2` buffer.
//!
//! Row transforms run on contiguous slices, column transforms go through a
//! transposed copy. Plans are built once; the same sequence of operations is
//! executed on every call so results are bitwise reproducible.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    n1: usize,
    n2: usize,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
    transposed: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({} x {})", self.n1, self.n2)
    }
}

impl Fft2 {
    pub fn new(n1: usize, n2: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd1 = planner.plan_fft_forward(n1);
        let inv1 = planner.plan_fft_inverse(n1);
        let fwd2 = planner.plan_fft_forward(n2);
        let inv2 = planner.plan_fft_inverse(n2);
        let scratch_len = [&fwd1, &inv1, &fwd2, &inv2]
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            n1,
            n2,
            fwd1,
            inv1,
            fwd2,
            inv2,
            transposed: vec![Complex64::new(0.0, 0.0); n1 * n2],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Unnormalized forward transform, `sum_x u(x) exp(-2 pi i k.x/n)`.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let (r, c) = (self.fwd2.clone(), self.fwd1.clone());
        self.run(data, &*r, &*c);
    }

    /// Unnormalized inverse transform.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let (r, c) = (self.inv2.clone(), self.inv1.clone());
        self.run(data, &*r, &*c);
    }

    fn run(&mut self, data: &mut [Complex64], rows: &dyn Fft<f64>, cols: &dyn Fft<f64>) {
        let (n1, n2) = (self.n1, self.n2);
        assert_eq!(data.len(), n1 * n2);
        for row in data.chunks_exact_mut(n2) {
            rows.process_with_scratch(row, &mut self.scratch);
        }
        for i in 0..n1 {
            for j in 0..n2 {
                self.transposed[j * n1 + i] = data[i * n2 + j];
            }
        }
        for col in self.transposed.chunks_exact_mut(n1) {
            cols.process_with_scratch(col, &mut self.scratch);
        }
        for j in 0..n2 {
            for i in 0..n1 {
                data[i * n2 + j] = self.transposed[j * n1 + i];
            }
        }
    }
}
