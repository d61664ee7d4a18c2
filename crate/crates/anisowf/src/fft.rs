//! Centered discrete Fourier transforms on the periodic grid.
//!
//! With `y_j = -L + j h` and `xi_k = (k - n/2) pi / L` the kernel
//! `exp(-i y_j xi_k)` factors as `(-1)^j (-1)^k exp(-2 pi i j k / n)` (n/2 is
//! even for every admissible grid), so the centered transform is a plain FFT
//! between two checkerboard modulations.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::signal::Grid;

pub struct CenteredFft {
    n: usize,
    d: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl CenteredFft {
    pub fn new(grid: &Grid) -> Self {
        Self::with_len(grid.n, grid.d)
    }

    pub fn with_len(n: usize, d: usize) -> Self {
        let mut planner = FftPlanner::new();
        CenteredFft { n, d, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn checker(&self, data: &mut [Complex64]) {
        let n = self.n;
        for (idx, v) in data.iter_mut().enumerate() {
            let mut parity = 0;
            let mut rest = idx;
            for _ in 0..self.d {
                parity += rest % n;
                rest /= n;
            }
            if parity % 2 == 1 {
                *v = -*v;
            }
        }
    }

    fn along_axes(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        match self.d {
            1 => plan.process(data),
            2 => {
                plan.process(data);
                let mut col = vec![Complex64::new(0.0, 0.0); n];
                for c in 0..n {
                    for r in 0..n {
                        col[r] = data[r * n + c];
                    }
                    plan.process(&mut col);
                    for r in 0..n {
                        data[r * n + c] = col[r];
                    }
                }
            }
            d => panic!("centered FFT supports d = 1 or 2, got {d}"),
        }
    }

    /// `out_k = sum_j data_j exp(-i y_j xi_k)` (no quadrature weights).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.checker(data);
        self.along_axes(data, &self.fwd);
        self.checker(data);
    }

    /// `out_j = sum_k data_k exp(+i y_j xi_k)` (no quadrature weights).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.checker(data);
        self.along_axes(data, &self.inv);
        self.checker(data);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let grid = Grid::new(1, 16, 3.0).unwrap();
        let data: Vec<Complex64> =
            (0..16).map(|j| Complex64::new((j as f64 * 0.7).sin(), (j as f64 * 0.3).cos())).collect();
        let mut out = data.clone();
        CenteredFft::new(&grid).forward(&mut out);
        for (k, got) in out.iter().enumerate() {
            let xi = grid.freq(k);
            let direct: Complex64 = (0..16).map(|j| data[j] * Complex64::from_polar(1.0, -grid.coord(j) * xi)).sum();
            assert!((direct - got).norm() < 1e-12);
        }
    }
}
