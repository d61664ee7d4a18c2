//! Uniform periodic grids, sampled signals and the test-signal generators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::CenteredFft;

/// `[-L, L)^d` sampled with `n` points per axis, `y_j = -L + j h`, `h = 2L/n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, l: f64) -> Result<Self> {
        let g = Grid { d, n, l };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d == 1 || self.d == 2) {
            return Err(Error::Config(format!("grid dimension must be 1 or 2, got {}", self.d)));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::Config(format!("samples per axis must be a power of two >= 8, got {}", self.n)));
        }
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(Error::Config(format!("half extent must be positive, got {}", self.l)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    /// Frequency lattice spacing `pi / L`.
    pub fn dxi(&self) -> f64 {
        std::f64::consts::PI / self.l
    }

    /// Largest resolved frequency `pi / h`.
    pub fn band(&self) -> f64 {
        std::f64::consts::PI / self.h()
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.h()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    pub fn freq(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dxi()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.freq(k)).collect()
    }

    /// Cell volume `h^d`.
    pub fn cell(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    /// Multi-index (row-major, first axis slowest) of a flat index.
    pub fn unflatten(&self, mut idx: usize) -> [usize; 2] {
        let mut out = [0; 2];
        for a in (0..self.d).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    /// The grid of the same spacing in twice the dimension, for kernels and tensor products.
    pub fn doubled(&self) -> Result<Grid> {
        Grid::new(2 * self.d, self.n, self.l)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Usage(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("signal contains non-finite samples".into()));
        }
        Ok(Signal { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Signal { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let m = grid.unflatten(idx);
                let y = [grid.coord(m[0]), grid.coord(m[1])];
                f(&y[..grid.d])
            })
            .collect();
        Signal { grid, values }
    }

    /// `(u, f) = h^d sum u conj(f)`.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * self.grid.cell()
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn sub(&self, other: &Signal) -> Signal {
        Signal { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Signal) -> Signal {
        Signal { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn conj(&self) -> Signal {
        Signal { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// `||u - v|| / ||v||`.
    pub fn rel_err(&self, reference: &Signal) -> f64 {
        self.sub(reference).norm() / reference.norm()
    }

    /// Centered spectrum `(2 pi)^(-d/2) h^d sum_j u_j exp(-i y_j xi_k)`.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut data = self.values.clone();
        CenteredFft::new(&self.grid).forward(&mut data);
        let c = (2.0 * std::f64::consts::PI).powf(-(self.grid.d as f64) / 2.0) * self.grid.cell();
        data.iter_mut().for_each(|v| *v *= c);
        data
    }

    /// Inverse of [`Signal::spectrum`].
    pub fn from_spectrum(grid: Grid, spec: &[Complex64]) -> Signal {
        let mut data = spec.to_vec();
        CenteredFft::new(&grid).inverse(&mut data);
        let c = (2.0 * std::f64::consts::PI).powf(-(grid.d as f64) / 2.0) * grid.dxi().powi(grid.d as i32);
        data.iter_mut().for_each(|v| *v *= c);
        Signal { grid, values: data }
    }

    /// Fraction of `L^2` mass within `width` of the boundary of the box.
    pub fn boundary_mass_fraction(&self, width: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let g = self.grid;
        let edge: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                let m = g.unflatten(*idx);
                m[..g.d].iter().any(|&j| g.coord(j).abs() > g.l - width)
            })
            .map(|(_, v)| v.norm_sqr())
            .sum();
        edge / total
    }

    /// Fraction of spectral mass at `|xi|_inf > band / 2`.
    pub fn high_frequency_mass_fraction(&self) -> f64 {
        let spec = self.spectrum();
        let g = self.grid;
        let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let half = 0.5 * g.band();
        let high: f64 = spec
            .iter()
            .enumerate()
            .filter(|(idx, _)| g.unflatten(*idx)[..g.d].iter().any(|&k| g.freq(k).abs() > half))
            .map(|(_, v)| v.norm_sqr())
            .sum();
        high / total
    }
}

/// `f(t) = exp(-1/t)` for `t > 0`, the building block of the smooth tapers.
fn smooth_zero(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth transition equal to 1 for `t <= 0` and 0 for `t >= 1`.
pub fn smooth_step_down(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = smooth_zero(1.0 - t);
        a / (a + smooth_zero(t))
    }
}

/// Boundary taper: 1 on `|x| <= L/2`, 0 for `|x| >= 3L/4`, smooth in between.
pub fn taper(x: f64, l: f64) -> f64 {
    smooth_step_down((x.abs() - 0.5 * l) / (0.25 * l))
}

/// `pi^(-d/4) exp(-|y|^2 / 2)`, not renormalized.
pub fn gaussian(grid: Grid) -> Signal {
    gaussian_width(grid, 1.0)
}

/// `pi^(-d/4) sigma^(-d/2) exp(-|y|^2 / (2 sigma^2))`.
pub fn gaussian_width(grid: Grid, sigma: f64) -> Signal {
    let c = std::f64::consts::PI.powf(-(grid.d as f64) / 4.0) * sigma.powf(-(grid.d as f64) / 2.0);
    Signal::from_fn(grid, |y| {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        Complex64::new(c * (-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
    })
}

/// The `L^2`-normalized Hermite function of order `k` in one variable.
pub fn hermite_function(k: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for j in 0..k {
        let next = (2.0 / (j as f64 + 1.0)).sqrt() * x * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Hermite function `h_k` in the first variable (times `h_0` in the second when d = 2).
pub fn hermite(grid: Grid, k: usize) -> Signal {
    Signal::from_fn(grid, |y| {
        let rest: f64 = y[1..].iter().map(|&v| hermite_function(0, v)).product();
        Complex64::new(hermite_function(k, y[0]) * rest, 0.0)
    })
}

/// `exp(i c x^m)` times the boundary taper (d = 1).
pub fn poly_chirp(grid: Grid, c: f64, m: u32) -> Result<Signal> {
    if grid.d != 1 {
        return Err(Error::Config("polynomial chirps are generated in one dimension".into()));
    }
    if !c.is_finite() || c == 0.0 || !(2..=12).contains(&m) {
        return Err(Error::Config(format!("chirp needs c != 0 and 2 <= m <= 12, got c = {c}, m = {m}")));
    }
    Ok(Signal::from_fn(grid, |y| Complex64::from_polar(taper(y[0], grid.l), c * y[0].powi(m as i32))))
}

/// Band-limited impulse: spectrum equal to 1 on `|xi| <= 2B/3`, tapered smoothly to 0 at `|xi| = B`.
///
/// A Schwartz surrogate of the delta whose frequency support is explicit, so
/// transport bounds over the resolved band are finite.
pub fn impulse(grid: Grid, band: f64) -> Result<Signal> {
    if grid.d != 1 {
        return Err(Error::Config("impulses are generated in one dimension".into()));
    }
    if !(band > 0.0 && band <= grid.band()) {
        return Err(Error::Config(format!("impulse band must lie in (0, {}], got {band}", grid.band())));
    }
    let spec: Vec<Complex64> = grid
        .freqs()
        .iter()
        .map(|xi| Complex64::new(smooth_step_down((xi.abs() - 2.0 * band / 3.0) / (band / 3.0)), 0.0))
        .collect();
    Ok(Signal::from_spectrum(grid, &spec))
}

/// `(u ⊗ v)(x', x'') = u(x') v(x'')` for two one-dimensional signals on the same grid.
pub fn tensor(u: &Signal, v: &Signal) -> Result<Signal> {
    if u.grid.d != 1 || u.grid != v.grid {
        return Err(Error::Usage("tensor product needs two one-dimensional signals on the same grid".into()));
    }
    let n = u.grid.n;
    let mut values = Vec::with_capacity(n * n);
    for a in &u.values {
        for b in &v.values {
            values.push(a * b);
        }
    }
    Signal::new(u.grid.doubled()?, values)
}
