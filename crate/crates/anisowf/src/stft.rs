//! Short-time Fourier transform with a Gaussian window,
//! `V_phi u(x, xi) = (2 pi)^(-d/2) int u(y) conj(phi(y - x)) exp(-i y xi) dy`,
//! on the periodic grid (circular translation, Riemann quadrature).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::CenteredFft;
use crate::signal::{gaussian_width, Grid, Signal};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Window half-width in units of sigma beyond which the Gaussian is below `1e-16`.
const WINDOW_CUTOFF: f64 = 8.6;

#[derive(Clone, Debug)]
pub struct Window {
    pub grid: Grid,
    pub sigma: f64,
    pub values: Vec<Complex64>,
    pub l2_norm: f64,
    /// Factor applied to the analytic Gaussian to reach unit discrete norm.
    pub renorm: f64,
}

impl Window {
    /// `phi_sigma(y) = pi^(-d/4) sigma^(-d/2) exp(-|y|^2 / (2 sigma^2))`, rescaled to unit discrete norm.
    pub fn gaussian(grid: Grid, sigma: f64) -> Result<Window> {
        grid.validate()?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("window width must be positive, got {sigma}")));
        }
        let raw = gaussian_width(grid, sigma);
        let renorm = 1.0 / raw.norm();
        let values: Vec<Complex64> = raw.values.iter().map(|v| v * renorm).collect();
        let l2_norm = Signal { grid, values: values.clone() }.norm();
        Ok(Window { grid, sigma, values, l2_norm, renorm })
    }

    pub fn conj(&self) -> Window {
        Window { values: self.values.iter().map(|v| v.conj()).collect(), ..self.clone() }
    }

    /// `phi(y_j - y_i)` on the periodic grid, per axis index.
    fn shifted(&self, j: [usize; 2], i: [usize; 2]) -> Complex64 {
        let n = self.grid.n;
        let half = n / 2;
        let mut flat = 0;
        for a in 0..self.grid.d {
            flat = flat * n + (j[a] + n + half - i[a]) % n;
        }
        self.values[flat]
    }
}

/// `gaussian_window(grid)`: the unit-width normalized Gaussian window.
pub fn gaussian_window(grid: Grid) -> Window {
    Window::gaussian(grid, 1.0).expect("validated grid")
}

/// Values of `V_phi u` on the lattice (signal grid) x (centered frequency lattice).
///
/// `values[ix * n^d + ik]` with `ix`, `ik` row-major flat indices.
#[derive(Clone, Debug)]
pub struct StftField {
    pub grid: Grid,
    pub s: Option<f64>,
    pub values: Vec<Complex64>,
}

impl StftField {
    pub fn at(&self, ix: usize, ik: usize) -> Complex64 {
        self.values[ix * self.grid.len() + ik]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Riemann-sum `L^2(R^2d)` inner product with another field.
    pub fn inner(&self, other: &StftField) -> Complex64 {
        let w = (self.grid.h() * self.grid.dxi()).powi(self.grid.d as i32);
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * w
    }

    /// Multilinear interpolation of `|V|` at an arbitrary phase-space point.
    ///
    /// Periodic in x; frequencies outside the lattice return 0.
    pub fn magnitude_interp(&self, x: &[f64], xi: &[f64]) -> f64 {
        let g = self.grid;
        let d = g.d;
        let n = g.n as isize;
        let mut base = [0isize; 4];
        let mut frac = [0.0; 4];
        for a in 0..d {
            let tx = (x[a] + g.l) / g.h();
            let fx = tx.floor();
            base[a] = fx as isize;
            frac[a] = tx - fx;
            let tk = xi[a] / g.dxi() + (g.n / 2) as f64;
            if tk < 0.0 || tk > (g.n - 1) as f64 {
                return 0.0;
            }
            let fk = tk.floor().min((g.n - 2) as f64);
            base[d + a] = fk as isize;
            frac[d + a] = tk - fk;
        }
        let dims = 2 * d;
        let mut acc = 0.0;
        for corner in 0..(1usize << dims) {
            let mut w = 1.0;
            let mut ix = 0usize;
            let mut ik = 0usize;
            for a in 0..dims {
                let bit = (corner >> a) & 1;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                let idx = base[a] + bit as isize;
                if a < d {
                    ix = ix * g.n + idx.rem_euclid(n) as usize;
                } else {
                    ik = ik * g.n + idx as usize;
                }
            }
            if w != 0.0 {
                acc += w * self.at(ix, ik).norm();
            }
        }
        acc
    }
}

fn check_grids(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::Usage(format!("grid mismatch: {a:?} vs {b:?}")));
    }
    Ok(())
}

/// Full lattice STFT by one centered FFT per x-lattice point.
pub fn stft(u: &Signal, phi: &Window) -> Result<StftField> {
    check_grids(&u.grid, &phi.grid)?;
    let g = u.grid;
    let nd = g.len();
    let fft = CenteredFft::new(&g);
    let c = TWO_PI.powf(-(g.d as f64) / 2.0) * g.cell();
    let mut values = vec![Complex64::new(0.0, 0.0); nd * nd];
    values.par_chunks_mut(nd).enumerate().for_each(|(ix, row)| {
        let i = g.unflatten(ix);
        for (jf, slot) in row.iter_mut().enumerate() {
            *slot = u.values[jf] * phi.shifted(g.unflatten(jf), i).conj();
        }
        fft.forward(row);
        row.iter_mut().for_each(|v| *v *= c);
    });
    Ok(StftField { grid: g, s: None, values })
}

/// Synthesis `(2 pi)^(-d/2) sum_x sum_xi F(x, xi) M_xi T_x phi` with lattice cell volumes.
pub fn istft(field: &StftField, phi: &Window) -> Result<Signal> {
    check_grids(&field.grid, &phi.grid)?;
    if (phi.l2_norm - 1.0).abs() > 1e-10 {
        return Err(Error::Usage("synthesis window must have unit norm".into()));
    }
    let g = field.grid;
    let nd = g.len();
    let fft = CenteredFft::new(&g);
    let c = TWO_PI.powf(-(g.d as f64) / 2.0) * g.dxi().powi(g.d as i32) * g.cell();
    const BLOCK: usize = 64;
    let partials: Vec<Vec<Complex64>> = (0..nd.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![Complex64::new(0.0, 0.0); nd];
            let mut buf = vec![Complex64::new(0.0, 0.0); nd];
            for ix in b * BLOCK..((b + 1) * BLOCK).min(nd) {
                buf.copy_from_slice(&field.values[ix * nd..(ix + 1) * nd]);
                fft.inverse(&mut buf);
                let i = g.unflatten(ix);
                for (jf, a) in acc.iter_mut().enumerate() {
                    *a += buf[jf] * phi.shifted(g.unflatten(jf), i);
                }
            }
            acc
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); nd];
    for part in partials {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    values.iter_mut().for_each(|v| *v *= c);
    Ok(Signal { grid: g, values })
}

/// `((u, f)_{L^2}, (V_phi u, V_phi f)_{L^2(R^2d)})`.
pub fn moyal_check(u: &Signal, f: &Signal, phi: &Window) -> Result<(Complex64, Complex64)> {
    check_grids(&u.grid, &f.grid)?;
    let vu = stft(u, phi)?;
    let vf = stft(f, phi)?;
    Ok((u.inner(f), vu.inner(&vf)))
}

/// `sup_z <z>^n |V(z)|` over the lattice, for each `n` in `0..=n_max`.
pub fn seminorm_ladder(field: &StftField, n_max: u32) -> Vec<f64> {
    let g = field.grid;
    let nd = g.len();
    let mut out = vec![0.0f64; n_max as usize + 1];
    for (idx, v) in field.values.iter().enumerate() {
        let (ix, ik) = (g.unflatten(idx / nd), g.unflatten(idx % nd));
        let mut r2 = 1.0;
        for a in 0..g.d {
            r2 += g.coord(ix[a]).powi(2) + g.freq(ik[a]).powi(2);
        }
        let bracket = r2.sqrt();
        let m = v.norm();
        let mut w = 1.0;
        for slot in out.iter_mut() {
            *slot = slot.max(w * m);
            w *= bracket;
        }
    }
    out
}

/// `max_z |V(z)| / <z>^k` over the lattice.
pub fn polynomial_growth_ratio(field: &StftField, k: u32) -> f64 {
    let g = field.grid;
    let nd = g.len();
    field
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let (ix, ik) = (g.unflatten(idx / nd), g.unflatten(idx % nd));
            let mut r2 = 1.0;
            for a in 0..g.d {
                r2 += g.coord(ix[a]).powi(2) + g.freq(ik[a]).powi(2);
            }
            v.norm() / r2.sqrt().powi(k as i32)
        })
        .fold(0.0, f64::max)
}

/// Anything that can report `|V_phi u|` at arbitrary phase-space points.
pub trait MagnitudeSource: Sync {
    /// Dimension of the underlying signal.
    fn dim(&self) -> usize;
    fn grid(&self) -> Grid;
    fn magnitude(&self, x: &[f64], xi: &[f64]) -> f64;
    /// Cauchy-Schwarz bound `(2 pi)^(-d/2) ||u|| ||phi||` on `|V_phi u|`.
    fn cs_bound(&self) -> f64;
}

/// A full lattice field together with the norm of the analysed signal.
pub struct InterpolatedField<'a> {
    pub field: &'a StftField,
    pub signal_norm: f64,
}

impl MagnitudeSource for InterpolatedField<'_> {
    fn dim(&self) -> usize {
        self.field.grid.d
    }
    fn grid(&self) -> Grid {
        self.field.grid
    }
    fn magnitude(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.field.magnitude_interp(x, xi)
    }
    fn cs_bound(&self) -> f64 {
        TWO_PI.powf(-(self.field.grid.d as f64) / 2.0) * self.signal_norm
    }
}

/// Direct quadrature of `V_phi u` at single points.
///
/// Sums only over the numerical support of the Gaussian (periodic wrap), so a
/// point costs `O((sigma / h)^d)` instead of a full field of size `n^2d`.
pub struct PointStft<'a> {
    u: &'a Signal,
    sigma: f64,
    amp: f64,
    half: usize,
    norm: f64,
}

impl<'a> PointStft<'a> {
    pub fn new(u: &'a Signal, phi: &Window) -> Result<Self> {
        check_grids(&u.grid, &phi.grid)?;
        let g = u.grid;
        let amp = (std::f64::consts::PI.powf(-0.25) * phi.sigma.powf(-0.5)) * phi.renorm.powf(1.0 / g.d as f64);
        let half = ((WINDOW_CUTOFF * phi.sigma / g.h()).ceil() as usize).min(g.n / 2);
        Ok(PointStft { u, sigma: phi.sigma, amp, half, norm: u.norm() })
    }

    /// Window-times-phase factors `phi(y_j - x) exp(-i y_j xi)` for `j` in the support.
    fn axis_factors(&self, x: f64, xi: f64, out: &mut Vec<(usize, Complex64)>) {
        let g = self.u.grid;
        let h = g.h();
        let n = g.n as i64;
        let j0 = ((x + g.l) / h).round() as i64;
        let start = j0 - self.half as i64;
        let y0 = -g.l + start as f64 * h;
        let a = y0 - x;
        let s2 = 2.0 * self.sigma * self.sigma;
        let mut w = (-a * a / s2).exp();
        let mut r = (-(2.0 * a * h + h * h) / s2).exp();
        let q = (-2.0 * h * h / s2).exp();
        let mut p = Complex64::from_polar(1.0, -(y0 * xi).rem_euclid(TWO_PI));
        let step = Complex64::from_polar(1.0, -h * xi);
        out.clear();
        for j in start..=(j0 + self.half as i64) {
            out.push(((j.rem_euclid(n)) as usize, p * (w * self.amp)));
            w *= r;
            r *= q;
            p *= step;
        }
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let g = self.u.grid;
        let c = TWO_PI.powf(-(g.d as f64) / 2.0) * g.cell();
        let mut fa = Vec::with_capacity(2 * self.half + 1);
        self.axis_factors(x[0], xi[0], &mut fa);
        match g.d {
            1 => fa.iter().map(|(j, f)| self.u.values[*j] * f).sum::<Complex64>() * c,
            _ => {
                let mut fb = Vec::with_capacity(2 * self.half + 1);
                self.axis_factors(x[1], xi[1], &mut fb);
                let n = g.n;
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, a) in &fa {
                    let row = &self.u.values[j * n..(j + 1) * n];
                    let inner: Complex64 = fb.iter().map(|(k, b)| row[*k] * b).sum();
                    acc += inner * a;
                }
                acc * c
            }
        }
    }
}

impl MagnitudeSource for PointStft<'_> {
    fn dim(&self) -> usize {
        self.u.grid.d
    }
    fn grid(&self) -> Grid {
        self.u.grid
    }
    fn magnitude(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.eval(x, xi).norm()
    }
    fn cs_bound(&self) -> f64 {
        TWO_PI.powf(-(self.u.grid.d as f64) / 2.0) * self.norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gaussian, hermite};

    #[test]
    fn window_is_normalized() {
        for (d, n, l) in [(1, 1024, 12.0), (2, 32, 6.0)] {
            let g = Grid::new(d, n, l).unwrap();
            let w = gaussian_window(g);
            assert!((w.l2_norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn point_evaluator_matches_lattice_field() {
        let g = Grid::new(1, 256, 10.0).unwrap();
        let u = hermite(g, 3);
        let w = gaussian_window(g);
        let field = stft(&u, &w).unwrap();
        let p = PointStft::new(&u, &w).unwrap();
        for (ix, ik) in [(128, 128), (100, 140), (3, 250), (255, 0)] {
            let direct = p.eval(&[g.coord(ix)], &[g.freq(ik)]);
            assert!((direct - field.at(ix, ik)).norm() < 1e-12, "{ix} {ik}");
        }
    }

    #[test]
    fn point_evaluator_matches_lattice_field_2d() {
        let g = Grid::new(2, 32, 6.0).unwrap();
        let u = hermite(g, 1);
        let w = gaussian_window(g);
        let field = stft(&u, &w).unwrap();
        let p = PointStft::new(&u, &w).unwrap();
        for (ix, ik) in [(0usize, 0usize), (17 * 32 + 3, 5 * 32 + 20), (1023, 511)] {
            let a = g.unflatten(ix);
            let b = g.unflatten(ik);
            let direct = p.eval(&[g.coord(a[0]), g.coord(a[1])], &[g.freq(b[0]), g.freq(b[1])]);
            assert!((direct - field.at(ix, ik)).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_is_exact_on_lattice() {
        let g = Grid::new(1, 64, 6.0).unwrap();
        let u = gaussian(g);
        let field = stft(&u, &gaussian_window(g)).unwrap();
        let v = field.magnitude_interp(&[g.coord(20)], &[g.freq(40)]);
        assert!((v - field.at(20, 40).norm()).abs() < 1e-14);
    }

    #[test]
    fn zero_signal_gives_zero_field() {
        let g = Grid::new(1, 64, 6.0).unwrap();
        let field = stft(&Signal::zeros(g), &gaussian_window(g)).unwrap();
        assert_eq!(field.max_abs(), 0.0);
    }

    #[test]
    fn grid_mismatch_is_usage_error() {
        let g = Grid::new(1, 64, 6.0).unwrap();
        let g2 = Grid::new(1, 64, 7.0).unwrap();
        assert!(matches!(stft(&gaussian(g), &gaussian_window(g2)), Err(Error::Usage(_))));
    }
}
