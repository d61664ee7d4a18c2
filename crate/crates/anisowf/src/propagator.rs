//! Spectral solution of `d_t u + i p(D) u = 0`, its convolution and Schwartz
//! kernels, and operator application through the STFT quadrature formula.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::CenteredFft;
use crate::signal::{smooth_step_down, Grid, Signal};
use crate::stft::{istft, stft, Window};
use crate::symbols::PolySymbol;

/// Largest kernel (entries of the doubled grid) the kernel routes will allocate.
pub const KERNEL_MAX_ENTRIES: usize = 1 << 22;

#[derive(Clone, Debug)]
pub struct EvolutionProblem {
    pub symbol: PolySymbol,
    pub t: f64,
    pub u0: Signal,
}

impl EvolutionProblem {
    pub fn new(symbol: PolySymbol, t: f64, u0: Signal) -> Result<Self> {
        if symbol.d() != u0.grid.d {
            return Err(Error::Usage(format!(
                "symbol dimension {} does not match grid dimension {}",
                symbol.d(),
                u0.grid.d
            )));
        }
        if !t.is_finite() {
            return Err(Error::Usage("evolution time must be finite".into()));
        }
        Ok(EvolutionProblem { symbol, t, u0 })
    }
}

/// `exp(-i t p(xi_k))` on the centered frequency lattice (flat, row-major).
pub fn multiplier(symbol: &PolySymbol, t: f64, grid: Grid) -> Vec<Complex64> {
    (0..grid.len())
        .map(|idx| {
            let k = grid.unflatten(idx);
            let xi: Vec<f64> = k[..grid.d].iter().map(|&kk| grid.freq(kk)).collect();
            Complex64::from_polar(1.0, -t * symbol.eval_unchecked(&xi))
        })
        .collect()
}

fn apply_multiplier(u: &Signal, mult: &[Complex64]) -> Signal {
    let fft = CenteredFft::new(&u.grid);
    let mut data = u.values.clone();
    fft.forward(&mut data);
    let scale = 1.0 / u.grid.len() as f64;
    data.iter_mut().zip(mult).for_each(|(v, m)| *v *= m * scale);
    fft.inverse(&mut data);
    Signal { grid: u.grid, values: data }
}

/// `e^{-i t p(D)} u0 = F^-1(exp(-i t p) F u0)` on the grid.
pub fn evolve(prob: &EvolutionProblem) -> Result<Signal> {
    if prob.t == 0.0 {
        return Ok(prob.u0.clone());
    }
    Ok(apply_multiplier(&prob.u0, &multiplier(&prob.symbol, prob.t, prob.u0.grid)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    /// `||e^{itp} e^{-itp} u0 - u0|| / ||u0||`.
    pub roundtrip_rel_err: f64,
    /// `|<K_t u, v> - <u, K_{-t} v>| / (||u|| ||v||)`.
    pub adjoint_rel_err: f64,
}

/// Evolve forward and back, and compare `<K_t u0, v>` with `<u0, K_{-t} v>`.
pub fn evolve_adjoint_roundtrip(prob: &EvolutionProblem, v: &Signal) -> Result<RoundtripReport> {
    let fwd = evolve(prob)?;
    let back = evolve(&EvolutionProblem { u0: fwd.clone(), t: -prob.t, ..prob.clone() })?;
    let scale = prob.u0.norm().max(f64::MIN_POSITIVE);
    let roundtrip_rel_err = back.sub(&prob.u0).norm() / scale;
    let kv = evolve(&EvolutionProblem { u0: v.clone(), t: -prob.t, ..prob.clone() })?;
    let lhs = fwd.inner(v);
    let rhs = prob.u0.inner(&kv);
    let adjoint_rel_err = (lhs - rhs).norm() / (scale * v.norm().max(f64::MIN_POSITIVE));
    Ok(RoundtripReport { roundtrip_rel_err, adjoint_rel_err })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportEstimate {
    /// `|t| max |grad p|` over the frequencies where the data live.
    pub displacement: f64,
    /// Largest admissible displacement, `L / 4`.
    pub limit: f64,
    /// Radius of the resolved band used for the estimate.
    pub resolved_band: f64,
}

impl TransportEstimate {
    pub fn ok(&self) -> bool {
        self.displacement <= self.limit
    }
}

/// Spectral support threshold relative to the spectrum's peak.
const SUPPORT_REL: f64 = 1e-10;

/// `|t| max |grad p(xi)|` over the lattice frequencies carrying spectral mass of `u0`.
pub fn transport_estimate(symbol: &PolySymbol, t: f64, u0: &Signal) -> TransportEstimate {
    let g = u0.grid;
    let spec = u0.spectrum();
    let peak = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut disp = 0.0f64;
    let mut band = 0.0f64;
    for (idx, v) in spec.iter().enumerate() {
        if v.norm() <= SUPPORT_REL * peak {
            continue;
        }
        let k = g.unflatten(idx);
        let xi: Vec<f64> = k[..g.d].iter().map(|&kk| g.freq(kk)).collect();
        band = band.max(xi.iter().map(|a| a.abs()).fold(0.0, f64::max));
        let grad = symbol.gradient(&xi).expect("matching dimension");
        disp = disp.max(t.abs() * grad.iter().map(|a| a * a).sum::<f64>().sqrt());
    }
    TransportEstimate { displacement: disp, limit: 0.25 * g.l, resolved_band: band }
}

/// Sampled Schwartz kernel `K_t(x, y) = k_t(x - y)` on the doubled grid of a one-dimensional problem.
#[derive(Clone, Debug)]
pub struct KernelSignal {
    pub kernel: Signal,
    /// `k_t` on the base grid (index `n/2` is the origin).
    pub k: Signal,
    /// Max difference between the FFT route and the direct `(1 ⊗ k_t) o kappa^-1` route, relative to max |K|.
    pub routes_rel_diff: f64,
}

/// `kappa(x, y) = (x + y/2, x - y/2)`.
pub fn kappa(x: f64, y: f64) -> (f64, f64) {
    (x + 0.5 * y, x - 0.5 * y)
}

/// `kappa^-1(a, b) = ((a + b)/2, a - b)`.
pub fn kappa_inv(a: f64, b: f64) -> (f64, f64) {
    (0.5 * (a + b), a - b)
}

/// `k_t = (2 pi)^(-1/2) F^-1(exp(-i t p))` and `K_t`, verifying two independent constructions.
pub fn build_kernel(symbol: &PolySymbol, t: f64, grid: Grid) -> Result<KernelSignal> {
    build_kernel_banded(symbol, t, grid, None)
}

/// As [`build_kernel`], optionally with the multiplier cut off smoothly between `2B/3` and `B`.
///
/// The cutoff keeps the chirp-like `k_t` from wrapping around the periodic box,
/// which is what wave-front diagnostics of the kernel need.
pub fn build_kernel_banded(symbol: &PolySymbol, t: f64, grid: Grid, band: Option<f64>) -> Result<KernelSignal> {
    if grid.d != 1 || symbol.d() != 1 {
        return Err(Error::Usage("kernels are built for one-dimensional problems".into()));
    }
    if grid.n * grid.n > KERNEL_MAX_ENTRIES {
        return Err(Error::Config(format!(
            "kernel on n = {} needs {} entries, above the limit {}",
            grid.n,
            grid.n * grid.n,
            KERNEL_MAX_ENTRIES
        )));
    }
    let n = grid.n;
    let freqs = grid.freqs();
    let spec: Vec<Complex64> = freqs
        .iter()
        .map(|&xi| {
            let cut = band.map_or(1.0, |b| smooth_step_down((xi.abs() - 2.0 * b / 3.0) / (b / 3.0)));
            Complex64::from_polar(cut, -t * symbol.eval_unchecked(&[xi]))
        })
        .collect();
    let c = (2.0 * std::f64::consts::PI).powf(-0.5);
    let k = Signal::from_spectrum(grid, &spec).scaled(Complex64::new(c, 0.0));

    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = k.values[(i + n + n / 2 - j) % n];
        }
    }
    let kernel = Signal::new(grid.doubled()?, values)?;

    // second route: direct frequency sums evaluated at the second component of kappa^-1
    let dxi = grid.dxi();
    let direct = |v: f64| -> Complex64 {
        freqs.iter().zip(&spec).map(|(&xi, m)| m * Complex64::from_polar(1.0, v * xi)).sum::<Complex64>() * dxi
            / (2.0 * std::f64::consts::PI)
    };
    let table: Vec<Complex64> = (0..n).into_par_iter().map(|idx| direct(grid.coord(idx))).collect();
    let peak = kernel.max_abs().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (_, b) = kappa_inv(grid.coord(i), grid.coord(j));
            let wrapped = ((b + grid.l) / grid.h()).round() as i64;
            let idx = wrapped.rem_euclid(n as i64) as usize;
            worst = worst.max((table[idx] - kernel.values[i * n + j]).norm());
        }
    }
    Ok(KernelSignal { kernel, k, routes_rel_diff: worst / peak })
}

/// `(K u)(x) = h sum_y K(x, y) u(y)`.
pub fn apply_kernel(k: &Signal, u: &Signal) -> Result<Signal> {
    if k.grid.d != 2 || u.grid.d != 1 || k.grid.n != u.grid.n || k.grid.l != u.grid.l {
        return Err(Error::Usage("kernel and signal grids do not match".into()));
    }
    let n = u.grid.n;
    let h = u.grid.h();
    let values = (0..n)
        .into_par_iter()
        .map(|i| k.values[i * n..(i + 1) * n].iter().zip(&u.values).map(|(a, b)| a * b).sum::<Complex64>() * h)
        .collect();
    Ok(Signal { grid: u.grid, values })
}

#[derive(Clone, Debug)]
pub struct StftPairings {
    /// `(K u, psi)` for each test function, from the phase-space quadrature.
    pub pairings: Vec<Complex64>,
    /// `K u` synthesized through the same quadrature.
    pub synthesized: Signal,
}

/// `(K u, psi) = int V_Phi K(x, y, xi, -eta) conj(V_phi psi(x, xi)) V_{conj phi} u(y, eta)` by Riemann quadrature.
///
/// The 4-D lattice sum factorizes exactly: summing `V_{conj phi} u` against
/// the `(y, eta)` window atoms and `conj(V_phi psi)` against the `(x, xi)`
/// atoms are STFT syntheses, after which only the kernel contraction over
/// `(x', y')` remains. This is a reordering of the same finite sum, at cost
/// `O(n^2 log n)` instead of `O(n^4)`.
pub fn apply_via_stft(k: &Signal, u: &Signal, phi: &Window, tests: &[Signal]) -> Result<StftPairings> {
    if (phi.l2_norm - 1.0).abs() > 1e-10 {
        return Err(Error::Usage(format!("window norm is {}, expected 1", phi.l2_norm)));
    }
    if phi.grid != u.grid || k.grid.d != 2 || k.grid.n != u.grid.n || k.grid.l != u.grid.l {
        return Err(Error::Usage("kernel, signal and window grids do not match".into()));
    }
    let phibar = phi.conj();
    let u_syn = istft(&stft(u, &phibar)?, &phibar)?;
    let ku = apply_kernel(k, &u_syn)?;
    let pairings = tests
        .iter()
        .map(|psi| {
            if psi.grid != u.grid {
                return Err(Error::Usage("test function grid mismatch".into()));
            }
            let psi_syn = istft(&stft(psi, phi)?, phi)?;
            Ok(ku.inner(&psi_syn))
        })
        .collect::<Result<Vec<_>>>()?;
    let synthesized = istft(&stft(&ku, phi)?, phi)?;
    Ok(StftPairings { pairings, synthesized })
}

/// The literal 4-D lattice sum of [`apply_via_stft`] for one test function (small grids only).
pub fn apply_via_stft_bruteforce(k: &Signal, u: &Signal, phi: &Window, psi: &Signal) -> Result<Complex64> {
    let g = u.grid;
    let n = g.n;
    if n > 32 {
        return Err(Error::Config("brute-force phase-space quadrature is limited to n <= 32".into()));
    }
    let g2 = k.grid;
    let phi2 = Window::gaussian(g2, phi.sigma)?;
    let vk = stft(k, &phi2)?;
    let vpsi = stft(psi, phi)?;
    let vu = stft(u, &phi.conj())?;
    let neg = |kk: usize| (n - kk) % n;
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            for xi in 0..n {
                for eta in 0..n {
                    let a = vk.at(x * n + y, xi * n + neg(eta));
                    acc += a * vpsi.at(x, xi).conj() * vu.at(y, eta);
                }
            }
        }
    }
    Ok(acc * (g.h() * g.dxi()).powi(2))
}
