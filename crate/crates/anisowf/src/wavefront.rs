//! Discrete anisotropic Gabor wave front sets.
//!
//! For a direction `z = (x, xi)` on the unit sphere the estimator follows the
//! curve `lambda -> (lambda x, lambda^s xi)` through the phase-space box the
//! grid resolves, records the sup of `|V_phi u|` over an angular ball of
//! directions at every scale of a geometric ladder, and fits the decay
//! exponent of that sup over the last octave before it reaches the numerical
//! noise floor (or leaves the box). Directions whose exponent is above the
//! threshold are classified as belonging to the wave front set.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::angle_between;
use crate::regression::log_log_fit;
use crate::signal::Signal;
use crate::sphere::{circle_mesh, fibonacci_s3, neighbours, s3_spacing};
use crate::stft::{MagnitudeSource, PointStft, Window};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    /// Mesh size: angles on `S^1` for d = 1, Fibonacci points on `S^3` for d = 2.
    pub n_dirs: usize,
    pub lambda_min: f64,
    /// Optional cap on the ladder in addition to the box.
    pub lambda_max: Option<f64>,
    /// Multiplies the whole ladder; classifications should not depend on it.
    pub ladder_scale: f64,
    pub per_octave: usize,
    /// Radius of the direction ball, in mesh cells.
    pub eps_cells: f64,
    /// Classify as "in WF" when the fitted exponent exceeds this.
    pub threshold: f64,
    /// The fit uses scales in `[lambda_cut / fit_ratio, lambda_cut]`.
    pub fit_ratio: f64,
    /// Box `|x_j| <= x_lim` (default `0.75 L`).
    pub x_lim: Option<f64>,
    /// Box `|xi_j| <= xi_lim` (default half the resolved band).
    pub xi_lim: Option<f64>,
    /// Phase-space spacing of the samples taken along each scale curve (d = 1).
    pub arc_step: f64,
    pub window_sigma: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            n_dirs: 720,
            lambda_min: 1.0,
            lambda_max: None,
            ladder_scale: 1.0,
            per_octave: 8,
            eps_cells: 2.0,
            threshold: -8.0,
            fit_ratio: 2.0,
            x_lim: None,
            xi_lim: None,
            arc_step: 1.0,
            window_sigma: 1.0,
        }
    }
}

impl ScanConfig {
    pub fn default_for_dim(d: usize) -> Self {
        if d == 1 {
            ScanConfig::default()
        } else {
            ScanConfig { n_dirs: 4096, ..ScanConfig::default() }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.n_dirs >= 8
            && self.lambda_min > 0.0
            && self.ladder_scale > 0.0
            && self.per_octave >= 1
            && self.eps_cells >= 0.0
            && self.fit_ratio > 1.0
            && self.arc_step > 0.0
            && self.window_sigma > 0.0
            && self.threshold.is_finite();
        if !ok {
            return Err(Error::Config(format!("invalid scan configuration {self:?}")));
        }
        Ok(())
    }
}

fn ser_slope<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_slope<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
}

/// Decay record of one direction. A slope of `-inf` (serialized as `null`)
/// means the magnitude was already at the noise floor at the smallest scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub dir: Vec<f64>,
    #[serde(serialize_with = "ser_slope", deserialize_with = "de_slope")]
    pub slope: f64,
    pub r2: f64,
    pub classified: bool,
    #[serde(skip)]
    pub lambdas: Vec<f64>,
    #[serde(skip)]
    pub magnitudes: Vec<f64>,
}

impl DecayProfile {
    pub fn marked(dir: Vec<f64>, slope: f64, threshold: f64) -> Self {
        DecayProfile { dir, slope, r2: 1.0, classified: slope > threshold, lambdas: vec![], magnitudes: vec![] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    pub s: f64,
    pub threshold: f64,
    pub entries: Vec<DecayProfile>,
}

impl DirectionSet {
    pub fn classified(&self) -> impl Iterator<Item = &DecayProfile> {
        self.entries.iter().filter(|e| e.classified)
    }

    pub fn classified_dirs(&self) -> Vec<Vec<f64>> {
        self.classified().map(|e| e.dir.clone()).collect()
    }

    pub fn max_slope(&self) -> f64 {
        self.entries.iter().map(|e| e.slope).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Re-apply a threshold to the stored slopes.
    pub fn rethreshold(&self, threshold: f64) -> DirectionSet {
        let entries =
            self.entries.iter().map(|e| DecayProfile { classified: e.slope > threshold, ..e.clone() }).collect();
        DirectionSet { s: self.s, threshold, entries }
    }

    /// `true` when every `classified` flag equals `slope > threshold`.
    pub fn is_consistent(&self) -> bool {
        self.entries.iter().all(|e| e.classified == (e.slope > self.threshold))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let dim = self.entries.first().map_or(2, |e| e.dir.len());
        let d = dim / 2;
        let mut head: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        head.extend((0..d).map(|i| format!("xi{i}")));
        if dim == 2 {
            head.push("angle_deg".into());
        }
        head.extend(["slope".into(), "r2".into(), "classified".into()]);
        out.push_str(&head.join(","));
        out.push('\n');
        for e in &self.entries {
            let mut row: Vec<String> = e.dir.iter().map(|v| format!("{v:.12}")).collect();
            if dim == 2 {
                row.push(format!("{:.6}", e.dir[1].atan2(e.dir[0]).to_degrees()));
            }
            row.push(if e.slope.is_finite() { format!("{:.6}", e.slope) } else { "-inf".into() });
            row.push(format!("{:.6}", e.r2));
            row.push((e.classified as u8).to_string());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Phase-space box the ladder has to stay in.
#[derive(Clone, Copy, Debug)]
pub enum ScanBox {
    /// `|x_j| <= x_lim`, `|xi_j| <= xi_lim`.
    Coordinates { x_lim: f64, xi_lim: f64 },
    /// Kernels on `R^2`: `|x_1 - x_2| <= diff_lim`, `|xi_j| <= xi_lim` (positions are periodic).
    KernelDiagonal { diff_lim: f64, xi_lim: f64 },
}

impl ScanBox {
    fn contains(&self, x: &[f64], xi: &[f64]) -> bool {
        match *self {
            ScanBox::Coordinates { x_lim, xi_lim } => {
                x.iter().all(|v| v.abs() <= x_lim) && xi.iter().all(|v| v.abs() <= xi_lim)
            }
            ScanBox::KernelDiagonal { diff_lim, xi_lim } => {
                (x[0] - x[1]).abs() <= diff_lim && xi.iter().all(|v| v.abs() <= xi_lim)
            }
        }
    }

    /// Largest `lambda` with `(lambda x, lambda^s xi)` in the box.
    fn exit(&self, dir: &[f64], s: f64) -> f64 {
        let d = dir.len() / 2;
        let (x, xi) = dir.split_at(d);
        let xi_exit = |xi_lim: f64| {
            xi.iter()
                .filter(|v| v.abs() > 0.0)
                .map(|v| ((xi_lim.ln() - v.abs().ln()) / s).exp())
                .fold(f64::INFINITY, f64::min)
        };
        match *self {
            ScanBox::Coordinates { x_lim, xi_lim } => {
                let xe = x.iter().filter(|v| v.abs() > 0.0).map(|v| x_lim / v.abs()).fold(f64::INFINITY, f64::min);
                xe.min(xi_exit(xi_lim))
            }
            ScanBox::KernelDiagonal { diff_lim, xi_lim } => {
                let diff = (x[0] - x[1]).abs();
                let xe = if diff > 0.0 { diff_lim / diff } else { f64::INFINITY };
                xe.min(xi_exit(xi_lim))
            }
        }
    }
}

/// Default box for a signal grid: `0.75 L` in space, half the band in frequency.
pub fn default_box(src: &dyn MagnitudeSource, scan: &ScanConfig) -> ScanBox {
    let g = src.grid();
    ScanBox::Coordinates { x_lim: scan.x_lim.unwrap_or(0.75 * g.l), xi_lim: scan.xi_lim.unwrap_or(0.5 * g.band()) }
}

/// Noise floor for `|V_phi u|`: roundoff of FFT-synthesized data scales like `eps sqrt(N)`.
pub fn noise_floor(src: &dyn MagnitudeSource) -> f64 {
    let n = src.grid().len() as f64;
    (1e-14f64).max(16.0 * f64::EPSILON * n.sqrt()) * src.cs_bound()
}

/// Estimate the wave front set of a signal with the Gaussian window of the configured width.
pub fn estimate_wf(u: &Signal, s: f64, scan: &ScanConfig) -> Result<DirectionSet> {
    let phi = Window::gaussian(u.grid, scan.window_sigma)?;
    estimate_wf_window(u, &phi, s, scan)
}

pub fn estimate_wf_window(u: &Signal, phi: &Window, s: f64, scan: &ScanConfig) -> Result<DirectionSet> {
    let src = PointStft::new(u, phi)?;
    let bx = default_box(&src, scan);
    estimate_with(&src, s, scan, bx)
}

/// Estimator over an arbitrary magnitude source and scan box.
pub fn estimate_with(src: &dyn MagnitudeSource, s: f64, scan: &ScanConfig, bx: ScanBox) -> Result<DirectionSet> {
    scan.validate()?;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Domain(format!("anisotropy parameter must be positive, got {s}")));
    }
    let g = src.grid();
    let (ScanBox::Coordinates { x_lim, xi_lim } | ScanBox::KernelDiagonal { diff_lim: x_lim, xi_lim }) = bx;
    if !(x_lim > 0.0 && xi_lim > 0.0) || xi_lim > g.band() {
        return Err(Error::Config(format!(
            "scan box (x {x_lim}, xi {xi_lim}) must be positive and inside the band {}",
            g.band()
        )));
    }
    let mesh = if src.dim() == 1 { circle_mesh(scan.n_dirs) } else { fibonacci_s3(scan.n_dirs) };
    let lam0 = scan.lambda_min * scan.ladder_scale;
    let cap = scan.lambda_max.map_or(f64::INFINITY, |m| m * scan.ladder_scale);
    let exits: Vec<f64> = mesh.iter().map(|z| bx.exit(z, s).min(cap)).collect();
    let step = 2f64.powf(1.0 / scan.per_octave as f64);
    for (z, e) in mesh.iter().zip(&exits) {
        if *e < lam0 * step {
            return Err(Error::Config(format!(
                "direction {z:?} leaves the resolved box at lambda = {e:.4}, before two ladder scales"
            )));
        }
    }
    let top = exits.iter().copied().fold(0.0, f64::max);
    let n_levels = ((top / lam0).ln() / step.ln() + 1e-9).floor() as usize + 1;
    let lambdas: Vec<f64> = (0..n_levels).map(|k| lam0 * step.powi(k as i32)).collect();
    let last_valid: Vec<usize> =
        exits.iter().map(|e| lambdas.iter().rposition(|l| *l <= e * (1.0 + 1e-12)).unwrap_or(0)).collect();

    let ball = if src.dim() == 1 {
        arc_ball_sup(src, s, scan, bx, &lambdas, &last_valid)
    } else {
        mesh_ball_sup(src, s, scan, &mesh, &lambdas, &last_valid)
    };

    let floor = noise_floor(src);
    let entries = mesh
        .into_iter()
        .enumerate()
        .map(|(i, dir)| {
            let lv = &lambdas[..=last_valid[i]];
            let mv = &ball[i][..=last_valid[i]];
            let (slope, r2, cut) = tail_fit(lv, mv, floor, scan.fit_ratio);
            DecayProfile {
                dir,
                slope,
                r2,
                classified: slope > scan.threshold,
                lambdas: lv[..=cut].to_vec(),
                magnitudes: mv[..=cut].to_vec(),
            }
        })
        .collect();
    Ok(DirectionSet { s, threshold: scan.threshold, entries })
}

/// Exponent of the last octave of the ladder before the floor: returns `(slope, r2, cut index)`.
pub fn tail_fit(lambdas: &[f64], mags: &[f64], floor: f64, fit_ratio: f64) -> (f64, f64, usize) {
    let cut = mags.iter().position(|m| *m <= floor).unwrap_or(mags.len() - 1);
    if cut == 0 {
        return (f64::NEG_INFINITY, 0.0, 0);
    }
    let lo_lam = lambdas[cut] / fit_ratio * (1.0 - 1e-12);
    let lo = lambdas.iter().position(|l| *l >= lo_lam).unwrap_or(0).min(cut - 1);
    let m: Vec<f64> = mags[lo..=cut].iter().map(|v| v.max(floor).max(f64::MIN_POSITIVE)).collect();
    match log_log_fit(&lambdas[lo..=cut], &m) {
        Some(f) => (f.slope, f.r2, cut),
        None => (f64::NEG_INFINITY, 0.0, cut),
    }
}

/// d = 1: at every scale sample the in-box part of the scale curve
/// `theta -> (lambda cos theta, lambda^s sin theta)` with phase-space spacing
/// `arc_step` (never coarser than the mesh), and give each mesh direction the
/// max over the samples within its angular ball.
fn arc_ball_sup(
    src: &dyn MagnitudeSource,
    s: f64,
    scan: &ScanConfig,
    bx: ScanBox,
    lambdas: &[f64],
    last_valid: &[usize],
) -> Vec<Vec<f64>> {
    let n = scan.n_dirs;
    let cell = 2.0 * std::f64::consts::PI / n as f64;
    let eps = scan.eps_cells * cell;
    let per_level: Vec<Vec<f64>> = lambdas
        .par_iter()
        .map(|&lam| {
            let ls = lam.powf(s);
            let mut samples = Vec::new();
            for c in 0..n {
                let end = (c + 1) as f64 * cell;
                let mut t = c as f64 * cell;
                while t < end {
                    let (x, xi) = (lam * t.cos(), ls * t.sin());
                    if bx.contains(&[x], &[xi]) {
                        samples.push((t, x, xi));
                    }
                    let speed = (lam * t.sin()).hypot(ls * t.cos());
                    t += scan.arc_step / speed.max(f64::MIN_POSITIVE);
                }
            }
            let mut best = vec![-1.0f64; n];
            for (t, x, xi) in samples {
                let m = src.magnitude(&[x], &[xi]);
                let lo = ((t - eps) / cell - 1e-9).ceil() as i64;
                let hi = ((t + eps) / cell + 1e-9).floor() as i64;
                for i in lo..=hi {
                    let idx = i.rem_euclid(n as i64) as usize;
                    if m > best[idx] {
                        best[idx] = m;
                    }
                }
            }
            best
        })
        .collect();
    (0..n).map(|i| (0..=last_valid[i]).map(|k| per_level[k][i].max(0.0)).collect()).collect()
}

/// d = 2: magnitudes at the mesh points themselves, maxed over mesh neighbourhoods.
fn mesh_ball_sup(
    src: &dyn MagnitudeSource,
    s: f64,
    scan: &ScanConfig,
    mesh: &[Vec<f64>],
    lambdas: &[f64],
    last_valid: &[usize],
) -> Vec<Vec<f64>> {
    let nb = neighbours(mesh, scan.eps_cells * s3_spacing(mesh.len()));
    let raw: Vec<Vec<f64>> = mesh
        .par_iter()
        .enumerate()
        .map(|(i, z)| {
            let d = z.len() / 2;
            (0..=last_valid[i])
                .map(|k| {
                    let lam = lambdas[k];
                    let ls = lam.powf(s);
                    let x: Vec<f64> = z[..d].iter().map(|v| v * lam).collect();
                    let xi: Vec<f64> = z[d..].iter().map(|v| v * ls).collect();
                    src.magnitude(&x, &xi)
                })
                .collect()
        })
        .collect();
    (0..mesh.len())
        .map(|i| {
            (0..=last_valid[i])
                .map(|k| nb[i].iter().filter(|&&j| k <= last_valid[j]).map(|&j| raw[j][k]).fold(0.0, f64::max))
                .collect()
        })
        .collect()
}

/// Symmetric angular Hausdorff distance in degrees between two sets of unit vectors.
///
/// Two empty sets are at distance 0; an empty and a nonempty set at infinity.
pub fn angular_hausdorff_deg(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let directed = |p: &[Vec<f64>], q: &[Vec<f64>]| {
        p.iter().map(|u| q.iter().map(|v| angle_between(u, v)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a)).to_degrees()
}

/// Largest angle (degrees) from a point of `a` to the nearest point of `b`.
pub fn directed_distance_deg(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return f64::INFINITY;
    }
    a.iter()
        .map(|u| b.iter().map(|v| angle_between(u, v)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        .to_degrees()
}
