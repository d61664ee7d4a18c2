//! Reproducible experiment runs: JSON specs in, signals, direction sets and
//! reports out. Each `cmd_*` function backs one subcommand of the binary.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{read_signal, signal_csv, write_signal};
use crate::geometry::{lambda_s, project_concat, project_s};
use crate::propagator::{build_kernel_banded, evolve, transport_estimate, EvolutionProblem, TransportEstimate};
use crate::relation::{compose, estimate_wf_kernel, graph_condition, GraphConditionReport, WfRelation};
use crate::signal::{gaussian, hermite, impulse, poly_chirp, Grid, Signal};
use crate::stft::Window;
use crate::symbols::{FlowMap, PolySymbol};
use crate::wavefront::{
    angular_hausdorff_deg, directed_distance_deg, estimate_wf, DecayProfile, DirectionSet, ScanConfig,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Gaussian,
    Hermite { k: usize },
    PolyChirp { c: f64, m: u32 },
    Impulse { band: f64 },
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSpec {
    pub symbol: PolySymbol,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    /// Smooth frequency cutoff of the multiplier, as a fraction of the grid band.
    #[serde(default = "default_band_fraction")]
    pub band_fraction: f64,
    #[serde(default = "default_axis_tol")]
    pub axis_tol_deg: f64,
}

fn default_band_fraction() -> f64 {
    0.6
}

/// Kernel scans: a finer S^3 mesh with a one-cell ball, and a wider window,
/// which balances the short frequency side of the box against the long `x - y` side.
pub fn kernel_scan_defaults() -> ScanConfig {
    ScanConfig { n_dirs: 8192, eps_cells: 1.0, window_sigma: 2.2, ..ScanConfig::default_for_dim(2) }
}

fn default_axis_tol() -> f64 {
    10.0
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec { band_fraction: default_band_fraction(), axis_tol_deg: default_axis_tol() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeSpec {
    pub relation: PathBuf,
    pub set: PathBuf,
    /// Optional direction set that should lie inside the composition (e.g. the evolved estimate).
    #[serde(default)]
    pub expected: Option<PathBuf>,
}

fn default_grid() -> Grid {
    Grid { d: 1, n: 1024, l: 12.0 }
}

fn default_tolerance() -> f64 {
    5.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default = "default_signal")]
    pub signal: Generator,
    #[serde(default = "default_grid")]
    pub grid: Grid,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub evolution: Option<EvolutionSpec>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub compose: Option<ComposeSpec>,
    #[serde(default = "default_tolerance")]
    pub tolerance_deg: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_signal() -> Generator {
    Generator::Gaussian
}

fn default_s() -> f64 {
    1.0
}

/// Command-line overrides applied on top of a spec file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub s: Option<f64>,
    pub tolerance_deg: Option<f64>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid experiment spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = Self::from_json(&text)?;
        // relative data paths are resolved against the spec's directory
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Generator::File { path } = &mut spec.signal {
            fix(path);
        }
        if let Some(c) = &mut spec.compose {
            fix(&mut c.relation);
            fix(&mut c.set);
            if let Some(e) = &mut c.expected {
                fix(e);
            }
        }
        Ok(spec)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        if let Some(n) = o.grid_n {
            self.grid.n = n;
        }
        if let Some(l) = o.grid_l {
            self.grid.l = l;
        }
        if let Some(s) = o.s {
            self.s = s;
        }
        if let Some(t) = o.tolerance_deg {
            self.tolerance_deg = t;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::Config(format!("s must be positive, got {}", self.s)));
        }
        if !(self.tolerance_deg.is_finite() && self.tolerance_deg > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance_deg)));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("experiment name {:?} is not a plain file stem", self.name)));
        }
        match &self.signal {
            Generator::Hermite { k } if *k > 60 => {
                return Err(Error::Config(format!("hermite order must be at most 60, got {k}")))
            }
            Generator::PolyChirp { c, m } if !c.is_finite() || *c == 0.0 || !(2..=12).contains(m) => {
                return Err(Error::Config(format!("chirp needs c != 0 and 2 <= m <= 12, got c = {c}, m = {m}")))
            }
            Generator::Impulse { band } if !(*band > 0.0 && *band <= self.grid.band()) => {
                return Err(Error::Config(format!("impulse band must lie in (0, {}], got {band}", self.grid.band())))
            }
            _ => {}
        }
        Ok(())
    }

    /// Scan settings: explicit ones, else defaults adapted to the generator.
    ///
    /// Chirps are only clean inside `|x| <= L/2`, so their box stops short of
    /// the taper; impulses are scanned inside their passband.
    pub fn scan_config(&self) -> ScanConfig {
        if let Some(s) = &self.scan {
            return s.clone();
        }
        let mut sc = ScanConfig::default_for_dim(self.grid.d);
        match self.signal {
            Generator::PolyChirp { .. } => sc.x_lim = Some(0.45 * self.grid.l),
            Generator::Impulse { band } => {
                sc.x_lim = Some(0.45 * self.grid.l);
                sc.xi_lim = Some(0.95 * 2.0 * band / 3.0);
            }
            _ => {}
        }
        sc
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

pub fn generate_signal(spec: &ExperimentSpec) -> Result<Signal> {
    spec.validate()?;
    let g = spec.grid;
    match &spec.signal {
        Generator::Gaussian => Ok(gaussian(g)),
        Generator::Hermite { k } => Ok(hermite(g, *k)),
        Generator::PolyChirp { c, m } => poly_chirp(g, *c, *m),
        Generator::Impulse { band } => impulse(g, *band),
        Generator::File { path } => read_signal(path),
    }
}

/// Outcome of a subcommand, mapped to the process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Measurements written, nothing asserted.
    Report,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass | Outcome::Report => 0,
            Outcome::Fail => 1,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

pub fn cmd_generate(spec: &ExperimentSpec) -> Result<(Outcome, Signal)> {
    let u = generate_signal(spec)?;
    let dir = spec.out_dir();
    ensure_dir(&dir)?;
    write_signal(&dir.join(format!("{}.angb", spec.name)), &u)?;
    write_text(&dir.join(format!("{}.csv", spec.name)), &signal_csv(&u))?;
    Ok((Outcome::Report, u))
}

pub fn cmd_analyze(spec: &ExperimentSpec) -> Result<(Outcome, DirectionSet)> {
    let u = generate_signal(spec)?;
    let set = estimate_wf(&u, spec.s, &spec.scan_config())?;
    let dir = spec.out_dir();
    ensure_dir(&dir)?;
    write_json(&dir.join(format!("{}_wf.json", spec.name)), &set)?;
    write_text(&dir.join(format!("{}_wf.csv", spec.name)), &set.to_csv())?;
    Ok((Outcome::Report, set))
}

fn evolution(spec: &ExperimentSpec) -> Result<&EvolutionSpec> {
    spec.evolution.as_ref().ok_or_else(|| Error::Config("spec has no \"evolution\" block".into()))
}

fn checked_problem(spec: &ExperimentSpec, u0: Signal) -> Result<(EvolutionProblem, TransportEstimate)> {
    let ev = evolution(spec)?;
    let prob = EvolutionProblem::new(ev.symbol.clone(), ev.t, u0)?;
    let tr = transport_estimate(&prob.symbol, prob.t, &prob.u0);
    if !tr.ok() {
        return Err(Error::Config(format!(
            "transport estimate {:.4} exceeds L/4 = {:.4}; the solution would leave the grid",
            tr.displacement, tr.limit
        )));
    }
    Ok((prob, tr))
}

pub fn cmd_evolve(spec: &ExperimentSpec) -> Result<(Outcome, Signal)> {
    let u0 = generate_signal(spec)?;
    let (prob, _) = checked_problem(spec, u0)?;
    let ut = evolve(&prob)?;
    let dir = spec.out_dir();
    ensure_dir(&dir)?;
    write_signal(&dir.join(format!("{}_evolved.angb", spec.name)), &ut)?;
    Ok((Outcome::Report, ut))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMode {
    /// `s = 1/(m-1)`: the wave front set moves with the Hamiltonian flow.
    Flow,
    /// `s < 1/(m-1)`: the wave front set is invariant.
    Invariance,
}

pub fn propagation_mode(symbol: &PolySymbol, s: f64) -> Result<PropagationMode> {
    let crit = symbol.critical_s();
    if (s - crit).abs() <= 1e-9 * crit {
        Ok(PropagationMode::Flow)
    } else if s < crit {
        Ok(PropagationMode::Invariance)
    } else {
        Err(Error::Config(format!("s = {s} exceeds 1/(m-1) = {crit}; propagation is not determined in that regime")))
    }
}

/// `pi_s o chi_t` (flow mode) or the identity (invariance mode) applied to the classified directions.
pub fn transport_set(initial: &DirectionSet, chi: &FlowMap, mode: PropagationMode) -> Result<DirectionSet> {
    let s = initial.s;
    let entries = initial
        .classified()
        .map(|e| {
            let dir = match mode {
                PropagationMode::Invariance => e.dir.clone(),
                PropagationMode::Flow => {
                    let z = crate::geometry::PhasePoint::from_concat(&e.dir)?;
                    chi.apply(&z)?.project(s)?.to_concat()
                }
            };
            Ok(DecayProfile { dir, ..e.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectionSet { s, threshold: initial.threshold, entries })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub name: String,
    pub mode: PropagationMode,
    pub s: f64,
    pub m: u32,
    pub t: f64,
    pub transport: TransportEstimate,
    /// Fraction of spectral mass above half the band (should be at most `1e-10`).
    pub high_frequency_mass: f64,
    pub initial: DirectionSet,
    pub evolved: DirectionSet,
    pub transported: DirectionSet,
    pub hausdorff_deg: Option<f64>,
    pub tolerance_deg: f64,
    pub pass: bool,
}

impl PropagationReport {
    /// Recompute the pass flag from the serialized sets.
    pub fn recompute_pass(&self) -> bool {
        let h = angular_hausdorff_deg(&self.evolved.classified_dirs(), &self.transported.classified_dirs());
        h <= self.tolerance_deg
    }
}

/// Analyze `u0`, evolve, analyze `u(t)`, transport the initial set, compare.
pub fn verify_propagation(spec: &ExperimentSpec, u0: Signal) -> Result<PropagationReport> {
    spec.validate()?;
    let ev = evolution(spec)?.clone();
    let mode = propagation_mode(&ev.symbol, spec.s)?;
    let (prob, transport) = checked_problem(spec, u0)?;
    let scan = spec.scan_config();
    let initial = estimate_wf(&prob.u0, spec.s, &scan)?;
    let ut = evolve(&prob)?;
    let evolved = estimate_wf(&ut, spec.s, &scan)?;
    let chi = FlowMap::new(ev.symbol.clone(), ev.t);
    let transported = transport_set(&initial, &chi, mode)?;
    let h = angular_hausdorff_deg(&evolved.classified_dirs(), &transported.classified_dirs());
    Ok(PropagationReport {
        name: spec.name.clone(),
        mode,
        s: spec.s,
        m: ev.symbol.order(),
        t: ev.t,
        transport,
        high_frequency_mass: prob.u0.high_frequency_mass_fraction(),
        initial,
        evolved,
        transported,
        hausdorff_deg: h.is_finite().then_some(h),
        tolerance_deg: spec.tolerance_deg,
        pass: h <= spec.tolerance_deg,
    })
}

pub fn cmd_verify_propagation(spec: &ExperimentSpec) -> Result<(Outcome, PropagationReport)> {
    let u0 = generate_signal(spec)?;
    let rep = verify_propagation(spec, u0)?;
    let dir = spec.out_dir();
    ensure_dir(&dir)?;
    write_json(&dir.join(format!("{}_propagation.json", spec.name)), &rep)?;
    for (tag, set) in [("initial", &rep.initial), ("evolved", &rep.evolved), ("transported", &rep.transported)] {
        write_text(&dir.join(format!("{}_{tag}.csv", spec.name)), &set.to_csv())?;
    }
    Ok((Outcome::from_pass(rep.pass), rep))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRegime {
    /// `s = 1/(m-1)`: relation is the graph `{(y + t grad p_m(xi), y, xi, -xi)}`.
    Graph,
    /// `s < 1/(m-1)`: relation is the diagonal `{(y, y, xi, -xi)}`.
    Diagonal,
    /// `s > 1/(m-1)`: no conclusion available; measurements only.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub name: String,
    pub regime: KernelRegime,
    pub s: f64,
    pub t: f64,
    pub grid: Grid,
    pub band: f64,
    pub routes_rel_diff: f64,
    pub graph: GraphConditionReport,
    /// Largest angle from a classified entry to the predicted relation.
    pub distance_to_prediction_deg: Option<f64>,
    /// Largest angle from a predicted direction (inside the scan box) to the classified relation.
    pub coverage_deg: Option<f64>,
    pub tolerance_deg: f64,
    pub pass: Option<bool>,
    pub relation: WfRelation,
}

/// Predicted kernel relation sampled on the unit circle of `(y, xi)`, projected by `pi_s`.
pub fn predicted_relation(symbol: &PolySymbol, t: f64, s: f64, regime: KernelRegime, samples: usize) -> Vec<Vec<f64>> {
    (0..samples)
        .filter_map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            let (y, xi) = (th.cos(), th.sin());
            let x = match regime {
                KernelRegime::Graph => y + t * symbol.principal_gradient(&[xi]).ok()?[0],
                _ => y,
            };
            project_concat(&[x, y, xi, -xi], s).ok()
        })
        .collect()
}

/// Builds the (frequency-limited) kernel, estimates its relation and checks the graph condition.
pub fn kernel_diagnostics(spec: &ExperimentSpec) -> Result<KernelReport> {
    spec.validate()?;
    let ev = evolution(spec)?.clone();
    if spec.grid.d != 1 {
        return Err(Error::Config("kernel diagnostics run on one-dimensional problems".into()));
    }
    if spec.grid.n > 256 {
        return Err(Error::Config(format!("kernel scans are limited to n <= 256, got {}", spec.grid.n)));
    }
    let ks = spec.kernel.clone().unwrap_or_default();
    let crit = ev.symbol.critical_s();
    let regime = if (spec.s - crit).abs() <= 1e-9 * crit {
        KernelRegime::Graph
    } else if spec.s < crit {
        KernelRegime::Diagonal
    } else {
        KernelRegime::Undetermined
    };
    let band = ks.band_fraction * spec.grid.band();
    let kernel = build_kernel_banded(&ev.symbol, ev.t, spec.grid, Some(band))?;
    let mut scan = spec.scan.clone().unwrap_or_else(kernel_scan_defaults);
    if scan.xi_lim.is_none() {
        scan.xi_lim = Some(0.94 * band);
    }
    let phi2 = Window::gaussian(kernel.kernel.grid, scan.window_sigma)?;
    let relation = estimate_wf_kernel(&kernel.kernel, &phi2, spec.s, &scan)?;
    let graph = graph_condition(&relation, ks.axis_tol_deg);
    let (dist, cov, pass) = if regime == KernelRegime::Undetermined {
        (None, None, None)
    } else {
        let pred = predicted_relation(&ev.symbol, ev.t, spec.s, regime, 7200);
        let cls = relation.classified_dirs();
        let d = directed_distance_deg(&cls, &pred);
        let c = directed_distance_deg(&pred_in_box(&pred, &scan, spec.grid, spec.s), &cls);
        let ok = graph.holds && !cls.is_empty() && d <= spec.tolerance_deg;
        (Some(d), c.is_finite().then_some(c), Some(ok))
    };
    Ok(KernelReport {
        name: spec.name.clone(),
        regime,
        s: spec.s,
        t: ev.t,
        grid: spec.grid,
        band,
        routes_rel_diff: kernel.routes_rel_diff,
        graph,
        distance_to_prediction_deg: dist,
        coverage_deg: cov,
        tolerance_deg: spec.tolerance_deg,
        pass,
        relation,
    })
}

/// Predicted directions whose scale curve reaches at least a few ladder octaves inside the scan box.
fn pred_in_box(pred: &[Vec<f64>], scan: &ScanConfig, grid: Grid, s: f64) -> Vec<Vec<f64>> {
    let diff_lim = scan.x_lim.unwrap_or(0.75 * grid.l);
    let xi_lim = scan.xi_lim.unwrap_or(0.5 * grid.band());
    pred.iter()
        .filter(|z| {
            let dx = (z[0] - z[1]).abs();
            let xe = if dx > 0.0 { diff_lim / dx } else { f64::INFINITY };
            let xim = z[2].abs().max(z[3].abs());
            let fe = if xim > 0.0 { (xi_lim / xim).powf(1.0 / s) } else { f64::INFINITY };
            xe.min(fe) >= 8.0 * scan.lambda_min
        })
        .cloned()
        .collect()
}

pub fn cmd_kernel_diagnostics(spec: &ExperimentSpec) -> Result<(Outcome, KernelReport)> {
    let rep = kernel_diagnostics(spec)?;
    let dir = spec.out_dir();
    ensure_dir(&dir)?;
    write_json(&dir.join(format!("{}_kernel.json", spec.name)), &rep)?;
    write_json(&dir.join(format!("{}_relation.json", spec.name)), &rep.relation)?;
    let outcome = match rep.pass {
        None => Outcome::Report,
        Some(p) => Outcome::from_pass(p),
    };
    Ok((outcome, rep))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComposeReport {
    pub name: String,
    pub composed: DirectionSet,
    /// Largest angle from an expected direction to the composition.
    pub expected_to_composed_deg: Option<f64>,
    /// Largest angle from a composed direction to the expected set.
    pub composed_to_expected_deg: Option<f64>,
    pub tolerance_deg: f64,
    pub pass: Option<bool>,
}

/// Composes a stored relation with a stored direction set; with an expected
/// set, checks that it is contained in the composition up to the tolerance.
pub fn cmd_compose_check(spec: &ExperimentSpec) -> Result<(Outcome, ComposeReport)> {
    spec.validate()?;
    let c = spec.compose.as_ref().ok_or_else(|| Error::Config("spec has no \"compose\" block".into()))?;
    let rel: WfRelation = read_json(&c.relation)?;
    let set: DirectionSet = read_json(&c.set)?;
    let composed = compose(&rel, &set, spec.tolerance_deg)?;
    let (e2c, c2e, pass) = match &c.expected {
        None => (None, None, None),
        Some(p) => {
            let exp: DirectionSet = read_json(p)?;
            let a = directed_distance_deg(&exp.classified_dirs(), &composed.classified_dirs());
            let b = directed_distance_deg(&composed.classified_dirs(), &exp.classified_dirs());
            (Some(a), b.is_finite().then_some(b), Some(a <= spec.tolerance_deg))
        }
    };
    let rep = ComposeReport {
        name: spec.name.clone(),
        composed,
        expected_to_composed_deg: e2c,
        composed_to_expected_deg: c2e,
        tolerance_deg: spec.tolerance_deg,
        pass,
    };
    let dir = spec.out_dir();
    ensure_dir(&dir)?;
    write_json(&dir.join(format!("{}_composed.json", spec.name)), &rep)?;
    let outcome = match pass {
        None => Outcome::Report,
        Some(p) => Outcome::from_pass(p),
    };
    Ok((outcome, rep))
}

/// `pi_s(x, 3 c x^2)` for `x = +-1`: the two directions of the cubic chirp `exp(i c x^3)` at `s = 2`.
pub fn chirp_directions(c: f64, m: u32, s: f64) -> Vec<Vec<f64>> {
    [1.0f64, -1.0]
        .iter()
        .map(|&x| {
            let xi = m as f64 * c * x.powi(m as i32 - 1);
            project_s(&[x], &[xi], s).expect("nonzero point")
        })
        .collect()
}

/// Scale at which the direction `z` leaves the box; exposed for reports.
pub fn lambda_of(z: &[f64], s: f64) -> Result<f64> {
    let d = z.len() / 2;
    lambda_s(&z[..d], &z[d..], s)
}
