//! Wave front relations of kernels on `R^{2d}` and the set-level operations on them:
//! the primed composition `A' o B`, the graph condition, and the tensor-product bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, norm2, project_s};
use crate::signal::Signal;
use crate::stft::{PointStft, Window};
use crate::wavefront::{estimate_with, DecayProfile, DirectionSet, ScanBox, ScanConfig};

/// Discrete surrogate of `WF(K)`: directions `(x, y, xi, eta)` on `S^{4d-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WfRelation {
    pub s: f64,
    pub threshold: f64,
    pub entries: Vec<DecayProfile>,
}

impl WfRelation {
    pub fn classified(&self) -> impl Iterator<Item = &DecayProfile> {
        self.entries.iter().filter(|e| e.classified)
    }

    pub fn classified_dirs(&self) -> Vec<Vec<f64>> {
        self.classified().map(|e| e.dir.clone()).collect()
    }

    /// Base dimension `d` of the relation (entries have length `4d`).
    pub fn base_dim(&self) -> Option<usize> {
        self.entries.first().map(|e| e.dir.len() / 4)
    }
}

impl From<DirectionSet> for WfRelation {
    fn from(d: DirectionSet) -> Self {
        WfRelation { s: d.s, threshold: d.threshold, entries: d.entries }
    }
}

/// Estimate `WF(K)` for a kernel sampled on the doubled grid of a one-dimensional problem.
///
/// Positions are periodic, so the scan box bounds `|x - y|` and the frequencies
/// rather than `x` and `y` separately (the default `diff_lim` is `0.75 L`).
pub fn estimate_wf_kernel(k: &Signal, phi2: &Window, s: f64, scan: &ScanConfig) -> Result<WfRelation> {
    if k.grid.d != 2 {
        return Err(Error::Usage(format!("kernel must live on a two-dimensional grid, got d = {}", k.grid.d)));
    }
    let src = PointStft::new(k, phi2)?;
    let bx = ScanBox::KernelDiagonal {
        diff_lim: scan.x_lim.unwrap_or(0.75 * k.grid.l),
        xi_lim: scan.xi_lim.unwrap_or(0.5 * k.grid.band()),
    };
    Ok(estimate_with(&src, s, scan, bx)?.into())
}

/// Below this norm a phase-space component counts as vanishing.
pub const VANISH: f64 = 1e-12;

fn split_relation_entry(z: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = z.len() / 4;
    (z[..d].to_vec(), z[d..2 * d].to_vec(), z[2 * d..3 * d].to_vec(), z[3 * d..].to_vec())
}

/// `pi_s(x, xi)`, or `None` when the pair vanishes.
fn project_or_zero(x: &[f64], xi: &[f64], s: f64) -> Option<Vec<f64>> {
    if (norm2(x) + norm2(xi)).sqrt() < VANISH {
        None
    } else {
        project_s(x, xi, s).ok()
    }
}

/// `A' o B = { pi_s(x, xi) : (y, eta) in B, (x, y, xi, -eta') in A, angle(pi_s(y, eta), pi_s(y, eta')) < tol }`.
///
/// Output directions are deduplicated exactly and ordered by first appearance in `A`.
pub fn compose(a: &WfRelation, b: &DirectionSet, match_tol_deg: f64) -> Result<DirectionSet> {
    if (a.s - b.s).abs() > 1e-12 {
        return Err(Error::Usage(format!("relation has s = {} but the set has s = {}", a.s, b.s)));
    }
    if let (Some(d), Some(e)) = (a.base_dim(), b.entries.first()) {
        if e.dir.len() != 2 * d {
            return Err(Error::Usage("relation and direction set dimensions differ".into()));
        }
    }
    let tol = match_tol_deg.to_radians();
    let bs: Vec<Option<Vec<f64>>> = b
        .classified()
        .map(|e| {
            let d = e.dir.len() / 2;
            project_or_zero(&e.dir[..d], &e.dir[d..], b.s)
        })
        .collect();
    let mut out: Vec<DecayProfile> = Vec::new();
    for r in a.classified() {
        let (x, y, xi, zeta) = split_relation_entry(&r.dir);
        let eta: Vec<f64> = zeta.iter().map(|v| -v).collect();
        let lhs = project_or_zero(&y, &eta, a.s);
        let hit = bs.iter().any(|bp| match (&lhs, bp) {
            (None, None) => true,
            (Some(p), Some(q)) => angle_between(p, q) < tol,
            _ => false,
        });
        if !hit {
            continue;
        }
        let Some(dir) = project_or_zero(&x, &xi, a.s) else { continue };
        if out.iter().any(|o| o.dir == dir) {
            continue;
        }
        out.push(DecayProfile { dir, slope: r.slope, r2: r.r2, classified: true, lambdas: vec![], magnitudes: vec![] });
    }
    Ok(DirectionSet { s: a.s, threshold: a.threshold, entries: out })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphConditionReport {
    pub holds: bool,
    pub axis_tol_deg: f64,
    /// Classified entries within tolerance of `{(x, 0, xi, 0)}`.
    pub near_first_axis: Vec<Vec<f64>>,
    /// Classified entries within tolerance of `{(0, y, 0, -eta)}`.
    pub near_second_axis: Vec<Vec<f64>>,
    /// Smallest angle (degrees) from a classified entry to `{(x, 0, xi, 0)}`.
    pub margin_first_deg: f64,
    /// Smallest angle (degrees) from a classified entry to `{(0, y, 0, -eta)}`.
    pub margin_second_deg: f64,
    /// Smallest `c >= 1` with `c^-1 (|x| + |xi|^(1/s)) <= |y| + |eta|^(1/s) <= c (...)` on all classified entries.
    pub gamma1_c: f64,
    pub n_classified: usize,
}

/// Checks that the classified relation avoids both coordinate submanifolds.
pub fn graph_condition(r: &WfRelation, axis_tol_deg: f64) -> GraphConditionReport {
    let mut rep = GraphConditionReport {
        holds: true,
        axis_tol_deg,
        near_first_axis: vec![],
        near_second_axis: vec![],
        margin_first_deg: 90.0,
        margin_second_deg: 90.0,
        gamma1_c: 1.0,
        n_classified: 0,
    };
    let inv = 1.0 / r.s;
    for e in r.classified() {
        rep.n_classified += 1;
        let (x, y, xi, eta) = split_relation_entry(&e.dir);
        let norm = norm2(&e.dir).sqrt();
        let first_part = (norm2(&x) + norm2(&xi)).sqrt() / norm;
        let second_part = (norm2(&y) + norm2(&eta)).sqrt() / norm;
        // angle to the subspace {y = eta = 0} is asin of the (y, eta) share
        let to_first = second_part.clamp(0.0, 1.0).asin().to_degrees();
        let to_second = first_part.clamp(0.0, 1.0).asin().to_degrees();
        rep.margin_first_deg = rep.margin_first_deg.min(to_first);
        rep.margin_second_deg = rep.margin_second_deg.min(to_second);
        if to_first <= axis_tol_deg {
            rep.near_first_axis.push(e.dir.clone());
        }
        if to_second <= axis_tol_deg {
            rep.near_second_axis.push(e.dir.clone());
        }
        let wx = norm2(&x).sqrt() + norm2(&xi).sqrt().powf(inv);
        let wy = norm2(&y).sqrt() + norm2(&eta).sqrt().powf(inv);
        let c = if wx == 0.0 || wy == 0.0 { f64::INFINITY } else { (wy / wx).max(wx / wy) };
        rep.gamma1_c = rep.gamma1_c.max(c);
    }
    rep.holds = rep.near_first_axis.is_empty() && rep.near_second_axis.is_empty();
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorBoundReport {
    pub holds: bool,
    pub tol_deg: f64,
    pub offenders: Vec<Vec<f64>>,
    /// Largest distance (degrees) from a classified direction of `W` to the product set.
    pub max_distance_deg: f64,
}

/// Checks `WF(u ⊗ v) ⊆ (WF(u) ∪ {0}) x (WF(v) ∪ {0}) ∖ 0` at the level of direction sets.
///
/// `W` has entries ordered `(x', x'', xi', xi'')`. Each classified `w` is
/// compared with the candidates obtained by placing `a in U ∪ {0}` and
/// `b in V ∪ {0}` at the s-scales of `w`'s own two components.
pub fn tensor_bound_check(u: &DirectionSet, v: &DirectionSet, w: &DirectionSet, tol_deg: f64) -> TensorBoundReport {
    let s = w.s;
    let mut ua: Vec<Option<Vec<f64>>> = u.classified_dirs().into_iter().map(Some).collect();
    ua.push(None);
    let mut vb: Vec<Option<Vec<f64>>> = v.classified_dirs().into_iter().map(Some).collect();
    vb.push(None);
    let mut rep = TensorBoundReport { holds: true, tol_deg, offenders: vec![], max_distance_deg: 0.0 };
    for e in w.classified() {
        let z = &e.dir;
        let (x1, x2, xi1, xi2) = (z[0], z[1], z[2], z[3]);
        let lam_a = crate::geometry::lambda_s(&[x1], &[xi1], s).unwrap_or(0.0);
        let lam_b = crate::geometry::lambda_s(&[x2], &[xi2], s).unwrap_or(0.0);
        let mut best = f64::INFINITY;
        for a in &ua {
            for b in &vb {
                let (ax, axi) = a.as_ref().map_or((0.0, 0.0), |p| (p[0] * lam_a, p[1] * lam_a.powf(s)));
                let (bx, bxi) = b.as_ref().map_or((0.0, 0.0), |p| (p[0] * lam_b, p[1] * lam_b.powf(s)));
                let Some(c) = project_or_zero(&[ax, bx], &[axi, bxi], s) else { continue };
                best = best.min(angle_between(z, &c).to_degrees());
            }
        }
        rep.max_distance_deg = rep.max_distance_deg.max(best);
        if best > tol_deg {
            rep.offenders.push(z.clone());
        }
    }
    rep.holds = rep.offenders.is_empty();
    rep
}
