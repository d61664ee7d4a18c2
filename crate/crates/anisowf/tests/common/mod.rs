#![allow(dead_code)]

use std::f64::consts::PI;

use anisowf::geometry::{angle_between, project_s};
use anisowf::relation::VANISH;
use anisowf::wavefront::DecayProfile;
use anisowf::{DirectionSet, WfRelation};
use num_complex::Complex64;

/// Direct quadrature of `(2 pi)^(-1/2) int u(y) phi(y - x) e^{-i y xi} dy` on the whole line,
/// with `phi = pi^(-1/4) exp(-y^2 / 2)` and step `h`, truncated where the window is below 1e-20.
pub fn naive_stft(u: impl Fn(f64) -> Complex64, x: f64, xi: f64, h: f64) -> Complex64 {
    let half = (9.7 / h).ceil() as i64;
    let c = PI.powf(-0.25) * h / (2.0 * PI).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -half..=half {
        let y = x + j as f64 * h;
        let w = (-0.5 * (y - x) * (y - x)).exp();
        acc += u(y) * w * Complex64::from_polar(1.0, -y * xi);
    }
    acc * c
}

/// The straightforward double loop behind `A' o B`.
pub fn compose_bruteforce(a: &WfRelation, b: &DirectionSet, tol_deg: f64) -> Vec<Vec<f64>> {
    let tol = tol_deg.to_radians();
    let proj = |x: f64, xi: f64| -> Option<Vec<f64>> {
        if x.hypot(xi) < VANISH {
            None
        } else {
            Some(project_s(&[x], &[xi], a.s).unwrap())
        }
    };
    let rhs_all: Vec<Option<Vec<f64>>> =
        b.entries.iter().filter(|e| e.classified).map(|e| proj(e.dir[0], e.dir[1])).collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in a.entries.iter().filter(|e| e.classified) {
        let z = &r.dir;
        let lhs = proj(z[1], -z[3]);
        let mut hit = false;
        for rhs in &rhs_all {
            hit |= match (&lhs, rhs) {
                (None, None) => true,
                (Some(p), Some(q)) => angle_between(p, q) < tol,
                _ => false,
            };
        }
        if !hit {
            continue;
        }
        if let Some(d) = proj(z[0], z[2]) {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter().map(|a| a / n).collect()
}

pub fn set_of(s: f64, dirs: &[Vec<f64>]) -> DirectionSet {
    DirectionSet {
        s,
        threshold: -8.0,
        entries: dirs.iter().map(|d| DecayProfile::marked(d.clone(), 0.0, -8.0)).collect(),
    }
}

pub fn max_angle_to(dirs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    dirs.iter()
        .map(|d| targets.iter().map(|t| angle_between(d, t)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        .to_degrees()
}
