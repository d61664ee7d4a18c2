//! Anisotropic phase-space geometry: the normalizer `lambda_s`, the
//! projection `pi_s` onto the unit sphere along the curves
//! `mu -> (mu x, mu^s xi)`, and the two kinds of s-conic neighbourhoods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs with Euclidean norm below this are treated as the excluded origin.
pub const ORIGIN_EPS: f64 = 1e-300;

/// A point `(x, xi)` of the cotangent space `T*R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.len() != xi.len() {
            return Err(Error::Domain(format!(
                "phase point needs equal nonzero lengths, got {} and {}",
                x.len(),
                xi.len()
            )));
        }
        Ok(PhasePoint { x, xi })
    }

    /// Splits a concatenated vector `(x, xi)` of even length.
    pub fn from_concat(v: &[f64]) -> Result<Self> {
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return Err(Error::Domain(format!("cannot split length {} into (x, xi)", v.len())));
        }
        let d = v.len() / 2;
        Ok(PhasePoint { x: v[..d].to_vec(), xi: v[d..].to_vec() })
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }

    pub fn to_concat(&self) -> Vec<f64> {
        self.x.iter().chain(&self.xi).copied().collect()
    }

    pub fn norm(&self) -> f64 {
        (norm2(&self.x) + norm2(&self.xi)).sqrt()
    }

    /// `(mu x, mu^s xi)`.
    pub fn dilate(&self, mu: f64, s: f64) -> PhasePoint {
        let ms = mu.powf(s);
        PhasePoint { x: self.x.iter().map(|v| v * mu).collect(), xi: self.xi.iter().map(|v| v * ms).collect() }
    }

    pub fn lambda(&self, s: f64) -> Result<f64> {
        lambda_s(&self.x, &self.xi, s)
    }

    pub fn project(&self, s: f64) -> Result<PhasePoint> {
        let lam = self.lambda(s)?;
        Ok(self.dilate(1.0 / lam, s))
    }
}

/// The anisotropy parameter `s > 0` relating space and frequency scaling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Anisotropy(f64);

impl Anisotropy {
    pub fn new(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Domain(format!("anisotropy parameter must be positive, got {s}")));
        }
        Ok(Anisotropy(s))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Anisotropy {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        Anisotropy::new(s)
    }
}

impl From<Anisotropy> for f64 {
    fn from(s: Anisotropy) -> f64 {
        s.0
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

fn check_input(x: &[f64], xi: &[f64], s: f64) -> Result<(f64, f64)> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Domain(format!("anisotropy parameter must be positive, got {s}")));
    }
    if x.iter().chain(xi).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite phase-space component".into()));
    }
    let a = x.iter().fold(0.0f64, |acc, v| acc.hypot(*v));
    let b = xi.iter().fold(0.0f64, |acc, v| acc.hypot(*v));
    if a.hypot(b) < ORIGIN_EPS {
        return Err(Error::Domain("the origin has no s-normalization".into()));
    }
    Ok((a, b))
}

/// Solves `lambda^-2 |x|^2 + lambda^-2s |xi|^2 = 1` for `lambda > 0`.
///
/// Works with `u = ln lambda` so that extreme `s` or magnitudes cannot
/// overflow: the residual is bracketed by the two-sided bound, bisected to
/// `1e-13` and polished with two Newton steps.
pub fn lambda_s(x: &[f64], xi: &[f64], s: f64) -> Result<f64> {
    let (a, b) = check_input(x, xi, s)?;
    if b == 0.0 {
        return Ok(a);
    }
    if a == 0.0 {
        return Ok((b.ln() / s).exp());
    }
    let (la, lb) = (a.ln(), b.ln());
    let resid = |u: f64| (2.0 * (la - u)).exp() + (2.0 * (lb - s * u)).exp() - 1.0;
    let mut lo = la.max(lb / s);
    let mut hi = (la + 0.5 * std::f64::consts::LN_2).max((lb + 0.5 * std::f64::consts::LN_2) / s);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if resid(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..2 {
        let p = (2.0 * (la - u)).exp();
        let q = (2.0 * (lb - s * u)).exp();
        let f = p + q - 1.0;
        let df = -2.0 * p - 2.0 * s * q;
        if df != 0.0 {
            u -= f / df;
        }
    }
    Ok(u.exp())
}

/// The residual of the normalizer equation, used by tests and diagnostics.
pub fn lambda_residual(x: &[f64], xi: &[f64], s: f64, lam: f64) -> f64 {
    let a = x.iter().fold(0.0f64, |acc, v| acc.hypot(*v));
    let b = xi.iter().fold(0.0f64, |acc, v| acc.hypot(*v));
    (a / lam).powi(2) + (b / lam.powf(s)).powi(2) - 1.0
}

/// Constants with `c1 (|x| + |xi|^(1/s)) <= lambda_s <= c2 (|x| + |xi|^(1/s))`.
///
/// From `max(a, b^(1/s)) <= lambda <= max(sqrt 2 a, 2^(1/2s) b^(1/s))`.
pub fn lambda_bound_constants(s: f64) -> (f64, f64) {
    (0.5, std::f64::consts::SQRT_2.max(2f64.powf(0.5 / s)))
}

/// `pi_s(x, xi) = (x / lambda, xi / lambda^s)` as a concatenated unit vector.
pub fn project_s(x: &[f64], xi: &[f64], s: f64) -> Result<Vec<f64>> {
    let lam = lambda_s(x, xi, s)?;
    let ls = lam.powf(s);
    Ok(x.iter().map(|v| v / lam).chain(xi.iter().map(|v| v / ls)).collect())
}

/// `pi_s` of a concatenated vector `(x, xi)`.
pub fn project_concat(z: &[f64], s: f64) -> Result<Vec<f64>> {
    let d = z.len() / 2;
    project_s(&z[..d], &z[d..], s)
}

/// Angle in radians between two unit vectors.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
    let diff: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let sum: f64 = a.iter().zip(b).map(|(p, q)| (p + q) * (p + q)).sum::<f64>().sqrt();
    // atan2 form stays accurate for nearly parallel and antiparallel vectors
    if dot.is_nan() {
        return f64::NAN;
    }
    2.0 * diff.atan2(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeKind {
    /// `{ z : |center - pi_s(z)| < eps }`
    ProjectionBall,
    /// `{ z : (mu x, mu^s xi) in center + B_eps for some mu > 0 }`
    ScaledBall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SCone {
    pub kind: ConeKind,
    pub center: Vec<f64>,
    pub epsilon: f64,
}

impl SCone {
    pub fn new(kind: ConeKind, center: Vec<f64>, epsilon: f64) -> Result<Self> {
        if center.is_empty() || !center.len().is_multiple_of(2) {
            return Err(Error::Domain("cone center must have even length 2d".into()));
        }
        if (norm2(&center).sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("cone center must be a unit vector".into()));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("cone radius must be positive, got {epsilon}")));
        }
        Ok(SCone { kind, center, epsilon })
    }

    pub fn contains(&self, z: &PhasePoint, s: f64) -> Result<bool> {
        if z.to_concat().len() != self.center.len() {
            return Err(Error::Domain("point and cone center dimensions differ".into()));
        }
        match self.kind {
            ConeKind::ProjectionBall => {
                let p = z.project(s)?.to_concat();
                let dist = norm2(&p.iter().zip(&self.center).map(|(a, b)| a - b).collect::<Vec<_>>()).sqrt();
                Ok(dist < self.epsilon)
            }
            ConeKind::ScaledBall => Ok(scaled_ball_distance2(z, &self.center, s)? < self.epsilon * self.epsilon),
        }
    }
}

/// `min_mu |(mu x, mu^s xi) - center|^2` over `mu > 0`.
///
/// The objective can have more than one local minimum in `ln mu`, so a coarse
/// scan over a wide window around the s-normalizing scale selects the basin
/// before golden-section refinement to relative tolerance `1e-10`.
pub fn scaled_ball_distance2(z: &PhasePoint, center: &[f64], s: f64) -> Result<f64> {
    let lam = z.lambda(s)?;
    let d = z.d();
    let g = |u: f64| {
        let mu = u.exp();
        let ms = mu.powf(s);
        let mut acc = 0.0;
        for i in 0..d {
            let a = mu * z.x[i] - center[i];
            let b = ms * z.xi[i] - center[d + i];
            acc += a * a + b * b;
        }
        acc
    };
    let u0 = -lam.ln();
    let span = 12.0 * (1.0 + 1.0 / s).max(1.0 + s);
    let steps = 480;
    let du = 2.0 * span / steps as f64;
    let mut best = (u0, g(u0));
    for k in 0..=steps {
        let u = u0 - span + k as f64 * du;
        let v = g(u);
        if v < best.1 {
            best = (u, v);
        }
    }
    let (mut a, mut b) = (best.0 - du, best.0 + du);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut e = a + phi * (b - a);
    let (mut gc, mut ge) = (g(c), g(e));
    while (b - a).abs() > 1e-10 * (1.0 + a.abs().max(b.abs())) {
        if gc < ge {
            b = e;
            e = c;
            ge = gc;
            c = b - phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = e;
            gc = ge;
            e = a + phi * (b - a);
            ge = g(e);
        }
    }
    Ok(best.1.min(gc).min(ge).min(g(0.5 * (a + b))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_cases() {
        assert_eq!(lambda_s(&[3.0], &[0.0], 0.5).unwrap(), 3.0);
        let v = lambda_s(&[0.0], &[4.0], 0.5).unwrap();
        assert!((v - 16.0).abs() < 1e-12);
        let e = lambda_s(&[3.0], &[4.0], 1.0).unwrap();
        assert!((e - 5.0).abs() < 1e-12);
    }

    #[test]
    fn origin_and_nan_rejected() {
        assert!(lambda_s(&[0.0], &[0.0], 1.0).is_err());
        assert!(lambda_s(&[f64::NAN], &[1.0], 1.0).is_err());
        assert!(lambda_s(&[1.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn extreme_scales_do_not_overflow() {
        let lam = lambda_s(&[1e-3], &[1e60], 0.25).unwrap();
        assert!((lam / 1e240 - 1.0).abs() < 1e-12);
        assert!(lambda_residual(&[1e-3], &[1e60], 0.25, lam).abs() < 1e-12);
        let tiny = lambda_s(&[1e-200], &[1e-200], 8.0).unwrap();
        assert!(tiny > 0.0 && lambda_residual(&[1e-200], &[1e-200], 8.0, tiny).abs() < 1e-12);
    }

    #[test]
    fn euclidean_projection() {
        let p = project_s(&[3.0], &[4.0], 1.0).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn cone_examples() {
        let c = vec![0.6, 0.8];
        let z = PhasePoint::new(vec![0.6], vec![0.8]).unwrap();
        for kind in [ConeKind::ProjectionBall, ConeKind::ScaledBall] {
            let cone = SCone::new(kind, c.clone(), 1e-3).unwrap();
            assert!(cone.contains(&z, 0.5).unwrap());
        }
        let opp = PhasePoint::new(vec![-0.6], vec![-0.8]).unwrap();
        let cone = SCone::new(ConeKind::ProjectionBall, c, 0.1).unwrap();
        assert!(!cone.contains(&opp, 0.5).unwrap());
    }

    #[test]
    fn angle_is_accurate_near_zero_and_pi() {
        let a = [1.0, 0.0];
        let b = [(1e-9f64).cos(), (1e-9f64).sin()];
        assert!((angle_between(&a, &b) - 1e-9).abs() < 1e-20);
        let c = [-1.0, 0.0];
        assert!((angle_between(&a, &c) - std::f64::consts::PI).abs() < 1e-15);
    }
}
