//! Real polynomial symbols `p(xi)`, their Hamiltonian flows, and the elliptic
//! anisotropic symbol `g(|z|) lambda_s(z)^m`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lambda_s, PhasePoint};

pub const MAX_ORDER: u32 = 12;

/// `p(xi) = sum c_alpha xi^alpha` with `|alpha| <= m` and a nonzero top-degree coefficient.
///
/// JSON form: `{"d": 1, "m": 3, "coeffs": {"(3)": 1.0, "(1)": -2.0}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolySymbolJson", into = "PolySymbolJson")]
pub struct PolySymbol {
    d: usize,
    m: u32,
    coeffs: BTreeMap<Vec<u32>, f64>,
}

#[derive(Serialize, Deserialize)]
struct PolySymbolJson {
    d: usize,
    m: u32,
    coeffs: BTreeMap<String, f64>,
}

fn parse_multi_index(key: &str) -> Result<Vec<u32>> {
    let inner = key
        .trim()
        .strip_prefix('(')
        .and_then(|k| k.strip_suffix(')'))
        .ok_or_else(|| Error::Config(format!("multi-index {key:?} must look like \"(a,b)\"")))?;
    inner
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Config(format!("bad exponent in multi-index {key:?}"))))
        .collect()
}

fn format_multi_index(alpha: &[u32]) -> String {
    let parts: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
    format!("({})", parts.join(","))
}

impl TryFrom<PolySymbolJson> for PolySymbol {
    type Error = Error;
    fn try_from(j: PolySymbolJson) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (k, v) in j.coeffs {
            coeffs.insert(parse_multi_index(&k)?, v);
        }
        PolySymbol::new(j.d, j.m, coeffs)
    }
}

impl From<PolySymbol> for PolySymbolJson {
    fn from(p: PolySymbol) -> Self {
        PolySymbolJson { d: p.d, m: p.m, coeffs: p.coeffs.iter().map(|(k, v)| (format_multi_index(k), *v)).collect() }
    }
}

impl PolySymbol {
    pub fn new(d: usize, m: u32, coeffs: BTreeMap<Vec<u32>, f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("symbol dimension must be positive".into()));
        }
        if !(2..=MAX_ORDER).contains(&m) {
            return Err(Error::Config(format!("symbol order must lie in 2..={MAX_ORDER}, got {m}")));
        }
        let mut top = false;
        for (alpha, c) in &coeffs {
            if alpha.len() != d {
                return Err(Error::Config(format!("multi-index {alpha:?} has wrong length for d = {d}")));
            }
            if !c.is_finite() {
                return Err(Error::Config(format!("coefficient of {alpha:?} is not finite")));
            }
            let deg: u32 = alpha.iter().sum();
            if deg > m {
                return Err(Error::Config(format!("multi-index {alpha:?} exceeds the order {m}")));
            }
            top |= deg == m && *c != 0.0;
        }
        if !top {
            return Err(Error::Config(format!("no nonzero coefficient of degree {m}")));
        }
        Ok(PolySymbol { d, m, coeffs })
    }

    /// One-dimensional symbol from `(exponent, coefficient)` pairs.
    pub fn univariate(terms: &[(u32, f64)]) -> Result<Self> {
        let m = terms.iter().filter(|(_, c)| *c != 0.0).map(|(k, _)| *k).max().unwrap_or(0);
        PolySymbol::new(1, m, terms.iter().filter(|(_, c)| *c != 0.0).map(|(k, c)| (vec![*k], *c)).collect())
    }

    /// `xi^m`.
    pub fn monomial(m: u32) -> Result<Self> {
        PolySymbol::univariate(&[(m, 1.0)])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<u32>, f64> {
        &self.coeffs
    }

    fn powers(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        xi.iter()
            .map(|&v| {
                let mut p = Vec::with_capacity(self.m as usize + 1);
                let mut acc = 1.0;
                for _ in 0..=self.m {
                    p.push(acc);
                    acc *= v;
                }
                p
            })
            .collect()
    }

    fn check_len(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.d {
            return Err(Error::Usage(format!("symbol has d = {} but got a point of length {}", self.d, xi.len())));
        }
        Ok(())
    }

    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        self.check_len(xi)?;
        Ok(self.eval_unchecked(xi))
    }

    pub(crate) fn eval_unchecked(&self, xi: &[f64]) -> f64 {
        let pw = self.powers(xi);
        self.coeffs
            .iter()
            .map(|(alpha, c)| c * alpha.iter().enumerate().map(|(j, &a)| pw[j][a as usize]).product::<f64>())
            .sum()
    }

    /// `p_m`: the terms of top degree.
    pub fn principal_part(&self) -> PolySymbol {
        let coeffs =
            self.coeffs.iter().filter(|(a, _)| a.iter().sum::<u32>() == self.m).map(|(a, c)| (a.clone(), *c)).collect();
        PolySymbol { d: self.d, m: self.m, coeffs }
    }

    /// `grad p_m(xi)` from the differentiated monomials.
    pub fn principal_gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.principal_part().gradient(xi)
    }

    /// `grad p(xi)` including lower-order terms.
    pub fn gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(xi)?;
        let pw = self.powers(xi);
        let mut g = vec![0.0; self.d];
        for (alpha, c) in &self.coeffs {
            for (j, gj) in g.iter_mut().enumerate() {
                if alpha[j] == 0 {
                    continue;
                }
                let mut term = c * alpha[j] as f64;
                for (i, &a) in alpha.iter().enumerate() {
                    let e = if i == j { a - 1 } else { a };
                    term *= pw[i][e as usize];
                }
                *gj += term;
            }
        }
        Ok(g)
    }

    /// `1 / (m - 1)`, the anisotropy at which the flow transports the wave front set.
    pub fn critical_s(&self) -> f64 {
        1.0 / (self.m as f64 - 1.0)
    }
}

/// `chi_t(x, xi) = (x + t grad p_m(xi), xi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowMap {
    pub symbol: PolySymbol,
    pub t: f64,
}

impl FlowMap {
    pub fn new(symbol: PolySymbol, t: f64) -> Self {
        FlowMap { symbol, t }
    }

    pub fn apply(&self, z: &PhasePoint) -> Result<PhasePoint> {
        let g = self.symbol.principal_gradient(&z.xi)?;
        let x = z.x.iter().zip(&g).map(|(a, b)| a + self.t * b).collect();
        PhasePoint::new(x, z.xi.clone())
    }

    pub fn inverse(&self) -> FlowMap {
        FlowMap { symbol: self.symbol.clone(), t: -self.t }
    }
}

/// `flow(chi, z)`.
pub fn flow(chi: &FlowMap, z: &PhasePoint) -> Result<PhasePoint> {
    chi.apply(z)
}

/// Quintic smoothstep: 0 on `[0, r0]`, 1 on `[r1, inf)`, `6t^5 - 15t^4 + 10t^3` between.
pub fn cutoff(r: f64, r0: f64, r1: f64) -> f64 {
    if r <= r0 {
        0.0
    } else if r >= r1 {
        1.0
    } else {
        let t = (r - r0) / (r1 - r0);
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

/// `a(z) = g(|z|) lambda_s(z)^m` with the smoothstep cutoff `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticSymbol {
    pub s: f64,
    pub m: f64,
    pub r0: f64,
    pub r1: f64,
}

impl EllipticSymbol {
    pub fn new(s: f64, m: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite() && m.is_finite()) {
            return Err(Error::Domain(format!("elliptic symbol needs s > 0 and finite m, got s = {s}, m = {m}")));
        }
        Ok(EllipticSymbol { s, m, r0: 0.5, r1: 1.0 })
    }

    pub fn eval(&self, z: &PhasePoint) -> f64 {
        let g = cutoff(z.norm(), self.r0, self.r1);
        if g == 0.0 {
            return 0.0;
        }
        g * lambda_s(&z.x, &z.xi, self.s).expect("nonzero point").powf(self.m)
    }
}

pub fn elliptic_symbol_eval(e: &EllipticSymbol, z: &PhasePoint) -> f64 {
    e.eval(z)
}

/// `mu_s(x, xi) = 1 + |x| + |xi|^(1/s)`.
pub fn weight_mu(z: &PhasePoint, s: f64) -> f64 {
    let a: f64 = z.x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let b: f64 = z.xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    1.0 + a + b.powf(1.0 / s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub c1: f64,
    pub c2: f64,
    pub n_used: usize,
    pub zeros: usize,
    pub pass: bool,
}

/// Empirical constants `c1 <= |a(z)| / mu_s(z)^m <= c2` over the sample points with `|z| >= 1`.
pub fn ellipticity_check(e: &EllipticSymbol, sample: &[PhasePoint]) -> EllipticityReport {
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let mut n_used = 0;
    let mut zeros = 0;
    for z in sample.iter().filter(|z| z.norm() >= 1.0) {
        n_used += 1;
        let a = e.eval(z).abs();
        if a == 0.0 {
            zeros += 1;
        }
        let q = a / weight_mu(z, e.s).powf(e.m);
        c1 = c1.min(q);
        c2 = c2.max(q);
    }
    let pass = n_used > 0 && zeros == 0 && c1 > 0.0 && c2 / c1 <= 100.0;
    EllipticityReport { c1, c2, n_used, zeros, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(PolySymbol::monomial(2).unwrap().eval(&[3.0]).unwrap(), 9.0);
        let p = PolySymbol::univariate(&[(3, 1.0), (1, -2.0)]).unwrap();
        assert_eq!(p.eval(&[2.0]).unwrap(), 4.0);
        assert!(p.eval(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn principal_parts() {
        let p = PolySymbol::univariate(&[(3, 1.0), (1, -2.0)]).unwrap();
        assert_eq!(p.principal_part(), PolySymbol::monomial(3).unwrap());
        let mut c = BTreeMap::new();
        c.insert(vec![2, 1], 1.0);
        c.insert(vec![1, 0], 1.0);
        let q = PolySymbol::new(2, 3, c).unwrap().principal_part();
        assert_eq!(q.coeffs().len(), 1);
        assert_eq!(q.coeffs()[&vec![2, 1]], 1.0);
    }

    #[test]
    fn json_roundtrip() {
        let js = r#"{"d": 1, "m": 3, "coeffs": {"(3)": 1.0, "(1)": -2.0}}"#;
        let p: PolySymbol = serde_json::from_str(js).unwrap();
        assert_eq!(p.eval(&[2.0]).unwrap(), 4.0);
        let back: PolySymbol = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, back);
        assert!(serde_json::from_str::<PolySymbol>(r#"{"d":1,"m":3,"coeffs":{"(1)":1.0}}"#).is_err());
    }

    #[test]
    fn flow_examples() {
        let chi = FlowMap::new(PolySymbol::monomial(2).unwrap(), 1.0);
        let z = chi.apply(&PhasePoint::new(vec![0.0], vec![1.0]).unwrap()).unwrap();
        assert_eq!(z.x, vec![2.0]);
        let chi = FlowMap::new(PolySymbol::monomial(3).unwrap(), 2.0);
        let z = chi.apply(&PhasePoint::new(vec![1.0], vec![2.0]).unwrap()).unwrap();
        assert_eq!((z.x[0], z.xi[0]), (25.0, 2.0));
    }

    #[test]
    fn elliptic_examples() {
        let e = EllipticSymbol::new(0.5, 2.0).unwrap();
        assert_eq!(e.eval(&PhasePoint::new(vec![0.3], vec![0.3]).unwrap()), 0.0);
        let on_sphere = PhasePoint::new(vec![0.6], vec![0.8]).unwrap();
        assert!((e.eval(&on_sphere) - 1.0).abs() < 1e-12);
        assert_eq!(cutoff(0.75, 0.5, 1.0), 0.5);
    }
}
