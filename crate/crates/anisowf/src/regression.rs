//! Least-squares line fits for log-log decay rates.

/// Slope, intercept and coefficient of determination of the least-squares line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `y` on `x`; `None` with fewer than two distinct abscissae.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Some(LineFit { slope, intercept, r2 })
}

/// Fit of `ln m` against `ln lambda`: the exponent `k` in `m ~ lambda^k`.
pub fn log_log_fit(lambdas: &[f64], mags: &[f64]) -> Option<LineFit> {
    let lx: Vec<f64> = lambdas.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = mags.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let l: Vec<f64> = (1..20).map(|k| 1.3f64.powi(k)).collect();
        let m: Vec<f64> = l.iter().map(|v| 7.0 * v.powf(-3.25)).collect();
        let f = log_log_fit(&l, &m).unwrap();
        assert!((f.slope + 3.25).abs() < 1e-12);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-11);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0], &[2.0]).is_none());
        assert!(fit_line(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
