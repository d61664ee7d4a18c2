mod common;

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use anisowf::experiment::chirp_directions;
use anisowf::signal::{gaussian, hermite, poly_chirp, taper};
use anisowf::wavefront::{angular_hausdorff_deg, DecayProfile};
use anisowf::{estimate_wf, estimate_wf_kernel, DirectionSet, Error, Grid, ScanConfig, Signal, WfRelation, Window};
use num_complex::Complex64;

fn quadratic_chirp_set(scan: ScanConfig) -> DirectionSet {
    let g = Grid::new(1, 32768, 256.0).unwrap();
    let scan = ScanConfig { x_lim: Some(0.45 * g.l), ..scan };
    estimate_wf(&poly_chirp(g, 0.5, 2).unwrap(), 1.0, &scan).unwrap()
}

fn diagonal() -> Vec<Vec<f64>> {
    vec![vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![-FRAC_1_SQRT_2, -FRAC_1_SQRT_2]]
}

#[test]
fn schwartz_signals_have_empty_wave_front_sets() {
    let g = Grid::new(1, 1024, 12.0).unwrap();
    for s in [0.5, 1.0, 2.0] {
        for u in [gaussian(g), hermite(g, 1), hermite(g, 4)] {
            let set = estimate_wf(&u, s, &ScanConfig::default()).unwrap();
            assert_eq!(set.classified().count(), 0, "s = {s}, max slope {}", set.max_slope());
            assert!(set.max_slope() < -8.0);
        }
    }
}

#[test]
fn chirp_magnitude_along_the_target_curve_does_not_decay() {
    let l = 256.0;
    let u = |y: f64| Complex64::from_polar(taper(y, l), 0.5 * y * y);
    let h = 1.0 / 64.0;
    let on: Vec<f64> = [2.0, 8.0, 32.0, 80.0]
        .iter()
        .map(|lam: &f64| common::naive_stft(u, lam * FRAC_1_SQRT_2, lam * FRAC_1_SQRT_2, h).norm())
        .collect();
    let (lo, hi) = on.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(lo > 0.5 * hi && lo > 0.1, "on-curve magnitudes {on:?}");
    let off = common::naive_stft(u, 8.0 * FRAC_1_SQRT_2, -8.0 * FRAC_1_SQRT_2, h).norm();
    assert!(off < 1e-10, "off-curve magnitude {off}");
}

#[test]
fn quadratic_chirp_concentrates_on_the_diagonal() {
    let set = quadratic_chirp_set(ScanConfig::default());
    let classified = set.classified_dirs();
    assert!(!classified.is_empty());
    assert!(common::max_angle_to(&classified, &diagonal()) <= 3.0);
    for t in diagonal() {
        assert!(common::max_angle_to(&[t], &classified) <= 1.0);
    }
    let far = set.entries.iter().filter(|e| common::max_angle_to(std::slice::from_ref(&e.dir), &diagonal()) > 20.0);
    assert!(far.clone().count() > 0 && far.clone().all(|e| e.slope < -8.0));
}

#[test]
fn cubic_chirp_at_s_two() {
    let g = Grid::new(1, 32768, 64.0).unwrap();
    let scan =
        ScanConfig { n_dirs: 1440, x_lim: Some(0.45 * g.l), xi_lim: Some(0.45 * g.band()), ..ScanConfig::default() };
    let set = estimate_wf(&poly_chirp(g, 0.1, 3).unwrap(), 2.0, &scan).unwrap();
    let targets = chirp_directions(0.1, 3, 2.0);
    let classified = set.classified_dirs();
    assert!(!classified.is_empty());
    assert!(common::max_angle_to(&classified, &targets) <= 5.0);
    assert!(common::max_angle_to(&targets, &classified) <= 5.0);
}

#[test]
fn lowering_the_threshold_only_adds_directions() {
    let set = quadratic_chirp_set(ScanConfig::default());
    assert!(set.is_consistent());
    let mut prev = set.rethreshold(5.0);
    for th in [0.0, -4.0, -8.0, -12.0, -20.0] {
        let next = set.rethreshold(th);
        assert!(next.is_consistent());
        for (a, b) in prev.entries.iter().zip(&next.entries) {
            assert!(!a.classified || b.classified);
        }
        prev = next;
    }
}

#[test]
fn classification_is_stable_under_ladder_rescaling() {
    let base = quadratic_chirp_set(ScanConfig::default()).classified_dirs();
    for rho in [0.5, 2.0] {
        let other = quadratic_chirp_set(ScanConfig { ladder_scale: rho, ..ScanConfig::default() }).classified_dirs();
        let d = angular_hausdorff_deg(&base, &other);
        assert!(d <= 3.0, "rho = {rho}: Hausdorff {d}");
    }
}

#[test]
fn classification_is_stable_under_window_change() {
    let base = quadratic_chirp_set(ScanConfig::default()).classified_dirs();
    let other = quadratic_chirp_set(ScanConfig { window_sigma: SQRT_2, ..ScanConfig::default() }).classified_dirs();
    let d = angular_hausdorff_deg(&base, &other);
    assert!(d <= 3.0, "Hausdorff {d}");
}

#[test]
fn product_gaussian_kernel_has_empty_relation() {
    let g = Grid::new(2, 128, 8.0).unwrap();
    let k = Signal::from_fn(g, |y| Complex64::from((-(y[0] * y[0] + y[1] * y[1]) / 2.0).exp()));
    let scan = ScanConfig { n_dirs: 1024, ..ScanConfig::default_for_dim(2) };
    let r = WfRelation::from(estimate_wf(&k, 1.0, &scan).unwrap());
    assert_eq!(r.classified().count(), 0);
    assert_eq!(r.base_dim(), Some(1));
}

#[test]
fn invalid_inputs() {
    let g = Grid::new(1, 256, 8.0).unwrap();
    let u = gaussian(g);
    assert!(matches!(estimate_wf(&u, 0.0, &ScanConfig::default()), Err(Error::Domain(_))));
    assert!(matches!(estimate_wf(&u, f64::NAN, &ScanConfig::default()), Err(Error::Domain(_))));
    let bad = ScanConfig { n_dirs: 2, ..ScanConfig::default() };
    assert!(matches!(estimate_wf(&u, 1.0, &bad), Err(Error::Config(_))));
    let wide = ScanConfig { xi_lim: Some(2.0 * g.band()), ..ScanConfig::default() };
    assert!(matches!(estimate_wf(&u, 1.0, &wide), Err(Error::Config(_))));
    let tiny = ScanConfig { x_lim: Some(0.5), lambda_min: 1.0, ..ScanConfig::default() };
    assert!(matches!(estimate_wf(&u, 1.0, &tiny), Err(Error::Config(_))));
    let flat = Grid::new(1, 64, 8.0).unwrap();
    assert!(matches!(
        estimate_wf_kernel(&gaussian(flat), &Window::gaussian(flat, 1.0).unwrap(), 1.0, &ScanConfig::default()),
        Err(Error::Usage(_))
    ));
}

#[test]
fn direction_sets_roundtrip_through_json() {
    let set = quadratic_chirp_set(ScanConfig { n_dirs: 90, ..ScanConfig::default() });
    let text = serde_json::to_string(&set).unwrap();
    let back: DirectionSet = serde_json::from_str(&text).unwrap();
    assert_eq!(back.entries.len(), set.entries.len());
    for (a, b) in back.entries.iter().zip(&set.entries) {
        assert_eq!(a, &DecayProfile { lambdas: vec![], magnitudes: vec![], ..b.clone() });
    }
}
