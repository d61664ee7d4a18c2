//! Wave front sets of a Gaussian (empty), a quadratic chirp at s = 1 and a
//! cubic chirp at s = 2, estimated from STFT decay along s-curves.

use anisowf::experiment::chirp_directions;
use anisowf::geometry::angle_between;
use anisowf::signal::{gaussian, poly_chirp};
use anisowf::{estimate_wf, DirectionSet, Grid, ScanConfig};

fn spread(set: &DirectionSet, targets: &[Vec<f64>]) -> f64 {
    set.classified()
        .map(|e| targets.iter().map(|t| angle_between(&e.dir, t)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        .to_degrees()
}

fn main() -> anisowf::Result<()> {
    let grid = Grid::new(1, 1024, 12.0)?;
    for s in [0.5, 1.0, 2.0] {
        let set = estimate_wf(&gaussian(grid), s, &ScanConfig::default())?;
        println!("gaussian, s = {s}: {} classified, largest slope {:.1}", set.classified().count(), set.max_slope());
    }

    let grid = Grid::new(1, 32768, 256.0)?;
    let scan = ScanConfig { x_lim: Some(0.45 * grid.l), ..ScanConfig::default() };
    let set = estimate_wf(&poly_chirp(grid, 0.5, 2)?, 1.0, &scan)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    println!(
        "exp(i x^2 / 2), s = 1: {} classified, all within {:.2} deg of +-(1, 1)/sqrt 2",
        set.classified().count(),
        spread(&set, &[vec![h, h], vec![-h, -h]])
    );

    let grid = Grid::new(1, 32768, 64.0)?;
    let scan = ScanConfig {
        n_dirs: 1440,
        x_lim: Some(0.45 * grid.l),
        xi_lim: Some(0.45 * grid.band()),
        ..ScanConfig::default()
    };
    let set = estimate_wf(&poly_chirp(grid, 0.1, 3)?, 2.0, &scan)?;
    println!(
        "exp(0.1 i x^3), s = 2: {} classified, all within {:.2} deg of pi_2(+-1, 0.3)",
        set.classified().count(),
        spread(&set, &chirp_directions(0.1, 3, 2.0))
    );
    print!("{}", set.rethreshold(-8.0).to_csv().lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
