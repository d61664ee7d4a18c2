//! Discrete STFT on a periodic grid: Moyal identity, exact inversion and the
//! closed form of the window's own transform.

use anisowf::signal::{gaussian, hermite, poly_chirp};
use anisowf::{gaussian_window, istft, moyal_check, stft, Grid};

fn main() -> anisowf::Result<()> {
    let grid = Grid::new(1, 1024, 12.0)?;
    let phi = gaussian_window(grid);
    let signals =
        [("gaussian", gaussian(grid)), ("hermite-1", hermite(grid, 1)), ("chirp x^2", poly_chirp(grid, 0.5, 2)?)];
    for (name, u) in &signals {
        let field = stft(u, &phi)?;
        let back = istft(&field, &phi)?;
        let (lhs, rhs) = moyal_check(u, &signals[1].1, &phi)?;
        println!(
            "{name:10} |V u|_max = {:.4}  inversion rel err = {:.2e}  Moyal |(u,f) - (Vu,Vf)| = {:.2e}",
            field.max_abs(),
            back.rel_err(u),
            (lhs - rhs).norm()
        );
    }

    let field = stft(&signals[0].1, &phi)?;
    let mut worst = 0.0f64;
    for ix in (0..grid.n).step_by(7) {
        for ik in (0..grid.n).step_by(5) {
            let (x, xi) = (grid.coord(ix), grid.freq(ik));
            let want = (-(x * x + xi * xi) / 4.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            worst = worst.max((field.at(ix, ik).norm() - want).abs());
        }
    }
    println!("max | |V phi| - exp(-(x^2 + xi^2)/4) / sqrt(2 pi) | = {worst:.2e}");
    Ok(())
}
