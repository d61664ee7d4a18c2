//! `(K u, psi)` computed as a phase-space integral of STFTs of the kernel,
//! the input and the test function, against the direct kernel application.

use anisowf::propagator::{apply_kernel, apply_via_stft, apply_via_stft_bruteforce};
use anisowf::signal::{gaussian, hermite, poly_chirp};
use anisowf::{build_kernel, gaussian_window, Grid, PolySymbol};

fn main() -> anisowf::Result<()> {
    let p = PolySymbol::monomial(2)?;
    let grid = Grid::new(1, 256, 24.0)?;
    let k = build_kernel(&p, 1.0, grid)?.kernel;
    let phi = gaussian_window(grid);
    let u = gaussian(grid).add(&hermite(grid, 1));
    let tests = vec![gaussian(grid), hermite(grid, 1), poly_chirp(grid, 0.05, 2)?];
    let via = apply_via_stft(&k, &u, &phi, &tests)?;
    let ku = apply_kernel(&k, &u)?;
    for (name, (psi, got)) in ["gaussian", "hermite-1", "narrow chirp"].iter().zip(tests.iter().zip(&via.pairings)) {
        let direct = ku.inner(psi);
        println!(
            "{name:13} direct {direct:.6}  via STFT {got:.6}  rel diff {:.1e}",
            (direct - got).norm() / direct.norm()
        );
    }

    let small = Grid::new(1, 16, 6.0)?;
    let k = build_kernel(&p, 0.3, small)?.kernel;
    let phi = gaussian_window(small);
    let (u, psi) = (gaussian(small).add(&hermite(small, 1)), hermite(small, 1));
    let fast = apply_via_stft(&k, &u, &phi, std::slice::from_ref(&psi))?.pairings[0];
    let slow = apply_via_stft_bruteforce(&k, &u, &phi, &psi)?;
    println!("n = 16: factorized {fast:.10}, literal 4-D sum {slow:.10}");
    Ok(())
}
