//! The wave front set of `u ⊗ v` sits inside `(WF(u) ∪ 0) x (WF(v) ∪ 0)`:
//! a quadratic chirp times a Gaussian only has directions over the chirp's graph.

use anisowf::signal::{gaussian, poly_chirp, tensor};
use anisowf::{estimate_wf, tensor_bound_check, Grid, ScanConfig};

fn main() -> anisowf::Result<()> {
    let line = Grid::new(1, 512, 32.0)?;
    let scan1 = ScanConfig { x_lim: Some(0.45 * line.l), ..ScanConfig::default() };
    let u = poly_chirp(line, 0.5, 2)?;
    let v = gaussian(line);
    let wu = estimate_wf(&u, 1.0, &scan1)?;
    let wv = estimate_wf(&v, 1.0, &scan1)?;
    let w = tensor(&u, &v)?;
    let scan2 = ScanConfig { x_lim: Some(0.45 * line.l), ..ScanConfig::default_for_dim(2) };
    let ww = estimate_wf(&w, 1.0, &scan2)?;
    // the 4096-point S^3 mesh has ~10 degree cells and the ladder ends near lambda = 14,
    // so directions are only resolved to about 35 degrees here
    let rep = tensor_bound_check(&wu, &wv, &ww, 35.0);
    println!(
        "WF(u): {} directions, WF(v): {}, WF(u ⊗ v): {} of {}",
        wu.classified().count(),
        wv.classified().count(),
        ww.classified().count(),
        ww.entries.len()
    );
    println!("largest distance to the product set {:.2} deg, bound holds: {}", rep.max_distance_deg, rep.holds);
    Ok(())
}
