//! `d_t u + i D^3 u = 0`: at s = 1/2 the wave front set follows the flow
//! `(x, xi) -> (x + 3t xi^2, xi)`; at s = 1/4 it does not move at all.

use anisowf::experiment::{verify_propagation, EvolutionSpec, ExperimentSpec, Generator};
use anisowf::signal::impulse;
use anisowf::{Grid, PolySymbol};

fn main() -> anisowf::Result<()> {
    let p = PolySymbol::monomial(3)?;
    let grid = Grid::new(1, 1 << 21, 17340.0)?;
    let band = 85.0;
    let u0 = impulse(grid, band)?;
    // s = 1/4 scans long ladders; pass "full" to include it
    let full = std::env::args().any(|a| a == "full");
    let cases: &[f64] = if full { &[0.5, 0.25] } else { &[0.5] };
    for &s in cases {
        for t in [0.1, 0.2] {
            let spec = ExperimentSpec {
                signal: Generator::Impulse { band },
                grid,
                s,
                evolution: Some(EvolutionSpec { symbol: p.clone(), t }),
                ..ExperimentSpec::from_json(r#"{"name": "airy"}"#)?
            };
            let rep = verify_propagation(&spec, u0.clone())?;
            println!(
                "s = {s}, t = {t}: {:?}, {} initial / {} evolved directions, Hausdorff {:.3} deg -> {}",
                rep.mode,
                rep.initial.classified().count(),
                rep.evolved.classified().count(),
                rep.hausdorff_deg.unwrap_or(f64::INFINITY),
                if rep.pass { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(())
}
