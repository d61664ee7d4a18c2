//! Free Schrodinger evolution `d_t u + i D^2 u = 0` at s = 1: the wave front
//! set of a band-limited impulse moves along the flow `(x, xi) -> (x + 2t xi, xi)`.

use anisowf::experiment::{verify_propagation, ExperimentSpec, Generator};
use anisowf::propagator::{evolve_adjoint_roundtrip, transport_estimate};
use anisowf::signal::{gaussian, impulse};
use anisowf::{EvolutionProblem, Grid, PolySymbol};

fn main() -> anisowf::Result<()> {
    let p = PolySymbol::monomial(2)?;
    let small = Grid::new(1, 1024, 12.0)?;
    let prob = EvolutionProblem::new(p.clone(), 0.5, gaussian(small))?;
    let rep = evolve_adjoint_roundtrip(&prob, &anisowf::signal::hermite(small, 1))?;
    println!("round trip rel err {:.1e}, adjoint rel err {:.1e}", rep.roundtrip_rel_err, rep.adjoint_rel_err);

    let grid = Grid::new(1, 131072, 540.0)?;
    let band = 135.0;
    let u0 = impulse(grid, band)?;
    for t in [0.25, 0.5] {
        let tr = transport_estimate(&p, t, &u0);
        println!("t = {t}: max displacement {:.1} (limit {:.1})", tr.displacement, tr.limit);
        let spec = ExperimentSpec {
            name: format!("schrodinger-t{t}"),
            signal: Generator::Impulse { band },
            grid,
            s: 1.0,
            evolution: Some(anisowf::experiment::EvolutionSpec { symbol: p.clone(), t }),
            ..ExperimentSpec::from_json(r#"{"name": "x"}"#)?
        };
        let rep = verify_propagation(&spec, u0.clone())?;
        println!(
            "  {} initial, {} evolved directions; Hausdorff to the transported set {:.3} deg -> {}",
            rep.initial.classified().count(),
            rep.evolved.classified().count(),
            rep.hausdorff_deg.unwrap_or(f64::INFINITY),
            if rep.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
