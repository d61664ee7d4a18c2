//! Wave front relation of the Schrodinger kernel `K_t(x, y) = k_t(x - y)` and
//! the graph condition that keeps it away from both axis submanifolds.

use anisowf::experiment::{kernel_diagnostics, EvolutionSpec, ExperimentSpec};
use anisowf::{Grid, PolySymbol};

fn main() -> anisowf::Result<()> {
    let spec = ExperimentSpec {
        grid: Grid::new(1, 256, 36.0)?,
        s: 1.0,
        evolution: Some(EvolutionSpec { symbol: PolySymbol::monomial(2)?, t: 1.0 }),
        ..ExperimentSpec::from_json(r#"{"name": "schrodinger-kernel"}"#)?
    };
    let rep = kernel_diagnostics(&spec)?;
    println!("two kernel constructions agree to {:.1e} (relative)", rep.routes_rel_diff);
    println!(
        "{} of {} directions classified; margins to the axes {:.2} and {:.2} deg (need >= {})",
        rep.graph.n_classified,
        rep.relation.entries.len(),
        rep.graph.margin_first_deg,
        rep.graph.margin_second_deg,
        rep.graph.axis_tol_deg
    );
    println!(
        "largest angle from a classified entry to {{(y + 2 xi, y, xi, -xi)}}: {:.2} deg; coverage {:.2} deg",
        rep.distance_to_prediction_deg.unwrap_or(f64::NAN),
        rep.coverage_deg.unwrap_or(f64::NAN)
    );
    println!("pass: {:?}", rep.pass);
    Ok(())
}
