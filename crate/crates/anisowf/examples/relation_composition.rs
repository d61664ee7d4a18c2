//! Transporting a wave front set through a kernel relation: `A' o B`.
//! The Schrodinger relation at t = 1 applied to the impulse directions
//! `(0, +-1)` gives `pi_1(+-2, +-1)`, the same as the flow.

use anisowf::experiment::{predicted_relation, KernelRegime};
use anisowf::wavefront::DecayProfile;
use anisowf::{compose, project_s, DirectionSet, PolySymbol, WfRelation};

fn main() -> anisowf::Result<()> {
    let p = PolySymbol::monomial(2)?;
    let samples = predicted_relation(&p, 1.0, 1.0, KernelRegime::Graph, 720);
    let relation = WfRelation {
        s: 1.0,
        threshold: -8.0,
        entries: samples.into_iter().map(|z| DecayProfile::marked(z, 0.0, -8.0)).collect(),
    };
    let impulse = DirectionSet {
        s: 1.0,
        threshold: -8.0,
        entries: vec![
            DecayProfile::marked(vec![0.0, 1.0], 0.0, -8.0),
            DecayProfile::marked(vec![0.0, -1.0], 0.0, -8.0),
        ],
    };
    let out = compose(&relation, &impulse, 0.5)?;
    let want = project_s(&[2.0], &[1.0], 1.0)?;
    println!("expected +-({:.4}, {:.4})", want[0], want[1]);
    for e in out.classified() {
        println!("  composed ({:.4}, {:.4})", e.dir[0], e.dir[1]);
    }
    Ok(())
}
