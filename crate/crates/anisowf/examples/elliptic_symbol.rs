//! `a(z) = g(|z|) lambda_s(z)^m` is comparable to `mu_s(z)^m = (1 + |x| + |xi|^(1/s))^m`
//! away from the origin.

use anisowf::symbols::{ellipticity_check, EllipticSymbol};
use anisowf::PhasePoint;
use rand::{Rng, SeedableRng};

fn main() -> anisowf::Result<()> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for (s, m) in [(0.5, 2.0), (1.0, 1.0), (2.0, -1.5), (3.0, 3.0)] {
        let sample: Vec<PhasePoint> = (0..20_000)
            .map(|_| {
                let r = 10f64.powf(rng.gen_range(-1.0..4.0));
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                PhasePoint::new(vec![r * th.cos()], vec![r * th.sin()])
            })
            .collect::<anisowf::Result<_>>()?;
        let rep = ellipticity_check(&EllipticSymbol::new(s, m)?, &sample);
        println!(
            "s = {s}, m = {m}: {:.4} <= |a| / mu^m <= {:.4} over {} points, pass {}",
            rep.c1, rep.c2, rep.n_used, rep.pass
        );
    }
    Ok(())
}
