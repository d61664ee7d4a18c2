//! The s-normalizer, the projection onto the unit sphere along s-curves,
//! and the two flavours of s-conic neighbourhoods.

use anisowf::geometry::{lambda_bound_constants, lambda_residual, ConeKind, SCone};
use anisowf::{lambda_s, project_s, PhasePoint};

fn main() -> anisowf::Result<()> {
    for s in [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0] {
        let (x, xi) = ([1.5, -0.5], [4.0, 2.0]);
        let lam = lambda_s(&x, &xi, s)?;
        let scaled = lambda_s(&[3.0, -1.0], &[4.0 * 2f64.powf(s), 2.0 * 2f64.powf(s)], s)?;
        let (c1, c2) = lambda_bound_constants(s);
        println!(
            "s = {s:.3}: lambda = {lam:.6}, lambda(2.z) / lambda(z) = {:.12}, residual = {:.1e}, bounds c1 = {c1}, c2 = {c2:.4}",
            scaled / lam,
            lambda_residual(&x, &xi, s, lam)
        );
    }

    let p = project_s(&[2.0], &[8.0], 2.0)?;
    println!("pi_2(2, 8) = ({:.6}, {:.6}), |.| = {:.12}", p[0], p[1], p[0].hypot(p[1]));

    let on_curve = PhasePoint::new(vec![0.6], vec![0.8])?.dilate(3.0, 2.0);
    let off_curve = PhasePoint::new(vec![1.0], vec![-1.0])?;
    for kind in [ConeKind::ProjectionBall, ConeKind::ScaledBall] {
        let cone = SCone::new(kind, vec![0.6, 0.8], 0.2)?;
        for (name, z) in [("(1.8, 7.2)", &on_curve), ("(1, -1)", &off_curve)] {
            let along: Vec<bool> = [0.1, 1.0, 10.0, 100.0]
                .iter()
                .map(|&mu| cone.contains(&z.dilate(mu, 2.0), 2.0))
                .collect::<anisowf::Result<_>>()?;
            println!("{kind:?} around (0.6, 0.8), eps 0.2, s = 2: {name} dilated by 0.1, 1, 10, 100 -> {along:?}");
        }
    }
    Ok(())
}
