use anisowf::propagator::{
    apply_kernel, apply_via_stft, apply_via_stft_bruteforce, build_kernel_banded, evolve_adjoint_roundtrip,
    transport_estimate, KERNEL_MAX_ENTRIES,
};
use anisowf::signal::{gaussian, hermite, poly_chirp};
use anisowf::{build_kernel, evolve, gaussian_window, Error, EvolutionProblem, Grid, PolySymbol, Signal};
use num_complex::Complex64;
use proptest::prelude::*;

fn schrodinger() -> PolySymbol {
    PolySymbol::monomial(2).unwrap()
}

fn airy_like() -> PolySymbol {
    PolySymbol::univariate(&[(3, 1.0), (1, -0.5)]).unwrap()
}

fn run(p: &PolySymbol, t: f64, u: &Signal) -> Signal {
    evolve(&EvolutionProblem::new(p.clone(), t, u.clone()).unwrap()).unwrap()
}

#[test]
fn gaussian_under_the_free_schrodinger_group() {
    let g = Grid::new(1, 1024, 16.0).unwrap();
    let u0 = Signal::from_fn(g, |y| Complex64::from((-y[0] * y[0] / 2.0).exp()));
    for t in [0.1, 0.5, 1.0] {
        let a = Complex64::new(1.0, 2.0 * t);
        let exact = Signal::from_fn(g, |y| (-(y[0] * y[0]) / (2.0 * a)).exp() / a.sqrt());
        let got = run(&schrodinger(), t, &u0);
        let err = got.sub(&exact).max_abs();
        assert!(err < 1e-8, "t = {t}: max error {err}");
    }
}

#[test]
fn time_zero_is_the_identity() {
    let g = Grid::new(1, 256, 12.0).unwrap();
    let u = hermite(g, 2);
    assert_eq!(run(&airy_like(), 0.0, &u), u);
}

#[test]
fn roundtrip_and_adjoint() {
    let g = Grid::new(1, 512, 16.0).unwrap();
    let prob = EvolutionProblem::new(airy_like(), 0.7, hermite(g, 3)).unwrap();
    let rep = evolve_adjoint_roundtrip(&prob, &poly_chirp(g, 0.3, 2).unwrap()).unwrap();
    assert!(rep.roundtrip_rel_err < 1e-12 && rep.adjoint_rel_err < 1e-12, "{rep:?}");
}

#[test]
fn kernel_quadrature_matches_the_multiplier() {
    let g = Grid::new(1, 512, 24.0).unwrap();
    let ks = build_kernel(&schrodinger(), 0.4, g).unwrap();
    assert!(ks.routes_rel_diff < 1e-10, "routes differ by {}", ks.routes_rel_diff);
    for u in [gaussian(g), hermite(g, 3)] {
        let direct = run(&schrodinger(), 0.4, &u);
        let via = apply_kernel(&ks.kernel, &u).unwrap();
        assert!(via.rel_err(&direct) < 1e-10, "relative error {}", via.rel_err(&direct));
    }
    let banded = build_kernel_banded(&airy_like(), 0.2, g, Some(0.6 * g.band())).unwrap();
    assert!(banded.routes_rel_diff < 1e-10);
}

#[test]
fn kernel_entries_depend_on_the_difference_only() {
    let g = Grid::new(1, 64, 8.0).unwrap();
    let k = build_kernel(&airy_like(), 0.3, g).unwrap();
    let n = g.n;
    for i in 0..n {
        for j in 0..n {
            assert_eq!(k.kernel.values[i * n + j], k.kernel.values[((i + 1) % n) * n + (j + 1) % n]);
        }
    }
}

#[test]
fn stft_pairing_of_a_rank_one_kernel() {
    let g = Grid::new(1, 256, 20.0).unwrap();
    let (f, h) = (hermite(g, 1), gaussian(g));
    let k = Signal::from_fn(g.doubled().unwrap(), |y| {
        let (i, j) = (((y[0] + g.l) / g.h()).round() as usize, ((y[1] + g.l) / g.h()).round() as usize);
        f.values[i] * h.values[j]
    });
    let u = poly_chirp(g, 0.2, 2).unwrap();
    let psi = hermite(g, 1).add(&gaussian(g));
    let hu: Complex64 = h.values.iter().zip(&u.values).map(|(a, b)| a * b).sum::<Complex64>() * g.h();
    let want = f.inner(&psi) * hu;
    let got = apply_via_stft(&k, &u, &gaussian_window(g), &[psi]).unwrap().pairings[0];
    assert!((got - want).norm() < 1e-9 * want.norm().max(1e-3), "{got} vs {want}");
}

#[test]
fn stft_pairing_of_the_identity_kernel() {
    let g = Grid::new(1, 256, 20.0).unwrap();
    let k0 = build_kernel(&schrodinger(), 0.0, g).unwrap().kernel;
    let u = hermite(g, 2).add(&poly_chirp(g, 0.1, 2).unwrap());
    let tests = [gaussian(g), hermite(g, 2), hermite(g, 5)];
    let via = apply_via_stft(&k0, &u, &gaussian_window(g), &tests).unwrap();
    for (psi, got) in tests.iter().zip(&via.pairings) {
        let want = u.inner(psi);
        assert!((got - want).norm() < 1e-9 * (1.0 + want.norm()));
    }
    assert!(via.synthesized.rel_err(&u) < 1e-9);
}

#[test]
fn factorized_pairing_equals_the_literal_sum() {
    let g = Grid::new(1, 16, 6.0).unwrap();
    let k = build_kernel(&schrodinger(), 0.3, g).unwrap().kernel;
    let phi = gaussian_window(g);
    let u = gaussian(g).add(&hermite(g, 1));
    for psi in [hermite(g, 1), gaussian(g)] {
        let fast = apply_via_stft(&k, &u, &phi, std::slice::from_ref(&psi)).unwrap().pairings[0];
        let slow = apply_via_stft_bruteforce(&k, &u, &phi, &psi).unwrap();
        assert!((fast - slow).norm() < 1e-12 * (1.0 + slow.norm()), "{fast} vs {slow}");
    }
    let big = Grid::new(1, 64, 6.0).unwrap();
    let kb = build_kernel(&schrodinger(), 0.3, big).unwrap().kernel;
    let r = apply_via_stft_bruteforce(&kb, &gaussian(big), &gaussian_window(big), &gaussian(big));
    assert!(matches!(r, Err(Error::Config(_))));
}

#[test]
fn transport_estimate_examples() {
    let g = Grid::new(1, 1024, 40.0).unwrap();
    let u = gaussian(g);
    let est = transport_estimate(&schrodinger(), 0.5, &u);
    assert_eq!(est.limit, 10.0);
    let want = 0.5 * 2.0 * est.resolved_band;
    assert!((est.displacement - want).abs() < 1e-12);
    assert!(est.ok());
    assert!(!transport_estimate(&schrodinger(), 50.0, &u).ok());
}

#[test]
fn guards_and_mismatches() {
    let g = Grid::new(1, 64, 8.0).unwrap();
    let two = PolySymbol::new(2, 2, [(vec![2, 0], 1.0)].into_iter().collect()).unwrap();
    assert!(matches!(EvolutionProblem::new(two, 1.0, gaussian(g)), Err(Error::Usage(_))));
    assert!(matches!(EvolutionProblem::new(schrodinger(), f64::NAN, gaussian(g)), Err(Error::Usage(_))));
    let side = (KERNEL_MAX_ENTRIES as f64).sqrt() as usize * 2;
    let huge = Grid::new(1, side, 8.0).unwrap();
    assert!(matches!(build_kernel(&schrodinger(), 1.0, huge), Err(Error::Config(_))));
    let other = Grid::new(1, 32, 8.0).unwrap();
    let k = build_kernel(&schrodinger(), 1.0, g).unwrap().kernel;
    assert!(matches!(apply_kernel(&k, &gaussian(other)), Err(Error::Usage(_))));
    assert!(matches!(apply_via_stft(&k, &gaussian(other), &gaussian_window(other), &[]), Err(Error::Usage(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_is_unitary_and_a_group(t1 in -2.0f64..2.0, t2 in -2.0f64..2.0, k in 0usize..6) {
        let g = Grid::new(1, 256, 16.0).unwrap();
        let p = airy_like();
        let u = hermite(g, k);
        let a = run(&p, t1, &u);
        prop_assert!((a.norm() - u.norm()).abs() < 1e-12);
        let two = run(&p, t2, &a);
        let one = run(&p, t1 + t2, &u);
        prop_assert!(two.rel_err(&one) < 1e-10);
    }
}
