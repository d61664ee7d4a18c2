//! Direction meshes on the unit spheres `S^1` and `S^3`.

use crate::geometry::angle_between;

/// `n` equally spaced angles `2 pi i / n`, as unit vectors `(cos, sin)`.
///
/// The mesh contains both coordinate axes whenever `n` is a multiple of 4.
pub fn circle_mesh(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Super-Fibonacci spiral on `S^3` with `n` points.
pub fn fibonacci_s3(n: usize) -> Vec<Vec<f64>> {
    let phi = std::f64::consts::SQRT_2;
    let psi = 1.533_751_168_755_204_3;
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / n as f64).sqrt();
            let big_r = (1.0 - s / n as f64).sqrt();
            let alpha = 2.0 * std::f64::consts::PI * s / phi;
            let beta = 2.0 * std::f64::consts::PI * s / psi;
            vec![r * alpha.sin(), r * alpha.cos(), big_r * beta.sin(), big_r * beta.cos()]
        })
        .collect()
}

/// Typical nearest-neighbour spacing (radians) of an `n`-point quasi-uniform mesh on `S^3`.
pub fn s3_spacing(n: usize) -> f64 {
    // volume of S^3 is 2 pi^2; cells are roughly cubes
    (2.0 * std::f64::consts::PI.powi(2) / n as f64).cbrt()
}

/// For each mesh point, the indices of points within angular radius `eps` (itself included).
pub fn neighbours(mesh: &[Vec<f64>], eps: f64) -> Vec<Vec<usize>> {
    let c = eps.cos();
    mesh.iter()
        .map(|a| {
            mesh.iter()
                .enumerate()
                .filter(|(_, b)| {
                    let dot: f64 = a.iter().zip(b.iter()).map(|(p, q)| p * q).sum();
                    dot >= c - 1e-12 && angle_between(a, b) <= eps + 1e-12
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}
