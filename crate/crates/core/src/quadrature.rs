//! Tensor quadrature in polar coordinates: Gauss–Legendre in `r`, trapezoid in `φ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
}

impl QuadratureSpec {
    pub const fn new(radial: usize, angular: usize) -> Self {
        Self { radial, angular }
    }

    /// Orders for full-disk energy integrals.
    pub const DISK: QuadratureSpec = QuadratureSpec::new(64, 512);

    /// Orders for half-disk integrals of composed fields.
    pub const HALF_DISK: QuadratureSpec = QuadratureSpec::new(64, 1024);
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::DISK
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (mid + half * xi, half * wi))
        .collect()
}

/// Periodic trapezoid on `[0, 2π)`.
pub fn periodic_trapezoid(n: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| (j as f64 * h, h)).collect()
}

/// Closed trapezoid on `[0, π]` with `n` panels (`n + 1` nodes).
pub fn closed_trapezoid_half(n: usize) -> Vec<(f64, f64)> {
    let h = PI / n as f64;
    (0..=n)
        .map(|j| {
            let w = if j == 0 || j == n { 0.5 * h } else { h };
            (j as f64 * h, w)
        })
        .collect()
}

/// Polar nodes `(r, φ, weight)` on the unit disk, Jacobian `r` included.
pub fn disk_nodes(spec: QuadratureSpec) -> Vec<(f64, f64, f64)> {
    let radial = gauss_legendre_interval(spec.radial, 0.0, 1.0);
    let angular = periodic_trapezoid(spec.angular);
    tensor(&radial, &angular)
}

/// Polar nodes on the closed upper half disk.
pub fn half_disk_nodes(spec: QuadratureSpec) -> Vec<(f64, f64, f64)> {
    let radial = gauss_legendre_interval(spec.radial, 0.0, 1.0);
    let angular = closed_trapezoid_half(spec.angular);
    tensor(&radial, &angular)
}

fn tensor(radial: &[(f64, f64)], angular: &[(f64, f64)]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(radial.len() * angular.len());
    for &(r, wr) in radial {
        for &(phi, wp) in angular {
            out.push((r, phi, wr * wp * r));
        }
    }
    out
}
