use std::f64::consts::{FRAC_PI_4, PI};

use disk_eit::partial::{arc_data, arc_invert, half_disk_data, half_disk_invert};
use disk_eit::quadrature::gauss_legendre_interval;
use disk_eit::{arc_forward_oracle, ConformalMap, FieldKind, FourierRadialField, QuadratureSpec, RadialProfile};
use num::complex::Complex64;

const CENTER: Complex64 = Complex64::new(0.0, 0.5);
const RADIUS: f64 = 0.35;

fn bump_profile(s: f64) -> f64 {
    let t = s / RADIUS;
    if t >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn bump(z: Complex64) -> f64 {
    bump_profile((z - CENTER).norm())
}

/// `∫_Ω bump ∇Im(ψ⁻¹(z)^n)·∇Im(ψ⁻¹(z)^k)` in polar coordinates about the bump centre.
fn disk_side_pairing(map: &ConformalMap, n: i32, k: i32, radial: usize, angular: usize) -> f64 {
    let h = 2.0 * PI / angular as f64;
    let mut total = 0.0;
    for (s, w) in gauss_legendre_interval(radial, 0.0, RADIUS) {
        let g = bump_profile(s);
        for j in 0..angular {
            let z = CENTER + Complex64::from_polar(s, h * j as f64);
            let x = map.psi_inverse(z).unwrap();
            let dx = 1.0 / map.psi_derivative(x).unwrap();
            let fu = n as f64 * x.powi(n - 1) * dx;
            let fv = k as f64 * x.powi(k - 1) * dx;
            total += w * h * s * g * (fu * fv.conj()).re;
        }
    }
    total
}

#[test]
fn bump_pairing_agrees_with_disk_side_quadrature() {
    let map = ConformalMap::from_alpha(FRAC_PI_4).unwrap();
    let scale = disk_side_pairing(&map, 1, 1, 128, 512).abs();
    for (n, k) in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3)] {
        let arc = arc_forward_oracle(bump, n as u32, k as u32, &map, QuadratureSpec::new(256, 2048)).unwrap();
        let disk = disk_side_pairing(&map, n, k, 128, 512);
        let err = (arc - disk).abs() / disk.abs().max(scale);
        assert!(err <= 1e-6, "n={n} k={k}: arc {arc} disk {disk} rel {err:.2e}");
    }
}

#[test]
fn constant_field_reduces_to_half_disk_value() {
    let map = ConformalMap::from_alpha(PI / 3.0).unwrap();
    let v = arc_forward_oracle(|_| 1.0, 1, 1, &map, QuadratureSpec::HALF_DISK).unwrap();
    assert!((v - PI / 2.0).abs() < 1e-12);
    assert_eq!(arc_forward_oracle(|_| 0.0, 2, 1, &map, QuadratureSpec::HALF_DISK).unwrap(), 0.0);
}

#[test]
fn near_half_plane_map_matches_theta_pipeline() {
    let alpha = PI / 2.0 - 1e-7;
    let map = ConformalMap::from_alpha(alpha).unwrap();
    let field = FourierRadialField::new(FieldKind::Conductivity)
        .with_cos(0, RadialProfile::constant(1.0))
        .with_cos(2, RadialProfile::monomial(2, 0.5));
    let n = 4;
    let quad = QuadratureSpec::new(32, 256);
    let data = half_disk_data(|r, phi| field.value(r, phi), n, quad);
    let half = half_disk_invert(&data, n, Default::default()).unwrap();
    let arc = arc_invert(&data, &map, n, Default::default()).unwrap();
    for (r, phi) in [(0.3, 0.4), (0.6, 2.0), (0.8, 4.0), (0.1, 5.5)] {
        let z = Complex64::from_polar(r, phi);
        let x = ConformalMap::theta_inverse(z);
        let want = half.eval(x.norm(), x.arg()).unwrap();
        assert!((arc.eval(z).unwrap() - want).abs() < 1e-5, "at {z}");
    }
}

#[test]
fn arc_roundtrip_for_transported_span_field() {
    let map = ConformalMap::from_alpha(0.6).unwrap();
    let field = |z: Complex64| map.psi_inverse(z).map_or(0.0, |x| x.im * x.im * (1.0 - x.norm_sqr()));
    let data = arc_data(field, &map, 4, QuadratureSpec::HALF_DISK);
    let rec = arc_invert(&data, &map, 4, Default::default()).unwrap();
    for (r, phi) in [(0.2, 1.0), (0.5, 2.5), (0.9, 1.6), (0.7, 4.5)] {
        let z = Complex64::from_polar(r, phi);
        assert!((rec.eval(z).unwrap() - field(z)).abs() < 1e-9, "at {z}");
    }
}
