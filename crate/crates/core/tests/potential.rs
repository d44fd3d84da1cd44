use std::f64::consts::PI;

use proptest::prelude::*;

use springnet::potential::{hooke_shape, SMALL_Z};
use springnet::{HookeParams, PeriodicDomain, RadialPotential};

/// Composite Simpson on [a, b] with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `(1/2pi) int V(x) cos(q x1) dx` over the disk, in polar coordinates.
/// The angular rule is the trapezoid, which is spectral for periodic integrands.
fn transform_by_quadrature(p: &HookeParams, q: f64) -> f64 {
    let n_theta = 256;
    let radial = |r: f64| {
        let ang: f64 = (0..n_theta)
            .map(|k| (q * r * (2.0 * PI * k as f64 / n_theta as f64).cos()).cos())
            .sum::<f64>()
            * (2.0 * PI / n_theta as f64);
        p.value(r) * r * ang
    };
    simpson(radial, 0.0, p.radius, 800) / (2.0 * PI)
}

#[test]
fn transform_matches_quadrature() {
    for &(kappa, l0, r) in &[(1.0, 0.25, 0.5), (2.0, 0.0, 0.3), (0.7, 0.2, 0.2), (1.0, 0.125, 0.125)] {
        let p = HookeParams::new(kappa, l0, r).unwrap();
        for s in [0.0, 0.5, 3.0, 10.0, 40.0, 120.0] {
            let want = transform_by_quadrature(&p, s);
            let got = p.fourier_transform(s);
            let scale = kappa * r.powi(4);
            assert!((got - want).abs() < 1e-10 * scale, "kappa {kappa} l0 {l0} R {r} s {s}: {got} vs {want}");
        }
    }
}

#[test]
fn periodic_coefficients_match_quadrature() {
    let dom = PeriodicDomain::new(0.7, 0.5).unwrap();
    let p = HookeParams::new(1.3, 0.1, 0.3).unwrap();
    for (k1, k2) in [(0, 0), (1, 0), (0, 1), (1, -1), (3, 2), (-5, 4)] {
        let q = dom.wavenumber(k1, k2);
        let want = 2.0 * PI * transform_by_quadrature(&p, q) / dom.area();
        let got = p.fourier_coeff(&dom, k1, k2).unwrap();
        assert!((got - want).abs() < 1e-11, "({k1},{k2}): {got} vs {want}");
    }
}

#[test]
fn coefficient_needs_radius_below_half_period() {
    let dom = PeriodicDomain::unit_box();
    let p = HookeParams::new(1.0, 0.25, 0.5).unwrap();
    assert!(p.fourier_coeff(&dom, 1, 0).is_err());
    let p = HookeParams::new(1.0, 0.25, 0.6).unwrap();
    assert!(p.fourier_coeff(&dom, 1, 0).is_err());
}

#[test]
fn integral_matches_quadrature_and_transform() {
    for &(kappa, l0, r) in &[(1.0, 0.0, 1.0), (2.0, 0.75, 1.0), (0.5, 0.3, 0.4)] {
        let p = HookeParams::new(kappa, l0, r).unwrap();
        let direct = simpson(|s| 2.0 * PI * s * p.value(s), 0.0, r, 2000);
        assert!((p.integral() - direct).abs() < 1e-12 * kappa);
        assert!((p.integral() - 2.0 * PI * p.fourier_transform(0.0)).abs() < 1e-13 * kappa);
    }
}

#[test]
fn h_stability_switches_at_three_quarters() {
    assert!(HookeParams::from_alpha(0.8, 1.0).unwrap().is_h_stable());
    assert!(!HookeParams::from_alpha(0.7, 1.0).unwrap().is_h_stable());
    assert!(!HookeParams::from_alpha(0.75, 1.0).unwrap().is_h_stable());
}

#[test]
fn shape_is_continuous_across_small_argument_branch() {
    for alpha in [0.0, 0.5, 1.0] {
        let below = hooke_shape(alpha, SMALL_Z * (1.0 - 1e-9));
        let above = hooke_shape(alpha, SMALL_Z * (1.0 + 1e-9));
        assert!((below - above).abs() < 1e-12, "alpha {alpha}: {below} vs {above}");
        assert!((hooke_shape(alpha, 0.0) - (alpha / 6.0 - 0.125)).abs() < 1e-15);
    }
}

#[test]
fn rejects_bad_parameters() {
    assert!(HookeParams::new(0.0, 0.1, 1.0).is_err());
    assert!(HookeParams::new(1.0, -0.1, 1.0).is_err());
    assert!(HookeParams::new(1.0, 0.1, 0.0).is_err());
    assert!(PeriodicDomain::new(0.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn force_is_derivative_of_value(l0 in 0.0f64..1.0, frac in 0.02f64..0.98) {
        let p = HookeParams::new(1.7, l0, 1.0).unwrap();
        let r = frac;
        let h = 1e-6;
        let d = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
        prop_assert!((d - p.force_magnitude(r)).abs() < 1e-8);
    }

    #[test]
    fn wrap_lands_in_the_cell(x in -10.0f64..10.0, y in -10.0f64..10.0, l1 in 0.1f64..3.0, l2 in 0.1f64..3.0) {
        let dom = PeriodicDomain::new(l1, l2).unwrap();
        let w = dom.wrap([x, y]);
        prop_assert!(w[0] >= -l1 && w[0] < l1 && w[1] >= -l2 && w[1] < l2);
        // wrapping moves by whole periods
        let n1 = (x - w[0]) / (2.0 * l1);
        let n2 = (y - w[1]) / (2.0 * l2);
        prop_assert!((n1 - n1.round()).abs() < 1e-9 && (n2 - n2.round()).abs() < 1e-9);
    }

    #[test]
    fn minimal_image_distance(ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in -1.0f64..1.0, by in -1.0f64..1.0) {
        let dom = PeriodicDomain::new(1.0, 1.0).unwrap();
        let (a, b) = ([ax, ay], [bx, by]);
        let d = dom.distance(a, b);
        prop_assert!((d - dom.distance(b, a)).abs() < 1e-15);
        prop_assert!(d <= 2f64.sqrt() + 1e-12);
        let mut best = f64::INFINITY;
        for i in -1..=1 {
            for j in -1..=1 {
                best = best.min((ax - bx + 2.0 * i as f64).hypot(ay - by + 2.0 * j as f64));
            }
        }
        prop_assert!((d - best).abs() < 1e-12);
    }

    #[test]
    fn coefficients_are_even_in_the_mode(k1 in -10i64..10, k2 in -10i64..10) {
        let dom = PeriodicDomain::new(0.6, 0.5).unwrap();
        let p = HookeParams::new(1.0, 0.2, 0.4).unwrap();
        let a = p.fourier_coeff(&dom, k1, k2).unwrap();
        prop_assert_eq!(a, p.fourier_coeff(&dom, -k1, -k2).unwrap());
        prop_assert_eq!(a, p.fourier_coeff(&dom, k1, -k2).unwrap());
    }
}
