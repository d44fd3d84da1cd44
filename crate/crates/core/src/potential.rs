//! Compactly supported radial interaction potentials on the plane and on a
//! periodic rectangle. Only the Hookean spring potential is implemented.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bracket_unchecked, j2_unchecked};

/// Below this value of `z = |k| R` the Fourier formulas switch to a Taylor
/// expansion; the closed form cancels to `O(z^2)` there.
pub const SMALL_Z: f64 = 1e-3;

/// Rectangle `[-l1, l1] x [-l2, l2]` with opposite edges identified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicDomain {
    pub l1: f64,
    pub l2: f64,
}

impl PeriodicDomain {
    pub fn new(l1: f64, l2: f64) -> Result<Self> {
        if !(l1.is_finite() && l2.is_finite() && l1 > 0.0 && l2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "domain half-lengths must be positive and finite, got ({l1}, {l2})"
            )));
        }
        Ok(Self { l1, l2 })
    }

    /// The unit periodic box `[-1/2, 1/2]^2`.
    pub fn unit_box() -> Self {
        Self { l1: 0.5, l2: 0.5 }
    }

    pub fn area(&self) -> f64 {
        4.0 * self.l1 * self.l2
    }

    /// Density of the uniform probability measure, `1 / (4 L1 L2)`.
    pub fn uniform_density(&self) -> f64 {
        1.0 / self.area()
    }

    /// Wraps a point into `[-l1, l1) x [-l2, l2)`.
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        [wrap_coord(p[0], self.l1), wrap_coord(p[1], self.l2)]
    }

    /// Minimal-image displacement `a - b`.
    pub fn displacement(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        [
            minimal_image(a[0] - b[0], self.l1),
            minimal_image(a[1] - b[1], self.l2),
        ]
    }

    pub fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let d = self.displacement(a, b);
        d[0].hypot(d[1])
    }

    /// Wavenumber magnitude `pi * sqrt(k1^2/L1^2 + k2^2/L2^2)` of mode `(k1, k2)`.
    pub fn wavenumber(&self, k1: i64, k2: i64) -> f64 {
        let a = k1 as f64 / self.l1;
        let b = k2 as f64 / self.l2;
        PI * a.hypot(b)
    }
}

fn wrap_coord(x: f64, half: f64) -> f64 {
    let period = 2.0 * half;
    let mut y = (x + half).rem_euclid(period) - half;
    // rem_euclid can round up to exactly `period`
    if y >= half {
        y -= period;
    }
    y
}

fn minimal_image(d: f64, half: f64) -> f64 {
    let period = 2.0 * half;
    d - period * (d / period).round()
}

/// A radial potential with compact support, as used by both the particle
/// simulator and the continuum solvers.
pub trait RadialPotential {
    /// Support radius.
    fn radius(&self) -> f64;
    /// Potential at separation `r`.
    fn value(&self, r: f64) -> f64;
    /// Radial derivative `U'(r)`; the force on the first particle is
    /// `-U'(r)` along the unit separation vector.
    fn force_magnitude(&self, r: f64) -> f64;
    /// `int_{R^2} V(x) dx`.
    fn integral(&self) -> f64;
    /// `(1/2pi) int e^{-i x.y} V(x) dx` at `|y| = s`.
    fn fourier_transform(&self, s: f64) -> f64;
    /// Fourier coefficient `(1/(4 L1 L2)) int V e_{-k1,-k2}` on a periodic rectangle.
    fn fourier_coeff(&self, dom: &PeriodicDomain, k1: i64, k2: i64) -> Result<f64>;
}

/// Spring intensity, rest length and interaction radius of the Hookean
/// potential `V(r) = kappa/2 [(r - l0)^2 - (R - l0)^2]` for `r < R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HookeParams {
    pub kappa: f64,
    pub l0: f64,
    pub radius: f64,
}

impl HookeParams {
    pub fn new(kappa: f64, l0: f64, radius: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be > 0, got {kappa}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("R must be > 0, got {radius}")));
        }
        if !(l0.is_finite() && l0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("l0 must be >= 0, got {l0}")));
        }
        let p = Self { kappa, l0, radius };
        if !(0.0..=1.0).contains(&p.alpha()) {
            log_warning(&format!(
                "alpha = l0/R = {} lies outside [0, 1]",
                p.alpha()
            ));
        }
        Ok(p)
    }

    /// Hookean parameters with `kappa = 1` and `l0 = alpha R`.
    pub fn from_alpha(alpha: f64, radius: f64) -> Result<Self> {
        Self::new(1.0, alpha * radius, radius)
    }

    pub fn alpha(&self) -> f64 {
        self.l0 / self.radius
    }

    /// `M = pi kappa R^3 (l0/3 - R/4)`; positive means H-stable.
    pub fn h_stability_integral(&self) -> f64 {
        PI * self.kappa * self.radius.powi(3) * (self.l0 / 3.0 - self.radius / 4.0)
    }

    pub fn is_h_stable(&self) -> bool {
        self.h_stability_integral() > 0.0
    }
}

fn log_warning(msg: &str) {
    eprintln!("warning: {msg}");
}

/// `((pi alpha/2) [J1 H0 - J0 H1](z) - J2(z)) / z^2`, the shape function
/// shared by every Fourier formula of the Hookean potential.
pub fn hooke_shape(alpha: f64, z: f64) -> f64 {
    if z < SMALL_Z {
        let z2 = z * z;
        let a = 1.0 / 6.0 + z2 * (-1.0 / 80.0 + z2 * (1.0 / 2688.0 - z2 / 165_888.0));
        let b = 1.0 / 8.0 + z2 * (-1.0 / 96.0 + z2 * (1.0 / 3072.0 - z2 / 184_320.0));
        alpha * a - b
    } else {
        (0.5 * PI * alpha * bracket_unchecked(z) - j2_unchecked(z)) / (z * z)
    }
}

impl RadialPotential for HookeParams {
    fn radius(&self) -> f64 {
        self.radius
    }

    fn value(&self, r: f64) -> f64 {
        if r < self.radius {
            let a = r - self.l0;
            let b = self.radius - self.l0;
            0.5 * self.kappa * (a * a - b * b)
        } else {
            0.0
        }
    }

    fn force_magnitude(&self, r: f64) -> f64 {
        // r = 0 has no direction; coincident particles exert no force.
        if r <= 0.0 || r >= self.radius {
            0.0
        } else {
            self.kappa * (r - self.l0)
        }
    }

    fn integral(&self) -> f64 {
        self.h_stability_integral()
    }

    fn fourier_transform(&self, s: f64) -> f64 {
        self.kappa * self.radius.powi(4) * hooke_shape(self.alpha(), s * self.radius)
    }

    fn fourier_coeff(&self, dom: &PeriodicDomain, k1: i64, k2: i64) -> Result<f64> {
        if self.radius >= dom.l1.min(dom.l2) {
            return Err(Error::Precondition(format!(
                "interaction radius R = {} must be smaller than min(L1, L2) = {}",
                self.radius,
                dom.l1.min(dom.l2)
            )));
        }
        Ok(self.fourier_coeff_unchecked(dom, k1, k2))
    }
}

impl HookeParams {
    pub(crate) fn fourier_coeff_unchecked(&self, dom: &PeriodicDomain, k1: i64, k2: i64) -> f64 {
        let z = self.radius * dom.wavenumber(k1, k2);
        2.0 * PI * self.fourier_transform(z / self.radius) / dom.area()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_values() {
        let p = HookeParams::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(p.value(0.0), -0.5);
        assert_eq!(p.value(1.0), 0.0);
        let p = HookeParams::new(2.0, 0.5, 1.0).unwrap();
        assert_eq!(p.value(0.5), -0.25);
    }

    #[test]
    fn continuity_at_support_edge() {
        for &(kappa, l0, r) in &[(1.0, 0.0, 1.0), (3.0, 0.7, 0.25), (0.2, 1.0, 2.0)] {
            let p = HookeParams::new(kappa, l0, r).unwrap();
            let jump = (p.value(r - 1e-9) - p.value(r + 1e-9)).abs();
            assert!(jump <= 1e-8 * kappa * r * r, "jump {jump}");
        }
    }

    #[test]
    fn force_values() {
        let p = HookeParams::new(1.0, 0.5, 1.0).unwrap();
        assert_eq!(p.force_magnitude(0.5), 0.0);
        assert_eq!(p.force_magnitude(1.2), 0.0);
        assert_eq!(p.force_magnitude(0.0), 0.0);
        let p = HookeParams::new(3.0, 0.25, 1.0).unwrap();
        assert_eq!(p.force_magnitude(0.75), 1.5);
    }

    #[test]
    fn h_stability_threshold() {
        let at = HookeParams::new(1.0, 0.75, 1.0).unwrap();
        assert!(at.h_stability_integral().abs() < 1e-15);
        let above = HookeParams::new(1.0, 0.75 + 1e-12, 1.0).unwrap();
        let below = HookeParams::new(1.0, 0.75 - 1e-12, 1.0).unwrap();
        assert!(above.h_stability_integral() > 0.0);
        assert!(below.h_stability_integral() < 0.0);
        let p = HookeParams::new(1.0, 1.0, 1.0).unwrap();
        assert!((p.h_stability_integral() - PI / 12.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(HookeParams::new(0.0, 0.1, 1.0).is_err());
        assert!(HookeParams::new(1.0, -0.1, 1.0).is_err());
        assert!(HookeParams::new(1.0, 0.1, 0.0).is_err());
        assert!(PeriodicDomain::new(0.0, 1.0).is_err());
    }

    #[test]
    fn transform_limit_at_zero() {
        let p = HookeParams::new(1.3, 0.4, 0.8).unwrap();
        let m = p.h_stability_integral();
        assert!((p.fourier_transform(0.0) - m / (2.0 * PI)).abs() < 1e-15);
        assert!((p.fourier_transform(1e-4) - m / (2.0 * PI)).abs() < 1e-6);
    }

    #[test]
    fn taylor_branch_matches_closed_form() {
        for &alpha in &[0.0, 0.3, 0.5, 1.0] {
            let z = SMALL_Z;
            let closed = (0.5 * PI * alpha * bracket_unchecked(z) - j2_unchecked(z)) / (z * z);
            let taylor = hooke_shape(alpha, z * (1.0 - 1e-12));
            assert!((closed - taylor).abs() < 1e-9, "{closed} vs {taylor}");
            let z = 0.05;
            let closed = (0.5 * PI * alpha * bracket_unchecked(z) - j2_unchecked(z)) / (z * z);
            let z2 = z * z;
            let a = 1.0 / 6.0 + z2 * (-1.0 / 80.0 + z2 * (1.0 / 2688.0 - z2 / 165_888.0));
            let b = 1.0 / 8.0 + z2 * (-1.0 / 96.0 + z2 * (1.0 / 3072.0 - z2 / 184_320.0));
            assert!((closed - (alpha * a - b)).abs() < 1e-12);
        }
    }

    #[test]
    fn rect_coefficient_mean_mode() {
        let p = HookeParams::new(1.0, 0.3, 0.4).unwrap();
        let dom = PeriodicDomain::new(0.6, 0.5).unwrap();
        let c = p.fourier_coeff(&dom, 0, 0).unwrap();
        assert!((c - p.h_stability_integral() / dom.area()).abs() < 1e-15);
        let too_big = PeriodicDomain::new(0.4, 1.0).unwrap();
        assert!(matches!(p.fourier_coeff(&too_big, 1, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn wrap_and_minimal_image() {
        let dom = PeriodicDomain::new(0.5, 1.0).unwrap();
        let w = dom.wrap([0.75, -1.5]);
        assert!((w[0] + 0.25).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
        let d = dom.distance([0.45, 0.0], [-0.45, 0.0]);
        assert!((d - 0.1).abs() < 1e-12);
    }
}
