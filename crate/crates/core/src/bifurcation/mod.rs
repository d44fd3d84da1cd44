//! Onset of instability of the homogeneous state on a periodic rectangle:
//! eigenvalues, critical coupling, cubic center-manifold coefficients and
//! the supercritical/subcritical decision.
//!
//! Conventions. Fourier coefficients `Vhat_k` are those of the rectangle
//! (see [`crate::potential::RadialPotential::fourier_coeff`]) with `kappa = 1`, and the
//! coupling is `gamma = beta 4 L1 L2 / (2 pi R^4)`, so that
//! `gamma Vhat_k = beta G(z_k)` and `1 + gamma Vhat_k = F(z_k) / z_k^2`.
//! On the unit box this is `gamma = beta / (2 pi R^4)`.
//!
//! The square `[-L, L]^2` has the degenerate pair `(1,0)`, `(0,1)`:
//! `c = 8 gamma^2 pi^2 L^2 Vhat10 (2 Vhat20 - Vhat10) / (1 + gamma Vhat20)`,
//! `d = 32 gamma^2 pi^2 L^2 Vhat10 Vhat11 / (1 + gamma Vhat11)`,
//! which for `L = 1/2` read `2 gamma^2 pi^2 ...` and `8 gamma^2 pi^2 ...`.
//! A rectangle with `L1 > L2` has the single critical mode `(1,0)` and the
//! cubic coefficient `8 gamma^2 pi^2 L2^2 Vhat10 (2 Vhat20 - Vhat-10) / (1 + gamma Vhat20)`.

pub mod amplitude;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{bisect_sign_change, mode_table, DimensionlessParams, DEFAULT_K_MAX};
use crate::error::{ensure_finite, Error, Result};
use crate::potential::{hooke_shape, HookeParams, PeriodicDomain};
use crate::spectral::MacroParams;

pub use amplitude::{
    amplitude_ode_rect, amplitude_ode_square, default_dt, diagonal_fixed_point_eigenvalues,
    stationary_amplitude, AmplitudeTrajectory,
};

/// Modes listed in a report's eigenvalue table: `0 <= k1 <= 3`, `|k2| <= 3`.
pub const REPORT_K_MAX: i64 = 3;
/// Tolerance on `lambda_{1,0} >= 0`, relative to `pi^2/L1^2`.
const ONSET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Supercritical,
    Subcritical,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Supercritical => "supercritical",
            Classification::Subcritical => "subcritical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Square,
    Rectangle,
}

fn squared_wavenumber(dom: &PeriodicDomain, k1: i64, k2: i64) -> f64 {
    let a = PI * k1 as f64 / dom.l1;
    let b = PI * k2 as f64 / dom.l2;
    a * a + b * b
}

/// `lambda_k = -pi^2 (k1^2/L1^2 + k2^2/L2^2)(1 + gamma_eff Vhat_k)` with
/// `gamma_eff = gamma 4 L1 L2 f*`.
pub fn eigenvalue(p: &MacroParams, f_star: f64, k1: i64, k2: i64) -> Result<f64> {
    if k1 == 0 && k2 == 0 {
        return Err(Error::InvalidArgument(
            "mode (0, 0) carries the conserved mass and has no eigenvalue".into(),
        ));
    }
    ensure_finite("f_star", f_star)?;
    p.validate()?;
    let gamma_eff = p.gamma * p.domain.area() * f_star;
    Ok(-squared_wavenumber(&p.domain, k1, k2) * (1.0 + gamma_eff * p.vhat(k1, k2)))
}

/// `gamma = beta 4 L1 L2 / (2 pi R^4)` (spring constant set to one).
pub fn gamma_from_beta(beta: f64, radius: f64, dom: &PeriodicDomain) -> f64 {
    beta * dom.area() / (2.0 * PI * radius.powi(4))
}

fn check_radius(radius: f64, dom: &PeriodicDomain) -> Result<()> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("R must be > 0, got {radius}")));
    }
    // R = L still fits one period; only overlap with the periodic image breaks the coefficients.
    if radius > dom.l1.min(dom.l2) {
        return Err(Error::Precondition(format!(
            "interaction radius R = {radius} exceeds min(L1, L2) = {}",
            dom.l1.min(dom.l2)
        )));
    }
    Ok(())
}

/// The `beta` at which `F(z_{1,0}) = 0`, `z_{1,0} = pi R / L1`.
pub fn beta_critical(radius: f64, alpha: f64, dom: &PeriodicDomain) -> Result<f64> {
    check_radius(radius, dom)?;
    ensure_finite("alpha", alpha)?;
    let z = PI * radius / dom.l1;
    let g = hooke_shape(alpha, z);
    if g >= 0.0 {
        return Err(Error::NoInstability(format!(
            "(pi alpha/2)[J1 H0 - J0 H1](z) - J2(z) = {} >= 0 at z_10 = {z}; mode (1,0) is stable for every beta",
            g * z * z
        )));
    }
    let beta_c = -1.0 / g;
    let p = |beta: f64| DimensionlessParams { alpha, beta };
    let root = bisect_sign_change(
        |b| -crate::dispersion::f_alpha_beta(p(b), z),
        0.0,
        2.0 * beta_c,
        1e-13 * beta_c,
    );
    if (root - beta_c).abs() > 1e-9 * beta_c {
        return Err(Error::NumericalGuard(format!(
            "closed-form beta_c = {beta_c} disagrees with the bisection root {root}"
        )));
    }
    Ok(beta_c)
}

fn positive_denominator(name: &str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::Assumption(format!(
            "1 + gamma Vhat_{name} = {value} <= 0: the slaved mode is itself unstable"
        )))
    }
}

fn c_raw(gamma: f64, l: f64, v10: f64, v20: f64, vm10: f64) -> f64 {
    8.0 * gamma * gamma * PI * PI * l * l * v10 * (2.0 * v20 - vm10) / (1.0 + gamma * v20)
}

fn d_raw(gamma: f64, l: f64, v10: f64, v11: f64) -> f64 {
    32.0 * gamma * gamma * PI * PI * l * l * v10 * v11 / (1.0 + gamma * v11)
}

/// Self-interaction coefficient `c` on the square of half side `l`.
pub fn coeff_c(gamma: f64, l: f64, v10: f64, v20: f64) -> Result<f64> {
    positive_denominator("{2,0}", 1.0 + gamma * v20)?;
    Ok(c_raw(gamma, l, v10, v20, v10))
}

/// Cross-interaction coefficient `d` on the square of half side `l`.
pub fn coeff_d(gamma: f64, l: f64, v10: f64, v11: f64) -> Result<f64> {
    positive_denominator("{1,1}", 1.0 + gamma * v11)?;
    Ok(d_raw(gamma, l, v10, v11))
}

/// Cubic coefficient of the single-mode equation on a rectangle whose short
/// half side is `l2`.
pub fn rect_cubic_coefficient(gamma: f64, l2: f64, v10: f64, v20: f64, vm10: f64) -> Result<f64> {
    positive_denominator("{2,0}", 1.0 + gamma * v20)?;
    Ok(c_raw(gamma, l2, v10, v20, vm10))
}

/// Supercritical iff `2 Vhat20 - Vhat-10 > 0`.
/// `Vhat10` does not enter the sign test; it is taken for symmetry with the
/// cubic coefficient.
pub fn classify_rectangular(_v10: f64, v20: f64, vm10: f64) -> Result<Classification> {
    let s = 2.0 * v20 - vm10;
    if s > 0.0 {
        Ok(Classification::Supercritical)
    } else if s < 0.0 {
        Ok(Classification::Subcritical)
    } else {
        Err(Error::Degenerate(
            "2 Vhat20 - Vhat-10 = 0; higher-order analysis required".into(),
        ))
    }
}

/// Supercritical iff `c < -|d|`.
pub fn classify_square(c: f64, d: f64) -> Result<Classification> {
    ensure_finite("c", c)?;
    ensure_finite("d", d)?;
    if c < -d.abs() {
        Ok(Classification::Supercritical)
    } else if c > -d.abs() {
        Ok(Classification::Subcritical)
    } else {
        Err(Error::Degenerate(format!(
            "c = -|d| = {c}; higher-order analysis required"
        )))
    }
}

/// Leading-order slaved amplitudes: `fhat_{2,0} = h20 A^2`,
/// `fhat_{1,1} = h11 A B`, `fhat_{1,-1} = h1m1 A conj(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlavedModes {
    pub h20: f64,
    pub h11: f64,
    pub h1m1: f64,
}

/// `h20 = -2 L1 L2 gamma Vhat10 / (1 + gamma Vhat20)`,
/// `h11 = h1m1 = -4 L1 L2 gamma Vhat10 / (1 + gamma Vhat11)`.
/// On the unit box these are `-gamma Vhat10 / (2(1 + gamma Vhat20))` and
/// `-gamma Vhat10 / (1 + gamma Vhat11)`.
pub fn slaved_mode_coefficients(
    gamma: f64,
    dom: &PeriodicDomain,
    v10: f64,
    v20: f64,
    v11: f64,
) -> Result<SlavedModes> {
    positive_denominator("{2,0}", 1.0 + gamma * v20)?;
    positive_denominator("{1,1}", 1.0 + gamma * v11)?;
    let h11 = -dom.area() * gamma * v10 / (1.0 + gamma * v11);
    Ok(SlavedModes {
        h20: -0.5 * dom.area() * gamma * v10 / (1.0 + gamma * v20),
        h11,
        h1m1: h11,
    })
}

/// Full analysis of one `(R, alpha)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationReport {
    #[serde(rename = "R")]
    pub radius: f64,
    pub alpha: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    pub geometry: Geometry,
    pub beta_c: f64,
    /// Coupling at which `lambda`, `c` and `d` are evaluated.
    pub beta: f64,
    pub gamma_eff: f64,
    /// `"k1,k2" -> lambda_{k1,k2}`.
    pub lambda: BTreeMap<String, f64>,
    pub c: f64,
    /// Cross coefficient; square domains only.
    pub d: Option<f64>,
    pub classification: Classification,
    pub stationary_amplitude: Option<f64>,
    pub assumptions_ok: bool,
    pub violated: Vec<String>,
}

impl BifurcationReport {
    pub fn lambda_10(&self) -> f64 {
        self.lambda["1,0"]
    }
}

/// Analyses the onset for `(R, alpha)` on `dom` at coupling `beta`
/// (default `beta_c`). Assumption failures are collected in the report;
/// only a degenerate classifier raises an error.
pub fn analyze(radius: f64, alpha: f64, dom: &PeriodicDomain, beta: Option<f64>) -> Result<BifurcationReport> {
    check_radius(radius, dom)?;
    let geometry = if dom.l1 == dom.l2 {
        Geometry::Square
    } else if dom.l1 > dom.l2 {
        Geometry::Rectangle
    } else {
        return Err(Error::Precondition(format!(
            "orient the rectangle with L1 >= L2 so that (1,0) is the critical mode; got L = ({}, {})",
            dom.l1, dom.l2
        )));
    };
    let beta_c = beta_critical(radius, alpha, dom)?;
    let beta = beta.unwrap_or(beta_c);
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
    }
    let hooke = HookeParams::from_alpha(alpha, radius)?;
    let gamma = gamma_from_beta(beta, radius, dom);
    let v = |k1: i64, k2: i64| hooke.fourier_coeff_unchecked(dom, k1, k2);
    let lam = |k1: i64, k2: i64| -squared_wavenumber(dom, k1, k2) * (1.0 + gamma * v(k1, k2));

    let mut lambda = BTreeMap::new();
    for k1 in 0..=REPORT_K_MAX {
        for k2 in -REPORT_K_MAX..=REPORT_K_MAX {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            lambda.insert(format!("{k1},{k2}"), lam(k1, k2));
        }
    }

    let critical: &[(i64, i64)] = match geometry {
        Geometry::Square => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Geometry::Rectangle => &[(1, 0), (-1, 0)],
    };
    let mut violated = Vec::new();
    let l10 = lam(1, 0);
    if l10 < -ONSET_TOL * squared_wavenumber(dom, 1, 0) {
        violated.push(format!("lambda_1,0 = {l10} < 0: beta is below onset"));
    }
    let table = mode_table(DimensionlessParams::new(alpha, beta)?, dom, radius, DEFAULT_K_MAX)?;
    for e in &table.entries {
        if critical.contains(&(e.k1, e.k2)) || e.stable {
            continue;
        }
        // one representative per +-k pair
        if (e.k1, e.k2) < (-e.k1, -e.k2) {
            continue;
        }
        violated.push(format!(
            "mode ({},{}) is not damped: 1 + gamma Vhat = {}",
            e.k1,
            e.k2,
            e.f_value / (e.z * e.z)
        ));
    }
    if !table.tail_certified {
        violated.push(format!("modes beyond |k| = {DEFAULT_K_MAX} are not certified stable"));
    }
    if 1.0 + gamma * v(2, 0) <= 0.0 {
        violated.push("1 + gamma Vhat_2,0 <= 0".into());
    }

    let (c, d, classification) = match geometry {
        Geometry::Square => {
            if 1.0 + gamma * v(1, 1) <= 0.0 {
                violated.push("1 + gamma Vhat_1,1 <= 0".into());
            }
            let c = c_raw(gamma, dom.l1, v(1, 0), v(2, 0), v(-1, 0));
            let d = d_raw(gamma, dom.l1, v(1, 0), v(1, 1));
            (c, Some(d), classify_square(c, d)?)
        }
        Geometry::Rectangle => {
            let c = c_raw(gamma, dom.l2, v(1, 0), v(2, 0), v(-1, 0));
            (c, None, classify_rectangular(v(1, 0), v(2, 0), v(-1, 0))?)
        }
    };
    let stationary_amplitude = match classification {
        Classification::Supercritical => stationary_amplitude(l10.max(0.0), c, d.unwrap_or(0.0))
            .or(Some(0.0)),
        Classification::Subcritical => None,
    };
    violated.dedup();
    Ok(BifurcationReport {
        radius,
        alpha,
        l1: dom.l1,
        l2: dom.l2,
        geometry,
        beta_c,
        beta,
        gamma_eff: gamma,
        lambda,
        c,
        d,
        classification,
        stationary_amplitude,
        assumptions_ok: violated.is_empty(),
        violated,
    })
}

/// The three reference cases `R = 1/2, 1/4, 1/8`, `alpha = 1/2`, unit box,
/// evaluated at `beta = beta_c`.
pub fn reference_cases() -> Result<Vec<BifurcationReport>> {
    [0.5, 0.25, 0.125]
        .iter()
        .map(|&r| analyze(r, 0.5, &PeriodicDomain::unit_box(), None))
        .collect()
}

/// One row of an `(R, alpha)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "R")]
    pub radius: f64,
    pub alpha: f64,
    pub beta_c: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    /// `supercritical`, `subcritical`, or the reason no class was assigned.
    pub class: String,
}

/// Evaluates every `(R, alpha)` pair at its own `beta_c`, radius-major.
/// Points run in parallel; the order is fixed by index.
pub fn sweep(radii: &[f64], alphas: &[f64], dom: &PeriodicDomain) -> Vec<SweepRow> {
    let points: Vec<(f64, f64)> = radii
        .iter()
        .flat_map(|&r| alphas.iter().map(move |&a| (r, a)))
        .collect();
    points
        .par_iter()
        .map(|&(radius, alpha)| match analyze(radius, alpha, dom, None) {
            Ok(rep) => SweepRow {
                radius,
                alpha,
                beta_c: Some(rep.beta_c),
                c: Some(rep.c),
                d: rep.d,
                class: rep.classification.to_string(),
            },
            Err(e) => SweepRow {
                radius,
                alpha,
                beta_c: None,
                c: None,
                d: None,
                class: match e {
                    Error::NoInstability(_) => "no-instability".into(),
                    Error::Degenerate(_) => "degenerate".into(),
                    _ => "error".into(),
                },
            },
        })
        .collect()
}

/// Potential coefficients and coupling of an analysed point, for building
/// amplitude equations and solver runs that share its conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsetSetup {
    pub hooke: HookeParams,
    pub domain: PeriodicDomain,
    pub gamma: f64,
}

impl OnsetSetup {
    pub fn new(radius: f64, alpha: f64, dom: PeriodicDomain, beta: f64) -> Result<Self> {
        check_radius(radius, &dom)?;
        Ok(Self {
            hooke: HookeParams::from_alpha(alpha, radius)?,
            domain: dom,
            gamma: gamma_from_beta(beta, radius, &dom),
        })
    }

    pub fn vhat(&self, k1: i64, k2: i64) -> f64 {
        self.hooke.fourier_coeff_unchecked(&self.domain, k1, k2)
    }

    /// Macro solver parameters with this coupling and potential.
    pub fn macro_params(&self, n: usize, dt: f64) -> MacroParams {
        MacroParams {
            gamma: self.gamma,
            hooke: self.hooke,
            domain: self.domain,
            n1: n,
            n2: n,
            dt,
            dealias: true,
        }
    }
}
