//! Linear stability of the homogeneous state: the dispersion function
//! `F(z) = z^2 + beta ((pi alpha/2)[J1 H0 - J0 H1](z) - J2(z))`, the whole-space
//! instability region, discrete spectra on periodic rectangles, and
//! `(alpha, beta)` phase-diagram sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{hooke_shape, PeriodicDomain, SMALL_Z};
use crate::specfun::{bracket_unchecked, j2_unchecked};

/// Default scan window and resolution.
pub const DEFAULT_Z_MAX: f64 = 10.0;
pub const DEFAULT_SCAN_POINTS: usize = 2000;
/// Default mode cutoff for periodic spectra.
pub const DEFAULT_K_MAX: i64 = 16;
/// Upper bound of `|J1 H0 - J0 H1|` on the half line (checked in tests).
pub const BRACKET_BOUND: f64 = 1.0;

/// `alpha = l0 / R`, `beta = 2 pi kappa f* nu_f R^4 / nu_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub alpha: f64,
    pub beta: f64,
}

impl DimensionlessParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need finite alpha and beta >= 0, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Parameters of a periodic rectangle with the uniform density `1/(4 L1 L2)`:
    /// `beta = pi kappa gamma R^4 / (2 L1 L2)`.
    pub fn for_domain(kappa: f64, l0: f64, radius: f64, gamma: f64, dom: &PeriodicDomain) -> Result<Self> {
        Self::new(
            l0 / radius,
            PI * kappa * gamma * radius.powi(4) / (2.0 * dom.l1 * dom.l2),
        )
    }
}

fn combine(p: DimensionlessParams, z: f64, bracket: f64, j2: f64) -> f64 {
    if z < SMALL_Z {
        z * z * (1.0 + p.beta * hooke_shape(p.alpha, z))
    } else {
        z * z + p.beta * (0.5 * PI * p.alpha * bracket - j2)
    }
}

/// The dispersion function `F^{alpha,beta}(z)`; `F(0) = 0`.
pub fn f_alpha_beta(p: DimensionlessParams, z: f64) -> f64 {
    if z < SMALL_Z {
        combine(p, z, 0.0, 0.0)
    } else {
        combine(p, z, bracket_unchecked(z), j2_unchecked(z))
    }
}

/// Coefficient of `(z/2)^2` in the small-`z` expansion of `F`.
pub fn small_z_coefficient(p: DimensionlessParams) -> f64 {
    4.0 + 2.0 * p.alpha * p.beta / 3.0 - 0.5 * p.beta
}

/// Membership in `{alpha < 3/4, beta > 24 / (3 - 4 alpha)}`. Boundary points are stable.
pub fn wholespace_unstable(p: DimensionlessParams) -> bool {
    p.alpha < 0.75 && p.beta > 24.0 / (3.0 - 4.0 * p.alpha)
}

/// Instability test for a general potential with integral `m`:
/// unstable iff `m < 0` and `f* > -(nu_d/nu_f) / m`.
pub fn constant_state_unstable(m: f64, f_star: f64, nu_f: f64, nu_d: f64) -> Result<bool> {
    if !(f_star > 0.0 && nu_f > 0.0 && nu_d > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need f* > 0, nu_f > 0, nu_d > 0; got ({f_star}, {nu_f}, {nu_d})"
        )));
    }
    Ok(m < 0.0 && f_star > (-1.0 / m) * (nu_d / nu_f))
}

/// `F(pi) > 0`: the first modes of the box `[-R, R]^2` are stable.
pub fn stability_inequality_at_pi(alpha: f64, beta: f64) -> bool {
    f_alpha_beta(DimensionlessParams { alpha, beta }, PI) > 0.0
}

/// `z` beyond which `F > 0` for any `alpha in [0, 1]`: `z^2 > beta (pi alpha/2 B + 1)`.
pub fn positive_tail_start(p: DimensionlessParams) -> f64 {
    (p.beta * (0.5 * PI * p.alpha.abs() * BRACKET_BOUND + 1.0)).sqrt()
}

/// Precomputed bracket and `J2` on a fixed `z` grid, for sweeps.
#[derive(Debug, Clone)]
pub struct DispersionKernel {
    z: Vec<f64>,
    bracket: Vec<f64>,
    j2: Vec<f64>,
}

impl DispersionKernel {
    pub fn new(z_max: f64, n_points: usize) -> Result<Self> {
        if !(z_max > 0.0 && z_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("z_max must be > 0, got {z_max}")));
        }
        if n_points < 100 {
            return Err(Error::InvalidArgument(format!(
                "scan needs at least 100 points, got {n_points}"
            )));
        }
        let step = z_max / (n_points - 1) as f64;
        let z: Vec<f64> = (0..n_points).map(|i| i as f64 * step).collect();
        let (bracket, j2) = z
            .par_iter()
            .map(|&z| {
                if z < SMALL_Z {
                    (0.0, 0.0)
                } else {
                    (bracket_unchecked(z), j2_unchecked(z))
                }
            })
            .unzip();
        Ok(Self { z, bracket, j2 })
    }

    pub fn grid(&self) -> &[f64] {
        &self.z
    }

    /// Scan `F` on the grid, refine the minimum by golden section and the
    /// first zero by bisection.
    pub fn scan(&self, p: DimensionlessParams) -> DispersionScan {
        let f = |z: f64| f_alpha_beta(p, z);
        let values: Vec<f64> = self
            .z
            .iter()
            .zip(self.bracket.iter().zip(&self.j2))
            .map(|(&z, (&b, &j))| combine(p, z, b, j))
            .collect();

        let (imin, &fmin_grid) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid is non-empty");
        let (z_min, f_min) = if imin == 0 {
            (None, fmin_grid)
        } else if imin == values.len() - 1 {
            (Some(self.z[imin]), fmin_grid)
        } else {
            let zm = golden_section_min(f, self.z[imin - 1], self.z[imin + 1], 1e-10);
            let fm = f(zm);
            if fm <= fmin_grid {
                (Some(zm), fm)
            } else {
                (Some(self.z[imin]), fmin_grid)
            }
        };

        let z0 = values.iter().skip(1).position(|&v| v < 0.0).and_then(|i| {
            let start = i + 1;
            values[start..]
                .iter()
                .position(|&v| v >= 0.0)
                .map(|j| start + j)
                .map(|j| bisect_sign_change(f, self.z[j - 1], self.z[j], 1e-12))
        });

        DispersionScan {
            params: p,
            z_grid: self.z.clone(),
            f_values: values,
            z_min,
            f_min,
            z0,
        }
    }
}

/// Result of scanning `F` on `[0, z_max]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionScan {
    pub params: DimensionlessParams,
    pub z_grid: Vec<f64>,
    pub f_values: Vec<f64>,
    /// Interior minimiser; absent when the minimum sits at `z = 0`.
    pub z_min: Option<f64>,
    pub f_min: f64,
    /// Right end of the first negative interval of `F`: `F < 0` just below it
    /// and `F >= 0` just above.
    pub z0: Option<f64>,
}

/// Scan `F` over `[0, z_max]` on `n_points` uniform points.
pub fn scan(p: DimensionlessParams, z_max: f64, n_points: usize) -> Result<DispersionScan> {
    Ok(DispersionKernel::new(z_max, n_points)?.scan(p))
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Bisection for a sign change of `f` from negative at `a` to non-negative at `b`.
pub(crate) fn bisect_sign_change(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// One row of a periodic spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub k1: i64,
    pub k2: i64,
    pub z: f64,
    pub f_value: f64,
    /// Growth rate `lambda = -F(z) / R^2`.
    pub lambda: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeStabilityTable {
    pub entries: Vec<ModeEntry>,
    /// Whether every mode outside the table is certified stable by
    /// [`positive_tail_start`].
    pub tail_certified: bool,
}

impl ModeStabilityTable {
    pub fn unstable(&self) -> impl Iterator<Item = &ModeEntry> {
        self.entries.iter().filter(|e| !e.stable)
    }

    pub fn all_stable(&self) -> bool {
        self.entries.iter().all(|e| e.stable)
    }
}

/// Evaluates `F` at `z_{k1,k2} = pi R sqrt(k1^2/L1^2 + k2^2/L2^2)` for all
/// `|k1|, |k2| <= k_max` except `(0, 0)`.
pub fn mode_table(
    p: DimensionlessParams,
    dom: &PeriodicDomain,
    radius: f64,
    k_max: i64,
) -> Result<ModeStabilityTable> {
    // R = L is admitted: the disk still fits one period up to a null set.
    if !(radius > 0.0 && radius <= dom.l1.min(dom.l2)) {
        return Err(Error::Precondition(format!(
            "need 0 < R <= min(L1, L2); R = {radius}, L = ({}, {})",
            dom.l1, dom.l2
        )));
    }
    if k_max < 1 {
        return Err(Error::InvalidArgument(format!("k_max must be >= 1, got {k_max}")));
    }
    let mut entries = Vec::with_capacity(((2 * k_max + 1) * (2 * k_max + 1) - 1) as usize);
    for k1 in -k_max..=k_max {
        for k2 in -k_max..=k_max {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let z = radius * dom.wavenumber(k1, k2);
            let f_value = f_alpha_beta(p, z);
            entries.push(ModeEntry {
                k1,
                k2,
                z,
                f_value,
                lambda: -f_value / (radius * radius),
                stable: f_value > 0.0,
            });
        }
    }
    let first_outside = PI * radius * (k_max + 1) as f64 / dom.l1.max(dom.l2);
    Ok(ModeStabilityTable {
        entries,
        tail_certified: first_outside > positive_tail_start(p),
    })
}

/// One point of an `(alpha, beta)` phase diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub alpha: f64,
    pub beta: f64,
    pub f_min: f64,
    pub z_min: Option<f64>,
    pub z0: Option<f64>,
    pub unstable: bool,
}

/// Sweeps every `(alpha, beta)` pair, alpha-major. Points are independent
/// and evaluated in parallel; the output order is fixed by index.
pub fn phase_diagram(alphas: &[f64], betas: &[f64], z_max: f64, n_points: usize) -> Result<Vec<PhaseRow>> {
    let kernel = DispersionKernel::new(z_max, n_points)?;
    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    points
        .par_iter()
        .map(|&(alpha, beta)| {
            let p = DimensionlessParams::new(alpha, beta)?;
            let s = kernel.scan(p);
            Ok(PhaseRow {
                alpha,
                beta,
                f_min: s.f_min,
                z_min: s.z_min,
                z0: s.z0,
                unstable: wholespace_unstable(p),
            })
        })
        .collect()
}
