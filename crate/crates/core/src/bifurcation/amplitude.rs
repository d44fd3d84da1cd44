//! Reduced amplitude equations on the center manifold, integrated with
//! classical RK4.
//!
//! Rectangle: `A' = lambda A + coef3 |A|^2 A`.
//! Square: `A' = lambda A + c|A|^2 A + d|B|^2 A` and the same with `A`, `B`
//! swapped.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};

/// Largest admissible `dt |lambda|`.
pub const MAX_DT_LAMBDA: f64 = 0.01;
/// Integration stops once `|A|` exceeds this multiple of `sqrt(|lambda/coef|)`.
pub const ESCAPE_FACTOR: f64 = 10.0;

/// Sampled trajectory. `escaped` holds `(t, |amplitude|)` when the run was
/// cut short because it left the perturbative regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeTrajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub escaped: Option<(f64, f64)>,
}

impl<S> AmplitudeTrajectory<S> {
    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Turns an escape into [`Error::LeftPerturbativeRegime`].
    pub fn check_regime(&self) -> Result<()> {
        match self.escaped {
            Some((t, amplitude)) => Err(Error::LeftPerturbativeRegime { t, amplitude }),
            None => Ok(()),
        }
    }
}

/// `min(0.01/|lambda|, 0.01/(|coef3| |A0|^2))`, falling back to `0.01` when
/// both rates vanish.
pub fn default_dt(lambda: f64, coef3: f64, a0_abs: f64) -> f64 {
    let mut dt = f64::INFINITY;
    if lambda != 0.0 {
        dt = dt.min(MAX_DT_LAMBDA / lambda.abs());
    }
    let cubic = coef3.abs() * a0_abs * a0_abs;
    if cubic > 0.0 {
        dt = dt.min(MAX_DT_LAMBDA / cubic);
    }
    if dt.is_finite() {
        dt
    } else {
        MAX_DT_LAMBDA
    }
}

fn check_inputs(lambda: f64, t_end: f64, dt: f64) -> Result<()> {
    ensure_finite("lambda", lambda)?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {t_end}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    if dt * lambda.abs() > MAX_DT_LAMBDA {
        return Err(Error::Precondition(format!(
            "dt |lambda| = {} exceeds {MAX_DT_LAMBDA}",
            dt * lambda.abs()
        )));
    }
    Ok(())
}

fn escape_bound(lambda: f64, coef: f64) -> f64 {
    if coef == 0.0 || lambda == 0.0 {
        f64::INFINITY
    } else {
        ESCAPE_FACTOR * (lambda / coef).abs().sqrt()
    }
}

fn integrate<S: Copy>(
    y0: S,
    t_end: f64,
    dt: f64,
    rhs: impl Fn(S) -> S,
    axpy: impl Fn(S, f64, S) -> S,
    size: impl Fn(S) -> f64,
    bound: f64,
) -> Result<AmplitudeTrajectory<S>> {
    let n = (t_end / dt).ceil() as usize;
    let mut traj = AmplitudeTrajectory {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        escaped: None,
    };
    let mut y = y0;
    traj.times.push(0.0);
    traj.states.push(y);
    for step in 0..n {
        let t = step as f64 * dt;
        let h = dt.min(t_end - t);
        let k1 = rhs(y);
        let k2 = rhs(axpy(y, 0.5 * h, k1));
        let k3 = rhs(axpy(y, 0.5 * h, k2));
        let k4 = rhs(axpy(y, h, k3));
        let incr = axpy(axpy(k1, 2.0, k2), 2.0, k3);
        y = axpy(y, h / 6.0, axpy(incr, 1.0, k4));
        let t_next = if step + 1 == n { t_end } else { (step + 1) as f64 * dt };
        let s = size(y);
        if !s.is_finite() {
            return Err(Error::NonFinite(format!("amplitude at t = {t_next}")));
        }
        traj.times.push(t_next);
        traj.states.push(y);
        if s > bound {
            traj.escaped = Some((t_next, s));
            break;
        }
    }
    Ok(traj)
}

/// RK4 for `A' = lambda A + coef3 |A|^2 A`.
pub fn amplitude_ode_rect(
    lambda: f64,
    coef3: f64,
    a0: Complex64,
    t_end: f64,
    dt: f64,
) -> Result<AmplitudeTrajectory<Complex64>> {
    check_inputs(lambda, t_end, dt)?;
    ensure_finite("coef3", coef3)?;
    integrate(
        a0,
        t_end,
        dt,
        |a| a * (lambda + coef3 * a.norm_sqr()),
        |y, s, k| y + k * s,
        |a| a.norm(),
        escape_bound(lambda, coef3),
    )
}

/// RK4 for the coupled square-domain system. The escape scale is
/// `sqrt(|lambda/(c + d)|)`.
pub fn amplitude_ode_square(
    lambda: f64,
    c: f64,
    d: f64,
    a0: Complex64,
    b0: Complex64,
    t_end: f64,
    dt: f64,
) -> Result<AmplitudeTrajectory<[Complex64; 2]>> {
    check_inputs(lambda, t_end, dt)?;
    ensure_finite("c", c)?;
    ensure_finite("d", d)?;
    integrate(
        [a0, b0],
        t_end,
        dt,
        |[a, b]| {
            let (na, nb) = (a.norm_sqr(), b.norm_sqr());
            [a * (lambda + c * na + d * nb), b * (lambda + c * nb + d * na)]
        },
        |[ya, yb], s, [ka, kb]| [ya + ka * s, yb + kb * s],
        |[a, b]| a.norm().max(b.norm()),
        escape_bound(lambda, c + d),
    )
}

/// `|A_st| = |B_st| = sqrt(lambda / -(c + d))`, defined when `lambda > 0`
/// and `c + d < 0`.
pub fn stationary_amplitude(lambda: f64, c: f64, d: f64) -> Option<f64> {
    let s = -(c + d);
    (lambda > 0.0 && s > 0.0).then(|| (lambda / s).sqrt())
}

/// Eigenvalues, in units of `lambda`, of the square system linearized about
/// the diagonal fixed point, restricted to real amplitudes (the phase
/// directions are neutral). The Jacobian is formed by central differences.
pub fn diagonal_fixed_point_eigenvalues(lambda: f64, c: f64, d: f64) -> Result<[f64; 2]> {
    let a = stationary_amplitude(lambda, c, d).ok_or_else(|| {
        Error::Assumption(format!(
            "no diagonal fixed point for lambda = {lambda}, c + d = {}",
            c + d
        ))
    })?;
    let field = |x: f64, y: f64| {
        [
            x * (lambda + c * x * x + d * y * y),
            y * (lambda + c * y * y + d * x * x),
        ]
    };
    let h = 1e-5 * a;
    let (p, m) = (field(a + h, a), field(a - h, a));
    let col0 = [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)];
    let (p, m) = (field(a, a + h), field(a, a - h));
    let col1 = [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)];
    let tr = col0[0] + col1[1];
    let det = col0[0] * col1[1] - col1[0] * col0[1];
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let (e1, e2) = (0.5 * tr - disc, 0.5 * tr + disc);
    Ok([e1 / lambda, e2 / lambda])
}
