//! Pseudospectral solver for `f_t = Lap f + gamma div(f grad(V * f))` on a
//! periodic rectangle.
//!
//! Coefficients follow the convention `f(x) = sum_k fhat_k e_k(x)` with
//! `e_k(x) = exp(i pi (k1 x1/L1 + k2 x2/L2))`, so `fhat_{0,0}` is the mean of
//! `f` and a probability density has `fhat_{0,0} = 1/(4 L1 L2)`. The
//! collocation grid is `x = -L + 2 L j / n`, which makes the forward map a
//! DFT up to the sign `(-1)^(k1 + k2)`.
//!
//! Time stepping is first-order IMEX: diffusion implicit, transport explicit,
//! quadratic products dealiased by the 2/3 rule.

mod fft;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use fft::Fft2;

use crate::error::{ensure_finite, Error, Result};
use crate::potential::{HookeParams, PeriodicDomain};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest admissible `dt gamma max|grad(V*f)| / h`.
pub const CFL_LIMIT: f64 = 0.5;
/// `measure_growth_rate` refuses seeds larger than this fraction of `f*`.
pub const LINEAR_SEED_MAX: f64 = 1e-4;
/// ... and aborts once the mode exceeds this fraction of `f*`.
pub const LINEAR_REGIME_MAX: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroParams {
    /// `nu_f / nu_d`.
    pub gamma: f64,
    pub hooke: HookeParams,
    pub domain: PeriodicDomain,
    pub n1: usize,
    pub n2: usize,
    pub dt: f64,
    pub dealias: bool,
}

impl MacroParams {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n1", self.n1), ("n2", self.n2)] {
            if n < 16 || !n.is_power_of_two() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a power of two >= 16, got {n}"
                )));
            }
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {}", self.dt)));
        }
        let l = self.domain.l1.min(self.domain.l2);
        if self.hooke.radius > l {
            return Err(Error::Precondition(format!(
                "interaction radius R = {} exceeds min(L1, L2) = {l}",
                self.hooke.radius
            )));
        }
        Ok(())
    }

    /// Rectangle Fourier coefficient `Vhat_{k1,k2}` of the potential.
    pub fn vhat(&self, k1: i64, k2: i64) -> f64 {
        self.hooke.fourier_coeff_unchecked(&self.domain, k1, k2)
    }
}

/// Signed wavenumber stored at FFT index `i` of an axis of length `n`.
pub fn wavenumber_of_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn index_of_wavenumber(k: i64, n: usize) -> Option<usize> {
    let h = (n / 2) as i64;
    if k >= -h && k < h {
        Some(k.rem_euclid(n as i64) as usize)
    } else {
        None
    }
}

fn grid_sign(i: usize, j: usize) -> f64 {
    if (i + j) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fourier coefficients of a real field on the collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub n1: usize,
    pub n2: usize,
    pub domain: PeriodicDomain,
    /// Row-major, FFT index order.
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(domain: PeriodicDomain, n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            domain,
            coeffs: vec![ZERO; n1 * n2],
        }
    }

    pub fn constant(domain: PeriodicDomain, n1: usize, n2: usize, value: f64) -> Self {
        let mut f = Self::zeros(domain, n1, n2);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    pub fn index(&self, k1: i64, k2: i64) -> Option<usize> {
        Some(index_of_wavenumber(k1, self.n1)? * self.n2 + index_of_wavenumber(k2, self.n2)?)
    }

    /// `fhat_{k1,k2}`, zero outside the resolved band.
    pub fn get(&self, k1: i64, k2: i64) -> Complex64 {
        self.index(k1, k2).map_or(ZERO, |m| self.coeffs[m])
    }

    /// Adds `eps cos(pi (k1 x1/L1 + k2 x2/L2))`.
    pub fn add_cosine(&mut self, k1: i64, k2: i64, eps: f64) -> Result<()> {
        let (Some(a), Some(b)) = (self.index(k1, k2), self.index(-k1, -k2)) else {
            return Err(Error::InvalidArgument(format!(
                "mode ({k1}, {k2}) is not resolved on a {} x {} grid",
                self.n1, self.n2
            )));
        };
        if a == b {
            self.coeffs[a] += eps;
        } else {
            self.coeffs[a] += eps / 2.0;
            self.coeffs[b] += eps / 2.0;
        }
        Ok(())
    }

    pub fn grid_point(&self, i: usize, j: usize) -> [f64; 2] {
        let d = &self.domain;
        [
            -d.l1 + 2.0 * d.l1 * i as f64 / self.n1 as f64,
            -d.l2 + 2.0 * d.l2 * j as f64 / self.n2 as f64,
        ]
    }

    /// Transforms grid values `f(x_{ij})` (row-major) to coefficients.
    pub fn from_grid(domain: PeriodicDomain, n1: usize, n2: usize, values: &[f64], fft: &mut Fft2) -> Self {
        let scale = 1.0 / (n1 * n2) as f64;
        let mut coeffs: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut coeffs);
        for i in 0..n1 {
            for j in 0..n2 {
                coeffs[i * n2 + j] *= grid_sign(i, j) * scale;
            }
        }
        let mut f = Self { n1, n2, domain, coeffs };
        f.symmetrize();
        f
    }

    /// Grid values of the field.
    pub fn to_grid(&self, fft: &mut Fft2) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        to_physical(&mut buf, self.n1, self.n2, fft);
        buf.iter().map(|c| c.re).collect()
    }

    pub fn mass(&self) -> f64 {
        self.domain.area() * self.coeffs[0].re
    }

    /// `max |fhat_k - conj(fhat_{-k})|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                let m = (self.n1 - i) % self.n1 * self.n2 + (self.n2 - j) % self.n2;
                worst = worst.max((self.coeffs[i * self.n2 + j] - self.coeffs[m].conj()).norm());
            }
        }
        worst
    }

    /// Projects onto real fields: `fhat_k <- (fhat_k + conj(fhat_{-k}))/2`.
    pub fn symmetrize(&mut self) {
        let (n1, n2) = (self.n1, self.n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let a = i * n2 + j;
                let b = (n1 - i) % n1 * n2 + (n2 - j) % n2;
                if a < b {
                    let v = 0.5 * (self.coeffs[a] + self.coeffs[b].conj());
                    self.coeffs[a] = v;
                    self.coeffs[b] = v.conj();
                } else if a == b {
                    self.coeffs[a].im = 0.0;
                }
            }
        }
    }
}

fn to_physical(buf: &mut [Complex64], n1: usize, n2: usize, fft: &mut Fft2) {
    for i in 0..n1 {
        for j in 0..n2 {
            buf[i * n2 + j] *= grid_sign(i, j);
        }
    }
    fft.inverse(buf);
}

/// Initial data menu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// `f* + sum eps cos(pi (k1 x1/L1 + k2 x2/L2))`; empty list gives `f*`.
    Cosines { modes: Vec<(i64, i64, f64)> },
    /// `f*` plus i.i.d. uniform grid noise in `[-amplitude, amplitude]`,
    /// mean removed.
    Noise { amplitude: f64, seed: u64 },
}

impl InitialData {
    pub fn constant() -> Self {
        InitialData::Cosines { modes: Vec::new() }
    }

    pub fn build(&self, p: &MacroParams) -> Result<SpectralField> {
        let f_star = p.domain.uniform_density();
        match self {
            InitialData::Cosines { modes } => {
                let mut f = SpectralField::constant(p.domain, p.n1, p.n2, f_star);
                for &(k1, k2, eps) in modes {
                    ensure_finite("cosine amplitude", eps)?;
                    if k1 == 0 && k2 == 0 {
                        return Err(Error::InvalidArgument("cosine seed on the mass mode".into()));
                    }
                    f.add_cosine(k1, k2, eps)?;
                }
                Ok(f)
            }
            InitialData::Noise { amplitude, seed } => {
                ensure_finite("noise amplitude", *amplitude)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let values: Vec<f64> = (0..p.n1 * p.n2)
                    .map(|_| f_star + amplitude * rng.random_range(-1.0..1.0))
                    .collect();
                let mut fft = Fft2::new(p.n1, p.n2);
                let mut f = SpectralField::from_grid(p.domain, p.n1, p.n2, &values, &mut fft);
                f.coeffs[0] = Complex64::new(f_star, 0.0);
                Ok(f)
            }
        }
    }
}

/// Per-run diagnostics, one row of the time-series output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub mass: f64,
    pub free_energy: f64,
    pub a10: f64,
    pub a01: f64,
    pub a11: f64,
    pub a20: f64,
}

struct PhysicalInfo {
    min_f: f64,
    argmin: usize,
    max_grad: f64,
}

/// Precomputed multipliers plus the state of one run.
#[derive(Debug)]
pub struct MacroSolver {
    params: MacroParams,
    fft: Fft2,
    /// `4 L1 L2 Vhat_k`, the convolution multiplier.
    conv: Vec<f64>,
    q1: Vec<f64>,
    q2: Vec<f64>,
    lap: Vec<f64>,
    mask: Vec<bool>,
    field: SpectralField,
    time: f64,
    steps: u64,
    wf: Vec<Complex64>,
    wg1: Vec<Complex64>,
    wg2: Vec<Complex64>,
}

impl MacroSolver {
    pub fn new(params: MacroParams, initial: SpectralField) -> Result<Self> {
        params.validate()?;
        let (n1, n2) = (params.n1, params.n2);
        if initial.n1 != n1 || initial.n2 != n2 {
            return Err(Error::InvalidArgument(format!(
                "field is {} x {}, params say {n1} x {n2}",
                initial.n1, initial.n2
            )));
        }
        for c in &initial.coeffs {
            ensure_finite("initial coefficient", c.re)?;
            ensure_finite("initial coefficient", c.im)?;
        }
        let d = params.domain;
        let mut conv = vec![0.0; n1 * n2];
        let mut q1 = vec![0.0; n1 * n2];
        let mut q2 = vec![0.0; n1 * n2];
        let mut lap = vec![0.0; n1 * n2];
        let mut mask = vec![true; n1 * n2];
        for i in 0..n1 {
            let k1 = wavenumber_of_index(i, n1);
            for j in 0..n2 {
                let k2 = wavenumber_of_index(j, n2);
                let m = i * n2 + j;
                conv[m] = d.area() * params.vhat(k1, k2);
                let a = PI * k1 as f64 / d.l1;
                let b = PI * k2 as f64 / d.l2;
                // the Nyquist row has no real derivative
                q1[m] = if 2 * i == n1 { 0.0 } else { a };
                q2[m] = if 2 * j == n2 { 0.0 } else { b };
                lap[m] = -(a * a + b * b);
                if params.dealias {
                    mask[m] = 3 * k1.unsigned_abs() as usize <= n1 && 3 * k2.unsigned_abs() as usize <= n2;
                }
            }
        }
        Ok(Self {
            params,
            fft: Fft2::new(n1, n2),
            conv,
            q1,
            q2,
            lap,
            mask,
            field: initial,
            time: 0.0,
            steps: 0,
            wf: vec![ZERO; n1 * n2],
            wg1: vec![ZERO; n1 * n2],
            wg2: vec![ZERO; n1 * n2],
        })
    }

    pub fn params(&self) -> &MacroParams {
        &self.params
    }

    pub fn field(&self) -> &SpectralField {
        &self.field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Coefficients of `V * f`.
    pub fn convolution(&self, f: &SpectralField) -> SpectralField {
        let mut out = f.clone();
        for (c, w) in out.coeffs.iter_mut().zip(&self.conv) {
            *c *= *w;
        }
        out
    }

    /// Writes `gamma div(f grad(V*f))` into `out`.
    fn transport(&mut self, fhat: &[Complex64], out: &mut [Complex64]) -> PhysicalInfo {
        let (n1, n2) = (self.params.n1, self.params.n2);
        let i_unit = Complex64::new(0.0, 1.0);
        for m in 0..n1 * n2 {
            let f = if self.mask[m] { fhat[m] } else { ZERO };
            let phi = f * self.conv[m];
            self.wf[m] = f;
            self.wg1[m] = i_unit * self.q1[m] * phi;
            self.wg2[m] = i_unit * self.q2[m] * phi;
        }
        to_physical(&mut self.wf, n1, n2, &mut self.fft);
        to_physical(&mut self.wg1, n1, n2, &mut self.fft);
        to_physical(&mut self.wg2, n1, n2, &mut self.fft);
        let mut info = PhysicalInfo {
            min_f: f64::INFINITY,
            argmin: 0,
            max_grad: 0.0,
        };
        for m in 0..n1 * n2 {
            let f = self.wf[m].re;
            let (g1, g2) = (self.wg1[m].re, self.wg2[m].re);
            if f < info.min_f {
                info.min_f = f;
                info.argmin = m;
            }
            info.max_grad = info.max_grad.max(g1.hypot(g2));
            self.wg1[m] = Complex64::new(f * g1, 0.0);
            self.wg2[m] = Complex64::new(f * g2, 0.0);
        }
        self.fft.forward(&mut self.wg1);
        self.fft.forward(&mut self.wg2);
        let scale = self.params.gamma / (n1 * n2) as f64;
        for i in 0..n1 {
            for j in 0..n2 {
                let m = i * n2 + j;
                out[m] = if self.mask[m] {
                    let s = grid_sign(i, j) * scale;
                    i_unit * (self.q1[m] * self.wg1[m] + self.q2[m] * self.wg2[m]) * s
                } else {
                    ZERO
                };
            }
        }
        info
    }

    /// Right-hand side `Lap f + gamma div(f grad(V*f))`.
    pub fn rhs(&mut self, f: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(f.domain, f.n1, f.n2);
        self.transport(&f.coeffs, &mut out.coeffs);
        for ((o, c), l) in out.coeffs.iter_mut().zip(&f.coeffs).zip(&self.lap) {
            *o += c * l;
        }
        out
    }

    /// One IMEX step. Fails without modifying the state if the current
    /// field is not positive, the transport CFL number exceeds
    /// [`CFL_LIMIT`], or the update is not finite.
    pub fn step(&mut self) -> Result<()> {
        let n = self.params.n1 * self.params.n2;
        let mut nl = vec![ZERO; n];
        let fhat = std::mem::take(&mut self.field.coeffs);
        let info = self.transport(&fhat, &mut nl);
        self.field.coeffs = fhat;
        if info.min_f <= 0.0 {
            let [x1, x2] = self
                .field
                .grid_point(info.argmin / self.params.n2, info.argmin % self.params.n2);
            return Err(Error::Positivity {
                min: info.min_f,
                x1,
                x2,
            });
        }
        let h = (2.0 * self.params.domain.l1 / self.params.n1 as f64)
            .min(2.0 * self.params.domain.l2 / self.params.n2 as f64);
        let cfl = self.params.dt * self.params.gamma * info.max_grad / h;
        if cfl > CFL_LIMIT {
            return Err(Error::NumericalGuard(format!(
                "dt gamma max|grad(V*f)| / h = {cfl:.4} > {CFL_LIMIT} at t = {}",
                self.time
            )));
        }
        let dt = self.params.dt;
        let mut next = self.field.coeffs.clone();
        for m in 0..n {
            next[m] = (next[m] + dt * nl[m]) / (1.0 - dt * self.lap[m]);
            if !(next[m].re.is_finite() && next[m].im.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "coefficient {m} after step {} (t = {})",
                    self.steps, self.time
                )));
            }
        }
        self.field.coeffs = next;
        self.field.symmetrize();
        self.steps += 1;
        self.time = self.steps as f64 * dt;
        Ok(())
    }

    /// `int (f log f + gamma/2 f (V*f))` by the trapezoidal rule on the grid.
    pub fn free_energy_of(&mut self, f: &SpectralField) -> Result<f64> {
        let (n1, n2) = (self.params.n1, self.params.n2);
        let mut u = self.convolution(f).coeffs;
        to_physical(&mut u, n1, n2, &mut self.fft);
        let values = f.to_grid(&mut self.fft);
        let (mut argmin, mut min) = (0, f64::INFINITY);
        for (m, &v) in values.iter().enumerate() {
            if v < min {
                min = v;
                argmin = m;
            }
        }
        if min <= 0.0 {
            let [x1, x2] = f.grid_point(argmin / n2, argmin % n2);
            return Err(Error::Positivity { min, x1, x2 });
        }
        let half_gamma = 0.5 * self.params.gamma;
        let sum: f64 = values
            .iter()
            .zip(&u)
            .map(|(&v, w)| v * v.ln() + half_gamma * v * w.re)
            .sum();
        Ok(sum * f.domain.area() / (n1 * n2) as f64)
    }

    pub fn free_energy(&mut self) -> Result<f64> {
        let f = self.field.clone();
        self.free_energy_of(&f)
    }

    pub fn diagnostics(&mut self) -> Result<Diagnostics> {
        let free_energy = self.free_energy()?;
        let f = &self.field;
        Ok(Diagnostics {
            t: self.time,
            mass: f.mass(),
            free_energy,
            a10: f.get(1, 0).norm(),
            a01: f.get(0, 1).norm(),
            a11: f.get(1, 1).norm(),
            a20: f.get(2, 0).norm(),
        })
    }
}

/// Coefficients of `V * f`: `4 L1 L2 Vhat_k fhat_k`.
pub fn convolution_coeffs(f: &SpectralField, p: &MacroParams) -> Result<SpectralField> {
    p.validate()?;
    let mut out = f.clone();
    for (m, c) in out.coeffs.iter_mut().enumerate() {
        let k1 = wavenumber_of_index(m / f.n2, f.n1);
        let k2 = wavenumber_of_index(m % f.n2, f.n2);
        *c *= f.domain.area() * p.vhat(k1, k2);
    }
    Ok(out)
}

pub fn rhs(f: &SpectralField, p: &MacroParams) -> Result<SpectralField> {
    let mut s = MacroSolver::new(*p, f.clone())?;
    Ok(s.rhs(f))
}

pub fn step_semi_implicit(f: &SpectralField, p: &MacroParams) -> Result<SpectralField> {
    let mut s = MacroSolver::new(*p, f.clone())?;
    s.step()?;
    Ok(s.field)
}

pub fn free_energy(f: &SpectralField, p: &MacroParams) -> Result<f64> {
    let mut s = MacroSolver::new(*p, f.clone())?;
    s.free_energy()
}

/// Least-squares fit of `log|fhat_k(t)|` against `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRateFit {
    pub rate: f64,
    pub intercept: f64,
    pub samples: usize,
    pub final_amplitude: f64,
}

/// Seeds `f* + eps cos(mode)`, evolves over `t_window` and fits the
/// exponential rate of `|fhat_{k1,k2}|`.
pub fn measure_growth_rate(p: &MacroParams, k1: i64, k2: i64, epsilon: f64, t_window: f64) -> Result<GrowthRateFit> {
    let f_star = p.domain.uniform_density();
    if !(epsilon > 0.0 && epsilon <= LINEAR_SEED_MAX * f_star) {
        return Err(Error::Precondition(format!(
            "seed amplitude {epsilon} must lie in (0, {}]",
            LINEAR_SEED_MAX * f_star
        )));
    }
    if !(t_window.is_finite() && t_window > 0.0) {
        return Err(Error::InvalidArgument(format!("t_window must be > 0, got {t_window}")));
    }
    let init = InitialData::Cosines {
        modes: vec![(k1, k2, epsilon)],
    }
    .build(p)?;
    let mut solver = MacroSolver::new(*p, init)?;
    let n_steps = (t_window / p.dt).round().max(2.0) as u64;
    let mut ts = Vec::with_capacity(n_steps as usize + 1);
    let mut ys = Vec::with_capacity(n_steps as usize + 1);
    let mut amp = solver.field().get(k1, k2).norm();
    ts.push(0.0);
    ys.push(amp.ln());
    for _ in 0..n_steps {
        solver.step()?;
        amp = solver.field().get(k1, k2).norm();
        if amp > LINEAR_REGIME_MAX * f_star {
            return Err(Error::NumericalGuard(format!(
                "mode ({k1}, {k2}) reached {amp:.3e} > {} at t = {}; use a smaller seed",
                LINEAR_REGIME_MAX * f_star,
                solver.time()
            )));
        }
        if amp == 0.0 {
            return Err(Error::NumericalGuard(format!(
                "mode ({k1}, {k2}) underflowed at t = {}; shorten the window",
                solver.time()
            )));
        }
        ts.push(solver.time());
        ys.push(amp.ln());
    }
    let (rate, intercept) = least_squares_line(&ts, &ys);
    Ok(GrowthRateFit {
        rate,
        intercept,
        samples: ts.len(),
        final_amplitude: amp,
    })
}

fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
