//! Overdamped Brownian particles joined by springs that are created and
//! destroyed at random, on a periodic rectangle.
//!
//! One step of length `dt` does, in order: spring drift over current links,
//! Gaussian increments, wrapping, link destruction (each link independently
//! with probability `1 - exp(-nu_d dt)`), link creation (each unlinked pair
//! within `R`, with probability `1 - exp(-nu_f dt / (N - 1))`). A link
//! destroyed in step 4 counts as unlinked in step 5.
//!
//! Random numbers are drawn in a fixed order (noise by particle, then
//! destruction by link, then creation by sorted pair), so a seed fixes the
//! trajectory bit for bit.

pub mod cells;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::potential::{HookeParams, PeriodicDomain, RadialPotential};

pub use cells::{brute_force_pairs, CellList};

/// Bound on `dt mu kappa`, `dt nu_d` and `dt nu_f/(N-1)`.
pub const MAX_RATE_DT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroParams {
    pub n: usize,
    pub hooke: HookeParams,
    /// Diffusion coefficient `D`.
    pub diffusion: f64,
    /// Mobility.
    pub mu: f64,
    /// Macroscopic creation rate; each pair links at `nu_f / (N - 1)`.
    pub nu_f: f64,
    pub nu_d: f64,
    pub dt: f64,
    pub domain: PeriodicDomain,
}

impl MicroParams {
    pub fn pair_creation_rate(&self) -> f64 {
        self.nu_f / (self.n - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("need N >= 2 particles, got {}", self.n)));
        }
        for (name, v) in [
            ("D", self.diffusion),
            ("mu", self.mu),
            ("nu_f", self.nu_f),
            ("nu_d", self.nu_d),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {}", self.dt)));
        }
        let checks = [
            ("dt mu kappa", self.dt * self.mu * self.hooke.kappa),
            ("dt nu_d", self.dt * self.nu_d),
            ("dt nu_f/(N-1)", self.dt * self.pair_creation_rate()),
        ];
        for (name, v) in checks {
            if v > MAX_RATE_DT {
                return Err(Error::NumericalGuard(format!("{name} = {v} > {MAX_RATE_DT}")));
            }
        }
        Ok(())
    }

    pub fn destruction_probability(&self) -> f64 {
        -(-self.nu_d * self.dt).exp_m1()
    }

    pub fn creation_probability(&self) -> f64 {
        -(-self.pair_creation_rate() * self.dt).exp_m1()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialPositions {
    Uniform,
    Given { positions: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkEventKind {
    Create,
    Destroy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkEvent {
    pub time: f64,
    pub event: LinkEventKind,
    pub i: usize,
    pub j: usize,
}

/// Positions, links and generator state.
#[derive(Debug, Clone)]
pub struct ParticleNetworkState {
    pub positions: Vec<[f64; 2]>,
    /// Unordered pairs stored as `(i, j)` with `i < j`.
    pub links: BTreeSet<(usize, usize)>,
    pub steps: u64,
    pub time: f64,
    rng: ChaCha8Rng,
}

impl PartialEq for ParticleNetworkState {
    fn eq(&self, other: &Self) -> bool {
        self.positions == other.positions
            && self.links == other.links
            && self.steps == other.steps
            && self.rng == other.rng
    }
}

/// Starts a run with no links.
pub fn init(params: &MicroParams, seed: u64, initial: &InitialPositions) -> Result<ParticleNetworkState> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dom = params.domain;
    let positions = match initial {
        InitialPositions::Uniform => (0..params.n)
            .map(|_| {
                dom.wrap([
                    rng.random_range(-dom.l1..dom.l1),
                    rng.random_range(-dom.l2..dom.l2),
                ])
            })
            .collect(),
        InitialPositions::Given { positions } => {
            if positions.len() != params.n {
                return Err(Error::InvalidArgument(format!(
                    "{} positions given for N = {}",
                    positions.len(),
                    params.n
                )));
            }
            positions
                .iter()
                .map(|&p| {
                    ensure_finite("initial position", p[0])?;
                    ensure_finite("initial position", p[1])?;
                    Ok(dom.wrap(p))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(ParticleNetworkState {
        positions,
        links: BTreeSet::new(),
        steps: 0,
        time: 0.0,
        rng,
    })
}

impl ParticleNetworkState {
    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Adds a link by hand (test setups); `i != j`, order irrelevant.
    pub fn add_link(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j || i.max(j) >= self.positions.len() {
            return Err(Error::InvalidArgument(format!("cannot link ({i}, {j})")));
        }
        self.links.insert((i.min(j), i.max(j)));
        Ok(())
    }

    /// No self-links, indices in range, positions wrapped and finite.
    pub fn check_invariants(&self, dom: &PeriodicDomain) -> Result<()> {
        for &(i, j) in &self.links {
            if i >= j || j >= self.positions.len() {
                return Err(Error::InvalidArgument(format!("bad link ({i}, {j})")));
            }
        }
        for p in &self.positions {
            if !(p[0] >= -dom.l1 && p[0] < dom.l1 && p[1] >= -dom.l2 && p[1] < dom.l2) {
                return Err(Error::InvalidArgument(format!("position {p:?} not wrapped")));
            }
        }
        Ok(())
    }

    /// Total spring energy `sum_links V(|X_i - X_j|)`.
    pub fn energy(&self, params: &MicroParams) -> f64 {
        self.links
            .iter()
            .map(|&(i, j)| {
                params
                    .hooke
                    .value(params.domain.distance(self.positions[i], self.positions[j]))
            })
            .sum()
    }

    pub fn step(&mut self, params: &MicroParams) -> Result<()> {
        self.step_logged(params, None)
    }

    /// [`ParticleNetworkState::step`], appending link events to `log`.
    pub fn step_logged(&mut self, params: &MicroParams, mut log: Option<&mut Vec<LinkEvent>>) -> Result<()> {
        let dom = params.domain;
        let n = self.positions.len();
        let mut drift = vec![[0.0f64; 2]; n];
        for &(i, j) in &self.links {
            let d = dom.displacement(self.positions[i], self.positions[j]);
            let r = d[0].hypot(d[1]);
            let fm = params.hooke.force_magnitude(r);
            if fm != 0.0 {
                let s = params.mu * fm / r;
                drift[i][0] -= s * d[0];
                drift[i][1] -= s * d[1];
                drift[j][0] += s * d[0];
                drift[j][1] += s * d[1];
            }
        }
        let sigma = (2.0 * params.diffusion * params.dt).sqrt();
        for (k, (p, v)) in self.positions.iter_mut().zip(&drift).enumerate() {
            let mut x = [p[0] + params.dt * v[0], p[1] + params.dt * v[1]];
            if sigma > 0.0 {
                let g0: f64 = self.rng.sample(StandardNormal);
                let g1: f64 = self.rng.sample(StandardNormal);
                x[0] += sigma * g0;
                x[1] += sigma * g1;
            }
            if !(x[0].is_finite() && x[1].is_finite()) {
                return Err(Error::NonFinite(format!(
                    "particle {k} at step {} (t = {})",
                    self.steps, self.time
                )));
            }
            *p = dom.wrap(x);
        }
        let t_next = (self.steps + 1) as f64 * params.dt;

        let p_d = params.destruction_probability();
        if p_d > 0.0 {
            let rng = &mut self.rng;
            let mut destroyed = Vec::new();
            self.links.retain(|&link| {
                let dies = rng.random::<f64>() < p_d;
                if dies {
                    destroyed.push(link);
                }
                !dies
            });
            if let Some(log) = log.as_deref_mut() {
                log.extend(destroyed.into_iter().map(|(i, j)| LinkEvent {
                    time: t_next,
                    event: LinkEventKind::Destroy,
                    i,
                    j,
                }));
            }
        }

        let p_c = params.creation_probability();
        if p_c > 0.0 {
            let radius = params.hooke.radius;
            let cells = CellList::build(&self.positions, &dom, radius);
            for (i, j) in cells.pairs_within(&self.positions, &dom, radius) {
                if self.links.contains(&(i, j)) {
                    continue;
                }
                if self.rng.random::<f64>() < p_c {
                    self.links.insert((i, j));
                    if let Some(log) = log.as_deref_mut() {
                        log.push(LinkEvent {
                            time: t_next,
                            event: LinkEventKind::Create,
                            i,
                            j,
                        });
                    }
                }
            }
        }
        self.steps += 1;
        self.time = t_next;
        Ok(())
    }
}

/// Detailed-balance link count `(nu_f / (2 nu_d)) N pi R^2 f*` of the
/// homogeneous state.
pub fn link_count_equilibrium_prediction(params: &MicroParams, f_star: f64) -> f64 {
    if params.nu_f == 0.0 {
        return 0.0;
    }
    let r = params.hooke.radius;
    params.nu_f / (2.0 * params.nu_d) * params.n as f64 * PI * r * r * f_star
}

/// Stationary probability that a permanently eligible pair is linked at the
/// end of a step, for the per-step probabilities `p_c`, `p_d` (destruction
/// first, re-creation allowed in the same step).
pub fn stationary_link_probability(p_c: f64, p_d: f64) -> f64 {
    p_c / (p_c + p_d * (1.0 - p_c))
}

/// Row-major histogram (`n_bins1` bins along `x1`) normalized to a density.
pub fn empirical_density(state: &ParticleNetworkState, dom: &PeriodicDomain, n_bins1: usize, n_bins2: usize) -> Result<Vec<f64>> {
    if n_bins1 < 2 || n_bins2 < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 bins per axis, got {n_bins1} x {n_bins2}"
        )));
    }
    let mut h = vec![0.0; n_bins1 * n_bins2];
    let bin = |x: f64, half: f64, nb: usize| {
        (((x + half) / (2.0 * half) * nb as f64).floor().max(0.0) as usize).min(nb - 1)
    };
    for p in &state.positions {
        h[bin(p[0], dom.l1, n_bins1) * n_bins2 + bin(p[1], dom.l2, n_bins2)] += 1.0;
    }
    let w = (n_bins1 * n_bins2) as f64 / (state.positions.len() as f64 * dom.area());
    h.iter_mut().for_each(|v| *v *= w);
    Ok(h)
}

/// `(1/N) sum_i exp(-i pi (k1 x1/L1 + k2 x2/L2))`.
pub fn mode_amplitude(state: &ParticleNetworkState, dom: &PeriodicDomain, k1: i64, k2: i64) -> Complex64 {
    let (a, b) = (PI * k1 as f64 / dom.l1, PI * k2 as f64 / dom.l2);
    let s: Complex64 = state
        .positions
        .iter()
        .map(|p| Complex64::from_polar(1.0, -(a * p[0] + b * p[1])))
        .sum();
    s / state.positions.len() as f64
}
