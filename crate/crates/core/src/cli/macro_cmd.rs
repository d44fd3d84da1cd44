use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use serde::Serialize;

use springnet::bifurcation::amplitude::ESCAPE_FACTOR;
use springnet::bifurcation::{analyze, beta_critical, eigenvalue};
use springnet::io::{fmt_f64, write_json, CsvOut};
use springnet::spectral::{measure_growth_rate, Diagnostics, InitialData, MacroParams, MacroSolver};
use springnet::{Error, HookeParams, PeriodicDomain, Result};

use super::{usage, Common, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MacroPreset {
    /// R = 1/2, alpha = 1/2, beta = 1.02 beta_c: saturates at a small amplitude.
    Supercritical,
    /// R = 1/4, alpha = 1/2, beta = 1.02 beta_c: leaves the perturbative regime.
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Constant,
    Cosine,
    Noise,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MacroArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub preset: Option<MacroPreset>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Rest length over radius; l0 = alpha R.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// nu_f / nu_d. Alternatives: --beta, --beta-factor.
    #[arg(long, conflicts_with_all = ["beta", "beta_factor"])]
    pub gamma: Option<f64>,
    /// Dimensionless coupling, converted to gamma = beta 4 L1 L2 / (2 pi kappa R^4).
    #[arg(long, conflicts_with = "beta_factor")]
    pub beta: Option<f64>,
    /// beta as a multiple of the critical value of mode (1,0).
    #[arg(long)]
    pub beta_factor: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub l1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub l2: f64,
    /// Grid points per axis.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub no_dealias: bool,
    #[arg(long, value_enum)]
    pub init: Option<InitKind>,
    /// Cosine seed "k1,k2,eps"; repeat for several modes.
    #[arg(long = "seed-mode")]
    pub seed_modes: Vec<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub noise_amp: f64,
    /// Time-series row every this many steps.
    #[arg(long)]
    pub series_every: Option<u64>,
    /// Field snapshot every this many steps (0 = off).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: u64,
    /// Stop once max(|fhat_10|, |fhat_01|) exceeds this value.
    #[arg(long)]
    pub stop_amplitude: Option<f64>,
    /// Stop once the amplitude leaves the perturbative regime
    /// (on by default with the subcritical preset).
    #[arg(long)]
    pub stop_at_escape: bool,
    /// Fit the growth rate of mode (k1, k2) instead of a plain run.
    #[arg(long, num_args = 2, value_names = ["K1", "K2"], allow_negative_numbers = true)]
    pub measure_rate: Option<Vec<i64>>,
    /// Seed amplitude for --measure-rate.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_window: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Resolved {
    params: MacroParams,
    beta: f64,
    t_end: f64,
    series_every: u64,
    initial: InitialData,
    stop_amplitude: Option<f64>,
    stop_at_escape: bool,
}

fn parse_seed_mode(s: &str) -> Result<(i64, i64, f64)> {
    let bad = || usage(format!("--seed-mode expects k1,k2,eps, got '{s}'"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
    ))
}

fn resolve(a: &MacroArgs) -> Result<Resolved> {
    let (radius, alpha, factor, n, dt, t_end, stop) = match a.preset {
        Some(MacroPreset::Supercritical) => (0.5, 0.5, Some(1.02), 64, 1e-3, 40.0, None),
        Some(MacroPreset::Subcritical) => (0.25, 0.5, Some(1.02), 64, 1e-4, 10.0, None),
        None => (0.25, 0.5, None, 64, 1e-4, 1.0, None),
    };
    let radius = a.radius.unwrap_or(radius);
    let alpha = a.alpha.unwrap_or(alpha);
    let dom = PeriodicDomain::new(a.l1, a.l2)?;
    let hooke = HookeParams::new(a.kappa, alpha * radius, radius)?;
    let to_gamma = |beta: f64| beta * dom.area() / (2.0 * PI * a.kappa * radius.powi(4));
    let beta_factor = a.beta_factor.or(if a.gamma.is_some() || a.beta.is_some() { None } else { factor });
    let (gamma, beta) = if let Some(g) = a.gamma {
        (g, g * 2.0 * PI * a.kappa * radius.powi(4) / dom.area())
    } else if let Some(b) = a.beta {
        (to_gamma(b), b)
    } else if let Some(f) = beta_factor {
        let b = f * beta_critical(radius, alpha, &dom)?;
        (to_gamma(b), b)
    } else {
        (0.0, 0.0)
    };
    let params = MacroParams {
        gamma,
        hooke,
        domain: dom,
        n1: a.n.unwrap_or(n),
        n2: a.n.unwrap_or(n),
        dt: a.dt.unwrap_or(dt),
        dealias: !a.no_dealias,
    };
    params.validate()?;
    let mut modes: Vec<(i64, i64, f64)> = a.seed_modes.iter().map(|s| parse_seed_mode(s)).collect::<Result<_>>()?;
    let kind = a.init.unwrap_or(if a.preset.is_some() || !modes.is_empty() {
        InitKind::Cosine
    } else {
        InitKind::Constant
    });
    let initial = match kind {
        InitKind::Constant => InitialData::constant(),
        InitKind::Cosine => {
            if modes.is_empty() {
                modes = vec![(1, 0, 2e-3), (0, 1, 1.4e-3)];
            }
            InitialData::Cosines { modes }
        }
        InitKind::Noise => InitialData::Noise {
            amplitude: a.noise_amp,
            seed: a.common.seed,
        },
    };
    let t_end = a.t_end.unwrap_or(t_end);
    let series_every = a
        .series_every
        .unwrap_or_else(|| ((0.01 / params.dt).round() as u64).max(1));
    Ok(Resolved {
        params,
        beta,
        t_end,
        series_every,
        initial,
        stop_amplitude: a.stop_amplitude.or(stop),
        stop_at_escape: a.stop_at_escape || a.preset == Some(MacroPreset::Subcritical),
    })
}

#[derive(Debug, Clone, Serialize)]
struct RateReport {
    k1: i64,
    k2: i64,
    rate: f64,
    eigenvalue: f64,
    relative_error: f64,
    samples: usize,
}

#[derive(Debug, Clone, Serialize)]
struct RunSummary {
    status: String,
    steps: u64,
    final_state: Option<Diagnostics>,
    beta: f64,
    gamma: f64,
    lambda_10: Option<f64>,
    classification: Option<String>,
    predicted_amplitude: Option<f64>,
    /// `10 sqrt(lambda_10 / |c + d|)`, the edge of the perturbative regime.
    escape_threshold: Option<f64>,
    /// First time the amplitude crossed `escape_threshold`.
    escape_time: Option<f64>,
    saturated_a10: Option<f64>,
    saturated_a01: Option<f64>,
    max_amplitude: f64,
}

pub fn run(a: MacroArgs) -> Result<()> {
    let r = resolve(&a)?;
    let mut run = Run::start("macro", &a.common, &r)?;
    let result = match &a.measure_rate {
        Some(k) => measure(&mut run, &a, &r, k[0], k[1]),
        None => evolve(&mut run, &a, &r),
    };
    run.finish(result)
}

fn measure(run: &mut Run, a: &MacroArgs, r: &Resolved, k1: i64, k2: i64) -> Result<()> {
    let fit = measure_growth_rate(&r.params, k1, k2, a.eps, a.t_window)?;
    let lambda = eigenvalue(&r.params, r.params.domain.uniform_density(), k1, k2)?;
    let rep = RateReport {
        k1,
        k2,
        rate: fit.rate,
        eigenvalue: lambda,
        relative_error: (fit.rate - lambda) / lambda.abs(),
        samples: fit.samples,
    };
    println!(
        "mode ({k1},{k2}): fitted rate {:.6}, eigenvalue {:.6}, relative error {:.2e}",
        rep.rate, rep.eigenvalue, rep.relative_error
    );
    write_json(&run.output("rate.json"), &rep)
}

fn write_snapshot(run: &mut Run, solver: &mut MacroSolver) -> Result<()> {
    let name = format!("snapshot_{:08}.csv", solver.steps());
    let field = solver.field().clone();
    let p = *solver.params();
    let mut fft = springnet::spectral::Fft2::new(p.n1, p.n2);
    let values = field.to_grid(&mut fft);
    let mut w = CsvOut::create(&run.output(&name), &["x1", "x2", "f"])?;
    for i in 0..p.n1 {
        for j in 0..p.n2 {
            let [x1, x2] = field.grid_point(i, j);
            w.row([fmt_f64(x1), fmt_f64(x2), fmt_f64(values[i * p.n2 + j])])?;
        }
    }
    w.flush()
}

fn evolve(run: &mut Run, a: &MacroArgs, r: &Resolved) -> Result<()> {
    let p = r.params;
    let mut solver = MacroSolver::new(p, r.initial.build(&p)?)?;
    let mut series = CsvOut::create(
        &run.output("timeseries.csv"),
        &["t", "mass", "free_energy", "abs_f10", "abs_f01", "abs_f11", "abs_f20"],
    )?;
    let write_row = |w: &mut CsvOut, d: &Diagnostics| {
        w.row([d.t, d.mass, d.free_energy, d.a10, d.a01, d.a11, d.a20].map(fmt_f64))
    };
    let analysis = if p.gamma > 0.0 && p.domain.l1 >= p.domain.l2 {
        analyze(p.hooke.radius, p.hooke.alpha(), &p.domain, Some(r.beta)).ok()
    } else {
        None
    };
    let escape_threshold = analysis.as_ref().and_then(|x| {
        let lambda = x.lambda_10();
        let coef = x.c + x.d.unwrap_or(0.0);
        (lambda > 0.0 && coef != 0.0).then(|| ESCAPE_FACTOR * (lambda / coef.abs()).sqrt())
    });
    let mut escape_time = None;
    let mut last = None;
    let mut max_amp: f64 = 0.0;
    let n_steps = (r.t_end / p.dt).round() as u64;
    let mut outcome: Result<()> = Ok(());
    let mut status = "completed".to_string();
    if a.snapshot_every > 0 {
        write_snapshot(run, &mut solver)?;
    }
    match solver.diagnostics() {
        Ok(d) => {
            write_row(&mut series, &d)?;
            last = Some(d);
        }
        Err(e) => outcome = Err(e),
    }
    while outcome.is_ok() && solver.steps() < n_steps {
        if let Err(e) = solver.step() {
            status = format!("stopped: {e}");
            outcome = Err(e);
            break;
        }
        let f = solver.field();
        let amp = f.get(1, 0).norm().max(f.get(0, 1).norm());
        max_amp = max_amp.max(amp);
        if escape_time.is_none() && escape_threshold.is_some_and(|e| amp > e) {
            escape_time = Some(solver.time());
        }
        let stop = r.stop_amplitude.is_some_and(|s| amp > s) || (r.stop_at_escape && escape_time.is_some());
        let k = solver.steps();
        if k % r.series_every == 0 || k == n_steps || stop {
            match solver.diagnostics() {
                Ok(d) => {
                    write_row(&mut series, &d)?;
                    last = Some(d);
                }
                Err(e) => {
                    status = format!("stopped: {e}");
                    outcome = Err(e);
                    break;
                }
            }
        }
        if a.snapshot_every > 0 && k % a.snapshot_every == 0 {
            write_snapshot(run, &mut solver)?;
        }
        if stop {
            status = format!("stopped at amplitude {amp:.6}, t = {}", solver.time());
            break;
        }
    }
    if let (Some(t), Some(e)) = (escape_time, escape_threshold) {
        println!("left the perturbative regime at t = {t:.4} (threshold {e:.6})");
    }
    series.flush()?;

    let summary = RunSummary {
        status: status.clone(),
        steps: solver.steps(),
        final_state: last,
        beta: r.beta,
        gamma: p.gamma,
        lambda_10: analysis.as_ref().map(|x| x.lambda_10()),
        classification: analysis.as_ref().map(|x| x.classification.to_string()),
        predicted_amplitude: analysis.as_ref().and_then(|x| x.stationary_amplitude),
        escape_threshold,
        escape_time,
        saturated_a10: last.map(|d| d.a10),
        saturated_a01: last.map(|d| d.a01),
        max_amplitude: max_amp,
    };
    if let Some(d) = last {
        println!(
            "t = {:.4}: |f10| = {:.6}, |f01| = {:.6}, free energy {:.10}",
            d.t, d.a10, d.a01, d.free_energy
        );
    }
    if let Some(pred) = summary.predicted_amplitude {
        println!("predicted stationary amplitude {pred:.6}");
    }
    println!("{status}");
    write_json(&run.output("summary.json"), &summary)?;
    match outcome {
        Err(Error::Positivity { .. }) | Ok(()) => outcome,
        Err(e) => Err(e),
    }
}
