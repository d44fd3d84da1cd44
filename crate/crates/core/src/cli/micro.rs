use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use springnet::io::{fmt_f64, write_json, CsvOut};
use springnet::micro::{
    init, link_count_equilibrium_prediction, mode_amplitude, InitialPositions, LinkEventKind,
    MicroParams, ParticleNetworkState,
};
use springnet::{HookeParams, PeriodicDomain, Result};

use super::{Common, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MicroPreset {
    /// Two linked particles, no noise, no link turnover.
    SpringPair,
    /// 500 weakly coupled particles, 20 replicas, link count near balance.
    Equilibrium,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MicroArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub preset: Option<MicroPreset>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub l0: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Diffusion coefficient D.
    #[arg(long)]
    pub diffusion: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub nu_f: Option<f64>,
    #[arg(long)]
    pub nu_d: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Record link count and energy every this many steps.
    #[arg(long, default_value_t = 10)]
    pub sample_every: u64,
    /// Samples before this time are left out of the mean link count
    /// (default 5/nu_d, at most half the run).
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Write positions every this many steps (0 = off).
    #[arg(long, default_value_t = 0)]
    pub traj_every: u64,
    /// Write every link creation and destruction.
    #[arg(long)]
    pub link_log: bool,
}

#[derive(Debug, Clone, Serialize)]
struct Resolved {
    params: MicroParams,
    steps: u64,
    replicas: usize,
    burn_in: f64,
    initial_pair_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct ReplicaSummary {
    replica: usize,
    seed: u64,
    final_links: usize,
    mean_links: f64,
    samples: usize,
    final_energy: f64,
    mode_amplitudes: Vec<(i64, i64, f64)>,
    pair_distance: Option<f64>,
    times: Vec<f64>,
    link_series: Vec<usize>,
    energy_series: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct Summary {
    predicted_mean_links: f64,
    mean_links: f64,
    standard_error: Option<f64>,
    replicas: Vec<ReplicaSummary>,
}

fn resolve(a: &MicroArgs) -> Result<Resolved> {
    // (n, kappa, l0, R, D, mu, nu_f, nu_d, dt, steps, replicas)
    type Defaults = (usize, f64, f64, f64, f64, f64, f64, f64, f64, u64, usize);
    let d: Defaults = match a.preset {
        Some(MicroPreset::SpringPair) => (2, 1.0, 0.1, 0.2, 0.0, 1.0, 0.0, 0.0, 0.01, 1000, 1),
        // pi R^2 = 0.05 on the unit box
        Some(MicroPreset::Equilibrium) => (500, 0.01, 0.06, (0.05 / PI).sqrt(), 0.05, 1.0, 2.0, 2.0, 0.005, 4000, 20),
        None => (100, 1.0, 0.05, 0.1, 0.01, 1.0, 1.0, 1.0, 0.01, 1000, 1),
    };
    let hooke = HookeParams::new(
        a.kappa.unwrap_or(d.1),
        a.l0.unwrap_or(d.2),
        a.radius.unwrap_or(d.3),
    )?;
    let params = MicroParams {
        n: a.n.unwrap_or(d.0),
        hooke,
        diffusion: a.diffusion.unwrap_or(d.4),
        mu: a.mu.unwrap_or(d.5),
        nu_f: a.nu_f.unwrap_or(d.6),
        nu_d: a.nu_d.unwrap_or(d.7),
        dt: a.dt.unwrap_or(d.8),
        domain: PeriodicDomain::new(a.l1.unwrap_or(0.5), a.l2.unwrap_or(0.5))?,
    };
    params.validate()?;
    let steps = a.steps.unwrap_or(d.9);
    let t_end = steps as f64 * params.dt;
    let burn_in = a.burn_in.unwrap_or_else(|| {
        if params.nu_d > 0.0 {
            (5.0 / params.nu_d).min(0.5 * t_end)
        } else {
            0.0
        }
    });
    let initial_pair_distance = (a.preset == Some(MicroPreset::SpringPair)).then_some(0.75 * hooke.radius);
    Ok(Resolved {
        params,
        steps,
        replicas: a.replicas.unwrap_or(d.10).max(1),
        burn_in,
        initial_pair_distance,
    })
}

fn initial_state(r: &Resolved, seed: u64) -> Result<ParticleNetworkState> {
    match r.initial_pair_distance {
        Some(d0) => {
            let mut s = init(
                &r.params,
                seed,
                &InitialPositions::Given {
                    positions: vec![[-0.5 * d0, 0.0], [0.5 * d0, 0.0]],
                },
            )?;
            s.add_link(0, 1)?;
            Ok(s)
        }
        None => init(&r.params, seed, &InitialPositions::Uniform),
    }
}

fn run_replica(run_dir: &std::path::Path, a: &MicroArgs, r: &Resolved, replica: usize) -> Result<ReplicaSummary> {
    let seed = a.common.seed.wrapping_add(replica as u64);
    let p = &r.params;
    let mut s = initial_state(r, seed)?;
    let mut traj = if a.traj_every > 0 {
        Some(CsvOut::create(
            &run_dir.join(format!("trajectory_r{replica}.csv")),
            &["time", "particle_id", "x1", "x2"],
        )?)
    } else {
        None
    };
    let mut links = if a.link_log {
        Some(CsvOut::create(
            &run_dir.join(format!("links_r{replica}.csv")),
            &["time", "event", "i", "j"],
        )?)
    } else {
        None
    };
    let write_positions = |w: &mut CsvOut, s: &ParticleNetworkState| -> Result<()> {
        for (k, x) in s.positions.iter().enumerate() {
            w.row([fmt_f64(s.time), k.to_string(), fmt_f64(x[0]), fmt_f64(x[1])])?;
        }
        Ok(())
    };
    if let Some(w) = traj.as_mut() {
        write_positions(w, &s)?;
    }
    let mut times = vec![0.0];
    let mut link_series = vec![s.link_count()];
    let mut energy_series = vec![s.energy(p)];
    let mut events = Vec::new();
    for step in 1..=r.steps {
        events.clear();
        s.step_logged(p, links.as_ref().map(|_| &mut events))?;
        if let Some(w) = links.as_mut() {
            for e in &events {
                let kind = match e.event {
                    LinkEventKind::Create => "create",
                    LinkEventKind::Destroy => "destroy",
                };
                w.row([fmt_f64(e.time), kind.to_string(), e.i.to_string(), e.j.to_string()])?;
            }
        }
        if let Some(w) = traj.as_mut() {
            if step % a.traj_every == 0 {
                write_positions(w, &s)?;
            }
        }
        if step % a.sample_every.max(1) == 0 || step == r.steps {
            times.push(s.time);
            link_series.push(s.link_count());
            energy_series.push(s.energy(p));
        }
    }
    if let Some(w) = traj.as_mut() {
        w.flush()?;
    }
    if let Some(w) = links.as_mut() {
        w.flush()?;
    }
    let kept: Vec<f64> = times
        .iter()
        .zip(&link_series)
        .filter(|(t, _)| **t >= r.burn_in)
        .map(|(_, &k)| k as f64)
        .collect();
    let mean_links = kept.iter().sum::<f64>() / kept.len().max(1) as f64;
    let dom = &p.domain;
    Ok(ReplicaSummary {
        replica,
        seed,
        final_links: s.link_count(),
        mean_links,
        samples: kept.len(),
        final_energy: s.energy(p),
        mode_amplitudes: [(1, 0), (0, 1), (1, 1), (2, 0)]
            .iter()
            .map(|&(k1, k2)| (k1, k2, mode_amplitude(&s, dom, k1, k2).norm()))
            .collect(),
        pair_distance: (p.n == 2).then(|| dom.distance(s.positions[0], s.positions[1])),
        times,
        link_series,
        energy_series,
    })
}

pub fn run(a: MicroArgs) -> Result<()> {
    let r = resolve(&a)?;
    let mut run = Run::start("micro", &a.common, &r)?;
    let result = body(&mut run, &a, &r);
    run.finish(result)
}

fn body(run: &mut Run, a: &MicroArgs, r: &Resolved) -> Result<()> {
    for i in 0..r.replicas {
        if a.traj_every > 0 {
            run.output(&format!("trajectory_r{i}.csv"));
        }
        if a.link_log {
            run.output(&format!("links_r{i}.csv"));
        }
    }
    let dir = run.dir().to_path_buf();
    let reps: Vec<ReplicaSummary> = (0..r.replicas)
        .into_par_iter()
        .map(|i| run_replica(&dir, a, r, i))
        .collect::<Result<_>>()?;

    let means: Vec<f64> = reps.iter().map(|x| x.mean_links).collect();
    let m = means.iter().sum::<f64>() / means.len() as f64;
    let se = (means.len() > 1).then(|| {
        let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        (var / means.len() as f64).sqrt()
    });
    let predicted = link_count_equilibrium_prediction(&r.params, r.params.domain.uniform_density());

    let mut w = CsvOut::create(
        &run.output("summary.csv"),
        &["replica", "seed", "final_links", "mean_links", "final_energy", "abs_a10", "abs_a01", "pair_distance"],
    )?;
    for x in &reps {
        w.row([
            x.replica.to_string(),
            x.seed.to_string(),
            x.final_links.to_string(),
            fmt_f64(x.mean_links),
            fmt_f64(x.final_energy),
            fmt_f64(x.mode_amplitudes[0].2),
            fmt_f64(x.mode_amplitudes[1].2),
            x.pair_distance.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    if let Some(d) = reps[0].pair_distance {
        println!("final pair distance {d:.9} (rest length {})", r.params.hooke.l0);
    }
    match se {
        Some(se) => println!("mean link count {m:.4} +- {se:.4}, balance prediction {predicted:.4}"),
        None => println!("mean link count {m:.4}, balance prediction {predicted:.4}"),
    }
    write_json(
        &run.output("summary.json"),
        &Summary {
            predicted_mean_links: predicted,
            mean_links: m,
            standard_error: se,
            replicas: reps,
        },
    )
}
