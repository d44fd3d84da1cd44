use clap::Args;
use serde::Serialize;

use springnet::dispersion::{
    mode_table, phase_diagram, scan, wholespace_unstable, DimensionlessParams, DEFAULT_K_MAX,
    DEFAULT_SCAN_POINTS, DEFAULT_Z_MAX,
};
use springnet::io::{fmt_f64, fmt_opt, parse_range, CsvOut};
use springnet::{PeriodicDomain, Result};

use super::{usage, Common, Run};

#[derive(Debug, Clone, Args, Serialize)]
pub struct DispersionArgs {
    #[command(flatten)]
    pub common: Common,
    /// alpha = l0/R; a number, or a:b:n with --phase.
    #[arg(long)]
    pub alpha: String,
    /// Coupling beta; a number, or a:b:n with --phase.
    #[arg(long)]
    pub beta: String,
    #[arg(long, default_value_t = DEFAULT_Z_MAX)]
    pub zmax: f64,
    #[arg(long, default_value_t = DEFAULT_SCAN_POINTS)]
    pub points: usize,
    /// Sweep the (alpha, beta) grid instead of scanning one point.
    #[arg(long)]
    pub phase: bool,
    /// Also write F at the periodic modes of the box (needs --radius).
    #[arg(long)]
    pub mode_table: bool,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub l1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub l2: f64,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: i64,
}

const SUMMARY_HEADER: [&str; 7] = ["alpha", "beta", "f_min", "z_min", "z0", "unstable", "wholespace_unstable"];

pub fn run(a: DispersionArgs) -> Result<()> {
    let alphas = parse_range(&a.alpha)?;
    let betas = parse_range(&a.beta)?;
    let mut run = Run::start("dispersion", &a.common, &a)?;
    let result = if a.phase {
        phase(&mut run, &a, &alphas, &betas)
    } else if alphas.len() != 1 || betas.len() != 1 {
        Err(usage("ranges need --phase"))
    } else {
        single(&mut run, &a, alphas[0], betas[0])
    };
    run.finish(result)
}

fn phase(run: &mut Run, a: &DispersionArgs, alphas: &[f64], betas: &[f64]) -> Result<()> {
    let rows = phase_diagram(alphas, betas, a.zmax, a.points)?;
    let mut w = CsvOut::create(&run.output("phase.csv"), &SUMMARY_HEADER)?;
    let mut unstable = 0;
    for r in &rows {
        unstable += r.unstable as usize;
        let p = DimensionlessParams::new(r.alpha, r.beta)?;
        w.row([
            fmt_f64(r.alpha),
            fmt_f64(r.beta),
            fmt_f64(r.f_min),
            fmt_opt(r.z_min),
            fmt_opt(r.z0),
            r.unstable.to_string(),
            wholespace_unstable(p).to_string(),
        ])?;
    }
    w.flush()?;
    println!("{} points, {unstable} unstable", rows.len());
    Ok(())
}

fn single(run: &mut Run, a: &DispersionArgs, alpha: f64, beta: f64) -> Result<()> {
    let p = DimensionlessParams::new(alpha, beta)?;
    let s = scan(p, a.zmax, a.points)?;
    let mut w = CsvOut::create(&run.output("dispersion.csv"), &SUMMARY_HEADER)?;
    w.row([
        fmt_f64(alpha),
        fmt_f64(beta),
        fmt_f64(s.f_min),
        fmt_opt(s.z_min),
        fmt_opt(s.z0),
        (s.f_min < 0.0).to_string(),
        wholespace_unstable(p).to_string(),
    ])?;
    w.flush()?;
    let mut w = CsvOut::create(&run.output("dispersion_scan.csv"), &["z", "F"])?;
    for (z, f) in s.z_grid.iter().zip(&s.f_values) {
        w.row([fmt_f64(*z), fmt_f64(*f)])?;
    }
    w.flush()?;
    println!(
        "F_min = {:.6} at z = {}, z0 = {}",
        s.f_min,
        s.z_min.map_or("-".into(), |z| format!("{z:.6}")),
        s.z0.map_or("-".into(), |z| format!("{z:.6}"))
    );

    if a.mode_table {
        let radius = a.radius.ok_or_else(|| usage("--mode-table needs --radius"))?;
        let dom = PeriodicDomain::new(a.l1, a.l2)?;
        let t = mode_table(p, &dom, radius, a.k_max)?;
        let mut w = CsvOut::create(&run.output("modes.csv"), &["k1", "k2", "z", "F", "lambda", "stable"])?;
        for e in &t.entries {
            w.row([
                e.k1.to_string(),
                e.k2.to_string(),
                fmt_f64(e.z),
                fmt_f64(e.f_value),
                fmt_f64(e.lambda),
                e.stable.to_string(),
            ])?;
        }
        w.flush()?;
        println!(
            "{} unstable modes, tail certified: {}",
            t.unstable().count(),
            t.tail_certified
        );
    }
    Ok(())
}
