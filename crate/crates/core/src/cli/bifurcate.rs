use clap::Args;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use springnet::bifurcation::{
    amplitude_ode_rect, amplitude_ode_square, analyze, default_dt, reference_cases, stationary_amplitude, sweep,
    BifurcationReport, Geometry, SweepRow,
};
use springnet::io::{fmt_f64, fmt_opt, parse_range, write_json, CsvOut};
use springnet::{PeriodicDomain, Result};

use super::{usage, Common, Run};

#[derive(Debug, Clone, Args, Serialize)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub l1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub l2: f64,
    /// Evaluate c, d at this beta instead of beta_c.
    #[arg(long)]
    pub beta: Option<f64>,
    /// The three reference cases R = 1/2, 1/4, 1/8 with alpha = 1/2.
    #[arg(long)]
    pub reproduce_paper: bool,
    /// Radius values, a:b:n or a single number.
    #[arg(long, requires = "sweep_alpha")]
    pub sweep_radius: Option<String>,
    #[arg(long, requires = "sweep_radius")]
    pub sweep_alpha: Option<String>,
    /// Integrate the amplitude equations with the coefficients at this point.
    #[arg(long)]
    pub amplitude_demo: bool,
    /// Linear rate for the demo; default 0.05 |lambda_11|.
    #[arg(long)]
    pub demo_lambda: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub demo_a0: f64,
    #[arg(long, default_value_t = 7e-4)]
    pub demo_b0: f64,
    /// Demo length in units of 1/lambda.
    #[arg(long, default_value_t = 40.0)]
    pub demo_t: f64,
}

/// Full report of one sweep point, or why there is none.
#[derive(Debug, Serialize)]
struct SweepPoint {
    #[serde(rename = "R")]
    radius: f64,
    alpha: f64,
    report: Option<BifurcationReport>,
    error: Option<String>,
}

fn sweep_csv(run: &mut Run, name: &str, rows: &[SweepRow]) -> Result<()> {
    let mut w = CsvOut::create(&run.output(name), &["R", "alpha", "beta_c", "c", "d", "class"])?;
    for r in rows {
        w.row([
            fmt_f64(r.radius),
            fmt_f64(r.alpha),
            fmt_opt(r.beta_c),
            fmt_opt(r.c),
            fmt_opt(r.d),
            r.class.clone(),
        ])?;
    }
    w.flush()
}

fn print_report(r: &BifurcationReport) {
    let d = r.d.map_or("-".to_string(), |d| format!("{d:.6}"));
    println!(
        "R = {}, alpha = {}: beta_c = {:.6}, c = {:.6}, d = {d}, {}",
        r.radius, r.alpha, r.beta_c, r.c, r.classification
    );
    if !r.assumptions_ok {
        for v in &r.violated {
            println!("  assumption violated: {v}");
        }
    }
}

pub fn run(a: BifurcateArgs) -> Result<()> {
    let mut run = Run::start("bifurcate", &a.common, &a)?;
    let result = body(&mut run, &a);
    run.finish(result)
}

fn body(run: &mut Run, a: &BifurcateArgs) -> Result<()> {
    let dom = PeriodicDomain::new(a.l1, a.l2)?;
    if a.reproduce_paper {
        let reports = reference_cases()?;
        let rows: Vec<SweepRow> = reports
            .iter()
            .map(|r| SweepRow {
                radius: r.radius,
                alpha: r.alpha,
                beta_c: Some(r.beta_c),
                c: Some(r.c),
                d: r.d,
                class: r.classification.to_string(),
            })
            .collect();
        reports.iter().for_each(print_report);
        sweep_csv(run, "reproduce.csv", &rows)?;
        return write_json(&run.output("reproduce.json"), &reports);
    }
    if let (Some(rs), Some(al)) = (&a.sweep_radius, &a.sweep_alpha) {
        let (radii, alphas) = (parse_range(rs)?, parse_range(al)?);
        let rows = sweep(&radii, &alphas, &dom);
        let reports: Vec<SweepPoint> = rows
            .par_iter()
            .map(|r| {
                let (report, error) = match analyze(r.radius, r.alpha, &dom, None) {
                    Ok(rep) => (Some(rep), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                SweepPoint {
                    radius: r.radius,
                    alpha: r.alpha,
                    report,
                    error,
                }
            })
            .collect();
        write_json(&run.output("sweep.json"), &reports)?;
        let sub = rows.iter().filter(|r| r.class == "subcritical").count();
        let sup = rows.iter().filter(|r| r.class == "supercritical").count();
        println!("{} points: {sup} supercritical, {sub} subcritical", rows.len());
        return sweep_csv(run, "sweep.csv", &rows);
    }
    let radius = a
        .radius
        .ok_or_else(|| usage("need --radius, --reproduce-paper or --sweep-radius/--sweep-alpha"))?;
    let report = analyze(radius, a.alpha, &dom, a.beta)?;
    print_report(&report);
    write_json(&run.output("report.json"), &report)?;
    if a.amplitude_demo {
        demo(run, a, &report)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct DemoSummary {
    lambda: f64,
    c: f64,
    d: Option<f64>,
    dt: f64,
    t_end: f64,
    predicted_amplitude: Option<f64>,
    final_a: f64,
    final_b: Option<f64>,
    escaped: Option<(f64, f64)>,
}

fn demo(run: &mut Run, a: &BifurcateArgs, r: &BifurcationReport) -> Result<()> {
    let lambda = match a.demo_lambda {
        Some(l) => l,
        None => {
            let l11 = r.lambda.get("1,1").copied().unwrap_or(-1.0);
            0.05 * l11.abs()
        }
    };
    let t_end = a.demo_t / lambda.abs();
    let a0 = Complex64::new(a.demo_a0, 0.0);
    let mut w = CsvOut::create(&run.output("amplitude.csv"), &["t", "abs_a", "abs_b"])?;
    let summary = match (r.geometry, r.d) {
        (Geometry::Square, Some(d)) => {
            let b0 = Complex64::new(a.demo_b0, 0.0);
            let dt = default_dt(lambda, r.c.abs() + d.abs(), a.demo_a0.max(a.demo_b0));
            let traj = amplitude_ode_square(lambda, r.c, d, a0, b0, t_end, dt)?;
            for (t, [x, y]) in traj.times.iter().zip(&traj.states) {
                w.row([fmt_f64(*t), fmt_f64(x.norm()), fmt_f64(y.norm())])?;
            }
            let [x, y] = *traj.last();
            DemoSummary {
                lambda,
                c: r.c,
                d: Some(d),
                dt,
                t_end,
                predicted_amplitude: stationary_amplitude(lambda, r.c, d),
                final_a: x.norm(),
                final_b: Some(y.norm()),
                escaped: traj.escaped,
            }
        }
        _ => {
            let dt = default_dt(lambda, r.c, a.demo_a0);
            let traj = amplitude_ode_rect(lambda, r.c, a0, t_end, dt)?;
            for (t, x) in traj.times.iter().zip(&traj.states) {
                w.row([fmt_f64(*t), fmt_f64(x.norm()), String::new()])?;
            }
            DemoSummary {
                lambda,
                c: r.c,
                d: None,
                dt,
                t_end,
                predicted_amplitude: (lambda > 0.0 && r.c < 0.0).then(|| (lambda / -r.c).sqrt()),
                final_a: traj.last().norm(),
                final_b: None,
                escaped: traj.escaped,
            }
        }
    };
    w.flush()?;
    match summary.escaped {
        Some((t, amp)) => println!("amplitude left the perturbative regime at t = {t:.4} (|A| = {amp:.4})"),
        None => println!(
            "final |A| = {:.6}, predicted {}",
            summary.final_a,
            summary.predicted_amplitude.map_or("-".into(), |p| format!("{p:.6}"))
        ),
    }
    write_json(&run.output("amplitude.json"), &summary)
}
