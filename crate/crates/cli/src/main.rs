//! Command-line front end for the weyl-lab experiments.

mod config;
mod theta;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use theta::parse_theta;
use weyl_lab::contfrac::{convergents, expand_angle, f_witness, construct_f_member};
use weyl_lab::experiments::{
    box_experiment, density_probe, growth_report, resume_witness, select_qn, tail_measure, ResumeConfig, TailEstimate,
};
use weyl_lab::renorm::renorm_chain;
use weyl_lab::report::{to_json, write_text, Format, Table, Tabular};
use weyl_lab::rng::{sample_rng, tag, uniform_angle};
use weyl_lab::weylsum::{parseval_estimate, trajectory, weyl_sum};
use weyl_lab::{calibration, Angle, Error, Result};

#[derive(Parser)]
#[command(name = "weyl-lab", version, about = "Quadratic Weyl sums over the skew shift: sums, continued fractions, renormalization and finite-scale experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Serialize)]
struct Output {
    /// json or csv
    #[arg(long, default_value = "json")]
    #[serde(skip)]
    format: String,
    /// write the report here instead of stdout
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// JSON object of flag values; explicit flags win
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize)]
struct CfArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 64)]
    depth: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
}

#[derive(Args, Clone, Serialize)]
struct ConstructArgs {
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// leading quotients, comma separated
    #[arg(long, default_value = "2")]
    seed_quotients: String,
}

#[derive(Args, Clone, Serialize)]
struct SumArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value = "0")]
    x: String,
    #[arg(long, default_value = "0")]
    y: String,
    #[arg(long)]
    n: u64,
}

#[derive(Args, Clone, Serialize)]
struct TrajArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value = "0")]
    x: String,
    #[arg(long, default_value = "0")]
    y: String,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    stride: u64,
}

#[derive(Args, Clone, Serialize)]
struct ParsevalArgs {
    #[arg(long)]
    theta: String,
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args, Clone, Serialize)]
struct RenormArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value = "0")]
    x: String,
    #[arg(long)]
    k: u64,
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

#[derive(Args, Clone, Serialize)]
struct ScheduleArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 64)]
    depth: usize,
    /// also estimate the tail measure at each level with this many samples
    #[arg(long, default_value_t = 0)]
    tail_samples: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args, Clone, Serialize)]
struct ResumeArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = 5.0)]
    u_min: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    #[arg(long, default_value_t = 0.1)]
    eps_n_max: f64,
    #[arg(long, default_value_t = 33)]
    grid: usize,
    #[arg(long, default_value_t = 4096)]
    candidates: u64,
    #[arg(long, default_value_t = 8)]
    max_full_checks: usize,
    /// only try this continued-fraction level
    #[arg(long)]
    level: Option<usize>,
    #[arg(long, default_value_t = 64)]
    depth: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

impl ResumeArgs {
    fn config(&self) -> ResumeConfig {
        ResumeConfig {
            eps: self.eps,
            delta: self.delta,
            u_min: self.u_min,
            threshold: self.threshold,
            tolerance: self.tolerance,
            eps_n_max: self.eps_n_max,
            grid_points: self.grid,
            x_candidates: self.candidates,
            max_full_checks: self.max_full_checks,
            level: self.level,
            seed: self.seed,
            ..ResumeConfig::default()
        }
    }
}

#[derive(Args, Clone, Serialize)]
struct BoxArgs {
    #[command(flatten)]
    resume: ResumeArgs,
    #[arg(long, default_value_t = 0.25)]
    j_lo: f64,
    #[arg(long, default_value_t = 0.75)]
    j_hi: f64,
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Args, Clone, Serialize)]
struct DensityArgs {
    #[arg(long)]
    theta: String,
    /// defaults to a point drawn from --seed
    #[arg(long)]
    x: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 10_000_000)]
    n: u64,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.25)]
    cell: f64,
}

#[derive(Args, Clone, Serialize)]
struct GrowthArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value = "100,1000,10000,100000")]
    n_schedule: String,
    #[arg(long, default_value_t = 512)]
    grid: usize,
}

#[derive(Args, Clone, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// comma-separated criterion ids, e.g. E1,E8
    #[arg(long)]
    only: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Continued fraction, convergents and witness certificate of θ
    #[command(args_override_self = true)]
    Cf {
        #[command(flatten)]
        a: CfArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Build θ with rapidly growing quotients and certify it
    #[command(args_override_self = true)]
    Construct {
        #[command(flatten)]
        a: ConstructArgs,
        #[command(flatten)]
        o: Output,
    },
    /// One Weyl sum a(x, y, n)
    #[command(args_override_self = true)]
    Sum {
        #[command(flatten)]
        a: SumArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Partial sums along the orbit, every stride-th one
    #[command(args_override_self = true)]
    Traj {
        #[command(flatten)]
        a: TrajArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Monte Carlo mean of |a(x, q)|² over x
    #[command(args_override_self = true)]
    Parseval {
        #[command(flatten)]
        a: ParsevalArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Renormalization chain with per-level residuals
    #[command(args_override_self = true)]
    Renorm {
        #[command(flatten)]
        a: RenormArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Convergent denominators with decreasing witnesses
    #[command(args_override_self = true)]
    Schedule {
        #[command(flatten)]
        a: ScheduleArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Search a scheduled level for x, m and run checks (i)-(iii)
    #[command(args_override_self = true)]
    Resume {
        #[command(flatten)]
        a: ResumeArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Box experiment around a resume witness
    #[command(name = "box", args_override_self = true)]
    BoxExp {
        #[command(flatten)]
        a: BoxArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Disk cells visited by the partial sums of e(k²θ + kx)
    #[command(args_override_self = true)]
    Density {
        #[command(flatten)]
        a: DensityArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Sup of |a(x, n)| over an x grid along a schedule of n
    #[command(args_override_self = true)]
    Growth {
        #[command(flatten)]
        a: GrowthArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Run the acceptance criteria
    #[command(name = "verify-all", args_override_self = true)]
    VerifyAll {
        #[command(flatten)]
        a: VerifyArgs,
        #[command(flatten)]
        o: Output,
    },
    /// Recompute the calibration file
    #[command(args_override_self = true)]
    Calibrate {
        #[command(flatten)]
        o: Output,
    },
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    experiment: &'a str,
    config: &'a C,
    seed: Option<u64>,
    result: &'a R,
}

fn emit<C: Serialize, R: Serialize>(
    o: &Output,
    experiment: &str,
    config: &C,
    seed: Option<u64>,
    result: &R,
    table: Option<Table>,
    summary: String,
) -> Result<bool> {
    let envelope = Envelope {
        experiment,
        config,
        seed,
        result,
    };
    let text = match Format::from_str(&o.format)? {
        Format::Json => to_json(&envelope)?,
        Format::Csv => match table {
            Some(t) => t.to_csv(),
            None => Table::flatten(&envelope)?.to_csv(),
        },
    };
    match &o.out {
        Some(path) => {
            write_text(path, &text)?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(true)
}

fn angle(s: &str) -> Result<Angle> {
    Angle::from_str(s)
}

fn u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("not a count: {t:?}"))))
        .collect()
}

#[derive(Serialize)]
struct CfReport {
    theta: Angle,
    cf: weyl_lab::contfrac::ContinuedFraction,
    exhausted: bool,
    convergents: Vec<weyl_lab::contfrac::Convergent>,
    certificate: weyl_lab::contfrac::FClassCert,
}

#[derive(Serialize)]
struct SumReport {
    re: f64,
    im: f64,
    modulus: f64,
}

#[derive(Serialize)]
struct ScheduleReport {
    schedule: weyl_lab::experiments::QnSchedule,
    tails: Vec<TailEstimate>,
}

#[derive(Serialize)]
struct BoxOutput {
    witness: weyl_lab::experiments::ResumeWitness,
    #[serde(rename = "box")]
    box_report: weyl_lab::experiments::BoxReport,
}

/// `Ok(false)` when the run completed but some criterion failed.
fn dispatch(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Cf { a, o } => {
            let t = parse_theta(&a.theta)?;
            let (cf, exhausted) = match &t.cf {
                Some(cf) => (cf.clone(), true),
                None => {
                    let e = expand_angle(t.angle, a.depth)?;
                    (e.cf, e.exhausted)
                }
            };
            let cert = f_witness(&cf, a.eps, t.angle)?;
            let summary = format!("cf [{}] ({} levels), min witness {:.4e}", cf, cf.len(), cert.min_witness);
            let r = CfReport {
                theta: t.angle,
                convergents: convergents(&cf),
                cf,
                exhausted,
                certificate: cert,
            };
            emit(&o, "cf", &a, None, &r, None, summary)
        }
        Cmd::Construct { a, o } => {
            let seeds = u64_list(&a.seed_quotients)?;
            let (cf, cert) = construct_f_member(a.eps, a.levels, &seeds)?;
            let summary = format!("constructed [{cf}], min witness {:.4e}", cert.min_witness);
            emit(&o, "construct", &a, None, &cert, None, summary)
        }
        Cmd::Sum { a, o } => {
            let t = parse_theta(&a.theta)?;
            let v = weyl_sum(t.angle, angle(&a.x)?, angle(&a.y)?, a.n);
            let r = SumReport {
                re: v.re,
                im: v.im,
                modulus: v.norm(),
            };
            let summary = format!("a = {:.12} {:+.12}i, |a| = {:.12}", v.re, v.im, v.norm());
            emit(&o, "sum", &a, None, &r, None, summary)
        }
        Cmd::Traj { a, o } => {
            let t = parse_theta(&a.theta)?;
            let tr = trajectory(t.angle, angle(&a.x)?, angle(&a.y)?, a.n, a.stride)?;
            let summary = format!("{} points recorded", tr.points.len());
            let table = tr.table();
            emit(&o, "traj", &a, None, &tr, Some(table), summary)
        }
        Cmd::Parseval { a, o } => {
            let t = parse_theta(&a.theta)?;
            let e = parseval_estimate(t.angle, a.q, a.samples, a.seed)?;
            let summary = format!("mean |a|² = {:.6} ± {:.6} (q = {})", e.mean, e.std_err, a.q);
            emit(&o, "parseval", &a, Some(a.seed), &e, None, summary)
        }
        Cmd::Renorm { a, o } => {
            let t = parse_theta(&a.theta)?;
            let c = renorm_chain(t.angle, angle(&a.x)?, a.k, a.depth)?;
            let summary = format!(
                "depth {} of {}{}, max residual {:.6}",
                c.depth(),
                a.depth,
                if c.truncated { " (truncated)" } else { "" },
                c.max_residual()
            );
            emit(&o, "renorm", &a, None, &c, None, summary)
        }
        Cmd::Schedule { a, o } => {
            let t = parse_theta(&a.theta)?;
            let s = select_qn(&t.cf(a.depth)?, t.angle, a.eps, a.threshold)?;
            let mut tails = Vec::new();
            if a.tail_samples > 0 {
                for l in &s.levels {
                    if let Some(q) = l.q_u64().filter(|&q| q <= 1 << 24) {
                        tails.push(tail_measure(t.angle, q, a.eps, a.tail_samples, a.seed)?);
                    }
                }
            }
            let qs: Vec<String> = s.levels.iter().map(|l| l.q.to_string()).collect();
            let summary = format!("scheduled q: {}", qs.join(", "));
            emit(&o, "schedule", &a, Some(a.seed), &ScheduleReport { schedule: s, tails }, None, summary)
        }
        Cmd::Resume { a, o } => {
            let t = parse_theta(&a.theta)?;
            let w = resume_witness(t.angle, &t.cf(a.depth)?, &a.config())?;
            let summary = format!(
                "level {} q={} m={} product {:.6} eps_n {:.6} checks {}/{}/{}",
                w.level, w.q, w.m, w.product_value, w.eps_n, w.check_i.ok, w.check_ii.ok, w.check_iii.ok
            );
            emit(&o, "resume", &a, Some(a.seed), &w, None, summary)
        }
        Cmd::BoxExp { a, o } => {
            let t = parse_theta(&a.resume.theta)?;
            let w = resume_witness(t.angle, &t.cf(a.resume.depth)?, &a.resume.config())?;
            let b = box_experiment(t.angle, &w, (a.j_lo, a.j_hi), a.nu, a.samples, a.resume.seed)?;
            let summary = format!(
                "M={} symdiff {:.6} ± {:.6}, modulus fraction {:.6}",
                b.big_m, b.symdiff_ratio.mean, b.symdiff_ratio.std_err, b.modulus_fraction.mean
            );
            emit(&o, "box", &a, Some(a.resume.seed), &BoxOutput { witness: w, box_report: b }, None, summary)
        }
        Cmd::Density { a, o } => {
            let t = parse_theta(&a.theta)?;
            let x = match &a.x {
                Some(x) => angle(x)?,
                None => uniform_angle(&mut sample_rng(a.seed, tag::DENSITY, 0)),
            };
            let d = density_probe(t.angle, x, a.n, a.radius, a.cell)?;
            let summary = format!("covered {}/{} cells ({:.4})", d.covered, d.cells, d.covered_fraction);
            let table = d.table();
            emit(&o, "density", &a, Some(a.seed), &d, Some(table), summary)
        }
        Cmd::Growth { a, o } => {
            let t = parse_theta(&a.theta)?;
            let g = growth_report(t.angle, &u64_list(&a.n_schedule)?, a.grid)?;
            let summary = format!("max sup|a|/√n {:.6}", g.max_sup_over_sqrt_n());
            let table = g.table();
            emit(&o, "growth", &a, None, &g, Some(table), summary)
        }
        Cmd::VerifyAll { a, o } => {
            let only: Vec<String> = a.only.as_deref().map(|s| s.split(',').map(|t| t.trim().to_string()).collect()).unwrap_or_default();
            let results = weyl_lab::acceptance::run(a.seed, &only, |c| println!("{}", c.line()));
            let failed = results.iter().filter(|c| !c.passed).count();
            let summary = format!("{} passed, {failed} failed", results.len() - failed);
            if let Some(path) = &o.out {
                let text = match Format::from_str(&o.format)? {
                    Format::Json => to_json(&results)?,
                    Format::Csv => Table::flatten(&results)?.to_csv(),
                };
                write_text(path, &text)?;
            }
            println!("{summary}");
            Ok(failed == 0)
        }
        Cmd::Calibrate { o } => {
            let text = calibration::to_text(&calibration::calibrate_all()?)?;
            match &o.out {
                Some(path) => {
                    write_text(path, &text)?;
                    println!("{} calibration entries written", calibration::key::ALL.len());
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unusable(_) | Error::EmptySchedule(_) | Error::SearchFailed(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("WEYL_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
