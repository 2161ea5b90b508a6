//! Command-line front end: evaluate the forms, rasterize wall diagrams,
//! and run the period / Hecke / theorem verification reports.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input,
//! 3 infeasible error budget. `LOCHMF_THREADS` caps the worker count used
//! for grid rows.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::Write;
use std::process::ExitCode;

use lochmf::core::{Discriminant, Error, EvalParams, Point};
use lochmf::hecke::verify_hecke;
use lochmf::modeval::{eval_f_maass, eval_fkd, params_for};
use lochmf::periods::{check_rationality, periods, rational_rhs};
use lochmf::qforms::{interior_forms, wall_distance};
use lochmf::verify::{run_all, VerifyConfig};
use lochmf::walls::local_poly;

#[derive(Parser)]
#[command(name = "lochmf", version, about = "Locally harmonic Maass forms: evaluators, walls, periods, Hecke checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Truncation {
    /// Largest leading coefficient `a` in the form enumeration
    /// (default: chosen from --tol)
    #[arg(long)]
    a_max: Option<usize>,
    /// Half-width of the translation window (default: chosen from --tol)
    #[arg(long)]
    n_max: Option<usize>,
    /// Absolute tolerance target
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
}

impl Truncation {
    fn resolve(&self, k: u32, d: &Discriminant, tau: Point) -> EvalParams {
        let mut p = params_for(k, d, tau, self.tol);
        if let Some(a) = self.a_max {
            p.a_max = a;
        }
        if let Some(n) = self.n_max {
            p.n_max = n;
        }
        p
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate f_{k,D} or F_{1-k,D} at one point; emits JSON
    Eval {
        /// Which object: the cusp form `f` or the locally harmonic form `F`
        #[arg(long, value_parser = ["f", "F"])]
        object: String,
        #[arg(long)]
        k: u32,
        #[arg(long, name = "D")]
        d: i64,
        /// Point tau as `RE IM`
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        tau: Vec<f64>,
        #[command(flatten)]
        trunc: Truncation,
    },
    /// Rasterize F and the wall set over a rectangle; emits CSV
    Grid {
        #[arg(long)]
        k: u32,
        #[arg(long, name = "D")]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long)]
        y1: f64,
        #[arg(long, default_value_t = 50)]
        nx: usize,
        #[arg(long, default_value_t = 50)]
        ny: usize,
        #[command(flatten)]
        trunc: Truncation,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<String>,
    },
    /// Period polynomial rationality report for f_{k,D}
    Periods {
        #[arg(long)]
        k: u32,
        #[arg(long, name = "D")]
        d: i64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Hecke relation report at one prime
    Hecke {
        #[arg(long)]
        k: u32,
        #[arg(long, name = "D")]
        d: i64,
        #[arg(long)]
        p: u32,
        /// Point tau as `RE IM` (default 0 4)
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        tau: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Run the verification suite
    Verify {
        #[arg(long)]
        k: u32,
        #[arg(long, name = "D")]
        d: i64,
        /// Run every check
        #[arg(long)]
        all: bool,
        /// Individual checks (modularity, xi_image, expansion, laplacian, growth)
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Local polynomial of the component containing a point; emits JSON
    Poly {
        #[arg(long)]
        k: u32,
        #[arg(long, name = "D")]
        d: i64,
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        tau: Vec<f64>,
    },
}

#[derive(Serialize)]
struct EvalOut {
    object: String,
    k: u32,
    #[serde(rename = "D")]
    d: i64,
    tau: [f64; 2],
    value_re: f64,
    value_im: f64,
    tail_estimate: f64,
}

fn parse_tau(v: &[f64]) -> Result<Point, Error> {
    Point::new(v[0], v[1])
}

fn init_threads() {
    if let Ok(n) = std::env::var("LOCHMF_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    init_threads();
    match cli.command {
        Command::Eval { object, k, d, tau, trunc } => {
            if k < 2 {
                return Err(Error::Domain("k must be >= 2".into()));
            }
            let disc = Discriminant::new(d)?;
            let tau = parse_tau(&tau)?;
            let p = trunc.resolve(k, &disc, tau);
            let e = if object == "f" {
                eval_fkd(k, &disc, tau, &p)
            } else {
                eval_f_maass(k, &disc, tau, &p)
            };
            if !e.tail.is_finite() {
                return Err(Error::BudgetInfeasible("tail estimate diverged; widen n_max".into()));
            }
            let out = EvalOut {
                object,
                k,
                d,
                tau: [tau.x, tau.y],
                value_re: e.value.re,
                value_im: e.value.im,
                tail_estimate: e.tail,
            };
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(true)
        }
        Command::Grid { k, d, x0, x1, y0, y1, nx, ny, trunc, out } => {
            if k < 2 || nx < 2 || ny < 2 || !(x1 > x0) || !(y1 > y0) || y0 <= 0.0 {
                return Err(Error::Domain("invalid grid specification".into()));
            }
            let disc = Discriminant::new(d)?;
            let low = Point::new(0.0, y0)?;
            let p = trunc.resolve(k, &disc, low);
            use rayon::prelude::*;
            let rows: Vec<String> = (0..ny)
                .into_par_iter()
                .map(|iy| {
                    let y = y0 + (y1 - y0) * iy as f64 / (ny - 1) as f64;
                    let mut row = String::new();
                    for ix in 0..nx {
                        let x = x0 + (x1 - x0) * ix as f64 / (nx - 1) as f64;
                        let tau = Point::new(x, y).expect("grid point in half-plane");
                        let e = eval_f_maass(k, &disc, tau, &p);
                        let sig = interior_forms(&disc, tau);
                        let on_wall = match wall_distance(&disc, tau) {
                            Some((dist, _)) => dist <= 1e-12,
                            None => false,
                        };
                        row.push_str(&format!(
                            "{x},{y},{},{},{},{}\n",
                            e.value.re,
                            e.value.im,
                            sig.hash64(),
                            u8::from(on_wall)
                        ));
                    }
                    row
                })
                .collect();
            let header = "x,y,F_re,F_im,signature_hash,on_wall_flag\n";
            match out {
                None => {
                    print!("{header}");
                    for r in rows {
                        print!("{r}");
                    }
                }
                Some(path) => {
                    let mut f = std::fs::File::create(&path)
                        .map_err(|e| Error::Domain(format!("cannot write {path}: {e}")))?;
                    f.write_all(header.as_bytes()).unwrap();
                    for r in rows {
                        f.write_all(r.as_bytes()).unwrap();
                    }
                }
            }
            Ok(true)
        }
        Command::Periods { k, d, tol } => {
            if k < 2 || k % 2 != 0 {
                return Err(Error::Domain("periods report needs even k >= 2".into()));
            }
            let disc = Discriminant::new(d)?;
            let params = EvalParams { tol, ..EvalParams::default() };
            let pset = periods(k, &disc, &params)?;
            let chk = check_rationality(k, &disc, &params)?;
            let pass = chk.residual <= tol;
            println!("periods of f_{{{k},{d}}}:");
            for (n, (r, e)) in pset.r.iter().zip(&pset.est_error).enumerate() {
                println!("  r_{n:<2} = {r:+.12e}  (± {e:.2e})");
            }
            let rhs = rational_rhs(k, &disc);
            let rhs_str: Vec<String> = (0..=(2 * k - 2) as usize)
                .map(|i| format!("{}", rhs.coeff(i).re))
                .collect();
            println!("rational side coefficients (X^0..X^{}): [{}]", 2 * k - 2, rhs_str.join(", "));
            println!(
                "congruence residual = {:.3e}, fitted constant = {:.6}  => {}",
                chk.residual,
                chk.fitted_constant,
                if pass { "PASS" } else { "FAIL" }
            );
            let json = serde_json::json!({
                "k": k, "D": d,
                "periods": pset.r, "est_error": pset.est_error,
                "residual": chk.residual, "fitted_constant": chk.fitted_constant,
                "pass": pass,
            });
            println!("{}", serde_json::to_string(&json).unwrap());
            Ok(pass)
        }
        Command::Hecke { k, d, p, tau, tol } => {
            if k < 2 {
                return Err(Error::Domain("k must be >= 2".into()));
            }
            let disc = Discriminant::new(d)?;
            let tau = match tau {
                Some(v) => parse_tau(&v)?,
                None => Point::new(0.0, 4.0)?,
            };
            let params = EvalParams { tol, ..EvalParams::default() };
            let chk = verify_hecke(k, &disc, p, tau, &params)?;
            println!(
                "T_{p} on F_{{1-{k},{d}}} at tau = {}+{}i{}:",
                chk.tau_used.x,
                chk.tau_used.y,
                if chk.nudged { " (nudged off walls)" } else { "" }
            );
            println!("  lhs = {:+.10e} {:+.10e}i", chk.lhs.re, chk.lhs.im);
            println!("  rhs = {:+.10e} {:+.10e}i", chk.rhs.re, chk.rhs.im);
            println!(
                "  |lhs-rhs| = {:.3e}  budget = {:.3e}  => {}",
                chk.residual(),
                chk.budget,
                if chk.pass() { "PASS" } else { "FAIL" }
            );
            let json = serde_json::json!({
                "k": k, "D": d, "p": p,
                "tau_used": [chk.tau_used.x, chk.tau_used.y],
                "nudged": chk.nudged,
                "lhs": [chk.lhs.re, chk.lhs.im],
                "rhs": [chk.rhs.re, chk.rhs.im],
                "residual": chk.residual(), "budget": chk.budget,
                "pass": chk.pass(),
            });
            println!("{}", serde_json::to_string(&json).unwrap());
            Ok(chk.pass())
        }
        Command::Verify { k, d, all, checks } => {
            if k < 2 {
                return Err(Error::Domain("k must be >= 2".into()));
            }
            let mut cfg = VerifyConfig::all(k, d);
            if !all {
                cfg.checks = checks;
            }
            let records = run_all(&cfg)?;
            let mut pass = true;
            println!("{:<12} {:>12} {:>12} {:>8} {:>9}  params", "check", "residual", "budget", "status", "time");
            for r in &records {
                pass &= r.pass;
                println!(
                    "{:<12} {:>12.3e} {:>12.3e} {:>8} {:>8.2}s  {}",
                    r.name,
                    r.residual,
                    r.budget,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.runtime.as_secs_f64(),
                    r.params
                );
            }
            let json: Vec<_> = records
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "name": r.name, "params": r.params,
                        "residual": r.residual, "budget": r.budget,
                        "pass": r.pass, "runtime_s": r.runtime.as_secs_f64(),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string(&json).unwrap());
            Ok(pass)
        }
        Command::Poly { k, d, tau } => {
            if k < 2 {
                return Err(Error::Domain("k must be >= 2".into()));
            }
            let disc = Discriminant::new(d)?;
            let tau = parse_tau(&tau)?;
            let poly = local_poly(k, &disc, tau, &EvalParams::default())?;
            let sig = interior_forms(&disc, tau);
            let json = serde_json::json!({
                "k": k, "D": d, "tau": [tau.x, tau.y],
                "coeffs_re": (0..=(2*k-2) as usize).map(|i| poly.coeff(i).re).collect::<Vec<_>>(),
                "coeffs_im": (0..=(2*k-2) as usize).map(|i| poly.coeff(i).im).collect::<Vec<_>>(),
                "interior_forms": sig.forms().iter().map(|q| [q.a, q.b, q.c]).collect::<Vec<_>>(),
                "signature_hash": sig.hash64(),
            });
            println!("{}", serde_json::to_string_pretty(&json).unwrap());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(Error::BudgetInfeasible(msg)) => {
            eprintln!("error: infeasible budget: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
