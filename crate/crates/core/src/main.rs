use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qgeo::geodesics::{geodesic_csv, sample_geodesic, Geodesic};
use qgeo::io::{flow_csv, read_json, to_json, write_text, StateFile};
use qgeo::linalg::eig_hermitian;
use qgeo::observables::{flexible_flow, FlexibleObservable, Observable};
use qgeo::probability::born_report;
use qgeo::spectral::{riemannian_spectrum, Interval, SolverOptions};
use qgeo::verify::{run_suite, Suite, VerifyParams};
use qgeo::{CMatrix, CVector, Config, Ray, TangentVector};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qgeo",
    version,
    about = "Fubini-Study geometry of quantum state space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded verification suite and print its report as JSON.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Override the suite tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compare the Riemannian eigensolver with the Jacobi eigensolver.
    Spectrum {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the Hamiltonian flow of <A><B> (B defaults to the identity).
    Flow {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        observable2: Option<PathBuf>,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV trajectory path; without it the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the unit-speed geodesic leaving a base ray.
    Geodesic {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Defaults to the diameter.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Born probability of a finite union of closed intervals.
    Born {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Closed interval "a,b"; repeat for a union.
        #[arg(long = "interval", required = true, allow_hyphen_values = true)]
        intervals: Vec<Interval>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Riemannian,
    Jacobi,
    Both,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: qgeo::Error| e.to_string())
}

#[derive(Serialize)]
struct SpectrumReport {
    eigenvalues_oracle: Option<Vec<f64>>,
    eigenvalues_riemannian: Option<Vec<f64>>,
    max_abs_diff: Option<f64>,
    iters_per_restart: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize)]
struct FlowSummary {
    steps: usize,
    t_end: f64,
    conserved_drift: f64,
    final_state: Ray,
}

#[derive(Serialize)]
struct GeodesicSummary {
    samples: usize,
    t_end: f64,
    final_distance: f64,
    diameter: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_observable(path: &Path) -> qgeo::Result<Observable> {
    Observable::new(read_json::<CMatrix>(path)?)
}

fn emit(json: &str, out: Option<&Path>) -> qgeo::Result<()> {
    println!("{json}");
    if let Some(path) = out {
        write_text(path, &format!("{json}\n"))?;
    }
    Ok(())
}

fn run(command: Command) -> qgeo::Result<u8> {
    match command {
        Command::Verify {
            suite,
            dim,
            trials,
            seed,
            hbar,
            tol,
        } => {
            let report = run_suite(
                suite,
                &VerifyParams {
                    dim,
                    trials,
                    seed,
                    hbar,
                    tol,
                },
            )?;
            println!("{}", to_json(&report)?);
            Ok(if report.pass { 0 } else { EXIT_FAIL })
        }
        Command::Spectrum {
            matrix,
            method,
            restarts,
            max_iters,
            seed,
            hbar,
            out,
        } => {
            let cfg = Config::new(hbar)?;
            let a = load_observable(&matrix)?;
            let oracle = (method != Method::Riemannian)
                .then(|| eig_hermitian(a.matrix()).map(|e| e.eigenvalues))
                .transpose()?;
            let riemannian = (method != Method::Jacobi)
                .then(|| {
                    let opts = SolverOptions {
                        restarts,
                        max_iters,
                        seed,
                        ..SolverOptions::default()
                    };
                    riemannian_spectrum(&cfg, &a, &opts)
                })
                .transpose()?;
            let max_abs_diff = match (&oracle, &riemannian) {
                (Some(o), Some(r)) => Some(
                    o.iter()
                        .zip(&r.eigenvalues)
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max),
                ),
                _ => None,
            };
            let (eigenvalues_riemannian, iters_per_restart) = match riemannian {
                Some(r) => (Some(r.eigenvalues), Some(r.iters_per_restart)),
                None => (None, None),
            };
            let report = SpectrumReport {
                eigenvalues_oracle: oracle,
                eigenvalues_riemannian,
                max_abs_diff,
                iters_per_restart,
            };
            emit(&to_json(&report)?, out.as_deref())?;
            Ok(0)
        }
        Command::Flow {
            observable,
            observable2,
            state,
            t_end,
            step,
            hbar,
            seed: _,
            out,
        } => {
            let cfg = Config::new(hbar)?;
            let a = load_observable(&observable)?;
            let b = match observable2 {
                Some(path) => load_observable(&path)?,
                None => Observable::identity(a.dim()),
            };
            let f = FlexibleObservable::new(a, b)?;
            let x0 = StateFile::load(&state)?;
            let flow = flexible_flow(&cfg, &f, x0.ray()?, t_end, step)?;
            let csv = flow_csv(&cfg, &f, &flow)?;
            match out {
                Some(path) => {
                    write_text(&path, &csv)?;
                    let summary = FlowSummary {
                        steps: flow.trajectory.len() - 1,
                        t_end,
                        conserved_drift: flow.conserved_drift,
                        final_state: flow.final_state().clone(),
                    };
                    println!("{}", to_json(&summary)?);
                }
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Command::Geodesic {
            base,
            dir,
            samples,
            t_end,
            hbar,
            seed: _,
            out,
        } => {
            let cfg = Config::new(hbar)?;
            let base = StateFile::load(&base)?.ray()?.clone();
            let direction: CVector = read_json(&dir)?;
            let c = Geodesic::unit(&TangentVector::horizontal(&base, &direction)?)?;
            let t_end = t_end.unwrap_or_else(|| cfg.diameter());
            let rows = sample_geodesic(&cfg, &c, t_end, samples);
            let csv = geodesic_csv(&rows);
            match out {
                Some(path) => {
                    write_text(&path, &csv)?;
                    let summary = GeodesicSummary {
                        samples: rows.len(),
                        t_end,
                        final_distance: rows.last().map(|r| r.distance).unwrap_or(0.0),
                        diameter: cfg.diameter(),
                    };
                    println!("{}", to_json(&summary)?);
                }
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Command::Born {
            matrix,
            state,
            intervals,
            hbar,
            seed: _,
            out,
        } => {
            let cfg = Config::new(hbar)?;
            let a = load_observable(&matrix)?;
            let w = StateFile::load(&state)?.density();
            let report = born_report(&cfg, &a, &w, &intervals)?;
            emit(&to_json(&report)?, out.as_deref())?;
            Ok(0)
        }
    }
}
