//! `conekit`: admissibility checks for cones from the command line.
//!
//! Exit codes: 0 when the check passes, 1 for usage and input errors, 2 when
//! the result is inconclusive or a numerical module fails.

mod commands;
mod cone_file;
mod identities;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Failure, FractalArgs, Outcome, ScanArgs};

#[derive(Debug, Parser)]
#[command(name = "conekit", version, about = "Certify cone admissibility conditions numerically")]
struct Cli {
    /// Worker threads for the numerical kernels.
    #[arg(long, global = true, env = "CONEKIT_THREADS")]
    threads: Option<usize>,
    /// Add `wall_time_s` to the report. Reports are then no longer
    /// reproducible byte for byte.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the degree-2 harmonics over the cone's cap.
    SourceCheck {
        cone: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the projection determinants for every degree up to `--nmax`.
    MediumCheck {
        cone: PathBuf,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the determinants along a deformation from the circular cone.
    DeformScan {
        cone: PathBuf,
        #[arg(long, default_value_t = 257)]
        grid: usize,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the `rho,N,log_abs_det,err_bound,suspect` table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extend the scan to negative parameters down to `-epsilon0`.
        #[arg(long)]
        negative: bool,
        /// User cap on `epsilon0`.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Report the largest certified parameter within this Hausdorff
        /// distance of the target cap.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run the Legendre and harmonic identity suites.
    VerifyIdentities {
        #[arg(long, default_value_t = 10)]
        nmax: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Box-counting dimension of a planar point set (`x,y` rows).
    FractalDim {
        points: PathBuf,
        /// Box sizes as `coarse:fine:steps`.
        #[arg(long)]
        scales: Option<String>,
        #[arg(long, default_value_t = 8)]
        offsets: usize,
        /// Treat the points as a closed polyline and resample it at this
        /// spacing.
        #[arg(long)]
        densify: Option<f64>,
        /// Smoothness for the membership test.
        #[arg(long)]
        tau: Option<f64>,
        /// Ambient dimension for the membership test.
        #[arg(long, default_value_t = 2)]
        ambient_dim: u32,
        /// Integrability for the membership test.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::SourceCheck { out, .. }
            | Command::MediumCheck { out, .. }
            | Command::DeformScan { out, .. }
            | Command::VerifyIdentities { out, .. }
            | Command::FractalDim { out, .. } => out.as_ref(),
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::SourceCheck { cone, tol, .. } => commands::source(cone, *tol),
        Command::MediumCheck { cone, nmax, tol, .. } => commands::medium(cone, *nmax, *tol),
        Command::DeformScan { cone, grid, nmax, tol, csv, negative, epsilon, delta, .. } => commands::deform(&ScanArgs {
            cone,
            n_max: *nmax,
            grid: *grid,
            tol: *tol,
            csv: csv.clone(),
            negative: *negative,
            epsilon: *epsilon,
            delta: *delta,
        }),
        Command::VerifyIdentities { nmax, seed, .. } => commands::verify(*nmax, *seed),
        Command::FractalDim { points, scales, offsets, densify, tau, ambient_dim, p, .. } => commands::fractal(&FractalArgs {
            points,
            scales: scales.clone(),
            offsets: *offsets,
            densify: *densify,
            tau: *tau,
            n: *ambient_dim,
            p: *p,
        }),
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Input(e.to_string()))?;
    }
    let start = Instant::now();
    let outcome = dispatch(&cli.command)?;
    let wall = cli.timing.then(|| start.elapsed().as_secs_f64());
    let json = report::render(&outcome.report, wall);
    for (path, text) in &outcome.files {
        write(path, text)?;
    }
    match (cli.command.out(), &cli.command) {
        (Some(path), _) => {
            write(path, &json)?;
            print!("{}", outcome.summary);
        }
        (None, Command::VerifyIdentities { .. }) => print!("{}", outcome.summary),
        (None, _) => {
            eprint!("{}", outcome.summary);
            print!("{json}");
        }
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    std::panic::set_hook(Box::new(|info| eprintln!("conekit: internal error: {info}")));
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(2),
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("conekit: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Module(msg))) => {
            eprintln!("conekit: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}
