//! Batch front-end: subcommands that turn a [`RunConfig`] into CSV files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};

use crate::bath::{compute_eta, discretize_bath, BathMode, EtaTable};
use crate::combinatorics::tsmatpi_cost_model;
use crate::config::{parse_config, Method, RunConfig};
use crate::dynamics::{evolve_density, propagate_reduced, DensitySeries};
use crate::error::{Error, Result};
use crate::influence::{system_propagator, Unitary2};
use crate::kernels::{compute_kernels_with_stats, Family, KernelSet, TraversalStats};
use crate::oracles::{deconvolve_kernels, explicit_kernel, full_path_propagator, iquapi_evolve};

#[derive(Debug, Parser)]
#[command(
    name = "smatpi",
    version,
    about = "Spin-boson memory kernels by path-tree traversal"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// key=value configuration file; defaults apply when omitted.
    #[arg(global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the `threads` config key.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Write both kernel families to kernels.csv.
    Kernels,
    /// Evolve the reduced density matrix into evolve.csv.
    Evolve,
    /// Compare the fast path with the reference oracles.
    Validate,
    /// Time kernel construction over a range of memory lengths.
    Bench,
    /// Write the bath modes and η table.
    BathInfo,
}

/// Runs one subcommand; returns `false` when a validation check fails.
pub fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(t) = cli.threads {
        cfg.threads = t;
        cfg.validate()?;
    }
    fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
    match cli.command {
        Command::Kernels => {
            let path = cli.out.join("kernels.csv");
            let ks = run_kernels(&cfg)?;
            write_file(&path, |w| write_kernels_csv(&ks, w))?;
            log::info!("wrote {}", path.display());
        }
        Command::Evolve => {
            let path = cli.out.join("evolve.csv");
            let series = run_evolve(&cfg)?;
            write_file(&path, |w| write_series_csv(&series, w))?;
            log::info!("wrote {}", path.display());
        }
        Command::Validate => {
            let checks = run_validate(&cfg)?;
            for c in &checks {
                println!("{c}");
            }
            let path = cli.out.join("validate.csv");
            write_file(&path, |w| write_checks_csv(&checks, w))?;
            return Ok(checks.iter().all(Check::passed));
        }
        Command::Bench => {
            let path = cli.out.join("bench.csv");
            let rows = run_bench(&cfg)?;
            write_file(&path, |w| write_bench_csv(&rows, w))?;
            log::info!("wrote {}", path.display());
        }
        Command::BathInfo => {
            let modes = discretize_bath(&cfg.bath)?;
            let eta = compute_eta(&modes, cfg.bath.beta, cfg.dt, cfg.dk + 1)?;
            let path = cli.out.join("modes.csv");
            write_file(&path, |w| write_modes_csv(&modes, w))?;
            let path = cli.out.join("eta.csv");
            write_file(&path, |w| write_eta_csv(&eta, w))?;
        }
    }
    Ok(true)
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn setup(cfg: &RunConfig, max_lag: usize) -> Result<(EtaTable, Unitary2)> {
    let modes = discretize_bath(&cfg.bath)?;
    let eta = compute_eta(&modes, cfg.bath.beta, cfg.dt, max_lag)?;
    Ok((eta, system_propagator(&cfg.system, cfg.dt)))
}

pub fn run_kernels(cfg: &RunConfig) -> Result<KernelSet> {
    let (eta, k) = setup(cfg, cfg.dk + 1)?;
    let (ks, stats) = compute_kernels_with_stats(&eta, &k, cfg.dk, cfg.threads)?;
    log::info!("dk = {}: visited {} nodes", cfg.dk, stats.total_nodes());
    Ok(ks)
}

pub fn run_evolve(cfg: &RunConfig) -> Result<DensitySeries> {
    let rho0 = cfg.rho0.density();
    match cfg.method {
        Method::Tsmatpi => {
            let ks = run_kernels(cfg)?;
            evolve_density(&propagate_reduced(&ks, cfg.n_steps), &rho0, cfg.dt)
        }
        Method::Iquapi => {
            let (eta, k) = setup(cfg, cfg.dk + 1)?;
            iquapi_evolve(&eta, &k, cfg.dk, &rho0, cfg.n_steps)
        }
        Method::Fullsum => {
            let (eta, k) = setup(cfg, cfg.n_steps)?;
            let u = (1..=cfg.n_steps)
                .map(|n| full_path_propagator(&eta, &k, n))
                .collect::<Result<Vec<_>>>()?;
            evolve_density(&u, &rho0, cfg.dt)
        }
    }
}

/// One oracle comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<4} {:<40} max_abs_err = {:.3e} (tol {:.0e})",
            if self.passed() { "ok" } else { "FAIL" },
            self.name,
            self.error,
            self.tolerance
        )
    }
}

/// Largest memory length the oracle comparisons run at.
pub const VALIDATE_MAX_DK: usize = 6;

/// Cross-checks the traversal against every oracle at `min(dk, 6)`.
pub fn run_validate(cfg: &RunConfig) -> Result<Vec<Check>> {
    let dk = cfg.dk.min(VALIDATE_MAX_DK);
    let (eta, k) = setup(cfg, dk + 1)?;
    let rho0 = cfg.rho0.density();
    let mut checks = Vec::new();
    let mut check = |name: String, error: f64, tolerance: f64| {
        checks.push(Check {
            name,
            error,
            tolerance,
        });
    };

    let (ks, _) = compute_kernels_with_stats(&eta, &k, dk, 1)?;
    let deconv = deconvolve_kernels(&eta, &k, dk)?;
    check(
        format!("kernels vs deconvolution (dk={dk})"),
        ks.max_abs_diff(&deconv),
        1e-12,
    );
    for j in [2, 3].into_iter().filter(|&j| j <= dk) {
        let m = explicit_kernel(&eta, &k, j)?;
        check(
            format!("M({j},0) vs closed form"),
            ks.col0(j).max_abs_diff(&m),
            1e-13,
        );
    }

    let u = propagate_reduced(&ks, dk);
    let full_err = (1..=dk)
        .map(|n| Ok(u[n - 1].max_abs_diff(&full_path_propagator(&eta, &k, n)?)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    check(
        format!("U(N,0) vs full path sum (N<={dk})"),
        full_err,
        1e-12,
    );

    let smatpi = evolve_density(&u, &rho0, cfg.dt)?;
    let iquapi = iquapi_evolve(&eta, &k, dk, &rho0, dk)?;
    let rho_err = smatpi
        .states
        .iter()
        .zip(&iquapi.states)
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max);
    check(format!("density vs i-QuAPI (N<={dk})"), rho_err, 1e-12);

    let long = evolve_density(&propagate_reduced(&ks, cfg.n_steps), &rho0, cfg.dt)?;
    let trace = long
        .states
        .iter()
        .map(|s| (s.trace() - 1.0).norm())
        .fold(0.0, f64::max);
    let herm = long
        .states
        .iter()
        .map(|s| s.hermiticity_residual())
        .fold(0.0, f64::max);
    check(format!("trace drift ({} steps)", cfg.n_steps), trace, 1e-12);
    check(format!("hermiticity ({} steps)", cfg.n_steps), herm, 1e-12);

    if cfg.threads > 1 {
        let (par, _) = compute_kernels_with_stats(&eta, &k, dk, cfg.threads)?;
        check(
            format!("{} threads vs sequential", cfg.threads),
            par.max_abs_diff(&ks),
            1e-14,
        );
    }
    Ok(checks)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub dk: usize,
    /// Mean wall time of one kernel construction.
    pub wall_ns: u128,
    pub node_count: u64,
    pub model_cost: u64,
}

/// Mean wall time of [`compute_kernels_with_stats`], repeated until at least
/// `window` has elapsed so every size is averaged over a similar stretch of
/// machine time.
pub fn time_kernels(
    eta: &EtaTable,
    k_mat: &Unitary2,
    dk: usize,
    threads: usize,
    window: Duration,
) -> Result<(Duration, TraversalStats)> {
    let start = Instant::now();
    let mut runs = 0u32;
    loop {
        let (_, stats) = compute_kernels_with_stats(eta, k_mat, dk, threads)?;
        runs += 1;
        let elapsed = start.elapsed();
        if elapsed >= window {
            return Ok((elapsed / runs, stats));
        }
    }
}

/// Times kernel construction for each `dk` in the configured range. The η
/// table is built once beforehand and excluded from the timings.
pub fn run_bench(cfg: &RunConfig) -> Result<Vec<BenchRow>> {
    let (eta, k) = setup(cfg, cfg.bench_dk_max + 1)?;
    let window = Duration::from_secs_f64(cfg.bench_window);
    (cfg.bench_dk_min..=cfg.bench_dk_max)
        .map(|dk| {
            let (mean, stats) = time_kernels(&eta, &k, dk, cfg.threads, window)?;
            log::info!("dk = {dk}: {:.4} s", mean.as_secs_f64());
            Ok(BenchRow {
                dk,
                wall_ns: mean.as_nanos(),
                node_count: stats.total_nodes(),
                model_cost: tsmatpi_cost_model(dk as u32)?,
            })
        })
        .collect()
}

pub fn write_kernels_csv(ks: &KernelSet, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "family,k,row,col,re,im")?;
    for family in Family::BOTH {
        for (i, m) in ks.family(family).iter().enumerate() {
            for row in 0..4 {
                for col in 0..4 {
                    let z = m[(row, col)];
                    writeln!(
                        w,
                        "{},{},{row},{col},{:.16e},{:.16e}",
                        family.label(),
                        i + 1,
                        z.re,
                        z.im
                    )?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_series_csv(series: &DensitySeries, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        w,
        "step,t,re_rho_uu,im_rho_uu,re_rho_ud,im_rho_ud,re_rho_du,im_rho_du,re_rho_dd,im_rho_dd,sigma_z"
    )?;
    let sz = series.sigma_z();
    for (step, (t, rho)) in series.times().zip(&series.states).enumerate() {
        write!(w, "{step},{t:.16e}")?;
        for z in rho.0 .0.iter().flatten() {
            write!(w, ",{:.16e},{:.16e}", z.re, z.im)?;
        }
        writeln!(w, ",{:.16e}", sz[step])?;
    }
    Ok(())
}

pub fn write_checks_csv(checks: &[Check], w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "check,max_abs_err,tolerance,pass")?;
    for c in checks {
        writeln!(
            w,
            "\"{}\",{:.16e},{:.16e},{}",
            c.name,
            c.error,
            c.tolerance,
            c.passed()
        )?;
    }
    Ok(())
}

pub fn write_bench_csv(rows: &[BenchRow], w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "dk,wall_ns,node_count,model_cost")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.dk, r.wall_ns, r.node_count, r.model_cost
        )?;
    }
    Ok(())
}

pub fn write_modes_csv(modes: &[BathMode], w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "j,omega,c")?;
    for (j, m) in modes.iter().enumerate() {
        writeln!(w, "{},{:.16e},{:.16e}", j + 1, m.omega, m.c)?;
    }
    Ok(())
}

pub fn write_eta_csv(eta: &EtaTable, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "d,re_eta_init,im_eta_init,re_eta_int,im_eta_int")?;
    for (d, (a, b)) in eta.eta_initial.iter().zip(&eta.eta_interior).enumerate() {
        writeln!(
            w,
            "{d},{:.16e},{:.16e},{:.16e},{:.16e}",
            a.re, a.im, b.re, b.im
        )?;
    }
    Ok(())
}
