//! Builds both memory-kernel families by tree traversal and prints their
//! size by depth. Usage: `build_kernels [dk] [threads]`.

use std::time::Instant;

use smatpi::bath::{compute_eta, discretize_bath, BathConfig};
use smatpi::influence::{system_propagator, SystemParams};
use smatpi::kernels::compute_kernels_with_stats;

fn main() -> smatpi::Result<()> {
    let mut args = std::env::args().skip(1);
    let dk: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(8);
    let threads: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    let cfg = BathConfig::default();
    let dt = 0.1;
    let eta = compute_eta(&discretize_bath(&cfg)?, cfg.beta, dt, dk + 1)?;
    let k = system_propagator(&SystemParams::default(), dt);

    let start = Instant::now();
    let (kernels, stats) = compute_kernels_with_stats(&eta, &k, dk, threads)?;
    println!(
        "dk = {dk}: {} nodes in {:.3} s, peak frame scalars {}",
        stats.total_nodes(),
        start.elapsed().as_secs_f64(),
        stats.peak_live_scalars
    );
    println!("\n  k   max|M(k,0)|    max|M(k+1,1)|");
    for j in 1..=dk {
        println!(
            "{j:>3}   {:.6e}   {:.6e}",
            kernels.col0(j).max_abs(),
            kernels.col1(j).max_abs()
        );
    }
    Ok(())
}
