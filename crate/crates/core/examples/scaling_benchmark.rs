//! Wall time of kernel construction against the cost model.
//! Usage: `scaling_benchmark [dk_min] [dk_max] [window_seconds]`.

use std::time::Duration;

use smatpi::bath::{compute_eta, discretize_bath, BathConfig};
use smatpi::cli::time_kernels;
use smatpi::combinatorics::tsmatpi_cost_model;
use smatpi::influence::{system_propagator, SystemParams};

fn main() -> smatpi::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let lo: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(6);
    let hi: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(11);
    let window: f64 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(2.0);

    let cfg = BathConfig {
        n_modes: 40,
        ..BathConfig::default()
    };
    let eta = compute_eta(&discretize_bath(&cfg)?, cfg.beta, 0.1, hi + 1)?;
    let k = system_propagator(&SystemParams::default(), 0.1);

    println!(" dk      seconds        nodes    ns/model unit   growth");
    let mut prev: Option<f64> = None;
    for dk in lo..=hi {
        let (mean, stats) = time_kernels(&eta, &k, dk, 1, Duration::from_secs_f64(window))?;
        let secs = mean.as_secs_f64();
        let model = tsmatpi_cost_model(dk as u32)? as f64;
        let growth = prev
            .map(|p| format!("x{:.2}", secs / p))
            .unwrap_or_default();
        println!(
            "{dk:>3}  {secs:>11.5}  {:>11}  {:>14.3}   {growth}",
            stats.total_nodes(),
            secs * 1e9 / model
        );
        prev = Some(secs);
    }
    Ok(())
}
