//! Compares the traversal with the brute-force references: kernel
//! deconvolution, the closed k = 2, 3 formulas, and full path summation.

use smatpi::bath::{compute_eta, discretize_bath, BathConfig};
use smatpi::dynamics::propagate_reduced;
use smatpi::influence::{system_propagator, SystemParams};
use smatpi::kernels::compute_kernels;
use smatpi::oracles::{deconvolve_kernels, explicit_kernel, full_path_propagator};

fn main() -> smatpi::Result<()> {
    let cfg = BathConfig {
        n_modes: 40,
        ..BathConfig::default()
    };
    let dt = 0.1;
    let dk = 6;
    let eta = compute_eta(&discretize_bath(&cfg)?, cfg.beta, dt, dk + 1)?;
    let k = system_propagator(&SystemParams::default(), dt);

    let fast = compute_kernels(&eta, &k, dk)?;
    let slow = deconvolve_kernels(&eta, &k, dk)?;
    println!(
        "kernels vs deconvolution:      {:.2e}",
        fast.max_abs_diff(&slow)
    );
    for j in [2, 3] {
        let m = explicit_kernel(&eta, &k, j)?;
        println!(
            "M({j},0) vs closed formula:     {:.2e}",
            fast.col0(j).max_abs_diff(&m)
        );
    }
    let u = propagate_reduced(&fast, dk);
    for n in 1..=dk {
        let exact = full_path_propagator(&eta, &k, n)?;
        println!(
            "U({n},0) vs full path sum:      {:.2e}",
            u[n - 1].max_abs_diff(&exact)
        );
    }
    Ok(())
}
