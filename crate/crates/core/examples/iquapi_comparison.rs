//! Truncated t-SMatPI against i-QuAPI at equal memory length.
//!
//! Both are exact while `N <= dk`. Beyond that they truncate different
//! things: i-QuAPI drops influence factors longer than `dk`, t-SMatPI drops
//! kernels longer than `dk`, so their curves separate slightly.

use smatpi::bath::{compute_eta, discretize_bath, BathConfig};
use smatpi::dynamics::{evolve_tsmatpi, Density2};
use smatpi::influence::{system_propagator, SystemParams};
use smatpi::oracles::iquapi_evolve;

fn main() -> smatpi::Result<()> {
    let cfg = BathConfig {
        n_modes: 40,
        ..BathConfig::default()
    };
    let dt = 0.1;
    let n_steps = 50;
    let eta = compute_eta(&discretize_bath(&cfg)?, cfg.beta, dt, 9)?;
    let k = system_propagator(&SystemParams::default(), dt);
    let rho0 = Density2::pure_up();

    println!(" dk   max|Δσ_z| for N<=dk   max|Δσ_z| over {n_steps} steps");
    for dk in 2..=8 {
        let a = evolve_tsmatpi(&eta, &k, dk, &rho0, n_steps)?.sigma_z();
        let b = iquapi_evolve(&eta, &k, dk, &rho0, n_steps)?.sigma_z();
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect();
        let early = diff[..=dk].iter().copied().fold(0.0, f64::max);
        let all = diff.iter().copied().fold(0.0, f64::max);
        println!("{dk:>3}   {early:>20.2e}   {all:>26.2e}");
    }
    Ok(())
}
