//! Convergence of ⟨σ_z(t)⟩ in the memory length at strong coupling.

use smatpi::bath::{compute_eta, discretize_bath, BathConfig};
use smatpi::dynamics::{evolve_tsmatpi, Density2};
use smatpi::influence::{system_propagator, SystemParams};

fn main() -> smatpi::Result<()> {
    let cfg = BathConfig {
        xi: 1.0,
        ..BathConfig::default()
    };
    let dt = 0.1;
    let eta = compute_eta(&discretize_bath(&cfg)?, cfg.beta, dt, 11)?;
    let k = system_propagator(&SystemParams::default(), dt);

    let mut prev: Option<Vec<f64>> = None;
    for dk in 2..=10 {
        let sz = evolve_tsmatpi(&eta, &k, dk, &Density2::pure_up(), 100)?.sigma_z();
        match &prev {
            Some(p) => {
                let dev = p
                    .iter()
                    .zip(&sz)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                println!("dk {:>2} -> {dk:>2}: max_t deviation {dev:.3e}", dk - 1);
            }
            None => println!("dk {dk:>2}: ⟨σ_z(10)⟩ = {:.6}", sz[100]),
        }
        prev = Some(sz);
    }
    Ok(())
}
