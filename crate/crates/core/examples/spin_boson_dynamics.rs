//! ⟨σ_z(t)⟩ for the biased spin-boson model, written as CSV to stdout.
//! Usage: `spin_boson_dynamics [xi] [dk] [n_steps]`.

use smatpi::bath::{compute_eta, discretize_bath, BathConfig};
use smatpi::dynamics::{evolve_tsmatpi, Density2};
use smatpi::influence::{system_propagator, SystemParams};

fn main() -> smatpi::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let xi: f64 = args.first().and_then(|a| a.parse().ok()).unwrap_or(0.2);
    let dk: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let n_steps: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(100);

    let cfg = BathConfig {
        xi,
        ..BathConfig::default()
    };
    let dt = 0.1;
    let eta = compute_eta(&discretize_bath(&cfg)?, cfg.beta, dt, dk + 1)?;
    let k = system_propagator(&SystemParams::default(), dt);
    let series = evolve_tsmatpi(&eta, &k, dk, &Density2::pure_up(), n_steps)?;

    println!("t,sigma_z,trace_error,coherence");
    for ((t, sz), rho) in series.times().zip(series.sigma_z()).zip(&series.states) {
        let coherence = rho.0 .0[0][1];
        println!(
            "{t:.2},{sz:.10},{:.1e},{:.6e}",
            (rho.trace() - 1.0).norm(),
            coherence.norm()
        );
    }
    Ok(())
}
