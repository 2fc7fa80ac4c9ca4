//! Discretizes the Ohmic bath and tabulates the influence coefficients η,
//! checking a few entries against direct quadrature.

use smatpi::bath::{
    bath_correlation, compute_eta, discretize_bath, eta_quadrature_oracle, BathConfig,
};

fn main() -> smatpi::Result<()> {
    let cfg = BathConfig::default();
    let modes = discretize_bath(&cfg)?;
    println!(
        "{} modes, ω from {:.4} to {:.4}, C(0) = {:.6}",
        modes.len(),
        modes[0].omega,
        modes[modes.len() - 1].omega,
        bath_correlation(&modes, cfg.beta, 0.0)
    );

    let dt = 0.1;
    let eta = compute_eta(&modes, cfg.beta, dt, 10)?;
    println!("\n lag   η(lag, 0)                        η(lag) interior");
    for d in 0..=10 {
        println!(
            "{d:>4}   {:<32.6e} {:.6e}",
            eta.eta_initial[d], eta.eta_interior[d]
        );
    }

    // quadrature is slow with hundreds of modes, so cross-check on a coarse bath
    let coarse = discretize_bath(&BathConfig { n_modes: 8, ..cfg })?;
    let table = compute_eta(&coarse, cfg.beta, dt, 4)?;
    println!("\nclosed form vs quadrature (8 modes):");
    for (j1, j2) in [(0, 0), (1, 0), (1, 1), (3, 1), (4, 0)] {
        let closed = table.lookup(j1, j2)?;
        let quad = eta_quadrature_oracle(&coarse, cfg.beta, dt, j1, j2)?;
        println!(
            "  η({j1},{j2}): |difference| = {:.2e}",
            (closed - quad).norm()
        );
    }
    Ok(())
}
