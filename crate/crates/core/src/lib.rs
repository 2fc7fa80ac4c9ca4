//! Memory kernels of the small-matrix path integral for the spin-boson model,
//! built by a depth-first walk of the path tree in `O(Δk² 4^Δk)` time and
//! `O(Δk²)` memory.
//!
//! The usual pipeline:
//!
//! ```
//! use smatpi::{bath, dynamics, influence, kernels};
//!
//! let cfg = bath::BathConfig { n_modes: 40, ..Default::default() };
//! let modes = bath::discretize_bath(&cfg)?;
//! let eta = bath::compute_eta(&modes, cfg.beta, 0.1, 5)?;
//! let k = influence::system_propagator(&influence::SystemParams::default(), 0.1);
//! let ks = kernels::compute_kernels(&eta, &k, 4)?;
//! let u = dynamics::propagate_reduced(&ks, 50);
//! let series = dynamics::evolve_density(&u, &dynamics::Density2::pure_up(), 0.1)?;
//! assert_eq!(series.states.len(), 51);
//! # Ok::<(), smatpi::Error>(())
//! ```

pub mod bath;
pub mod cli;
pub mod combinatorics;
pub mod config;
pub mod dynamics;
mod error;
pub mod influence;
pub mod kernels;
pub mod linalg;
pub mod oracles;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
