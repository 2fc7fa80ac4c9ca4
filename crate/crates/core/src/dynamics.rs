//! Reduced-density propagation from memory kernels.

use crate::bath::EtaTable;
use crate::error::{Error, Result};
use crate::influence::{PairState, Spin, Unitary2};
use crate::kernels::{compute_kernels, KernelSet};
use crate::linalg::{Mat2, Mat4};
use crate::C64;

/// A 2×2 system density matrix; index 0 is `|+1⟩`, index 1 is `|-1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Density2(pub Mat2);

impl Density2 {
    pub fn pure_up() -> Self {
        let mut m = Mat2::zeros();
        m.0[0][0] = C64::new(1.0, 0.0);
        Density2(m)
    }

    pub fn pure_down() -> Self {
        let mut m = Mat2::zeros();
        m.0[1][1] = C64::new(1.0, 0.0);
        Density2(m)
    }

    /// `I / 2`.
    pub fn mixed() -> Self {
        let mut m = Mat2::zeros();
        m.0[0][0] = C64::new(0.5, 0.0);
        m.0[1][1] = C64::new(0.5, 0.0);
        Density2(m)
    }

    /// `ρ_{σ⁺σ⁻}`.
    pub fn element(&self, plus: Spin, minus: Spin) -> C64 {
        self.0 .0[plus.basis_index()][minus.basis_index()]
    }

    pub fn trace(&self) -> C64 {
        self.0 .0[0][0] + self.0 .0[1][1]
    }

    /// `max |ρ - ρ†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.0.max_abs_diff(&self.0.adjoint())
    }

    pub fn max_abs_diff(&self, other: &Density2) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// Vectorizes in dense pair-state order.
    pub fn to_vec(&self) -> [C64; 4] {
        PairState::ALL.map(|s| self.element(s.plus, s.minus))
    }

    pub fn from_vec(v: &[C64; 4]) -> Self {
        let mut m = Mat2::zeros();
        for s in PairState::ALL {
            m.0[s.plus.basis_index()][s.minus.basis_index()] = v[s.index()];
        }
        Density2(m)
    }

    /// Rejects states that are not Hermitian with unit trace.
    pub fn check_initial(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).norm() > 1e-12 {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let h = self.hermiticity_residual();
        if h > 1e-12 {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (residual {h:e})"
            )));
        }
        Ok(())
    }
}

/// Densities at `t = 0, dt, …, N dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensitySeries {
    pub dt: f64,
    pub states: Vec<Density2>,
}

impl DensitySeries {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(move |r| r as f64 * self.dt)
    }

    pub fn sigma_z(&self) -> Vec<f64> {
        self.states.iter().map(sigma_z_expectation).collect()
    }
}

/// `⟨σ_z⟩ = Re(ρ_{++} - ρ_{--})`; a sizeable imaginary part is logged.
pub fn sigma_z_expectation(rho: &Density2) -> f64 {
    let z = rho.0 .0[0][0] - rho.0 .0[1][1];
    if z.im.abs() > 1e-10 {
        log::warn!("sigma_z has imaginary residual {:e}", z.im);
    }
    z.re
}

/// `U^(r,0)` for `r = 1..=n_steps` (element `r - 1`).
///
/// Up to the memory length the exact convolution with the `M^(r,0)` tail is
/// used; beyond it only the last `dk` shifted kernels contribute.
pub fn propagate_reduced(kernels: &KernelSet, n_steps: usize) -> Vec<Mat4> {
    let dk = kernels.dk;
    let mut u: Vec<Mat4> = Vec::with_capacity(n_steps);
    for r in 1..=n_steps {
        let mut next = if r <= dk {
            *kernels.col0(r)
        } else {
            Mat4::zeros()
        };
        for m in 1..r.min(dk + 1) {
            next += *kernels.col1(m) * u[r - m - 1];
        }
        u.push(next);
    }
    u
}

/// Applies each propagator to `rho0`; the series starts with `rho0` itself.
pub fn evolve_density(u_seq: &[Mat4], rho0: &Density2, dt: f64) -> Result<DensitySeries> {
    rho0.check_initial()?;
    let v = rho0.to_vec();
    let mut states = Vec::with_capacity(u_seq.len() + 1);
    states.push(*rho0);
    states.extend(u_seq.iter().map(|u| Density2::from_vec(&u.mul_vec(&v))));
    Ok(DensitySeries { dt, states })
}

/// Kernels, propagators and densities in one call.
pub fn evolve_tsmatpi(
    eta: &EtaTable,
    k_mat: &Unitary2,
    dk: usize,
    rho0: &Density2,
    n_steps: usize,
) -> Result<DensitySeries> {
    let kernels = compute_kernels(eta, k_mat, dk)?;
    evolve_density(&propagate_reduced(&kernels, n_steps), rho0, eta.dt)
}
