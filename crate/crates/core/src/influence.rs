//! Elementary factors of the path integrand.
//!
//! Conventions used everywhere in the crate:
//! * 2×2 matrices are written in the basis `|+1⟩, |−1⟩` (`|+1⟩` first);
//! * a [`PairState`] `(σ⁺, σ⁻)` has dense index `((σ⁺+1)/2)·2 + (σ⁻+1)/2`,
//!   so `(−1,−1) → 0`, `(−1,+1) → 1`, `(+1,−1) → 2`, `(+1,+1) → 3`.

use std::fmt;

use crate::bath::EtaTable;
use crate::error::Result;
use crate::linalg::{Mat2, Mat4};
use crate::C64;

/// Eigenvalue of `σ_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn value(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    /// Row/column of this spin in a 2×2 matrix.
    pub fn basis_index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Forward/backward spin pair labelling one time point of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairState {
    pub plus: Spin,
    pub minus: Spin,
}

impl PairState {
    /// All four pair states in dense-index order.
    pub const ALL: [PairState; 4] = [
        PairState::new(Spin::Down, Spin::Down),
        PairState::new(Spin::Down, Spin::Up),
        PairState::new(Spin::Up, Spin::Down),
        PairState::new(Spin::Up, Spin::Up),
    ];

    pub const fn new(plus: Spin, minus: Spin) -> Self {
        PairState { plus, minus }
    }

    pub fn index(self) -> usize {
        let bit = |s: Spin| match s {
            Spin::Up => 1,
            Spin::Down => 0,
        };
        bit(self.plus) * 2 + bit(self.minus)
    }

    pub fn from_index(i: usize) -> PairState {
        Self::ALL[i]
    }

    pub fn is_diagonal(self) -> bool {
        self.plus == self.minus
    }

    /// The pair with forward and backward branches exchanged.
    pub fn swapped(self) -> PairState {
        PairState::new(self.minus, self.plus)
    }
}

impl fmt::Display for PairState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |s: Spin| if s == Spin::Up { '+' } else { '-' };
        write!(f, "({},{})", c(self.plus), c(self.minus))
    }
}

/// Bare system Hamiltonian `ε σ_z + Δ σ_x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            epsilon: 1.0,
            delta: 1.0,
        }
    }
}

/// One-step system propagator `K = exp(-i H_0 dt)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(pub Mat2);

impl Unitary2 {
    /// `⟨row|K|col⟩`.
    pub fn element(&self, row: Spin, col: Spin) -> C64 {
        self.0 .0[row.basis_index()][col.basis_index()]
    }

    /// `max |K K† - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        (self.0 * self.0.adjoint()).max_abs_diff(&Mat2::identity())
    }
}

pub fn system_propagator(sys: &SystemParams, dt: f64) -> Unitary2 {
    let lambda = sys.epsilon.hypot(sys.delta);
    if lambda == 0.0 || dt == 0.0 {
        return Unitary2(Mat2::identity());
    }
    let (s, c) = (lambda * dt).sin_cos();
    let (ez, dx) = (sys.epsilon / lambda, sys.delta / lambda);
    // cos(λdt) I - i sin(λdt) (ε σ_z + Δ σ_x)/λ
    Unitary2(Mat2([
        [C64::new(c, -s * ez), C64::new(0.0, -s * dx)],
        [C64::new(0.0, -s * dx), C64::new(c, s * ez)],
    ]))
}

fn f_exponent(s1: PairState, s2: PairState, eta: C64) -> C64 {
    let d = s1.plus.value() - s1.minus.value();
    -(eta * s2.plus.value() - eta.conj() * s2.minus.value()) * d
}

/// `F = exp(-(σ⁺₁ - σ⁻₁)(η σ⁺₂ - η̄ σ⁻₂))`.
pub fn f_factor(s1: PairState, s2: PairState, eta: C64) -> C64 {
    f_exponent(s1, s2, eta).exp()
}

/// `F - 1`, evaluated without cancellation for small exponents.
pub fn f_factor_minus_one(s1: PairState, s2: PairState, eta: C64) -> C64 {
    let z = f_exponent(s1, s2, eta);
    if z.re == 0.0 && z.im == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let (sin, cos) = z.im.sin_cos();
    let half = (z.im / 2.0).sin();
    let em1 = z.re.exp_m1();
    // e^x cos y - 1 = expm1(x) cos y - 2 sin²(y/2)
    C64::new(em1 * cos - 2.0 * half * half, (em1 + 1.0) * sin)
}

/// `G = ⟨σ⁺_next|K|σ⁺_prev⟩ ⟨σ⁻_prev|K†|σ⁻_next⟩`.
pub fn g_factor(s_next: PairState, s_prev: PairState, k: &Unitary2) -> C64 {
    k.element(s_next.plus, s_prev.plus) * k.element(s_next.minus, s_prev.minus).conj()
}

/// First-step factor `A^(1,0) = G^(1,0) F^(1,1) F^(1,0) F^(0,0)`.
pub fn a_initial(s1: PairState, s0: PairState, eta: &EtaTable, k: &Unitary2) -> Result<C64> {
    let (e00, e10, e11) = (eta.lookup(0, 0)?, eta.lookup(1, 0)?, eta.lookup(1, 1)?);
    Ok(g_factor(s1, s0, k) * f_factor(s1, s1, e11) * f_factor(s1, s0, e10) * f_factor(s0, s0, e00))
}

/// Interior step factor `A^(k+1,k) = F^(k+1,k) F^(k+1,k+1) G^(k+1,k)`, `k >= 1`.
pub fn a_interior(
    s_next: PairState,
    s_prev: PairState,
    eta: &EtaTable,
    k: &Unitary2,
) -> Result<C64> {
    let (e0, e1) = (eta.eta_interior[0], eta.lookup(2, 1)?);
    Ok(f_factor(s_next, s_prev, e1) * f_factor(s_next, s_next, e0) * g_factor(s_next, s_prev, k))
}

/// The 4×4 matrix of `g_factor` values, row = later pair state.
pub fn g_matrix(k: &Unitary2) -> Mat4 {
    Mat4::from_fn(|i, j| g_factor(PairState::from_index(i), PairState::from_index(j), k))
}

pub fn a_initial_matrix(eta: &EtaTable, k: &Unitary2) -> Result<Mat4> {
    pair_matrix(|s1, s0| a_initial(s1, s0, eta, k))
}

pub fn a_interior_matrix(eta: &EtaTable, k: &Unitary2) -> Result<Mat4> {
    pair_matrix(|s1, s0| a_interior(s1, s0, eta, k))
}

fn pair_matrix(mut f: impl FnMut(PairState, PairState) -> Result<C64>) -> Result<Mat4> {
    let mut m = Mat4::zeros();
    for s1 in PairState::ALL {
        for s0 in PairState::ALL {
            m[(s1.index(), s0.index())] = f(s1, s0)?;
        }
    }
    Ok(m)
}
