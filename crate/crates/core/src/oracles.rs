//! Brute-force reference implementations: full path summation, kernel
//! deconvolution, the closed small-`k` kernel formulas and i-QuAPI.
//!
//! Only the `f`/`g`/`a` primitives are shared with the fast traversal.

use crate::bath::EtaTable;
use crate::dynamics::{Density2, DensitySeries};
use crate::error::{Error, Result};
use crate::influence::{a_initial, a_interior, f_factor, g_factor, PairState, Unitary2};
use crate::kernels::KernelSet;
use crate::linalg::Mat4;
use crate::C64;

/// Longest path accepted by [`full_path_propagator`].
pub const MAX_FULLSUM_STEPS: usize = 10;
/// Largest memory length accepted by the deconvolution and i-QuAPI oracles.
pub const MAX_ORACLE_DK: usize = 8;

/// Which time points a path sum starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Window {
    /// Points `0..=n`; column 0 uses the initial η and `F^(0,0)` is included.
    Initial,
    /// Points `1..=n+1`; interior η throughout and no self factor on the
    /// first point, which is the shift-invariant form.
    Shifted,
}

fn window_eta(eta: &EtaTable, window: Window, j1: usize, j2: usize) -> Result<C64> {
    match window {
        Window::Initial => eta.lookup(j1, j2),
        Window::Shifted => eta.lookup(j1 + 1, j2 + 1),
    }
}

/// Sums the full influence-functional weight over every interior path of `n`
/// steps. Entry `(s_n, s_0)`.
fn path_sum(eta: &EtaTable, k_mat: &Unitary2, window: Window, n: usize) -> Result<Mat4> {
    if n > eta.max_lag {
        return Err(Error::LagOutOfRange {
            j1: n,
            j2: 0,
            max_lag: eta.max_lag,
        });
    }
    // eta_by[j1][j2], in window-local indices
    let mut eta_by = vec![Vec::new(); n + 1];
    for (j1, row) in eta_by.iter_mut().enumerate() {
        for j2 in 0..=j1 {
            row.push(window_eta(eta, window, j1, j2)?);
        }
    }
    let mut out = Mat4::zeros();
    let mut path = vec![PairState::ALL[0]; n + 1];
    for s0 in PairState::ALL {
        path[0] = s0;
        let w0 = match window {
            Window::Initial => f_factor(s0, s0, eta_by[0][0]),
            Window::Shifted => C64::new(1.0, 0.0),
        };
        extend_path(&mut path, 1, w0, &eta_by, k_mat, &mut out);
    }
    Ok(out)
}

fn extend_path(
    path: &mut [PairState],
    j: usize,
    weight: C64,
    eta_by: &[Vec<C64>],
    k_mat: &Unitary2,
    out: &mut Mat4,
) {
    let n = path.len() - 1;
    for s in PairState::ALL {
        path[j] = s;
        let mut w = weight * g_factor(s, path[j - 1], k_mat);
        for j2 in 0..=j {
            w *= f_factor(s, path[j2], eta_by[j][j2]);
        }
        if j == n {
            out[(s.index(), path[0].index())] += w;
        } else {
            extend_path(path, j + 1, w, eta_by, k_mat, out);
        }
    }
}

/// Exact reduced propagator `U^(n,0)` by summation over all paths.
pub fn full_path_propagator(eta: &EtaTable, k_mat: &Unitary2, n_steps: usize) -> Result<Mat4> {
    if !(1..=MAX_FULLSUM_STEPS).contains(&n_steps) {
        return Err(Error::range(
            "n_steps",
            n_steps,
            format!("1..={MAX_FULLSUM_STEPS}"),
        ));
    }
    path_sum(eta, k_mat, Window::Initial, n_steps)
}

/// Kernels recovered from exact propagators by inverting the convolution
/// identities, shifted family first.
pub fn deconvolve_kernels(eta: &EtaTable, k_mat: &Unitary2, dk: usize) -> Result<KernelSet> {
    if !(1..=MAX_ORACLE_DK).contains(&dk) {
        return Err(Error::range("dk", dk, format!("1..={MAX_ORACLE_DK}")));
    }
    let u: Vec<Mat4> = (1..=dk)
        .map(|r| path_sum(eta, k_mat, Window::Initial, r))
        .collect::<Result<_>>()?;
    let w: Vec<Mat4> = (1..=dk)
        .map(|r| path_sum(eta, k_mat, Window::Shifted, r))
        .collect::<Result<_>>()?;

    let mut ks = KernelSet::zeros(dk);
    for k in 1..=dk {
        let mut m = w[k - 1];
        for j in 1..k {
            m = m - ks.m_col1[k - j - 1] * w[j - 1];
        }
        ks.m_col1[k - 1] = m;
    }
    for r in 1..=dk {
        let mut m = u[r - 1];
        for j in 1..r {
            m = m - ks.m_col1[r - j - 1] * u[j - 1];
        }
        ks.m_col0[r - 1] = m;
    }
    Ok(ks)
}

/// `M^(k,0)` for `k` in {2, 3} from the closed diagram formulas.
pub fn explicit_kernel(eta: &EtaTable, k_mat: &Unitary2, k: usize) -> Result<Mat4> {
    let f = |a: PairState, b: PairState, j1: usize, j2: usize| -> Result<C64> {
        Ok(f_factor(a, b, eta.lookup(j1, j2)?))
    };
    let mut out = Mat4::zeros();
    match k {
        2 => {
            for s0 in PairState::ALL {
                for s1 in PairState::ALL {
                    for s2 in PairState::ALL {
                        let chain =
                            a_interior(s2, s1, eta, k_mat)? * a_initial(s1, s0, eta, k_mat)?;
                        out[(s2.index(), s0.index())] += (f(s2, s0, 2, 0)? - 1.0) * chain;
                    }
                }
            }
        }
        3 => {
            for s0 in PairState::ALL {
                for s1 in PairState::ALL {
                    for s2 in PairState::ALL {
                        for s3 in PairState::ALL {
                            let f20 = f(s2, s0, 2, 0)?;
                            let f30 = f(s3, s0, 3, 0)?;
                            let f31 = f(s3, s1, 3, 1)?;
                            let boxes = (f30 - 1.0) * f20 * f31 + (f31 - 1.0) * (f20 - 1.0);
                            let chain = a_interior(s3, s2, eta, k_mat)?
                                * a_interior(s2, s1, eta, k_mat)?
                                * a_initial(s1, s0, eta, k_mat)?;
                            out[(s3.index(), s0.index())] += boxes * chain;
                        }
                    }
                }
            }
        }
        _ => return Err(Error::range("k", k, "2 or 3")),
    }
    Ok(out)
}

/// Iterative QuAPI: propagates the augmented tensor over the last `dk` time
/// points, weighting every extension by `G` and all `F` with lag ≤ `dk`.
pub fn iquapi_evolve(
    eta: &EtaTable,
    k_mat: &Unitary2,
    dk: usize,
    rho0: &Density2,
    n_steps: usize,
) -> Result<DensitySeries> {
    if !(1..=MAX_ORACLE_DK).contains(&dk) {
        return Err(Error::range("dk", dk, format!("1..={MAX_ORACLE_DK}")));
    }
    if n_steps < 1 {
        return Err(Error::range("n_steps", n_steps, ">= 1"));
    }
    if eta.max_lag < dk.min(n_steps) {
        return Err(Error::LagOutOfRange {
            j1: dk,
            j2: 0,
            max_lag: eta.max_lag,
        });
    }
    rho0.check_initial()?;
    let rho_vec = rho0.to_vec();

    // digit d (base 4, least significant first) holds the pair state at time n - d
    let eta00 = eta.lookup(0, 0)?;
    let mut tensor: Vec<C64> = PairState::ALL
        .iter()
        .map(|&s| rho_vec[s.index()] * f_factor(s, s, eta00))
        .collect();
    let mut len = 1;
    let mut states = vec![*rho0];

    for n in 0..n_steps {
        let t = n + 1;
        // F^(t, t-d) for d = 0..=len, against every pair of states
        let mut f_tab = Vec::with_capacity(len + 1);
        for d in 0..=len {
            let e = eta.lookup(t, t - d)?;
            let mut row = [[C64::default(); 4]; 4];
            for a in PairState::ALL {
                for b in PairState::ALL {
                    row[a.index()][b.index()] = f_factor(a, b, e);
                }
            }
            f_tab.push(row);
        }
        let mut g_tab = [[C64::default(); 4]; 4];
        for a in PairState::ALL {
            for b in PairState::ALL {
                g_tab[a.index()][b.index()] = g_factor(a, b, k_mat);
            }
        }

        let keep = (len + 1).min(dk);
        let mut next = vec![C64::default(); 4usize.pow(keep as u32)];
        let modulus = next.len();
        for (old, &amp) in tensor.iter().enumerate() {
            if amp == C64::default() {
                continue;
            }
            for s in 0..4 {
                let mut w = amp * g_tab[s][old % 4] * f_tab[0][s][s];
                let mut rest = old;
                for row in &f_tab[1..] {
                    w *= row[s][rest % 4];
                    rest /= 4;
                }
                next[(old * 4 + s) % modulus] += w;
            }
        }
        tensor = next;
        len = keep;

        let mut v = [C64::default(); 4];
        for (idx, amp) in tensor.iter().enumerate() {
            v[idx % 4] += amp;
        }
        states.push(Density2::from_vec(&v));
    }
    Ok(DensitySeries { dt: eta.dt, states })
}
