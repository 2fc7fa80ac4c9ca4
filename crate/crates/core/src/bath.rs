//! Ohmic bath discretization and the influence-functional coefficient table.
//!
//! Time cells: the initial point owns the half cell `[0, dt/2]`, every later
//! point `j >= 1` owns `[j dt - dt/2, j dt + dt/2]`. The coefficient
//! `η_{j1,j2}` is the double integral of the bath correlation `C(t - t')`
//! with `t` in cell `j1` and `t'` in cell `j2` (restricted to `t' < t` on the
//! diagonal). Because interior cells all have the same width, every
//! coefficient not touching the initial point depends only on `j1 - j2`.

use crate::error::{Error, Result};
use crate::C64;

/// Parameters of the discretized Ohmic bath.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathConfig {
    /// Dimensionless coupling intensity ξ.
    pub xi: f64,
    /// Cutoff frequency ω_c.
    pub omega_c: f64,
    /// Largest mode frequency ω_max.
    pub omega_max: f64,
    /// Number of harmonic modes L.
    pub n_modes: usize,
    /// Inverse temperature β.
    pub beta: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        BathConfig {
            xi: 0.2,
            omega_c: 2.5,
            omega_max: 10.0,
            n_modes: 400,
            beta: 5.0,
        }
    }
}

impl BathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return Err(Error::range("xi", self.xi, "finite and >= 0"));
        }
        for (what, v) in [
            ("omega_c", self.omega_c),
            ("omega_max", self.omega_max),
            ("beta", self.beta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::range(what, v, "finite and > 0"));
            }
        }
        if self.n_modes == 0 {
            return Err(Error::range("n_modes", 0, ">= 1"));
        }
        Ok(())
    }
}

/// One harmonic mode of the discretized bath.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathMode {
    pub omega: f64,
    pub c: f64,
}

/// Logarithmic discretization of the Ohmic spectral density into `L` modes.
pub fn discretize_bath(cfg: &BathConfig) -> Result<Vec<BathMode>> {
    cfg.validate()?;
    let l = cfg.n_modes as f64;
    // 1 - exp(-ω_max/ω_c)
    let span = -(-cfg.omega_max / cfg.omega_c).exp_m1();
    let scale = (cfg.xi * cfg.omega_c / l * span).sqrt();
    Ok((1..=cfg.n_modes)
        .map(|j| {
            let omega = if j == cfg.n_modes {
                // the logarithm telescopes to ω_max exactly
                cfg.omega_max
            } else {
                -cfg.omega_c * (-(j as f64 / l) * span).ln_1p()
            };
            BathMode {
                omega,
                c: omega * scale,
            }
        })
        .collect())
}

/// `coth(x)` for `x > 0` without overflow at large `x`.
pub(crate) fn coth(x: f64) -> f64 {
    1.0 + 2.0 / (2.0 * x).exp_m1()
}

/// Bath autocorrelation `C(t) = Σ_j c_j²/(2ω_j) [coth(βω_j/2) cos ω_j t - i sin ω_j t]`.
pub fn bath_correlation(modes: &[BathMode], beta: f64, t: f64) -> C64 {
    modes.iter().fold(C64::new(0.0, 0.0), |acc, m| {
        let w = m.c * m.c / (2.0 * m.omega);
        let (s, c) = (m.omega * t).sin_cos();
        acc + C64::new(w * coth(beta * m.omega / 2.0) * c, -w * s)
    })
}

/// Influence-functional coefficients, stored by lag.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaTable {
    pub dt: f64,
    pub max_lag: usize,
    /// `η_{d,0}` for `d = 0..=max_lag` (the second point is the initial one).
    pub eta_initial: Vec<C64>,
    /// `η(d)` between two interior points a lag `d` apart.
    pub eta_interior: Vec<C64>,
}

impl EtaTable {
    pub fn zeros(dt: f64, max_lag: usize) -> Self {
        EtaTable {
            dt,
            max_lag,
            eta_initial: vec![C64::new(0.0, 0.0); max_lag + 1],
            eta_interior: vec![C64::new(0.0, 0.0); max_lag + 1],
        }
    }

    /// `η_{j1,j2}` for `j1 >= j2`.
    pub fn lookup(&self, j1: usize, j2: usize) -> Result<C64> {
        let out = || Error::LagOutOfRange {
            j1,
            j2,
            max_lag: self.max_lag,
        };
        if j2 > j1 {
            return Err(out());
        }
        let table = if j2 == 0 {
            &self.eta_initial
        } else {
            &self.eta_interior
        };
        table.get(j1 - j2).copied().ok_or_else(out)
    }

    pub fn is_finite(&self) -> bool {
        self.eta_initial
            .iter()
            .chain(&self.eta_interior)
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Second antiderivative of `cos(ωτ)` vanishing with its slope at 0.
fn cos_antiderivative2(omega: f64, tau: f64) -> f64 {
    let s = (omega * tau / 2.0).sin();
    2.0 * s * s / (omega * omega)
}

/// Second antiderivative of `sin(ωτ)` vanishing with its slope at 0.
fn sin_antiderivative2(omega: f64, tau: f64) -> f64 {
    let x = omega * tau;
    let x_minus_sin = if x.abs() < 0.1 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x - x.sin()
    };
    x_minus_sin / (omega * omega)
}

/// `∫_{a1}^{b1} dt ∫_{a2}^{b2} dt' f(t - t')` from a second antiderivative of `f`.
fn cell_pair(f2: impl Fn(f64) -> f64, (a1, b1): (f64, f64), (a2, b2): (f64, f64)) -> f64 {
    (f2(b1 - a2) - f2(a1 - a2)) - (f2(b1 - b2) - f2(a1 - b2))
}

fn cell(j: usize, dt: f64) -> (f64, f64) {
    if j == 0 {
        (0.0, dt / 2.0)
    } else {
        let t = j as f64 * dt;
        (t - dt / 2.0, t + dt / 2.0)
    }
}

/// Closed-form η table for lags `0..=max_lag`.
pub fn compute_eta(modes: &[BathMode], beta: f64, dt: f64, max_lag: usize) -> Result<EtaTable> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::range("dt", dt, "finite and > 0"));
    }
    if max_lag < 1 {
        return Err(Error::range("max_lag", max_lag, ">= 1"));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::range("beta", beta, "> 0"));
    }
    let mut table = EtaTable::zeros(dt, max_lag);
    for m in modes {
        let weight = m.c * m.c / (2.0 * m.omega);
        if weight == 0.0 {
            continue;
        }
        let thermal = coth(beta * m.omega / 2.0);
        let fc = |tau: f64| cos_antiderivative2(m.omega, tau);
        let fs = |tau: f64| sin_antiderivative2(m.omega, tau);
        let combine = |ic: f64, is: f64| C64::new(weight * thermal * ic, -weight * is);

        // diagonal cells: ∫_0^h (h - u) f(u) du is the antiderivative at h
        let h0 = dt / 2.0;
        table.eta_initial[0] += combine(fc(h0), fs(h0));
        table.eta_interior[0] += combine(fc(dt), fs(dt));

        let c0 = cell(0, dt);
        let c1 = cell(1, dt);
        for d in 1..=max_lag {
            let cd = cell(d, dt);
            table.eta_initial[d] += combine(cell_pair(fc, cd, c0), cell_pair(fs, cd, c0));
            let cd1 = cell(d + 1, dt);
            table.eta_interior[d] += combine(cell_pair(fc, cd1, c1), cell_pair(fs, cd1, c1));
        }
    }
    Ok(table)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod(f: &mut dyn FnMut(f64) -> Result<C64>, a: f64, b: f64) -> Result<(C64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    for (i, &x) in GK_NODES.iter().enumerate() {
        let vals = if x == 0.0 {
            f(mid)?
        } else {
            f(mid - half * x)? + f(mid + half * x)?
        };
        kronrod += vals * KRONROD_WEIGHTS[i];
        // Gauss nodes are the odd-indexed Kronrod nodes
        if i % 2 == 1 {
            gauss += vals * GAUSS_WEIGHTS[i / 2];
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).norm()))
}

fn adaptive(
    f: &mut dyn FnMut(f64) -> Result<C64>,
    a: f64,
    b: f64,
    rel_tol: f64,
    depth: u32,
) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let (val, err) = gauss_kronrod(f, a, b)?;
    if err <= rel_tol * val.norm() || err < 1e-300 {
        return Ok(val);
    }
    if depth == 0 {
        return Err(Error::Quadrature { a, b, err });
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive(f, a, mid, rel_tol, depth - 1)? + adaptive(f, mid, b, rel_tol, depth - 1)?)
}

const QUAD_TOL: f64 = 1e-12;
const QUAD_DEPTH: u32 = 40;

/// `η_{j1,j2}` by nested adaptive Gauss–Kronrod quadrature of the bath
/// correlation; a validation oracle for [`compute_eta`].
pub fn eta_quadrature_oracle(
    modes: &[BathMode],
    beta: f64,
    dt: f64,
    j1: usize,
    j2: usize,
) -> Result<C64> {
    if j2 > j1 {
        return Err(Error::InvalidArgument(format!(
            "quadrature oracle needs j1 >= j2, got ({j1}, {j2})"
        )));
    }
    let (a1, b1) = cell(j1, dt);
    let (a2, b2) = cell(j2, dt);
    let diagonal = j1 == j2;
    let mut outer = |t: f64| -> Result<C64> {
        let hi = if diagonal { t } else { b2 };
        let mut inner = |tp: f64| Ok(bath_correlation(modes, beta, t - tp));
        adaptive(&mut inner, a2, hi, QUAD_TOL * 0.1, QUAD_DEPTH)
    };
    adaptive(&mut outer, a1, b1, QUAD_TOL, QUAD_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_bath(xi: f64, n: usize) -> (BathConfig, Vec<BathMode>) {
        let cfg = BathConfig {
            xi,
            n_modes: n,
            ..BathConfig::default()
        };
        let modes = discretize_bath(&cfg).unwrap();
        (cfg, modes)
    }

    #[test]
    fn last_mode_is_omega_max() {
        let (cfg, modes) = small_bath(0.2, 400);
        assert_eq!(modes.len(), 400);
        assert_eq!(modes.last().unwrap().omega, cfg.omega_max);
        assert!(modes.windows(2).all(|w| w[0].omega < w[1].omega));
    }

    #[test]
    fn single_mode_bath() {
        let (cfg, modes) = small_bath(0.2, 1);
        let expect_c = cfg.omega_max
            * (cfg.xi * cfg.omega_c * (1.0 - (-cfg.omega_max / cfg.omega_c).exp())).sqrt();
        assert_eq!(modes.len(), 1);
        assert!((modes[0].c - expect_c).abs() < 1e-13 * expect_c);
    }

    #[test]
    fn invalid_config() {
        let bad = BathConfig {
            n_modes: 0,
            ..BathConfig::default()
        };
        assert!(discretize_bath(&bad).is_err());
        let bad = BathConfig {
            beta: -1.0,
            ..BathConfig::default()
        };
        assert!(discretize_bath(&bad).is_err());
    }

    #[test]
    fn correlation_at_zero_is_real_positive() {
        let (cfg, modes) = small_bath(0.2, 50);
        let c0 = bath_correlation(&modes, cfg.beta, 0.0);
        assert_eq!(c0.im, 0.0);
        assert!(c0.re > 0.0);
    }

    #[test]
    fn single_mode_correlation() {
        let m = BathMode { omega: 1.3, c: 0.7 };
        let (beta, t) = (2.0, 0.9);
        let w = m.c * m.c / (2.0 * m.omega);
        let th = 1.0 / (beta * m.omega / 2.0).tanh();
        let expect = C64::new(w * th * (m.omega * t).cos(), -w * (m.omega * t).sin());
        assert!((bath_correlation(&[m], beta, t) - expect).norm() < 1e-15);
    }

    #[test]
    fn decoupled_bath_gives_zero_table() {
        let (cfg, modes) = small_bath(0.0, 20);
        assert_eq!(bath_correlation(&modes, cfg.beta, 1.7), C64::new(0.0, 0.0));
        let eta = compute_eta(&modes, cfg.beta, 0.1, 8).unwrap();
        assert!(eta
            .eta_initial
            .iter()
            .chain(&eta.eta_interior)
            .all(|z| *z == C64::new(0.0, 0.0)));
        assert_eq!(
            eta_quadrature_oracle(&modes, cfg.beta, 0.1, 3, 1).unwrap(),
            C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn lookup_uses_lag() {
        let (cfg, modes) = small_bath(0.2, 10);
        let eta = compute_eta(&modes, cfg.beta, 0.1, 6).unwrap();
        assert_eq!(eta.lookup(5, 3).unwrap(), eta.lookup(7, 5).unwrap());
        assert_eq!(eta.lookup(4, 0).unwrap(), eta.eta_initial[4]);
        assert_eq!(eta.lookup(2, 2).unwrap(), eta.eta_interior[0]);
        assert!(eta.lookup(2, 3).is_err());
        assert!(eta.lookup(9, 1).is_err());
    }

    #[test]
    fn rejects_bad_step() {
        let (cfg, modes) = small_bath(0.2, 3);
        assert!(compute_eta(&modes, cfg.beta, 0.0, 4).is_err());
        assert!(compute_eta(&modes, cfg.beta, -0.1, 4).is_err());
    }

    #[test]
    fn coth_is_stable() {
        assert_eq!(coth(800.0), 1.0);
        assert!((coth(0.3) - 1.0 / 0.3f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_quadrature_single_mode() {
        let m = [BathMode { omega: 2.1, c: 0.8 }];
        let (beta, dt) = (5.0, 0.1);
        let eta = compute_eta(&m, beta, dt, 6).unwrap();
        for j1 in 0..=6 {
            for j2 in 0..=j1 {
                let q = eta_quadrature_oracle(&m, beta, dt, j1, j2).unwrap();
                let c = eta.lookup(j1, j2).unwrap();
                assert!(
                    (q - c).norm() <= 1e-10 * q.norm(),
                    "({j1},{j2}): {q} vs {c}"
                );
            }
        }
    }

    #[test]
    fn zero_temperature_limit() {
        // β → ∞ leaves coth → 1; compare against the same closed form with thermal factor 1.
        let m = BathMode { omega: 1.7, c: 0.5 };
        let dt = 0.2;
        let eta = compute_eta(&[m], 1e6, dt, 2).unwrap();
        let w = m.c * m.c / (2.0 * m.omega);
        let expect = C64::new(
            w * cos_antiderivative2(m.omega, dt),
            -w * sin_antiderivative2(m.omega, dt),
        );
        assert!((eta.eta_interior[0] - expect).norm() < 1e-15);
        let q = eta_quadrature_oracle(&[m], 1e6, dt, 1, 1).unwrap();
        assert!((q - expect).norm() < 1e-10 * expect.norm());
    }
}
