//! Plain `key = value` run configuration.
//!
//! Entries are separated by newlines or commas; `#` starts a comment. Every
//! key is optional and unknown keys are rejected.

use std::fmt;
use std::str::FromStr;

use crate::bath::BathConfig;
use crate::dynamics::Density2;
use crate::error::{Error, Result};
use crate::influence::SystemParams;
use crate::kernels::MAX_TSMATPI_DK;
use crate::oracles::{MAX_FULLSUM_STEPS, MAX_ORACLE_DK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    Up,
    Down,
    Mixed,
}

impl InitialState {
    pub fn density(self) -> Density2 {
        match self {
            InitialState::Up => Density2::pure_up(),
            InitialState::Down => Density2::pure_down(),
            InitialState::Mixed => Density2::mixed(),
        }
    }
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "up" => Ok(InitialState::Up),
            "down" => Ok(InitialState::Down),
            "mixed" => Ok(InitialState::Mixed),
            _ => Err(format!("expected up, down or mixed, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Tsmatpi,
    Iquapi,
    Fullsum,
}

impl Method {
    /// Largest admissible `dk` for this method.
    pub fn dk_cap(self) -> usize {
        match self {
            Method::Tsmatpi => MAX_TSMATPI_DK,
            Method::Iquapi | Method::Fullsum => MAX_ORACLE_DK,
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tsmatpi" => Ok(Method::Tsmatpi),
            "iquapi" => Ok(Method::Iquapi),
            "fullsum" => Ok(Method::Fullsum),
            _ => Err(format!("expected tsmatpi, iquapi or fullsum, got `{s}`")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Tsmatpi => "tsmatpi",
            Method::Iquapi => "iquapi",
            Method::Fullsum => "fullsum",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: SystemParams,
    pub bath: BathConfig,
    pub dt: f64,
    pub dk: usize,
    pub n_steps: usize,
    pub rho0: InitialState,
    pub method: Method,
    pub bench_dk_min: usize,
    pub bench_dk_max: usize,
    /// Seconds of repeated runs averaged per benchmark size.
    pub bench_window: f64,
    /// Worker threads for kernel traversal; 1 runs sequentially.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: SystemParams::default(),
            bath: BathConfig::default(),
            dt: 0.1,
            dk: 10,
            n_steps: 100,
            rho0: InitialState::Up,
            method: Method::Tsmatpi,
            bench_dk_min: 6,
            bench_dk_max: 12,
            bench_window: 10.0,
            threads: 1,
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.parse().map_err(|e: T::Err| Error::ConfigValue {
        key: key.to_string(),
        msg: format!("cannot parse `{raw}`: {e}"),
    })
}

fn bad(key: &str, msg: impl Into<String>) -> Error {
    Error::ConfigValue {
        key: key.to_string(),
        msg: msg.into(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for entry in line.split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (key, raw) = entry.split_once('=').ok_or_else(|| Error::ConfigSyntax {
                line: lineno + 1,
                msg: format!("expected key=value, got `{entry}`"),
            })?;
            let (key, raw) = (key.trim(), raw.trim());
            match key {
                "xi" => cfg.bath.xi = value(key, raw)?,
                "omega_c" => cfg.bath.omega_c = value(key, raw)?,
                "omega_max" => cfg.bath.omega_max = value(key, raw)?,
                "n_modes" => cfg.bath.n_modes = value(key, raw)?,
                "beta" => cfg.bath.beta = value(key, raw)?,
                "epsilon" => cfg.system.epsilon = value(key, raw)?,
                "delta" => cfg.system.delta = value(key, raw)?,
                "dt" => cfg.dt = value(key, raw)?,
                "dk" => cfg.dk = value(key, raw)?,
                "n_steps" => cfg.n_steps = value(key, raw)?,
                "rho0" => cfg.rho0 = value(key, raw)?,
                "method" => cfg.method = value(key, raw)?,
                "bench_dk_min" => cfg.bench_dk_min = value(key, raw)?,
                "bench_dk_max" => cfg.bench_dk_max = value(key, raw)?,
                "bench_window" => cfg.bench_window = value(key, raw)?,
                "threads" => cfg.threads = value(key, raw)?,
                _ => return Err(bad(key, "unknown key")),
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.bath.validate()?;
        if !(self.system.epsilon.is_finite() && self.system.delta.is_finite()) {
            return Err(bad("epsilon", "system parameters must be finite"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(bad("dt", format!("must be positive, got {}", self.dt)));
        }
        let cap = self.method.dk_cap();
        if !(1..=cap).contains(&self.dk) {
            return Err(bad(
                "dk",
                format!("must be in 1..={cap} for method {}", self.method),
            ));
        }
        if self.n_steps < 1 {
            return Err(bad("n_steps", "must be at least 1"));
        }
        if self.method == Method::Fullsum && self.n_steps > MAX_FULLSUM_STEPS {
            return Err(bad(
                "n_steps",
                format!("must be at most {MAX_FULLSUM_STEPS} for method fullsum"),
            ));
        }
        if self.bench_dk_min < 1
            || self.bench_dk_min > self.bench_dk_max
            || self.bench_dk_max > MAX_TSMATPI_DK
        {
            return Err(bad(
                "bench_dk_max",
                format!("bench range must satisfy 1 <= min <= max <= {MAX_TSMATPI_DK}"),
            ));
        }
        if !(self.bench_window.is_finite() && self.bench_window >= 0.0) {
            return Err(bad(
                "bench_window",
                "must be a non-negative number of seconds",
            ));
        }
        if self.threads < 1 {
            return Err(bad("threads", "must be at least 1"));
        }
        Ok(())
    }
}
