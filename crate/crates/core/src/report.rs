//! Machine-readable outcome of a single law check.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::lattice::LatticeConfig;

/// A complex scalar in the emitted JSON.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ComplexField {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexField {
    fn from(v: C64) -> Self {
        ComplexField { re: v.re, im: v.im }
    }
}

/// Frozen view of the configuration a check ran under.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigSnapshot {
    pub n: usize,
    pub m_ir: i64,
    pub m_uv: i64,
    pub mass: String,
    pub tau: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

impl ConfigSnapshot {
    pub fn new(cfg: &LatticeConfig, n_max: Option<usize>) -> Self {
        ConfigSnapshot {
            n: cfg.n(),
            m_ir: cfg.m_ir(),
            m_uv: cfg.m_uv(),
            mass: format!("{}/{}", cfg.mass().numer(), cfg.mass().denom()),
            tau: cfg.tau(),
            tol: cfg.tol(),
            n_max,
        }
    }
}

/// One named law, its measured deviation, and pass/fail at the declared
/// tolerance. Where a check fits a global scalar or extracts a corner
/// coefficient, those are reported alongside.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub anchor: String,
    pub deviation: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ComplexField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_scalar: Option<ComplexField>,
    pub backend: String,
    pub config: ConfigSnapshot,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        deviation: f64,
        tol: f64,
        backend: impl Into<String>,
        config: ConfigSnapshot,
    ) -> Self {
        CheckReport {
            name: name.into(),
            anchor: anchor.into(),
            deviation,
            tol,
            pass: deviation <= tol,
            scalar: None,
            tau_scalar: None,
            backend: backend.into(),
            config,
        }
    }

    pub fn with_scalar(mut self, s: C64) -> Self {
        self.scalar = Some(s.into());
        self
    }

    pub fn with_tau_scalar(mut self, s: C64) -> Self {
        self.tau_scalar = Some(s.into());
        self
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}
