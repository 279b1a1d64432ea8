//! Special functions and generic numerical routines backing the manifolds:
//! modified Bessel functions, a fixed-step RK4 integrator and
//! central-difference gradients.

mod bessel;
mod diff;
mod ode;

pub use bessel::{bessel_i0, bessel_i1, ln_bessel_i0, mean_resultant, mean_resultant_derivative};
pub use diff::finite_diff_gradient;
pub use ode::integrate_ode;

use crate::error::{Error, Result};

/// Shared tolerances for the iterative routines.
///
/// `ode_step` is the step expressed as a fraction of the integration
/// interval, so the default `1e-3` always splits a span into 1000 steps
/// regardless of its length.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iters: usize,
    pub ode_step: f64,
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iters: usize, ode_step: f64) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_iters,
            ode_step,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Domain("abs_tol must be positive and finite"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Domain("rel_tol must be positive and finite"));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be at least 1"));
        }
        // A full span must be divisible into at least two steps.
        if !(self.ode_step > 0.0 && self.ode_step <= 0.5) {
            return Err(Error::Domain("ode_step must lie in (0, 0.5]"));
        }
        Ok(())
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-14,
            max_iters: 200_000,
            ode_step: 1e-3,
        }
    }
}
