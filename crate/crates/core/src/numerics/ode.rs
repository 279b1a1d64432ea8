//! Classical fixed-step fourth-order Runge–Kutta integration.
//!
//! The geodesic problems this crate solves are smooth and low-dimensional;
//! a fixed step keeps runs bit-reproducible, and step halving in the tests
//! verifies the expected O(h⁴) global error.

use alloc::vec;
use alloc::vec::Vec;

use super::ToleranceConfig;
use crate::error::{Error, Result};

/// Integrates `y' = rhs(t, y)` over `t_span` and returns the dense
/// trajectory `(t_i, y_i)`, initial state included.
///
/// The step count is `ceil(1 / cfg.ode_step)`, i.e. `ode_step` is the step
/// as a fraction of the span. Any non-finite state component aborts the
/// integration with [`Error::NonFinite`].
pub fn integrate_ode<F>(
    mut rhs: F,
    y0: &[f64],
    t_span: (f64, f64),
    cfg: &ToleranceConfig,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    cfg.validate()?;
    let (t0, t1) = t_span;
    if !t0.is_finite() || !t1.is_finite() {
        return Err(Error::NonFinite("integration span must be finite"));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state must be finite"));
    }
    let n_steps = (1.0 / cfg.ode_step).ceil() as usize;
    let n_steps = n_steps.max(2);
    let h = (t1 - t0) / n_steps as f64;

    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];

    let mut out = Vec::with_capacity(n_steps + 1);
    out.push((t0, y.clone()));

    for step in 0..n_steps {
        let t = t0 + h * step as f64;

        rhs(t, &y, &mut k1);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, &stage, &mut k2);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, &stage, &mut k3);
        for i in 0..dim {
            stage[i] = y[i] + h * k3[i];
        }
        rhs(t + h, &stage, &mut k4);

        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state became non-finite mid-integration"));
        }
        let t_next = if step + 1 == n_steps {
            t1
        } else {
            t0 + h * (step + 1) as f64
        };
        out.push((t_next, y.clone()));
    }
    Ok(out)
}
