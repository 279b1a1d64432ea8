//! Central-difference differentiation, used as the gradient oracle in
//! tests and for penalties whose value is itself the output of an
//! optimization.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Central-difference gradient of a scalar function, component error O(h²).
pub fn finite_diff_gradient<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain("finite-difference step must be positive"));
    }
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let plus = f(&probe);
        probe[i] = x[i] - h;
        let minus = f(&probe);
        probe[i] = x[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite(
                "function evaluated to a non-finite value in the stencil",
            ));
        }
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_function_has_zero_gradient() {
        let g = finite_diff_gradient(|_| 3.5, &[1.0, -2.0, 0.3], 1e-5).unwrap();
        assert_eq!(g, alloc::vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn quadratic_derivative() {
        let g = finite_diff_gradient(|x| x[0] * x[0], &[3.0], 1e-5).unwrap();
        assert_abs_diff_eq!(g[0], 6.0, epsilon = 1e-8);
    }

    #[test]
    fn gaussian_log_likelihood_score() {
        // log p(x | mu, tau) = (ln tau)/2 - (ln 2 pi)/2 - tau (x - mu)^2 / 2
        // at fixed sample x: d/dmu = tau (x - mu), d/dtau = 1/(2 tau) - (x - mu)^2/2.
        let x_obs = 0.7;
        let loglik = |p: &[f64]| {
            let (mu, tau) = (p[0], p[1]);
            0.5 * tau.ln() - 0.5 * (core::f64::consts::TAU).ln() - 0.5 * tau * (x_obs - mu).powi(2)
        };
        let at = [0.2, 1.7];
        let g = finite_diff_gradient(loglik, &at, 1e-6).unwrap();
        let analytic_mu = at[1] * (x_obs - at[0]);
        let analytic_tau = 0.5 / at[1] - 0.5 * (x_obs - at[0]).powi(2);
        assert_abs_diff_eq!(g[0], analytic_mu, epsilon = 1e-6);
        assert_abs_diff_eq!(g[1], analytic_tau, epsilon = 1e-6);
    }

    #[test]
    fn reports_nonfinite_evaluations() {
        let res = finite_diff_gradient(|x| x[0].ln(), &[0.0], 1e-5);
        assert!(matches!(res, Err(Error::NonFinite(_))));
    }

    #[test]
    fn rejects_bad_step() {
        assert!(finite_diff_gradient(|x| x[0], &[1.0], 0.0).is_err());
    }
}
