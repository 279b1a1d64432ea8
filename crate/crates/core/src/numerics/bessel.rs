//! Modified Bessel functions of the first kind, orders 0 and 1.
//!
//! Evaluation strategy: the ascending power series
//! `I0(x) = Σ (x/2)^{2k} / (k!)²` for `x <= 15`, and the large-argument
//! expansion `I_ν(x) ~ e^x/√(2πx) · Σ_k c_k(ν)/(8x)^k` truncated at its
//! smallest term beyond. The crossover is placed where both branches agree
//! to better than 1e-12, so the series never runs long enough for its
//! terms to grow into the 1e15 range where accumulation error would bite.

use crate::error::{Error, Result};

/// Series/asymptotic crossover; both branches agree to ~1e-14 here.
const CROSSOVER: f64 = 15.0;
/// Largest admissible series/asymptotic term count.
const MAX_TERMS: usize = 200;

const TWO_PI: f64 = core::f64::consts::TAU;

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite("bessel argument must be finite"));
    }
    if x < 0.0 {
        return Err(Error::Domain("bessel argument must be nonnegative"));
    }
    Ok(())
}

/// Ascending series for `I0`; all terms positive, no cancellation.
fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        term *= q / ((k * k) as f64);
        sum += term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    sum
}

/// Ascending series for `I1`.
fn i1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..MAX_TERMS {
        term *= q / ((k * (k + 1)) as f64);
        sum += term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    sum
}

/// Large-argument expansion: returns `S` with `I_ν(x) = e^x · S / √(2πx)`.
///
/// Terms follow the recurrence `t_k = t_{k-1} · ((2k-1)² - 4ν²) / (8kx)`
/// with alternating sign absorbed; truncation at the smallest term leaves
/// a relative error of order `e^{-2x}`, below 1e-13 for `x >= 15`.
fn asymptotic_scaled(order: u8, x: f64) -> f64 {
    let four_nu_sq = match order {
        0 => 0.0,
        _ => 4.0,
    };
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (odd * odd - four_nu_sq) / (8.0 * kf * x);
        if term.abs() >= prev {
            break; // divergent tail reached
        }
        prev = term.abs();
        sum += term;
        if term.abs() < f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum
}

fn eval(order: u8, x: f64) -> Result<f64> {
    check_argument(x)?;
    if x <= CROSSOVER {
        return Ok(match order {
            0 => i0_series(x),
            _ => i1_series(x),
        });
    }
    let scaled = asymptotic_scaled(order, x);
    // e^{x/2} stays finite well past the overflow point of the result,
    // so the split product detects overflow without spurious infinities.
    let half = (0.5 * x).exp();
    let value = half * (scaled / (TWO_PI * x).sqrt()) * half;
    if !value.is_finite() {
        return Err(Error::Overflow("bessel value exceeds f64 range"));
    }
    Ok(value)
}

/// Modified Bessel function of the first kind, order 0.
///
/// Relative error below 1e-12 across `[0, 700]`; errors with
/// [`Error::Overflow`] once `I0(x)` exceeds the `f64` range (x ≈ 713).
pub fn bessel_i0(x: f64) -> Result<f64> {
    eval(0, x)
}

/// Modified Bessel function of the first kind, order 1.
pub fn bessel_i1(x: f64) -> Result<f64> {
    eval(1, x)
}

/// `ln I0(x)`, valid far beyond the overflow point of `I0` itself.
pub fn ln_bessel_i0(x: f64) -> Result<f64> {
    check_argument(x)?;
    if x <= CROSSOVER {
        Ok(i0_series(x).ln())
    } else {
        Ok(x + asymptotic_scaled(0, x).ln() - 0.5 * (TWO_PI * x).ln())
    }
}

/// Mean resultant length `A(κ) = I1(κ)/I0(κ)` of a von Mises distribution.
///
/// Strictly increasing with `0 < A(κ) < 1`; evaluated through the scaled
/// asymptotic ratio for large `κ`, so it never overflows on the admissible
/// concentration range.
pub fn mean_resultant(kappa: f64) -> Result<f64> {
    if !kappa.is_finite() {
        return Err(Error::NonFinite("concentration must be finite"));
    }
    if kappa <= 0.0 {
        return Err(Error::Domain("concentration must be positive"));
    }
    if kappa <= CROSSOVER {
        Ok(i1_series(kappa) / i0_series(kappa))
    } else {
        Ok(asymptotic_scaled(1, kappa) / asymptotic_scaled(0, kappa))
    }
}

/// `A'(κ) = 1 - A(κ)² - A(κ)/κ`, the derivative of the mean resultant.
///
/// This is the concentration-direction Fisher information of the von Mises
/// family. The direct formula cancels catastrophically once `A → 1`, so
/// very large `κ` switches to the expansion
/// `A'(κ) = 1/(2κ²) + 1/(4κ³) + 3/(8κ⁴) + …`.
pub fn mean_resultant_derivative(kappa: f64) -> Result<f64> {
    if !kappa.is_finite() {
        return Err(Error::NonFinite("concentration must be finite"));
    }
    if kappa <= 0.0 {
        return Err(Error::Domain("concentration must be positive"));
    }
    if kappa >= 1e4 {
        let r = 1.0 / kappa;
        return Ok(r * r * (0.5 + r * (0.25 + r * 0.375)));
    }
    let a = mean_resultant(kappa)?;
    Ok(1.0 - a * a - a / kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Direct power-series oracle, independent of the branch logic above:
    /// plain term-by-term summation of `Σ (x/2)^{2k+ν} / (k! (k+ν)!)`.
    fn series_oracle(order: u8, x: f64) -> f64 {
        let mut sum = 0.0f64;
        let mut term = if order == 0 { 1.0 } else { 0.5 * x };
        let q = 0.25 * x * x;
        for k in 1..400 {
            sum += term;
            let kf = k as f64;
            term *= q / (kf * (kf + order as f64));
            if term < 1e-18 * sum.max(1.0) {
                break;
            }
        }
        sum + term
    }

    #[test]
    fn i0_at_zero_is_one() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn i1_vanishes_at_zero() {
        assert_eq!(bessel_i1(0.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_frozen_series_values() {
        // Oracle-computed reference points.
        assert_relative_eq!(
            bessel_i0(1.0).unwrap(),
            1.2660658777520084,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_i0(5.0).unwrap(),
            27.239871823604447,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_i1(1.0).unwrap(),
            0.565159103992485,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_i1(5.0).unwrap(),
            24.335642142450527,
            max_relative = 1e-14
        );
    }

    #[test]
    fn agrees_with_series_oracle_on_dense_grid() {
        // 1000-point grid over [0, 50] crossing the asymptotic branch.
        for i in 0..1000 {
            let x = 50.0 * (i as f64) / 999.0;
            let o0 = series_oracle(0, x);
            let o1 = series_oracle(1, x);
            assert_relative_eq!(bessel_i0(x).unwrap(), o0, max_relative = 1e-12);
            assert_relative_eq!(bessel_i1(x).unwrap(), o1, max_relative = 1e-12);
        }
    }

    #[test]
    fn branches_agree_at_crossover() {
        let s0 = i0_series(CROSSOVER);
        let a0 = asymptotic_scaled(0, CROSSOVER) * CROSSOVER.exp() / (TWO_PI * CROSSOVER).sqrt();
        assert_relative_eq!(s0, a0, max_relative = 1e-12);
        let s1 = i1_series(CROSSOVER);
        let a1 = asymptotic_scaled(1, CROSSOVER) * CROSSOVER.exp() / (TWO_PI * CROSSOVER).sqrt();
        assert_relative_eq!(s1, a1, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(bessel_i0(-1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_i0(f64::NAN), Err(Error::NonFinite(_))));
        assert!(matches!(bessel_i1(f64::INFINITY), Err(Error::NonFinite(_))));
    }

    #[test]
    fn overflows_past_representable_range() {
        assert!(bessel_i0(700.0).unwrap().is_finite());
        assert!(matches!(bessel_i0(800.0), Err(Error::Overflow(_))));
        assert!(matches!(bessel_i1(800.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn ln_i0_tracks_i0_and_extends_past_overflow() {
        for &x in &[0.0, 0.5, 3.0, 14.9, 15.1, 100.0, 650.0] {
            assert_relative_eq!(
                ln_bessel_i0(x).unwrap(),
                bessel_i0(x).unwrap().ln(),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
        }
        // Far beyond the overflow point the log stays finite and close to
        // the leading behaviour x - ln(2 pi x)/2.
        let x = 1e6;
        let ln_val = ln_bessel_i0(x).unwrap();
        assert_relative_eq!(
            ln_val,
            x - 0.5 * (TWO_PI * x).ln(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn mean_resultant_reference_value() {
        // A(1) from the series oracle ratio.
        let a1 = series_oracle(1, 1.0) / series_oracle(0, 1.0);
        assert_relative_eq!(mean_resultant(1.0).unwrap(), a1, max_relative = 1e-13);
        assert_relative_eq!(
            mean_resultant(1.0).unwrap(),
            0.4463899658965345,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mean_resultant_small_kappa_limit() {
        // A(κ) ≈ κ/2 as κ → 0.
        let k = 1e-4;
        let ratio = mean_resultant(k).unwrap() / k;
        assert!((ratio - 0.5).abs() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn mean_resultant_large_kappa_asymptote() {
        // A(κ) ≈ 1 - 1/(2κ) for large κ.
        let a = mean_resultant(100.0).unwrap();
        assert!((a - (1.0 - 1.0 / 200.0)).abs() < 1e-3);
    }

    #[test]
    fn mean_resultant_is_strictly_increasing() {
        let mut prev = 0.0;
        for i in 0..400 {
            // log grid over [1e-3, 1e3]
            let k = 10f64.powf(-3.0 + 6.0 * (i as f64) / 399.0);
            let a = mean_resultant(k).unwrap();
            assert!(a > prev, "A not increasing at κ={k}");
            assert!(a > 0.0 && a < 1.0);
            prev = a;
        }
    }

    #[test]
    fn mean_resultant_rejects_nonpositive() {
        assert!(matches!(mean_resultant(0.0), Err(Error::Domain(_))));
        assert!(matches!(mean_resultant(-2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_matches_central_difference() {
        for &k in &[0.3, 1.0, 2.0, 10.0, 50.0] {
            let h = 1e-6 * k;
            let fd = (mean_resultant(k + h).unwrap() - mean_resultant(k - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(
                mean_resultant_derivative(k).unwrap(),
                fd,
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn derivative_branches_agree() {
        // Direct formula vs asymptotic expansion near the 1e4 switch.
        let k = 1e4;
        let direct = {
            let a = mean_resultant(k).unwrap();
            1.0 - a * a - a / k
        };
        assert_relative_eq!(
            mean_resultant_derivative(k).unwrap(),
            direct,
            max_relative = 1e-6
        );
        // Positive over the full admissible range.
        for &k in &[1e-6, 1e-3, 1.0, 1e3, 1e6] {
            assert!(mean_resultant_derivative(k).unwrap() > 0.0);
        }
    }
}
