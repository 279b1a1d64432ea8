//! The univariate Gaussian belief manifold.
//!
//! Beliefs are `N(mu, 1/tau)` parameterized by mean and precision. The
//! Fisher metric is `ds² = τ dμ² + dτ²/(2τ²)`; substituting `σ = 1/√τ`
//! gives `ds² = (dμ² + 2 dσ²)/σ²`, which after `u = μ/√2` is twice the
//! Poincaré half-plane metric. Distances and geodesics therefore come in
//! closed form: map to the half-plane, use the standard formulas, scale by
//! `√2`. The scale factor is the classic error site, so the test suite
//! cross-checks the closed form against a boundary-value geodesic solve of
//! the raw metric.
//!
//! Internally `(μ, σ)` is the working chart; `(μ, τ)` is the construction
//! and learner-facing chart.

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::manifold::{Belief, Coords, MetricTensor2};
use crate::numerics::ToleranceConfig;
use crate::sampling::standard_normal;
use crate::trajectory::BeliefPath;

use alloc::vec::Vec;

const SQRT_2: f64 = core::f64::consts::SQRT_2;
const LN_TAU_2PI: f64 = 1.8378770664093453; // ln(2π)

/// Admissible precision range; outside it curvature stencils and the
/// half-plane map become ill-conditioned.
pub const TAU_MIN: f64 = 1e-12;
pub const TAU_MAX: f64 = 1e12;

/// Coordinate charts on the Gaussian manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GaussianChart {
    #[default]
    MuTau,
    MuSigma,
}

/// A point `N(mu, 1/tau)` on the Gaussian belief manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBelief {
    mu: f64,
    tau: f64,
}

impl GaussianBelief {
    /// Strict constructor in the `(μ, τ)` chart.
    pub fn new(mu: f64, tau: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::NonFinite("gaussian mean must be finite"));
        }
        if !tau.is_finite() {
            return Err(Error::NonFinite("gaussian precision must be finite"));
        }
        if !(TAU_MIN..=TAU_MAX).contains(&tau) {
            return Err(Error::Domain("gaussian precision outside [1e-12, 1e12]"));
        }
        Ok(Self { mu, tau })
    }

    /// Constructor in the `(μ, σ)` chart.
    pub fn from_mu_sigma(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain("gaussian sigma must be positive and finite"));
        }
        Self::new(mu, 1.0 / (sigma * sigma))
    }

    /// Constructor from coordinates in an arbitrary chart.
    pub fn from_coords_in(chart: GaussianChart, c: [f64; 2]) -> Result<Self> {
        match chart {
            GaussianChart::MuTau => Self::new(c[0], c[1]),
            GaussianChart::MuSigma => Self::from_mu_sigma(c[0], c[1]),
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Standard deviation `1/√τ`.
    pub fn sigma(&self) -> f64 {
        1.0 / self.tau.sqrt()
    }

    /// Fisher information in a chosen chart: `diag(τ, 1/(2τ²))` in `(μ,τ)`,
    /// `diag(1/σ², 2/σ²)` in `(μ,σ)`.
    pub fn fisher_info_in(&self, chart: GaussianChart) -> MetricTensor2 {
        match chart {
            GaussianChart::MuTau => MetricTensor2 {
                g11: self.tau,
                g12: 0.0,
                g22: 0.5 / (self.tau * self.tau),
                coords: Coords::MuTau,
            },
            GaussianChart::MuSigma => {
                let inv_var = self.tau; // 1/σ² = τ
                MetricTensor2 {
                    g11: inv_var,
                    g12: 0.0,
                    g22: 2.0 * inv_var,
                    coords: Coords::MuSigma,
                }
            }
        }
    }

    /// Squared line element `τ dμ² + dτ²/(2τ²)` at this point.
    pub fn line_element_sq(&self, dmu: f64, dtau: f64) -> f64 {
        self.fisher_info_in(GaussianChart::MuTau)
            .squared_norm([dmu, dtau])
    }

    /// Squared line element of a displacement expressed in `chart`.
    pub fn line_element_sq_in(&self, chart: GaussianChart, d: [f64; 2]) -> f64 {
        self.fisher_info_in(chart).squared_norm(d)
    }

    /// Closed-form Fisher–Rao distance.
    ///
    /// `(μ, σ) ↦ (μ/√2, σ)` is an isometry onto the half-plane up to a
    /// global factor `√2`, so
    /// `d = √2 · acosh(1 + ((Δμ/√2)² + Δσ²) / (2 σ₁ σ₂))`.
    pub fn fisher_rao_distance(&self, other: &Self) -> f64 {
        let s1 = self.sigma();
        let s2 = other.sigma();
        let du = (other.mu - self.mu) / SQRT_2;
        let ds = s2 - s1;
        let excess = (du * du + ds * ds) / (2.0 * s1 * s2);
        SQRT_2 * acosh1p(excess)
    }

    /// Squared Fisher–Rao distance, the regularization functional.
    pub fn fisher_rao_distance_sq(&self, other: &Self) -> f64 {
        let d = self.fisher_rao_distance(other);
        d * d
    }

    /// Exact Gaussian KL divergence `D(self ‖ other)` in nats.
    pub fn kl_divergence(&self, other: &Self) -> f64 {
        let ratio = other.tau / self.tau;
        let dmu = self.mu - other.mu;
        0.5 * (-ratio.ln() + ratio - 1.0 + other.tau * dmu * dmu)
    }

    /// Samples the geodesic from `self` to `other` at `n_points` points,
    /// uniformly spaced in arc length, endpoints exact.
    pub fn geodesic(&self, other: &Self, n_points: usize) -> Result<BeliefPath<Self>> {
        if n_points < 2 {
            return Err(Error::Domain("geodesic needs at least 2 sample points"));
        }
        if self == other {
            return BeliefPath::new(alloc::vec![*self; n_points]);
        }
        let mut points = Vec::with_capacity(n_points);
        points.push(*self);
        for i in 1..n_points - 1 {
            let t = i as f64 / (n_points - 1) as f64;
            points.push(self.geodesic_point(other, t));
        }
        points.push(*other);
        BeliefPath::new(points)
    }

    /// Point at arc-length fraction `t` along the geodesic to `other`.
    fn geodesic_point(&self, other: &Self, t: f64) -> Self {
        let (u1, s1) = (self.mu / SQRT_2, self.sigma());
        let (u2, s2) = (other.mu / SQRT_2, other.sigma());
        let span = (u2 - u1).abs();
        let scale = s1.max(s2);
        if span <= 1e-14 * (scale + u1.abs().max(u2.abs())) {
            // Vertical geodesic: σ interpolates geometrically.
            let sigma = s1 * (s2 / s1).powf(t);
            return Self::from_mu_sigma(self.mu, sigma)
                .expect("interpolated sigma stays within the endpoint range");
        }
        // Half-plane semicircle centered on the boundary axis.
        let c = (u1 * u1 + s1 * s1 - u2 * u2 - s2 * s2) / (2.0 * (u1 - u2));
        let r = (u1 - c).hypot(s1);
        let theta1 = s1.atan2(u1 - c);
        let theta2 = s2.atan2(u2 - c);
        // Arc length along the circle is ∫ dθ/sin θ = ln tan(θ/2).
        let a1 = (0.5 * theta1).tan().ln();
        let a2 = (0.5 * theta2).tan().ln();
        let a = a1 + t * (a2 - a1);
        let theta = 2.0 * a.exp().atan();
        let u = c + r * theta.cos();
        let sigma = r * theta.sin();
        Self::from_mu_sigma(u * SQRT_2, sigma)
            .expect("semicircle stays in the upper half-plane")
    }

    /// Numerical Gaussian curvature from finite-difference Christoffel
    /// symbols of the `(μ, τ)` metric. Steps scale with the coordinate
    /// magnitude so the stencil conditioning is uniform across the chart.
    pub fn sectional_curvature(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h <= 0.1) {
            return Err(Error::Domain("curvature step must lie in (0, 0.1]"));
        }
        // The nested stencil reaches roughly τ(1 ± 2h).
        if self.tau * (1.0 - 2.5 * h) <= TAU_MIN {
            return Err(Error::StencilOutOfDomain);
        }
        curvature_mu_tau([self.mu, self.tau], h)
    }
}

/// `acosh(1 + e)` computed without forming `1 + e`, stable as `e → 0`.
fn acosh1p(excess: f64) -> f64 {
    (excess + (excess * (excess + 2.0)).sqrt()).ln_1p()
}

/// Distance induced on the fixed-variance submanifold: `|μ₁ − μ₂| / σ`.
///
/// Against the Euclidean distance `|μ₁ − μ₂|` this realizes the ratio
/// `d_Euclid²/d_F² = σ²` exactly.
pub fn fixed_sigma_distance(mu1: f64, mu2: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain("sigma must be positive and finite"));
    }
    if !mu1.is_finite() || !mu2.is_finite() {
        return Err(Error::NonFinite("means must be finite"));
    }
    Ok((mu1 - mu2).abs() / sigma)
}

// ---------------------------------------------------------------------------
// Finite-difference curvature of the (μ, τ) Fisher metric.

fn metric_mu_tau(c: [f64; 2]) -> Result<[[f64; 2]; 2]> {
    let tau = c[1];
    if tau <= 0.0 {
        return Err(Error::StencilOutOfDomain);
    }
    Ok([[tau, 0.0], [0.0, 0.5 / (tau * tau)]])
}

fn fd_step(at: [f64; 2], axis: usize, h: f64) -> f64 {
    if axis == 0 {
        h * at[0].abs().max(1.0)
    } else {
        h * at[1]
    }
}

/// Christoffel symbols `Γ^k_{ij}` by central differences of the metric.
fn christoffels_mu_tau(at: [f64; 2], h: f64) -> Result<[[[f64; 2]; 2]; 2]> {
    // dg[l][i][j] = ∂_l g_ij
    let mut dg = [[[0.0; 2]; 2]; 2];
    for l in 0..2 {
        let step = fd_step(at, l, h);
        let mut plus = at;
        plus[l] += step;
        let mut minus = at;
        minus[l] -= step;
        let gp = metric_mu_tau(plus)?;
        let gm = metric_mu_tau(minus)?;
        for i in 0..2 {
            for j in 0..2 {
                dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * step);
            }
        }
    }
    let g = metric_mu_tau(at)?;
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let ginv = [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut sum = 0.0;
                for l in 0..2 {
                    sum += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[k][i][j] = 0.5 * sum;
            }
        }
    }
    Ok(gamma)
}

fn curvature_mu_tau(at: [f64; 2], h: f64) -> Result<f64> {
    // dgamma[m][k][i][j] = ∂_m Γ^k_{ij}
    let mut dgamma = [[[[0.0; 2]; 2]; 2]; 2];
    for m in 0..2 {
        let step = fd_step(at, m, h);
        let mut plus = at;
        plus[m] += step;
        let mut minus = at;
        minus[m] -= step;
        let gp = christoffels_mu_tau(plus, h)?;
        let gm = christoffels_mu_tau(minus, h)?;
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    dgamma[m][k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (2.0 * step);
                }
            }
        }
    }
    let gamma = christoffels_mu_tau(at, h)?;
    // R^l_{k i j} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik},
    // evaluated at k=1, i=0, j=1 for the sectional curvature of the plane.
    let mut riemann_up = [0.0; 2];
    for (l, slot) in riemann_up.iter_mut().enumerate() {
        let mut v = dgamma[0][l][1][1] - dgamma[1][l][0][1];
        for (m, gamma_m) in gamma.iter().enumerate() {
            v += gamma[l][0][m] * gamma_m[1][1] - gamma[l][1][m] * gamma_m[0][1];
        }
        *slot = v;
    }
    let g = metric_mu_tau(at)?;
    let r_0101 = g[0][0] * riemann_up[0] + g[0][1] * riemann_up[1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    Ok(r_0101 / det)
}

// ---------------------------------------------------------------------------

impl Belief for GaussianBelief {
    type Chart = GaussianChart;

    const MANIFOLD_NAME: &'static str = "gaussian";

    fn coord_names() -> [&'static str; 2] {
        ["mu", "tau"]
    }

    fn coords(&self) -> [f64; 2] {
        [self.mu, self.tau]
    }

    fn coords_in(&self, chart: GaussianChart) -> [f64; 2] {
        match chart {
            GaussianChart::MuTau => [self.mu, self.tau],
            GaussianChart::MuSigma => [self.mu, self.sigma()],
        }
    }

    fn from_coords(c: [f64; 2]) -> Result<Self> {
        Self::new(c[0], c[1])
    }

    fn project_coords(c: [f64; 2]) -> Result<(Self, bool)> {
        if !c[0].is_finite() || !c[1].is_finite() {
            return Err(Error::NonFinite("coordinates must be finite"));
        }
        let tau = c[1].clamp(TAU_MIN, TAU_MAX);
        let clamped = tau != c[1];
        Ok((Self { mu: c[0], tau }, clamped))
    }

    fn chart_delta(chart: GaussianChart, from: &Self, to: &Self) -> [f64; 2] {
        let a = from.coords_in(chart);
        let b = to.coords_in(chart);
        [b[0] - a[0], b[1] - a[1]]
    }

    fn fisher_info(&self) -> MetricTensor2 {
        self.fisher_info_in(GaussianChart::MuTau)
    }

    fn covector_to_native(at: &Self, chart: GaussianChart, covector: [f64; 2]) -> [f64; 2] {
        match chart {
            GaussianChart::MuTau => covector,
            GaussianChart::MuSigma => {
                // dσ/dτ = -σ³/2
                let sigma = at.sigma();
                [covector[0], covector[1] * (-0.5 * sigma * sigma * sigma)]
            }
        }
    }

    fn fisher_rao_distance(&self, other: &Self, _cfg: &ToleranceConfig) -> Result<f64> {
        Ok(GaussianBelief::fisher_rao_distance(self, other))
    }

    fn distance_sq_gradient(&self, reference: &Self, _cfg: &ToleranceConfig) -> Result<[f64; 2]> {
        // d² = 2 acosh²(1 + e) with e = ((Δμ/√2)² + Δσ²)/(2 σ σ*), so
        // ∂d²/∂x = 4 · acosh(1+e)/√(e(e+2)) · ∂e/∂x.
        let s1 = self.sigma();
        let s2 = reference.sigma();
        let du = (self.mu - reference.mu) / SQRT_2;
        let ds = s1 - s2;
        let e = (du * du + ds * ds) / (2.0 * s1 * s2);
        let phi = if e < 1e-12 {
            1.0 - e / 3.0
        } else {
            acosh1p(e) / (e * (e + 2.0)).sqrt()
        };
        let de_dmu = du / (SQRT_2 * s1 * s2);
        let de_dsigma = ds / (s1 * s2) - e / s1;
        let grad_sigma = 4.0 * phi * de_dsigma;
        // Native chart is (μ, τ): dσ/dτ = -σ³/2.
        Ok([
            4.0 * phi * de_dmu,
            grad_sigma * (-0.5 * s1 * s1 * s1),
        ])
    }

    fn kl_divergence(&self, other: &Self) -> f64 {
        GaussianBelief::kl_divergence(self, other)
    }

    fn nll(&self, x: f64) -> f64 {
        let d = x - self.mu;
        0.5 * (LN_TAU_2PI - self.tau.ln() + self.tau * d * d)
    }

    fn batch_nll_grad(&self, xs: &[f64]) -> [f64; 2] {
        let n = xs.len() as f64;
        let mut d_sum = 0.0;
        let mut d2_sum = 0.0;
        for &x in xs {
            let d = x - self.mu;
            d_sum += d;
            d2_sum += d * d;
        }
        [-self.tau * d_sum / n, 0.5 * (d2_sum / n - 1.0 / self.tau)]
    }

    fn draw<R: RngCore>(&self, rng: &mut R) -> f64 {
        self.mu + self.sigma() * standard_normal(rng)
    }
}
