//! The two competing regularizers and the gradient machinery to train
//! against them.
//!
//! The Euclidean penalty is squared coordinate distance and therefore
//! depends on the chart it is written in — constructing one forces the
//! caller to name that chart. The Fisher–Rao penalty is squared geodesic
//! distance to the reference and is chart-free by construction; the
//! invariance suite asserts both facts numerically.

use crate::error::{Error, Result};
use crate::gaussian::{GaussianBelief, GaussianChart};
use crate::manifold::Belief;
use crate::numerics::ToleranceConfig;

/// Which penalty shape to apply. The Euclidean variant carries the chart
/// its coordinate distance is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind<C> {
    Euclidean(C),
    FisherRao,
}

/// A weighted penalty anchored at a reference belief `q*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec<B: Belief> {
    pub kind: PenaltyKind<B::Chart>,
    pub reference: B,
    pub weight: f64,
}

impl<B: Belief> PenaltySpec<B> {
    pub fn new(kind: PenaltyKind<B::Chart>, reference: B, weight: f64) -> Result<Self> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::Domain("penalty weight must be finite and >= 0"));
        }
        Ok(Self {
            kind,
            reference,
            weight,
        })
    }

    pub fn euclidean(chart: B::Chart, reference: B, weight: f64) -> Result<Self> {
        Self::new(PenaltyKind::Euclidean(chart), reference, weight)
    }

    pub fn fisher_rao(reference: B, weight: f64) -> Result<Self> {
        Self::new(PenaltyKind::FisherRao, reference, weight)
    }
}

/// Penalty value at `q`: `weight · ‖coords(q) − coords(q*)‖²` for the
/// Euclidean kind (in its declared chart), `weight · d_F²(q, q*)` for
/// Fisher–Rao.
pub fn penalty_value<B: Belief>(
    spec: &PenaltySpec<B>,
    q: &B,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if spec.weight == 0.0 {
        return Ok(0.0);
    }
    match spec.kind {
        PenaltyKind::Euclidean(chart) => {
            let d = B::chart_delta(chart, &spec.reference, q);
            Ok(spec.weight * (d[0] * d[0] + d[1] * d[1]))
        }
        PenaltyKind::FisherRao => {
            let d = q.fisher_rao_distance(&spec.reference, cfg)?;
            Ok(spec.weight * d * d)
        }
    }
}

/// Gradient of [`penalty_value`].
///
/// Euclidean: returned in the declared chart, `2·weight·Δcoords`.
/// Fisher–Rao: returned in the manifold's native chart — analytic on the
/// Gaussian manifold, central finite differences on manifolds whose
/// distance is itself the result of an optimization.
pub fn penalty_gradient<B: Belief>(
    spec: &PenaltySpec<B>,
    q: &B,
    cfg: &ToleranceConfig,
) -> Result<[f64; 2]> {
    if spec.weight == 0.0 {
        return Ok([0.0, 0.0]);
    }
    match spec.kind {
        PenaltyKind::Euclidean(chart) => {
            let d = B::chart_delta(chart, &spec.reference, q);
            Ok([2.0 * spec.weight * d[0], 2.0 * spec.weight * d[1]])
        }
        PenaltyKind::FisherRao => {
            let g = q.distance_sq_gradient(&spec.reference, cfg)?;
            Ok([spec.weight * g[0], spec.weight * g[1]])
        }
    }
}

/// Gradient of the penalty expressed as a covector in the native chart,
/// chain-ruled from the declared chart when the two differ. This is what
/// a learner stepping in native coordinates consumes.
pub fn penalty_gradient_native<B: Belief>(
    spec: &PenaltySpec<B>,
    q: &B,
    cfg: &ToleranceConfig,
) -> Result<[f64; 2]> {
    let grad = penalty_gradient(spec, q, cfg)?;
    match spec.kind {
        PenaltyKind::Euclidean(chart) => Ok(B::covector_to_native(q, chart, grad)),
        PenaltyKind::FisherRao => Ok(grad),
    }
}

/// One natural-gradient step: `coords(q) − lr · I(q)⁻¹ · grad`, projected
/// back into the admissible chart.
pub fn natural_gradient_step<B: Belief>(q: &B, euclidean_grad: [f64; 2], lr: f64) -> Result<B> {
    Ok(natural_gradient_step_detailed(q, euclidean_grad, lr)?.0)
}

/// As [`natural_gradient_step`], additionally reporting whether the
/// precision/concentration coordinate had to be clamped to the chart
/// boundary.
pub fn natural_gradient_step_detailed<B: Belief>(
    q: &B,
    euclidean_grad: [f64; 2],
    lr: f64,
) -> Result<(B, bool)> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::Domain("learning rate must be positive and finite"));
    }
    if !euclidean_grad[0].is_finite() || !euclidean_grad[1].is_finite() {
        return Err(Error::NonFinite("gradient must be finite"));
    }
    let natural = q.fisher_info().solve(euclidean_grad)?;
    let c = q.coords();
    B::project_coords([c[0] - lr * natural[0], c[1] - lr * natural[1]])
}

/// Natural-gradient step on the Gaussian manifold computed entirely in a
/// chosen chart: metric, step and projection all in `chart` coordinates.
/// Used to verify first-order reparametrization covariance of the update.
pub fn natural_gradient_step_in_chart(
    q: &GaussianBelief,
    grad_in_chart: [f64; 2],
    lr: f64,
    chart: GaussianChart,
) -> Result<GaussianBelief> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::Domain("learning rate must be positive and finite"));
    }
    let natural = q.fisher_info_in(chart).solve(grad_in_chart)?;
    let c = q.coords_in(chart);
    let stepped = [c[0] - lr * natural[0], c[1] - lr * natural[1]];
    match chart {
        GaussianChart::MuTau => Ok(GaussianBelief::project_coords(stepped)?.0),
        GaussianChart::MuSigma => {
            let sigma = stepped[1].clamp(1e-6, 1e6);
            GaussianBelief::from_mu_sigma(stepped[0], sigma)
        }
    }
}

/// `d_Euclid² / d_F²` on the fixed-variance submanifold; equals `σ²`.
pub fn suboptimality_ratio(mu1: f64, mu2: f64, sigma: f64) -> Result<f64> {
    if mu1 == mu2 {
        return Err(Error::ZeroDistance(
            "suboptimality ratio needs separated means",
        ));
    }
    let d_euclid = mu1 - mu2;
    let d_fr = crate::gaussian::fixed_sigma_distance(mu1, mu2, sigma)?;
    Ok((d_euclid * d_euclid) / (d_fr * d_fr))
}
