//! Shared vocabulary of the two belief manifolds: the 2×2 Fisher metric
//! tensor, coordinate-chart tags and the [`Belief`] trait that the
//! trajectory and regularization machinery is generic over.

use core::fmt::Debug;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::numerics::ToleranceConfig;

/// Coordinate systems a metric tensor can be expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coords {
    /// Gaussian mean and precision.
    MuTau,
    /// Gaussian mean/standard deviation.
    MuSigma,
    /// von Mises mean direction/concentration.
    DirectionConcentration,
}

/// A symmetric 2×2 metric tensor at a manifold point.
///
/// Invariant: positive-definite, i.e. `g11 > 0` and `g11*g22 - g12² > 0`.
/// The fields are public so diagnostics can inspect them; code that steps
/// through the metric re-checks definiteness and reports
/// [`Error::SingularMetric`] when the invariant is broken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor2 {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub coords: Coords,
}

impl MetricTensor2 {
    pub fn new(g11: f64, g12: f64, g22: f64, coords: Coords) -> Result<Self> {
        let tensor = Self {
            g11,
            g12,
            g22,
            coords,
        };
        if !tensor.is_positive_definite() {
            return Err(tensor.singular_error());
        }
        Ok(tensor)
    }

    pub fn determinant(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g11 > 0.0 && self.determinant() > 0.0 && self.g11.is_finite() && self.g22.is_finite()
    }

    /// Quadratic form `v^T g v` of a tangent displacement.
    pub fn squared_norm(&self, v: [f64; 2]) -> f64 {
        self.g11 * v[0] * v[0] + 2.0 * self.g12 * v[0] * v[1] + self.g22 * v[1] * v[1]
    }

    /// Solves `g x = rhs`; errors if the tensor is not positive-definite.
    pub fn solve(&self, rhs: [f64; 2]) -> Result<[f64; 2]> {
        if !self.is_positive_definite() {
            return Err(self.singular_error());
        }
        let det = self.determinant();
        Ok([
            (self.g22 * rhs[0] - self.g12 * rhs[1]) / det,
            (self.g11 * rhs[1] - self.g12 * rhs[0]) / det,
        ])
    }

    fn singular_error(&self) -> Error {
        Error::SingularMetric {
            g11: self.g11,
            g12: self.g12,
            g22: self.g22,
        }
    }
}

/// A point on one of the belief manifolds.
///
/// Implementors are small `Copy` value types; every method is a pure
/// function, so beliefs can be shared freely across threads. The associated
/// `Chart` type enumerates the coordinate systems the manifold supports —
/// penalties that are coordinate-dependent must name one explicitly.
pub trait Belief: Copy + PartialEq + Debug {
    /// Chart tag; `Default` is the chart the learner steps in.
    type Chart: Copy + Eq + Debug + Default;

    const MANIFOLD_NAME: &'static str;

    /// Column names of the native coordinates, for trajectory dumps.
    fn coord_names() -> [&'static str; 2];

    /// Native-chart coordinates.
    fn coords(&self) -> [f64; 2];

    /// Coordinates in an arbitrary supported chart.
    fn coords_in(&self, chart: Self::Chart) -> [f64; 2];

    /// Strict construction from native coordinates; rejects values outside
    /// the admissible chart.
    fn from_coords(c: [f64; 2]) -> Result<Self>;

    /// Construction that projects back into the chart (clamping the
    /// precision/concentration coordinate, wrapping angles). Returns the
    /// point and whether a clamp occurred. Non-finite input is an error.
    fn project_coords(c: [f64; 2]) -> Result<(Self, bool)>;

    /// Coordinate displacement `to - from` in a chart, wrapping angular
    /// coordinates through the shorter arc.
    fn chart_delta(chart: Self::Chart, from: &Self, to: &Self) -> [f64; 2];

    /// Fisher information in the native chart.
    fn fisher_info(&self) -> MetricTensor2;

    /// Transforms a covector expressed in `chart` into the native chart at
    /// the given point (chain rule on the chart map).
    fn covector_to_native(at: &Self, chart: Self::Chart, covector: [f64; 2]) -> [f64; 2];

    /// Geodesic distance under the Fisher metric.
    fn fisher_rao_distance(&self, other: &Self, cfg: &ToleranceConfig) -> Result<f64>;

    /// Gradient of `d_F²(self, reference)` with respect to the native
    /// coordinates of `self`.
    fn distance_sq_gradient(&self, reference: &Self, cfg: &ToleranceConfig) -> Result<[f64; 2]>;

    /// KL divergence `D(self ‖ other)` in nats.
    fn kl_divergence(&self, other: &Self) -> f64;

    /// Negative log-likelihood of one observation.
    fn nll(&self, x: f64) -> f64;

    /// Gradient of the mean NLL of a batch, in native coordinates.
    fn batch_nll_grad(&self, xs: &[f64]) -> [f64; 2];

    /// Draws one observation from the distribution this belief denotes.
    fn draw<R: RngCore>(&self, rng: &mut R) -> f64;
}
