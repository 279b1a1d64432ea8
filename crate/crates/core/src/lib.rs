//! Fisher–Rao geometry of Gaussian and circular belief states, with
//! thermodynamic accounting of the information a learner erases.
//!
//! The crate is built around two statistical manifolds:
//!
//! - [`gaussian`]: univariate Gaussians `N(mu, 1/tau)` under the Fisher
//!   information metric, which is isometric to a scaled hyperbolic
//!   half-plane and therefore admits closed-form distances and geodesics;
//! - [`vonmises`]: von Mises distributions on the circle, where no closed
//!   form is known and geodesic distance is computed by discrete path
//!   energy minimization.
//!
//! On top of the geometry sit [`thermo`] (Landauer bound, efficiency and
//! the crystallization index), [`regularization`] (Euclidean vs Fisher–Rao
//! penalties and natural-gradient steps) and [`trajectory`] (path-length
//! bookkeeping and seeded toy learners).
//!
//! The crate is `no_std` (it allocates, but performs no I/O); file formats
//! and the command-line interface live in the companion `thermoreg` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod gaussian;
pub mod manifold;
pub mod numerics;
pub mod regularization;
pub mod sampling;
pub mod thermo;
pub mod trajectory;
pub mod vonmises;

pub use error::{Error, Result};
pub use gaussian::GaussianBelief;
pub use manifold::{Belief, Coords, MetricTensor2};
pub use numerics::ToleranceConfig;
pub use vonmises::VonMisesBelief;
