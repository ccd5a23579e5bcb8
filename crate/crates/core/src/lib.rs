//! Least-squares estimation of convex polytopes and convex bodies observed
//! through the regression `Y = I(X ∈ G) + ξ` with uniform design on the unit
//! cube, together with the geometry, constants and Monte Carlo machinery
//! needed to check the estimators' behaviour numerically.

pub mod adaptive;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod harness;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
