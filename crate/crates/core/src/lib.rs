//! Numerics for prox-regular subsets of model Riemannian manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`manifold`]: Euclidean space, the round 2-sphere in its spherical chart and the
//!   hyperbolic upper half-plane, with exp/log, distance, transport and Christoffel symbols.
//! * [`expr`]: a small expression language for boundary submersions, differentiated with
//!   nested dual numbers.
//! * [`proxset`]: sets `{psi <= 0}`, their proximal normal and Bouligand tangent cones, and
//!   sampling verifiers for the inequalities that characterise them.
//! * [`projection`]: the metric projection, projection onto cones, directional derivatives of
//!   the projection and Lipschitz / variational-principle diagnostics.
//! * [`curves`]: discrete admissible curves, covariant acceleration, first variation and a
//!   projected curve-shortening solver.

pub mod curves;
pub mod error;
pub mod expr;
pub mod manifold;
pub mod ode;
pub mod projection;
pub mod proxset;
pub mod sampling;

pub use error::{Error, Result};
pub use manifold::{Coords, Manifold, Point, TangentVector};
