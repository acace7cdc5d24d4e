//! Numerical laboratory for the standard map family
//! `f_k(x, y) = (2x - y + k sin(2πx), x)` on the two-torus.
//!
//! Modules, bottom up:
//!
//! * [`map`]: exact evaluation of `f_k`, `f_k^{-1}`, `Df_k`, the involution.
//! * [`cocycle`]: orbit windows, Lyapunov exponents, Oseledets frames,
//!   Pliss times, `Z`/`X` membership.
//! * [`cones`]: cones, critical regions, cone-lemma audits.
//! * [`manifolds`]: local manifold seeds, curve growth, transverse
//!   intersections and the homoclinic-relation test.
//! * [`periodic`]: Newton census of `Fix(f^n)`, classification, databases.
//! * [`statistics`]: entropy fits, empirical measures, density, dimension.

pub mod cocycle;
pub mod cones;
pub mod error;
pub mod manifolds;
pub mod map;
pub mod periodic;
pub mod sampling;
pub mod statistics;

pub use error::{Error, Result};
pub use map::{
    derive_params, involution, torus_dist, Jacobian2, Params, StandardMap, TangentVec,
    TimeDirection, TorusPoint,
};
