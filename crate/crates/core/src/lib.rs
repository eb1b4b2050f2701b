//! Curvature functionals of smooth convex bodies.
//!
//! Bodies are described by their support function `h_K` together with the
//! gradient and Hessian of its 1-homogeneous extension. Everything is
//! evaluated on the sphere through the reverse Gauss map: a direction `u`
//! is mapped to the boundary point `∇h_K(u)` and the principal radii of
//! curvature are the eigenvalues of `∇²h_K(u)` restricted to `u^⊥`.
//!
//! On top of that the crate provides
//!
//! - [`functionals`]: weighted `L_p` affine surface areas `ω^p_{m,k,ī}` and
//!   the weighted volumes of `K` and `K°`,
//! - [`divergence`]: f-divergences of the weighted cone measures (KL,
//!   Hellinger, Rényi) and the Jensen bound,
//! - [`analysis`]: numeric checks of the Hölder-type isoperimetric
//!   inequalities, monotonicity in `p`, Petty's ellipsoid characterization
//!   and the entropy-power limits,
//! - [`randpoly`]: random polytopes with vertices on `∂K` and their expected
//!   volume deficit,
//! - [`cli`]: the `curvfun` command line front end.

// `!(x > y)` is used so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod divergence;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod quadrature;
pub mod randpoly;
pub mod tolerances;

pub use error::{Error, Result};
pub use functionals::{Exponent, WeightIndex};
pub use geometry::{CurvaturePoint, SampledBody, SupportBody};
pub use quadrature::{RuleSpec, SphereRule};
