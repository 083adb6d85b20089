//! Geometry of constant-angle surfaces in the homogeneous 3-spaces
//! `M(kappa, tau)`: Euclidean space, `S^2 x R`, `H^2 x R`, the Heisenberg
//! group `Nil3`, the Berger spheres and the universal cover of `SL(2, R)`.
//!
//! The crate is split along the same lines as the mathematics:
//!
//! * [`ambient`]: metric, orthonormal frame, Levi-Civita connection and
//!   curvature of the ambient space, together with finite-difference oracles
//!   that recompute the same objects from the metric alone.
//! * [`surface`]: extrinsic and intrinsic invariants of an immersed patch
//!   (normal, angle function, shape operator, Gaussian curvature) and the
//!   residuals of the Gauss, Codazzi and structure equations.
//! * [`constant_angle`]: the explicit classification in `Nil3`, the closed
//!   forms behind it, and a reconstruction by integrating the tangent
//!   distribution.
//! * [`bcv`]: the general `M(kappa, tau)` machinery, where only a partial
//!   closed form exists and the rest is integrated numerically.
//!
//! The crate is `no_std` and only needs `alloc` for sampled grids.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` also rejects NaN; index loops mirror tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod ambient;
pub mod bcv;
pub mod constant_angle;
pub mod diff;
mod error;
pub mod grid;
pub mod linalg;
pub mod ode;
pub mod profile;
pub mod surface;

pub use ambient::{hopf_project, AmbientParams, AmbientPoint, FrameIndex, MetricMatrix};
pub use error::{Error, Result};
pub use grid::{GridSpec, GridSurface};
pub use linalg::{CoordVector, TangentVector};
pub use profile::{Polynomial, Profile};
pub use surface::{Immersion, ParamDomain};
