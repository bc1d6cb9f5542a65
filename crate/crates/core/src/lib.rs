//! Numerical library for smooth handle attachment: flat cut-off kernels,
//! the fat handle `D^{n,m}` and its region calculus, the handle
//! (dif)homeomorphisms with numerical inverses, finite fat CW complexes
//! with partitions of unity, and the collar-smoothing construction that
//! replaces a handle corner with a smooth boundary.
//!
//! Everything is plain `f64` numerics with explicit tolerances; derivative
//! checks run on forward-mode dual numbers, integrals on adaptive
//! Gauss-Legendre quadrature, and audits on seeded sampling.

pub mod cw;
pub mod dual;
pub mod geometry;
pub mod kernels;
pub mod maps;
pub mod quad;
pub mod sampling;
pub mod smoothing;

pub use kernels::{ell, s_func, KernelContext, SmoothingParams};
