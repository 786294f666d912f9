//! Numerical verification of quaternionic (q,q')-deformed Fueter calculus:
//! quaternion algebra over structural sets, (q,q')-derivatives, weighted
//! slice transforms, 4-D box quadrature with the Cauchy kernel, and a
//! harness checking the Stokes and Borel-Pompeiu type identities.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod field;
pub mod harness;
pub mod kernel;
pub mod qq;
pub mod quad;
pub mod quat;

pub use error::{Error, Result};
