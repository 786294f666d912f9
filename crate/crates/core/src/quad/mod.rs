//! Box domains, the oriented face form, tensor Gauss quadrature and graded
//! handling of the kernel singularity.

mod domain;
mod engine;
mod gauss;
mod integrand;
pub mod kronrod;
mod sigma;

pub use domain::{Box4, Face, QuadSpec};
pub use engine::{
    boundary_integral, boundary_integral_pairs, boundary_integral_with, boundary_nodes, integrate_cell, integrate_cells, pairwise_sum, shell_order, shell_radii,
    singular_volume_integral, volume_integral, volume_integral_near, volume_nodes, Cell, Region, CORE_SHELLS, NEAR_ETA,
};
pub use gauss::GaussRule;
pub use integrand::{Factor, Integrand, PointFn, Product, SliceFn};
pub use sigma::{calibrate_sigma, SigmaForm, CALIBRATION_SEPARATION, CALIBRATION_TOLERANCE};
