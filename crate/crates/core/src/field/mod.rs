//! Test-function families with exact partial derivatives, the classical
//! ψ-Fueter operators, exponential weights and the slice transforms built on
//! top of them.

mod catalog;
mod cheb;
mod pro14;
mod transforms;
mod weights;

pub use catalog::{
    builtin_catalog, CatalogEntry, CauchyKernelField, ComponentPolynomial, Constant, Exponential, FnField,
    FueterVariable, Identity, Monomial, NormSquared, QuatPower, Term,
    component_monomials, positive_polynomial,
};
pub use cheb::Chebyshev;
pub use pro14::{constant_instance, Pro14Instance, Pro14Side, ScalarWeight};
pub use transforms::{cal_i_transform, cal_i_transform_partial, i_transform, i_transform_partial, ComponentWeights, SliceWeights};
pub use weights::{
    build_weight_pro2, build_weight_pro3, ode_residual_component, ode_residual_field, WeightExponent, WeightKind,
    REALNESS_TOLERANCE, WEIGHT_ABS_TOL,
};

use crate::error::{Error, Result};
use crate::quat::{Coords, Quaternion, StructuralSet};

/// An H-valued function of the four real coordinates of a point in some
/// structural set, with exact first partials.
pub trait QuaternionField: Send + Sync {
    /// Short human-readable name, used in reports.
    fn label(&self) -> String;

    fn eval(&self, p: &Coords) -> Quaternion;

    /// Exact `∂f/∂x_axis`, or `None` when the field has no closed-form partial.
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion>;

    /// `Some(n)` when, along `axis`, the whole field is `c(other coords) * x_axis^n`.
    fn axis_power(&self, _axis: usize) -> Option<u32> {
        None
    }

    /// `Some(n)` when component `j` (with respect to `psi`) is `c * x_axis^n`
    /// along `axis`.
    fn component_axis_power(&self, _j: usize, _axis: usize, _psi: &StructuralSet) -> Option<u32> {
        None
    }

    /// Total polynomial degree, if the field is a polynomial.
    fn degree_bound(&self) -> Option<u32> {
        None
    }
}

impl<T: QuaternionField + ?Sized> QuaternionField for &T {
    fn label(&self) -> String {
        (**self).label()
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        (**self).eval(p)
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        (**self).partial(axis, p)
    }
    fn axis_power(&self, axis: usize) -> Option<u32> {
        (**self).axis_power(axis)
    }
    fn component_axis_power(&self, j: usize, axis: usize, psi: &StructuralSet) -> Option<u32> {
        (**self).component_axis_power(j, axis, psi)
    }
    fn degree_bound(&self) -> Option<u32> {
        (**self).degree_bound()
    }
}

impl<T: QuaternionField + ?Sized> QuaternionField for Box<T> {
    fn label(&self) -> String {
        (**self).label()
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        (**self).eval(p)
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        (**self).partial(axis, p)
    }
    fn axis_power(&self, axis: usize) -> Option<u32> {
        (**self).axis_power(axis)
    }
    fn component_axis_power(&self, j: usize, axis: usize, psi: &StructuralSet) -> Option<u32> {
        (**self).component_axis_power(j, axis, psi)
    }
    fn degree_bound(&self) -> Option<u32> {
        (**self).degree_bound()
    }
}

/// Real component `f_j = <f, psi_j>`.
#[inline]
pub fn component<F: QuaternionField + ?Sized>(f: &F, j: usize, psi: &StructuralSet, p: &Coords) -> f64 {
    f.eval(p).dot(&psi.get(j))
}

/// Exact partial of the real component `f_j`.
pub fn component_partial<F: QuaternionField + ?Sized>(
    f: &F,
    j: usize,
    axis: usize,
    psi: &StructuralSet,
    p: &Coords,
) -> Option<f64> {
    f.partial(axis, p).map(|d| d.dot(&psi.get(j)))
}

/// All four exact partials, or the first missing axis.
pub fn gradient<F: QuaternionField + ?Sized>(f: &F, p: &Coords) -> Result<[Quaternion; 4]> {
    let mut out = [Quaternion::ZERO; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = f.partial(k, p).ok_or(Error::MissingExactPartial { axis: k })?;
    }
    Ok(out)
}

/// Left ψ-Fueter operator `sum_k psi_k ∂_k f`.
pub fn fueter_left<F: QuaternionField + ?Sized>(f: &F, psi: &StructuralSet, p: &Coords) -> Result<Quaternion> {
    let g = gradient(f, p)?;
    Ok((0..4).map(|k| psi.get(k) * g[k]).sum())
}

/// Right ψ-Fueter operator `sum_k ∂_k f psi_k`.
pub fn fueter_right<F: QuaternionField + ?Sized>(f: &F, psi: &StructuralSet, p: &Coords) -> Result<Quaternion> {
    let g = gradient(f, p)?;
    Ok((0..4).map(|k| g[k] * psi.get(k)).sum())
}

/// Largest relative mismatch between the exact partials and a central
/// difference of `eval` with step `h`.
pub fn finite_difference_mismatch<F: QuaternionField + ?Sized>(f: &F, p: &Coords, h: f64) -> Result<f64> {
    let g = gradient(f, p)?;
    let mut worst = 0.0_f64;
    for k in 0..4 {
        let mut a = *p;
        let mut b = *p;
        a[k] += h;
        b[k] -= h;
        let fd = (f.eval(&a) - f.eval(&b)) / (2.0 * h);
        let scale = g[k].norm().max(f.eval(p).norm()).max(1.0);
        worst = worst.max((fd - g[k]).norm() / scale);
    }
    Ok(worst)
}
