//! Integrands as sums of ordered products of factors. Factors that depend on
//! one coordinate at a time are tabulated per axis and cell, which keeps the
//! slice-transform integrands cheap.

use std::sync::Arc;

use crate::field::QuaternionField;
use crate::quat::{Coords, Quaternion, StructuralSet};

pub type PointFn = dyn Fn(&Coords) -> Quaternion + Send + Sync;
/// `h(axis, t)`; a slice factor evaluates to `sum_k h(k, y_k)`.
pub type SliceFn = dyn Fn(usize, f64) -> Quaternion + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    Const(Quaternion),
    /// Index into [`Integrand::points`].
    Point(usize),
    /// Index into [`Integrand::slices`].
    Slices(usize),
    /// `K_psi(y - pole)`, index into [`Integrand::kernels`].
    Kernel(usize),
}

/// A product of factors in the given order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Product {
    pub factors: Vec<Factor>,
}

/// Sum of products, with shared factor tables.
#[derive(Clone, Default)]
pub struct Integrand {
    pub terms: Vec<Product>,
    pub points: Vec<Arc<PointFn>>,
    pub slices: Vec<Arc<SliceFn>>,
    pub kernels: Vec<(Coords, StructuralSet)>,
}

impl std::fmt::Debug for Integrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Integrand")
            .field("terms", &self.terms.len())
            .field("points", &self.points.len())
            .field("slices", &self.slices.len())
            .field("kernels", &self.kernels)
            .finish()
    }
}

impl Integrand {
    pub fn zero() -> Self {
        Integrand::default()
    }

    pub fn constant(c: Quaternion) -> Self {
        Integrand { terms: vec![Product { factors: vec![Factor::Const(c)] }], ..Default::default() }
    }

    pub fn point(f: impl Fn(&Coords) -> Quaternion + Send + Sync + 'static) -> Self {
        Integrand::point_arc(Arc::new(f))
    }

    pub fn point_arc(f: Arc<PointFn>) -> Self {
        Integrand { terms: vec![Product { factors: vec![Factor::Point(0)] }], points: vec![f], ..Default::default() }
    }

    /// The field value `f(y)`.
    pub fn field(f: Arc<dyn QuaternionField>) -> Self {
        Integrand::point(move |p| f.eval(p))
    }

    pub fn slices(h: impl Fn(usize, f64) -> Quaternion + Send + Sync + 'static) -> Self {
        Integrand::slices_arc(Arc::new(h))
    }

    pub fn slices_arc(h: Arc<SliceFn>) -> Self {
        Integrand { terms: vec![Product { factors: vec![Factor::Slices(0)] }], slices: vec![h], ..Default::default() }
    }

    pub fn kernel(pole: Coords, psi: StructuralSet) -> Self {
        Integrand {
            terms: vec![Product { factors: vec![Factor::Kernel(0)] }],
            kernels: vec![(pole, psi)],
            ..Default::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-index `other`'s factors into `self`'s tables (pointer-equal
    /// closures and equal kernels are shared) and return the remap.
    fn absorb_tables(&mut self, other: &Integrand) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let pmap = other
            .points
            .iter()
            .map(|p| match self.points.iter().position(|q| Arc::ptr_eq(p, q)) {
                Some(i) => i,
                None => {
                    self.points.push(p.clone());
                    self.points.len() - 1
                }
            })
            .collect();
        let smap = other
            .slices
            .iter()
            .map(|p| match self.slices.iter().position(|q| Arc::ptr_eq(p, q)) {
                Some(i) => i,
                None => {
                    self.slices.push(p.clone());
                    self.slices.len() - 1
                }
            })
            .collect();
        let kmap = other
            .kernels
            .iter()
            .map(|k| match self.kernels.iter().position(|q| q == k) {
                Some(i) => i,
                None => {
                    self.kernels.push(*k);
                    self.kernels.len() - 1
                }
            })
            .collect();
        (pmap, smap, kmap)
    }

    fn remap(p: &Product, maps: &(Vec<usize>, Vec<usize>, Vec<usize>)) -> Product {
        Product {
            factors: p
                .factors
                .iter()
                .map(|f| match *f {
                    Factor::Const(c) => Factor::Const(c),
                    Factor::Point(i) => Factor::Point(maps.0[i]),
                    Factor::Slices(i) => Factor::Slices(maps.1[i]),
                    Factor::Kernel(i) => Factor::Kernel(maps.2[i]),
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Integrand) -> Integrand {
        let mut out = self.clone();
        let maps = out.absorb_tables(other);
        out.terms.extend(other.terms.iter().map(|t| Integrand::remap(t, &maps)));
        out
    }

    pub fn sub(&self, other: &Integrand) -> Integrand {
        self.add(&other.scale(-1.0))
    }

    /// Distributive product `self * other` (order kept).
    pub fn mul(&self, other: &Integrand) -> Integrand {
        let mut out = Integrand { terms: Vec::new(), ..self.clone() };
        let maps = out.absorb_tables(other);
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(Integrand::remap(b, &maps).factors);
                out.terms.push(simplify(factors));
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Integrand {
        self.left_mul(Quaternion::real(s))
    }

    pub fn left_mul(&self, c: Quaternion) -> Integrand {
        Integrand::constant(c).mul(self)
    }

    pub fn right_mul(&self, c: Quaternion) -> Integrand {
        self.mul(&Integrand::constant(c))
    }

    /// Direct evaluation at one point (no tabulation).
    pub fn eval(&self, y: &Coords) -> Quaternion {
        let points: Vec<Quaternion> = self.points.iter().map(|f| f(y)).collect();
        let slices: Vec<Quaternion> = self.slices.iter().map(|h| (0..4).map(|k| h(k, y[k])).sum()).collect();
        let kernels: Vec<Quaternion> =
            self.kernels.iter().map(|(pole, psi)| crate::kernel::kernel_at(crate::kernel::displacement(y, pole, psi))).collect();
        self.terms
            .iter()
            .map(|t| {
                t.factors.iter().fold(Quaternion::ONE, |acc, f| {
                    acc * match *f {
                        Factor::Const(c) => c,
                        Factor::Point(i) => points[i],
                        Factor::Slices(i) => slices[i],
                        Factor::Kernel(i) => kernels[i],
                    }
                })
            })
            .sum()
    }
}

/// Merge adjacent real constants and drop the unit.
fn simplify(factors: Vec<Factor>) -> Product {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors {
        match (out.last_mut(), f) {
            (Some(Factor::Const(a)), Factor::Const(b)) => *a *= b,
            _ => out.push(f),
        }
    }
    if out.len() > 1 {
        out.retain(|f| *f != Factor::Const(Quaternion::ONE));
    }
    Product { factors: out }
}

impl From<Quaternion> for Integrand {
    fn from(c: Quaternion) -> Self {
        Integrand::constant(c)
    }
}
