use std::sync::Arc;

use super::QuaternionField;
use crate::kernel;
use crate::quad::Box4;
use crate::quat::{Coords, Quaternion, StructuralSet};

#[inline]
fn ipow(x: f64, n: u32) -> f64 {
    x.powi(n as i32)
}

/// `f(x) = c`.
#[derive(Debug, Clone)]
pub struct Constant {
    pub c: Quaternion,
}

impl Constant {
    pub fn new(c: Quaternion) -> Self {
        Constant { c }
    }
}

impl QuaternionField for Constant {
    fn label(&self) -> String {
        format!("const({})", self.c)
    }
    fn eval(&self, _p: &Coords) -> Quaternion {
        self.c
    }
    fn partial(&self, _axis: usize, _p: &Coords) -> Option<Quaternion> {
        Some(Quaternion::ZERO)
    }
    fn axis_power(&self, _axis: usize) -> Option<u32> {
        Some(0)
    }
    fn component_axis_power(&self, _j: usize, _axis: usize, _psi: &StructuralSet) -> Option<u32> {
        Some(0)
    }
    fn degree_bound(&self) -> Option<u32> {
        Some(0)
    }
}

/// `f(x) = c * prod_k x_k^{n_k}`.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub c: Quaternion,
    pub n: [u32; 4],
}

impl Monomial {
    pub fn new(c: Quaternion, n: [u32; 4]) -> Self {
        Monomial { c, n }
    }

    fn scalar(&self, p: &Coords) -> f64 {
        (0..4).map(|k| ipow(p[k], self.n[k])).product()
    }
}

impl QuaternionField for Monomial {
    fn label(&self) -> String {
        format!("mono{:?}", self.n)
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        self.c * self.scalar(p)
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        let n = self.n[axis];
        if n == 0 {
            return Some(Quaternion::ZERO);
        }
        let mut s = n as f64 * ipow(p[axis], n - 1);
        for k in (0..4).filter(|&k| k != axis) {
            s *= ipow(p[k], self.n[k]);
        }
        Some(self.c * s)
    }
    fn axis_power(&self, axis: usize) -> Option<u32> {
        Some(self.n[axis])
    }
    fn component_axis_power(&self, _j: usize, axis: usize, _psi: &StructuralSet) -> Option<u32> {
        Some(self.n[axis])
    }
    fn degree_bound(&self) -> Option<u32> {
        Some(self.n.iter().sum())
    }
}

/// One term `coef * prod_k x_k^{exps_k}` of a real polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub exps: [u32; 4],
}

impl Term {
    pub const fn new(coef: f64, exps: [u32; 4]) -> Self {
        Term { coef, exps }
    }

    fn eval(&self, p: &Coords) -> f64 {
        self.coef * (0..4).map(|k| ipow(p[k], self.exps[k])).product::<f64>()
    }

    fn partial(&self, axis: usize, p: &Coords) -> f64 {
        let n = self.exps[axis];
        if n == 0 {
            return 0.0;
        }
        let mut s = self.coef * n as f64 * ipow(p[axis], n - 1);
        for k in (0..4).filter(|&k| k != axis) {
            s *= ipow(p[k], self.exps[k]);
        }
        s
    }
}

/// `f = sum_j P_j(x) psi_j` with real polynomial components given in the
/// frame `psi`.
#[derive(Debug, Clone)]
pub struct ComponentPolynomial {
    pub name: String,
    pub psi: StructuralSet,
    pub components: [Vec<Term>; 4],
    /// When false the field never advertises monomial structure, which forces
    /// weight construction through 1-D quadrature.
    pub advertise_monomials: bool,
}

impl ComponentPolynomial {
    pub fn new(name: impl Into<String>, psi: StructuralSet, components: [Vec<Term>; 4]) -> Self {
        ComponentPolynomial { name: name.into(), psi, components, advertise_monomials: true }
    }

    pub fn without_monomial_hints(mut self) -> Self {
        self.advertise_monomials = false;
        self
    }

    pub fn component_value(&self, j: usize, p: &Coords) -> f64 {
        self.components[j].iter().map(|t| t.eval(p)).sum()
    }
}

impl QuaternionField for ComponentPolynomial {
    fn label(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        (0..4).map(|j| self.psi.get(j) * self.component_value(j, p)).sum()
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        Some(
            (0..4)
                .map(|j| self.psi.get(j) * self.components[j].iter().map(|t| t.partial(axis, p)).sum::<f64>())
                .sum(),
        )
    }
    fn component_axis_power(&self, j: usize, axis: usize, psi: &StructuralSet) -> Option<u32> {
        if !self.advertise_monomials || *psi != self.psi {
            return None;
        }
        match self.components[j].as_slice() {
            [] => Some(0),
            [t] => Some(t.exps[axis]),
            _ => None,
        }
    }
    fn degree_bound(&self) -> Option<u32> {
        self.components.iter().flatten().map(|t| t.exps.iter().sum::<u32>()).max().or(Some(0))
    }
}

/// `f(x) = c * exp(rate * x_axis)`.
#[derive(Debug, Clone)]
pub struct Exponential {
    pub c: Quaternion,
    pub rate: f64,
    pub axis: usize,
}

impl Exponential {
    pub fn new(c: Quaternion, rate: f64, axis: usize) -> Self {
        Exponential { c, rate, axis }
    }
}

impl QuaternionField for Exponential {
    fn label(&self) -> String {
        format!("exp({}*x{})", self.rate, self.axis)
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        self.c * (self.rate * p[self.axis]).exp()
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        if axis != self.axis {
            return Some(Quaternion::ZERO);
        }
        Some(self.c * (self.rate * (self.rate * p[self.axis]).exp()))
    }
    fn axis_power(&self, axis: usize) -> Option<u32> {
        (axis != self.axis).then_some(0)
    }
    fn component_axis_power(&self, _j: usize, axis: usize, _psi: &StructuralSet) -> Option<u32> {
        (axis != self.axis).then_some(0)
    }
}

/// Fueter variable `x_k - psi_k x_0` (real coordinate `x_k` times the unit 1).
#[derive(Debug, Clone)]
pub struct FueterVariable {
    pub psi: StructuralSet,
    pub k: usize,
}

impl FueterVariable {
    pub fn new(psi: StructuralSet, k: usize) -> Self {
        assert!(k < 4, "axis out of range");
        FueterVariable { psi, k }
    }
}

impl QuaternionField for FueterVariable {
    fn label(&self) -> String {
        format!("fueter{}", self.k)
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        Quaternion::real(p[self.k]) - self.psi.get(self.k) * p[0]
    }
    fn partial(&self, axis: usize, _p: &Coords) -> Option<Quaternion> {
        let mut d = Quaternion::ZERO;
        if axis == self.k {
            d += Quaternion::ONE;
        }
        if axis == 0 {
            d -= self.psi.get(self.k);
        }
        Some(d)
    }
    fn axis_power(&self, axis: usize) -> Option<u32> {
        match (axis == self.k, axis == 0) {
            (false, false) => Some(0),
            _ => None,
        }
    }
    fn component_axis_power(&self, j: usize, axis: usize, psi: &StructuralSet) -> Option<u32> {
        if *psi != self.psi {
            return None;
        }
        // component j = x_k <1, psi_j> - x_0 <psi_k, psi_j>
        let a = Quaternion::ONE.dot(&psi.get(j));
        let b = self.psi.get(self.k).dot(&psi.get(j));
        let depends_on = |ax: usize| (ax == self.k && a != 0.0) || (ax == 0 && b != 0.0);
        if !depends_on(axis) {
            return Some(0);
        }
        // a single linear term along `axis` only if the other coefficient does not
        // contribute along the same axis
        if self.k == 0 {
            return None;
        }
        let (own, other_axis_coef) = if axis == self.k { (a, b) } else { (b, a) };
        let _ = other_axis_coef;
        (own != 0.0).then_some(1)
    }
    fn degree_bound(&self) -> Option<u32> {
        Some(1)
    }
}

/// `f(x) = x_psi = sum_k x_k psi_k`.
#[derive(Debug, Clone)]
pub struct Identity {
    pub psi: StructuralSet,
}

impl Identity {
    pub fn new(psi: StructuralSet) -> Self {
        Identity { psi }
    }
}

impl QuaternionField for Identity {
    fn label(&self) -> String {
        "x".into()
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        self.psi.from_coords(p)
    }
    fn partial(&self, axis: usize, _p: &Coords) -> Option<Quaternion> {
        Some(self.psi.get(axis))
    }
    fn degree_bound(&self) -> Option<u32> {
        Some(1)
    }
}

/// `f(x) = (x_psi)^n`.
#[derive(Debug, Clone)]
pub struct QuatPower {
    pub psi: StructuralSet,
    pub n: u32,
}

impl QuatPower {
    pub fn new(psi: StructuralSet, n: u32) -> Self {
        QuatPower { psi, n }
    }
}

impl QuaternionField for QuatPower {
    fn label(&self) -> String {
        format!("x^{}", self.n)
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        self.psi.from_coords(p).powi(self.n)
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        if self.n == 0 {
            return Some(Quaternion::ZERO);
        }
        let x = self.psi.from_coords(p);
        let e = self.psi.get(axis);
        // d(x^n) = sum_i x^i e x^{n-1-i}
        let mut pows = Vec::with_capacity(self.n as usize);
        let mut acc = Quaternion::ONE;
        for _ in 0..self.n {
            pows.push(acc);
            acc *= x;
        }
        let n = self.n as usize;
        Some((0..n).map(|i| pows[i] * e * pows[n - 1 - i]).sum())
    }
    fn degree_bound(&self) -> Option<u32> {
        Some(self.n)
    }
}

/// `f(x) = |x|^2`.
#[derive(Debug, Clone, Default)]
pub struct NormSquared;

impl QuaternionField for NormSquared {
    fn label(&self) -> String {
        "|x|^2".into()
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        Quaternion::real(p.iter().map(|v| v * v).sum())
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        Some(Quaternion::real(2.0 * p[axis]))
    }
    fn degree_bound(&self) -> Option<u32> {
        Some(2)
    }
}

/// `f(x) = K_psi(x - pole)`, hyperholomorphic away from `pole`.
#[derive(Debug, Clone)]
pub struct CauchyKernelField {
    pub psi: StructuralSet,
    pub pole: Coords,
}

impl QuaternionField for CauchyKernelField {
    fn label(&self) -> String {
        "cauchy".into()
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        kernel::kernel_at(kernel::displacement(p, &self.pole, &self.psi))
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        kernel::kernel(p, &self.pole, &self.psi).ok().map(|k| k.partials[axis])
    }
}

type EvalFn = dyn Fn(&Coords) -> Quaternion + Send + Sync;
type PartialFn = dyn Fn(usize, &Coords) -> Quaternion + Send + Sync;

/// A field given by closures, with optional exact partials.
#[derive(Clone)]
pub struct FnField {
    name: String,
    eval: Arc<EvalFn>,
    partial: Option<Arc<PartialFn>>,
}

impl FnField {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Coords) -> Quaternion + Send + Sync + 'static) -> Self {
        FnField { name: name.into(), eval: Arc::new(eval), partial: None }
    }

    pub fn with_partials(mut self, partial: impl Fn(usize, &Coords) -> Quaternion + Send + Sync + 'static) -> Self {
        self.partial = Some(Arc::new(partial));
        self
    }
}

impl std::fmt::Debug for FnField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnField").field("name", &self.name).finish()
    }
}

impl QuaternionField for FnField {
    fn label(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, p: &Coords) -> Quaternion {
        (self.eval)(p)
    }
    fn partial(&self, axis: usize, p: &Coords) -> Option<Quaternion> {
        self.partial.as_ref().map(|d| d(axis, p))
    }
}

/// A named field of the shipped catalog with the properties the harness
/// selects on.
#[derive(Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub field: Arc<dyn QuaternionField>,
    /// Polynomial of total degree at most 3.
    pub low_degree_polynomial: bool,
    /// Annihilated by the left ψ-Fueter operator.
    pub left_regular: bool,
    /// All four components strictly positive on a positive-orthant box.
    pub positive_components: bool,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry").field("id", &self.id).field("label", &self.field.label()).finish()
    }
}

fn entry(id: &'static str, field: Arc<dyn QuaternionField>) -> CatalogEntry {
    let low = field.degree_bound().map(|d| d <= 3).unwrap_or(false);
    CatalogEntry { id, field, low_degree_polynomial: low, left_regular: false, positive_components: false }
}

/// Positive polynomial components used by the catalog and the §4 cases.
pub fn positive_polynomial(psi: StructuralSet) -> ComponentPolynomial {
    ComponentPolynomial::new(
        "poly+",
        psi,
        [
            vec![Term::new(1.0, [0, 0, 0, 0]), Term::new(1.0, [1, 1, 0, 0]), Term::new(1.0, [0, 0, 2, 0])],
            vec![Term::new(2.0, [0, 0, 0, 0]), Term::new(1.0, [0, 0, 0, 3])],
            vec![Term::new(0.5, [0, 0, 0, 0]), Term::new(1.0, [2, 0, 1, 0])],
            vec![Term::new(1.0, [0, 0, 0, 0]), Term::new(1.0, [0, 1, 0, 0]), Term::new(1.0, [0, 0, 0, 1])],
        ],
    )
}

/// Components are single monomials of mixed degree.
pub fn component_monomials(psi: StructuralSet) -> ComponentPolynomial {
    ComponentPolynomial::new(
        "compmono",
        psi,
        [
            vec![Term::new(1.0, [2, 1, 0, 0])],
            vec![Term::new(2.0, [0, 3, 0, 0])],
            vec![Term::new(1.0, [0, 0, 1, 2])],
            vec![Term::new(0.5, [1, 0, 0, 1])],
        ],
    )
}

/// The shipped test-function families, built in the frame `psi`. The
/// Cauchy-kernel member puts its pole outside `domain`.
pub fn builtin_catalog(psi: &StructuralSet, domain: &Box4) -> Vec<CatalogEntry> {
    let psi = *psi;
    let c = Quaternion::new(1.5, -0.5, 0.25, 2.0);
    let mut out = vec![
        entry("const-one", Arc::new(Constant::new(Quaternion::ONE))),
        entry("const-q", Arc::new(Constant::new(c))),
        entry("identity", Arc::new(Identity::new(psi))),
        entry("square", Arc::new(QuatPower::new(psi, 2))),
        entry("cube", Arc::new(QuatPower::new(psi, 3))),
        entry("norm-sq", Arc::new(NormSquared)),
        entry("mono-small", Arc::new(Monomial::new(Quaternion::new(1.0, 0.0, 0.5, 0.0), [1, 0, 2, 0]))),
        entry("mono-1234", Arc::new(Monomial::new(Quaternion::new(0.5, 0.25, 0.0, -1.0), [1, 2, 3, 4]))),
        entry("poly-positive", Arc::new(positive_polynomial(psi))),
        entry("comp-mono", Arc::new(component_monomials(psi))),
        entry("exp", Arc::new(Exponential::new(Quaternion::new(1.0, 0.5, 0.0, 0.0), 0.7, 1))),
    ];
    for (k, id) in [(1usize, "fueter-1"), (2, "fueter-2"), (3, "fueter-3")] {
        let mut e = entry(id, Arc::new(FueterVariable::new(psi, k)));
        e.left_regular = psi.get(0) == Quaternion::ONE;
        out.push(e);
    }
    let mut pole = [0.0; 4];
    for k in 0..4 {
        pole[k] = domain.lo[k] - 0.75 * domain.width(k);
    }
    let mut cauchy = entry("cauchy", Arc::new(CauchyKernelField { psi, pole }));
    cauchy.left_regular = true;
    out.push(cauchy);
    for e in out.iter_mut() {
        if matches!(e.id, "const-one" | "const-q") {
            e.left_regular = true;
        }
        if matches!(e.id, "poly-positive" | "comp-mono") {
            e.positive_components = true;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{finite_difference_mismatch, fueter_left};

    #[test]
    fn catalog_partials_match_finite_differences() {
        let domain = Box4::new([1.0; 4], [2.0; 4]).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let psis = [StructuralSet::standard(), StructuralSet::random(&mut rng)];
        for psi in psis.iter() {
            for e in builtin_catalog(psi, &domain) {
                for p in [[1.2, 1.5, 1.7, 1.1], [1.9, 1.05, 1.33, 1.61]] {
                    let h = 1e-5 * domain.diameter();
                    let m = finite_difference_mismatch(&*e.field, &p, h).unwrap();
                    assert!(m < 1e-6, "{}: {m}", e.id);
                }
            }
        }
    }

    #[test]
    fn catalog_has_regular_member() {
        let domain = Box4::new([1.0; 4], [2.0; 4]).unwrap();
        let psi = StructuralSet::standard();
        let cat = builtin_catalog(&psi, &domain);
        let f = cat.iter().find(|e| e.id == "fueter-2").unwrap();
        assert_eq!(fueter_left(&*f.field, &psi, &[1.3, 1.1, 1.8, 1.4]).unwrap(), Quaternion::ZERO);
    }

    #[test]
    fn positive_members_are_positive_on_unit_box() {
        let domain = Box4::new([1.0; 4], [2.0; 4]).unwrap();
        let psi = StructuralSet::standard();
        for e in builtin_catalog(&psi, &domain).iter().filter(|e| e.positive_components) {
            for i in 0..=8 {
                for j in 0..=8 {
                    let p = [1.0 + i as f64 / 8.0, 1.0 + j as f64 / 8.0, 2.0 - i as f64 / 8.0, 1.0 + (i * j % 9) as f64 / 8.0];
                    let v = e.field.eval(&p);
                    for k in 0..4 {
                        assert!(v.dot(&psi.get(k)) > 0.0, "{} comp {k}", e.id);
                    }
                }
            }
        }
    }

    #[test]
    fn fueter_component_powers() {
        let psi = StructuralSet::standard();
        let f = FueterVariable::new(psi, 1);
        // components: f_0 = x_1, f_1 = -x_0
        assert_eq!(f.component_axis_power(0, 1, &psi), Some(1));
        assert_eq!(f.component_axis_power(0, 0, &psi), Some(0));
        assert_eq!(f.component_axis_power(1, 0, &psi), Some(1));
        assert_eq!(f.component_axis_power(2, 3, &psi), Some(0));
    }
}
