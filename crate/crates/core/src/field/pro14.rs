//! Candidate `(f, lambda)` pairs for the whole-field weighted identities,
//! gated by a sampled certificate of `B f = D f - ^psi D f` with
//! `B = ^psi D[lambda]` (left) or its right mirror.

use std::fmt;
use std::sync::Arc;

use super::{fueter_left, fueter_right, Constant, QuaternionField};
use crate::error::{Error, Result};
use crate::qq::{field_qq_derivative_left, field_qq_derivative_right, QQPair};
use crate::quat::{Coords, Quaternion, StructuralSet};

type ValueFn = dyn Fn(&Coords) -> f64 + Send + Sync;
type GradFn = dyn Fn(&Coords) -> [f64; 4] + Send + Sync;

/// A real `C^1` weight with exact gradient.
#[derive(Clone)]
pub struct ScalarWeight {
    label: String,
    value: Arc<ValueFn>,
    grad: Arc<GradFn>,
}

impl fmt::Debug for ScalarWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarWeight").field("label", &self.label).finish()
    }
}

impl ScalarWeight {
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(&Coords) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&Coords) -> [f64; 4] + Send + Sync + 'static,
    ) -> Self {
        ScalarWeight { label: label.into(), value: Arc::new(value), grad: Arc::new(grad) }
    }

    pub fn constant(c: f64) -> Self {
        ScalarWeight::new(format!("{c}"), move |_| c, |_| [0.0; 4])
    }

    /// `a sin(2 pi ln|x| / ln(q/q'))`, invariant under `x -> (q/q') x`.
    pub fn log_periodic(amplitude: f64, p: QQPair) -> Self {
        let omega = 2.0 * std::f64::consts::PI / (p.q() / p.qp()).ln();
        ScalarWeight::new(
            format!("{amplitude}*sin({omega:.6}*ln|x|)"),
            move |c| {
                let r2: f64 = c.iter().map(|v| v * v).sum();
                amplitude * (0.5 * omega * r2.ln()).sin()
            },
            move |c| {
                let r2: f64 = c.iter().map(|v| v * v).sum();
                let s = amplitude * omega * (0.5 * omega * r2.ln()).cos() / r2;
                [s * c[0], s * c[1], s * c[2], s * c[3]]
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, c: &Coords) -> f64 {
        (self.value)(c)
    }

    pub fn grad(&self, c: &Coords) -> [f64; 4] {
        (self.grad)(c)
    }

    /// The same weight plus a constant.
    pub fn shifted(&self, c: f64) -> Self {
        let v = self.value.clone();
        ScalarWeight { label: format!("{}+{c}", self.label), value: Arc::new(move |x| v(x) + c), grad: self.grad.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pro14Side {
    /// `f` with `D_{q,q'}` and `^psi D`, weight `lambda`.
    Left,
    /// `g` with `D_{q,q',r}` and `D^psi`, weight `eta`.
    Right,
}

/// A field with its weight, its pair and its side.
#[derive(Clone)]
pub struct Pro14Instance {
    pub field: Arc<dyn QuaternionField>,
    pub weight: ScalarWeight,
    pub side: Pro14Side,
    pub pair: QQPair,
    pub psi: StructuralSet,
}

impl fmt::Debug for Pro14Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pro14Instance")
            .field("field", &self.field.label())
            .field("weight", &self.weight)
            .field("side", &self.side)
            .field("pair", &self.pair)
            .finish()
    }
}

impl Pro14Instance {
    pub fn new(field: Arc<dyn QuaternionField>, weight: ScalarWeight, side: Pro14Side, pair: QQPair, psi: StructuralSet) -> Self {
        Pro14Instance { field, weight, side, pair, psi }
    }

    /// `D_{q,q'} f` (left) or `D_{q,q',r} g` (right).
    pub fn qq_derivative(&self, c: &Coords) -> Result<Quaternion> {
        match self.side {
            Pro14Side::Left => field_qq_derivative_left(&*self.field, &self.psi, self.pair, c),
            Pro14Side::Right => field_qq_derivative_right(&*self.field, &self.psi, self.pair, c),
        }
    }

    /// `^psi D[lambda]` (left) or `D^psi[eta]` (right); equal for real weights.
    pub fn weight_gradient(&self, c: &Coords) -> Quaternion {
        let g = self.weight.grad(c);
        (0..4).map(|k| self.psi.get(k) * g[k]).sum()
    }

    /// `B = (D f - ^psi D f) f^{-1}` or `C = g^{-1} (D_r g - D^psi g)`.
    pub fn derived_b(&self, c: &Coords) -> Result<Quaternion> {
        let v = self.field.eval(c);
        let inv = v.inverse()?;
        Ok(match self.side {
            Pro14Side::Left => (self.qq_derivative(c)? - fueter_left(&*self.field, &self.psi, c)?) * inv,
            Pro14Side::Right => inv * (self.qq_derivative(c)? - fueter_right(&*self.field, &self.psi, c)?),
        })
    }

    /// `|D f - ^psi D f - ^psi D[lambda] f| / max(1, |f|)` (left) or the
    /// mirrored quantity (right) at one point.
    pub fn hypothesis_residual(&self, c: &Coords) -> Result<f64> {
        let v = self.field.eval(c);
        let gl = self.weight_gradient(c);
        let r = match self.side {
            Pro14Side::Left => self.qq_derivative(c)? - fueter_left(&*self.field, &self.psi, c)? - gl * v,
            Pro14Side::Right => self.qq_derivative(c)? - fueter_right(&*self.field, &self.psi, c)? - v * gl,
        };
        Ok(r.norm() / v.norm().max(1.0))
    }

    /// Largest [`Pro14Instance::hypothesis_residual`] over `points`; fails
    /// with `HypothesisViolated` above `tolerance`.
    pub fn certify(&self, points: &[Coords], tolerance: f64) -> Result<f64> {
        let mut worst = 0.0_f64;
        let mut at = None;
        for c in points {
            let r = self.hypothesis_residual(c)?;
            if !(r <= worst) {
                worst = r;
                at = Some(*c);
            }
        }
        if !(worst <= tolerance) {
            return Err(Error::HypothesisViolated {
                residual: worst,
                detail: format!("{} with weight {} at {:?}", self.field.label(), self.weight.label(), at.unwrap_or_default()),
            });
        }
        Ok(worst)
    }

    /// The same instance with its weight shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Pro14Instance { weight: self.weight.shifted(c), ..self.clone() }
    }
}

/// Constant field with zero weight; `B = 0` holds exactly.
pub fn constant_instance(c: Quaternion, side: Pro14Side, pair: QQPair, psi: StructuralSet) -> Pro14Instance {
    Pro14Instance::new(Arc::new(Constant::new(c)), ScalarWeight::constant(0.0), side, pair, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FnField, Identity, NormSquared};

    fn points() -> Vec<Coords> {
        vec![[1.2, 1.5, 1.1, 1.9], [1.8, 1.3, 1.6, 1.4], [1.5; 4]]
    }

    #[test]
    fn constants_certify() {
        let p = QQPair::new(0.9, 0.5).unwrap();
        let psi = StructuralSet::standard();
        for side in [Pro14Side::Left, Pro14Side::Right] {
            let inst = constant_instance(Quaternion::new(1.0, 2.0, 3.0, 4.0), side, p, psi);
            assert_eq!(inst.certify(&points(), 1e-12).unwrap(), 0.0);
            assert_eq!(inst.derived_b(&[1.5; 4]).unwrap(), Quaternion::ZERO);
        }
    }

    #[test]
    fn identity_and_norm_rejected() {
        let p = QQPair::new(0.9, 0.5).unwrap();
        let psi = StructuralSet::standard();
        let fields: Vec<Arc<dyn QuaternionField>> = vec![Arc::new(Identity::new(psi)), Arc::new(NormSquared)];
        for f in fields {
            let inst = Pro14Instance::new(f, ScalarWeight::constant(0.0), Pro14Side::Left, p, psi);
            assert!(matches!(inst.certify(&points(), 1e-6), Err(Error::HypothesisViolated { .. })));
        }
    }

    #[test]
    fn log_periodic_weight_is_invariant() {
        let p = QQPair::new(0.9, 0.5).unwrap();
        let l = ScalarWeight::log_periodic(0.3, p);
        let x = [1.2, 1.5, 1.1, 1.9];
        let s = p.q() / p.qp();
        let y = x.map(|v| v * s);
        assert!((l.value(&x) - l.value(&y)).abs() < 1e-14);
        let h = 1e-6;
        let g = l.grad(&x);
        for k in 0..4 {
            let mut a = x;
            let mut b = x;
            a[k] += h;
            b[k] -= h;
            assert!(((l.value(&a) - l.value(&b)) / (2.0 * h) - g[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn log_periodic_field_certifies() {
        let p = QQPair::new(0.9, 0.5).unwrap();
        let psi = StructuralSet::standard();
        let l = ScalarWeight::log_periodic(0.3, p);
        let (lv, lg) = (l.clone(), l.clone());
        let c = Quaternion::new(1.0, -0.5, 0.25, 2.0);
        let f = FnField::new("c*exp(-lambda)", move |x| c * (-lv.value(x)).exp())
            .with_partials(move |k, x| c * (-lg.grad(x)[k] * (-lg.value(x)).exp()));
        let inst = Pro14Instance::new(Arc::new(f), l, Pro14Side::Left, p, psi);
        assert!(inst.certify(&points(), 1e-12).unwrap() < 1e-12);
        assert!(inst.qq_derivative(&[1.3; 4]).unwrap().norm() < 1e-14);
    }
}
