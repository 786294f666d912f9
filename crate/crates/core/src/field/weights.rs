//! Exponential weights `lambda_k` (whole-field, per axis) and `lambda_{j,k}`
//! (per component and axis), anchored at the lower box corner.

use super::cheb::Chebyshev;
use super::{component, component_partial, QuaternionField};
use crate::error::{Error, Result};
use crate::qq::{deformed_partial, qq_number, slice_point, EvalFrame, QQPair};
use crate::quad::{kronrod, Box4};
use crate::quat::{Coords, StructuralSet};

/// Absolute tolerance of the 1-D weight integrals.
pub const WEIGHT_ABS_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in the whole-field ratio.
pub const REALNESS_TOLERANCE: f64 = 1e-10;
const SEGMENT_SAMPLES: usize = 257;
const DEGREES: [usize; 5] = [32, 64, 128, 256, 512];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `lambda = 0` (identically vanishing component or zero ratio).
    Zero,
    /// `([n] - n) ln(t / a)` for monomial dependence `t^n`.
    ClosedForm,
    /// Chebyshev interpolant of the cumulative 1-D integral.
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Zero,
    Log { coef: f64 },
    Cheb { value: Chebyshev, deriv: Chebyshev, at_anchor: f64 },
}

/// A weight `lambda(t)` along one axis with `lambda(anchor) = offset`
/// (the offset is 0 unless shifted).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightExponent {
    axis: usize,
    anchor: f64,
    offset: f64,
    repr: Repr,
}

impl WeightExponent {
    pub fn zero(axis: usize, anchor: f64) -> Self {
        WeightExponent { axis, anchor, offset: 0.0, repr: Repr::Zero }
    }

    /// `coef * ln(t / anchor)`.
    pub fn closed_form(axis: usize, anchor: f64, coef: f64) -> Self {
        WeightExponent { axis, anchor, offset: 0.0, repr: Repr::Log { coef } }
    }

    /// `∫_anchor^t ratio`, interpolated on `[anchor, hi]`.
    pub fn quadrature<F: Fn(f64) -> f64>(axis: usize, anchor: f64, hi: f64, ratio: F) -> Result<Self> {
        let mut best = None;
        for n in DEGREES {
            let nodes = Chebyshev::lobatto_nodes(n, anchor, hi);
            let mut values = Vec::with_capacity(n + 1);
            let mut acc = 0.0;
            values.push(0.0);
            for w in nodes.windows(2) {
                acc += kronrod::integrate(&ratio, w[0], w[1], WEIGHT_ABS_TOL / n as f64)?;
                values.push(acc);
            }
            let value = Chebyshev::from_lobatto_values(anchor, hi, &values);
            let scale = values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
            let converged = value.tail(3) <= 1e-15 * scale;
            best = Some(value);
            if converged {
                break;
            }
        }
        let value = best.expect("at least one degree tried");
        let deriv = value.derivative();
        let at_anchor = value.eval(anchor);
        Ok(WeightExponent { axis, anchor, offset: 0.0, repr: Repr::Cheb { value, deriv, at_anchor } })
    }

    pub fn kind(&self) -> WeightKind {
        match self.repr {
            Repr::Zero => WeightKind::Zero,
            Repr::Log { .. } => WeightKind::ClosedForm,
            Repr::Cheb { .. } => WeightKind::Quadrature,
        }
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Log coefficient `[n] - n` of a closed-form weight.
    pub fn coefficient(&self) -> Option<f64> {
        match self.repr {
            Repr::Log { coef } => Some(coef),
            _ => None,
        }
    }

    /// The same weight plus a constant (a different anchor value).
    pub fn shifted(&self, c: f64) -> Self {
        WeightExponent { offset: self.offset + c, ..self.clone() }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.offset
            + match &self.repr {
                Repr::Zero => 0.0,
                Repr::Log { coef } => coef * (t / self.anchor).ln(),
                Repr::Cheb { value, at_anchor, .. } => {
                    if t == self.anchor {
                        0.0
                    } else {
                        value.eval(t) - at_anchor
                    }
                }
            }
    }

    #[inline]
    pub fn exp(&self, t: f64) -> f64 {
        self.eval(t).exp()
    }

    /// `d lambda / dt` from the representation itself.
    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Zero => 0.0,
            Repr::Log { coef } => coef / t,
            Repr::Cheb { deriv, .. } => deriv.eval(t),
        }
    }
}

fn threshold(b: &Box4) -> f64 {
    1e-8 * b.diameter()
}

/// `(∂^{q,q'}_k f_j - ∂_k f_j) / f_j` along the `k`-segment through `w`.
fn component_ratio<F: QuaternionField + ?Sized>(
    f: &F,
    j: usize,
    k: usize,
    p: QQPair,
    psi: &StructuralSet,
    w: &Coords,
    t: f64,
    thr: f64,
) -> Result<f64> {
    let s = slice_point(w, k, t);
    let frame = EvalFrame::new(*w, s, thr);
    let dq = deformed_partial(f, k, p, &frame)?.dot(&psi.get(j));
    let d = component_partial(f, j, k, psi, &s).ok_or(Error::MissingExactPartial { axis: k })?;
    Ok((dq - d) / component(f, j, psi, &s))
}

/// `lambda_{j,k}` with `∂_k lambda_{j,k} f_j = ∂^{q,q'}_k f_j - ∂_k f_j`
/// along `(w_0, .., t, .., w_3)`, `t` in `[lo_k, hi_k]`, anchored at `lo_k`.
pub fn build_weight_pro3<F: QuaternionField + ?Sized>(
    f: &F,
    j: usize,
    k: usize,
    p: QQPair,
    psi: &StructuralSet,
    w: &Coords,
    b: &Box4,
) -> Result<WeightExponent> {
    let (lo, hi) = (b.lo[k], b.hi[k]);
    let ts: Vec<f64> = (0..SEGMENT_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / (SEGMENT_SAMPLES - 1) as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| component(f, j, psi, &slice_point(w, k, t))).collect();
    let mags: f64 = ts.iter().map(|&t| f.eval(&slice_point(w, k, t)).norm()).fold(0.0, f64::max);
    let scale = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if scale <= 1e-14 * mags.max(1e-300) || scale == 0.0 {
        return Ok(WeightExponent::zero(k, lo));
    }
    let positive = vals[0] > 0.0;
    for (i, v) in vals.iter().enumerate() {
        if (*v > 0.0) != positive || v.abs() <= 1e-12 * scale {
            return Err(Error::ComponentVanishes { component: j, axis: k, at: ts[i] });
        }
    }
    if let Some(n) = f.component_axis_power(j, k, psi) {
        let coef = qq_number(n, p) - n as f64;
        return Ok(if coef == 0.0 { WeightExponent::zero(k, lo) } else { WeightExponent::closed_form(k, lo, coef) });
    }
    // fail early on missing partials
    component_ratio(f, j, k, p, psi, w, lo, threshold(b))?;
    let thr = threshold(b);
    WeightExponent::quadrature(k, lo, hi, |t| component_ratio(f, j, k, p, psi, w, t, thr).unwrap_or(f64::NAN))
}

/// `lambda_k` with `∂_k lambda_k f = ∂^{q,q'}_k f - ∂_k f` along the
/// `k`-segment through `w`. Requires the ratio
/// `(∂^{q,q'}_k f - ∂_k f) f^{-1}` to be real there.
pub fn build_weight_pro2<F: QuaternionField + ?Sized>(f: &F, k: usize, p: QQPair, w: &Coords, b: &Box4) -> Result<WeightExponent> {
    let (lo, hi) = (b.lo[k], b.hi[k]);
    let thr = threshold(b);
    let ratio = |t: f64| -> Result<crate::quat::Quaternion> {
        let s = slice_point(w, k, t);
        let frame = EvalFrame::new(*w, s, thr);
        let num = deformed_partial(f, k, p, &frame)? - f.partial(k, &s).ok_or(Error::MissingExactPartial { axis: k })?;
        let inv = f.eval(&s).inverse().map_err(|_| Error::HypothesisViolated {
            residual: f64::INFINITY,
            detail: format!("field vanishes at {s:?}"),
        })?;
        Ok(num * inv)
    };
    let vanishes = (0..33).all(|i| f.eval(&slice_point(w, k, lo + (hi - lo) * i as f64 / 32.0)) == crate::quat::Quaternion::ZERO);
    if vanishes {
        // every weight works for the zero field
        return Ok(WeightExponent::zero(k, lo));
    }
    let mut worst_im = 0.0_f64;
    let mut worst_at = *w;
    let mut worst_abs = 0.0_f64;
    for i in 0..33 {
        let t = lo + (hi - lo) * i as f64 / 32.0;
        let r = ratio(t)?;
        worst_abs = worst_abs.max(r.norm());
        if r.im_norm() > worst_im {
            worst_im = r.im_norm();
            worst_at = slice_point(w, k, t);
        }
    }
    if worst_im > REALNESS_TOLERANCE {
        return Err(Error::HypothesisViolated {
            residual: worst_im,
            detail: format!("ratio along axis {k} is not real at {worst_at:?}"),
        });
    }
    if let Some(n) = f.axis_power(k) {
        let coef = qq_number(n, p) - n as f64;
        return Ok(if coef == 0.0 { WeightExponent::zero(k, lo) } else { WeightExponent::closed_form(k, lo, coef) });
    }
    if worst_abs == 0.0 {
        return Ok(WeightExponent::zero(k, lo));
    }
    WeightExponent::quadrature(k, lo, hi, |t| ratio(t).map(|r| r.re()).unwrap_or(f64::NAN))
}

/// Largest `|lambda'(t) f_j - (∂^{q,q'}_k f_j - ∂_k f_j)|` over `samples`
/// points of the segment, relative to `max(1, |f_j|)`.
#[allow(clippy::too_many_arguments)]
pub fn ode_residual_component<F: QuaternionField + ?Sized>(
    lambda: &WeightExponent,
    f: &F,
    j: usize,
    p: QQPair,
    psi: &StructuralSet,
    w: &Coords,
    b: &Box4,
    samples: usize,
) -> Result<f64> {
    let k = lambda.axis();
    let thr = threshold(b);
    let mut worst = 0.0_f64;
    for i in 0..samples {
        let t = b.lo[k] + b.width(k) * (i as f64 + 0.5) / samples as f64;
        let s = slice_point(w, k, t);
        let fj = component(f, j, psi, &s);
        let dq = deformed_partial(f, k, p, &EvalFrame::new(*w, s, thr))?.dot(&psi.get(j));
        let d = component_partial(f, j, k, psi, &s).ok_or(Error::MissingExactPartial { axis: k })?;
        let r = (lambda.derivative(t) * fj - (dq - d)).abs() / fj.abs().max(1.0);
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Whole-field counterpart of [`ode_residual_component`].
pub fn ode_residual_field<F: QuaternionField + ?Sized>(
    lambda: &WeightExponent,
    f: &F,
    p: QQPair,
    w: &Coords,
    b: &Box4,
    samples: usize,
) -> Result<f64> {
    let k = lambda.axis();
    let thr = threshold(b);
    let mut worst = 0.0_f64;
    for i in 0..samples {
        let t = b.lo[k] + b.width(k) * (i as f64 + 0.5) / samples as f64;
        let s = slice_point(w, k, t);
        let fv = f.eval(&s);
        let dq = deformed_partial(f, k, p, &EvalFrame::new(*w, s, thr))?;
        let d = f.partial(k, &s).ok_or(Error::MissingExactPartial { axis: k })?;
        let r = (fv * lambda.derivative(t) - (dq - d)).norm() / fv.norm().max(1.0);
        worst = worst.max(r);
    }
    Ok(worst)
}
