//! Weighted slice sums `I f` (whole-field weights) and `𝓘 f` (component
//! weights), with their exact partials in the active point.

use super::weights::{build_weight_pro2, build_weight_pro3, WeightExponent};
use super::{component, component_partial, QuaternionField};
use crate::error::{Error, Result};
use crate::qq::{EvalFrame, QQVector};
use crate::quad::Box4;
use crate::quat::{Coords, Quaternion, StructuralSet};

/// `lambda_k` for `k = 0..3` at base point `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceWeights {
    pub w: Coords,
    pub weights: [WeightExponent; 4],
}

impl SliceWeights {
    pub fn build_pro2<F: QuaternionField + ?Sized>(f: &F, qq: &QQVector, w: &Coords, b: &Box4) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for k in 0..4 {
            out.push(build_weight_pro2(f, k, qq.pairs[k], w, b)?);
        }
        Ok(SliceWeights { w: *w, weights: to_array(out) })
    }

    pub fn zero(w: &Coords, b: &Box4) -> Self {
        SliceWeights { w: *w, weights: std::array::from_fn(|k| WeightExponent::zero(k, b.lo[k])) }
    }

    /// Every weight shifted by `shift[k]`.
    pub fn shifted(&self, shift: [f64; 4]) -> Self {
        SliceWeights { w: self.w, weights: std::array::from_fn(|k| self.weights[k].shifted(shift[k])) }
    }
}

/// `lambda_{j,k}`, indexed `[j][k]`, at base point `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentWeights {
    pub w: Coords,
    pub weights: [[WeightExponent; 4]; 4],
}

impl ComponentWeights {
    pub fn build_pro3<F: QuaternionField + ?Sized>(
        f: &F,
        qq: &QQVector,
        psi: &StructuralSet,
        w: &Coords,
        b: &Box4,
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(4);
        for j in 0..4 {
            let mut row = Vec::with_capacity(4);
            for k in 0..4 {
                row.push(build_weight_pro3(f, j, k, qq.pairs[k], psi, w, b)?);
            }
            rows.push(to_array(row));
        }
        Ok(ComponentWeights { w: *w, weights: to_array(rows) })
    }

    pub fn zero(w: &Coords, b: &Box4) -> Self {
        ComponentWeights { w: *w, weights: std::array::from_fn(|_| std::array::from_fn(|k| WeightExponent::zero(k, b.lo[k]))) }
    }

    /// Weight `(j, k)` shifted by `shift[j][k]`.
    pub fn shifted(&self, shift: [[f64; 4]; 4]) -> Self {
        ComponentWeights {
            w: self.w,
            weights: std::array::from_fn(|j| std::array::from_fn(|k| self.weights[j][k].shifted(shift[j][k]))),
        }
    }
}

fn to_array<T, const N: usize>(v: Vec<T>) -> [T; N] {
    v.try_into().unwrap_or_else(|_| unreachable!("length checked by construction"))
}

fn check_base(w: &Coords, frame: &EvalFrame) -> Result<()> {
    if *w != frame.w {
        return Err(Error::Config(format!("weights built at {w:?} but frame base is {:?}", frame.w)));
    }
    Ok(())
}

/// `sum_k f(w_0, .., x_k, .., w_3) e^{lambda_k(x_k)}`.
pub fn i_transform<F: QuaternionField + ?Sized>(f: &F, weights: &SliceWeights, frame: &EvalFrame) -> Result<Quaternion> {
    check_base(&weights.w, frame)?;
    Ok((0..4).map(|k| f.eval(&frame.slice(k)) * weights.weights[k].exp(frame.x[k])).sum())
}

/// `∂/∂x_k` of [`i_transform`]; only the `k`-th slice depends on `x_k`.
pub fn i_transform_partial<F: QuaternionField + ?Sized>(
    f: &F,
    weights: &SliceWeights,
    frame: &EvalFrame,
    k: usize,
) -> Result<Quaternion> {
    check_base(&weights.w, frame)?;
    let s = frame.slice(k);
    let t = frame.x[k];
    let l = &weights.weights[k];
    let d = f.partial(k, &s).ok_or(Error::MissingExactPartial { axis: k })?;
    Ok((d + f.eval(&s) * l.derivative(t)) * l.exp(t))
}

/// `sum_{j,k} psi_j f_j(w_0, .., x_k, .., w_3) e^{lambda_{j,k}(x_k)}`.
pub fn cal_i_transform<F: QuaternionField + ?Sized>(
    f: &F,
    weights: &ComponentWeights,
    psi: &StructuralSet,
    frame: &EvalFrame,
) -> Result<Quaternion> {
    check_base(&weights.w, frame)?;
    let mut out = Quaternion::ZERO;
    for k in 0..4 {
        let s = frame.slice(k);
        for j in 0..4 {
            out += psi.get(j) * (component(f, j, psi, &s) * weights.weights[j][k].exp(frame.x[k]));
        }
    }
    Ok(out)
}

/// `∂/∂x_k` of [`cal_i_transform`].
pub fn cal_i_transform_partial<F: QuaternionField + ?Sized>(
    f: &F,
    weights: &ComponentWeights,
    psi: &StructuralSet,
    frame: &EvalFrame,
    k: usize,
) -> Result<Quaternion> {
    check_base(&weights.w, frame)?;
    let s = frame.slice(k);
    let t = frame.x[k];
    let mut out = Quaternion::ZERO;
    for j in 0..4 {
        let l = &weights.weights[j][k];
        let d = component_partial(f, j, k, psi, &s).ok_or(Error::MissingExactPartial { axis: k })?;
        out += psi.get(j) * ((d + component(f, j, psi, &s) * l.derivative(t)) * l.exp(t));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{component_monomials, Constant, FueterVariable, Monomial};
    use crate::qq::{qq_number, QQPair};

    fn unit_box() -> Box4 {
        Box4::new([1.0; 4], [2.0; 4]).unwrap()
    }

    #[test]
    fn zero_weights_on_diagonal() {
        let psi = StructuralSet::standard();
        let f = component_monomials(psi);
        let w = [1.3, 1.4, 1.5, 1.6];
        let b = unit_box();
        let frame = EvalFrame::diagonal(w, 1e-8);
        let v = i_transform(&f, &SliceWeights::zero(&w, &b), &frame).unwrap();
        assert!((v - f.eval(&w) * 4.0).max_abs() < 1e-14);
        let v = cal_i_transform(&f, &ComponentWeights::zero(&w, &b), &psi, &frame).unwrap();
        assert!((v - f.eval(&w) * 4.0).max_abs() < 1e-13);
    }

    #[test]
    fn constants() {
        let psi = StructuralSet::standard();
        let c = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let f = Constant::new(c);
        let w = [1.5; 4];
        let b = unit_box();
        let qq = QQVector::uniform(QQPair::new(0.9, 0.5).unwrap());
        let frame = EvalFrame::new(w, [1.2, 1.9, 1.1, 1.7], 1e-8);
        let sw = SliceWeights::build_pro2(&f, &qq, &w, &b).unwrap();
        assert_eq!(i_transform(&f, &sw, &frame).unwrap(), c * 4.0);
        let e0 = Constant::new(Quaternion::ONE);
        let cw = ComponentWeights::build_pro3(&e0, &qq, &psi, &w, &b).unwrap();
        assert_eq!(cal_i_transform(&e0, &cw, &psi, &frame).unwrap(), psi.get(0) * 4.0);
    }

    #[test]
    fn monomial_hand_computed() {
        let p = QQPair::new(0.8, 0.3).unwrap();
        let qq = QQVector::uniform(p);
        let n = [1, 2, 3, 4];
        let c = Quaternion::new(0.5, 1.0, -1.0, 0.25);
        let f = Monomial::new(c, n);
        let w = [1.5, 1.25, 1.75, 1.1];
        let x = [1.9, 1.3, 1.05, 1.6];
        let b = unit_box();
        let sw = SliceWeights::build_pro2(&f, &qq, &w, &b).unwrap();
        let got = i_transform(&f, &sw, &EvalFrame::new(w, x, 1e-8)).unwrap();
        let mut expect = Quaternion::ZERO;
        for k in 0..4 {
            let mut s = w;
            s[k] = x[k];
            let e = qq_number(n[k], p) - n[k] as f64;
            expect += f.eval(&s) * (x[k] / b.lo[k]).abs().powf(e);
        }
        assert!((got - expect).max_abs() < 1e-12 * expect.max_abs());
    }

    #[test]
    fn fueter_variable_weights_vanish() {
        let psi = StructuralSet::standard();
        let f = FueterVariable::new(psi, 1);
        let w = [1.5, 1.2, 1.7, 1.4];
        let b = unit_box();
        let qq = QQVector::uniform(QQPair::new(0.9, 0.5).unwrap());
        let cw = ComponentWeights::build_pro3(&f, &qq, &psi, &w, &b).unwrap();
        for row in &cw.weights {
            for l in row {
                assert_eq!(l.eval(1.8), 0.0);
            }
        }
        let v = cal_i_transform(&f, &cw, &psi, &EvalFrame::diagonal(w, 1e-8)).unwrap();
        assert!((v - f.eval(&w) * 4.0).max_abs() < 1e-14);
    }

    #[test]
    fn partials_match_differences() {
        let psi = StructuralSet::standard();
        let f = component_monomials(psi);
        let qq = QQVector::uniform(QQPair::new(0.7, 0.4).unwrap());
        let w = [1.3, 1.6, 1.2, 1.8];
        let b = unit_box();
        let cw = ComponentWeights::build_pro3(&f, &qq, &psi, &w, &b).unwrap();
        let x = [1.45, 1.55, 1.65, 1.35];
        let h = 1e-5;
        for k in 0..4 {
            let mut a = x;
            let mut c = x;
            a[k] += h;
            c[k] -= h;
            let fd = (cal_i_transform(&f, &cw, &psi, &EvalFrame::new(w, a, 1e-8)).unwrap()
                - cal_i_transform(&f, &cw, &psi, &EvalFrame::new(w, c, 1e-8)).unwrap())
                / (2.0 * h);
            let ex = cal_i_transform_partial(&f, &cw, &psi, &EvalFrame::new(w, x, 1e-8), k).unwrap();
            assert!((fd - ex).max_abs() < 1e-7 * ex.max_abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn base_mismatch_rejected() {
        let f = Constant::new(Quaternion::ONE);
        let b = unit_box();
        let sw = SliceWeights::zero(&[1.5; 4], &b);
        assert!(i_transform(&f, &sw, &EvalFrame::diagonal([1.2; 4], 1e-8)).is_err());
    }
}
