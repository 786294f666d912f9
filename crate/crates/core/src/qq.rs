//! (q,q')-numbers, scalar and quaternionic (q,q')-derivatives, deformed
//! partial derivatives and the deformed ψ-Fueter operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::QuaternionField;
use crate::quat::{Coords, Quaternion, StructuralSet, INVERSE_FLOOR};

/// Deformation pair with `0 < qp < q <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QQPair {
    q: f64,
    qp: f64,
}

impl QQPair {
    pub fn new(q: f64, qp: f64) -> Result<Self> {
        if !(q.is_finite() && qp.is_finite() && 0.0 < qp && qp < q && q <= 1.0) {
            return Err(Error::InvalidParameters { q, qp });
        }
        Ok(QQPair { q, qp })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn qp(&self) -> f64 {
        self.qp
    }

    /// The pair with `q` and `q'` exchanged. The result deliberately skips
    /// validation; every formula here is symmetric under the swap and this
    /// is how that symmetry gets exercised.
    pub fn swapped(&self) -> QQPair {
        QQPair { q: self.qp, qp: self.q }
    }
}

/// Per-axis deformation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QQVector {
    pub pairs: [QQPair; 4],
}

impl QQVector {
    pub fn new(pairs: [QQPair; 4]) -> Self {
        QQVector { pairs }
    }

    pub fn uniform(p: QQPair) -> Self {
        QQVector { pairs: [p; 4] }
    }

    /// From `[q0, q1, q2, q3, q0', q1', q2', q3']`.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 8 {
            return Err(Error::Config(format!("qq needs 8 reals, got {}", v.len())));
        }
        let mut pairs = [QQPair { q: 1.0, qp: 0.5 }; 4];
        for k in 0..4 {
            pairs[k] = QQPair::new(v[k], v[k + 4])?;
        }
        Ok(QQVector { pairs })
    }

    pub fn to_array(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for k in 0..4 {
            out[k] = self.pairs[k].q;
            out[k + 4] = self.pairs[k].qp;
        }
        out
    }

    pub fn swapped(&self) -> QQVector {
        QQVector { pairs: self.pairs.map(|p| p.swapped()) }
    }
}

/// Base point `w`, active point `x` and the zero threshold below which a
/// deformed partial falls back to the exact partial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalFrame {
    pub w: Coords,
    pub x: Coords,
    pub zero_threshold: f64,
}

impl EvalFrame {
    pub fn new(w: Coords, x: Coords, zero_threshold: f64) -> Self {
        EvalFrame { w, x, zero_threshold }
    }

    /// The `x = w` frame.
    pub fn diagonal(x: Coords, zero_threshold: f64) -> Self {
        EvalFrame { w: x, x, zero_threshold }
    }

    /// `(w_0, .., x_k, .., w_3)`.
    #[inline]
    pub fn slice(&self, k: usize) -> Coords {
        slice_point(&self.w, k, self.x[k])
    }

    pub fn with_x(&self, x: Coords) -> Self {
        EvalFrame { x, ..*self }
    }
}

/// `w` with coordinate `k` replaced by `t`.
#[inline]
pub fn slice_point(w: &Coords, k: usize, t: f64) -> Coords {
    let mut p = *w;
    p[k] = t;
    p
}

/// `[n]_{q,q'} = sum_{i+j=n-1} q^i q'^j`.
pub fn qq_number(n: u32, p: QQPair) -> f64 {
    let mut s = 0.0;
    let mut qi = 1.0;
    for i in 0..n {
        s += qi * p.qp.powi((n - 1 - i) as i32);
        qi *= p.q;
    }
    s
}

/// `(f(qx) - f(q'x)) / ((q - q') x)`; at `x = 0` the supplied derivative.
pub fn scalar_qq_derivative<F: Fn(f64) -> f64>(f: F, p: QQPair, x: f64, derivative_at_zero: Option<f64>) -> Result<f64> {
    if x == 0.0 {
        return derivative_at_zero.ok_or(Error::RequiresDerivativeAtZero);
    }
    Ok((f(p.q * x) - f(p.qp * x)) / ((p.q - p.qp) * x))
}

fn quat_difference_parts<F: Fn(Quaternion) -> Quaternion>(
    f: &F,
    p: QQPair,
    x: Quaternion,
    limit: Option<Quaternion>,
) -> Result<std::result::Result<(Quaternion, Quaternion), Quaternion>> {
    if x.norm() < INVERSE_FLOOR {
        return limit.map(Err).ok_or(Error::SingularPoint);
    }
    let diff = f(x * p.q) - f(x * p.qp);
    let inv = (x * (p.q - p.qp)).inverse()?;
    Ok(Ok((diff, inv)))
}

/// `[f(qx) - f(q'x)] [(q - q')x]^{-1}`.
pub fn quat_qq_derivative_left<F: Fn(Quaternion) -> Quaternion>(
    f: F,
    p: QQPair,
    x: Quaternion,
    limit: Option<Quaternion>,
) -> Result<Quaternion> {
    Ok(match quat_difference_parts(&f, p, x, limit)? {
        Ok((diff, inv)) => diff * inv,
        Err(l) => l,
    })
}

/// `[(q - q')x]^{-1} [f(qx) - f(q'x)]`.
pub fn quat_qq_derivative_right<F: Fn(Quaternion) -> Quaternion>(
    f: F,
    p: QQPair,
    x: Quaternion,
    limit: Option<Quaternion>,
) -> Result<Quaternion> {
    Ok(match quat_difference_parts(&f, p, x, limit)? {
        Ok((diff, inv)) => inv * diff,
        Err(l) => l,
    })
}

/// Left quaternionic (q,q')-derivative of a field at the point with
/// ψ-coordinates `c` (scaling `x` scales every coordinate).
pub fn field_qq_derivative_left<F: QuaternionField + ?Sized>(
    f: &F,
    psi: &StructuralSet,
    p: QQPair,
    c: &Coords,
) -> Result<Quaternion> {
    let x = psi.from_coords(c);
    quat_qq_derivative_left(|y| f.eval(&psi.to_coords(&y)), p, x, None)
}

/// Right counterpart of [`field_qq_derivative_left`].
pub fn field_qq_derivative_right<F: QuaternionField + ?Sized>(
    f: &F,
    psi: &StructuralSet,
    p: QQPair,
    c: &Coords,
) -> Result<Quaternion> {
    let x = psi.from_coords(c);
    quat_qq_derivative_right(|y| f.eval(&psi.to_coords(&y)), p, x, None)
}

/// `(∂^{q,q'}_{x_k} f)(w_0, .., x_k, .., w_3)`.
pub fn deformed_partial<F: QuaternionField + ?Sized>(f: &F, k: usize, p: QQPair, frame: &EvalFrame) -> Result<Quaternion> {
    let t = frame.x[k];
    if t.abs() <= frame.zero_threshold {
        return f.partial(k, &frame.slice(k)).ok_or(Error::MissingExactPartial { axis: k });
    }
    let a = slice_point(&frame.w, k, p.q * t);
    let b = slice_point(&frame.w, k, p.qp * t);
    Ok((f.eval(&a) - f.eval(&b)) / ((p.q - p.qp) * t))
}

/// Deformed partial of the real component `f_j = <f, psi_j>`.
pub fn deformed_component_partial<F: QuaternionField + ?Sized>(
    f: &F,
    j: usize,
    k: usize,
    p: QQPair,
    psi: &StructuralSet,
    frame: &EvalFrame,
) -> Result<f64> {
    Ok(deformed_partial(f, k, p, frame)?.dot(&psi.get(j)))
}

/// All four deformed partials, axis `k` using `qq.pairs[k]`.
pub fn deformed_gradient<F: QuaternionField + ?Sized>(f: &F, qq: &QQVector, frame: &EvalFrame) -> Result<[Quaternion; 4]> {
    let mut out = [Quaternion::ZERO; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = deformed_partial(f, k, qq.pairs[k], frame)?;
    }
    Ok(out)
}

/// `sum_k psi_k (∂^{q_k,q'_k}_{x_k} f)(w, x)`.
pub fn deformed_fueter_left<F: QuaternionField + ?Sized>(
    f: &F,
    qq: &QQVector,
    psi: &StructuralSet,
    frame: &EvalFrame,
) -> Result<Quaternion> {
    let d = deformed_gradient(f, qq, frame)?;
    Ok((0..4).map(|k| psi.get(k) * d[k]).sum())
}

/// `sum_k (∂^{q_k,q'_k}_{x_k} f)(w, x) psi_k`.
pub fn deformed_fueter_right<F: QuaternionField + ?Sized>(
    f: &F,
    qq: &QQVector,
    psi: &StructuralSet,
    frame: &EvalFrame,
) -> Result<Quaternion> {
    let d = deformed_gradient(f, qq, frame)?;
    Ok((0..4).map(|k| d[k] * psi.get(k)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{fueter_left, Constant, FnField, FueterVariable, Identity, Monomial, NormSquared, QuatPower};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(q: f64, qp: f64) -> QQPair {
        QQPair::new(q, qp).unwrap()
    }

    #[test]
    fn pair_validation() {
        assert!(QQPair::new(0.9, 0.5).is_ok());
        assert!(QQPair::new(1.0, 0.5).is_ok());
        assert!(QQPair::new(0.5, 0.9).is_err());
        assert!(QQPair::new(1.2, 0.5).is_err());
        assert!(QQPair::new(0.5, 0.5).is_err());
        assert!(QQPair::new(0.5, 0.0).is_err());
        assert!(QQVector::from_slice(&[0.9, 0.9, 0.8, 0.7, 0.5, 0.4, 0.5, 0.3]).is_ok());
    }

    #[test]
    fn numbers() {
        let p = pair(0.9, 0.5);
        assert_eq!(qq_number(0, p), 0.0);
        assert_eq!(qq_number(1, p), 1.0);
        assert!((qq_number(2, p) - 1.4).abs() < 1e-15);
        assert!((qq_number(3, p) - 1.51).abs() < 1e-15);
        assert!((qq_number(4, p) - qq_number(4, p.swapped())).abs() < 1e-15);
    }

    #[test]
    fn scalar_derivative() {
        let p = pair(0.9, 0.5);
        assert!((scalar_qq_derivative(|x| x * x, p, 2.0, None).unwrap() - 2.8).abs() < 1e-15);
        assert_eq!(scalar_qq_derivative(|_| 3.0, p, 2.0, None).unwrap(), 0.0);
        assert!((scalar_qq_derivative(|x| x, p, 0.7, None).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(scalar_qq_derivative(|x| x, p, 0.0, None), Err(Error::RequiresDerivativeAtZero));
        assert_eq!(scalar_qq_derivative(|x| x, p, 0.0, Some(1.0)), Ok(1.0));
    }

    #[test]
    fn quaternion_derivatives() {
        let p = pair(0.9, 0.5);
        let x = Quaternion::new(0.4, -1.0, 0.3, 2.0);
        let d = quat_qq_derivative_left(|y| y, p, x, None).unwrap();
        assert!((d - Quaternion::ONE).max_abs() < 1e-15);
        let d = quat_qq_derivative_right(|y| y, p, x, None).unwrap();
        assert!((d - Quaternion::ONE).max_abs() < 1e-15);
        let c = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(quat_qq_derivative_left(|_| c, p, x, None).unwrap(), Quaternion::ZERO);
        let d = quat_qq_derivative_left(|y| Quaternion::real(y.norm_sq()), p, x, None).unwrap();
        assert!((d - x.conj() * 1.4).max_abs() < 1e-14);
        assert_eq!(quat_qq_derivative_left(|y| y, p, Quaternion::ZERO, None), Err(Error::SingularPoint));
        assert_eq!(quat_qq_derivative_left(|y| y, p, Quaternion::ZERO, Some(Quaternion::ONE)), Ok(Quaternion::ONE));
    }

    #[test]
    fn conjugation_of_square() {
        let p = pair(0.8, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = Quaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let sq = |y: Quaternion| y * y;
            let zfz = |y: Quaternion| sq(y.conj()).conj();
            let lhs = quat_qq_derivative_right(zfz, p, x, None).unwrap().conj();
            let rhs = quat_qq_derivative_left(sq, p, x.conj(), None).unwrap();
            assert!((lhs - rhs).max_abs() < 1e-13);
        }
    }

    #[test]
    fn monomial_eigen_relation() {
        let p = pair(0.9, 0.4);
        let w = [1.3, 1.1, 1.7, 1.2];
        for n in 0..=6u32 {
            for k in 0..4 {
                let mut e = [0; 4];
                e[k] = n;
                let f = Monomial::new(Quaternion::ONE, e);
                let frame = EvalFrame::new(w, [1.6, 1.45, 1.9, 1.05], 1e-8);
                let d = deformed_partial(&f, k, p, &frame).unwrap();
                let t = frame.x[k];
                let mut rest = 1.0;
                let _ = &mut rest;
                let expect = if n == 0 { 0.0 } else { qq_number(n, p) * t.powi(n as i32 - 1) };
                assert!((d.re() - expect).abs() <= 1e-13 * expect.abs().max(1.0), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn identity_gives_minus_two() {
        let psi = StructuralSet::standard();
        let qq = QQVector::from_slice(&[0.9, 0.9, 0.8, 0.7, 0.5, 0.4, 0.5, 0.3]).unwrap();
        let f = Identity::new(psi);
        let frame = EvalFrame::diagonal([1.2, 1.7, 1.4, 1.9], 1e-8);
        let v = deformed_fueter_left(&f, &qq, &psi, &frame).unwrap();
        assert!((v - Quaternion::real(-2.0)).max_abs() < 1e-14);
        let v = deformed_fueter_right(&f, &qq, &psi, &frame).unwrap();
        assert!((v - Quaternion::real(-2.0)).max_abs() < 1e-14);
    }

    #[test]
    fn fueter_variables_annihilated() {
        let psi = StructuralSet::standard();
        let qq = QQVector::from_slice(&[0.9, 0.9, 0.8, 0.7, 0.5, 0.4, 0.5, 0.3]).unwrap();
        for k in 1..4 {
            let f = FueterVariable::new(psi, k);
            let frame = EvalFrame::new([1.5; 4], [1.2, 1.7, 1.4, 1.9], 1e-8);
            let v = deformed_fueter_left(&f, &qq, &psi, &frame).unwrap();
            assert!(v.max_abs() < 1e-13);
        }
    }

    #[test]
    fn constant_gives_zero() {
        let psi = StructuralSet::standard();
        let qq = QQVector::uniform(pair(0.9, 0.5));
        let f = Constant::new(Quaternion::new(1.0, -2.0, 0.5, 3.0));
        let frame = EvalFrame::new([1.5; 4], [1.2, 1.7, 1.4, 1.9], 1e-8);
        assert_eq!(deformed_fueter_right(&f, &qq, &psi, &frame).unwrap(), Quaternion::ZERO);
    }

    #[test]
    fn zero_coordinate_uses_exact_partial() {
        let f = Monomial::new(Quaternion::ONE, [0, 3, 0, 0]);
        let frame = EvalFrame::diagonal([1.0, 0.0, 1.0, 1.0], 1e-8);
        let d = deformed_partial(&f, 1, pair(0.9, 0.5), &frame).unwrap();
        assert_eq!(d, Quaternion::ZERO);
        let opaque = FnField::new("opaque", |p: &Coords| Quaternion::real(p[1]));
        assert_eq!(
            deformed_partial(&opaque, 1, pair(0.9, 0.5), &frame),
            Err(Error::MissingExactPartial { axis: 1 })
        );
    }

    #[test]
    fn swap_symmetry_is_bitwise() {
        let psi = StructuralSet::standard();
        let f = QuatPower::new(psi, 3);
        let frame = EvalFrame::new([1.5; 4], [1.2, 1.7, 1.4, 1.9], 1e-8);
        let p = pair(0.8, 0.3);
        for k in 0..4 {
            assert_eq!(deformed_partial(&f, k, p, &frame).unwrap(), deformed_partial(&f, k, p.swapped(), &frame).unwrap());
        }
        let x = Quaternion::new(0.3, 1.0, -0.2, 0.8);
        let g = |y: Quaternion| y * y * y;
        assert_eq!(
            quat_qq_derivative_left(g, p, x, None).unwrap(),
            quat_qq_derivative_left(g, p.swapped(), x, None).unwrap()
        );
    }

    #[test]
    fn right_and_left_linearity() {
        let p = pair(0.9, 0.5);
        let c = Quaternion::new(0.2, 1.0, -0.7, 0.4);
        let x = Quaternion::new(1.3, 0.4, -0.2, 0.9);
        let f = |y: Quaternion| y * y + y * Quaternion::E2;
        let a = quat_qq_derivative_left(|y| c * f(y), p, x, None).unwrap();
        let b = c * quat_qq_derivative_left(f, p, x, None).unwrap();
        assert!((a - b).max_abs() < 1e-13 * b.max_abs());
        let a = quat_qq_derivative_right(|y| f(y) * c, p, x, None).unwrap();
        let b = quat_qq_derivative_right(f, p, x, None).unwrap() * c;
        assert!((a - b).max_abs() < 1e-13 * b.max_abs());
    }

    #[test]
    fn norm_squared_closed_form() {
        let psi = StructuralSet::standard();
        let p = pair(0.7, 0.2);
        let c = [1.1, 0.3, -0.4, 0.8];
        let d = field_qq_derivative_left(&NormSquared, &psi, p, &c).unwrap();
        assert!((d - psi.from_coords(&c).conj() * 0.9).max_abs() < 1e-14);
    }

    #[test]
    fn limit_recovers_classical_operator() {
        let psi = StructuralSet::standard();
        let f = QuatPower::new(psi, 3);
        let x = [1.2, 1.5, 1.1, 1.8];
        let exact = fueter_left(&f, &psi, &x).unwrap();
        let mut prev = f64::INFINITY;
        for qp in [0.9, 0.99, 0.999] {
            let qq = QQVector::uniform(pair(1.0, qp));
            let v = deformed_fueter_left(&f, &qq, &psi, &EvalFrame::diagonal(x, 1e-8)).unwrap();
            let r = (v - exact).norm();
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn square_of_operator_is_scalar_on_univariate_sums() {
        // f = sum_k p_k(x_k) real-valued; apply the diagonal deformed operator twice
        let psi = StructuralSet::standard();
        let qq = QQVector::uniform(pair(0.9, 0.5));
        let f = FnField::new("sum", |p: &Coords| {
            Quaternion::real(p[0].powi(3) + 2.0 * p[1] * p[1] - p[2].powi(4) + 0.5 * p[3].powi(3))
        });
        let inner = FnField::new("inner", move |p: &Coords| {
            deformed_fueter_left(&f, &qq, &psi, &EvalFrame::diagonal(*p, 1e-8)).unwrap()
        });
        let v = deformed_fueter_left(&inner, &qq, &psi, &EvalFrame::diagonal([1.3, 1.6, 1.2, 1.9], 1e-8)).unwrap();
        assert!(v.im_norm() < 1e-12 * v.norm().max(1.0), "{v}");
    }
}
