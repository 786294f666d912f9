use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norms below this are treated as zero when inverting.
pub const INVERSE_FLOOR: f64 = 1e-300;

/// Real quaternion `c0 + c1 e1 + c2 e2 + c3 e3` in the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quaternion {
    pub c: [f64; 4],
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { c: [0.0; 4] };
    pub const ONE: Quaternion = Quaternion { c: [1.0, 0.0, 0.0, 0.0] };
    pub const E1: Quaternion = Quaternion { c: [0.0, 1.0, 0.0, 0.0] };
    pub const E2: Quaternion = Quaternion { c: [0.0, 0.0, 1.0, 0.0] };
    pub const E3: Quaternion = Quaternion { c: [0.0, 0.0, 0.0, 1.0] };

    #[inline]
    pub const fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Quaternion { c: [c0, c1, c2, c3] }
    }

    #[inline]
    pub const fn real(r: f64) -> Self {
        Quaternion { c: [r, 0.0, 0.0, 0.0] }
    }

    /// Standard basis unit `e_k` (with `e_0 = 1`).
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 4];
        c[k] = 1.0;
        Quaternion { c }
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.c[0]
    }

    /// Vector part `(c1, c2, c3)`.
    #[inline]
    pub fn im(&self) -> [f64; 3] {
        [self.c[1], self.c[2], self.c[3]]
    }

    #[inline]
    pub fn conj(&self) -> Self {
        Quaternion::new(self.c[0], -self.c[1], -self.c[2], -self.c[3])
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        // hypot-style scaling keeps tiny and huge quaternions finite
        let m = self.max_abs();
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let s = Quaternion::new(self.c[0] / m, self.c[1] / m, self.c[2] / m, self.c[3] / m);
        m * s.norm_sq().sqrt()
    }

    #[inline]
    pub fn max_abs(&self) -> f64 {
        // NaN propagates, unlike f64::max
        self.c.iter().fold(0.0_f64, |a, v| if a.is_nan() || v.is_nan() { f64::NAN } else { a.max(v.abs()) })
    }

    /// Euclidean inner product on R^4.
    #[inline]
    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.c[0] * other.c[0] + self.c[1] * other.c[1] + self.c[2] * other.c[2] + self.c[3] * other.c[3]
    }

    /// `conj(x) / |x|^2`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n < INVERSE_FLOOR {
            return Err(Error::DivisionByZero { norm: n });
        }
        let n2 = self.norm_sq();
        if n2 > 0.0 && n2.is_finite() {
            Ok(self.conj() * (1.0 / n2))
        } else {
            // squared norm under/overflowed; divide twice by the norm instead
            Ok((self.conj() * (1.0 / n)) * (1.0 / n))
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn dist(&self, other: &Quaternion) -> f64 {
        (*self - *other).norm()
    }

    /// Imaginary magnitude `|c1 e1 + c2 e2 + c3 e3|`.
    pub fn im_norm(&self) -> f64 {
        (self.c[1] * self.c[1] + self.c[2] * self.c[2] + self.c[3] * self.c[3]).sqrt()
    }

    /// Integer power by repeated multiplication (`x^0 = 1`).
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Quaternion::ONE;
        for _ in 0..n {
            acc *= *self;
        }
        acc
    }
}

/// Hamilton product.
#[inline]
pub fn mul(a: Quaternion, b: Quaternion) -> Quaternion {
    let [a0, a1, a2, a3] = a.c;
    let [b0, b1, b2, b3] = b.c;
    Quaternion::new(
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, rhs: Quaternion) -> Quaternion {
        mul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.c[0] * s, self.c[1] * s, self.c[2] * s, self.c[3] * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, rhs: Quaternion) {
        *self = *self * rhs;
    }
}

impl MulAssign<f64> for Quaternion {
    #[inline]
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.c[0] / s, self.c[1] / s, self.c[2] / s, self.c[3] / s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2], self.c[3] + o.c[3])
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Quaternion) {
        for i in 0..4 {
            self.c[i] += o.c[i];
        }
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2], self.c[3] - o.c[3])
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Quaternion) {
        for i in 0..4 {
            self.c[i] -= o.c[i];
        }
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.c[0], -self.c[1], -self.c[2], -self.c[3])
    }
}

impl Index<usize> for Quaternion {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.c[i]
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Quaternion::real(r)
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Quaternion { c }
    }
}

impl fmt::Display for Quaternion {
    /// `c0;c1;c2;c3` in shortest round-trip exponent form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e};{:e};{:e};{:e}", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn unit_products() {
        let (e1, e2, e3) = (Quaternion::E1, Quaternion::E2, Quaternion::E3);
        assert_eq!(e1 * e2, e3);
        assert_eq!(e2 * e3, e1);
        assert_eq!(e3 * e1, e2);
        assert_eq!(e2 * e1, -e3);
        for e in [e1, e2, e3] {
            assert_eq!(e * e, -Quaternion::ONE);
        }
    }

    #[test]
    fn identity_and_expansion() {
        let x = Quaternion::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(x * Quaternion::ONE, x);
        assert_eq!(Quaternion::ONE * x, x);
        let a = Quaternion::ONE + Quaternion::E1;
        let b = Quaternion::ONE - Quaternion::E1;
        assert_eq!(a * b, Quaternion::real(2.0));
    }

    #[test]
    fn conj_examples() {
        let a = Quaternion::ONE + Quaternion::E1;
        assert_eq!(a.conj(), Quaternion::ONE - Quaternion::E1);
        let x = Quaternion::new(1.0, 2.0, -3.0, 4.0);
        assert_eq!(x.conj().conj(), x);
        let e12 = Quaternion::E1 * Quaternion::E2;
        assert_eq!(e12.conj(), -Quaternion::E3);
        assert_eq!(e12.conj(), Quaternion::E2.conj() * Quaternion::E1.conj());
    }

    #[test]
    fn norm_and_inverse() {
        let x = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(x.norm_sq(), 4.0);
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        assert_eq!(Quaternion::E1.inverse().unwrap(), -Quaternion::E1);
        let y = Quaternion::new(0.5, -2.0, 0.25, 3.0);
        assert!(close(y * y.inverse().unwrap(), Quaternion::ONE, 1e-15));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(matches!(Quaternion::ZERO.inverse(), Err(Error::DivisionByZero { .. })));
        assert!(Quaternion::new(1e-301, 0.0, 0.0, 0.0).inverse().is_err());
    }

    #[test]
    fn inverse_of_tiny_but_valid() {
        let t = Quaternion::new(1e-200, 1e-200, 0.0, 0.0);
        let p = t * t.inverse().unwrap();
        assert!(close(p, Quaternion::ONE, 1e-14));
    }
}
