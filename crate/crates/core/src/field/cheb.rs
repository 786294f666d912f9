use std::f64::consts::PI;

/// Chebyshev series `sum_k c_k T_k(s)` on `[lo, hi]`, `s` the affine image of
/// the argument in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Chebyshev-Lobatto points `lo..=hi` in ascending order (`n + 1` of them).
    pub fn lobatto_nodes(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut out: Vec<f64> = (0..=n).map(|i| mid - half * (PI * i as f64 / n as f64).cos()).collect();
        out[0] = lo;
        out[n] = hi;
        out
    }

    /// Interpolant through `values` sampled at [`Chebyshev::lobatto_nodes`].
    pub fn from_lobatto_values(lo: f64, hi: f64, values: &[f64]) -> Self {
        let n = values.len() - 1;
        assert!(n >= 1, "need at least two samples");
        // ascending nodes correspond to s_i = -cos(pi i / n); flip to the
        // usual cos(pi i / n) ordering
        let f: Vec<f64> = values.iter().rev().copied().collect();
        let mut coeffs = vec![0.0; n + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (i, v) in f.iter().enumerate() {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                s += w * v * (PI * (i * k) as f64 / n as f64).cos();
            }
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        Chebyshev { lo, hi, coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    #[inline]
    fn to_unit(&self, t: f64) -> f64 {
        (2.0 * t - self.lo - self.hi) / (self.hi - self.lo)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let s = self.to_unit(t);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * s * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        s * b1 - b2 + self.coeffs[0]
    }

    /// Derivative series with respect to `t`.
    pub fn derivative(&self) -> Chebyshev {
        let n = self.degree();
        if n == 0 {
            return Chebyshev { lo: self.lo, hi: self.hi, coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n + 1];
        for k in (0..n).rev() {
            let next = if k + 2 <= n { d[k + 2] } else { 0.0 };
            d[k] = next + 2.0 * (k + 1) as f64 * self.coeffs[k + 1];
        }
        d[0] *= 0.5;
        d.truncate(n);
        let scale = 2.0 / (self.hi - self.lo);
        for v in d.iter_mut() {
            *v *= scale;
        }
        Chebyshev { lo: self.lo, hi: self.hi, coeffs: d }
    }

    /// Largest magnitude among the last `m` coefficients.
    pub fn tail(&self, m: usize) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(m)..].iter().fold(0.0_f64, |a, c| a.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomial() {
        let nodes = Chebyshev::lobatto_nodes(8, 1.0, 2.0);
        let vals: Vec<f64> = nodes.iter().map(|t| t * t * t - 2.0 * t).collect();
        let c = Chebyshev::from_lobatto_values(1.0, 2.0, &vals);
        for t in [1.0, 1.13, 1.5, 1.99, 2.0] {
            assert!((c.eval(t) - (t * t * t - 2.0 * t)).abs() < 1e-14);
        }
        let d = c.derivative();
        for t in [1.0, 1.27, 1.8] {
            assert!((d.eval(t) - (3.0 * t * t - 2.0)).abs() < 1e-13, "{}", d.eval(t));
        }
    }

    #[test]
    fn log_converges_fast() {
        let nodes = Chebyshev::lobatto_nodes(32, 1.0, 2.0);
        let vals: Vec<f64> = nodes.iter().map(|t| t.ln()).collect();
        let c = Chebyshev::from_lobatto_values(1.0, 2.0, &vals);
        assert!(c.tail(4) < 1e-15);
        let d = c.derivative();
        for t in [1.0, 1.41, 2.0] {
            assert!((c.eval(t) - t.ln()).abs() < 1e-15);
            assert!((d.eval(t) - 1.0 / t).abs() < 1e-12);
        }
    }
}
