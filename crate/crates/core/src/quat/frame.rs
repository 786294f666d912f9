//! Structural sets: orthonormal quaternion 4-frames and the coordinate maps
//! between a quaternion and its components in such a frame.

use rand::Rng;

use super::quaternion::Quaternion;
use crate::error::{Error, Result};

/// Real coordinates of a point with respect to a structural set.
pub type Coords = [f64; 4];

/// Orthonormality tolerance applied on construction.
pub const FRAME_TOLERANCE: f64 = 1e-12;

/// Orthonormal frame `psi_0..psi_3` of H together with its orientation sign
/// relative to the standard basis `{1, e1, e2, e3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralSet {
    psi: [Quaternion; 4],
    sign: i8,
}

impl StructuralSet {
    /// The standard basis `{1, e1, e2, e3}`.
    pub fn standard() -> Self {
        StructuralSet {
            psi: [Quaternion::ONE, Quaternion::E1, Quaternion::E2, Quaternion::E3],
            sign: 1,
        }
    }

    pub fn new(psi: [Quaternion; 4]) -> Result<Self> {
        validate_structural_set(psi)
    }

    /// Build from 16 reals, row `k` holding the standard components of `psi_k`.
    pub fn from_rows(rows: &[f64]) -> Result<Self> {
        if rows.len() != 16 {
            return Err(Error::InvalidStructuralSet(format!("expected 16 reals, got {}", rows.len())));
        }
        let mut psi = [Quaternion::ZERO; 4];
        for (k, p) in psi.iter_mut().enumerate() {
            *p = Quaternion::new(rows[4 * k], rows[4 * k + 1], rows[4 * k + 2], rows[4 * k + 3]);
        }
        validate_structural_set(psi)
    }

    /// Gram-Schmidt on four quaternions, in order. Fails if they are
    /// (numerically) linearly dependent.
    pub fn gram_schmidt(raw: [Quaternion; 4]) -> Result<Self> {
        let mut out = [Quaternion::ZERO; 4];
        for k in 0..4 {
            let mut v = raw[k];
            // two passes keep the frame orthogonal to ~1e-16
            for _ in 0..2 {
                for prev in out.iter().take(k) {
                    v -= *prev * prev.dot(&v);
                }
            }
            let n = v.norm();
            if n < 1e-8 * raw[k].norm().max(1e-300) {
                return Err(Error::InvalidStructuralSet(format!("vector {k} is linearly dependent")));
            }
            out[k] = v / n;
        }
        validate_structural_set(out)
    }

    /// Random orthonormal frame from Gram-Schmidt on Gaussian-ish quaternions.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut raw = [Quaternion::ZERO; 4];
            for q in raw.iter_mut() {
                *q = Quaternion::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
            }
            if let Ok(s) = StructuralSet::gram_schmidt(raw) {
                return s;
            }
        }
    }

    #[inline]
    pub fn psi(&self) -> &[Quaternion; 4] {
        &self.psi
    }

    #[inline]
    pub fn get(&self, k: usize) -> Quaternion {
        self.psi[k]
    }

    /// Orientation sign, `+1` or `-1`.
    #[inline]
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_standard(&self) -> bool {
        *self == StructuralSet::standard()
    }

    /// `sum_k c_k psi_k`.
    #[inline]
    pub fn from_coords(&self, c: &Coords) -> Quaternion {
        self.psi[0] * c[0] + self.psi[1] * c[1] + self.psi[2] * c[2] + self.psi[3] * c[3]
    }

    /// `c_k = <x, psi_k>`.
    #[inline]
    pub fn to_coords(&self, x: &Quaternion) -> Coords {
        [x.dot(&self.psi[0]), x.dot(&self.psi[1]), x.dot(&self.psi[2]), x.dot(&self.psi[3])]
    }

    /// `sum_k psi_k psi_k`, which is `-2` for every structural set.
    pub fn sum_of_squares(&self) -> Quaternion {
        self.psi.iter().map(|p| *p * *p).sum()
    }

    /// Flattened rows, inverse of [`StructuralSet::from_rows`].
    pub fn rows(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for k in 0..4 {
            out[4 * k..4 * k + 4].copy_from_slice(&self.psi[k].c);
        }
        out
    }
}

/// Free-function form of [`StructuralSet::to_coords`].
pub fn to_coords(x: &Quaternion, psi: &StructuralSet) -> Coords {
    psi.to_coords(x)
}

/// Free-function form of [`StructuralSet::from_coords`].
pub fn from_coords(c: &Coords, psi: &StructuralSet) -> Quaternion {
    psi.from_coords(c)
}

/// Checks `<psi_k, psi_m> = delta_km` to [`FRAME_TOLERANCE`] and computes the
/// orientation sign.
pub fn validate_structural_set(psi: [Quaternion; 4]) -> Result<StructuralSet> {
    for k in 0..4 {
        if !psi[k].is_finite() {
            return Err(Error::InvalidStructuralSet(format!("psi_{k} is not finite")));
        }
    }
    for k in 0..4 {
        for m in k..4 {
            let ip = psi[k].dot(&psi[m]);
            let target = if k == m { 1.0 } else { 0.0 };
            if (ip - target).abs() > FRAME_TOLERANCE {
                return Err(Error::NotOrthonormal { k, m, value: ip });
            }
        }
    }
    let rows = [psi[0].c, psi[1].c, psi[2].c, psi[3].c];
    let det = det4(&rows);
    let sign = if det > 0.0 { 1 } else { -1 };
    Ok(StructuralSet { psi, sign })
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant by cofactor expansion along the first row.
pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut det = 0.0;
    for col in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for r in 1..4 {
            let mut cc = 0;
            for c in 0..4 {
                if c == col {
                    continue;
                }
                minor[r - 1][cc] = m[r][c];
                cc += 1;
            }
        }
        let sgn = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sgn * m[0][col] * det3(minor);
    }
    det
}
