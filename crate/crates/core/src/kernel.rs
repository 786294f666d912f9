//! The ψ-hyperholomorphic Cauchy kernel
//! `K(τ - x) = conj(y) / (2π² |y|⁴)` with `y = τ_ψ - x_ψ`, and its exact partials.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quat::{Coords, Quaternion, StructuralSet};

/// `1 / (2π²)`, the reciprocal surface area of the unit 3-sphere.
pub const KERNEL_NORMALIZATION: f64 = 1.0 / (2.0 * PI * PI);

/// Relative distance below which `τ` and `x` count as the same point.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Kernel value and its four partials with respect to `τ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub value: Quaternion,
    pub partials: [Quaternion; 4],
}

/// Kernel value at displacement `y` (already a quaternion). No pole check.
#[inline]
pub fn kernel_at(y: Quaternion) -> Quaternion {
    let n2 = y.norm_sq();
    y.conj() * (KERNEL_NORMALIZATION / (n2 * n2))
}

/// Displacement `τ_ψ - x_ψ`.
#[inline]
pub fn displacement(tau: &Coords, x: &Coords, psi: &StructuralSet) -> Quaternion {
    let d = [tau[0] - x[0], tau[1] - x[1], tau[2] - x[2], tau[3] - x[3]];
    psi.from_coords(&d)
}

fn check_pole(tau: &Coords, x: &Coords) -> Result<f64> {
    let mut d2 = 0.0;
    let mut scale = 1.0_f64;
    for k in 0..4 {
        d2 += (tau[k] - x[k]) * (tau[k] - x[k]);
        scale = scale.max(tau[k].abs()).max(x[k].abs());
    }
    let d = d2.sqrt();
    if d < POLE_TOLERANCE * scale {
        return Err(Error::PoleHit { distance: d });
    }
    Ok(d)
}

/// `K_ψ(τ - x)` with exact `∂/∂τ_k`.
pub fn kernel(tau: &Coords, x: &Coords, psi: &StructuralSet) -> Result<KernelEval> {
    check_pole(tau, x)?;
    let y = displacement(tau, x, psi);
    let n2 = y.norm_sq();
    let n4 = n2 * n2;
    let yc = y.conj();
    let value = yc * (KERNEL_NORMALIZATION / n4);
    let mut partials = [Quaternion::ZERO; 4];
    for (k, out) in partials.iter_mut().enumerate() {
        let yk = tau[k] - x[k];
        let d = psi.get(k).conj() * (1.0 / n4) - yc * (4.0 * yk / (n4 * n2));
        *out = d * KERNEL_NORMALIZATION;
    }
    Ok(KernelEval { value, partials })
}

/// `|sum_k psi_k ∂_k K(x - pole)|`, zero away from the pole.
pub fn hyperholomorphy_residual(x: &Coords, pole: &Coords, psi: &StructuralSet) -> Result<f64> {
    let ke = kernel(x, pole, psi)?;
    let s: Quaternion = (0..4).map(|k| psi.get(k) * ke.partials[k]).sum();
    Ok(s.norm())
}

/// `|sum_k ∂_k K(x - pole) psi_k|`, the right-operator counterpart.
pub fn hyperholomorphy_residual_right(x: &Coords, pole: &Coords, psi: &StructuralSet) -> Result<f64> {
    let ke = kernel(x, pole, psi)?;
    let s: Quaternion = (0..4).map(|k| ke.partials[k] * psi.get(k)).sum();
    Ok(s.norm())
}

/// Same quantity as [`hyperholomorphy_residual`] but from central differences
/// of the kernel value; only useful as a cross-check.
pub fn hyperholomorphy_residual_fd(x: &Coords, pole: &Coords, psi: &StructuralSet, h: f64) -> Result<f64> {
    check_pole(x, pole)?;
    let mut s = Quaternion::ZERO;
    for k in 0..4 {
        let mut a = *x;
        let mut b = *x;
        a[k] += h;
        b[k] -= h;
        let d = (kernel_at(displacement(&a, pole, psi)) - kernel_at(displacement(&b, pole, psi))) / (2.0 * h);
        s += psi.get(k) * d;
    }
    Ok(s.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_displacement_along_psi0() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = StructuralSet::random(&mut rng);
        let x = [0.3, -0.2, 0.5, 1.0];
        let tau = [x[0] + 1.0, x[1], x[2], x[3]];
        let k = kernel(&tau, &x, &psi).unwrap();
        let expect = psi.get(0).conj() * KERNEL_NORMALIZATION;
        assert!((k.value - expect).max_abs() < 1e-16);
    }

    #[test]
    fn odd_and_homogeneous() {
        let psi = StructuralSet::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let y = Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let k = kernel_at(y);
            assert!((kernel_at(-y) + k).max_abs() <= 1e-14 * k.max_abs());
            let k2 = kernel_at(y * 2.0);
            assert!((k2 * 8.0 - k).max_abs() <= 1e-14 * k.max_abs());
        }
        let _ = psi;
    }

    #[test]
    fn pole_hit() {
        let psi = StructuralSet::standard();
        assert!(matches!(kernel(&[1.0; 4], &[1.0; 4], &psi), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn regular_away_from_pole() {
        let psi = StructuralSet::standard();
        let r = hyperholomorphy_residual(&[1.5, 0.2, -0.4, 0.9], &[0.7, 0.1, 0.2, 0.3], &psi).unwrap();
        assert!(r < 1e-12, "{r}");
        let r = hyperholomorphy_residual_right(&[1.5, 0.2, -0.4, 0.9], &[0.7, 0.1, 0.2, 0.3], &psi).unwrap();
        assert!(r < 1e-12, "{r}");
    }
}
