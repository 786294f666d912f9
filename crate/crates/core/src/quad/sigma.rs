use super::domain::{Box4, QuadSpec};
use super::engine::{boundary_integral, volume_integral};
use super::integrand::Integrand;
use crate::error::{Error, Result};
use crate::field::{fueter_left, Identity, QuaternionField};
use crate::quat::{Quaternion, StructuralSet};

/// Residual a calibration sign must reach.
pub const CALIBRATION_TOLERANCE: f64 = 1e-10;
/// Residual the rejected sign must exceed.
pub const CALIBRATION_SEPARATION: f64 = 0.1;

/// Oriented surface form on box faces: face `(k, side)` carries the
/// quaternion weight `s * side * (-sgn psi) * psi_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaForm {
    pub psi: StructuralSet,
    pub s: i8,
}

impl SigmaForm {
    pub fn new(psi: StructuralSet, s: i8) -> Self {
        SigmaForm { psi, s: if s < 0 { -1 } else { 1 } }
    }

    #[inline]
    pub fn weight(&self, axis: usize, side: i8) -> Quaternion {
        let sgn = self.psi.sign() as f64;
        self.psi.get(axis) * (self.s as f64 * side as f64 * -sgn)
    }
}

fn stokes_residual(sigma: &SigmaForm, b: &Box4, spec: &QuadSpec) -> Result<f64> {
    let psi = sigma.psi;
    let f = Identity::new(psi);
    let lhs = boundary_integral(&Integrand::constant(Quaternion::ONE), &Integrand::point(move |p| f.eval(p)), b, sigma, spec)?;
    let rhs = volume_integral(&Integrand::point(move |p| fueter_left(&Identity::new(psi), &psi, p).unwrap_or(Quaternion::ZERO)), b, spec)?;
    Ok((lhs - rhs).norm() / rhs.norm().max(1.0))
}

/// Picks the sign `s` for which the Stokes identity holds on the pair
/// `g = 1`, `f(x) = x_psi` over `b`. Errors unless exactly one sign passes.
pub fn calibrate_sigma(psi: &StructuralSet, b: &Box4, spec: &QuadSpec) -> Result<SigmaForm> {
    let plus = stokes_residual(&SigmaForm::new(*psi, 1), b, spec)?;
    let minus = stokes_residual(&SigmaForm::new(*psi, -1), b, spec)?;
    match (plus <= CALIBRATION_TOLERANCE, minus <= CALIBRATION_TOLERANCE) {
        (true, false) if minus >= CALIBRATION_SEPARATION => Ok(SigmaForm::new(*psi, 1)),
        (false, true) if plus >= CALIBRATION_SEPARATION => Ok(SigmaForm::new(*psi, -1)),
        _ => Err(Error::CalibrationAmbiguous { plus, minus }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn standard_frame_calibrates() {
        let b = Box4::unit();
        let spec = QuadSpec::new(8, 2, 0.0, 0.5).unwrap();
        let s = calibrate_sigma(&StructuralSet::standard(), &b, &spec).unwrap();
        assert_eq!(s.s, -1);
        assert_eq!(calibrate_sigma(&StructuralSet::standard(), &b, &spec).unwrap(), s);
    }

    #[test]
    fn negative_frame_calibrates_to_plus() {
        let psi = StructuralSet::new([Quaternion::ONE, Quaternion::E2, Quaternion::E1, Quaternion::E3]).unwrap();
        let spec = QuadSpec::new(8, 2, 0.0, 0.5).unwrap();
        let s = calibrate_sigma(&psi, &Box4::unit(), &spec).unwrap();
        assert_eq!(s.s, 1);
    }

    #[test]
    fn weight_is_outward_normal_times_psi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let psi = StructuralSet::random(&mut rng);
        let spec = QuadSpec::new(8, 2, 0.0, 0.5).unwrap();
        let s = calibrate_sigma(&psi, &Box4::unit(), &spec).unwrap();
        for k in 0..4 {
            assert_eq!(s.weight(k, 1), psi.get(k));
            assert_eq!(s.weight(k, -1), -psi.get(k));
        }
    }

    #[test]
    fn single_face_pair_survives() {
        // g = 1, f = x_0: only the two x_0 faces contribute, with weight psi_0 on the upper one
        let psi = StructuralSet::standard();
        let spec = QuadSpec::new(8, 2, 0.0, 0.5).unwrap();
        let sigma = calibrate_sigma(&psi, &Box4::unit(), &spec).unwrap();
        let v = boundary_integral(
            &Integrand::constant(Quaternion::ONE),
            &Integrand::point(|p| Quaternion::real(p[0])),
            &Box4::unit(),
            &sigma,
            &spec,
        )
        .unwrap();
        let expect = psi.get(0) * (sigma.s as f64 * -(psi.sign() as f64));
        assert!((v - expect).max_abs() < 1e-14);
    }
}
