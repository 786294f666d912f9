//! Quaternion arithmetic, structural sets and the conjugation map.

mod frame;
mod quaternion;

pub use frame::{det4, from_coords, to_coords, validate_structural_set, Coords, StructuralSet, FRAME_TOLERANCE};
pub use quaternion::{mul, Quaternion, INVERSE_FLOOR};

/// Conjugation map `Z(x) = conj(x)`.
#[inline]
pub fn conj(a: Quaternion) -> Quaternion {
    a.conj()
}

#[inline]
pub fn norm_sq(a: Quaternion) -> f64 {
    a.norm_sq()
}

pub fn inverse(a: Quaternion) -> crate::Result<Quaternion> {
    a.inverse()
}
