use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qqlab::quat::{Quaternion, StructuralSet};

fn quat() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0..10.0f64).prop_map(Quaternion::from)
}

fn frame() -> impl Strategy<Value = StructuralSet> {
    any::<u64>().prop_map(|s| StructuralSet::random(&mut ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norm_is_multiplicative(a in quat(), b in quat()) {
        let lhs = (a * b).norm();
        let rhs = a.norm() * b.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn conjugation_reverses_products(a in quat(), b in quat()) {
        let d = (a * b).conj() - b.conj() * a.conj();
        prop_assert!(d.norm() <= 1e-12 * (a.norm() * b.norm()).max(1.0));
    }

    #[test]
    fn coordinates_round_trip(psi in frame(), c in prop::array::uniform4(-10.0..10.0f64)) {
        let back = psi.to_coords(&psi.from_coords(&c));
        for k in 0..4 {
            prop_assert!((back[k] - c[k]).abs() <= 1e-12 * 10.0);
        }
    }

    #[test]
    fn squares_of_a_frame_sum_to_minus_two(psi in frame()) {
        let s = psi.sum_of_squares();
        prop_assert!((s - Quaternion::real(-2.0)).norm() <= 1e-12);
    }

    #[test]
    fn product_is_associative(a in quat(), b in quat(), c in quat()) {
        let d = (a * b) * c - a * (b * c);
        prop_assert!(d.norm() <= 1e-12 * (a.norm() * b.norm() * c.norm()).max(1.0));
    }

    #[test]
    fn inverse_is_two_sided(a in quat()) {
        prop_assume!(a.norm() > 1e-3);
        let inv = a.inverse().unwrap();
        prop_assert!((a * inv - Quaternion::ONE).norm() <= 1e-12);
        prop_assert!((inv * a - Quaternion::ONE).norm() <= 1e-12);
    }
}

#[test]
fn zero_inverse_is_an_error() {
    assert!(Quaternion::ZERO.inverse().is_err());
}
