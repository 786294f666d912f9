use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qqlab::kernel::{hyperholomorphy_residual, hyperholomorphy_residual_right, kernel, kernel_at};
use qqlab::quat::{Quaternion, StructuralSet};

fn nonzero() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-3.0..3.0f64).prop_map(Quaternion::from).prop_filter("away from 0", |q| q.norm() > 0.1)
}

fn frame() -> impl Strategy<Value = StructuralSet> {
    any::<u64>().prop_map(|s| StructuralSet::random(&mut ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn kernel_is_homogeneous_of_degree_minus_three(y in nonzero(), t in 0.2..5.0f64) {
        let a = kernel_at(y * t);
        let b = kernel_at(y) * t.powi(-3);
        prop_assert!((a - b).norm() <= 1e-12 * b.norm());
    }

    #[test]
    fn kernel_is_odd(y in nonzero()) {
        let a = kernel_at(-y);
        let b = kernel_at(y);
        prop_assert!((a + b).norm() <= 1e-14 * b.norm());
    }

    #[test]
    fn kernel_is_two_sided_regular(psi in frame(), x in prop::array::uniform4(-1.0..1.0f64), d in nonzero()) {
        let tau = [x[0] + d[0], x[1] + d[1], x[2] + d[2], x[3] + d[3]];
        let scale = kernel(&tau, &x, &psi).unwrap().partials.iter().map(|p| p.norm()).fold(0.0, f64::max);
        prop_assert!(hyperholomorphy_residual(&tau, &x, &psi).unwrap() <= 1e-12 * scale.max(1.0));
        prop_assert!(hyperholomorphy_residual_right(&tau, &x, &psi).unwrap() <= 1e-12 * scale.max(1.0));
    }
}

#[test]
fn pole_is_rejected() {
    let psi = StructuralSet::standard();
    assert!(kernel(&[1.0; 4], &[1.0; 4], &psi).is_err());
}
