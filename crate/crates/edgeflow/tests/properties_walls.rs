mod common;

use edgeflow::kernel::PeriodicJacobi;
use edgeflow::linalg;
use edgeflow::walls::{steep_wall, ScalarWall, SoftWallProfile};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = ScalarWall> {
    prop_oneof![(0.0..12.0f64).prop_map(|nu| ScalarWall::LinearRamp { nu }), Just(ScalarWall::SmoothSqrt)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn walls_respect_their_lipschitz_constant(
        s in shape(),
        scale in 0.2..3.0f64,
        offsets in prop::collection::vec(0.0..1.0f64, 1..4),
        x in -20.0..5.0f64,
        dx in -2.0..2.0f64,
    ) {
        let w = SoftWallProfile::diagonal(s, scale, offsets).unwrap();
        let d = linalg::op_norm(&(&w.eval(x) - &w.eval(x + dx)));
        prop_assert!(d <= w.lipschitz() * dx.abs() + 1e-12);
    }

    #[test]
    fn ramps_are_operator_monotone(
        nu in 0.0..12.0f64,
        offsets in prop::collection::vec(0.0..1.0f64, 1..4),
        x in -20.0..5.0f64,
        dx in 0.0..4.0f64,
    ) {
        let w = SoftWallProfile::diagonal(ScalarWall::LinearRamp { nu }, 1.0, offsets).unwrap();
        let diff = &w.eval(x) - &w.eval(x + dx);
        prop_assert!(linalg::eigvalsh(&diff).unwrap()[0] >= -1e-12);
    }

    #[test]
    fn steep_wall_is_continuous_and_saturates(
        j1 in -2.0..2.0f64,
        j2 in -2.0..2.0f64,
        nu in 0.2..1.0f64,
        e in -1.0..1.0f64,
    ) {
        let jac = PeriodicJacobi::ssh_real(j1, j2);
        let profile = SoftWallProfile::diagonal(ScalarWall::LinearRamp { nu }, 1.0, vec![0.0, 0.25]).unwrap();
        let steep = steep_wall(&profile, &jac, e, None).unwrap();
        let bound = (steep.sigma + linalg::op_norm(jac.b()) + nu) * 1e-3 * 1.01;
        let n = ((1.0 - (steep.x_sigma - 2.0)) / 1e-3).round() as usize;
        let mut prev = steep.profile.eval(steep.x_sigma - 2.0);
        for i in 1..=n {
            let cur = steep.profile.eval(steep.x_sigma - 2.0 + i as f64 * 1e-3);
            prop_assert!(linalg::op_norm(&(&cur - &prev)) <= bound);
            prev = cur;
        }
        for i in 0..200 {
            let x = -1.0 - 1e-6 - i as f64 * 0.37;
            prop_assert!(linalg::eigvalsh(&steep.profile.eval(x)).unwrap()[0] >= steep.floor() - 1e-9);
        }
    }
}
