mod common;

use std::f64::consts::PI;

use common::{kernel_strategy, max_dev, sorted};
use edgeflow::bands::band_structure;
use edgeflow::kernel::PeriodicJacobi;
use edgeflow::linalg::{self, c};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fiber_is_hermitian(k in kernel_strategy(4, 3), ks in prop::collection::vec(-10.0..10.0f64, 16)) {
        for q in ks {
            prop_assert!(linalg::hermiticity_defect(&k.fiber(q)) < 1e-12);
        }
    }

    #[test]
    fn bands_are_lipschitz_in_k(k in kernel_strategy(3, 3)) {
        let bs = band_structure(&k, 256).unwrap();
        let lip = k.k_lipschitz();
        let grid = bs.k_grid();
        for (w, g) in bs.curves().windows(2).zip(grid.windows(2)) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                prop_assert!((b - a).abs() <= lip * (g[1] - g[0]) + 1e-9);
            }
        }
    }

    #[test]
    fn supercell_fiber_folds(k in kernel_strategy(3, 3), extra in 0usize..3, q in -PI..PI) {
        let ell = k.range().max(1) + extra;
        let sup = k.supercell(ell).unwrap();
        let lhs = linalg::eigvalsh(&sup.fiber(q)).unwrap();
        let rhs: Vec<f64> = (0..ell)
            .flat_map(|j| linalg::eigvalsh(&k.fiber((q + 2.0 * PI * j as f64) / ell as f64)).unwrap())
            .collect();
        prop_assert!(max_dev(&lhs, &sorted(rhs)) < 1e-9);
    }

    #[test]
    fn ssh_closed_form_real(j1 in -3.0..3.0f64, j2 in -3.0..3.0f64, q in -PI..PI) {
        let ev = linalg::eigvalsh(&PeriodicJacobi::ssh_real(j1, j2).fiber(q)).unwrap();
        let r = (c(j1, 0.0) + c(j2, 0.0) * faer::c64::cis(q)).norm();
        prop_assert!((ev[0] + r).abs() < 1e-12 && (ev[1] - r).abs() < 1e-12);
    }

    #[test]
    fn ssh_closed_form_complex(r1 in 0.0..3.0f64, p1 in -PI..PI, r2 in 0.0..3.0f64, p2 in -PI..PI, q in -PI..PI) {
        let (j1, j2) = (faer::c64::cis(p1) * r1, faer::c64::cis(p2) * r2);
        let ev = linalg::eigvalsh(&PeriodicJacobi::ssh(j1, j2).fiber(q)).unwrap();
        let r = (j1 + j2.conj() * faer::c64::cis(-q)).norm();
        prop_assert!((ev[0] + r).abs() < 1e-12 && (ev[1] - r).abs() < 1e-12);
    }

    #[test]
    fn truncation_beyond_range_is_identity(k in kernel_strategy(3, 3), extra in 0usize..3) {
        let tr = k.truncate(k.range() + extra);
        prop_assert_eq!(tr.discarded_mass, 0.0);
        for (n, h) in k.blocks() {
            prop_assert_eq!(linalg::max_abs_diff(h, tr.kernel.block(n).unwrap()), 0.0);
        }
    }
}
