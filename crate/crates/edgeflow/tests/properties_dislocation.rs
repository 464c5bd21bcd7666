mod common;

use std::f64::consts::PI;

use edgeflow::dislocation::{assemble_ring, plain_ring, ring_flow_check};
use edgeflow::kernel::PeriodicJacobi;
use edgeflow::linalg;
use proptest::prelude::*;

fn jac() -> impl Strategy<Value = PeriodicJacobi> {
    (0.1..2.0f64, -3.0..3.0f64, 0.1..2.0f64, -3.0..3.0f64)
        .prop_map(|(r1, p1, r2, p2)| PeriodicJacobi::ssh(faer::c64::cis(p1) * r1, faer::c64::cis(p2) * r2))
}

fn remove_block(m: &faer::Mat<faer::c64>, start: usize, len: usize) -> faer::Mat<faer::c64> {
    let keep: Vec<usize> = (0..m.nrows()).filter(|i| *i < start || *i >= start + len).collect();
    faer::Mat::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_spectrum_comes_from_discrete_fibers(j in jac(), ell in 5usize..20, sigma in 2.0..10.0f64) {
        let ev = linalg::eigvalsh(&assemble_ring(&j, sigma, 0.0, ell).unwrap().matrix).unwrap();
        let fibers: Vec<f64> = (0..ell)
            .flat_map(|m| linalg::eigvalsh(&j.fiber(2.0 * PI * m as f64 / ell as f64)).unwrap())
            .collect();
        for e in ev {
            prop_assert!(fibers.iter().any(|f| (f - e).abs() < 1e-9), "{e}");
        }
    }

    #[test]
    fn ring_decouples_at_one(j in jac(), ell in 5usize..20, sigma in 2.0..10.0f64) {
        let ring = assemble_ring(&j, sigma, 1.0, ell).unwrap();
        let ev = linalg::eigvalsh(&ring.matrix).unwrap();
        let mut by_dist = ev.clone();
        by_dist.sort_by(|a, b| (a - sigma).abs().total_cmp(&(b - sigma).abs()));
        for v in &by_dist[..j.dim()] {
            prop_assert!((v - sigma).abs() < 1e-10);
        }
        let start = (ell - 1) / 2 * j.dim();
        let rest = linalg::eigvalsh(&remove_block(&ring.matrix, start, j.dim())).unwrap();
        let smaller = linalg::eigvalsh(&plain_ring(&j, ell - 1)).unwrap();
        prop_assert!(common::max_dev(&rest, &smaller) < 1e-10);
    }

    #[test]
    fn ring_is_linear_in_t(j in jac(), ell in 5usize..20, sigma in 2.0..10.0f64, t in 0.0..1.0f64) {
        let m = |t| assemble_ring(&j, sigma, t, ell).unwrap().matrix;
        let lin = m(0.0) * faer::Scale(linalg::c(1.0 - t, 0.0)) + m(1.0) * faer::Scale(linalg::c(t, 0.0));
        prop_assert!(linalg::max_abs_diff(&m(t), &lin) < 1e-14);
    }

    #[test]
    fn ring_counts_match_bands(j1 in prop::sample::select(vec![1.5, 0.5, -1.2]), ell in 5usize..65) {
        let j = PeriodicJacobi::ssh_real(j1, 0.8);
        let r = ring_flow_check(&j, None, 0.0, ell, 1e-6).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }
}
