//! Seeded random models for property and agreement checks.

use rand::Rng;

use crate::bands::{band_structure, Gap};
use crate::error::Result;
use crate::kernel::PeriodicJacobi;
use crate::linalg::{self, c, CMat};
use crate::walls::{ScalarWall, SoftWallProfile};

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    let mut m = linalg::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = c(rng.random_range(-scale..scale), rng.random_range(-scale..scale));
        }
    }
    m
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    let m = random_matrix(rng, n, scale);
    (&m + &linalg::adjoint(&m)) * faer::Scale(c(0.5, 0.0))
}

/// Jacobi operator with block size in `1..=max_dim` and a bounded gap of
/// width at least `min_gap`.
pub fn random_gapped_jacobi(rng: &mut impl Rng, max_dim: usize, min_gap: f64, k_count: usize) -> Result<(PeriodicJacobi, Gap)> {
    loop {
        let n = rng.random_range(1..=max_dim.max(1));
        let b = random_hermitian(rng, n, 1.5);
        let a = random_matrix(rng, n, 0.6);
        let jac = PeriodicJacobi::new(b, a)?;
        let gaps: Vec<Gap> =
            band_structure(&jac.kernel(), k_count)?.gap_catalog().gaps.into_iter().filter(|g| g.width() >= min_gap).collect();
        if !gaps.is_empty() {
            let g = gaps[rng.random_range(0..gaps.len())];
            return Ok((jac, g));
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandomFlowCase {
    pub jacobi: PeriodicJacobi,
    pub gap: Gap,
    pub energy: f64,
    pub nu: f64,
    pub wall: SoftWallProfile,
}

/// A gapped model, an energy in the middle part of its gap, and a ramp wall
/// with slope in `[0.3, 3)` and random per-orbital offsets in `[0, 1)`.
pub fn random_flow_case(rng: &mut impl Rng, max_dim: usize, k_count: usize) -> Result<RandomFlowCase> {
    let (jacobi, gap) = random_gapped_jacobi(rng, max_dim, 0.2, k_count)?;
    let energy = gap.lo + rng.random_range(0.3..0.7) * gap.width();
    let nu = rng.random_range(0.3..3.0);
    let offsets = (0..jacobi.dim()).map(|_| rng.random_range(0.0..1.0)).collect();
    let wall = SoftWallProfile::diagonal(ScalarWall::LinearRamp { nu }, 1.0, offsets)?;
    Ok(RandomFlowCase { jacobi, gap, energy, nu, wall })
}
