use std::f64::consts::PI;

use super::{dot, norm, BravaisLattice2D};
use crate::error::Result;
use crate::linalg::{self, CMat};
use crate::walls::{ScalarWall, SoftWallProfile};

/// Wall block at cell `R = (i, j)`: `diag(v(a2⊥·(R − t·a1 + x_m)))`.
pub fn wall2d_blocks(lattice: &BravaisLattice2D, shape: ScalarWall, t: f64, cell: (i64, i64)) -> CMat {
    let n = lattice.wall_normal();
    let r = lattice.point(cell.0, cell.1);
    let a1 = lattice.a1();
    let v: Vec<f64> = lattice
        .atoms()
        .iter()
        .map(|x| shape.eval(dot(n, [r[0] - t * a1[0] + x[0], r[1] - t * a1[1] + x[1]])))
        .collect();
    linalg::real_diag(&v)
}

/// The same wall seen by a reduced fiber: a per-cell profile in `n − t`.
pub fn edge_wall_1d(lattice: &BravaisLattice2D, shape: ScalarWall) -> Result<SoftWallProfile> {
    let (b1, _) = lattice.reciprocal();
    let n = lattice.wall_normal();
    let offsets = lattice.atoms().iter().map(|&x| dot(n, x)).collect();
    SoftWallProfile::diagonal(shape, 2.0 * PI / norm(b1), offsets)
}

/// `ν·|Γ|/‖a2‖`.
pub fn t_lipschitz(lattice: &BravaisLattice2D, nu: f64) -> f64 {
    nu * lattice.cell_area() / norm(lattice.a2())
}
