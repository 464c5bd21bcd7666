//! Two-dimensional Bravais-lattice tight-binding models.
//!
//! Lattice vectors `R = i·a1 + j·a2` are keyed by integer coordinates
//! `(i, j)`. Momenta are Cartesian 2-vectors; the partial Fourier variable
//! along `a2*` is a scalar `s` with `k2 = s·a2*`.

mod cut;
mod gauge;
mod wall;
mod wallace;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernel::ConvolutionKernel;
use crate::linalg::{self, CMat, C64};

pub use cut::{folded_fiber_check, mirror_equivalence, supercell_cut, CommensurateCut, FoldReport, MirrorReport, Ordering};
pub use gauge::{gauge_transform, ssh_scalar_chain, GaugeResult, ScalarChain};
pub use wall::{edge_wall_1d, t_lipschitz, wall2d_blocks};
pub use wallace::{wallace_armchair, wallace_cut, wallace_preset, wallace_zigzag_closed_form, zigzag_gap, fiber_gap_at};

pub type Vec2 = [f64; 2];

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

fn axpy(s: f64, a: Vec2, b: Vec2) -> Vec2 {
    [s * a[0] + b[0], s * a[1] + b[1]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct BravaisLattice2D {
    a1: Vec2,
    a2: Vec2,
    atoms: Vec<Vec2>,
}

impl BravaisLattice2D {
    pub fn new(a1: Vec2, a2: Vec2, atoms: Vec<Vec2>) -> Result<Self> {
        let det = a1[0] * a2[1] - a1[1] * a2[0];
        if det.abs() <= 1e-12 {
            return Err(Error::InvalidModel(format!("degenerate lattice vectors (det = {det:e})")));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidModel("unit cell needs at least one atom".into()));
        }
        Ok(Self { a1, a2, atoms })
    }

    pub fn a1(&self) -> Vec2 {
        self.a1
    }

    pub fn a2(&self) -> Vec2 {
        self.a2
    }

    pub fn atoms(&self) -> &[Vec2] {
        &self.atoms
    }

    pub fn det(&self) -> f64 {
        self.a1[0] * self.a2[1] - self.a1[1] * self.a2[0]
    }

    /// `|Γ|`.
    pub fn cell_area(&self) -> f64 {
        self.det().abs()
    }

    /// `(a1*, a2*)` with `⟨a_i*, a_j⟩ = 2π δ_ij`.
    pub fn reciprocal(&self) -> (Vec2, Vec2) {
        let f = 2.0 * PI / self.det();
        ([f * self.a2[1], -f * self.a2[0]], [-f * self.a1[1], f * self.a1[0]])
    }

    /// `i·a1 + j·a2`.
    pub fn point(&self, i: i64, j: i64) -> Vec2 {
        axpy(i as f64, self.a1, [j as f64 * self.a2[0], j as f64 * self.a2[1]])
    }

    /// `s1·a1* + s2·a2*`.
    pub fn momentum(&self, s1: f64, s2: f64) -> Vec2 {
        let (b1, b2) = self.reciprocal();
        axpy(s1, b1, [s2 * b2[0], s2 * b2[1]])
    }

    /// Unit normal to the wall, `a1*/‖a1*‖`.
    pub fn wall_normal(&self) -> Vec2 {
        let (b1, _) = self.reciprocal();
        let n = norm(b1);
        [b1[0] / n, b1[1] / n]
    }
}

#[derive(Clone, Debug)]
pub struct TightBinding2D {
    lattice: BravaisLattice2D,
    blocks: BTreeMap<(i64, i64), CMat>,
}

impl TightBinding2D {
    /// Missing partners `h(-R)` are filled with `h(R)†`; given partners
    /// must agree to 1e-12.
    pub fn new(lattice: BravaisLattice2D, blocks: impl IntoIterator<Item = ((i64, i64), CMat)>) -> Result<Self> {
        let m = lattice.atoms.len();
        let mut map: BTreeMap<(i64, i64), CMat> = BTreeMap::new();
        for (r, h) in blocks {
            if h.nrows() != m || h.ncols() != m {
                return Err(Error::InvalidModel(format!("block at R = {r:?} is not {m}x{m}")));
            }
            if map.insert(r, h).is_some() {
                return Err(Error::InvalidModel(format!("duplicate block at R = {r:?}")));
            }
        }
        let keys: Vec<(i64, i64)> = map.keys().copied().collect();
        for r in keys {
            let neg = (-r.0, -r.1);
            let adj = linalg::adjoint(&map[&r]);
            match map.get(&neg) {
                Some(p) if linalg::max_abs_diff(p, &adj) >= 1e-12 => {
                    return Err(Error::InvalidModel(format!("h({neg:?}) differs from h({r:?})†")));
                }
                Some(_) => {}
                None => {
                    map.insert(neg, adj);
                }
            }
        }
        Ok(Self { lattice, blocks: map })
    }

    pub fn lattice(&self) -> &BravaisLattice2D {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.atoms.len()
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((i64, i64), &CMat)> {
        self.blocks.iter().map(|(&r, h)| (r, h))
    }

    pub fn block(&self, i: i64, j: i64) -> Option<&CMat> {
        self.blocks.get(&(i, j))
    }

    /// `H_k = Σ_R h(R) e^{-iR·k}`.
    pub fn fiber(&self, k: Vec2) -> CMat {
        let m = self.dim();
        let mut out = linalg::zeros(m, m);
        for (&(i, j), h) in &self.blocks {
            let phase = C64::cis(-dot(self.lattice.point(i, j), k));
            out += h * faer::Scale(phase);
        }
        out
    }

    /// `h_{k2}(n) = Σ_j h(n·a1 + j·a2) e^{-i k2·(j a2)}` with `k2 = s2·a2*`.
    pub fn reduce_to_1d(&self, s2: f64) -> ConvolutionKernel {
        let m = self.dim();
        let mut acc: BTreeMap<i64, CMat> = BTreeMap::new();
        for (&(i, j), h) in &self.blocks {
            let phase = C64::cis(-2.0 * PI * s2 * j as f64);
            *acc.entry(i).or_insert_with(|| linalg::zeros(m, m)) += h * faer::Scale(phase);
        }
        let mut pairs: Vec<(i64, CMat)> = acc.into_iter().filter(|(n, _)| *n <= 0).collect();
        if pairs.is_empty() {
            return ConvolutionKernel::zero(m);
        }
        pairs.sort_by_key(|(n, _)| *n);
        let h0 = pairs.iter().position(|(n, _)| *n == 0);
        // symmetrize the on-site block against rounding in the phases
        if let Some(p) = h0 {
            let b = &pairs[p].1;
            pairs[p].1 = (b + &linalg::adjoint(b)) * faer::Scale(linalg::c(0.5, 0.0));
        }
        ConvolutionKernel::new(m, pairs).expect("reduced kernel inherits symmetry")
    }
}
