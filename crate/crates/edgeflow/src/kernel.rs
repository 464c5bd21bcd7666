//! One-dimensional periodic tight-binding operators.
//!
//! A [`ConvolutionKernel`] stores finitely many hopping blocks `h(n)` acting as
//! `(HΨ)_n = Σ_m h(m) Ψ_{n-m}`. A [`PeriodicJacobi`] is the nearest-neighbour
//! special case with `h(-1) = a`, `h(0) = b`, `h(1) = a†`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ConvolutionKernel {
    dim: usize,
    blocks: BTreeMap<i64, CMat>,
}

impl ConvolutionKernel {
    /// Builds a kernel from `(n, h(n))` pairs.
    ///
    /// A block whose partner `h(-n)` is absent gets the partner `h(n)†`.
    /// Partners that are both given must agree to 1e-12.
    pub fn new(dim: usize, blocks: impl IntoIterator<Item = (i64, CMat)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("block dimension must be positive".into()));
        }
        let mut map: BTreeMap<i64, CMat> = BTreeMap::new();
        for (n, h) in blocks {
            if h.nrows() != dim || h.ncols() != dim {
                return Err(Error::InvalidModel(format!(
                    "block at n = {n} is {}x{}, expected {dim}x{dim}",
                    h.nrows(),
                    h.ncols()
                )));
            }
            if map.insert(n, h).is_some() {
                return Err(Error::InvalidModel(format!("duplicate block at n = {n}")));
            }
        }
        let keys: Vec<i64> = map.keys().copied().collect();
        for n in keys {
            let h = map[&n].clone();
            match map.get(&-n) {
                Some(partner) => {
                    let dev = linalg::max_abs_diff(partner, &linalg::adjoint(&h));
                    if dev >= SYMMETRY_TOL {
                        return Err(Error::InvalidModel(format!(
                            "h({}) differs from h({n})† by {dev:e}",
                            -n
                        )));
                    }
                }
                None => {
                    map.insert(-n, linalg::adjoint(&h));
                }
            }
        }
        Ok(Self { dim, blocks: map })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, blocks: BTreeMap::new() }
    }

    /// Scalar multiple of the identity: a single flat band at `value`.
    pub fn constant(dim: usize, value: f64) -> Self {
        let mut blocks = BTreeMap::new();
        blocks.insert(0, linalg::scaled_identity(dim, value));
        Self { dim, blocks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, n: i64) -> Option<&CMat> {
        self.blocks.get(&n)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i64, &CMat)> {
        self.blocks.iter().map(|(&n, h)| (n, h))
    }

    /// Largest `|n|` carrying a nonzero block.
    pub fn range(&self) -> usize {
        self.blocks
            .iter()
            .filter(|(_, h)| linalg::max_abs(h) > 0.0)
            .map(|(n, _)| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Bloch fiber `H_k = Σ_n h(n) e^{-ikn}`.
    pub fn fiber(&self, k: f64) -> CMat {
        let mut out = linalg::zeros(self.dim, self.dim);
        for (&n, h) in &self.blocks {
            let phase = C64::cis(-k * n as f64);
            out += h * faer::Scale(phase);
        }
        out
    }

    /// `Σ_n |n|·‖h(n)‖`, a Lipschitz constant of every band `k ↦ λ_j(k)`.
    pub fn k_lipschitz(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(&n, h)| n.unsigned_abs() as f64 * linalg::op_norm(h))
            .sum()
    }

    /// Keeps the blocks with `|n| <= ell`.
    pub fn truncate(&self, ell: usize) -> Truncation {
        let mut kept = BTreeMap::new();
        let mut discarded = 0.0;
        for (&n, h) in &self.blocks {
            if n.unsigned_abs() as usize <= ell {
                kept.insert(n, h.clone());
            } else {
                discarded += linalg::op_norm(h);
            }
        }
        Truncation {
            kernel: Self { dim: self.dim, blocks: kept },
            discarded_mass: discarded,
        }
    }

    /// Regroups `ell` consecutive cells into one, giving a Jacobi operator
    /// with `ell·N`-dimensional blocks.
    pub fn supercell(&self, ell: usize) -> Result<PeriodicJacobi> {
        if ell == 0 {
            return Err(Error::InvalidParameter("supercell size must be positive".into()));
        }
        if let Some((&n, _)) = self
            .blocks
            .iter()
            .find(|(n, h)| n.unsigned_abs() as usize > ell && linalg::max_abs(h) > 0.0)
        {
            return Err(Error::RangeExceeded { ell, n });
        }
        let d = self.dim;
        let big = ell * d;
        let mut b = linalg::zeros(big, big);
        let mut a = linalg::zeros(big, big);
        for i in 0..ell {
            for j in 0..ell {
                let (ii, jj) = (i as i64, j as i64);
                if let Some(h) = self.blocks.get(&(ii - jj)) {
                    linalg::add_block(&mut b, i * d, j * d, h);
                }
                if let Some(h) = self.blocks.get(&(ii - jj - ell as i64)) {
                    linalg::add_block(&mut a, i * d, j * d, h);
                }
            }
        }
        PeriodicJacobi::new(b, a)
    }

    /// The Jacobi form, when the range is at most one.
    pub fn to_jacobi(&self) -> Option<PeriodicJacobi> {
        (self.range() <= 1).then(|| {
            let z = linalg::zeros(self.dim, self.dim);
            let b = self.blocks.get(&0).cloned().unwrap_or_else(|| z.clone());
            let a = self.blocks.get(&-1).cloned().unwrap_or(z);
            PeriodicJacobi { b, a }
        })
    }
}

#[derive(Clone, Debug)]
pub struct Truncation {
    pub kernel: ConvolutionKernel,
    /// `Σ_{|n|>ℓ} ‖h(n)‖` over the dropped blocks.
    pub discarded_mass: f64,
}

#[derive(Clone, Debug)]
pub struct PeriodicJacobi {
    b: CMat,
    a: CMat,
}

impl PeriodicJacobi {
    pub fn new(b: CMat, a: CMat) -> Result<Self> {
        let n = b.nrows();
        if n == 0 || b.ncols() != n || a.nrows() != n || a.ncols() != n {
            return Err(Error::InvalidModel("Jacobi blocks must be square and equal-sized".into()));
        }
        let dev = linalg::hermiticity_defect(&b);
        if dev >= SYMMETRY_TOL {
            return Err(Error::InvalidModel(format!("diagonal block not Hermitian ({dev:e})")));
        }
        Ok(Self { b, a })
    }

    /// Two-site SSH cell: intra-cell hopping `j1`, inter-cell hopping `j2`.
    pub fn ssh(j1: C64, j2: C64) -> Self {
        let b = faer::mat![[C64::ZERO, j1], [j1.conj(), C64::ZERO]];
        let a = faer::mat![[C64::ZERO, C64::ZERO], [j2, C64::ZERO]];
        Self { b, a }
    }

    pub fn ssh_real(j1: f64, j2: f64) -> Self {
        Self::ssh(c(j1, 0.0), c(j2, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    /// `C_{a,b} = max(‖a‖, ‖b‖)`.
    pub fn c_ab(&self) -> f64 {
        linalg::op_norm(&self.a).max(linalg::op_norm(&self.b))
    }

    pub fn kernel(&self) -> ConvolutionKernel {
        let mut blocks = BTreeMap::new();
        blocks.insert(0, self.b.clone());
        blocks.insert(-1, self.a.clone());
        blocks.insert(1, linalg::adjoint(&self.a));
        ConvolutionKernel { dim: self.dim(), blocks }
    }

    /// `a e^{ik} + b + a† e^{-ik}`.
    pub fn fiber(&self, k: f64) -> CMat {
        let mut out = self.b.clone();
        out += &self.a * faer::Scale(C64::cis(k));
        out += self.a.adjoint() * faer::Scale(C64::cis(-k));
        out
    }
}
