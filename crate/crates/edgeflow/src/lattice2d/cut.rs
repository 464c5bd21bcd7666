use std::collections::BTreeMap;

use serde::Serialize;

use super::{norm, BravaisLattice2D, TightBinding2D, Vec2};
use crate::bands::band_structure;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Orbital order inside the enlarged cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ordering {
    /// `index = site·M + atom`.
    SiteMajor,
    /// `index = atom·|nm| + site`.
    SublatticeFirst,
}

/// Cut along `ã2 = n·a1 + m·a2` with `ã1 = n·a1`.
#[derive(Clone, Debug)]
pub struct CommensurateCut {
    pub n: i64,
    pub m: i64,
    pub ordering: Ordering,
    /// Coset labels `y = (i, j)`, `0 ≤ i < |n|`, `0 ≤ j < |m|`; orbitals of
    /// label `y` in cell `R̃` sit at `R̃ − y + x_p`.
    pub sites: Vec<(i64, i64)>,
    pub lattice: BravaisLattice2D,
}

impl CommensurateCut {
    pub fn cells(&self) -> usize {
        self.sites.len()
    }

    /// Orbital index of `atom` on coset site `site`.
    pub fn orbital(&self, site: usize, atom: usize, atoms: usize) -> usize {
        match self.ordering {
            Ordering::SiteMajor => site * atoms + atom,
            Ordering::SublatticeFirst => atom * self.sites.len() + site,
        }
    }

    /// `ã1* = a1*/n − a2*/m`, `ã2* = a2*/m` in terms of the original lattice.
    pub fn reciprocal_formula(&self, original: &BravaisLattice2D) -> (Vec2, Vec2) {
        let (b1, b2) = original.reciprocal();
        let (n, m) = (self.n as f64, self.m as f64);
        ([b1[0] / n - b2[0] / m, b1[1] / n - b2[1] / m], [b2[0] / m, b2[1] / m])
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Re-expresses `tb` over the lattice spanned by `ã1 = n·a1`, `ã2 = n·a1 + m·a2`.
pub fn supercell_cut(tb: &TightBinding2D, n: i64, m: i64, ordering: Ordering) -> Result<(CommensurateCut, TightBinding2D)> {
    if n == 0 || m == 0 {
        return Err(Error::ZeroIndex { n, m });
    }
    if gcd(n, m) != 1 {
        return Err(Error::NotCoprime { n, m });
    }
    let lat = tb.lattice();
    let atoms = lat.atoms().len();
    let sites: Vec<(i64, i64)> = (0..n.abs()).flat_map(|i| (0..m.abs()).map(move |j| (i, j))).collect();
    let l = sites.len();
    let a1t = lat.point(n, 0);
    let a2t = lat.point(n, m);

    let mut cut = CommensurateCut {
        n,
        m,
        ordering,
        sites: sites.clone(),
        lattice: BravaisLattice2D::new(a1t, a2t, vec![[0.0, 0.0]])?,
    };
    let mut positions = vec![[0.0, 0.0]; l * atoms];
    for (s, &(i, j)) in sites.iter().enumerate() {
        let y = lat.point(i, j);
        for (p, x) in lat.atoms().iter().enumerate() {
            positions[cut.orbital(s, p, atoms)] = [x[0] - y[0], x[1] - y[1]];
        }
    }
    cut.lattice = BravaisLattice2D::new(a1t, a2t, positions)?;

    let dim = l * atoms;
    let mut out: BTreeMap<(i64, i64), CMat> = BTreeMap::new();
    for ((r1, r2), h) in tb.blocks() {
        for (si, &(i1, i2)) in sites.iter().enumerate() {
            for (sj, &(j1, j2)) in sites.iter().enumerate() {
                let (x, y) = (r1 + i1 - j1, r2 + i2 - j2);
                if x.rem_euclid(n) != 0 || y.rem_euclid(m) != 0 {
                    continue;
                }
                let q = y / m;
                let p = x / n - q;
                let blk = out.entry((p, q)).or_insert_with(|| linalg::zeros(dim, dim));
                for a in 0..atoms {
                    for b in 0..atoms {
                        let (ra, cb) = (cut.orbital(si, a, atoms), cut.orbital(sj, b, atoms));
                        blk[(ra, cb)] += h[(a, b)];
                    }
                }
            }
        }
    }
    out.retain(|_, h| linalg::max_abs(h) > 0.0);
    let lattice = cut.lattice.clone();
    Ok((cut, TightBinding2D::new(lattice, out)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldReport {
    pub max_deviation: f64,
    pub pass: bool,
}

/// Compares `spec(H̃_k)` with `⋃_K spec(H_{k+K})` over `K ∈ 𝕃̃*/𝕃*`.
pub fn folded_fiber_check(original: &TightBinding2D, cut: &CommensurateCut, folded: &TightBinding2D, k: Vec2) -> Result<FoldReport> {
    let mut lhs = linalg::eigvalsh(&folded.fiber(k))?;
    let mut rhs = Vec::with_capacity(lhs.len());
    let lat = original.lattice();
    for i in 0..cut.n.abs() {
        for j in 0..cut.m.abs() {
            let kk = lat.momentum(i as f64 / cut.n.abs() as f64, j as f64 / cut.m.abs() as f64);
            rhs.extend(linalg::eigvalsh(&original.fiber([k[0] + kk[0], k[1] + kk[1]]))?);
        }
    }
    lhs.sort_by(f64::total_cmp);
    rhs.sort_by(f64::total_cmp);
    if lhs.len() != rhs.len() {
        return Err(Error::InvalidModel("folded dimension does not match cut".into()));
    }
    let max_deviation = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(FoldReport { max_deviation, pass: max_deviation <= 1e-9 })
}

#[derive(Clone, Debug, Serialize)]
pub struct MirrorReport {
    pub length_a: f64,
    pub length_b: f64,
    pub max_hull_deviation: f64,
    pub pass: bool,
}

/// Two cuts related by a lattice mirror: equal `‖ã2‖` and equal band hulls
/// of the reduced fibers at every sampled `s`.
pub fn mirror_equivalence(a: &TightBinding2D, b: &TightBinding2D, s_grid: &[f64], k_count: usize) -> Result<MirrorReport> {
    let length_a = norm(a.lattice().a2());
    let length_b = norm(b.lattice().a2());
    let mut dev: f64 = 0.0;
    for &s in s_grid {
        let ha = band_structure(&a.reduce_to_1d(s), k_count)?;
        let hb = band_structure(&b.reduce_to_1d(s), k_count)?;
        if ha.hulls().len() != hb.hulls().len() {
            return Err(Error::InvalidModel("mirror partners differ in band count".into()));
        }
        for (x, y) in ha.hulls().iter().zip(hb.hulls()) {
            dev = dev.max((x.lo - y.lo).abs()).max((x.hi - y.hi).abs());
        }
    }
    Ok(MirrorReport {
        length_a,
        length_b,
        max_hull_deviation: dev,
        pass: (length_a - length_b).abs() < 1e-12 && dev < 1e-7,
    })
}
