//! Cut operators, dislocated Jacobi operators on finite rings, and the
//! eigenvalue-count identities they satisfy.
//!
//! Block convention throughout: block `(n, n+1)` carries `a`, block
//! `(n+1, n)` carries `a†`, diagonal blocks carry `b`.

use std::io::{self, Write};

use serde::Serialize;

use crate::bands::{band_structure, DEFAULT_K_COUNT};
use crate::edge::assemble_edge;
use crate::error::{Error, Result};
use crate::fmt::num;
use crate::kernel::PeriodicJacobi;
use crate::linalg::{self, CMat};
use crate::walls::SteepWall;

pub const MIN_RING_CELLS: usize = 5;

/// Centered ring labels `{-⌊(ℓ-1)/2⌋, …, ⌊ℓ/2⌋}`.
pub fn ring_sites(ell: usize) -> Vec<i64> {
    let lo = -(((ell as i64) - 1) / 2);
    (0..ell as i64).map(|i| lo + i).collect()
}

fn scale(m: &CMat, s: f64) -> CMat {
    m * faer::Scale(linalg::c(s, 0.0))
}

/// Jacobi operator on consecutive `sites` with the dislocation at cell 0,
/// optionally closed into a ring by a bond from the last to the first site.
fn dislocated_matrix(jacobi: &PeriodicJacobi, sigma: f64, t: f64, sites: &[i64], periodic: bool) -> CMat {
    let d = jacobi.dim();
    let n = sites.len();
    let first = sites[0];
    let idx = |s: i64| (s - first) as usize * d;
    let mut m = linalg::zeros(n * d, n * d);
    let (a, b) = (jacobi.a(), jacobi.b());
    let a_adj = linalg::adjoint(a);
    let bond = |m: &mut CMat, p: i64, q: i64, w: f64| {
        linalg::add_block(m, idx(p), idx(q), &scale(a, w));
        linalg::add_block(m, idx(q), idx(p), &scale(&a_adj, w));
    };
    for &s in sites {
        let onsite = if s == 0 {
            &scale(b, 1.0 - t) + &linalg::scaled_identity(d, t * sigma)
        } else {
            b.clone()
        };
        linalg::add_block(&mut m, idx(s), idx(s), &onsite);
    }
    for w in sites.windows(2) {
        let (p, q) = (w[0], w[1]);
        let weight = if p == -1 || p == 0 { 1.0 - t } else { 1.0 };
        bond(&mut m, p, q, weight);
    }
    if sites.contains(&-1) && sites.contains(&1) {
        bond(&mut m, -1, 1, t);
    }
    if periodic {
        bond(&mut m, sites[n - 1], first, 1.0);
    }
    m
}

#[derive(Clone, Debug)]
pub struct DislocatedRing {
    pub sigma: f64,
    pub t: f64,
    pub ell: usize,
    pub matrix: CMat,
}

pub fn assemble_ring(jacobi: &PeriodicJacobi, sigma: f64, t: f64, ell: usize) -> Result<DislocatedRing> {
    if ell < MIN_RING_CELLS {
        return Err(Error::TooFewCells { ell });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("ring parameter t = {t} outside [0, 1]")));
    }
    let matrix = dislocated_matrix(jacobi, sigma, t, &ring_sites(ell), true);
    Ok(DislocatedRing { sigma, t, ell, matrix })
}

/// Undislocated periodic ring of `ell >= 1` cells.
pub fn plain_ring(jacobi: &PeriodicJacobi, ell: usize) -> CMat {
    let sites: Vec<i64> = (0..ell.max(1) as i64).collect();
    dislocated_matrix(jacobi, 0.0, 0.0, &sites, true)
}

#[derive(Clone, Debug, Serialize)]
pub struct RingReport {
    pub ell: usize,
    pub energy: f64,
    pub sigma: f64,
    pub bands_below: usize,
    pub count_t0: usize,
    pub count_t1: usize,
    pub expected_t0: usize,
    pub expected_t1: usize,
    pub implied_flow: i64,
    pub pass: bool,
}

/// Counts eigenvalues below `E` at `t = 0` and `t = 1`.
pub fn ring_flow_check(
    jacobi: &PeriodicJacobi,
    sigma: Option<f64>,
    energy: f64,
    ell: usize,
    margin: f64,
) -> Result<RingReport> {
    let sigma = sigma.unwrap_or(energy + 4.0 * jacobi.c_ab() + 1.0);
    if !(sigma > energy) {
        return Err(Error::InvalidParameter(format!("Σ = {sigma} must exceed E = {energy}")));
    }
    let bands = band_structure(&jacobi.kernel(), DEFAULT_K_COUNT)?;
    let nb = bands.count_bands_below(energy, margin)?;
    let count = |t: f64| -> Result<usize> {
        let r = assemble_ring(jacobi, sigma, t, ell)?;
        Ok(linalg::count_below(&linalg::eigvalsh(&r.matrix)?, energy))
    };
    let (c0, c1) = (count(0.0)?, count(1.0)?);
    let (e0, e1) = (ell * nb, (ell - 1) * nb);
    Ok(RingReport {
        ell,
        energy,
        sigma,
        bands_below: nb,
        count_t0: c0,
        count_t1: c1,
        expected_t0: e0,
        expected_t1: e1,
        implied_flow: c1 as i64 - c0 as i64,
        pass: c0 == e0 && c1 == e1,
    })
}

/// `K(t)` on the box of cells `[-L, L]`: bond `(-2,-1)` weighted `1-t`,
/// bond `(-1,0)` weighted 1, bond `(0,1)` weighted `t`.
pub fn cut_operator(jacobi: &PeriodicJacobi, t: f64, half_width: usize) -> Result<CMat> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("cut parameter t = {t} outside [0, 1]")));
    }
    if half_width < 2 {
        return Err(Error::BoxTooSmall { half_width, required: 2 });
    }
    let d = jacobi.dim();
    let l = half_width as i64;
    let size = (2 * half_width + 1) * d;
    let mut k = linalg::zeros(size, size);
    let a_adj = linalg::adjoint(jacobi.a());
    for (p, w) in [(-2i64, 1.0 - t), (-1, 1.0), (0, t)] {
        let (i, j) = ((p + l) as usize * d, (p + 1 + l) as usize * d);
        linalg::add_block(&mut k, i, j, &scale(jacobi.a(), w));
        linalg::add_block(&mut k, j, i, &scale(&a_adj, w));
    }
    Ok(k)
}

/// `H^Σ(t) - K(t)` truncated to `[-L, L]`.
pub fn cut_hamiltonian(jacobi: &PeriodicJacobi, steep: &SteepWall, t: f64, half_width: usize) -> Result<CMat> {
    let h = assemble_edge(&jacobi.kernel(), &steep.profile, t, half_width)?.into_matrix();
    Ok(h - cut_operator(jacobi, t, half_width)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct LeftBlockReport {
    pub energy: f64,
    pub bound: f64,
    pub tol: f64,
    pub min_eigenvalue: f64,
    pub per_t: Vec<(f64, f64)>,
    pub pass: bool,
}

/// Minimum eigenvalue of the `n < 0` block of `H^Σ(t) - K(t)` on each `t`.
pub fn left_block_gap_check(
    jacobi: &PeriodicJacobi,
    steep: &SteepWall,
    t_grid: &[f64],
    half_width: usize,
    tol: f64,
) -> Result<LeftBlockReport> {
    let d = jacobi.dim();
    let rows = half_width * d;
    let mut per_t = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let h = cut_hamiltonian(jacobi, steep, t, half_width)?;
        let left = linalg::block(&h, 0, 0, rows, rows);
        let lo = linalg::eigvalsh(&left)?.first().copied().unwrap_or(f64::INFINITY);
        per_t.push((t, lo));
    }
    let min_eigenvalue = per_t.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let bound = steep.energy + 1.0;
    Ok(LeftBlockReport {
        energy: steep.energy,
        bound,
        tol,
        min_eigenvalue,
        per_t,
        pass: min_eigenvalue >= bound - tol,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvergenceRow {
    pub ell: usize,
    pub t: f64,
    pub count_below_e: usize,
    pub count_in_window: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub window: (f64, f64),
    pub energy: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Window count of the open-chain dislocated operator on `[-4ℓ_max, 4ℓ_max]`.
    pub reference_count: usize,
    /// Smallest listed `ℓ` from which every ring count equals the reference.
    pub stabilized_from: Option<usize>,
}

impl ConvergenceTable {
    /// CSV with header `ell,t,count_below_E,count_in_window`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "ell,t,count_below_E,count_in_window")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.ell, num(r.t), r.count_below_e, r.count_in_window)?;
        }
        Ok(())
    }
}

pub fn projector_rank_convergence(
    jacobi: &PeriodicJacobi,
    sigma: f64,
    energy: f64,
    window: (f64, f64),
    t: f64,
    ells: &[usize],
) -> Result<ConvergenceTable> {
    if ells.is_empty() {
        return Err(Error::InvalidParameter("need at least one ring size".into()));
    }
    let mut rows = Vec::with_capacity(ells.len());
    for &ell in ells {
        let ev = linalg::eigvalsh(&assemble_ring(jacobi, sigma, t, ell)?.matrix)?;
        rows.push(ConvergenceRow {
            ell,
            t,
            count_below_e: linalg::count_below(&ev, energy),
            count_in_window: linalg::count_open(&ev, window.0, window.1),
        });
    }
    let half = 4 * *ells.iter().max().unwrap_or(&MIN_RING_CELLS) as i64;
    let sites: Vec<i64> = (-half..=half).collect();
    let reference = linalg::eigvalsh(&dislocated_matrix(jacobi, sigma, t, &sites, false))?;
    let reference_count = linalg::count_open(&reference, window.0, window.1);
    let stabilized_from = (0..rows.len())
        .find(|&i| rows[i..].iter().all(|r| r.count_in_window == reference_count))
        .map(|i| rows[i].ell);
    Ok(ConvergenceTable { window, energy, rows, reference_count, stabilized_from })
}
