use std::f64::consts::PI;

use super::cut::{supercell_cut, CommensurateCut, Ordering};
use super::{BravaisLattice2D, TightBinding2D};
use crate::bands::band_structure;
use crate::error::Result;
use crate::kernel::PeriodicJacobi;
use crate::linalg::{c, C64};

/// Honeycomb lattice with unit hopping and unit nearest-neighbour distance.
pub fn wallace_preset() -> TightBinding2D {
    let h3 = 3f64.sqrt() / 2.0;
    let a1 = [0.5, -h3];
    let a2 = [0.5, h3];
    let x1 = [(a1[0] + 2.0 * a2[0]) / 3.0, (a1[1] + 2.0 * a2[1]) / 3.0];
    let x2 = [(2.0 * a1[0] + a2[0]) / 3.0, (2.0 * a1[1] + a2[1]) / 3.0];
    let lattice = BravaisLattice2D::new(a1, a2, vec![x1, x2]).expect("honeycomb lattice is valid");
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    let h0 = faer::mat![[z, o], [o, z]];
    let up = faer::mat![[z, o], [z, z]];
    TightBinding2D::new(lattice, [((0, 0), h0), ((1, 0), up.clone()), ((0, -1), up)]).expect("Wallace blocks are Hermitian")
}

/// SSH chain equal to the reduced zigzag fiber at `k2 = s·a2*`.
pub fn wallace_zigzag_closed_form(s: f64) -> PeriodicJacobi {
    PeriodicJacobi::ssh(c(1.0, 0.0) + C64::cis(2.0 * PI * s), c(1.0, 0.0))
}

/// Width of the zigzag fiber's gap at zero, `2·|r − 1|` with `r = 2|cos(πs)|`.
pub fn zigzag_gap(s: f64) -> f64 {
    2.0 * (2.0 * (PI * s).cos().abs() - 1.0).abs()
}

pub fn wallace_armchair() -> Result<(CommensurateCut, TightBinding2D)> {
    supercell_cut(&wallace_preset(), -1, 1, Ordering::SiteMajor)
}

/// Cut with sublattice-first orbital order.
pub fn wallace_cut(n: i64, m: i64) -> Result<(CommensurateCut, TightBinding2D)> {
    supercell_cut(&wallace_preset(), n, m, Ordering::SublatticeFirst)
}

/// Width of the band-free interval of the reduced fiber at `s` containing
/// `energy`; zero inside a band hull, infinite outside all bands.
pub fn fiber_gap_at(tb: &TightBinding2D, s: f64, energy: f64, k_count: usize) -> Result<f64> {
    let bs = band_structure(&tb.reduce_to_1d(s), k_count)?;
    let mut below = f64::NEG_INFINITY;
    let mut above = f64::INFINITY;
    for h in bs.hulls() {
        if h.lo <= energy && energy <= h.hi {
            return Ok(0.0);
        }
        if h.hi < energy {
            below = below.max(h.hi);
        } else {
            above = above.min(h.lo);
        }
    }
    Ok(above - below)
}
