//! Bloch bands on a uniform grid of `(-π, π]` and the gaps between them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::ConvolutionKernel;
use crate::linalg;

pub const DEFAULT_K_COUNT: usize = 1024;

/// Bracket width (in k) at which golden-section refinement of a band
/// extremum stops.
const REFINE_TOL: f64 = 1e-9;
/// Grid-local extrema refined per band edge, best first.
const MAX_REFINED_CANDIDATES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    pub bands_below: usize,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapCatalog {
    pub bands: Vec<Interval>,
    /// Open gaps between consecutive band hulls; the unbounded regions below
    /// and above the spectrum are not listed.
    pub gaps: Vec<Gap>,
    pub hull_error: f64,
}

impl GapCatalog {
    /// Region of the real line free of bands that contains `energy`, as an
    /// open interval possibly unbounded on one side.
    pub fn region_containing(&self, energy: f64) -> Option<Gap> {
        let first = self.bands.first()?;
        let last = self.bands.last()?;
        if energy < first.lo {
            return Some(Gap { lo: f64::NEG_INFINITY, hi: first.lo, bands_below: 0 });
        }
        if energy > last.hi {
            return Some(Gap { lo: last.hi, hi: f64::INFINITY, bands_below: self.bands.len() });
        }
        self.gaps.iter().copied().find(|g| g.lo < energy && energy < g.hi)
    }
}

#[derive(Clone, Debug)]
pub struct BandStructure {
    k_grid: Vec<f64>,
    curves: Vec<Vec<f64>>,
    hulls: Vec<Interval>,
    hull_error: f64,
}

/// Ascending grid `-π + 2π(j+1)/k_count`, `j = 0..k_count`, ending at `π`.
pub fn k_grid(k_count: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..k_count)
        .map(|j| -PI + 2.0 * PI * (j + 1) as f64 / k_count as f64)
        .collect()
}

pub fn band_structure(kernel: &ConvolutionKernel, k_count: usize) -> Result<BandStructure> {
    if k_count < 2 {
        return Err(Error::InvalidParameter(format!("k_count must be >= 2, got {k_count}")));
    }
    let ks = k_grid(k_count);
    let curves: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| linalg::eigvalsh(&kernel.fiber(k)))
        .collect::<Result<_>>()?;
    let lip = kernel.k_lipschitz();
    let dk = ks[1] - ks[0];
    let band_at = |j: usize, k: f64| -> Result<f64> { Ok(linalg::eigvalsh(&kernel.fiber(k))?[j]) };
    let hulls = (0..kernel.dim())
        .map(|j| {
            let col: Vec<f64> = curves.iter().map(|c| c[j]).collect();
            let lo = refine_extremum(&ks, &col, dk, lip, false, |k| band_at(j, k))?;
            let hi = refine_extremum(&ks, &col, dk, lip, true, |k| band_at(j, k))?;
            Ok(Interval { lo, hi })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandStructure {
        k_grid: ks,
        curves,
        hulls,
        hull_error: lip * REFINE_TOL + 1e-12,
    })
}

/// Extremum of one band: the grid extremum improved by golden-section search
/// around each promising grid-local extremum. The grid is periodic.
fn refine_extremum(
    ks: &[f64],
    col: &[f64],
    dk: f64,
    lip: f64,
    maximize: bool,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let sgn = if maximize { 1.0 } else { -1.0 };
    let n = col.len();
    let g: Vec<f64> = col.iter().map(|v| sgn * v).collect();
    let best = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = lip * dk;
    let mut cands: Vec<usize> = (0..n)
        .filter(|&i| {
            let (l, r) = (g[(i + n - 1) % n], g[(i + 1) % n]);
            g[i] >= l && g[i] >= r && g[i] >= best - slack
        })
        .collect();
    cands.sort_by(|&x, &y| g[y].total_cmp(&g[x]).then(x.cmp(&y)));
    cands.truncate(MAX_REFINED_CANDIDATES);
    let mut out = best;
    if slack == 0.0 {
        return Ok(sgn * out);
    }
    for i in cands {
        let v = golden_max(ks[i] - dk, ks[i] + dk, |k| Ok(sgn * f(k)?))?;
        out = out.max(v);
    }
    Ok(sgn * out)
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = f1.max(f2);
    while b - a > REFINE_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

impl BandStructure {
    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    /// `curves()[i]` holds the ascending eigenvalues at `k_grid()[i]`.
    pub fn curves(&self) -> &[Vec<f64>] {
        &self.curves
    }

    /// Band hulls `[min_k λ_j, max_k λ_j]`.
    pub fn hulls(&self) -> &[Interval] {
        &self.hulls
    }

    pub fn hull_error(&self) -> f64 {
        self.hull_error
    }

    /// `lo_{j+1} - hi_j`; negative when consecutive hulls overlap.
    pub fn hull_spacing(&self, j: usize) -> f64 {
        self.hulls[j + 1].lo - self.hulls[j].hi
    }

    /// Gaps whose width exceeds ten times the hull error.
    pub fn gap_catalog(&self) -> GapCatalog {
        let gaps = (0..self.hulls.len().saturating_sub(1))
            .filter(|&j| self.hull_spacing(j) > 10.0 * self.hull_error)
            .map(|j| Gap { lo: self.hulls[j].hi, hi: self.hulls[j + 1].lo, bands_below: j + 1 })
            .collect();
        GapCatalog { bands: self.hulls.clone(), gaps, hull_error: self.hull_error }
    }

    /// Number of bands below `energy`, which must sit in a gap at distance at
    /// least `margin` from every hull.
    pub fn count_bands_below(&self, energy: f64, margin: f64) -> Result<usize> {
        for h in &self.hulls {
            if energy >= h.lo - margin && energy <= h.hi + margin {
                return Err(Error::EInBand { energy, lo: h.lo, hi: h.hi, margin });
            }
        }
        match self.gap_catalog().region_containing(energy) {
            Some(g) => Ok(g.bands_below),
            None => {
                let j = self.hulls.iter().rposition(|h| h.hi < energy).unwrap_or(0);
                let (lo, hi) = (self.hulls[j].hi, self.hulls.get(j + 1).map_or(self.hulls[j].hi, |h| h.lo));
                Err(Error::EInBand { energy, lo, hi, margin })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::PeriodicJacobi;

    #[test]
    fn grid_is_ascending_and_ends_at_pi() {
        let g = k_grid(8);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[7] - std::f64::consts::PI).abs() < 1e-15);
        assert!(g[0] > -std::f64::consts::PI);
    }

    #[test]
    fn ssh_hulls_match_closed_form() {
        let bs = band_structure(&PeriodicJacobi::ssh_real(1.5, 0.5).kernel(), 2048).unwrap();
        let h = bs.hulls();
        for (got, want) in h.iter().zip([(-2.0, -1.0), (1.0, 2.0)]) {
            assert!((got.lo - want.0).abs() < 1e-6 && (got.hi - want.1).abs() < 1e-6);
        }
        let cat = bs.gap_catalog();
        assert_eq!(cat.gaps.len(), 1);
        assert_eq!(cat.gaps[0].bands_below, 1);
    }

    #[test]
    fn refinement_finds_off_grid_extremum() {
        // band maximum of cos(k - 0.01) lies between grid points
        let h1 = faer::mat![[linalg::c(0.5, 0.0) * faer::c64::cis(0.01)]];
        let k = ConvolutionKernel::new(1, [(1, h1)]).unwrap();
        let bs = band_structure(&k, 16).unwrap();
        assert!((bs.hulls()[0].hi - 1.0).abs() < 1e-12);
        assert!((bs.hulls()[0].lo + 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_band_for_constant_kernel() {
        let bs = band_structure(&ConvolutionKernel::constant(1, 0.7), 64).unwrap();
        assert!(bs.curves().iter().all(|c| c == &vec![0.7]));
        assert_eq!(bs.hulls()[0], Interval { lo: 0.7, hi: 0.7 });
    }

    #[test]
    fn touching_bands_have_no_gap() {
        let bs = band_structure(&PeriodicJacobi::ssh_real(1.0, 1.0).kernel(), 1024).unwrap();
        assert!(bs.gap_catalog().gaps.is_empty());
        assert!(matches!(bs.count_bands_below(0.0, 1e-9), Err(Error::EInBand { .. })));
    }

    #[test]
    fn count_bands_below_ssh() {
        let bs = band_structure(&PeriodicJacobi::ssh_real(1.5, 0.5).kernel(), 1024).unwrap();
        assert_eq!(bs.count_bands_below(0.0, 1e-6).unwrap(), 1);
        assert_eq!(bs.count_bands_below(-5.0, 1e-6).unwrap(), 0);
        assert_eq!(bs.count_bands_below(2.5, 1e-6).unwrap(), 2);
        assert!(matches!(bs.count_bands_below(1.5, 1e-6), Err(Error::EInBand { .. })));
        assert!(matches!(bs.count_bands_below(0.99999999, 1e-6), Err(Error::EInBand { .. })));
    }

    #[test]
    fn k_count_below_two_is_rejected() {
        assert!(band_structure(&ConvolutionKernel::zero(1), 1).is_err());
    }
}
