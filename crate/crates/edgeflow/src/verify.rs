//! Verifiers comparing edge-family spectral flows and eigenvalue densities
//! with the bulk counting function.

use serde::Serialize;

use crate::bands::{band_structure, Gap, DEFAULT_K_COUNT};
use crate::edge::{assemble_edge, uniform_grid, EdgeFamily};
use crate::error::{Error, Result};
use crate::kernel::ConvolutionKernel;
use crate::linalg;
use crate::specflow::{
    flow_counting, flow_partition_samples, CountingOptions, Crossing, PartitionOptions, SpectrumSamples,
};
use crate::walls::SoftWallProfile;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub k_count: usize,
    /// Required distance between `E` and every band hull.
    pub band_margin: f64,
    pub counting: CountingOptions,
    pub partition: PartitionOptions,
    /// Partition widths stay below this fraction of the distance to the gap edges.
    pub width_fraction: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            k_count: DEFAULT_K_COUNT,
            band_margin: 1e-6,
            counting: CountingOptions::default(),
            partition: PartitionOptions::default(),
            width_fraction: 0.45,
        }
    }
}

/// Bulk region containing `energy` and `𝒩(E)`.
pub fn bulk_region(kernel: &ConvolutionKernel, energy: f64, opts: &VerifyOptions) -> Result<Gap> {
    let bands = band_structure(kernel, opts.k_count)?;
    let n = bands.count_bands_below(energy, opts.band_margin)?;
    let gap = bands.gap_catalog().region_containing(energy).ok_or(Error::EInBand {
        energy,
        lo: f64::NAN,
        hi: f64::NAN,
        margin: opts.band_margin,
    })?;
    debug_assert_eq!(gap.bands_below, n);
    Ok(gap)
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "N_of_E")]
    pub n_of_e: usize,
    pub flow_counting: i64,
    pub flow_partition: i64,
    pub pass: bool,
    pub crossings: Vec<Crossing>,
    pub energy_used: f64,
    pub nudged: bool,
    pub gap: (f64, f64),
    pub half_width: usize,
    pub t_points: usize,
    pub partition_segments: usize,
}

/// Flow of `t ↦ H + W(t)` over `[0, 1]` by both methods against `−𝒩(E)`.
pub fn verify_theorem_flow(
    kernel: &ConvolutionKernel,
    wall: &SoftWallProfile,
    energy: f64,
    half_width: usize,
    t_points: usize,
    opts: &VerifyOptions,
) -> Result<FlowReport> {
    if t_points < 2 {
        return Err(Error::InvalidParameter("t_points must be >= 2".into()));
    }
    let family = EdgeFamily::new(kernel.clone(), wall.clone(), half_width)?;
    let samples = SpectrumSamples::sample(&family, &uniform_grid(0.0, 1.0, t_points))?;
    verify_flow_on_samples(&family, &samples, energy, opts)
}

/// As [`verify_theorem_flow`], reusing samples of `family` over `[0, 1]`.
pub fn verify_flow_on_samples(
    family: &EdgeFamily,
    samples: &SpectrumSamples,
    energy: f64,
    opts: &VerifyOptions,
) -> Result<FlowReport> {
    let gap = bulk_region(&family.kernel, energy, opts)?;
    let counting = flow_counting(samples, energy, &CountingOptions { gap: Some((gap.lo, gap.hi)), ..opts.counting })?;
    let e = counting.energy;
    let edge_room = (e - gap.lo).min(gap.hi - e);
    let popts = PartitionOptions {
        max_width: opts.partition.max_width.min(opts.width_fraction * edge_room),
        ..opts.partition
    };
    let (partition, plan) = flow_partition_samples(samples, e, &popts, Some(family))?;
    let target = -(gap.bands_below as i64);
    Ok(FlowReport {
        energy,
        n_of_e: gap.bands_below,
        flow_counting: counting.flow,
        flow_partition: partition.flow,
        pass: counting.flow == target && partition.flow == target,
        crossings: counting.crossings,
        energy_used: e,
        nudged: counting.nudged,
        gap: (gap.lo, gap.hi),
        half_width: family.half_width,
        t_points: samples.len(),
        partition_segments: plan.widths.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    #[serde(rename = "E")]
    pub energy: f64,
    pub t0: f64,
    pub gap: (f64, f64),
    pub interval_length: f64,
    pub required: usize,
    pub vacuous: bool,
    pub intervals_checked: usize,
    pub min_count: usize,
    pub worst_lambda: f64,
    pub pass: bool,
}

/// Interval `(λ, λ + ν_eff/cells]` must hold `𝒩(E)/cells` eigenvalues of the
/// truncation at `t0`. `cells > 1` describes a supercell of a finer lattice.
pub fn verify_density(
    kernel: &ConvolutionKernel,
    wall: &SoftWallProfile,
    energy: f64,
    t0: f64,
    half_width: usize,
    cells: usize,
    opts: &VerifyOptions,
) -> Result<DensityReport> {
    if cells == 0 {
        return Err(Error::InvalidParameter("cells must be positive".into()));
    }
    let gap = bulk_region(kernel, energy, opts)?;
    if !(gap.lo.is_finite() && gap.hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("E = {energy} is not in a bounded gap")));
    }
    if gap.bands_below % cells != 0 {
        return Err(Error::InvalidModel(format!("{} bands below E do not split over {cells} cells", gap.bands_below)));
    }
    let required = gap.bands_below / cells;
    let interval_length = wall.lipschitz() / cells as f64;
    let vacuous = interval_length >= gap.width();
    let mut report = DensityReport {
        energy,
        t0,
        gap: (gap.lo, gap.hi),
        interval_length,
        required,
        vacuous,
        intervals_checked: 0,
        min_count: usize::MAX,
        worst_lambda: f64::NAN,
        pass: vacuous,
    };
    if vacuous {
        return Ok(report);
    }
    let vals = linalg::eigvalsh(assemble_edge(kernel, wall, t0, half_width)?.matrix())?;
    let top = gap.hi - interval_length;
    // the count of (λ, λ+ν] only drops just as λ passes an eigenvalue
    let lambdas = std::iter::once(gap.lo).chain(vals.iter().copied().filter(|&v| gap.lo < v && v <= top));
    for lam in lambdas {
        let n = vals.partition_point(|&v| v <= lam + interval_length) - vals.partition_point(|&v| v <= lam);
        report.intervals_checked += 1;
        if n < report.min_count {
            report.min_count = n;
            report.worst_lambda = lam;
        }
    }
    report.pass = report.min_count >= required;
    Ok(report)
}
