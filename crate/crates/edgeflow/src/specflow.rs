//! Spectral flow of finite Hermitian families `t ↦ A_t`, `t ∈ [0, 1]`.
//!
//! Two independent evaluations:
//! * counting: `N_below(1) - N_below(0)` with `N_below` the number of
//!   eigenvalues strictly below `E`;
//! * partition: knots `0 = t_0 < … < t_M = 1` with widths `a_i` such that
//!   `E ± a_i` stays clear of the spectrum on `[t_{i-1}, t_i]`, then
//!   `dimKer(A_0 - E) - dimKer(A_1 - E) + Σ_i rank P_{(E+a_i, E+a_{i+1})}(A_{t_i})`
//!   with the signed rank convention for reversed intervals.
//!
//! Downward crossings of `E` count positive.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

pub const DEFAULT_ENDPOINT_TOL: f64 = 1e-8;
pub const NUDGE: f64 = 1e-7;

/// A Hermitian matrix family indexed by `t`.
pub trait MatrixFamily: Sync {
    fn matrix_at(&self, t: f64) -> Result<CMat>;

    fn eigenvalues_at(&self, t: f64) -> Result<Vec<f64>> {
        linalg::eigvalsh(&self.matrix_at(t)?)
    }

    /// Declared Lipschitz constant of `t ↦ A_t` in operator norm.
    fn t_lipschitz(&self) -> Option<f64> {
        None
    }
}

/// Wraps a closure as a [`MatrixFamily`].
pub struct FnFamily<F>(pub F);

impl<F: Fn(f64) -> CMat + Sync> MatrixFamily for FnFamily<F> {
    fn matrix_at(&self, t: f64) -> Result<CMat> {
        Ok((self.0)(t))
    }
}

/// Ascending spectra at ascending parameter values.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SpectrumSamples {
    pub ts: Vec<f64>,
    pub eigenvalues: Vec<Vec<f64>>,
}

impl SpectrumSamples {
    pub fn sample(family: &dyn MatrixFamily, ts: &[f64]) -> Result<Self> {
        if ts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("t grid must be strictly ascending".into()));
        }
        let eigenvalues = ts
            .par_iter()
            .map(|&t| family.eigenvalues_at(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ts: ts.to_vec(), eigenvalues })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// `max_j |λ_j(t_{i+1}) - λ_j(t_i)|` for each adjacent pair.
    pub fn max_branch_steps(&self) -> Vec<f64> {
        self.eigenvalues
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .collect()
    }

    /// Applies a strictly increasing map to every eigenvalue.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            ts: self.ts.clone(),
            eigenvalues: self.eigenvalues.iter().map(|v| v.iter().map(|&x| f(x)).collect()).collect(),
        }
    }

    /// Samples with `t_lo <= t <= t_hi`.
    pub fn restrict(&self, t_lo: f64, t_hi: f64) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.ts[i] >= t_lo && self.ts[i] <= t_hi).collect();
        Self {
            ts: keep.iter().map(|&i| self.ts[i]).collect(),
            eigenvalues: keep.iter().map(|&i| self.eigenvalues[i].clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMethod {
    Counting,
    Partition,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub t_start: f64,
    pub t_end: f64,
    pub signed_count: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralFlowResult {
    pub flow: i64,
    pub method: FlowMethod,
    pub crossings: Vec<Crossing>,
    /// Energy actually used, after any nudge.
    pub energy: f64,
    pub endpoint_counts: (usize, usize),
    pub nudged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct CountingOptions {
    pub tol: f64,
    /// Band-free region containing `E`, possibly unbounded on one side.
    pub gap: Option<(f64, f64)>,
}

impl Default for CountingOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_ENDPOINT_TOL, gap: None }
    }
}

fn distance_to_spectrum(vals: &[f64], e: f64) -> f64 {
    let i = vals.partition_point(|&v| v < e);
    let a = if i > 0 { e - vals[i - 1] } else { f64::INFINITY };
    let b = vals.get(i).map_or(f64::INFINITY, |&v| v - e);
    a.min(b)
}

fn nudge_direction(energy: f64, gap: Option<(f64, f64)>) -> f64 {
    match gap {
        Some((lo, hi)) if lo.is_finite() && hi.is_finite() => {
            if 0.5 * (lo + hi) >= energy {
                1.0
            } else {
                -1.0
            }
        }
        Some((lo, _)) if lo.is_finite() => 1.0,
        Some(_) => -1.0,
        None => 1.0,
    }
}

/// Moves `energy` by [`NUDGE`] toward the gap center when it lies within
/// `tol` of an endpoint eigenvalue.
fn clear_endpoints(samples: &SpectrumSamples, energy: f64, opts: &CountingOptions) -> Result<(f64, bool)> {
    if let Some((lo, hi)) = opts.gap {
        if !(lo < energy && energy < hi) {
            return Err(Error::EInBand { energy, lo, hi, margin: 0.0 });
        }
    }
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidParameter("spectral flow needs at least two samples".into()));
    }
    let ends = [0, n - 1];
    let blocked = |e: f64| ends.iter().find(|&&i| distance_to_spectrum(&samples.eigenvalues[i], e) <= opts.tol);
    if blocked(energy).is_none() {
        return Ok((energy, false));
    }
    let moved = energy + NUDGE * nudge_direction(energy, opts.gap);
    if let Some(&i) = blocked(moved) {
        return Err(Error::EOnEigenvalue { energy, t: samples.ts[i] });
    }
    log::warn!("energy {energy} sits on an endpoint eigenvalue; using {moved}");
    Ok((moved, true))
}

pub fn flow_counting(samples: &SpectrumSamples, energy: f64, opts: &CountingOptions) -> Result<SpectralFlowResult> {
    let (e, nudged) = clear_endpoints(samples, energy, opts)?;
    let counts: Vec<usize> = samples.eigenvalues.iter().map(|v| linalg::count_below(v, e)).collect();
    let crossings = counts
        .windows(2)
        .zip(samples.ts.windows(2))
        .filter(|(c, _)| c[0] != c[1])
        .map(|(c, t)| Crossing { t_start: t[0], t_end: t[1], signed_count: c[1] as i64 - c[0] as i64 })
        .collect();
    let (n0, n1) = (counts[0], counts[counts.len() - 1]);
    Ok(SpectralFlowResult {
        flow: n1 as i64 - n0 as i64,
        method: FlowMethod::Counting,
        crossings,
        energy: e,
        endpoint_counts: (n0, n1),
        nudged,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct PartitionOptions {
    /// Minimum distance between `E ± a_i` and any sampled eigenvalue.
    pub clearance: f64,
    /// Upper bound on every width `a_i`.
    pub max_width: f64,
    /// Bisection depth for refining a sample interval that admits no width.
    pub max_refine_depth: u32,
    /// Eigenvalues within this distance of `E` count toward `dim Ker`.
    pub kernel_tol: f64,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self { clearance: 1e-6, max_width: 0.5, max_refine_depth: 20, kernel_tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionPlan {
    /// `0 = t_0 < … < t_M = 1`.
    pub knots: Vec<f64>,
    /// `widths[i]` applies on `[knots[i], knots[i+1]]`.
    pub widths: Vec<f64>,
}

impl PartitionPlan {
    /// True when every sample inside each segment keeps `E ± a_i` at least
    /// `clearance` away from its spectrum.
    pub fn is_valid_for(&self, samples: &SpectrumSamples, energy: f64, clearance: f64) -> bool {
        samples.ts.iter().zip(&samples.eigenvalues).all(|(&t, vals)| {
            (0..self.widths.len())
                .filter(|&i| self.knots[i] <= t && t <= self.knots[i + 1])
                .all(|i| {
                    let a = self.widths[i];
                    vals.iter().all(|&v| ((v - energy).abs() - a).abs() >= clearance)
                })
        })
    }
}

/// Smallest `a ∈ [0, max_width]` such that, on every spectrum, `E ± a` stays
/// `clearance` away from all eigenvalues and the counts below `E - a` and
/// below `E + a` do not change. Spectra are ascending.
fn min_clear_width(spectra: &[&[f64]], energy: f64, opts: &PartitionOptions) -> Option<f64> {
    let c = opts.clearance;
    let feasible = |a: f64| -> bool {
        let mut counts = None;
        for v in spectra {
            if distance_to_spectrum(v, energy - a) < c || distance_to_spectrum(v, energy + a) < c {
                return false;
            }
            let k = (linalg::count_below(v, energy - a), linalg::count_below(v, energy + a));
            if *counts.get_or_insert(k) != k {
                return false;
            }
        }
        true
    };
    if feasible(0.0) {
        return Some(0.0);
    }
    let mut cands: Vec<f64> = spectra
        .iter()
        .flat_map(|v| v.iter().map(|&x| (x - energy).abs() + 1.001 * c))
        .filter(|&a| a <= opts.max_width)
        .collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    cands.into_iter().find(|&a| feasible(a))
}

/// Greedy plan over the samples, bisecting sample intervals through `family`
/// when no single width clears them. Returns the plan and the samples
/// actually used, including inserted ones.
pub fn plan_partition(
    samples: &SpectrumSamples,
    energy: f64,
    opts: &PartitionOptions,
    family: Option<&dyn MatrixFamily>,
) -> Result<(PartitionPlan, SpectrumSamples)> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("partition plan needs at least two samples".into()));
    }
    let mut ts = samples.ts.clone();
    let mut vals = samples.eigenvalues.clone();
    let min_step = (ts[ts.len() - 1] - ts[0]) / (ts.len() as f64) / 2f64.powi(opts.max_refine_depth as i32);
    let mut knots = vec![ts[0]];
    let mut widths = Vec::new();
    let mut start = 0;
    while start + 1 < ts.len() {
        let width_on = |v: &Vec<Vec<f64>>, end: usize| {
            let view: Vec<&[f64]> = v[start..=end].iter().map(Vec::as_slice).collect();
            min_clear_width(&view, energy, opts)
        };
        let Some(mut a) = width_on(&vals, start + 1) else {
            let (t0, t1) = (ts[start], ts[start + 1]);
            let fam = family.filter(|_| t1 - t0 > min_step).ok_or(Error::PlanInfeasible { t_lo: t0, t_hi: t1 })?;
            let tm = 0.5 * (t0 + t1);
            vals.insert(start + 1, fam.eigenvalues_at(tm)?);
            ts.insert(start + 1, tm);
            continue;
        };
        let mut end = start + 1;
        while end + 1 < ts.len() {
            match width_on(&vals, end + 1) {
                Some(w) => {
                    a = w;
                    end += 1;
                }
                None => break,
            }
        }
        knots.push(ts[end]);
        widths.push(a);
        start = end;
    }
    Ok((PartitionPlan { knots, widths }, SpectrumSamples { ts, eigenvalues: vals }))
}

/// Signed eigenvalue count of `(lo, hi)`: negative of `(hi, lo)` when `hi < lo`.
fn signed_rank(vals: &[f64], lo: f64, hi: f64) -> i64 {
    if hi >= lo {
        linalg::count_open(vals, lo, hi) as i64
    } else {
        -(linalg::count_open(vals, hi, lo) as i64)
    }
}

/// Evaluates the partition formula. The plan is padded with zero-width
/// segments at both ends, so knot `t_i` contributes
/// `rank P_{(E+α_i, E+α_{i+1})}(A_{t_i})` with `α_0 = α_{M+1} = 0`.
pub fn evaluate_partition(
    plan: &PartitionPlan,
    knot_spectra: &[Vec<f64>],
    energy: f64,
    kernel_tol: f64,
) -> (i64, Vec<Crossing>) {
    let m = plan.widths.len();
    assert_eq!(knot_spectra.len(), m + 1);
    let ker = |v: &[f64]| v.iter().filter(|&&x| (x - energy).abs() <= kernel_tol).count() as i64;
    let alpha = |i: usize| if i == 0 || i > m { 0.0 } else { plan.widths[i - 1] };
    let mut flow = ker(&knot_spectra[0]) - ker(&knot_spectra[m]);
    let mut crossings = Vec::new();
    for (i, spec) in knot_spectra.iter().enumerate() {
        let r = signed_rank(spec, energy + alpha(i), energy + alpha(i + 1));
        flow += r;
        if r != 0 {
            let t_start = plan.knots[i.saturating_sub(1)];
            crossings.push(Crossing { t_start, t_end: plan.knots[i], signed_count: r });
        }
    }
    (flow, crossings)
}

/// Partition-method flow from precomputed samples, refining through
/// `family` where needed.
pub fn flow_partition_samples(
    samples: &SpectrumSamples,
    energy: f64,
    opts: &PartitionOptions,
    family: Option<&dyn MatrixFamily>,
) -> Result<(SpectralFlowResult, PartitionPlan)> {
    let (plan, used) = plan_partition(samples, energy, opts, family)?;
    let knot_spectra: Vec<Vec<f64>> = plan
        .knots
        .iter()
        .map(|&t| {
            let i = used.ts.partition_point(|&s| s < t);
            used.eigenvalues[i].clone()
        })
        .collect();
    let (flow, crossings) = evaluate_partition(&plan, &knot_spectra, energy, opts.kernel_tol);
    let first = &knot_spectra[0];
    let last = &knot_spectra[knot_spectra.len() - 1];
    let result = SpectralFlowResult {
        flow,
        method: FlowMethod::Partition,
        crossings,
        energy,
        endpoint_counts: (linalg::count_below(first, energy), linalg::count_below(last, energy)),
        nudged: false,
    };
    Ok((result, plan))
}

/// Samples `family` on `t_points` uniform points of `[0, 1]` and evaluates
/// the partition formula.
pub fn flow_partition(
    family: &dyn MatrixFamily,
    energy: f64,
    t_points: usize,
    opts: &PartitionOptions,
) -> Result<(SpectralFlowResult, PartitionPlan)> {
    if t_points < 2 {
        return Err(Error::InvalidParameter("t_points must be >= 2".into()));
    }
    let ts = crate::edge::uniform_grid(0.0, 1.0, t_points);
    let samples = SpectrumSamples::sample(family, &ts)?;
    flow_partition_samples(&samples, energy, opts, Some(family))
}
