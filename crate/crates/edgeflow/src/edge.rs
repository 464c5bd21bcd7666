//! Finite truncations of the edge operator `H + W(t)` on the box of cells
//! `[-L, L]`, localization-based edge classification, and sweeps over `t`.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::num;
use crate::kernel::ConvolutionKernel;
use crate::linalg::{self, CMat, C64};
use crate::specflow::{MatrixFamily, SpectrumSamples};
use crate::walls::SoftWallProfile;

pub const DEFAULT_THRESHOLD: f64 = 0.75;
/// Interior masses in this range are reported as borderline.
pub const BORDERLINE: (f64, f64) = (0.6, 0.75);

#[derive(Clone, Debug)]
pub struct EdgeTruncation {
    t: f64,
    half_width: usize,
    dim: usize,
    matrix: CMat,
}

/// Assembles block `(n, m) = h(n - m) + δ_{nm} w(n - t)` for `n, m ∈ [-L, L]`.
pub fn assemble_edge(
    kernel: &ConvolutionKernel,
    wall: &SoftWallProfile,
    t: f64,
    half_width: usize,
) -> Result<EdgeTruncation> {
    let dim = kernel.dim();
    if wall.dim() != dim {
        return Err(Error::InvalidParameter(format!(
            "wall block size {} differs from model block size {dim}",
            wall.dim()
        )));
    }
    let required = kernel.range() + 2;
    if half_width < required {
        return Err(Error::BoxTooSmall { half_width, required });
    }
    let cells = 2 * half_width + 1;
    let mut matrix = linalg::zeros(cells * dim, cells * dim);
    let l = half_width as i64;
    for i in 0..cells {
        let n = i as i64 - l;
        linalg::add_block(&mut matrix, i * dim, i * dim, &wall.eval(n as f64 - t));
        for (d, h) in kernel.blocks() {
            let m = n - d;
            if (-l..=l).contains(&m) {
                let j = (m + l) as usize;
                linalg::add_block(&mut matrix, i * dim, j * dim, h);
            }
        }
    }
    Ok(EdgeTruncation { t, half_width, dim, matrix })
}

impl EdgeTruncation {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// Block `(n, m)` of the assembled matrix.
    pub fn cell_block(&self, n: i64, m: i64) -> CMat {
        let l = self.half_width as i64;
        let d = self.dim;
        linalg::block(&self.matrix, (n + l) as usize * d, (m + l) as usize * d, d, d)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub threshold: f64,
    /// Inclusive cell window; `None` means `[-L/2, L/2]`.
    pub window: Option<(i64, i64)>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { threshold: DEFAULT_THRESHOLD, window: None }
    }
}

#[derive(Clone, Debug)]
pub struct EdgeMode {
    pub eigenvalue: f64,
    pub vector: Vec<C64>,
    /// Squared norm of the vector restricted to the interior window.
    pub interior_mass: f64,
    pub is_edge: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeSummary {
    pub eigenvalue: f64,
    pub interior_mass: f64,
    pub is_edge: bool,
}

impl From<&EdgeMode> for ModeSummary {
    fn from(m: &EdgeMode) -> Self {
        Self { eigenvalue: m.eigenvalue, interior_mass: m.interior_mass, is_edge: m.is_edge }
    }
}

fn window_rows(tr: &EdgeTruncation, opts: &ClassifyOptions) -> (usize, usize) {
    let l = tr.half_width as i64;
    let (lo, hi) = opts.window.unwrap_or((-(l / 2), l / 2));
    let (lo, hi) = (lo.max(-l), hi.min(l));
    if hi < lo {
        return (0, 0);
    }
    ((lo + l) as usize * tr.dim, (hi + l + 1) as usize * tr.dim)
}

pub fn eigensolve_classify(tr: &EdgeTruncation, opts: &ClassifyOptions) -> Result<Vec<EdgeMode>> {
    let (vals, vecs) = linalg::eigh(&tr.matrix)?;
    let (r0, r1) = window_rows(tr, opts);
    Ok(vals
        .iter()
        .enumerate()
        .map(|(j, &eigenvalue)| {
            let col = vecs.col(j);
            let vector: Vec<C64> = (0..col.nrows()).map(|i| col[i]).collect();
            let interior_mass: f64 = vector[r0..r1].iter().map(|z| z.norm_sqr()).sum();
            EdgeMode { eigenvalue, vector, interior_mass, is_edge: interior_mass >= opts.threshold }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub t: f64,
    pub modes: Vec<ModeSummary>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EdgeSweep {
    pub points: Vec<SweepPoint>,
}

impl EdgeSweep {
    pub fn spectra(&self) -> SpectrumSamples {
        SpectrumSamples {
            ts: self.points.iter().map(|p| p.t).collect(),
            eigenvalues: self
                .points
                .iter()
                .map(|p| p.modes.iter().map(|m| m.eigenvalue).collect())
                .collect(),
        }
    }

    /// Modes whose interior mass falls in [`BORDERLINE`].
    pub fn borderline_count(&self) -> usize {
        self.points
            .iter()
            .flat_map(|p| &p.modes)
            .filter(|m| m.interior_mass >= BORDERLINE.0 && m.interior_mass < BORDERLINE.1)
            .count()
    }

    /// CSV with header `t,index,eigenvalue,interior_mass,is_edge`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,index,eigenvalue,interior_mass,is_edge")?;
        for p in &self.points {
            for (i, m) in p.modes.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    num(p.t),
                    i,
                    num(m.eigenvalue),
                    num(m.interior_mass),
                    m.is_edge
                )?;
            }
        }
        Ok(())
    }
}

fn check_ascending(t_grid: &[f64]) -> Result<()> {
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("t grid must be strictly ascending".into()));
    }
    Ok(())
}

/// One classified eigensolve per grid point, gathered in grid order.
pub fn edge_sweep_t(
    kernel: &ConvolutionKernel,
    wall: &SoftWallProfile,
    half_width: usize,
    t_grid: &[f64],
    opts: &ClassifyOptions,
) -> Result<EdgeSweep> {
    check_ascending(t_grid)?;
    let points = t_grid
        .par_iter()
        .map(|&t| {
            let tr = assemble_edge(kernel, wall, t, half_width)?;
            let modes = eigensolve_classify(&tr, opts)?;
            Ok(SweepPoint { t, modes: modes.iter().map(ModeSummary::from).collect() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeSweep { points })
}

/// `points` equally spaced values from `t0` to `t1` inclusive.
pub fn uniform_grid(t0: f64, t1: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    t1
                } else {
                    t0 + (t1 - t0) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// `t ↦ H + W(t)` truncated to `[-L, L]`.
#[derive(Clone, Debug)]
pub struct EdgeFamily {
    pub kernel: ConvolutionKernel,
    pub wall: SoftWallProfile,
    pub half_width: usize,
}

impl EdgeFamily {
    pub fn new(kernel: ConvolutionKernel, wall: SoftWallProfile, half_width: usize) -> Result<Self> {
        assemble_edge(&kernel, &wall, 0.0, half_width)?;
        Ok(Self { kernel, wall, half_width })
    }
}

impl MatrixFamily for EdgeFamily {
    fn matrix_at(&self, t: f64) -> Result<CMat> {
        Ok(assemble_edge(&self.kernel, &self.wall, t, self.half_width)?.into_matrix())
    }

    fn t_lipschitz(&self) -> Option<f64> {
        Some(self.wall.lipschitz())
    }
}
