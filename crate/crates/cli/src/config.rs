//! Run configuration: one JSON document per run.
//!
//! ```json
//! {
//!   "model": {"preset": "ssh", "j1": 1.5, "j2": 0.5},
//!   "wall": {"kind": "linear_ramp", "nu": 1.0},
//!   "sweep": {"t_points": 200, "t_range": [0.0, 1.0]},
//!   "box": 100,
//!   "energies": [-2.5, 0.0, 2.5]
//! }
//! ```
//!
//! `model` is a preset name, `{"preset": name, ...}` or `{"file": path}`.
//! Presets are expanded into concrete models before any other validation.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context};
use edgeflow::io::{parse_model, Model};
use edgeflow::kernel::{ConvolutionKernel, PeriodicJacobi};
use edgeflow::lattice2d::{
    edge_wall_1d, supercell_cut, wallace_armchair, wallace_preset, BravaisLattice2D, CommensurateCut, Ordering,
    TightBinding2D,
};
use edgeflow::linalg;
use edgeflow::walls::{steep_wall, ScalarWall, SoftWallProfile};
use serde::Deserialize;

pub const DEFAULT_K_COUNT: usize = 1024;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelField,
    #[serde(default)]
    pub wall: WallSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(rename = "box", default = "default_box")]
    pub half_width: usize,
    #[serde(default)]
    pub energies: Vec<f64>,
    #[serde(default = "default_k_count")]
    pub k_count: usize,
    #[serde(default)]
    pub checks: CheckSpec,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_box() -> usize {
    100
}

fn default_k_count() -> usize {
    DEFAULT_K_COUNT
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ModelField {
    Name(String),
    Spec(ModelSpec),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub preset: Option<String>,
    pub file: Option<PathBuf>,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub n: Option<i64>,
    pub m: Option<i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    pub kind: String,
    pub nu: Option<f64>,
    /// Per-orbital positions inside the cell; 1D models only.
    pub offsets: Option<Vec<f64>>,
    /// Target energy of a steep wall.
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    pub sigma: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub w: Option<Vec<Vec<Vec<f64>>>>,
}

impl Default for WallSpec {
    fn default() -> Self {
        Self { kind: "linear_ramp".into(), nu: Some(1.0), offsets: None, energy: None, sigma: None, x: None, w: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_t_points")]
    pub t_points: usize,
    #[serde(default = "default_t_range")]
    pub t_range: [f64; 2],
    /// Explicit `k₂` values as fractions of `a₂*`.
    pub k2: Option<Vec<f64>>,
    /// Uniform `k₂` grid on `[-½, ½]`, used when `k2` is absent.
    pub k2_points: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { t_points: default_t_points(), t_range: default_t_range(), k2: None, k2_points: None }
    }
}

fn default_t_points() -> usize {
    200
}

fn default_t_range() -> [f64; 2] {
    [0.0, 1.0]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    /// Whether `verify` runs the flow check for every energy and `k₂`.
    #[serde(default = "yes")]
    pub flow: bool,
    #[serde(default)]
    pub density_t0: Vec<f64>,
    /// Energies for the density check; defaults to `energies`. Each must lie in a bounded gap.
    #[serde(default)]
    pub density_energies: Option<Vec<f64>>,
    #[serde(default)]
    pub ring_sizes: Vec<usize>,
    #[serde(default)]
    pub ring_sigma: Option<f64>,
    /// Random momenta for the supercell folding check; cut models only.
    #[serde(default)]
    pub fold_momenta: usize,
    #[serde(default)]
    pub convergence: Option<ConvergenceSpec>,
}

impl Default for CheckSpec {
    fn default() -> Self {
        Self { flow: true, density_t0: Vec::new(), density_energies: None, ring_sizes: Vec::new(), ring_sigma: None, fold_momenta: 0, convergence: None }
    }
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub window: (f64, f64),
    pub t: f64,
    pub ells: Vec<usize>,
}

/// Reads a config file; JSON errors carry line and column.
pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text, path.parent())
}

pub fn parse(text: &str, base: Option<&Path>) -> anyhow::Result<RunConfig> {
    let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| anyhow!("config: {e}"))?;
    if let (ModelField::Spec(ModelSpec { file: Some(f), .. }), Some(base)) = (&mut cfg.model, base) {
        if f.is_relative() {
            *f = base.join(&*f);
        }
    }
    Ok(cfg)
}

/// A model after preset expansion.
pub enum Resolved {
    OneD {
        label: String,
        kernel: ConvolutionKernel,
        jacobi: Option<PeriodicJacobi>,
        offsets: Vec<f64>,
    },
    TwoD {
        label: String,
        tb: TightBinding2D,
        /// Original model and cut geometry when `tb` is a supercell.
        cut: Option<(TightBinding2D, CommensurateCut)>,
        default_k2: f64,
    },
}

impl Resolved {
    pub fn label(&self) -> &str {
        match self {
            Resolved::OneD { label, .. } | Resolved::TwoD { label, .. } => label,
        }
    }

    pub fn is_2d(&self) -> bool {
        matches!(self, Resolved::TwoD { .. })
    }
}

pub fn resolve_model(field: &ModelField) -> anyhow::Result<Resolved> {
    let spec = match field {
        ModelField::Name(name) => ModelSpec { preset: Some(name.clone()), ..Default::default() },
        ModelField::Spec(s) => s.clone(),
    };
    match (&spec.preset, &spec.file) {
        (Some(_), Some(_)) => bail!("model: give either `preset` or `file`, not both"),
        (None, None) => bail!("model: missing `preset` or `file`"),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading model {}", path.display()))?;
            let label = path.file_stem().map_or("file".into(), |s| s.to_string_lossy().into_owned());
            Ok(match parse_model(&text)? {
                Model::OneD(kernel) => {
                    let offsets = vec![0.0; kernel.dim()];
                    Resolved::OneD { label, jacobi: kernel.to_jacobi(), kernel, offsets }
                }
                Model::TwoD(tb) => Resolved::TwoD { label, tb, cut: None, default_k2: 0.0 },
            })
        }
        (Some(name), None) => expand_preset(name, &spec),
    }
}

fn expand_preset(name: &str, spec: &ModelSpec) -> anyhow::Result<Resolved> {
    let only = |allowed: &[&str]| -> anyhow::Result<()> {
        let given = [("j1", spec.j1.is_some()), ("j2", spec.j2.is_some()), ("n", spec.n.is_some()), ("m", spec.m.is_some())];
        for (key, present) in given {
            ensure!(!present || allowed.contains(&key), "model: preset `{name}` takes no `{key}`");
        }
        Ok(())
    };
    match name {
        "ssh" => {
            only(&["j1", "j2"])?;
            let (j1, j2) = (spec.j1.unwrap_or(1.5), spec.j2.unwrap_or(0.5));
            let jacobi = PeriodicJacobi::ssh_real(j1, j2);
            Ok(Resolved::OneD { label: format!("ssh(j1={j1},j2={j2})"), kernel: jacobi.kernel(), jacobi: Some(jacobi), offsets: vec![0.0, 0.25] })
        }
        "wallace" => {
            only(&[])?;
            Ok(Resolved::TwoD { label: "wallace".into(), tb: wallace_preset(), cut: None, default_k2: 0.3 })
        }
        "wallace_armchair" => {
            only(&[])?;
            let (cut, tb) = wallace_armchair()?;
            Ok(Resolved::TwoD { label: "wallace_armchair".into(), tb, cut: Some((wallace_preset(), cut)), default_k2: 0.0 })
        }
        _ if name.starts_with("wallace_cut_") => {
            only(&["n", "m"])?;
            let (n, m) = if name == "wallace_cut_n_m" {
                (spec.n.context("model: `wallace_cut_n_m` needs `n`")?, spec.m.context("model: `wallace_cut_n_m` needs `m`")?)
            } else {
                ensure!(spec.n.is_none() && spec.m.is_none(), "model: `{name}` already fixes n and m");
                parse_cut_name(name)?
            };
            let (cut, tb) = supercell_cut(&wallace_preset(), n, m, Ordering::SublatticeFirst)?;
            Ok(Resolved::TwoD { label: format!("wallace_cut_{n}_{m}"), tb, cut: Some((wallace_preset(), cut)), default_k2: 0.0 })
        }
        _ => bail!("model: unknown preset `{name}` (expected ssh, wallace, wallace_armchair, wallace_cut_n_m)"),
    }
}

fn parse_cut_name(name: &str) -> anyhow::Result<(i64, i64)> {
    let rest = &name["wallace_cut_".len()..];
    let parsed = rest.split_once('_').and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)));
    parsed.with_context(|| format!("model: cannot read cut indices from `{name}`"))
}

impl SweepSpec {
    pub fn k2_values(&self, default: f64) -> Vec<f64> {
        if let Some(v) = &self.k2 {
            return v.clone();
        }
        match self.k2_points {
            Some(1) => vec![0.0],
            Some(p) => (0..p).map(|i| -0.5 + i as f64 / (p - 1) as f64).collect(),
            None => vec![default],
        }
    }
}

/// Wall profile for a 1D model, or for the reduced fiber of a 2D model.
pub fn build_wall(spec: &WallSpec, model: &Resolved) -> anyhow::Result<SoftWallProfile> {
    let shape = || -> anyhow::Result<ScalarWall> {
        match spec.kind.as_str() {
            "linear_ramp" => {
                let nu = spec.nu.context("wall: `linear_ramp` needs `nu`")?;
                ensure!(nu > 0.0 && nu.is_finite(), "wall: `nu` must be positive, got {nu}");
                Ok(ScalarWall::LinearRamp { nu })
            }
            "smooth_sqrt" => {
                ensure!(spec.nu.is_none(), "wall: `smooth_sqrt` takes no `nu`");
                Ok(ScalarWall::SmoothSqrt)
            }
            other => bail!("wall: unknown kind `{other}` (expected linear_ramp, smooth_sqrt, steep, custom_table)"),
        }
    };
    match model {
        Resolved::TwoD { tb, .. } => {
            ensure!(spec.offsets.is_none(), "wall: `offsets` follow from the atom positions in 2D");
            ensure!(matches!(spec.kind.as_str(), "linear_ramp" | "smooth_sqrt"), "wall: `{}` is 1D only", spec.kind);
            Ok(edge_wall_1d(tb.lattice(), shape()?)?)
        }
        Resolved::OneD { kernel, jacobi, offsets, .. } => {
            let offsets = spec.offsets.clone().unwrap_or_else(|| offsets.clone());
            ensure!(offsets.len() == kernel.dim(), "wall: {} offsets for a model with {} orbitals", offsets.len(), kernel.dim());
            match spec.kind.as_str() {
                "steep" => {
                    let jacobi = jacobi.as_ref().context("wall: `steep` needs a nearest-neighbour (Jacobi) model")?;
                    let energy = spec.energy.context("wall: `steep` needs `E`")?;
                    let base_nu = spec.nu.unwrap_or(1.0);
                    let base = SoftWallProfile::diagonal(ScalarWall::LinearRamp { nu: base_nu }, 1.0, offsets)?;
                    Ok(steep_wall(&base, jacobi, energy, spec.sigma)?.profile)
                }
                "custom_table" => {
                    let xs = spec.x.clone().context("wall: `custom_table` needs `x`")?;
                    let ws = spec.w.as_ref().context("wall: `custom_table` needs `w`")?;
                    let mats = ws.iter().map(|w| linalg::from_parts(w, None)).collect::<edgeflow::Result<Vec<_>>>()?;
                    ensure!(mats.iter().all(|m| m.nrows() == kernel.dim()), "wall: table matrices must be {0}x{0}", kernel.dim());
                    Ok(SoftWallProfile::custom_table(xs, mats)?)
                }
                _ => Ok(SoftWallProfile::diagonal(shape()?, 1.0, offsets)?),
            }
        }
    }
}

/// Checks that do not depend on the subcommand.
pub fn validate(cfg: &RunConfig, model: &Resolved) -> anyhow::Result<()> {
    ensure!(cfg.k_count >= 2, "k_count must be at least 2, got {}", cfg.k_count);
    ensure!(cfg.sweep.t_range[0] <= cfg.sweep.t_range[1], "sweep.t_range must be ascending");
    ensure!(cfg.energies.iter().all(|e| e.is_finite()), "energies must be finite");
    if let Some(k2) = &cfg.sweep.k2 {
        ensure!(!k2.is_empty(), "sweep.k2 must not be empty");
    }
    ensure!(cfg.sweep.k2_points != Some(0), "sweep.k2_points must be positive");
    let range = match model {
        Resolved::OneD { kernel, .. } => kernel.range(),
        Resolved::TwoD { tb, .. } => tb.reduce_to_1d(0.0).range(),
    };
    ensure!(cfg.half_width >= range + 2, "box = {} is below model range + 2 = {}", cfg.half_width, range + 2);
    Ok(())
}

/// Reduced 1D kernels, one per `k₂`, or the model itself in 1D.
pub fn fibers(cfg: &RunConfig, model: &Resolved) -> Vec<(Option<f64>, ConvolutionKernel)> {
    match model {
        Resolved::OneD { kernel, .. } => vec![(None, kernel.clone())],
        Resolved::TwoD { tb, default_k2, .. } => {
            cfg.sweep.k2_values(*default_k2).into_iter().map(|s| (Some(s), tb.reduce_to_1d(s))).collect()
        }
    }
}

/// Momentum in the parallelogram spanned by `±b₁, ±b₂` from samples in `[0, 1)`.
pub fn fold_momentum(lattice: &BravaisLattice2D, u: f64, v: f64) -> [f64; 2] {
    let (b1, b2) = lattice.reciprocal();
    let (x, y) = (2.0 * u - 1.0, 2.0 * v - 1.0);
    [x * b1[0] + y * b2[0], x * b1[1] + y * b2[1]]
}
