//! Soft-wall profiles `w: ℝ → Hermitian N×N`, the translated wall operator
//! `W(t) = ⊕_n w(n - t)`, and the steep replacement `w_Σ` that saturates at a
//! constant level left of `-1`.
//!
//! Profiles are closures with declared metadata. The Lipschitz constant and
//! the saturation certificate are trusted by consumers and spot-checked by
//! tests.

use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::PeriodicJacobi;
use crate::linalg::{self, CMat};

type EvalFn = Arc<dyn Fn(f64) -> CMat + Send + Sync>;
type CertifyFn = Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>;

/// Left end of the numeric saturation scan.
pub const SATURATION_WINDOW: f64 = -1e6;

/// Scalar barrier shapes, non-increasing, zero or decaying on the right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarWall {
    /// `0` for `x >= 0`, `-νx` for `x <= 0`.
    LinearRamp { nu: f64 },
    /// `½(√(x²+1) - x)`.
    SmoothSqrt,
}

impl ScalarWall {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ScalarWall::LinearRamp { nu } => {
                if x >= 0.0 {
                    0.0
                } else {
                    -nu * x
                }
            }
            ScalarWall::SmoothSqrt => 0.5 * (x.hypot(1.0) - x),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match *self {
            ScalarWall::LinearRamp { nu } => nu,
            ScalarWall::SmoothSqrt => 1.0,
        }
    }

    /// Largest `y` with `v(y') >= level` for all `y' <= y`.
    pub fn level_point(&self, level: f64) -> Option<f64> {
        match *self {
            ScalarWall::LinearRamp { nu } if nu > 0.0 => Some(if level <= 0.0 { 0.0 } else { -level / nu }),
            ScalarWall::LinearRamp { .. } => (level <= 0.0).then_some(f64::INFINITY),
            ScalarWall::SmoothSqrt => (level > 0.0).then(|| (1.0 - 4.0 * level * level) / (4.0 * level)),
        }
    }
}

#[derive(Clone)]
pub struct SoftWallProfile {
    dim: usize,
    lipschitz: f64,
    label: String,
    eval: EvalFn,
    certify: Option<CertifyFn>,
}

impl fmt::Debug for SoftWallProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SoftWallProfile")
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .field("label", &self.label)
            .finish()
    }
}

impl SoftWallProfile {
    /// Arbitrary profile. `eval` must return Hermitian `dim×dim` matrices.
    pub fn custom(
        dim: usize,
        lipschitz: f64,
        label: impl Into<String>,
        eval: impl Fn(f64) -> CMat + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 || !(lipschitz >= 0.0) {
            return Err(Error::InvalidParameter("wall needs dim > 0 and lipschitz >= 0".into()));
        }
        Ok(Self { dim, lipschitz, label: label.into(), eval: Arc::new(eval), certify: None })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            lipschitz: 0.0,
            label: "zero".into(),
            eval: Arc::new(move |_| linalg::zeros(dim, dim)),
            certify: None,
        }
    }

    /// `diag(v(scale·x + o_1), …, v(scale·x + o_N))`.
    pub fn diagonal(shape: ScalarWall, scale: f64, offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() || !(scale > 0.0) {
            return Err(Error::InvalidParameter("diagonal wall needs offsets and scale > 0".into()));
        }
        if let ScalarWall::LinearRamp { nu } = shape {
            if !(nu >= 0.0) || !nu.is_finite() {
                return Err(Error::InvalidParameter(format!("ramp slope must be >= 0, got {nu}")));
            }
        }
        let dim = offsets.len();
        let omax = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let offs = offsets.clone();
        let eval = move |x: f64| {
            let v: Vec<f64> = offs.iter().map(|o| shape.eval(scale * x + o)).collect();
            linalg::real_diag(&v)
        };
        let certify = move |level: f64| shape.level_point(level).map(|y| (y - omax) / scale);
        Ok(Self {
            dim,
            lipschitz: shape.lipschitz() * scale,
            label: format!("{shape:?}"),
            eval: Arc::new(eval),
            certify: Some(Arc::new(certify)),
        })
    }

    pub fn linear_ramp(nu: f64, dim: usize) -> Result<Self> {
        Self::diagonal(ScalarWall::LinearRamp { nu }, 1.0, vec![0.0; dim])
    }

    pub fn smooth_sqrt(dim: usize) -> Result<Self> {
        Self::diagonal(ScalarWall::SmoothSqrt, 1.0, vec![0.0; dim])
    }

    /// Piecewise-linear interpolation of `(x_i, w_i)`. Constant right of the
    /// last sample; continues the first segment's slope left of the first.
    pub fn custom_table(xs: Vec<f64>, ws: Vec<CMat>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ws.len() {
            return Err(Error::InvalidParameter("table needs >= 2 samples with one matrix each".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("table abscissae must increase strictly".into()));
        }
        let dim = ws[0].nrows();
        for w in &ws {
            if w.nrows() != dim || w.ncols() != dim || linalg::hermiticity_defect(w) >= 1e-12 {
                return Err(Error::InvalidParameter("table samples must be Hermitian and equal-sized".into()));
            }
        }
        let lipschitz = xs
            .windows(2)
            .zip(ws.windows(2))
            .map(|(x, w)| linalg::op_norm(&(&w[1] - &w[0])) / (x[1] - x[0]))
            .fold(0.0, f64::max);
        let eval = move |x: f64| {
            let n = xs.len();
            if x >= xs[n - 1] {
                return ws[n - 1].clone();
            }
            let i = xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
            let s = (x - xs[i]) / (xs[i + 1] - xs[i]);
            &ws[i] * faer::Scale(linalg::c(1.0 - s, 0.0)) + &ws[i + 1] * faer::Scale(linalg::c(s, 0.0))
        };
        Ok(Self { dim, lipschitz, label: "custom_table".into(), eval: Arc::new(eval), certify: None })
    }

    /// Attaches the certificate `w(x) >= level` for all `x <= x_sat`.
    pub fn with_saturation(mut self, x_sat: f64, level: f64) -> Self {
        self.certify = Some(Arc::new(move |l| (l <= level).then_some(x_sat)));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> CMat {
        (self.eval)(x)
    }

    /// A certified point left of which the profile is `>= level`.
    pub fn saturation_point(&self, level: f64) -> Option<f64> {
        self.certify.as_ref().and_then(|f| f(level))
    }

    /// Blocks `w(n - t)` for `n` in `sites`.
    pub fn shifted_blocks(&self, t: f64, sites: RangeInclusive<i64>) -> Vec<CMat> {
        sites.map(|n| self.eval(n as f64 - t)).collect()
    }

    /// Sorted union of the spectra of `w(n - t)` over `sites`.
    pub fn spectrum(&self, t: f64, sites: RangeInclusive<i64>) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for b in self.shifted_blocks(t, sites) {
            out.extend(linalg::eigvalsh(&b)?);
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

fn min_eigenvalue(m: &CMat) -> Result<f64> {
    Ok(linalg::eigvalsh(m)?.first().copied().unwrap_or(f64::INFINITY))
}

/// Finds `x_Σ <= -1` with `w(x) >= level` on sampled points left of it.
fn scan_saturation(profile: &SoftWallProfile, level: f64) -> Result<f64> {
    let not_found = Error::SaturationNotFound { level, window: SATURATION_WINDOW };
    let ok = |x: f64| -> Result<bool> { Ok(min_eigenvalue(&profile.eval(x))? >= level) };
    let mut x = -1.0;
    while x >= SATURATION_WINDOW {
        if ok(x)? {
            let fine = (1..=256).map(|i| x - 0.25 * i as f64);
            let mut coarse = Vec::new();
            let mut y = 2.0 * x;
            while y >= SATURATION_WINDOW {
                coarse.push(y);
                y *= 2.0;
            }
            let mut all = true;
            for p in fine.chain(coarse) {
                if !ok(p)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(x);
            }
        }
        x *= 2.0;
    }
    Err(not_found)
}

/// The steep wall `w_Σ` built from a soft profile and a Jacobi bulk.
#[derive(Clone, Debug)]
pub struct SteepWall {
    pub profile: SoftWallProfile,
    pub sigma: f64,
    pub x_sigma: f64,
    pub energy: f64,
    pub c_ab: f64,
}

impl SteepWall {
    /// Guaranteed lower bound `E + 3C_{a,b} + 1` on `w_Σ(x)` for `x < -1`.
    pub fn floor(&self) -> f64 {
        self.energy + 3.0 * self.c_ab + 1.0
    }
}

/// `Σ = E + 4C_{a,b} + 1` unless `sigma` overrides it with a larger value.
pub fn steep_wall(
    profile: &SoftWallProfile,
    jacobi: &PeriodicJacobi,
    energy: f64,
    sigma: Option<f64>,
) -> Result<SteepWall> {
    if profile.dim() != jacobi.dim() {
        return Err(Error::InvalidParameter("wall and model block sizes differ".into()));
    }
    let c_ab = jacobi.c_ab();
    let minimal = energy + 4.0 * c_ab + 1.0;
    let sigma = sigma.unwrap_or(minimal);
    if sigma < minimal {
        return Err(Error::InvalidParameter(format!("Σ = {sigma} is below E + 4C + 1 = {minimal}")));
    }
    let x_sigma = match profile.saturation_point(sigma) {
        Some(x) if x.is_finite() => x.min(-1.0),
        _ => scan_saturation(profile, sigma)?,
    };
    let n = jacobi.dim();
    let top = &linalg::scaled_identity(n, sigma) - jacobi.b();
    let nu = profile.lipschitz();
    let blend_sup = (0..=100)
        .map(|i| x_sigma - i as f64 * 0.01)
        .map(|x| linalg::op_norm(&(&linalg::scaled_identity(n, sigma) - &profile.eval(x))))
        .fold(0.0, f64::max)
        + 0.01 * nu;
    let lipschitz = linalg::op_norm(&top).max(blend_sup + linalg::op_norm(jacobi.b()) + nu);
    let w = profile.clone();
    let eval = move |x: f64| -> CMat {
        let r = |s: f64| faer::Scale(linalg::c(s, 0.0));
        if x >= 0.0 {
            linalg::zeros(n, n)
        } else if x >= -1.0 {
            &top * r(-x)
        } else if x >= x_sigma {
            top.clone()
        } else if x >= x_sigma - 1.0 {
            &top * r(x - x_sigma + 1.0) + w.eval(x) * r(x_sigma - x)
        } else {
            w.eval(x)
        }
    };
    let steep = SoftWallProfile {
        dim: n,
        lipschitz,
        label: format!("steep({})", profile.label()),
        eval: Arc::new(eval),
        certify: None,
    }
    .with_saturation(-1.0 - f64::EPSILON, energy + 3.0 * c_ab + 1.0);
    Ok(SteepWall { profile: steep, sigma, x_sigma, energy, c_ab })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let s = SoftWallProfile::smooth_sqrt(1).unwrap();
        assert!((s.eval(0.0)[(0, 0)].re - 0.5).abs() < 1e-15);
        let r = SoftWallProfile::linear_ramp(0.7, 2).unwrap();
        assert_eq!(linalg::max_abs(&r.eval(2.0)), 0.0);
        assert!(linalg::max_abs_diff(&r.eval(-3.0), &linalg::scaled_identity(2, 2.1)) < 1e-15);
    }

    #[test]
    fn shifted_blocks_follow_n_minus_t() {
        let r = SoftWallProfile::linear_ramp(2.0, 1).unwrap();
        let b = r.shifted_blocks(0.5, 0..=0);
        assert!((b[0][(0, 0)].re - 1.0).abs() < 1e-15);
        let b0 = r.shifted_blocks(0.0, 0..=0);
        assert_eq!(b0.len(), 1);
        assert_eq!(b0[0][(0, 0)].re, 0.0);
    }

    #[test]
    fn integer_shift_is_translation() {
        let w = SoftWallProfile::diagonal(ScalarWall::SmoothSqrt, 1.0, vec![0.0, 0.25]).unwrap();
        let a = w.shifted_blocks(0.3, -5..=5);
        let b = w.shifted_blocks(1.3, -4..=6);
        for (x, y) in a.iter().zip(&b) {
            assert!(linalg::max_abs_diff(x, y) < 1e-14);
        }
    }

    #[test]
    fn zero_wall_spectrum_is_zero() {
        let sp = SoftWallProfile::zero(2).spectrum(0.4, -3..=3).unwrap();
        assert_eq!(sp.len(), 14);
        assert!(sp.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn level_points_invert_presets() {
        for shape in [ScalarWall::LinearRamp { nu: 0.5 }, ScalarWall::SmoothSqrt] {
            for level in [0.7, 3.0, 40.0] {
                let y = shape.level_point(level).unwrap();
                assert!((shape.eval(y) - level).abs() < 1e-9 * level.max(1.0));
                assert!(shape.eval(y - 1.0) >= level);
            }
        }
        assert_eq!(ScalarWall::LinearRamp { nu: 0.0 }.level_point(1.0), None);
    }

    #[test]
    fn table_interpolates_and_extends() {
        let m = |v: f64| linalg::real_diag(&[v]);
        let t = SoftWallProfile::custom_table(vec![-2.0, 0.0, 1.0], vec![m(4.0), m(0.0), m(0.0)]).unwrap();
        assert!((t.eval(-1.0)[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!((t.eval(-3.0)[(0, 0)].re - 6.0).abs() < 1e-15);
        assert_eq!(t.eval(5.0)[(0, 0)].re, 0.0);
        assert!((t.lipschitz() - 2.0).abs() < 1e-15);
        assert!(SoftWallProfile::custom_table(vec![0.0, 0.0], vec![m(1.0), m(0.0)]).is_err());
        assert!(SoftWallProfile::custom_table(vec![0.0], vec![m(1.0)]).is_err());
    }

    #[test]
    fn steep_wall_pieces() {
        let jac = PeriodicJacobi::ssh_real(1.5, 0.5);
        let w = SoftWallProfile::diagonal(ScalarWall::LinearRamp { nu: 1.0 }, 1.0, vec![0.0, 0.25]).unwrap();
        let s = steep_wall(&w, &jac, 0.0, None).unwrap();
        assert!((s.sigma - 7.0).abs() < 1e-12);
        assert_eq!(linalg::max_abs(&s.profile.eval(0.5)), 0.0);
        let top = &linalg::scaled_identity(2, 7.0) - jac.b();
        let half = &top * faer::Scale(linalg::c(0.5, 0.0));
        assert!(linalg::max_abs_diff(&s.profile.eval(-0.5), &half) < 1e-14);
        assert!(linalg::max_abs_diff(&s.profile.eval(-1.5), &top) < 1e-14);
        assert!(linalg::max_abs_diff(&s.profile.eval(s.x_sigma - 3.0), &w.eval(s.x_sigma - 3.0)) < 1e-14);
    }

    #[test]
    fn steep_wall_scans_when_uncertified() {
        let jac = PeriodicJacobi::ssh_real(1.5, 0.5);
        let w = SoftWallProfile::custom(2, 2.0, "ramp", |x| linalg::scaled_identity(2, (-2.0 * x).max(0.0))).unwrap();
        let s = steep_wall(&w, &jac, 0.0, None).unwrap();
        assert!(s.x_sigma <= -3.5);
        let flat = SoftWallProfile::zero(2);
        assert!(matches!(steep_wall(&flat, &jac, 0.0, None), Err(Error::SaturationNotFound { .. })));
    }

    #[test]
    fn steep_wall_rejects_low_sigma() {
        let jac = PeriodicJacobi::ssh_real(1.5, 0.5);
        let w = SoftWallProfile::linear_ramp(1.0, 2).unwrap();
        assert!(steep_wall(&w, &jac, 0.0, Some(6.0)).is_err());
        assert!(steep_wall(&w, &jac, 0.0, Some(9.0)).is_ok());
    }
}
