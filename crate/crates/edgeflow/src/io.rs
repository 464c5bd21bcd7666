//! JSON model files.
//!
//! ```json
//! {"kind": "jacobi", "b": {"re": [[0, 1.5], [1.5, 0]]}, "a": {"re": [[0, 0], [0.5, 0]]}}
//! ```
//!
//! Other kinds: `kernel1d` with `blocks: [{"n", "re", "im"?}]`, and
//! `tight_binding2d` with `a1`, `a2`, `atoms` and `blocks: [{"r": [i, j], "re", "im"?}]`.
//! Missing Hermitian partners are filled in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ConvolutionKernel, PeriodicJacobi};
use crate::lattice2d::{BravaisLattice2D, TightBinding2D, Vec2};
use crate::linalg::{self, CMat};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn to_mat(&self) -> Result<CMat> {
        linalg::from_parts(&self.re, self.im.as_deref())
    }

    pub fn from_mat(m: &CMat) -> Self {
        let re = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect();
        let has_im = im.iter().flatten().any(|&x| x != 0.0);
        Self { re, im: has_im.then_some(im) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block1d {
    pub n: i64,
    #[serde(flatten)]
    pub h: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block2d {
    pub r: [i64; 2],
    #[serde(flatten)]
    pub h: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelFile {
    Jacobi { b: MatrixJson, a: MatrixJson },
    Kernel1d { dim: usize, blocks: Vec<Block1d> },
    TightBinding2d { a1: Vec2, a2: Vec2, atoms: Vec<Vec2>, blocks: Vec<Block2d> },
}

/// A parsed model, one- or two-dimensional.
#[derive(Clone, Debug)]
pub enum Model {
    OneD(ConvolutionKernel),
    TwoD(TightBinding2D),
}

impl ModelFile {
    pub fn build(&self) -> Result<Model> {
        match self {
            ModelFile::Jacobi { b, a } => Ok(Model::OneD(PeriodicJacobi::new(b.to_mat()?, a.to_mat()?)?.kernel())),
            ModelFile::Kernel1d { dim, blocks } => {
                let pairs = blocks.iter().map(|b| Ok((b.n, b.h.to_mat()?))).collect::<Result<Vec<_>>>()?;
                Ok(Model::OneD(ConvolutionKernel::new(*dim, pairs)?))
            }
            ModelFile::TightBinding2d { a1, a2, atoms, blocks } => {
                let lattice = BravaisLattice2D::new(*a1, *a2, atoms.clone())?;
                let pairs = blocks.iter().map(|b| Ok(((b.r[0], b.r[1]), b.h.to_mat()?))).collect::<Result<Vec<_>>>()?;
                Ok(Model::TwoD(TightBinding2D::new(lattice, pairs)?))
            }
        }
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    // syntax errors keep their line and column; tagged-enum errors do not
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("model file: {e}")))?;
    let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::Parse(format!("model file: {e}")))?;
    file.build()
}
