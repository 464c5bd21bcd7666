//! Thin layer over faer's dense self-adjoint eigensolver.
//!
//! Matrices whose imaginary parts vanish identically are routed through the
//! real symmetric solver, which is several times faster and returns the
//! same spectrum.

use faer::{Mat, Side};

use crate::error::{Error, Result};

pub type C64 = faer::c64;
pub type CMat = Mat<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn scaled_identity(n: usize, s: f64) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { c(s, 0.0) } else { C64::ZERO })
}

pub fn real_diag(values: &[f64]) -> CMat {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { C64::ZERO })
}

/// Builds a matrix from row-major real and imaginary parts.
pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<CMat> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if re.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged real part".into()));
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("imaginary part shape differs from real part".into()));
        }
    }
    Ok(Mat::from_fn(rows, cols, |i, j| {
        c(re[i][j], im.map_or(0.0, |m| m[i][j]))
    }))
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn hermiticity_defect(a: &CMat) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..=j {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

fn is_real(a: &CMat) -> bool {
    (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].im == 0.0))
}

/// Largest singular value; zero for empty or zero matrices.
pub fn op_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 || max_abs(a) == 0.0 {
        return 0.0;
    }
    match a.singular_values() {
        Ok(s) => s.into_iter().fold(0.0, f64::max),
        Err(_) => a.norm_l2(),
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the lower
/// triangle is read.
pub fn eigvalsh(a: &CMat) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut ev = if is_real(a) {
        let r = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)].re);
        r.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::Eigensolver { dim: n })?
    } else {
        a.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::Eigensolver { dim: n })?
    };
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenpairs of a Hermitian matrix; column `j` of the returned matrix is the
/// unit eigenvector for the `j`-th ascending eigenvalue.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let (vals, vecs): (Vec<f64>, CMat) = if is_real(a) {
        let r = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)].re);
        let e = r
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::Eigensolver { dim: n })?;
        let s = e.S();
        let u = e.U();
        (
            (0..n).map(|i| s[i]).collect(),
            Mat::from_fn(n, n, |i, j| c(u[(i, j)], 0.0)),
        )
    } else {
        let e = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::Eigensolver { dim: n })?;
        let s = e.S();
        ((0..n).map(|i| s[i].re).collect(), e.U().to_owned())
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return Ok((vals, vecs));
    }
    let sorted_vals = order.iter().map(|&o| vals[o]).collect();
    let sorted_vecs = Mat::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok((sorted_vals, sorted_vecs))
}

/// Adds `blk` into `dst` with its top-left corner at `(row, col)`.
pub fn add_block(dst: &mut CMat, row: usize, col: usize, blk: &CMat) {
    for j in 0..blk.ncols() {
        for i in 0..blk.nrows() {
            dst[(row + i, col + j)] += blk[(i, j)];
        }
    }
}

pub fn block(src: &CMat, row: usize, col: usize, rows: usize, cols: usize) -> CMat {
    src.submatrix(row, col, rows, cols).to_owned()
}

/// Number of entries of a sorted slice strictly below `x`.
pub fn count_below(sorted: &[f64], x: f64) -> usize {
    sorted.partition_point(|&v| v < x)
}

/// Number of entries in the open interval `(lo, hi)`; zero when `hi <= lo`.
pub fn count_open(sorted: &[f64], lo: f64, hi: f64) -> usize {
    if hi <= lo {
        return 0;
    }
    let a = sorted.partition_point(|&v| v <= lo);
    let b = sorted.partition_point(|&v| v < hi);
    b.saturating_sub(a)
}
