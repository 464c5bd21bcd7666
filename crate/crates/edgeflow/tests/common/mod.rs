#![allow(dead_code)]

use edgeflow::kernel::ConvolutionKernel;
use edgeflow::linalg::{self, c, CMat};
use proptest::prelude::*;

pub fn mat_from(dim: usize, vals: &[(f64, f64)]) -> CMat {
    let mut m = linalg::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let (re, im) = vals[i * dim + j];
            m[(i, j)] = c(re, im);
        }
    }
    m
}

/// Random kernel with block size `1..=max_dim` and range `0..=max_range`.
pub fn kernel_strategy(max_dim: usize, max_range: usize) -> impl Strategy<Value = ConvolutionKernel> {
    (1..=max_dim, 0..=max_range).prop_flat_map(|(dim, range)| {
        let cells = range + 1;
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), cells * dim * dim).prop_map(move |vals| {
            let blocks = (0..cells).map(|n| {
                let m = mat_from(dim, &vals[n * dim * dim..(n + 1) * dim * dim]);
                let m = if n == 0 { (&m + &linalg::adjoint(&m)) * faer::Scale(c(0.5, 0.0)) } else { m };
                (-(n as i64), m)
            });
            ConvolutionKernel::new(dim, blocks.collect::<Vec<_>>()).unwrap()
        })
    })
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
