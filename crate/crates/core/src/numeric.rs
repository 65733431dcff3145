//! Complex arithmetic helpers: compensated and order-stable reductions,
//! Hermitian eigendecomposition and rank.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::Range;

pub type C64 = Complex64;

/// Chunk length for parallel reductions. Fixed so results do not depend on
/// the thread count.
pub const CHUNK: usize = 1024;

/// Numerical tolerances shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub eq_abs: f64,
    pub gamma_rel: f64,
    pub eig_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq_abs: 1e-8,
            gamma_rel: 1e-6,
            eig_gap: 1e-6,
        }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedSum {
    pub fn add(&mut self, z: C64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

pub fn sum<I: IntoIterator<Item = C64>>(it: I) -> C64 {
    let mut s = CompensatedSum::default();
    for z in it {
        s.add(z);
    }
    s.value()
}

/// Sum of `f(i)` for `i` in `0..len`, computed in fixed chunks in parallel
/// and combined in index order.
pub fn par_sum<F>(len: usize, f: F) -> C64
where
    F: Fn(usize) -> C64 + Sync,
{
    let chunks: Vec<C64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| sum((c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f)))
        .collect();
    sum(chunks)
}

/// Maximum of a nonnegative quantity over `0..len`, in parallel.
pub fn par_max<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..len).into_par_iter().map(&f).reduce(|| 0.0, f64::max)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (as columns). Only the lower triangle of `m` is read.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Group sorted values into runs whose consecutive gaps are below `gap`.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Number of singular values above `tol`.
pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Frobenius norm.
pub fn frob(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
