//! Cell-restricted pieces of the n = l integral, the position of embedded
//! cells relative to the Siegel open cell, and the support and values of
//! intertwined sections.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genrep::{BesselFn, CellAlgebra};
use crate::groups::{embed_even_in_odd, siegel_decompose, w_ll, FiniteGroup, Siegel};
use crate::mat::Mat;
use crate::numeric::{sum, CHUNK, C64};
use crate::weyl::{cell_classes, CellClass, WeylElement};

use super::Twist;

/// How the unipotent variable of a cell sum is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellMeasure {
    /// Each coset U t w u once: the restriction of the integral itself.
    Cosets,
    /// t w u over all of U, as the sums are written in the lemmas.
    Unipotent,
}

/// Cells and torus elements a restricted sum runs over.
#[derive(Debug, Clone)]
pub struct CellSumSpec {
    pub cells: Vec<WeylElement>,
    pub torus: Vec<Mat>,
}

/// Sum over t in `torus`, w in `cells`, u of B(t w u) f(w_{l,l} t w u, I),
/// one row per Bessel function and one column per section (n = l only).
pub fn cell_sums(
    twist: &Twist,
    so: &CellAlgebra,
    bs: &[&BesselFn],
    fs: &[super::Section],
    spec: &CellSumSpec,
    measure: CellMeasure,
) -> Result<Vec<Vec<C64>>> {
    if twist.n() != twist.l() {
        return Err(Error::Domain("cell sums belong to the n = l integral".into()));
    }
    let q = so.spec().q;
    let wll = w_ll(twist.l(), q);
    let mut elems: Vec<(Mat, f64)> = Vec::new();
    for w in &spec.cells {
        let wm = w.to_matrix(q);
        let wi = wm.inverse().expect("permutation");
        let short: Vec<&Mat> = so
            .unipotent()
            .iter()
            .filter(|u| wm.mul(u).mul(&wi).transpose().is_upper_unitriangular())
            .collect();
        let weight = match measure {
            CellMeasure::Cosets => 1.0,
            CellMeasure::Unipotent => (so.unipotent().len() / short.len()) as f64,
        };
        for t in &spec.torus {
            let tw = t.mul(&wm);
            elems.extend(short.iter().map(|u| (tw.mul(u), weight)));
        }
    }
    let (nb, nf) = (bs.len(), fs.len());
    let chunks: Vec<Vec<C64>> = elems
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![C64::new(0.0, 0.0); nb * nf];
            for (g, weight) in chunk {
                let Some((c, ph)) = so.locate(g) else { continue };
                let p = so.field().psi(ph) * weight;
                let vals = twist.values_at(fs, &wll.mul(&embed_even_in_odd(g)));
                for (i, b) in bs.iter().enumerate() {
                    let bv = b.coeffs[c] * p;
                    for (j, v) in vals.iter().enumerate() {
                        acc[i * nf + j] += bv * v;
                    }
                }
            }
            acc
        })
        .collect();
    Ok((0..nb)
        .map(|i| (0..nf).map(|j| sum(chunks.iter().map(|c| c[i * nf + j]))).collect())
        .collect())
}

/// The torus pieces of the B_{l-1} identity: T_l (t_l != +-c_l, with c_l = 1
/// for l odd and 1/2 for l even) and the half A_l of it picked out by the
/// involution t_l -> t_l^{-1} (l odd) or t_l -> t_l^{-1}/4 (l even): t is in
/// A_l when t_l is the smaller of the pair.
pub fn torus_split(so: &CellAlgebra) -> (Vec<Mat>, Vec<Mat>) {
    let l = so.spec().rank;
    let f = so.field();
    let c = if l % 2 == 1 { 1 } else { f.half() };
    let flip = |x: u32| if l % 2 == 1 { f.inv(x) } else { f.mul(f.inv(x), f.quarter()) };
    let t_l: Vec<Mat> = so
        .torus()
        .iter()
        .filter(|t| {
            let x = t.get(l - 1, l - 1);
            x != c && x != f.neg(c)
        })
        .copied()
        .collect();
    let a_l = t_l
        .iter()
        .filter(|t| {
            let x = t.get(l - 1, l - 1);
            x < flip(x)
        })
        .copied()
        .collect();
    (t_l, a_l)
}

/// Whether the embedded t w lies in Q_l w_l V_l, with the predicted answer.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub class: CellClass,
    pub w: WeylElement,
    pub t: Mat,
    pub open: bool,
    pub predicted: bool,
}

/// Every t in the torus against every w in the classes B_{l-1}, B_l and
/// B_l^c. For B_{l-1} the prediction is t_l != 1 (l odd) or t_l != -1/2
/// (l even); the other two classes embed into the open cell for all t.
pub fn membership_table(so: &CellAlgebra) -> Result<Vec<Membership>> {
    let spec = so.spec();
    let (l, q) = (spec.rank, spec.q);
    let f = so.field();
    let excluded = if l % 2 == 1 { 1 } else { f.neg(f.half()) };
    let classes = cell_classes(l);
    let mut out = Vec::new();
    for class in [CellClass::Twist(l - 1), CellClass::Top, CellClass::TopConj] {
        for w in &classes[&class] {
            let wm = w.to_matrix(q);
            for t in so.torus() {
                let open = matches!(
                    siegel_decompose(&embed_even_in_odd(&t.mul(&wm)))?,
                    Siegel::OpenCell { .. }
                );
                let predicted = class != CellClass::Twist(l - 1) || t.get(l - 1, l - 1) != excluded;
                out.push(Membership { class, w: w.clone(), t: *t, open, predicted });
            }
        }
    }
    Ok(out)
}

/// Outcome of the exhaustive check of the support and values of the
/// intertwined f_v over an enumerated SO(2n+1).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LemmaFiveTwo {
    pub elements: usize,
    pub open_cell: usize,
    /// Elements outside Q_n w_n V_n where some intertwined f_v is nonzero.
    pub support_violations: usize,
    /// Largest |f~_v(l_n(a) n1 w_n n2, I) - W*_v(a)| over the open cell.
    pub max_value_error: f64,
    /// Elements where "f_v(g, I) may be nonzero" (g in the identity Siegel
    /// coset) disagrees with the block classification g in Q_n.
    pub support_mismatch: usize,
}

/// Checks, for every tau and v = the default vector, that f~_v(., I) vanishes
/// off Q_n w_n V_n, that f~_v(l_n(a) n1 w_n n2, I) = v(d_n a*), and that the
/// support of f_v is exactly Q_n.
pub fn lemma_five_two(twist: &Twist, odd: &FiniteGroup, tol: f64) -> Result<LemmaFiveTwo> {
    if odd.spec().rank != twist.n() {
        return Err(Error::Domain("group does not match the twist".into()));
    }
    lemma_five_two_on(twist, odd.elements(), tol)
}

/// The same checks over a given list of elements of SO(2n+1), for groups
/// too large to enumerate.
pub fn lemma_five_two_on(twist: &Twist, elements: &[Mat], tol: f64) -> Result<LemmaFiveTwo> {
    let n = twist.n();
    if elements.iter().any(|g| g.n() != 2 * n + 1) {
        return Err(Error::Domain("elements do not match the twist".into()));
    }
    let gl = twist.gl();
    let vs: Vec<Vec<C64>> = (0..gl.len()).map(|t| twist.default_vector(t)).collect();
    let id = twist.identity_coset();
    let d = *twist.d_n();
    let parts: Vec<LemmaFiveTwo> = elements
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut r = LemmaFiveTwo::default();
            for g in chunk {
                r.elements += 1;
                let hits = twist.locate_intertwined(g);
                let in_q = twist.cosets().locate(g).0 == id;
                let class = siegel_decompose(g).expect("orthogonal element");
                if in_q != matches!(class, Siegel::Parabolic { .. }) {
                    r.support_mismatch += 1;
                }
                for v in &vs {
                    let ft = sum(hits.iter().filter(|h| h.0 as usize == id).map(|h| v[h.1 as usize]));
                    match class {
                        Siegel::OpenCell { a: a1, .. } => {
                            let want = gl.value(v, &d.mul(&a1.star().expect("invertible")));
                            r.max_value_error = r.max_value_error.max((ft - want).norm());
                        }
                        _ if ft.norm() > tol => r.support_violations += 1,
                        _ => {}
                    }
                }
                if matches!(class, Siegel::OpenCell { .. }) {
                    r.open_cell += 1;
                }
            }
            r
        })
        .collect();
    Ok(parts.into_iter().fold(LemmaFiveTwo::default(), |a, b| LemmaFiveTwo {
        elements: a.elements + b.elements,
        open_cell: a.open_cell + b.open_cell,
        support_violations: a.support_violations + b.support_violations,
        max_value_error: a.max_value_error.max(b.max_value_error),
        support_mismatch: a.support_mismatch + b.support_mismatch,
    }))
}
