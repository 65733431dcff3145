//! Dimensions of the Bessel-model spaces Hom_H(pi, Ind sigma (x) psi') from
//! characters.
//!
//! The literal route sums chi_pi(h) conj(chi_Ind(h) psi'(h)) over all of H.
//! The reduced route computes the same number through Frobenius
//! reciprocity and Mackey's formula: for n < l it is an average over
//! Q_n N^{l-n}, for n = l a sum over the orbits of SO(2l) on the Siegel
//! cosets of SO(2l+1) of averages over the stabilizers. Both summands are
//! class functions, so each sum is taken over conjugacy classes.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genrep::{characters, CellAlgebra, GenericRep};
use crate::groups::{
    closure, embed_even_in_odd, embed_odd_in_even, levi_odd, psi_arg_prime, root_element,
    FiniteGroup, GroupSpec, SiegelCosets, DEFAULT_BUDGET,
};
use crate::mat::Mat;
use crate::numeric::{sum, C64};

use super::GlModel;

/// Characters of GL(n) and the coset data shared by all (pi, sigma).
#[derive(Debug)]
pub struct MultOneData {
    l: usize,
    n: usize,
    q: u32,
    /// chi_sigma(g) for every element g of GL(n): `chi[g][sigma]`.
    chi: Vec<Vec<C64>>,
    cosets: SiegelCosets,
    so_cosets: Vec<Mat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomDimension {
    pub pi: usize,
    pub n: usize,
    pub tau: usize,
    pub dim: i64,
    pub residual: f64,
}

impl MultOneData {
    pub fn build(so: &CellAlgebra, gl: &GlModel) -> Result<Self> {
        let (l, q) = (so.spec().rank, so.spec().q);
        let chi = characters(&gl.alg, gl.reps(), &gl.alg.coset_reps(), gl.group.elements());
        Ok(MultOneData {
            l,
            n: gl.n,
            q,
            chi,
            cosets: SiegelCosets::build(gl.n, q)?,
            so_cosets: so.coset_reps(),
        })
    }
}

/// Round the raw pairings and flag non-integral results.
fn finish(raw: Vec<Vec<C64>>, pis: &[usize], n: usize) -> Result<Vec<HomDimension>> {
    let mut out = Vec::new();
    for (row, &pi) in raw.iter().zip(pis) {
        for (tau, z) in row.iter().enumerate() {
            let dim = z.re.round();
            let residual = (z - C64::new(dim, 0.0)).norm();
            if residual >= 1e-6 {
                return Err(Error::Numerics(format!(
                    "hom dimension for pi {pi}, tau {tau} of GL({n}) is {z:.9}, not an integer"
                )));
            }
            out.push(HomDimension { pi, n, tau, dim: dim as i64, residual });
        }
    }
    Ok(out)
}

/// The unipotent group N^{l-n} of SO(2l).
pub fn bessel_unipotent(l: usize, n: usize, q: u32) -> Vec<Mat> {
    let k = l - n - 1;
    let size = 2 * l;
    let gens: Vec<Mat> = (0..k)
        .flat_map(|i| (i + 1..size - 1 - i).map(move |j| root_element(size, q, i, j, 1)))
        .collect();
    closure(&gens, size, q)
}

/// Conjugacy classes of the group generated by `gens` restricted to
/// `elems` (which must be closed under that conjugation): one
/// representative index and the class size each.
fn classes(elems: &[Mat], gens: &[Mat]) -> Vec<(usize, usize)> {
    let index: HashMap<u128, usize> = elems.iter().enumerate().map(|(i, g)| (g.key(), i)).collect();
    let pairs: Vec<(Mat, Mat)> = gens.iter().map(|g| (*g, g.inverse().expect("invertible"))).collect();
    let mut class = vec![usize::MAX; elems.len()];
    let mut out = Vec::new();
    for start in 0..elems.len() {
        if class[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        class[start] = id;
        let mut size = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for (g, gi) in &pairs {
                let j = index[&gi.mul(&elems[i]).mul(g).key()];
                if class[j] == usize::MAX {
                    class[j] = id;
                    size += 1;
                    queue.push_back(j);
                }
            }
        }
        out.push((start, size));
    }
    out
}

/// Elements, class data, sigma-side data and weight of one averaged sum.
type Piece = (Vec<Mat>, Vec<(usize, usize)>, Vec<(usize, u32)>, f64);

/// dim Hom_H(pi, Ind_{Q_n}^{SO(2n+1)} sigma (x) psi') for every listed pi
/// and every generic sigma of GL(n), by the reduced route.
pub fn hom_dimension(
    data: &MultOneData,
    so: &CellAlgebra,
    reps: &[GenericRep],
    pis: &[usize],
    gl: &GlModel,
) -> Result<Vec<HomDimension>> {
    let chosen: Vec<GenericRep> = pis.iter().map(|&p| reps[p].clone()).collect();
    // (group elements, their class data, and per element the GL index and
    // psi' argument of the sigma-side character), then weights.
    let mut pieces: Vec<Piece> = Vec::new();
    let (l, n, q) = (data.l, data.n, data.q);
    if n < l {
        let spec = GroupSpec::gl(n, q);
        let v_n: Vec<Mat> = crate::groups::odd_unipotent(n, q)
            .into_iter()
            .filter(crate::groups::in_siegel_radical)
            .collect();
        let nn = bessel_unipotent(l, n, q);
        let mut elems = Vec::new();
        let mut side = Vec::new();
        for (ai, a) in gl.group.elements().iter().enumerate() {
            let la = levi_odd(a);
            for v in &v_n {
                let p = embed_odd_in_even(&la.mul(v), l);
                for m in &nn {
                    elems.push(p.mul(m));
                    side.push((ai, psi_arg_prime(m, n)));
                }
            }
        }
        let mut gens: Vec<Mat> = spec
            .generators()
            .iter()
            .map(|a| embed_odd_in_even(&levi_odd(a), l))
            .collect();
        gens.extend(v_n.iter().map(|v| embed_odd_in_even(v, l)));
        gens.extend(nn.iter().filter(|m| !m.is_identity()).take(64).copied());
        let cls = classes(&elems, &gens);
        let weight = 1.0 / elems.len() as f64;
        pieces.push((elems, cls, side, weight));
    } else {
        for (elems, gens, side) in stabilizers(data, so, gl)? {
            let cls = classes(&elems, &gens);
            let weight = 1.0 / elems.len() as f64;
            pieces.push((elems, cls, side, weight));
        }
    }
    let mut raw = vec![vec![C64::new(0.0, 0.0); gl.len()]; chosen.len()];
    for (elems, cls, side, weight) in &pieces {
        let reps_g: Vec<Mat> = cls.iter().map(|&(i, _)| elems[i]).collect();
        let chi_pi = characters(so, &chosen, &data.so_cosets, &reps_g);
        for (k, &(i, size)) in cls.iter().enumerate() {
            let (ai, arg) = side[i];
            let psi = so.field().psi(arg);
            for (p, row) in raw.iter_mut().enumerate() {
                for (s, acc) in row.iter_mut().enumerate() {
                    *acc += chi_pi[k][p] * (data.chi[ai][s] * psi).conj() * (size as f64 * weight);
                }
            }
        }
    }
    finish(raw, pis, n)
}

/// Stabilizers in SO(2l) of one Siegel coset of SO(2l+1) per orbit, with
/// generators and the GL index of the Levi part of rep_i h rep_i^{-1} for
/// each element h.
#[allow(clippy::type_complexity)]
fn stabilizers(
    data: &MultOneData,
    so: &CellAlgebra,
    gl: &GlModel,
) -> Result<Vec<(Vec<Mat>, Vec<Mat>, Vec<(usize, u32)>)>> {
    let (l, q) = (data.l, data.q);
    let gens = so.spec().generators();
    let ggens: Vec<Mat> = gens.iter().map(embed_even_in_odd).collect();
    let act = |i: usize, g: &Mat| data.cosets.locate(&data.cosets.rep(i).mul(g)).0;
    let mut seen = vec![false; data.cosets.len()];
    let mut out = Vec::new();
    let order = so.group_order();
    for start in 0..data.cosets.len() {
        if seen[start] {
            continue;
        }
        // Orbit with transversal t_i (start . t_i = i).
        let mut trans: HashMap<usize, Mat> = HashMap::from([(start, Mat::identity(2 * l, q))]);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut orbit = vec![start];
        while let Some(i) = queue.pop_front() {
            for (s, gs) in gens.iter().zip(&ggens) {
                let j = act(i, gs);
                if !seen[j] {
                    seen[j] = true;
                    trans.insert(j, trans[&i].mul(s));
                    orbit.push(j);
                    queue.push_back(j);
                }
            }
        }
        let target = (order / orbit.len() as f64).round() as usize;
        // Schreier generators until the closure reaches |H| / |orbit|.
        let mut sgens: Vec<Mat> = Vec::new();
        let mut group = vec![Mat::identity(2 * l, q)];
        let mut members: std::collections::HashSet<u128> = group.iter().map(Mat::key).collect();
        'outer: for &i in &orbit {
            for (s, gs) in gens.iter().zip(&ggens) {
                let j = act(i, gs);
                let x = trans[&i].mul(s).mul(&trans[&j].inverse().expect("invertible"));
                if !members.contains(&x.key()) {
                    sgens.push(x);
                    group = closure(&sgens, 2 * l, q);
                    members = group.iter().map(Mat::key).collect();
                    if group.len() >= target {
                        break 'outer;
                    }
                }
            }
        }
        if group.len() != target {
            return Err(Error::Consistency(format!(
                "stabilizer of coset {start} has {} elements, expected {target}",
                group.len()
            )));
        }
        let rep = *data.cosets.rep(start);
        let side: Vec<(usize, u32)> = group
            .par_iter()
            .map(|h| {
                let (i, a) = data.cosets.locate(&rep.mul(&embed_even_in_odd(h)));
                debug_assert_eq!(i, start);
                (gl.group.idx(&a), 0)
            })
            .collect();
        out.push((group, sgens, side));
    }
    Ok(out)
}

/// The defining formula (1/|H|) sum over h in H of
/// chi_pi(h) conj(chi_Ind(h) psi'(h)), with H enumerated. Only for small
/// groups.
pub fn hom_dimension_literal(
    data: &MultOneData,
    so: &CellAlgebra,
    reps: &[GenericRep],
    pis: &[usize],
    gl: &GlModel,
) -> Result<Vec<HomDimension>> {
    let (l, n, q) = (data.l, data.n, data.q);
    let chosen: Vec<GenericRep> = pis.iter().map(|&p| reps[p].clone()).collect();
    // (element of SO(2l), its image in SO(2n+1) acting on the cosets, psi' argument)
    let mut hs: Vec<(Mat, Mat, u32)> = Vec::new();
    if n == l {
        let g = FiniteGroup::enumerate(GroupSpec::so_even(l, q), DEFAULT_BUDGET)?;
        hs.extend(g.elements().iter().map(|h| (*h, embed_even_in_odd(h), 0)));
    } else {
        let g = FiniteGroup::enumerate(GroupSpec::so_odd(n, q), DEFAULT_BUDGET)?;
        let nn = bessel_unipotent(l, n, q);
        for x in g.elements() {
            let e = embed_odd_in_even(x, l);
            hs.extend(nn.iter().map(|m| (e.mul(m), *x, psi_arg_prime(m, n))));
        }
    }
    let gs: Vec<Mat> = hs.iter().map(|h| h.0).collect();
    let chi_pi = characters(so, &chosen, &data.so_cosets, &gs);
    let chi_ind: Vec<Vec<C64>> = hs
        .par_iter()
        .map(|(_, x, _)| {
            let mut acc = vec![C64::new(0.0, 0.0); gl.len()];
            for i in 0..data.cosets.len() {
                let (j, a) = data.cosets.locate(&data.cosets.rep(i).mul(x));
                if j == i {
                    let row = &data.chi[gl.group.idx(&a)];
                    for (s, z) in acc.iter_mut().zip(row) {
                        *s += z;
                    }
                }
            }
            acc
        })
        .collect();
    let scale = 1.0 / hs.len() as f64;
    let raw = (0..chosen.len())
        .map(|p| {
            (0..gl.len())
                .map(|s| {
                    sum((0..hs.len()).map(|k| {
                        chi_pi[k][p] * (chi_ind[k][s] * so.field().psi(hs[k].2)).conj()
                    })) * scale
                })
                .collect()
        })
        .collect();
    finish(raw, pis, n)
}
