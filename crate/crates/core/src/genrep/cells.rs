//! The Hecke algebra of a Gelfand-Graev representation, realized on the
//! double cosets U n U with n = t w a torus element times a 0/1 Weyl
//! matrix. Group elements are placed in their double coset through the
//! Bruhat decomposition, so nothing here needs the group enumerated.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::groups::{
    bruhat_decompose, closure, psi_arg_gl, psi_arg_so_even, root_element, GroupKind, GroupSpec,
};
use crate::mat::Mat;
use crate::numeric::C64;
use crate::weyl;

/// A positive root: its coefficients in the simple roots and x_beta(1).
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub coeffs: Vec<i32>,
    pub x: Mat,
}

/// A double coset U n U carrying a nonzero bi-equivariant function.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub n: Mat,
    pub t: Mat,
    pub w: Mat,
    /// |U n U|.
    pub size: f64,
    /// |U n U| / |U|, the number of left factors in the Bruhat normal form.
    pub left: f64,
}

/// Hecke algebra data of Ind_U^G(psi) for G = SO(2l) or GL(n).
#[derive(Debug, Clone)]
pub struct CellAlgebra {
    spec: GroupSpec,
    fq: Fq,
    dual: bool,
    unipotent: Vec<Mat>,
    u_args: Vec<u32>,
    roots: Vec<RootDatum>,
    torus: Vec<Mat>,
    weyl: Vec<Mat>,
    cells: Vec<Cell>,
    index: HashMap<u128, u32>,
    identity: usize,
}

impl CellAlgebra {
    /// `dual` selects psi^{-1} in place of psi.
    pub fn build(spec: GroupSpec, dual: bool) -> Result<Self> {
        spec.validate()?;
        let q = spec.q;
        let fq = Fq::new(q)?;
        let size = spec.dim();
        let (roots, torus, weyl) = match spec.kind {
            GroupKind::SoEven => so_even_data(spec.rank, q),
            GroupKind::Gl => gl_data(spec.rank, q),
            GroupKind::SoOdd => {
                return Err(Error::Domain("Gelfand-Graev data is built for SO(2l) and GL(n)".into()))
            }
        };
        let gens: Vec<Mat> = roots.iter().map(|r| r.x).collect();
        let unipotent = closure(&gens, size, q);
        if unipotent.len() as u128 != spec.unipotent_order() {
            return Err(Error::Consistency("unipotent closure has the wrong order".into()));
        }
        let mut alg = CellAlgebra {
            spec,
            fq,
            dual,
            u_args: Vec::new(),
            unipotent,
            roots,
            torus,
            weyl,
            cells: Vec::new(),
            index: HashMap::new(),
            identity: 0,
        };
        alg.u_args = alg.unipotent.iter().map(|u| alg.arg(u)).collect();
        let u_order = alg.unipotent.len() as f64;
        for w in &alg.weyl {
            for t in &alg.torus {
                let n = t.mul(w);
                let n_inv = n.inverse().expect("invertible");
                let mut fixed = 0;
                let mut relevant = true;
                for r in &alg.roots {
                    let y = n_inv.mul(&r.x).mul(&n);
                    if y.is_upper_unitriangular() {
                        fixed += 1;
                        relevant &= alg.arg(&r.x) == alg.arg(&y);
                    }
                }
                if relevant {
                    let left = (q as f64).powi((alg.roots.len() - fixed) as i32);
                    alg.index.insert(n.key(), alg.cells.len() as u32);
                    alg.cells.push(Cell { n, t: *t, w: *w, size: u_order * left, left });
                }
            }
        }
        alg.identity = alg.index[&Mat::identity(size, q).key()] as usize;
        Ok(alg)
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn identity_cell(&self) -> usize {
        self.identity
    }

    pub fn unipotent(&self) -> &[Mat] {
        &self.unipotent
    }

    pub fn roots(&self) -> &[RootDatum] {
        &self.roots
    }

    pub fn torus(&self) -> &[Mat] {
        &self.torus
    }

    pub fn weyl(&self) -> &[Mat] {
        &self.weyl
    }

    pub fn group_order(&self) -> f64 {
        self.spec.expected_order() as f64
    }

    /// Number of right cosets U g.
    pub fn coset_count(&self) -> f64 {
        self.group_order() / self.unipotent.len() as f64
    }

    /// Argument of the generic character (or its inverse) at u in U.
    pub fn arg(&self, u: &Mat) -> u32 {
        let a = match self.spec.kind {
            GroupKind::SoEven => psi_arg_so_even(u),
            _ => psi_arg_gl(u),
        };
        if self.dual {
            self.fq.neg(a)
        } else {
            a
        }
    }

    pub fn character(&self, u: &Mat) -> C64 {
        self.fq.psi(self.arg(u))
    }

    /// Cell of g with the phase of g relative to its representative, or
    /// `None` when every bi-equivariant function vanishes at g.
    pub fn locate(&self, g: &Mat) -> Option<(usize, u32)> {
        let b = bruhat_decompose(g).ok()?;
        let c = *self.index.get(&b.t.mul(&b.w).key())? as usize;
        Some((c, self.fq.add(self.arg(&b.u1), self.arg(&b.u2))))
    }

    /// Value at g of the function with the given values on the cell
    /// representatives.
    pub fn eval(&self, coeffs: &[C64], g: &Mat) -> C64 {
        match self.locate(g) {
            Some((c, a)) => coeffs[c] * self.fq.psi(a),
            None => C64::new(0.0, 0.0),
        }
    }

    /// Matrices of left convolution by each basis function K_a, where K_a
    /// is supported on cell a with K_a(n_a) = 1. Entry (d, b) of the a-th
    /// matrix is (K_a * K_b)(n_d).
    pub fn structure_constants(&self) -> Vec<DMatrix<C64>> {
        let n = self.cells.len();
        let u_inv: Vec<(Mat, C64)> = self
            .unipotent
            .iter()
            .map(|u| (u.inverse().expect("unitriangular"), self.character(u)))
            .collect();
        let rows: Vec<Vec<(usize, usize, C64)>> = (0..n)
            .into_par_iter()
            .map(|d| {
                let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
                for (b, cb) in self.cells.iter().enumerate() {
                    let nb_inv = cb.n.inverse().expect("invertible");
                    for (ui, chi) in &u_inv {
                        let z = self.cells[d].n.mul(ui).mul(&nb_inv);
                        if let Some((a, ph)) = self.locate(&z) {
                            *acc.entry((a, b)).or_default() += chi * self.fq.psi(ph) * cb.left;
                        }
                    }
                }
                let mut v: Vec<_> = acc.into_iter().map(|((a, b), z)| (a, b, z)).collect();
                v.sort_by_key(|&(a, b, _)| (a, b));
                v
            })
            .collect();
        let mut out = vec![DMatrix::zeros(n, n); n];
        for (d, row) in rows.into_iter().enumerate() {
            for (a, b, z) in row {
                out[a][(d, b)] = z;
            }
        }
        out
    }

    /// Representatives t w u of U\G, with u in U and w u w^{-1} lower
    /// triangular.
    pub fn coset_reps(&self) -> Vec<Mat> {
        let mut out = Vec::new();
        for w in &self.weyl {
            let w_inv = w.inverse().expect("permutation");
            let short: Vec<&Mat> = self
                .unipotent
                .iter()
                .filter(|u| w.mul(u).mul(&w_inv).transpose().is_upper_unitriangular())
                .collect();
            for t in &self.torus {
                let tw = t.mul(w);
                out.extend(short.iter().map(|u| tw.mul(u)));
            }
        }
        out
    }

    /// Unipotent radicals of the maximal standard parabolics, one for each
    /// simple root.
    pub fn parabolic_radicals(&self) -> Vec<Vec<Mat>> {
        let rank = self.roots.first().map_or(0, |r| r.coeffs.len());
        (0..rank)
            .map(|k| {
                let gens: Vec<Mat> = self
                    .roots
                    .iter()
                    .filter(|r| r.coeffs[k] > 0)
                    .map(|r| r.x)
                    .collect();
                closure(&gens, self.spec.dim(), self.spec.q)
            })
            .collect()
    }

    /// Central elements: the scalar matrices lying in the group.
    pub fn center(&self) -> Vec<Mat> {
        let size = self.spec.dim();
        self.fq
            .units()
            .map(|s| Mat::identity(size, self.spec.q).scale(s))
            .filter(|z| self.spec.contains(z))
            .collect()
    }
}

fn so_even_data(l: usize, q: u32) -> (Vec<RootDatum>, Vec<Mat>, Vec<Mat>) {
    let size = 2 * l;
    let mut roots = Vec::new();
    for i in 0..l {
        for j in i + 1..size - 1 - i {
            let mut a = vec![0; l];
            a[i] += 1;
            if j < l {
                a[j] -= 1;
            } else {
                a[size - 1 - j] += 1;
            }
            roots.push(RootDatum {
                coeffs: weyl::simple_coefficients(&a),
                x: root_element(size, q, i, j, 1),
            });
        }
    }
    let fq = Fq::new(q).expect("valid field");
    let torus = tuples(l, q)
        .into_iter()
        .map(|t| {
            let mut d = t.clone();
            d.extend(t.iter().rev().map(|&x| fq.inv(x)));
            Mat::diag(q, &d)
        })
        .collect();
    let weyl = weyl::all_elements(l).iter().map(|w| w.to_matrix(q)).collect();
    (roots, torus, weyl)
}

fn gl_data(n: usize, q: u32) -> (Vec<RootDatum>, Vec<Mat>, Vec<Mat>) {
    let mut roots = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut x = Mat::identity(n, q);
            x.set(i, j, 1);
            let coeffs = (0..n - 1).map(|k| (i <= k && k < j) as i32).collect();
            roots.push(RootDatum { coeffs, x });
        }
    }
    let torus = tuples(n, q).iter().map(|t| Mat::diag(q, t)).collect();
    let weyl = weyl::permutations(n)
        .iter()
        .map(|p| Mat::from_fn(n, q, |i, j| (p[i] == j) as i64))
        .collect();
    (roots, torus, weyl)
}

/// All k-tuples of units, in lexicographic order.
fn tuples(k: usize, q: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..q).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FiniteGroup, DEFAULT_BUDGET};

    #[test]
    fn coset_reps_count_and_distinct() {
        for spec in [GroupSpec::so_even(2, 3), GroupSpec::gl(2, 5), GroupSpec::gl(3, 3)] {
            let alg = CellAlgebra::build(spec, false).unwrap();
            let reps = alg.coset_reps();
            assert_eq!(reps.len() as f64, alg.coset_count());
            let g = FiniteGroup::enumerate(spec, DEFAULT_BUDGET).unwrap();
            let cosets = crate::groups::UnipotentCosets::build(&g);
            let mut seen = std::collections::HashSet::new();
            for r in &reps {
                assert!(seen.insert(cosets.coset_of[g.idx(r)]));
            }
        }
    }

    #[test]
    fn cells_cover_relevant_double_cosets() {
        // the cells partition the support of bi-equivariant functions
        let spec = GroupSpec::so_even(2, 3);
        let alg = CellAlgebra::build(spec, false).unwrap();
        let g = FiniteGroup::enumerate(spec, DEFAULT_BUDGET).unwrap();
        let mut sizes = vec![0.0; alg.len()];
        for x in g.elements() {
            if let Some((c, _)) = alg.locate(x) {
                sizes[c] += 1.0;
            }
        }
        for (c, s) in alg.cells().iter().zip(&sizes) {
            assert_eq!(c.size, *s);
        }
    }

    #[test]
    fn radical_orders() {
        let alg = CellAlgebra::build(GroupSpec::gl(3, 3), false).unwrap();
        let sizes: Vec<usize> = alg.parabolic_radicals().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![9, 9]);
        let alg = CellAlgebra::build(GroupSpec::so_even(3, 3), false).unwrap();
        let mut sizes: Vec<usize> = alg.parabolic_radicals().iter().map(Vec::len).collect();
        sizes.sort();
        // D_3 = A_3: radicals of dimensions 3, 3 and 4
        assert_eq!(sizes, vec![27, 27, 81]);
        assert_eq!(alg.center().len(), 2);
    }
}
