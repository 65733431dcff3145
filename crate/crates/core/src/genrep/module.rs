//! The induced model of Ind_U^G(psi): functions f on G with
//! f(u g) = psi(u) f(g), coordinates given by the values on fixed right
//! coset representatives, and G acting by right translation.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::groups::{FiniteGroup, UnipotentCosets};
use crate::mat::Mat;
use crate::numeric::C64;

use super::cells::CellAlgebra;

/// A monomial operator: `(A f)[k] = psi(args[k]) f[perm[k]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub perm: Vec<u32>,
    pub args: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct GgModule {
    group: Arc<FiniteGroup>,
    cosets: UnipotentCosets,
    /// Character argument of each element of U, in the order of `cosets.u`.
    u_args: Vec<u32>,
    rep_inv: Vec<Mat>,
    fq: Fq,
    id_coset: usize,
}

impl GgModule {
    /// The character is the one `alg` was built with.
    pub fn build(group: Arc<FiniteGroup>, alg: &CellAlgebra) -> Result<Self> {
        if group.spec() != alg.spec() {
            return Err(Error::Domain("module and Hecke data describe different groups".into()));
        }
        let cosets = UnipotentCosets::build(&group);
        let u_args = cosets.char_args(&group, |u| alg.arg(u));
        let rep_inv = cosets
            .reps
            .iter()
            .map(|&r| group.element(r as usize).inverse().expect("invertible"))
            .collect();
        let id_coset = cosets.coset_of[group.identity_index()] as usize;
        Ok(GgModule {
            fq: alg.field().clone(),
            group,
            cosets,
            u_args,
            rep_inv,
            id_coset,
        })
    }

    pub fn dim(&self) -> usize {
        self.cosets.len()
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn cosets(&self) -> &UnipotentCosets {
        &self.cosets
    }

    pub fn identity_coset(&self) -> usize {
        self.id_coset
    }

    /// Coset and character argument of a group element: g = u r_k.
    pub fn split(&self, gi: usize) -> (usize, u32) {
        (
            self.cosets.coset_of[gi] as usize,
            self.u_args[self.cosets.u_of[gi] as usize],
        )
    }

    /// Value at element index `gi` of the function with coordinates `v`.
    pub fn value(&self, v: &[C64], gi: usize) -> C64 {
        let (k, a) = self.split(gi);
        self.fq.psi(a) * v[k]
    }

    /// Right translation by g.
    pub fn action(&self, g: &Mat) -> Monomial {
        let (perm, args) = self
            .cosets
            .reps
            .iter()
            .map(|&r| {
                let (k, a) = self.split(self.group.idx(&self.group.element(r as usize).mul(g)));
                (k as u32, a)
            })
            .unzip();
        Monomial { perm, args }
    }

    /// `A m` for a monomial A.
    pub fn apply(&self, a: &Monomial, m: &DMatrix<C64>) -> DMatrix<C64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            self.fq.psi(a.args[r]) * m[(a.perm[r] as usize, c)]
        })
    }

    pub fn action_matrix(&self, g: &Mat) -> DMatrix<C64> {
        let a = self.action(g);
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for r in 0..self.dim() {
            m[(r, a.perm[r] as usize)] = self.fq.psi(a.args[r]);
        }
        m
    }

    /// trace(V* rho(g) V) for an orthonormal basis V of an invariant space.
    pub fn trace_on(&self, space: &DMatrix<C64>, g: &Mat) -> C64 {
        let a = self.action(g);
        let mut s = C64::new(0.0, 0.0);
        for r in 0..self.dim() {
            let ph = self.fq.psi(a.args[r]);
            let src = a.perm[r] as usize;
            for c in 0..space.ncols() {
                s += space[(r, c)].conj() * ph * space[(src, c)];
            }
        }
        s
    }

    /// (1/|H|) sum over h in H of rho(h).
    pub fn average(&self, subgroup: &[Mat], weight: impl Fn(&Mat) -> C64) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for h in subgroup {
            let a = self.action(h);
            let c = weight(h);
            for r in 0..self.dim() {
                m[(r, a.perm[r] as usize)] += c * self.fq.psi(a.args[r]);
            }
        }
        m / C64::new(subgroup.len() as f64, 0.0)
    }

    /// E_psi = (1/|U|) sum psi(u)^{-1} rho(u): projection onto the
    /// psi-eigenvectors of U.
    pub fn whittaker_projector(&self) -> DMatrix<C64> {
        let us: Vec<Mat> = self.cosets.u.iter().map(|&i| *self.group.element(i as usize)).collect();
        let args = self.u_args.clone();
        let pos: std::collections::HashMap<u128, usize> =
            us.iter().enumerate().map(|(k, u)| (u.key(), k)).collect();
        self.average(&us, |u| self.fq.psi(args[pos[&u.key()]]).conj())
    }

    /// Random bi-equivariant kernel: a combination of the psi-averages of
    /// point masses at `terms` random elements.
    pub fn random_kernel<R: Rng>(&self, rng: &mut R, terms: usize) -> Vec<C64> {
        let g = &self.group;
        let mut k = vec![C64::new(0.0, 0.0); g.order()];
        let us: Vec<(Mat, C64)> = self
            .cosets
            .u
            .iter()
            .zip(&self.u_args)
            .map(|(&i, &a)| (*g.element(i as usize), self.fq.psi(a)))
            .collect();
        for _ in 0..terms {
            let g0 = *g.element(rng.random_range(0..g.order()));
            let c = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            for (a, pa) in &us {
                let ag = a.mul(&g0);
                for (b, pb) in &us {
                    k[g.idx(&ag.mul(b))] += c * pa * pb;
                }
            }
        }
        k
    }

    /// Left convolution by a bi-equivariant kernel: T[k, j] = K(r_k r_j^{-1}),
    /// up to the factor |U|.
    pub fn hecke_matrix(&self, kernel: &[C64]) -> DMatrix<C64> {
        let g = &self.group;
        let reps: Vec<Mat> = self.cosets.reps.iter().map(|&r| *g.element(r as usize)).collect();
        DMatrix::from_fn(self.dim(), self.dim(), |k, j| {
            kernel[g.idx(&reps[k].mul(&self.rep_inv[j]))]
        })
    }

    /// Coordinates of the Whittaker vector of an irreducible constituent,
    /// scaled to 1 at the identity coset.
    pub fn whittaker_vector(&self, space: &DMatrix<C64>, e: &DMatrix<C64>) -> Result<Vec<C64>> {
        let k0 = self.id_coset;
        let v0 = space * (space.adjoint() * e.column(k0));
        let gamma = v0[k0];
        if gamma.norm() < 1e-10 {
            return Err(Error::NotGeneric("Whittaker vector vanishes at the identity".into()));
        }
        Ok(v0.iter().map(|z| z / gamma).collect())
    }

    /// Values of a module vector on every group element.
    pub fn table(&self, v: &[C64]) -> Vec<C64> {
        (0..self.group.order()).map(|i| self.value(v, i)).collect()
    }

    /// Hermitian part of a random Hecke operator.
    pub fn random_hermitian<R: Rng>(&self, rng: &mut R) -> DMatrix<C64> {
        let t = self.hecke_matrix(&self.random_kernel(rng, 4));
        &t + t.adjoint()
    }
}
