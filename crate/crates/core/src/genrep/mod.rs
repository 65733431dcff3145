//! Generic irreducible representations as the constituents of the
//! Gelfand-Graev representation Ind_U^G(psi), each with its normalized
//! Bessel function.
//!
//! Two routes produce the same list. The module route splits the induced
//! model into eigenspaces of random self-adjoint Hecke operators and needs
//! the group enumerated. The algebra route diagonalizes the Hecke algebra
//! itself in its basis of relevant double cosets: a Bessel function is a
//! common eigenvector of left convolution, normalized to 1 at the identity.
//! The second route is the one that scales.

mod cells;
mod module;

use std::cmp::Ordering;

use nalgebra::DMatrix;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use cells::{Cell, CellAlgebra, RootDatum};
pub use module::{GgModule, Monomial};

use crate::error::{Error, Result};
use crate::groups::{c_matrix, t_tilde, FiniteGroup, GroupKind};
use crate::mat::Mat;
use crate::numeric::{cluster_sorted, frob, hermitian_eigen, rank, Tolerances, C64};

/// Nested refinements allowed before a split is declared degenerate.
pub const MAX_SPLIT_DEPTH: usize = 8;

/// A bi-equivariant function, stored by its values on the cell
/// representatives of a [`CellAlgebra`].
#[derive(Debug, Clone, PartialEq)]
pub struct BesselFn {
    pub coeffs: Vec<C64>,
}

impl BesselFn {
    pub fn eval(&self, alg: &CellAlgebra, g: &Mat) -> C64 {
        alg.eval(&self.coeffs, g)
    }

    /// Values on every element of an enumerated group, in index order.
    pub fn table(&self, alg: &CellAlgebra, group: &FiniteGroup) -> Vec<C64> {
        group.elements().par_iter().map(|g| self.eval(alg, g)).collect()
    }

    /// Sum over the group of |B|^2.
    pub fn norm_sqr(&self, alg: &CellAlgebra) -> f64 {
        alg.cells()
            .iter()
            .zip(&self.coeffs)
            .map(|(c, z)| c.size * z.norm_sqr())
            .sum()
    }

    pub fn distance(&self, other: &BesselFn) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// One psi-generic irreducible representation.
#[derive(Debug, Clone)]
pub struct GenericRep {
    pub dim: usize,
    pub bessel: BesselFn,
    /// Central character on `CellAlgebra::center`, in that order.
    pub central: Vec<C64>,
    pub cuspidal: bool,
    /// Position of the conjugate by c in the list (SO(2l) only).
    pub partner: Option<usize>,
    /// Orthonormal basis of the eigenspace, when built from the module.
    pub space: Option<DMatrix<C64>>,
}

impl GenericRep {
    /// omega(z) = B(z) for a central z.
    pub fn central_character(&self, alg: &CellAlgebra, z: &Mat) -> Result<C64> {
        if !alg.center().contains(z) {
            return Err(Error::Domain("element is not central".into()));
        }
        Ok(self.bessel.eval(alg, z))
    }

    /// omega(-I), or 1 when -I is not in the group.
    pub fn omega_minus_one(&self, alg: &CellAlgebra) -> C64 {
        let spec = alg.spec();
        let m = Mat::identity(spec.dim(), spec.q).scale(spec.q - 1);
        self.central_character(alg, &m).unwrap_or(C64::new(1.0, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Module,
    Algebra,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub method: Method,
    pub reps: Vec<GenericRep>,
    /// Number of restricted re-splits that were needed.
    pub refinements: usize,
    /// Largest ||(1 - P) rho(s) V|| over generators s and pieces (module
    /// route only).
    pub invariance_residual: f64,
    /// Largest distance of a computed dimension from an integer (algebra
    /// route only).
    pub dim_residual: f64,
}

impl Decomposition {
    pub fn total_dim(&self) -> usize {
        self.reps.iter().map(|r| r.dim).sum()
    }
}

fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

/// Columns of `v` indexed by a range.
fn columns(v: &DMatrix<C64>, r: std::ops::Range<usize>) -> DMatrix<C64> {
    v.columns(r.start, r.len()).into_owned()
}

/// Split the induced model into its irreducible constituents.
pub fn decompose_module(
    module: &GgModule,
    alg: &CellAlgebra,
    seed: u64,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = module.whittaker_projector();
    let (vals, vecs) = hermitian_eigen(module.random_hermitian(&mut rng));
    let mut pending: Vec<(DMatrix<C64>, usize)> = cluster_sorted(&vals, tol.eig_gap)
        .into_iter()
        .map(|r| (columns(&vecs, r), 0))
        .collect();
    let mut pieces = Vec::new();
    let mut refinements = 0;
    while let Some((v, depth)) = pending.pop() {
        let tr = (v.adjoint() * &e * &v).trace().re;
        let m = tr.round();
        if (tr - m).abs() > 1e-6 {
            return Err(Error::Numerics(format!("Whittaker rank {tr} is not an integer")));
        }
        match m as i64 {
            1 => pieces.push(v),
            m if m < 1 => {
                return Err(Error::NotGeneric("eigenspace without Whittaker vectors".into()))
            }
            _ => {
                if depth >= MAX_SPLIT_DEPTH {
                    return Err(Error::DegenerateSplit(format!(
                        "{} constituents still share an eigenspace",
                        m
                    )));
                }
                refinements += 1;
                let h = module.random_hermitian(&mut rng);
                let (vals, y) = hermitian_eigen(v.adjoint() * h * &v);
                for r in cluster_sorted(&vals, tol.eig_gap) {
                    pending.push((&v * columns(&y, r), depth + 1));
                }
            }
        }
    }

    let g = module.group();
    let gens = g.spec().generators();
    let mut invariance_residual: f64 = 0.0;
    let mut reps = Vec::with_capacity(pieces.len());
    for v in pieces {
        for s in &gens {
            let a = module.apply(&module.action(s), &v);
            let r = frob(&(&a - &v * (v.adjoint() * &a)));
            invariance_residual = invariance_residual.max(r);
        }
        let vals = module.whittaker_vector(&v, &e)?;
        let coeffs = alg
            .cells()
            .iter()
            .map(|c| module.value(&vals, g.idx(&c.n)))
            .collect();
        reps.push(GenericRep {
            dim: v.ncols(),
            bessel: BesselFn { coeffs },
            central: Vec::new(),
            cuspidal: false,
            partner: None,
            space: Some(v),
        });
    }
    let radicals = alg.parabolic_radicals();
    let averages: Vec<DMatrix<C64>> = radicals
        .iter()
        .map(|n| module.average(n, |_| C64::new(1.0, 0.0)))
        .collect();
    for r in &mut reps {
        let v = r.space.as_ref().expect("module pieces carry a space");
        r.cuspidal = averages
            .iter()
            .all(|a| rank(&(v.adjoint() * a * v), tol.eq_abs.sqrt()) == 0);
    }
    finish(alg, &mut reps)?;
    Ok(Decomposition {
        method: Method::Module,
        reps,
        refinements,
        invariance_residual,
        dim_residual: 0.0,
    })
}

/// Hermitian random element of the Hecke algebra acting on itself, in the
/// orthonormal basis K_d / sqrt|U n_d U|.
fn random_algebra_hermitian<R: Rng>(ls: &[DMatrix<C64>], sq: &[f64], rng: &mut R) -> DMatrix<C64> {
    let n = sq.len();
    let mut l = DMatrix::zeros(n, n);
    for m in ls {
        l += m * random_c64(rng);
    }
    let lh = DMatrix::from_fn(n, n, |d, b| l[(d, b)] * sq[d] / sq[b]);
    &lh + lh.adjoint()
}

/// Relative size of the commutator of two random Hecke algebra elements.
pub fn algebra_commutator(ls: &[DMatrix<C64>], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ls.first().map_or(0, |m| m.nrows());
    let mut pick = || {
        let mut l = DMatrix::zeros(n, n);
        for m in ls {
            l += m * random_c64(&mut rng);
        }
        l
    };
    let (a, b) = (pick(), pick());
    frob(&(&a * &b - &b * &a)) / (frob(&a) * frob(&b))
}

/// Diagonalize the Hecke algebra; no enumeration of the group is needed.
pub fn decompose_algebra(alg: &CellAlgebra, seed: u64, tol: &Tolerances) -> Result<Decomposition> {
    let ls = alg.structure_constants();
    decompose_with_constants(alg, &ls, seed, tol)
}

pub fn decompose_with_constants(
    alg: &CellAlgebra,
    ls: &[DMatrix<C64>],
    seed: u64,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sq: Vec<f64> = alg.cells().iter().map(|c| c.size.sqrt()).collect();
    let (vals, vecs) = hermitian_eigen(random_algebra_hermitian(ls, &sq, &mut rng));
    let mut pending: Vec<(DMatrix<C64>, usize)> = cluster_sorted(&vals, tol.eig_gap)
        .into_iter()
        .map(|r| (columns(&vecs, r), 0))
        .collect();
    let mut lines = Vec::new();
    let mut refinements = 0;
    while let Some((v, depth)) = pending.pop() {
        if v.ncols() == 1 {
            lines.push(v);
            continue;
        }
        if depth >= MAX_SPLIT_DEPTH {
            return Err(Error::DegenerateSplit(format!(
                "{} characters of the Hecke algebra still collide",
                v.ncols()
            )));
        }
        refinements += 1;
        let h = random_algebra_hermitian(ls, &sq, &mut rng);
        let (vals, y) = hermitian_eigen(v.adjoint() * h * &v);
        for r in cluster_sorted(&vals, tol.eig_gap) {
            pending.push((&v * columns(&y, r), depth + 1));
        }
    }
    let id = alg.identity_cell();
    let order = alg.group_order();
    let mut dim_residual: f64 = 0.0;
    let mut reps = Vec::with_capacity(lines.len());
    for y in lines {
        let x: Vec<C64> = (0..sq.len()).map(|d| y[d] / sq[d]).collect();
        let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if x[id].norm() < 1e-10 * scale {
            return Err(Error::NotGeneric("Hecke eigenvector vanishes at the identity".into()));
        }
        let bessel = BesselFn {
            coeffs: x.iter().map(|z| z / x[id]).collect(),
        };
        let dim = order / bessel.norm_sqr(alg);
        dim_residual = dim_residual.max((dim - dim.round()).abs());
        reps.push(GenericRep {
            dim: dim.round() as usize,
            bessel,
            central: Vec::new(),
            cuspidal: false,
            partner: None,
            space: None,
        });
    }
    if dim_residual > 1e-6 {
        return Err(Error::Numerics(format!("dimension off an integer by {dim_residual}")));
    }
    let radicals = alg.parabolic_radicals();
    let flat: Vec<Mat> = radicals.iter().flatten().copied().collect();
    let chi = characters(alg, &reps, &alg.coset_reps(), &flat);
    let mut start = 0;
    let mut invariants = vec![0.0f64; reps.len()];
    for n in &radicals {
        for (p, inv) in invariants.iter_mut().enumerate() {
            let m: C64 = chi[start..start + n.len()].iter().map(|row| row[p]).sum();
            *inv += m.re / n.len() as f64;
        }
        start += n.len();
    }
    for (r, inv) in reps.iter_mut().zip(&invariants) {
        if (inv - inv.round()).abs() > 1e-6 {
            return Err(Error::Numerics(format!("dimension of invariants {inv} not integral")));
        }
        r.cuspidal = inv.round() == 0.0;
    }
    finish(alg, &mut reps)?;
    Ok(Decomposition {
        method: Method::Algebra,
        reps,
        refinements,
        invariance_residual: 0.0,
        dim_residual,
    })
}

/// Canonical order: by dimension, then by Bessel values on the cells.
fn canonical(a: &GenericRep, b: &GenericRep) -> Ordering {
    a.dim.cmp(&b.dim).then_with(|| {
        for (x, y) in a.bessel.coeffs.iter().zip(&b.bessel.coeffs) {
            if (x.re - y.re).abs() > 1e-6 {
                return x.re.total_cmp(&y.re);
            }
            if (x.im - y.im).abs() > 1e-6 {
                return x.im.total_cmp(&y.im);
            }
        }
        Ordering::Equal
    })
}

fn finish(alg: &CellAlgebra, reps: &mut [GenericRep]) -> Result<()> {
    let center = alg.center();
    for r in reps.iter_mut() {
        r.central = center.iter().map(|z| r.bessel.eval(alg, z)).collect();
    }
    reps.sort_by(canonical);
    if alg.spec().kind == GroupKind::SoEven {
        let conj: Vec<BesselFn> = reps.iter().map(|r| conjugate_bessel(alg, &r.bessel)).collect();
        for (i, c) in conj.iter().enumerate() {
            reps[i].partner = Some(find_partner(reps, c)?);
        }
    }
    Ok(())
}

/// The unique entry whose Bessel function equals `b`.
pub fn find_partner(reps: &[GenericRep], b: &BesselFn) -> Result<usize> {
    let hits: Vec<usize> = (0..reps.len())
        .filter(|&j| reps[j].bessel.distance(b) < 1e-6)
        .collect();
    match hits.as_slice() {
        [j] => Ok(*j),
        _ => Err(Error::Consistency(format!(
            "conjugate Bessel function matched {} entries",
            hits.len()
        ))),
    }
}

/// B_{c.pi}(g) = B_pi(c t~^{-1} g t~ c).
pub fn conjugate_bessel(alg: &CellAlgebra, b: &BesselFn) -> BesselFn {
    let spec = alg.spec();
    let (c, tt) = (c_matrix(spec.rank, spec.q), t_tilde(spec.rank, spec.q));
    let left = c.mul(&tt.inverse().expect("invertible"));
    let right = tt.mul(&c);
    BesselFn {
        coeffs: alg
            .cells()
            .iter()
            .map(|cell| b.eval(alg, &left.mul(&cell.n).mul(&right)))
            .collect(),
    }
}

/// chi_pi(g) = (dim / |U\G|) sum over coset representatives x of
/// B_pi(x g x^{-1}); rows follow `gs`, columns follow `reps`.
pub fn characters(
    alg: &CellAlgebra,
    reps: &[GenericRep],
    coset_reps: &[Mat],
    gs: &[Mat],
) -> Vec<Vec<C64>> {
    let pairs: Vec<(Mat, Mat)> = coset_reps
        .iter()
        .map(|x| (*x, x.inverse().expect("invertible")))
        .collect();
    let scale: Vec<f64> = reps
        .iter()
        .map(|r| r.dim as f64 / coset_reps.len() as f64)
        .collect();
    gs.par_iter()
        .map(|g| {
            let mut acc = vec![C64::new(0.0, 0.0); reps.len()];
            for (x, xi) in &pairs {
                if let Some((c, ph)) = alg.locate(&x.mul(g).mul(xi)) {
                    let p = alg.field().psi(ph);
                    for (a, r) in acc.iter_mut().zip(reps) {
                        *a += r.bessel.coeffs[c] * p;
                    }
                }
            }
            acc.iter().zip(&scale).map(|(a, s)| a * s).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests;
