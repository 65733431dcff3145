//! Right coset tables: U\G for the upper unitriangular subgroup of an
//! enumerated group, and Q_n\SO(2n+1) for the Siegel parabolic without
//! enumerating SO(2n+1).

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::mat::Mat;

use super::special::levi_odd;
use super::{root_element, FiniteGroup};

/// Right cosets U g, each represented by its smallest element.
#[derive(Debug, Clone)]
pub struct UnipotentCosets {
    /// Element indices of U, in key order.
    pub u: Vec<u32>,
    /// Element index of each coset representative, in key order.
    pub reps: Vec<u32>,
    /// Coset of each element.
    pub coset_of: Vec<u32>,
    /// For each element g, the position in `u` of the u with g = u * rep.
    pub u_of: Vec<u32>,
}

impl UnipotentCosets {
    pub fn build(g: &FiniteGroup) -> Self {
        let u: Vec<u32> = g.unipotent_indices().into_iter().map(|i| i as u32).collect();
        let mut coset_of = vec![u32::MAX; g.order()];
        let mut u_of = vec![u32::MAX; g.order()];
        let mut reps = Vec::new();
        for i in 0..g.order() {
            if coset_of[i] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(i as u32);
            let x = g.element(i);
            for (k, &ui) in u.iter().enumerate() {
                let h = g.idx(&g.element(ui as usize).mul(x));
                coset_of[h] = c;
                u_of[h] = k as u32;
            }
        }
        UnipotentCosets { u, reps, coset_of, u_of }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Character arguments of the elements of U for a given character.
    pub fn char_args(&self, g: &FiniteGroup, arg: impl Fn(&Mat) -> u32) -> Vec<u32> {
        self.u.iter().map(|&i| arg(g.element(i as usize))).collect()
    }
}

/// Right cosets Q_n g in SO(2n+1). The coset of g is determined by the row
/// space of its last n rows, a maximal isotropic subspace.
#[derive(Debug, Clone)]
pub struct SiegelCosets {
    n: usize,
    q: u32,
    reps: Vec<Mat>,
    rep_inv: Vec<Mat>,
    index: HashMap<u128, u32>,
}

impl SiegelCosets {
    /// Number of maximal isotropic subspaces: prod (q^i + 1).
    pub fn expected_count(n: usize, q: u32) -> usize {
        (1..=n as u32).map(|i| q.pow(i) as usize + 1).product()
    }

    /// Representatives w u with w a signed permutation and u upper
    /// unitriangular, the first hit of each coset in a fixed search order.
    pub fn build(n: usize, q: u32) -> Result<Self> {
        let size = 2 * n + 1;
        let target = Self::expected_count(n, q);
        let unipotent = odd_unipotent(n, q);
        let weyl = signed_permutations_odd(n, q);
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        'outer: for w in &weyl {
            for u in &unipotent {
                let g = w.mul(u);
                let k = Self::key_of(&g, n);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(k) {
                    e.insert(reps.len() as u32);
                    reps.push(g);
                    if reps.len() == target {
                        break 'outer;
                    }
                }
            }
        }
        if reps.len() != target {
            return Err(Error::Consistency(format!(
                "found {} Siegel cosets of SO({size}), expected {target}",
                reps.len()
            )));
        }
        let rep_inv = reps.iter().map(|r| r.inverse().expect("invertible")).collect();
        Ok(SiegelCosets { n, q, reps, rep_inv, index })
    }

    fn key_of(g: &Mat, n: usize) -> u128 {
        let size = g.n();
        let bottom = Mat::from_fn(size, g.q(), |i, j| {
            if i < n {
                g.get(n + 1 + i, j) as i64
            } else {
                0
            }
        });
        bottom.rref(n).key()
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> &Mat {
        &self.reps[i]
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// g = l_n(a) v rep_i: returns (i, a).
    pub fn locate(&self, g: &Mat) -> (usize, Mat) {
        let k = Self::key_of(g, self.n);
        let i = *self.index.get(&k).expect("every isotropic subspace is indexed") as usize;
        let p = g.mul(&self.rep_inv[i]);
        let a = p.sub(0, 0, self.n);
        debug_assert!(super::in_siegel_radical(
            &levi_odd(&a).inverse().unwrap().mul(&p)
        ));
        (i, a)
    }
}

/// Upper unitriangular subgroup of SO(2n+1) by closure of positive root
/// elements, in key order.
pub fn odd_unipotent(n: usize, q: u32) -> Vec<Mat> {
    let size = 2 * n + 1;
    let mut gens = Vec::new();
    for i in 0..n {
        for j in i + 1..size - 1 - i {
            gens.push(root_element(size, q, i, j, 1));
        }
    }
    closure(&gens, size, q)
}

/// Closure of a set of generators under multiplication, in key order.
pub fn closure(gens: &[Mat], size: usize, q: u32) -> Vec<Mat> {
    let id = Mat::identity(size, q);
    let mut seen = HashSet::new();
    let mut out = vec![id];
    let mut queue = VecDeque::from([id]);
    seen.insert(id.key());
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = g.mul(s);
            if seen.insert(h.key()) {
                out.push(h);
                queue.push_back(h);
            }
        }
    }
    out.sort_by_key(Mat::key);
    out
}

/// Signed permutation matrices in SO(2n+1), the middle entry fixing the
/// determinant.
fn signed_permutations_odd(n: usize, q: u32) -> Vec<Mat> {
    let size = 2 * n + 1;
    let mut out = Vec::new();
    for p in crate::weyl::permutations(n) {
        for mask in 0u32..(1 << n) {
            let mut m = Mat::zero(size, q);
            for (i, &pi) in p.iter().enumerate() {
                let src = if mask >> i & 1 == 1 { size - 1 - pi } else { pi };
                m.set(i, src, 1);
                m.set(size - 1 - i, size - 1 - src, 1);
            }
            m.set(n, n, 1);
            if m.det() != 1 {
                m.set(n, n, -1);
            }
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{siegel_decompose, GroupSpec, Siegel, DEFAULT_BUDGET};

    #[test]
    fn unipotent_cosets_partition() {
        let g = FiniteGroup::enumerate(GroupSpec::so_even(2, 3), DEFAULT_BUDGET).unwrap();
        let c = UnipotentCosets::build(&g);
        assert_eq!(c.u.len(), 9);
        assert_eq!(c.len(), 64);
        for i in 0..g.order() {
            let rep = g.element(c.reps[c.coset_of[i] as usize] as usize);
            let u = g.element(c.u[c.u_of[i] as usize] as usize);
            assert_eq!(u.mul(rep), *g.element(i));
        }
        let e = g.identity_index();
        assert_eq!(c.reps[c.coset_of[e] as usize] as usize, e);
        let gl = FiniteGroup::enumerate(GroupSpec::gl(2, 3), DEFAULT_BUDGET).unwrap();
        assert_eq!(UnipotentCosets::build(&gl).len(), 16);
    }

    #[test]
    fn siegel_cosets_of_so5() {
        let sc = SiegelCosets::build(2, 3).unwrap();
        assert_eq!(sc.len(), 40);
        let g = FiniteGroup::enumerate(GroupSpec::so_odd(2, 3), DEFAULT_BUDGET).unwrap();
        let mut counts = vec![0usize; 40];
        for x in g.elements() {
            let (i, a) = sc.locate(x);
            counts[i] += 1;
            let v = levi_odd(&a).inverse().unwrap().mul(x).mul(&sc.rep_inv[i]);
            assert!(crate::groups::in_siegel_radical(&v));
        }
        assert!(counts.iter().all(|&c| c == 1296));
        // the identity coset is Q_2 itself
        let (i0, _) = sc.locate(&Mat::identity(5, 3));
        for x in g.elements() {
            let in_q = matches!(siegel_decompose(x).unwrap(), Siegel::Parabolic { .. });
            assert_eq!(sc.locate(x).0 == i0, in_q);
        }
    }

    #[test]
    fn odd_unipotent_orders() {
        assert_eq!(odd_unipotent(1, 5).len(), 5);
        assert_eq!(odd_unipotent(2, 3).len(), 81);
        assert_eq!(odd_unipotent(3, 3).len(), 19683);
        assert_eq!(SiegelCosets::build(1, 5).unwrap().len(), 6);
    }
}
