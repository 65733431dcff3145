//! Finite matrix groups SO(2l), SO(2n+1) and GL(n) over F_q, preserving the
//! antidiagonal form in the orthogonal cases.

mod cache;
mod cosets;
mod decompose;
mod special;

pub use cache::{cache_path, load_or_enumerate, read_cache, write_cache};
pub use cosets::{closure, odd_unipotent, SiegelCosets, UnipotentCosets};
pub use decompose::{bruhat_decompose, in_siegel_radical, siegel_decompose, Bruhat, Siegel};
pub use special::*;

use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::mat::{Mat, MAX_DIM};

/// Which family a group belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    SoEven,
    SoOdd,
    Gl,
}

impl GroupKind {
    pub fn code(self) -> u8 {
        match self {
            GroupKind::SoEven => 0,
            GroupKind::SoOdd => 1,
            GroupKind::Gl => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        [GroupKind::SoEven, GroupKind::SoOdd, GroupKind::Gl]
            .into_iter()
            .find(|k| k.code() == c)
    }
}

/// A group family member: SO(2l), SO(2n+1) or GL(n) over F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub rank: usize,
    pub q: u32,
}

impl GroupSpec {
    pub fn so_even(l: usize, q: u32) -> Self {
        GroupSpec { kind: GroupKind::SoEven, rank: l, q }
    }

    pub fn so_odd(n: usize, q: u32) -> Self {
        GroupSpec { kind: GroupKind::SoOdd, rank: n, q }
    }

    pub fn gl(n: usize, q: u32) -> Self {
        GroupSpec { kind: GroupKind::Gl, rank: n, q }
    }

    /// Matrix size.
    pub fn dim(&self) -> usize {
        match self.kind {
            GroupKind::SoEven => 2 * self.rank,
            GroupKind::SoOdd => 2 * self.rank + 1,
            GroupKind::Gl => self.rank,
        }
    }

    /// Order from the standard product formulas.
    pub fn expected_order(&self) -> u128 {
        let q = self.q as u128;
        let r = self.rank as u32;
        match self.kind {
            GroupKind::SoEven => {
                q.pow(r * (r - 1)) * (q.pow(r) - 1) * (1..r).map(|i| q.pow(2 * i) - 1).product::<u128>()
            }
            GroupKind::SoOdd => q.pow(r * r) * (1..=r).map(|i| q.pow(2 * i) - 1).product::<u128>(),
            GroupKind::Gl => (0..r).map(|i| q.pow(r) - q.pow(i)).product(),
        }
    }

    /// Order of the upper unitriangular subgroup.
    pub fn unipotent_order(&self) -> u128 {
        let q = self.q as u128;
        let r = self.rank as u32;
        match self.kind {
            GroupKind::SoEven => q.pow(r * (r - 1)),
            GroupKind::SoOdd => q.pow(r * r),
            GroupKind::Gl => q.pow(r * (r - 1) / 2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Fq::new(self.q)?;
        let min_rank = if self.kind == GroupKind::SoEven { 2 } else { 1 };
        if self.rank < min_rank || self.dim() > MAX_DIM {
            return Err(Error::Domain(format!("unsupported rank in {self:?}")));
        }
        if !Mat::key_fits(self.dim(), self.q) {
            return Err(Error::Domain(format!("{self:?} too large for packed keys")));
        }
        Ok(())
    }

    /// Membership test straight from the definition.
    pub fn contains(&self, g: &Mat) -> bool {
        if g.n() != self.dim() || g.q() != self.q {
            return false;
        }
        match self.kind {
            GroupKind::Gl => g.det() != 0,
            _ => preserves_form(g) && g.det() == 1,
        }
    }

    /// Generators: torus elements and root elements for the simple roots
    /// and their negatives.
    pub fn generators(&self) -> Vec<Mat> {
        let f = Fq::new(self.q).expect("validated field");
        let n = self.dim();
        let q = self.q;
        let z = f.generator();
        let zi = f.inv(z);
        let mut gens = Vec::new();
        match self.kind {
            GroupKind::Gl => {
                for i in 0..n {
                    let mut d = vec![1; n];
                    d[i] = z;
                    gens.push(Mat::diag(q, &d));
                }
                for i in 0..n.saturating_sub(1) {
                    let mut e = Mat::identity(n, q);
                    e.set(i, i + 1, 1);
                    gens.push(e);
                    gens.push(e.transpose());
                }
            }
            GroupKind::SoEven | GroupKind::SoOdd => {
                let r = self.rank;
                for i in 0..r {
                    let mut d = vec![1; n];
                    d[i] = z;
                    d[n - 1 - i] = zi;
                    gens.push(Mat::diag(q, &d));
                }
                let mut pairs: Vec<(usize, usize)> = (0..r - 1).map(|i| (i, i + 1)).collect();
                if self.kind == GroupKind::SoEven {
                    // e_{l-1} + e_l
                    pairs.push((r - 2, n - r));
                } else {
                    // e_n, through the middle coordinate
                    pairs.push((r - 1, r));
                }
                for (i, j) in pairs {
                    let x = root_element(n, q, i, j, 1);
                    gens.push(x);
                    gens.push(x.transpose());
                }
            }
        }
        gens
    }
}

/// g^T J g = J for the antidiagonal J.
pub fn preserves_form(g: &Mat) -> bool {
    let j = Mat::antidiag(g.n(), g.q());
    g.transpose().mul(&j).mul(g) == j
}

/// exp(t X) for X = E_{ij} - E_{j'i'} in the orthogonal Lie algebra of the
/// antidiagonal form (i' = n-1-i). Covers short roots through the middle
/// coordinate of an odd form.
pub fn root_element(n: usize, q: u32, i: usize, j: usize, t: u32) -> Mat {
    let f = Fq::new(q).expect("valid field");
    let mut x = Mat::zero(n, q);
    let (ip, jp) = (n - 1 - i, n - 1 - j);
    x.set(i, j, x.get(i, j) as i64 + 1);
    x.set(jp, ip, x.get(jp, ip) as i64 - 1);
    let x2 = x.mul(&x);
    let half_t2 = f.mul(f.half(), f.mul(t, t));
    Mat::from_fn(n, q, |r, c| {
        (r == c) as i64 + (t * x.get(r, c)) as i64 + (half_t2 * x2.get(r, c)) as i64
    })
}

/// An enumerated finite group with elements in lexicographic key order.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    spec: GroupSpec,
    elements: Vec<Mat>,
    index: HashMap<u128, u32>,
}

/// Default ceiling on enumerated group orders.
pub const DEFAULT_BUDGET: usize = 20_000_000;

impl FiniteGroup {
    /// Closure of the generators under multiplication.
    pub fn enumerate(spec: GroupSpec, budget: usize) -> Result<Self> {
        spec.validate()?;
        if spec.expected_order() > budget as u128 {
            return Err(Error::Budget(format!(
                "{:?} has order {} over the budget {budget}",
                spec,
                spec.expected_order()
            )));
        }
        let gens = spec.generators();
        let id = Mat::identity(spec.dim(), spec.q);
        let mut seen: HashSet<u128> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.key());
        queue.push_back(id);
        while let Some(g) = queue.pop_front() {
            for s in &gens {
                let h = g.mul(s);
                if seen.insert(h.key()) {
                    if seen.len() > budget {
                        return Err(Error::Budget(format!("closure of {spec:?} exceeded {budget}")));
                    }
                    queue.push_back(h);
                }
            }
        }
        let mut keys: Vec<u128> = seen.into_iter().collect();
        keys.sort_unstable();
        Ok(Self::from_sorted_keys(spec, keys))
    }

    /// Exhaustive search over all matrices, column by column, keeping those
    /// that satisfy the defining equations. Slow; used as an oracle.
    pub fn enumerate_by_filter(spec: GroupSpec, budget: usize) -> Result<Self> {
        spec.validate()?;
        let n = spec.dim();
        let q = spec.q;
        let vecs = (q as u64).pow(n as u32);
        if vecs > 100_000 || spec.expected_order() > budget as u128 {
            return Err(Error::Budget(format!("filter enumeration of {spec:?} too large")));
        }
        let columns: Vec<Vec<u32>> = (0..vecs)
            .map(|mut k| {
                let mut v = vec![0u32; n];
                for slot in v.iter_mut().rev() {
                    *slot = (k % q as u64) as u32;
                    k /= q as u64;
                }
                v
            })
            .collect();
        let orthogonal = spec.kind != GroupKind::Gl;
        let pair = |a: &[u32], b: &[u32]| -> u32 {
            (0..n).map(|i| a[i] * b[n - 1 - i]).sum::<u32>() % q
        };
        let mut keys = Vec::new();
        let mut chosen: Vec<usize> = Vec::with_capacity(n);
        #[allow(clippy::too_many_arguments)]
        fn rec(
            depth: usize,
            n: usize,
            q: u32,
            orthogonal: bool,
            columns: &[Vec<u32>],
            chosen: &mut Vec<usize>,
            pair: &dyn Fn(&[u32], &[u32]) -> u32,
            keys: &mut Vec<u128>,
        ) {
            if depth == n {
                let m = Mat::from_fn(n, q, |i, j| columns[chosen[j]][i] as i64);
                let ok = if orthogonal { m.det() == 1 } else { m.det() != 0 };
                if ok {
                    keys.push(m.key());
                }
                return;
            }
            for (k, col) in columns.iter().enumerate() {
                if orthogonal {
                    let fits = chosen
                        .iter()
                        .enumerate()
                        .all(|(i, &c)| pair(&columns[c], col) == (i + depth + 1 == n) as u32)
                        && pair(col, col) == (2 * depth + 1 == n) as u32;
                    if !fits {
                        continue;
                    }
                } else if col.iter().all(|&x| x == 0) {
                    continue;
                }
                chosen.push(k);
                rec(depth + 1, n, q, orthogonal, columns, chosen, pair, keys);
                chosen.pop();
            }
        }
        rec(0, n, q, orthogonal, &columns, &mut chosen, &pair, &mut keys);
        keys.sort_unstable();
        Ok(Self::from_sorted_keys(spec, keys))
    }

    pub(crate) fn from_sorted_keys(spec: GroupSpec, keys: Vec<u128>) -> Self {
        let n = spec.dim();
        let elements: Vec<Mat> = keys.iter().map(|&k| Mat::from_key(n, spec.q, k)).collect();
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        FiniteGroup { spec, elements, index }
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Mat {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Mat) -> Option<usize> {
        self.index.get(&g.key()).map(|&i| i as usize)
    }

    /// Index of an element known to lie in the group.
    pub fn idx(&self, g: &Mat) -> usize {
        self.index_of(g)
            .unwrap_or_else(|| panic!("{g:?} is not in {:?}", self.spec))
    }

    pub fn identity_index(&self) -> usize {
        self.idx(&Mat::identity(self.spec.dim(), self.spec.q))
    }

    /// Indices of upper unitriangular elements, in key order.
    pub fn unipotent_indices(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| self.elements[i].is_upper_unitriangular())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match_formulas() {
        for spec in [
            GroupSpec::so_even(2, 3),
            GroupSpec::so_even(2, 5),
            GroupSpec::so_odd(1, 3),
            GroupSpec::so_odd(1, 5),
            GroupSpec::so_odd(2, 3),
            GroupSpec::gl(2, 3),
            GroupSpec::gl(2, 5),
            GroupSpec::gl(1, 5),
        ] {
            let g = FiniteGroup::enumerate(spec, DEFAULT_BUDGET).unwrap();
            assert_eq!(g.order() as u128, spec.expected_order(), "{spec:?}");
            assert_eq!(g.unipotent_indices().len() as u128, spec.unipotent_order());
        }
        assert_eq!(GroupSpec::so_even(2, 3).expected_order(), 576);
        assert_eq!(GroupSpec::so_even(2, 5).expected_order(), 14400);
        assert_eq!(GroupSpec::so_odd(2, 3).expected_order(), 51840);
        assert_eq!(GroupSpec::gl(2, 3).expected_order(), 48);
        assert_eq!(GroupSpec::gl(2, 5).expected_order(), 480);
    }

    #[test]
    fn closure_agrees_with_filter_oracle() {
        for spec in [
            GroupSpec::so_even(2, 3),
            GroupSpec::so_odd(1, 5),
            GroupSpec::so_odd(2, 3),
            GroupSpec::gl(2, 3),
        ] {
            let a = FiniteGroup::enumerate(spec, DEFAULT_BUDGET).unwrap();
            let b = FiniteGroup::enumerate_by_filter(spec, DEFAULT_BUDGET).unwrap();
            assert_eq!(a.elements(), b.elements(), "{spec:?}");
        }
    }

    #[test]
    fn generators_lie_in_group() {
        for spec in [GroupSpec::so_even(3, 5), GroupSpec::so_odd(3, 7), GroupSpec::gl(3, 5)] {
            for g in spec.generators() {
                assert!(spec.contains(&g), "{spec:?} {g:?}");
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = FiniteGroup::enumerate(GroupSpec::so_even(3, 5), 1000).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn elements_are_sorted_and_closed() {
        let g = FiniteGroup::enumerate(GroupSpec::so_even(2, 3), DEFAULT_BUDGET).unwrap();
        assert!(g.elements().windows(2).all(|w| w[0].key() < w[1].key()));
        for a in g.elements().iter().step_by(17) {
            for b in g.elements().iter().step_by(23) {
                assert!(g.index_of(&a.mul(b)).is_some());
            }
            assert!(g.index_of(&a.inverse().unwrap()).is_some());
        }
    }
}
