//! Weyl group combinatorics of type D_l: signed permutations, simple roots,
//! the Bessel support and its partition into cell classes.
//!
//! A Weyl element is stored through its conjugation action on the diagonal
//! torus: `w t w^{-1} = diag(s_1, .., s_l, ..)` with `s_i = t_{p(i)}^{e(i)}`.
//! Acting on a root `a` gives the root `t -> a(w t w^{-1})`.

use std::collections::{BTreeMap, BTreeSet};

use crate::mat::Mat;

/// A root or weight written in the basis e_1..e_l.
pub type Root = Vec<i32>;

/// Signed permutation of 0..l.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WeylElement {
    /// `img[i] = +-(p(i) + 1)`.
    img: Vec<i8>,
}

impl WeylElement {
    pub fn identity(l: usize) -> Self {
        WeylElement {
            img: (1..=l as i8).collect(),
        }
    }

    /// Build from target coordinates and signs (`true` means inverted).
    pub fn from_parts(perm: &[usize], neg: &[bool]) -> Self {
        WeylElement {
            img: perm
                .iter()
                .zip(neg)
                .map(|(&p, &n)| if n { -(p as i8 + 1) } else { p as i8 + 1 })
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.img.len()
    }

    pub fn target(&self, i: usize) -> usize {
        (self.img[i].unsigned_abs() - 1) as usize
    }

    pub fn negated(&self, i: usize) -> bool {
        self.img[i] < 0
    }

    /// Lies in W(D_l) rather than only in W(B_l).
    pub fn is_even(&self) -> bool {
        self.img.iter().filter(|&&x| x < 0).count() % 2 == 0
    }

    /// Element represented by the matrix product `self * other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let img = (0..self.rank())
            .map(|i| {
                let p = self.target(i);
                let s = if self.negated(i) != other.negated(p) { -1 } else { 1 };
                s * (other.target(p) as i8 + 1)
            })
            .collect();
        WeylElement { img }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut img = vec![0i8; self.rank()];
        for i in 0..self.rank() {
            let s = if self.negated(i) { -1 } else { 1 };
            img[self.target(i)] = s * (i as i8 + 1);
        }
        WeylElement { img }
    }

    /// Image of a root under `a -> a o Ad(w)`.
    pub fn act(&self, a: &[i32]) -> Root {
        let mut out = vec![0; self.rank()];
        for (i, &c) in a.iter().enumerate() {
            let s = if self.negated(i) { -1 } else { 1 };
            out[self.target(i)] += s * c;
        }
        out
    }

    /// Conjugate by the outer element c, which inverts t_l.
    pub fn conj_c(&self) -> WeylElement {
        let c = c_element(self.rank());
        c.compose(self).compose(&c)
    }

    /// Set of simple roots sent to positive roots, as a bitmask
    /// (bit k for the (k+1)-th simple root).
    pub fn theta(&self) -> u32 {
        let l = self.rank();
        simple_roots(l)
            .iter()
            .enumerate()
            .filter(|(_, a)| is_positive(&self.act(a)))
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    /// Every simple root goes to a negative root or a simple root.
    pub fn supports_bessel(&self) -> bool {
        let simple = simple_roots(self.rank());
        simple.iter().all(|a| {
            let b = self.act(a);
            !is_positive(&b) || simple.contains(&b)
        })
    }

    /// The 0/1 permutation matrix in the orthogonal group of the
    /// antidiagonal form representing this element.
    pub fn to_matrix(&self, q: u32) -> Mat {
        let l = self.rank();
        let n = 2 * l;
        let mut m = Mat::zero(n, q);
        for i in 0..l {
            let p = self.target(i);
            let src = if self.negated(i) { n - 1 - p } else { p };
            m.set(i, src, 1);
            m.set(n - 1 - i, n - 1 - src, 1);
        }
        m
    }

    /// Weyl element of a monomial matrix of size 2l (torus factors ignored).
    pub fn from_matrix(m: &Mat) -> Option<WeylElement> {
        let n = m.n();
        if !n.is_multiple_of(2) || !m.is_monomial() {
            return None;
        }
        let l = n / 2;
        let mut perm = Vec::with_capacity(l);
        let mut neg = Vec::with_capacity(l);
        for i in 0..l {
            let j = (0..n).find(|&j| m.get(i, j) != 0)?;
            if j < l {
                perm.push(j);
                neg.push(false);
            } else {
                perm.push(n - 1 - j);
                neg.push(true);
            }
        }
        let w = WeylElement::from_parts(&perm, &neg);
        // the mirrored rows must agree with the form
        (w.to_matrix(m.q()) == monomial_pattern(m)).then_some(w)
    }
}

fn monomial_pattern(m: &Mat) -> Mat {
    Mat::from_fn(m.n(), m.q(), |i, j| (m.get(i, j) != 0) as i64)
}

/// Simple roots e_i - e_{i+1} (i < l) and e_{l-1} + e_l.
pub fn simple_roots(l: usize) -> Vec<Root> {
    let mut out: Vec<Root> = (0..l - 1)
        .map(|i| {
            let mut a = vec![0; l];
            a[i] = 1;
            a[i + 1] = -1;
            a
        })
        .collect();
    let mut a = vec![0; l];
    a[l - 2] = 1;
    a[l - 1] = 1;
    out.push(a);
    out
}

/// Positive roots e_i - e_j and e_i + e_j for i < j.
pub fn positive_roots(l: usize) -> Vec<Root> {
    let mut out = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            for s in [-1, 1] {
                let mut a = vec![0; l];
                a[i] = 1;
                a[j] = s;
                out.push(a);
            }
        }
    }
    out
}

/// A root of D_l is positive when its first nonzero coordinate is positive.
pub fn is_positive(a: &[i32]) -> bool {
    a.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Coefficients of a root in the simple-root basis.
pub fn simple_coefficients(a: &[i32]) -> Vec<i32> {
    let l = a.len();
    let mut c = vec![0; l];
    let mut run = 0;
    for i in 0..l - 2 {
        run += a[i];
        c[i] = run;
    }
    let s = a[l - 2] + if l >= 3 { c[l - 3] } else { 0 };
    let d = a[l - 1];
    c[l - 1] = (s + d) / 2;
    c[l - 2] = (s - d) / 2;
    c
}

/// The outer element c (inverts t_l); lies in W(B_l) only.
pub fn c_element(l: usize) -> WeylElement {
    let mut neg = vec![false; l];
    neg[l - 1] = true;
    WeylElement::from_parts(&(0..l).collect::<Vec<_>>(), &neg)
}

/// Permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All of W(D_l) in canonical order.
pub fn all_elements(l: usize) -> Vec<WeylElement> {
    let mut out = Vec::new();
    for p in permutations(l) {
        for mask in 0u32..(1 << l) {
            if mask.count_ones() % 2 == 0 {
                let neg: Vec<bool> = (0..l).map(|i| mask >> i & 1 == 1).collect();
                out.push(WeylElement::from_parts(&p, &neg));
            }
        }
    }
    out.sort();
    out
}

/// Elements with every simple root sent to a negative or simple root.
pub fn bessel_support(l: usize) -> Vec<WeylElement> {
    all_elements(l)
        .into_iter()
        .filter(WeylElement::supports_bessel)
        .collect()
}

/// t_n(w') = diag(w', I, w'^*) for the permutation matrix w' of GL_n with
/// its 1 in column j at row `sigma[j]`.
pub fn t_n(l: usize, sigma: &[usize]) -> WeylElement {
    let mut perm: Vec<usize> = (0..l).collect();
    for (j, &r) in sigma.iter().enumerate() {
        perm[r] = j;
    }
    WeylElement::from_parts(&perm, &vec![false; l])
}

/// The element exchanging the first n coordinates with the last n, for
/// 1 <= n <= l-1.
pub fn w_tilde(l: usize, n: usize) -> WeylElement {
    assert!(n >= 1 && n < l);
    let mut perm: Vec<usize> = (0..l).collect();
    let mut neg = vec![false; l];
    for i in 0..n {
        perm[i] = n - 1 - i;
        neg[i] = true;
    }
    neg[l - 1] = n % 2 == 1;
    WeylElement::from_parts(&perm, &neg)
}

/// The block swap [[0, I_l], [I_l, 0]] (l even) or its odd-rank analogue.
pub fn w_tilde_prime(l: usize) -> WeylElement {
    let mut perm: Vec<usize> = (0..l).map(|i| l - 1 - i).collect();
    let mut neg = vec![true; l];
    if l % 2 == 1 {
        perm[l - 1] = 0;
        neg[l - 1] = false;
    }
    WeylElement::from_parts(&perm, &neg)
}

/// The top element of the partition, with theta = all simple roots but the
/// last.
pub fn w_tilde_top(l: usize) -> WeylElement {
    let w = w_tilde_prime(l);
    if l % 2 == 1 {
        w.conj_c()
    } else {
        w
    }
}

pub fn w_long(l: usize) -> WeylElement {
    let mut neg = vec![true; l];
    if l % 2 == 1 {
        neg[l - 1] = false;
    }
    WeylElement::from_parts(&(0..l).collect::<Vec<_>>(), &neg)
}

/// Classes of the Bessel support partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellClass {
    /// B_n for 0 <= n <= l-1; n = l-1 is the c-stable part of the top family.
    Twist(usize),
    /// B_l: top family elements not fixed by c.
    Top,
    /// B_l^c: conjugates by c of `Top`.
    TopConj,
}

impl std::fmt::Display for CellClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellClass::Twist(n) => write!(f, "B{n}"),
            CellClass::Top => write!(f, "Btop"),
            CellClass::TopConj => write!(f, "Btop^c"),
        }
    }
}

/// Members of each class, constructed from the defining products.
pub fn cell_classes(l: usize) -> BTreeMap<CellClass, Vec<WeylElement>> {
    assert!(l >= 2);
    let support: BTreeSet<WeylElement> = bessel_support(l).into_iter().collect();
    let mut out = BTreeMap::new();
    out.insert(CellClass::Twist(0), vec![WeylElement::identity(l)]);
    for n in 1..l.saturating_sub(1) {
        let wt = w_tilde(l, n);
        let set: BTreeSet<_> = permutations(n)
            .iter()
            .map(|s| t_n(l, s).compose(&wt))
            .filter(|w| support.contains(w))
            .collect();
        out.insert(CellClass::Twist(n), set.into_iter().collect());
    }
    let wt = w_tilde_top(l);
    let family: BTreeSet<_> = permutations(l)
        .iter()
        .map(|s| t_n(l, s).compose(&wt))
        .filter(|w| support.contains(w))
        .collect();
    let top: Vec<_> = family.iter().filter(|w| w.conj_c() != **w).cloned().collect();
    let fixed: Vec<_> = family.iter().filter(|w| w.conj_c() == **w).cloned().collect();
    let mut conj: Vec<_> = top.iter().map(WeylElement::conj_c).collect();
    conj.sort();
    out.insert(CellClass::Twist(l - 1), fixed);
    out.insert(CellClass::Top, top);
    out.insert(CellClass::TopConj, conj);
    out
}

/// Class of a Bessel-support element, or `None` outside the support.
pub fn classify_cell(w: &WeylElement) -> Option<CellClass> {
    cell_classes(w.rank())
        .into_iter()
        .find(|(_, v)| v.contains(w))
        .map(|(k, _)| k)
}

/// The theta sets each class should occupy, as bitmasks.
pub fn predicted_thetas(l: usize, class: CellClass) -> BTreeSet<u32> {
    let full = (1u32 << l) - 1;
    let bit = |k: usize| 1u32 << (k - 1);
    let between = |lo: u32, hi: u32| -> BTreeSet<u32> {
        (0..=full).filter(|&t| t & lo == lo && t & !hi == 0).collect()
    };
    match class {
        CellClass::Twist(0) => [full].into_iter().collect(),
        CellClass::Twist(n) if n == l - 1 => between(0, full & !bit(l - 1) & !bit(l)),
        CellClass::Twist(n) => {
            let lo = (n + 1..=l).fold(0, |m, k| m | bit(k));
            between(lo, full & !bit(n))
        }
        CellClass::Top => between(bit(l - 1), full & !bit(l)),
        CellClass::TopConj => between(bit(l), full & !bit(l - 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root(l: usize, terms: &[(usize, i32)]) -> Root {
        let mut a = vec![0; l];
        for &(i, c) in terms {
            a[i - 1] += c;
        }
        a
    }

    fn alpha(l: usize, k: usize) -> Root {
        simple_roots(l)[k - 1].clone()
    }

    #[test]
    fn group_orders() {
        for l in 2..=5 {
            let fact: usize = (1..=l).product();
            assert_eq!(all_elements(l).len(), fact << (l - 1));
        }
    }

    #[test]
    fn positive_root_count_and_coefficients() {
        for l in 2..=6 {
            let pos = positive_roots(l);
            assert_eq!(pos.len(), l * (l - 1));
            for a in &pos {
                let c = simple_coefficients(a);
                assert!(c.iter().all(|&x| x >= 0), "{a:?} -> {c:?}");
                let back = simple_roots(l)
                    .iter()
                    .zip(&c)
                    .fold(vec![0; l], |acc, (s, &k)| {
                        acc.iter().zip(s).map(|(x, y)| x + k * y).collect()
                    });
                assert_eq!(&back, a);
            }
        }
    }

    #[test]
    fn composition_matches_matrix_product() {
        let all = all_elements(3);
        for a in all.iter().step_by(5) {
            for b in all.iter().step_by(7) {
                let lhs = a.compose(b).to_matrix(5);
                let rhs = a.to_matrix(5).mul(&b.to_matrix(5));
                assert_eq!(lhs, rhs);
                assert_eq!(WeylElement::from_matrix(&rhs).unwrap(), a.compose(b));
            }
            assert_eq!(a.compose(&a.inverse()), WeylElement::identity(3));
        }
    }

    #[test]
    fn matrices_preserve_form_with_unit_determinant() {
        for w in all_elements(3) {
            let m = w.to_matrix(7);
            let j = Mat::antidiag(6, 7);
            assert_eq!(m.transpose().mul(&j).mul(&m), j);
            assert_eq!(m.det(), 1);
        }
    }

    #[test]
    fn support_has_power_of_two_size_and_theta_bijection() {
        for l in 2..=7 {
            let b = bessel_support(l);
            assert_eq!(b.len(), 1 << l, "l = {l}");
            let thetas: BTreeSet<u32> = b.iter().map(WeylElement::theta).collect();
            assert_eq!(thetas.len(), 1 << l);
        }
    }

    #[test]
    fn twist_element_action_on_simple_roots() {
        for l in 3..=7 {
            for n in 1..=l - 2 {
                let w = w_tilde(l, n);
                for i in 1..n {
                    assert_eq!(w.act(&alpha(l, i)), alpha(l, n - i));
                }
                assert_eq!(w.act(&alpha(l, n)), root(l, &[(1, -1), (n + 1, -1)]));
                for i in n + 1..=l - 2 {
                    assert_eq!(w.act(&alpha(l, i)), alpha(l, i));
                }
                let (a, b) = if n % 2 == 1 { (l, l - 1) } else { (l - 1, l) };
                assert_eq!(w.act(&alpha(l, l - 1)), alpha(l, a));
                assert_eq!(w.act(&alpha(l, l)), alpha(l, b));
            }
        }
    }

    #[test]
    fn penultimate_element_action() {
        for l in 2..=7 {
            let w = w_tilde(l, l - 1);
            for i in 1..=l - 2 {
                assert_eq!(w.act(&alpha(l, i)), alpha(l, l - 1 - i));
            }
            // the image of e_l carries the sign (-1)^(l-1)
            let s = if (l - 1) % 2 == 1 { 1 } else { -1 };
            assert_eq!(w.act(&alpha(l, l - 1)), root(l, &[(1, -1), (l, s)]));
            assert_eq!(w.act(&alpha(l, l)), root(l, &[(1, -1), (l, -s)]));
        }
    }

    #[test]
    fn block_swap_action() {
        for l in 3..=7 {
            let w = w_tilde_prime(l);
            for i in 1..=l - 2 {
                assert_eq!(w.act(&alpha(l, i)), alpha(l, l - i));
            }
            let neg12 = root(l, &[(1, -1), (2, -1)]);
            if l % 2 == 1 {
                assert_eq!(w.act(&alpha(l, l - 1)), neg12);
                assert_eq!(w.act(&alpha(l, l)), alpha(l, 1));
            } else {
                assert_eq!(w.act(&alpha(l, l - 1)), alpha(l, 1));
                assert_eq!(w.act(&alpha(l, l)), neg12);
            }
        }
    }

    #[test]
    fn named_thetas() {
        for l in 2..=7 {
            let full = (1u32 << l) - 1;
            let bit = |k: usize| 1u32 << (k - 1);
            for n in 1..l - 1 {
                assert_eq!(w_tilde(l, n).theta(), full & !bit(n));
            }
            assert_eq!(w_tilde(l, l - 1).theta(), full & !bit(l - 1) & !bit(l));
            assert_eq!(w_tilde_top(l).theta(), full & !bit(l));
            assert_eq!(w_tilde_top(l).conj_c().theta(), full & !bit(l - 1));
            assert_eq!(w_long(l).theta(), 0);
        }
    }

    #[test]
    fn long_element_negates_all_positive_roots() {
        for l in 2..=4 {
            let w = w_long(l);
            assert!(positive_roots(l).iter().all(|a| !is_positive(&w.act(a))));
            // w_long times the block swap is the Levi long element diag(J_l, J_l)
            let prod = w.compose(&w_tilde_prime(l)).to_matrix(3);
            let jl = Mat::antidiag(l, 3);
            assert_eq!(prod, Mat::block_diag(&[jl, jl]));
        }
    }

    #[test]
    fn partition_of_support() {
        for l in 2..=7 {
            let classes = cell_classes(l);
            let mut union = BTreeSet::new();
            for (class, members) in &classes {
                let thetas: BTreeSet<u32> = members.iter().map(WeylElement::theta).collect();
                assert_eq!(thetas, predicted_thetas(l, *class), "l={l} {class}");
                for w in members {
                    assert!(union.insert(w.clone()), "overlap at l={l}");
                }
            }
            let support: BTreeSet<_> = bessel_support(l).into_iter().collect();
            assert_eq!(union, support);
        }
    }

    #[test]
    fn levi_permutations_are_outside_support() {
        for l in 3..=6 {
            for s in permutations(l).iter().skip(1) {
                assert!(!t_n(l, s).supports_bessel());
            }
        }
    }

    #[test]
    fn rank_two_levi_swap_lies_in_support() {
        // D_2 = A_1 x A_1: every Weyl element supports Bessel functions
        let w = t_n(2, &[1, 0]);
        assert!(w.supports_bessel());
        assert_eq!(classify_cell(&w), Some(CellClass::TopConj));
    }

    #[test]
    fn c_stable_top_elements_have_last_column_first() {
        for l in 3..=5 {
            let wt = w_tilde_top(l);
            for s in permutations(l) {
                let w = t_n(l, &s).compose(&wt);
                if !w.supports_bessel() {
                    continue;
                }
                // w' = [[0, w''], [1, 0]]: first column of w' hits the last row
                assert_eq!(w.conj_c() == w, s[0] == l - 1, "l={l} {s:?}");
            }
        }
    }

    #[test]
    fn penultimate_class_from_smaller_levi() {
        for l in 3..=4 {
            let classes = cell_classes(l);
            let wt = w_tilde(l, l - 1);
            let support: BTreeSet<_> = bessel_support(l).into_iter().collect();
            let direct: BTreeSet<_> = permutations(l - 1)
                .iter()
                .map(|s| t_n(l, s).compose(&wt))
                .filter(|w| support.contains(w))
                .collect();
            let from_top: BTreeSet<_> = classes[&CellClass::Twist(l - 1)].iter().cloned().collect();
            assert_eq!(direct, from_top);
            // and as matrices: t_l([[0, w''], [1, 0]]) w_top = t_{l-1}(w'') w_pen
            for s in permutations(l - 1) {
                let mut big = vec![l - 1];
                big.extend(s.iter().copied());
                let lhs = t_n(l, &big).compose(&w_tilde_top(l)).to_matrix(5);
                let rhs = t_n(l, &s).compose(&wt).to_matrix(5);
                assert_eq!(lhs, rhs);
            }
        }
    }
}
