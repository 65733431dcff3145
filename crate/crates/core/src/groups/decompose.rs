//! Bruhat decomposition and the Siegel-parabolic decomposition of SO(2n+1).

use crate::error::{Error, Result};
use crate::mat::{inv_mod, Mat};

use super::special::{levi_odd, w_odd};

/// g = u1 t w u2 with u1, u2 upper unitriangular, t diagonal and w a 0/1
/// permutation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bruhat {
    pub u1: Mat,
    pub t: Mat,
    pub w: Mat,
    pub u2: Mat,
}

/// Elimination with the bottom-most nonzero entry of each column as pivot.
/// The left factor lands in U n wU^-w^{-1}, which makes the decomposition
/// unique; for g in an orthogonal group all factors are then orthogonal.
pub fn bruhat_decompose(g: &Mat) -> Result<Bruhat> {
    let n = g.n();
    let q = g.q();
    let mut a = *g;
    let mut left = Mat::identity(n, q);
    let mut right = Mat::identity(n, q);
    for j in 0..n {
        let i = (0..n)
            .rev()
            .find(|&r| a.get(r, j) != 0)
            .ok_or_else(|| Error::Domain("singular matrix has no Bruhat form".into()))?;
        let pinv = inv_mod(a.get(i, j), q);
        for r in 0..i {
            let f = a.get(r, j) * pinv % q;
            if f != 0 {
                row_axpy(&mut a, r, i, q - f);
                row_axpy(&mut left, r, i, q - f);
            }
        }
        for c in j + 1..n {
            let f = a.get(i, c) * pinv % q;
            if f != 0 {
                col_axpy(&mut a, c, j, q - f);
                col_axpy(&mut right, c, j, q - f);
            }
        }
    }
    let w = Mat::from_fn(n, q, |r, c| (a.get(r, c) != 0) as i64);
    let t = a.mul(&w.transpose());
    let out = Bruhat {
        u1: left.inverse().expect("unitriangular"),
        t,
        w,
        u2: right.inverse().expect("unitriangular"),
    };
    debug_assert_eq!(out.u1.mul(&out.t).mul(&out.w).mul(&out.u2), *g);
    Ok(out)
}

fn row_axpy(m: &mut Mat, dst: usize, src: usize, f: u32) {
    let q = m.q();
    for c in 0..m.n() {
        let v = m.get(dst, c) + f * m.get(src, c);
        m.set(dst, c, (v % q) as i64);
    }
}

fn col_axpy(m: &mut Mat, dst: usize, src: usize, f: u32) {
    let q = m.q();
    for r in 0..m.n() {
        let v = m.get(r, dst) + f * m.get(r, src);
        m.set(r, dst, (v % q) as i64);
    }
}

/// Position of g in SO(2n+1) relative to the Siegel parabolic Q_n = L_n V_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Siegel {
    /// g = l_n(a) v.
    Parabolic { a: Mat, v: Mat },
    /// g = l_n(a) n1 w_n n2 with n1, n2 in V_n.
    OpenCell { a: Mat, n1: Mat, n2: Mat },
    Other,
}

/// Membership in the unipotent radical V_n of the Siegel parabolic.
pub fn in_siegel_radical(v: &Mat) -> bool {
    let n = (v.n() - 1) / 2;
    v.is_upper_unitriangular() && (0..n).all(|i| (i + 1..n).all(|j| v.get(i, j) == 0))
}

/// Classify g and factor it exactly. The open cell is detected by an
/// invertible lower-left n x n block, which equals a*.
pub fn siegel_decompose(g: &Mat) -> Result<Siegel> {
    let size = g.n();
    let n = (size - 1) / 2;
    let q = g.q();
    if (n..size).all(|r| (0..n).all(|c| g.get(r, c) == 0)) {
        let a = g.sub(0, 0, n);
        let v = levi_odd(&a).inverse().expect("invertible").mul(g);
        if !in_siegel_radical(&v) {
            return Err(Error::Consistency("parabolic factor left V_n".into()));
        }
        return Ok(Siegel::Parabolic { a, v });
    }
    let lower = g.sub(n + 1, 0, n);
    let Some(lower_inv) = lower.inverse() else {
        return Ok(Siegel::Other);
    };
    let a = lower.star().expect("invertible");
    // Top block row of n2 is lower^{-1} times the bottom block row of g.
    let mut n2 = Mat::identity(size, q);
    for i in 0..n {
        for c in n..size {
            let v: u32 = (0..n).map(|k| lower_inv.get(i, k) * g.get(n + 1 + k, c)).sum();
            n2.set(i, c, (v % q) as i64);
        }
    }
    for k in 0..n {
        let x = n2.get(n - 1 - k, n) as i64;
        n2.set(n, n + 1 + k, -x);
    }
    let n1 = levi_odd(&a)
        .inverse()
        .expect("invertible")
        .mul(g)
        .mul(&n2.inverse().expect("unitriangular"))
        .mul(&w_odd(n, q).inverse().expect("permutation"));
    if !in_siegel_radical(&n1) || !in_siegel_radical(&n2) {
        return Err(Error::Consistency("open-cell factors left V_n".into()));
    }
    Ok(Siegel::OpenCell { a, n1, n2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{preserves_form, FiniteGroup, GroupSpec, DEFAULT_BUDGET};
    use crate::weyl::WeylElement;
    use proptest::prelude::*;

    fn check_bruhat(spec: GroupSpec) {
        let g = FiniteGroup::enumerate(spec, DEFAULT_BUDGET).unwrap();
        for x in g.elements() {
            let b = bruhat_decompose(x).unwrap();
            assert_eq!(b.u1.mul(&b.t).mul(&b.w).mul(&b.u2), *x);
            assert!(b.u1.is_upper_unitriangular() && b.u2.is_upper_unitriangular());
            assert!(b.t.is_diagonal());
            if spec.kind != crate::groups::GroupKind::Gl {
                assert!(spec.contains(&b.u1) && spec.contains(&b.u2));
                // for odd forms the sign may sit in t and w instead
                assert!(preserves_form(&b.t) && preserves_form(&b.w));
                if spec.kind == crate::groups::GroupKind::SoEven {
                    assert!(spec.contains(&b.w));
                }
            }
        }
    }

    #[test]
    fn bruhat_exhaustive_small_groups() {
        check_bruhat(GroupSpec::so_even(2, 3));
        check_bruhat(GroupSpec::so_odd(1, 5));
        check_bruhat(GroupSpec::gl(2, 5));
    }

    #[test]
    fn siegel_exhaustive_so5() {
        let g = FiniteGroup::enumerate(GroupSpec::so_odd(2, 3), DEFAULT_BUDGET).unwrap();
        let w = w_odd(2, 3);
        let (mut par, mut open) = (0, 0);
        for x in g.elements() {
            match siegel_decompose(x).unwrap() {
                Siegel::Parabolic { a, v } => {
                    par += 1;
                    assert_eq!(levi_odd(&a).mul(&v), *x);
                }
                Siegel::OpenCell { a, n1, n2 } => {
                    open += 1;
                    assert_eq!(levi_odd(&a).mul(&n1).mul(&w).mul(&n2), *x);
                }
                Siegel::Other => {}
            }
        }
        // |Q_2| = |GL_2| |V_2| and the open cell has |Q_2| |V_2| elements
        assert_eq!(par, 48 * 27);
        assert_eq!(open, 48 * 27 * 27);
    }

    proptest! {
        #[test]
        fn bruhat_weyl_part_is_bi_invariant(i in 0usize..14400, a in 0usize..25, b in 0usize..25) {
            thread_local! {
                static G: FiniteGroup =
                    FiniteGroup::enumerate(GroupSpec::so_even(2, 5), DEFAULT_BUDGET).unwrap();
            }
            G.with(|g| {
                let us = g.unipotent_indices();
                let x = g.element(i);
                let y = g.element(us[a]).mul(x).mul(g.element(us[b]));
                let wx = bruhat_decompose(x).unwrap().w;
                let wy = bruhat_decompose(&y).unwrap().w;
                prop_assert_eq!(wx, wy);
                prop_assert!(WeylElement::from_matrix(&wx).is_some_and(|w| w.is_even()));
                Ok(())
            })?;
        }
    }
}
