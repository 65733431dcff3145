//! Embeddings between the orthogonal groups, the named elements used by the
//! zeta integrals and the generic characters of the unipotent radicals.

use crate::field::Fq;
use crate::mat::Mat;

fn field(q: u32) -> Fq {
    Fq::new(q).expect("valid field")
}

/// Conjugate `x` by `m`: m^{-1} x m.
fn conj_by(x: &Mat, m: &Mat) -> Mat {
    m.inverse().expect("invertible").mul(x).mul(m)
}

/// Insert a 1 at position `at`, moving later rows and columns down by one.
fn insert_unit(g: &Mat, at: usize) -> Mat {
    let n = g.n();
    let shift = |i: usize| if i < at { i } else { i + 1 };
    let mut x = Mat::zero(n + 1, g.q());
    for i in 0..n {
        for j in 0..n {
            x.set(shift(i), shift(j), g.get(i, j) as i64);
        }
    }
    x.set(at, at, 1);
    x
}

/// Pad with identity blocks of size `k` on both sides.
fn pad(x: &Mat, k: usize) -> Mat {
    if k == 0 {
        return *x;
    }
    let id = Mat::identity(k, x.q());
    Mat::block_diag(&[id, *x, id])
}

/// SO(2n+1) into SO(2l) for n < l: a unit is inserted before the middle
/// coordinate, the middle pair is rotated by [[2, -1], [1, 1/2]] and the
/// result is padded with identities.
pub fn embed_odd_in_even(g: &Mat, l: usize) -> Mat {
    let n = (g.n() - 1) / 2;
    assert!(n < l, "embedding needs n < l");
    let q = g.q();
    let f = field(q);
    let x = insert_unit(g, n);
    let mid = Mat::from_rows(q, &[&[2, -1], &[1, f.half() as i64]]);
    let id = Mat::identity(n, q);
    let m = Mat::block_diag(&[id, mid, id]);
    pad(&conj_by(&x, &m), l - n - 1)
}

/// The 3 x 3 block used by the embedding SO(2l) -> SO(2l+1).
pub fn middle_block(q: u32) -> Mat {
    let f = field(q);
    let (h, qt) = (f.half() as i64, f.quarter() as i64);
    Mat::from_rows(q, &[&[qt, h, -h], &[h, 0, 1], &[-h, 1, 1]])
}

/// SO(2l) into SO(2l+1): insert a unit in the middle and conjugate by
/// diag(I, M, I) with M the `middle_block`.
pub fn embed_even_in_odd(g: &Mat) -> Mat {
    let l = g.n() / 2;
    let q = g.q();
    let x = insert_unit(g, l);
    let id = Mat::identity(l - 1, q);
    let m = if l > 1 {
        Mat::block_diag(&[id, middle_block(q), id])
    } else {
        middle_block(q)
    };
    conj_by(&x, &m)
}

/// l_n(a) = diag(a, 1, a*) in SO(2n+1).
pub fn levi_odd(a: &Mat) -> Mat {
    let q = a.q();
    Mat::block_diag(&[*a, Mat::identity(1, q), a.star().expect("invertible")])
}

/// t_n(x) = diag(x, I_{2l-2n}, x*) in SO(2l).
pub fn levi_even(l: usize, x: &Mat) -> Mat {
    let q = x.q();
    let n = x.n();
    let xs = x.star().expect("invertible");
    if n == l {
        Mat::block_diag(&[*x, xs])
    } else {
        Mat::block_diag(&[*x, Mat::identity(2 * (l - n), q), xs])
    }
}

/// q_n(a) = diag(I_{l-n-1}, a, I_2, a*, I_{l-n-1}), the image of l_n(a).
pub fn levi_image(l: usize, a: &Mat) -> Mat {
    let q = a.q();
    let inner = Mat::block_diag(&[*a, Mat::identity(2, q), a.star().expect("invertible")]);
    pad(&inner, l - a.n() - 1)
}

/// w_n = [[0, 0, I_n], [0, (-1)^n, 0], [I_n, 0, 0]] in SO(2n+1).
pub fn w_odd(n: usize, q: u32) -> Mat {
    let s: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
    Mat::from_fn(2 * n + 1, q, |i, j| {
        if i == n && j == n {
            s
        } else {
            (i < n && j == i + n + 1 || j < n && i == j + n + 1) as i64
        }
    })
}

/// d_n = diag(-1, 1, -1, .., (-1)^n) in GL_n.
pub fn d_n(n: usize, q: u32) -> Mat {
    Mat::from_fn(n, q, |i, j| if i == j { if i % 2 == 0 { -1 } else { 1 } } else { 0 })
}

/// diag(I_{l-1}, J_2, I_{l-1}); normalizes SO(2l) without lying in it.
pub fn c_matrix(l: usize, q: u32) -> Mat {
    pad(&Mat::antidiag(2, q), l - 1)
}

/// diag(I_{l-1}, -1/2, -2, I_{l-1}).
pub fn t_tilde(l: usize, q: u32) -> Mat {
    let f = field(q);
    let mid = Mat::diag(q, &[f.neg(f.half()), f.elem(-2)]);
    pad(&mid, l - 1)
}

/// t'_n: t~ for odd n, the identity for even n.
pub fn t_prime(l: usize, n: usize, q: u32) -> Mat {
    if n % 2 == 1 {
        t_tilde(l, q)
    } else {
        Mat::identity(2 * l, q)
    }
}

/// w_{l,l} = diag(I_l / 2, 1, 2 I_l) in SO(2l+1).
pub fn w_ll(l: usize, q: u32) -> Mat {
    let f = field(q);
    let mut d = vec![f.half(); l];
    d.push(1);
    d.extend(std::iter::repeat_n(2, l));
    Mat::diag(q, &d)
}

/// Place blocks of a block permutation matrix: `layout[r] = c` puts an
/// identity in block row r and block column c.
fn block_perm(row_sizes: &[usize], col_sizes: &[usize], layout: &[usize], q: u32) -> Mat {
    let n: usize = row_sizes.iter().sum();
    let offs = |sizes: &[usize], k: usize| sizes[..k].iter().sum::<usize>();
    let mut m = Mat::zero(n, q);
    for (r, &c) in layout.iter().enumerate() {
        assert_eq!(row_sizes[r], col_sizes[c]);
        let (ro, co) = (offs(row_sizes, r), offs(col_sizes, c));
        for k in 0..row_sizes[r] {
            m.set(ro + k, co + k, 1);
        }
    }
    m
}

/// w^{l,n}, moving the GL_n block next to the middle.
pub fn w_ln(l: usize, n: usize, q: u32) -> Mat {
    let k = l - n - 1;
    block_perm(&[n, k, 2, k, n], &[k, n, 2, n, k], &[1, 0, 2, 4, 3], q)
}

/// The image of w_n in SO(2l) without its torus factor.
pub fn w_hat(l: usize, n: usize, q: u32) -> Mat {
    let k = l - n - 1;
    let sizes = [k, n, 1, 1, n, k];
    let layout = if n % 2 == 1 { [0, 4, 3, 2, 1, 5] } else { [0, 4, 2, 3, 1, 5] };
    block_perm(&sizes, &sizes, &layout, q)
}

/// The block form of w~_n for n < l: first and last n coordinates
/// exchanged, middle pair swapped for odd n.
pub fn w_tilde_block(l: usize, n: usize, q: u32) -> Mat {
    let k = l - n - 1;
    let sizes = [n, k, 1, 1, k, n];
    let layout = if n % 2 == 1 { [5, 1, 3, 2, 4, 0] } else { [5, 1, 2, 3, 4, 0] };
    block_perm(&sizes, &sizes, &layout, q)
}

/// The block form of w~'_l.
pub fn w_tilde_prime_block(l: usize, q: u32) -> Mat {
    if l.is_multiple_of(2) {
        block_perm(&[l, l], &[l, l], &[1, 0], q)
    } else {
        let k = l - 1;
        block_perm(&[k, 1, 1, k], &[1, k, k, 1], &[2, 0, 3, 1], q)
    }
}

/// The block form of the long Weyl element of SO(2l).
pub fn w_long_block(l: usize, q: u32) -> Mat {
    if l.is_multiple_of(2) {
        Mat::antidiag(2 * l, q)
    } else {
        let j = Mat::antidiag(l - 1, q);
        let mut m = Mat::zero(2 * l, q);
        m.put(0, l + 1, &j);
        m.put(l - 1, l - 1, &Mat::identity(2, q));
        m.put(l + 1, 0, &j);
        m
    }
}

/// r_x in R^{l,n}: the entries of x fill block (2,1) and the form fixes
/// block (5,4).
pub fn r_element(l: usize, n: usize, x: &[u32], q: u32) -> Mat {
    let k = l - n - 1;
    assert_eq!(x.len(), k * n);
    let size = 2 * l;
    let mut m = Mat::identity(size, q);
    for a in 0..k {
        for b in 0..n {
            let v = x[a * n + b] as i64;
            let (i, j) = (n + a, b);
            m.set(i, j, v);
            m.set(size - 1 - j, size - 1 - i, -v);
        }
    }
    m
}

/// All elements of R^{l,n} in lexicographic order of their x entries.
pub fn r_elements(l: usize, n: usize, q: u32) -> Vec<Mat> {
    let len = (l - n - 1) * n;
    let count = (q as usize).pow(len as u32);
    (0..count)
        .map(|mut k| {
            let mut x = vec![0u32; len];
            for slot in x.iter_mut().rev() {
                *slot = (k % q as usize) as u32;
                k /= q as usize;
            }
            r_element(l, n, &x, q)
        })
        .collect()
}

/// Argument of the generic character of U in SO(2l):
/// sum_{i <= l-2} u_{i,i+1} + u_{l-1,l}/4 - u_{l-1,l+1}/2 (1-based).
pub fn psi_arg_so_even(u: &Mat) -> u32 {
    let q = u.q();
    let f = field(q);
    let l = u.n() / 2;
    let mut s = (0..l - 2).map(|i| u.get(i, i + 1)).sum::<u32>() % q;
    s = f.add(s, f.mul(f.quarter(), u.get(l - 2, l - 1)));
    f.sub(s, f.mul(f.half(), u.get(l - 2, l)))
}

/// Argument of the generic character of the upper unitriangular GL_n.
pub fn psi_arg_gl(u: &Mat) -> u32 {
    let n = u.n();
    (0..n.saturating_sub(1)).map(|i| u.get(i, i + 1)).sum::<u32>() % u.q()
}

/// Argument of the character of U in SO(2n+1) pulled back from the Levi
/// GL_n block.
pub fn psi_arg_so_odd(u: &Mat) -> u32 {
    let n = (u.n() - 1) / 2;
    (0..n.saturating_sub(1)).map(|i| u.get(i, i + 1)).sum::<u32>() % u.q()
}

/// Argument of the character of N^{l-n} (trivial when n = l-1).
pub fn psi_arg_prime(v: &Mat, n: usize) -> u32 {
    let q = v.q();
    let f = field(q);
    let l = v.n() / 2;
    if n + 1 >= l {
        return 0;
    }
    let k = l - n - 1;
    let mut s = (0..k - 1).map(|i| v.get(i, i + 1)).sum::<u32>() % q;
    s = f.add(s, f.mul(f.quarter(), v.get(k - 1, l - 1)));
    f.sub(s, f.mul(f.half(), v.get(k - 1, l)))
}

/// The 3 x 3 matrix with square I_3, as integers scaled by 16.
pub const INVOLUTION_16: [[i64; 3]; 3] = [[-2, 12, 36], [-6, 20, 12], [9, -6, -2]];

/// That matrix reduced into F_q.
pub fn involution_matrix(q: u32) -> Mat {
    let f = field(q);
    let s = f.inv(16) as i64;
    Mat::from_fn(3, q, |i, j| INVOLUTION_16[i][j] * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{preserves_form, FiniteGroup, GroupSpec, DEFAULT_BUDGET};
    use crate::weyl;

    #[test]
    fn embeddings_are_injective_homomorphisms() {
        for (l, n, q) in [(2, 1, 3), (2, 1, 5), (3, 1, 3), (3, 2, 3)] {
            let g = FiniteGroup::enumerate(GroupSpec::so_odd(n, q), DEFAULT_BUDGET).unwrap();
            let target = GroupSpec::so_even(l, q);
            let mut seen = std::collections::HashSet::new();
            for (i, a) in g.elements().iter().enumerate() {
                let ea = embed_odd_in_even(a, l);
                assert!(target.contains(&ea), "{a:?}");
                assert!(seen.insert(ea.key()));
                let b = g.element((i * 7 + 3) % g.order());
                assert_eq!(embed_odd_in_even(&a.mul(b), l), ea.mul(&embed_odd_in_even(b, l)));
            }
        }
        for q in [3, 5] {
            let g = FiniteGroup::enumerate(GroupSpec::so_even(2, q), DEFAULT_BUDGET).unwrap();
            let target = GroupSpec::so_odd(2, q);
            let mut seen = std::collections::HashSet::new();
            for (i, a) in g.elements().iter().enumerate() {
                let ea = embed_even_in_odd(a);
                assert!(target.contains(&ea));
                assert!(seen.insert(ea.key()));
                let b = g.element((i * 11 + 5) % g.order());
                assert_eq!(embed_even_in_odd(&a.mul(b)), ea.mul(&embed_even_in_odd(b)));
            }
        }
    }

    #[test]
    fn embedded_torus_middle_block() {
        // diag(s, t, t^-1, s*) goes to a matrix whose middle 3 x 3 block is
        // the rational expression in t below.
        let q = 7;
        let f = Fq::new(q).unwrap();
        for t in 1..q {
            let ti = f.inv(t);
            let g = Mat::diag(q, &[3, t, ti, f.inv(3)]);
            let e = embed_even_in_odd(&g);
            let (h, qt) = (f.half(), f.quarter());
            let sum = f.add(t, ti);
            let dif = f.sub(t, ti);
            let a = f.add(h, f.mul(qt, sum));
            let b = f.sub(h, f.mul(qt, sum));
            let want = [
                [a, f.mul(h, dif), f.mul(2, b)],
                [f.mul(qt, dif), f.mul(h, sum), f.neg(f.mul(h, dif))],
                [f.mul(h, b), f.neg(f.mul(qt, dif)), a],
            ];
            for (i, row) in want.iter().enumerate() {
                for (j, w) in row.iter().enumerate() {
                    assert_eq!(e.get(1 + i, 1 + j), *w, "t = {t}");
                }
            }
            assert_eq!(e.get(0, 0), 3);
            assert_eq!(e.get(4, 4), f.inv(3));
        }
    }

    #[test]
    fn levi_maps_to_q_n() {
        for (l, n, q) in [(2, 1, 5), (3, 1, 3), (3, 2, 3)] {
            let gl = FiniteGroup::enumerate(GroupSpec::gl(n, q), DEFAULT_BUDGET).unwrap();
            for a in gl.elements() {
                assert_eq!(embed_odd_in_even(&levi_odd(a), l), levi_image(l, a));
            }
        }
    }

    #[test]
    fn named_elements_lie_in_the_right_groups() {
        for q in [3, 5, 7] {
            for l in 2..=4 {
                let so = GroupSpec::so_even(l, q);
                assert!(so.contains(&t_tilde(l, q)));
                assert!(so.contains(&w_long_block(l, q)));
                assert!(so.contains(&w_tilde_prime_block(l, q)));
                let c = c_matrix(l, q);
                assert!(preserves_form(&c) && c.det() == q - 1);
                if l < 4 {
                    assert!(GroupSpec::so_odd(l, q).contains(&w_ll(l, q)));
                }
                for n in 1..l {
                    assert!(so.contains(&w_ln(l, n, q)));
                    assert!(so.contains(&w_hat(l, n, q)));
                    assert!(so.contains(&w_tilde_block(l, n, q)));
                    assert!(GroupSpec::so_odd(n, q).contains(&w_odd(n, q)));
                }
            }
        }
    }

    #[test]
    fn block_forms_match_signed_permutations() {
        for l in 2..=4 {
            let q = 5;
            for n in 1..l {
                assert_eq!(w_tilde_block(l, n, q), weyl::w_tilde(l, n).to_matrix(q));
                let conj = w_ln(l, n, q).mul(&w_hat(l, n, q)).mul(&w_ln(l, n, q).inverse().unwrap());
                assert_eq!(conj, w_tilde_block(l, n, q));
            }
            assert_eq!(w_tilde_prime_block(l, q), weyl::w_tilde_prime(l).to_matrix(q));
            assert_eq!(w_long_block(l, q), weyl::w_long(l).to_matrix(q));
            let c = c_matrix(l, q);
            assert_eq!(
                c.mul(&weyl::w_tilde_prime(l).to_matrix(q)).mul(&c),
                weyl::w_tilde_prime(l).conj_c().to_matrix(q)
            );
        }
    }

    #[test]
    fn image_of_w_n() {
        for (l, n) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
            for q in [3, 5, 7] {
                let img = embed_odd_in_even(&w_odd(n, q), l);
                assert_eq!(img, t_prime(l, n, q).mul(&w_hat(l, n, q)), "l={l} n={n} q={q}");
                let c = c_matrix(l, q);
                let cc = c.mul(&img).mul(&c);
                let want = if n % 2 == 1 {
                    t_tilde(l, q).inverse().unwrap().mul(&w_hat(l, n, q))
                } else {
                    w_hat(l, n, q)
                };
                assert_eq!(cc, want);
            }
        }
    }

    #[test]
    fn t_tilde_intertwines_characters() {
        // psi(c t~^{-1} u t~ c) = psi(u)
        for (l, q) in [(2, 3), (2, 5), (3, 5)] {
            let g = FiniteGroup::enumerate(GroupSpec::so_even(l, q), DEFAULT_BUDGET);
            let Ok(g) = g else { continue };
            let tt = t_tilde(l, q);
            let tti = tt.inverse().unwrap();
            let c = c_matrix(l, q);
            for i in g.unipotent_indices() {
                let u = g.element(i);
                let v = c.mul(&tti).mul(u).mul(&tt).mul(&c);
                assert!(v.is_upper_unitriangular());
                assert_eq!(psi_arg_so_even(&v), psi_arg_so_even(u));
            }
        }
        assert!(t_tilde(2, 3).is_identity());
        assert_eq!(t_tilde(2, 5), Mat::diag(5, &[1, 2, 3, 1]));
    }

    #[test]
    fn r_elements_are_orthogonal() {
        for (l, n, q) in [(3, 1, 3), (4, 1, 3), (4, 2, 3), (2, 1, 5)] {
            let rs = r_elements(l, n, q);
            assert_eq!(rs.len(), (q as usize).pow(((l - n - 1) * n) as u32));
            for r in &rs {
                assert!(GroupSpec::so_even(l, q).contains(r));
            }
        }
    }

    #[test]
    fn involution_squares_to_identity() {
        let a = INVOLUTION_16;
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| a[i][k] * a[k][j]).sum();
                assert_eq!(s, if i == j { 256 } else { 0 });
            }
        }
        for q in [3, 5, 7] {
            let m = involution_matrix(q);
            assert!(m.mul(&m).is_identity());
        }
    }
}
