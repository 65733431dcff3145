//! Small dense matrices over F_q, stored inline so they are `Copy`.

use std::fmt;

/// Largest supported matrix size.
pub const MAX_DIM: usize = 8;

/// An n x n matrix over F_q with n <= 8 and q < 256.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat {
    n: u8,
    q: u8,
    e: [u8; MAX_DIM * MAX_DIM],
}

impl Mat {
    pub fn zero(n: usize, q: u32) -> Mat {
        assert!((1..=MAX_DIM).contains(&n), "matrix size {n} out of range");
        assert!(q < 256, "modulus {q} out of range");
        Mat {
            n: n as u8,
            q: q as u8,
            e: [0; MAX_DIM * MAX_DIM],
        }
    }

    pub fn identity(n: usize, q: u32) -> Mat {
        let mut m = Mat::zero(n, q);
        for i in 0..n {
            m.e[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(n: usize, q: u32, f: impl Fn(usize, usize) -> i64) -> Mat {
        let mut m = Mat::zero(n, q);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(q: u32, rows: &[&[i64]]) -> Mat {
        let n = rows.len();
        Mat::from_fn(n, q, |i, j| rows[i][j])
    }

    /// The antidiagonal matrix J_n.
    pub fn antidiag(n: usize, q: u32) -> Mat {
        Mat::from_fn(n, q, |i, j| (i + j + 1 == n) as i64)
    }

    pub fn diag(q: u32, d: &[u32]) -> Mat {
        Mat::from_fn(d.len(), q, |i, j| if i == j { d[i] as i64 } else { 0 })
    }

    /// Block diagonal matrix from square blocks.
    pub fn block_diag(blocks: &[Mat]) -> Mat {
        let n: usize = blocks.iter().map(|b| b.n()).sum();
        let mut m = Mat::zero(n, blocks[0].q());
        let mut off = 0;
        for b in blocks {
            m.put(off, off, b);
            off += b.n();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn q(&self) -> u32 {
        self.q as u32
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.n as usize + j] as u32
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        let n = self.n as usize;
        self.e[i * n + j] = v.rem_euclid(self.q as i64) as u8;
    }

    /// Copy `b` into this matrix with its top-left corner at (r, c).
    pub fn put(&mut self, r: usize, c: usize, b: &Mat) {
        for i in 0..b.n() {
            for j in 0..b.n() {
                self.set(r + i, c + j, b.get(i, j) as i64);
            }
        }
    }

    /// The square block of size k starting at (r, c).
    pub fn sub(&self, r: usize, c: usize, k: usize) -> Mat {
        Mat::from_fn(k, self.q(), |i, j| self.get(r + i, c + j) as i64)
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        debug_assert_eq!(self.n, o.n);
        let n = self.n as usize;
        let q = self.q as u32;
        let mut m = Mat::zero(n, q);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u32;
                for k in 0..n {
                    acc += self.e[i * n + k] as u32 * o.e[k * n + j] as u32;
                }
                m.e[i * n + j] = (acc % q) as u8;
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.n(), self.q(), |i, j| self.get(j, i) as i64)
    }

    pub fn scale(&self, s: u32) -> Mat {
        Mat::from_fn(self.n(), self.q(), |i, j| (self.get(i, j) * s) as i64)
    }

    /// Gauss-Jordan inverse, `None` if singular.
    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n();
        let q = self.q();
        let mut a = *self;
        let mut inv = Mat::identity(n, q);
        for col in 0..n {
            let piv = (col..n).find(|&r| a.get(r, col) != 0)?;
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let s = inv_mod(a.get(col, col), q);
            a.scale_row(col, s);
            inv.scale_row(col, s);
            for r in 0..n {
                let f = a.get(r, col);
                if r != col && f != 0 {
                    a.add_row(r, col, q - f);
                    inv.add_row(r, col, q - f);
                }
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> u32 {
        let n = self.n();
        let q = self.q();
        let mut a = *self;
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a.get(r, col) != 0) else {
                return 0;
            };
            if piv != col {
                a.swap_rows(col, piv);
                det = (q - det) % q;
            }
            let p = a.get(col, col);
            det = det * p % q;
            let pinv = inv_mod(p, q);
            for r in col + 1..n {
                let f = a.get(r, col) * pinv % q;
                if f != 0 {
                    a.add_row(r, col, q - f);
                }
            }
        }
        det
    }

    /// Row-reduced echelon form (used for subspace keys).
    pub fn rref(&self, rows: usize) -> Mat {
        let n = self.n();
        let q = self.q();
        let mut a = *self;
        let mut lead = 0;
        for col in 0..n {
            if lead == rows {
                break;
            }
            let Some(piv) = (lead..rows).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(lead, piv);
            let s = inv_mod(a.get(lead, col), q);
            a.scale_row(lead, s);
            for r in 0..rows {
                let f = a.get(r, col);
                if r != lead && f != 0 {
                    a.add_row(r, lead, q - f);
                }
            }
            lead += 1;
        }
        a
    }

    /// a* = J a^{-T} J.
    pub fn star(&self) -> Option<Mat> {
        let j = Mat::antidiag(self.n(), self.q());
        Some(j.mul(&self.inverse()?.transpose()).mul(&j))
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.n(), self.q())
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.get(i, i) == 1 && (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j) == 0))
    }

    /// Exactly one nonzero entry in each row and column.
    pub fn is_monomial(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).filter(|&j| self.get(i, j) != 0).count() == 1)
            && (0..n).all(|j| (0..n).filter(|&i| self.get(i, j) != 0).count() == 1)
    }

    /// Row-major base-q digit string read as an integer; orders matrices
    /// lexicographically.
    pub fn key(&self) -> u128 {
        let q = self.q as u128;
        let n = self.n();
        self.e[..n * n]
            .iter()
            .fold(0u128, |acc, &d| acc * q + d as u128)
    }

    pub fn from_key(n: usize, q: u32, mut key: u128) -> Mat {
        let mut m = Mat::zero(n, q);
        for idx in (0..n * n).rev() {
            m.e[idx] = (key % q as u128) as u8;
            key /= q as u128;
        }
        m
    }

    /// Whether n x n digit strings over F_q fit in a `u128` key.
    pub fn key_fits(n: usize, q: u32) -> bool {
        (n * n) as f64 * (q as f64).log2() < 127.0
    }

    pub fn entries(&self) -> &[u8] {
        &self.e[..self.n() * self.n()]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.n();
        for j in 0..n {
            self.e.swap(a * n + j, b * n + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: u32) {
        let n = self.n();
        let q = self.q();
        for j in 0..n {
            self.e[r * n + j] = (self.e[r * n + j] as u32 * s % q) as u8;
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: u32) {
        let n = self.n();
        let q = self.q();
        for j in 0..n {
            let v = self.e[dst * n + j] as u32 + f * self.e[src * n + j] as u32;
            self.e[dst * n + j] = (v % q) as u8;
        }
    }
}

pub(crate) fn inv_mod(a: u32, q: u32) -> u32 {
    crate::field::pow_mod(a, q - 2, q)
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat(q={})[", self.q)?;
        for i in 0..self.n() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_mat(n: usize, q: u32) -> impl Strategy<Value = Mat> {
        proptest::collection::vec(0..q as i64, n * n)
            .prop_map(move |v| Mat::from_fn(n, q, |i, j| v[i * n + j]))
    }

    #[test]
    fn antidiag_is_recursive_form() {
        let j3 = Mat::antidiag(3, 5);
        assert_eq!(j3, Mat::from_rows(5, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]));
        assert!(j3.mul(&j3).is_identity());
    }

    #[test]
    fn rref_of_known_rows() {
        let m = Mat::from_rows(5, &[&[0, 2, 4], &[1, 1, 1], &[0, 0, 0]]);
        let r = m.rref(2);
        assert_eq!(r, Mat::from_rows(5, &[&[1, 0, 4], &[0, 1, 2], &[0, 0, 0]]));
    }

    proptest! {
        #[test]
        fn key_roundtrip(m in arb_mat(4, 5)) {
            prop_assert_eq!(Mat::from_key(4, 5, m.key()), m);
        }

        #[test]
        fn inverse_when_det_nonzero(m in arb_mat(3, 7)) {
            match m.inverse() {
                Some(inv) => {
                    prop_assert!(m.det() != 0);
                    prop_assert!(m.mul(&inv).is_identity());
                }
                None => prop_assert_eq!(m.det(), 0),
            }
        }

        #[test]
        fn det_is_multiplicative(a in arb_mat(3, 5), b in arb_mat(3, 5)) {
            prop_assert_eq!(a.mul(&b).det(), a.det() * b.det() % 5);
        }

        #[test]
        fn star_is_an_involutive_automorphism(a in arb_mat(3, 5), b in arb_mat(3, 5)) {
            if let (Some(sa), Some(sb)) = (a.star(), b.star()) {
                prop_assert_eq!(sa.star().unwrap(), a);
                prop_assert_eq!(a.mul(&b).star().unwrap(), sa.mul(&sb));
            }
        }

        #[test]
        fn key_order_is_lexicographic(a in arb_mat(2, 3), b in arb_mat(2, 3)) {
            prop_assert_eq!(a.key().cmp(&b.key()), a.entries().cmp(b.entries()));
        }
    }
}
