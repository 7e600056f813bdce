//! Exact dense matrices over the integers and rationals.
//!
//! Everything that feeds a decision elsewhere in the crate (classification,
//! lattice membership, group invariants) goes through these types; no
//! floating point is involved anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Dense integer matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = IMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, Int::from(*v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn to_rational(&self) -> QMat {
        let mut m = QMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, Rat::from_integer(self.get(i, j).clone()));
            }
        }
        m
    }

    pub fn det(&self) -> Int {
        let d = self.to_rational().det();
        assert!(d.is_integer());
        d.to_integer()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(dst, j) + k * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, dst) + k * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }
}

/// Smith normal form: returns `(u, s, v)` with `u * m * v = s`, `u` and `v`
/// unimodular, `s` diagonal with nonnegative entries satisfying the
/// divisibility chain d_1 | d_2 | ...
pub fn smith_normal_form(m: &IMat) -> (IMat, IMat, IMat) {
    let mut s = m.clone();
    let mut u = IMat::identity(m.rows());
    let mut v = IMat::identity(m.cols());
    let n = m.rows().min(m.cols());

    let mut t = 0;
    while t < n {
        // pivot: smallest |entry| in the trailing submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s.rows() {
            for j in t..s.cols() {
                if !s.get(i, j).is_zero() {
                    match pivot {
                        Some((pi, pj)) if s.get(pi, pj).abs() <= s.get(i, j).abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // clear row t and column t; truncated division keeps remainders
        // strictly smaller than the pivot, so this terminates
        'reduce: loop {
            for i in t + 1..s.rows() {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = s.get(i, t) / s.get(t, t);
                let negq = -q;
                s.add_row(i, t, &negq);
                u.add_row(i, t, &negq);
                if !s.get(i, t).is_zero() {
                    s.swap_rows(t, i);
                    u.swap_rows(t, i);
                    continue 'reduce;
                }
            }
            for j in t + 1..s.cols() {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = s.get(t, j) / s.get(t, t);
                let negq = -q;
                s.add_col(j, t, &negq);
                v.add_col(j, t, &negq);
                if !s.get(t, j).is_zero() {
                    s.swap_cols(t, j);
                    v.swap_cols(t, j);
                    continue 'reduce;
                }
            }
            // pivot must divide the whole trailing block
            for i in t + 1..s.rows() {
                for j in t + 1..s.cols() {
                    if !(s.get(i, j) % s.get(t, t)).is_zero() {
                        s.add_row(t, i, &Int::one());
                        u.add_row(t, i, &Int::one());
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        t += 1;
    }
    for i in 0..n {
        if s.get(i, i).is_negative() {
            s.negate_row(i);
            u.negate_row(i);
        }
    }
    (u, s, v)
}

/// Invariants of the cokernel Z^rows / (column span): elementary divisors
/// > 1 plus the free rank (rows - rank).
pub fn divisors_of_snf(s: &IMat) -> (Vec<Int>, usize) {
    let n = s.rows().min(s.cols());
    let mut divisors = Vec::new();
    let mut rank = 0;
    for i in 0..n {
        let d = s.get(i, i);
        if d.is_zero() {
            continue;
        }
        rank += 1;
        if !d.is_one() {
            divisors.push(d.clone());
        }
    }
    (divisors, s.rows() - rank)
}

/// Dense rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> QMat {
        let mut out = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j) - other.get(i, j));
            }
        }
        out
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }

    pub fn submatrix(&self, keep_rows: &[usize], keep_cols: &[usize]) -> QMat {
        let mut out = QMat::zeros(keep_rows.len(), keep_cols.len());
        for (i, &r) in keep_rows.iter().enumerate() {
            for (j, &c) in keep_cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !self.get(i, col).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                self.data.swap(row * self.cols + j, p * self.cols + j);
            }
            let inv = self.get(row, col).recip();
            for j in col..self.cols {
                let v = self.get(row, j) * &inv;
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i != row && !self.get(i, col).is_zero() {
                    let f = self.get(i, col).clone();
                    for j in col..self.cols {
                        let v = self.get(i, j) - &f * self.get(row, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Unique solution of `self * x = b`, or None if singular/inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut aug = QMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        if pivots.len() < self.cols {
            return None; // underdetermined
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the right kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut vec = vec![Rat::zero(); self.cols];
            vec[free] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                vec[p] = -m.get(r, free).clone();
            }
            basis.push(vec);
        }
        basis
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut inv = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rat::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !m.get(i, col).is_zero()) else {
                return Rat::zero();
            };
            if p != col {
                for j in 0..n {
                    m.data.swap(col * n + j, p * n + j);
                }
                det = -det;
            }
            det *= m.get(col, col);
            let inv = m.get(col, col).recip();
            for i in col + 1..n {
                if m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col) * &inv;
                for j in col..n {
                    let v = m.get(i, j) - &f * m.get(col, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|v| !v.is_negative())
    }
}

/// Scale a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer_vector(v: &[Rat]) -> Vec<Int> {
    use num_integer::Integer;
    let mut lcm = Int::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<Int> = v.iter().map(|x| x.numer() * &lcm / x.denom()).collect();
    let mut g = Int::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn snf_identity() {
        let (u, s, v) = smith_normal_form(&IMat::identity(3));
        assert_eq!(s, IMat::identity(3));
        assert_eq!(u.det().abs(), int(1));
        assert_eq!(v.det().abs(), int(1));
    }

    #[test]
    fn snf_diagonal_divisors() {
        let m = IMat::from_rows(&[vec![2, 0], vec![0, 6]]);
        let (_, s, _) = smith_normal_form(&m);
        let (div, free) = divisors_of_snf(&s);
        assert_eq!(div, vec![int(2), int(6)]);
        assert_eq!(free, 0);
    }

    #[test]
    fn snf_random_matrices_satisfy_umv_eq_s() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let rows: Vec<Vec<i64>> = (0..4)
                .map(|_| (0..4).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let m = IMat::from_rows(&rows);
            let (u, s, v) = smith_normal_form(&m);
            assert_eq!(u.mul(&m).mul(&v), s);
            assert_eq!(u.det().abs(), int(1));
            assert_eq!(v.det().abs(), int(1));
            // divisibility chain
            let n = 4;
            for i in 0..n - 1 {
                let d = s.get(i, i);
                let e = s.get(i + 1, i + 1);
                if !d.is_zero() && !e.is_zero() {
                    assert!((e % d).is_zero());
                }
                if d.is_zero() {
                    assert!(e.is_zero());
                }
            }
        }
    }

    #[test]
    fn solve_and_inverse() {
        let mut m = QMat::zeros(2, 2);
        m.set(0, 0, rat(1, 1));
        m.set(0, 1, rat(2, 1));
        m.set(1, 0, rat(3, 1));
        m.set(1, 1, rat(4, 1));
        let x = m.solve(&[rat(5, 1), rat(11, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(2, 1)]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul(&m), QMat::identity(2));
        assert_eq!(m.det(), rat(-2, 1));
    }

    #[test]
    fn kernel_of_singular_matrix() {
        let mut m = QMat::zeros(2, 2);
        m.set(0, 0, rat(1, 1));
        m.set(0, 1, rat(-1, 1));
        m.set(1, 0, rat(2, 1));
        m.set(1, 1, rat(-2, 1));
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(v[0], v[1]);
    }

    #[test]
    fn primitive_vector_scaling() {
        let v = vec![rat(1, 2), rat(3, 4)];
        assert_eq!(primitive_integer_vector(&v), vec![int(2), int(3)]);
    }
}
