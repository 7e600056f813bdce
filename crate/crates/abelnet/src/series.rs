//! Truncated multivariate polynomial / power-series arithmetic with exact
//! coefficients. Everything is dense-by-monomial over a total-degree cap;
//! degrees stay tiny at desk scale.

use crate::mat::{Int, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;


/// Truncated multivariate polynomial with rational coefficients; monomials
/// of total degree above `maxdeg` are dropped by every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncPoly {
    pub nvars: usize,
    pub maxdeg: u32,
    pub terms: BTreeMap<Vec<u32>, Rat>,
}

impl TruncPoly {
    pub fn zero(nvars: usize, maxdeg: u32) -> Self {
        TruncPoly { nvars, maxdeg, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, maxdeg: u32, c: Rat) -> Self {
        let mut p = TruncPoly::zero(nvars, maxdeg);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The truncated geometric series 1/(1 - z_i) = sum z_i^k.
    pub fn geometric(nvars: usize, maxdeg: u32, var: usize) -> Self {
        let mut p = TruncPoly::zero(nvars, maxdeg);
        for k in 0..=maxdeg {
            let mut e = vec![0; nvars];
            e[var] = k;
            p.terms.insert(e, Rat::one());
        }
        p
    }

    pub fn monomial(nvars: usize, maxdeg: u32, exp: Vec<u32>, c: Rat) -> Self {
        let mut p = TruncPoly::zero(nvars, maxdeg);
        if !c.is_zero() && exp.iter().sum::<u32>() <= maxdeg {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn add_assign(&mut self, other: &TruncPoly) {
        for (e, c) in &other.terms {
            let entry = self.terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(e);
            }
        }
    }

    pub fn sub(&self, other: &TruncPoly) -> TruncPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry -= c;
            if entry.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn mul(&self, other: &TruncPoly) -> TruncPoly {
        let mut out = TruncPoly::zero(self.nvars, self.maxdeg);
        for (ea, ca) in &self.terms {
            let da: u32 = ea.iter().sum();
            for (eb, cb) in &other.terms {
                let db: u32 = eb.iter().sum();
                if da + db > self.maxdeg {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = out.terms.entry(e.clone()).or_insert_with(Rat::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    out.terms.remove(&e);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> TruncPoly {
        if c.is_zero() {
            return TruncPoly::zero(self.nvars, self.maxdeg);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn coefficient(&self, exp: &[u32]) -> Rat {
        self.terms.get(exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Multiplicative inverse as a truncated series; requires a nonzero
    /// constant term. Each fixed-point iteration settles one more degree.
    pub fn inverse(&self) -> Option<TruncPoly> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return None;
        }
        let c0_inv = c0.recip();
        let mut tail = self.clone();
        tail.terms.remove(&vec![0; self.nvars]);
        let mut q = TruncPoly::constant(self.nvars, self.maxdeg, c0_inv.clone());
        for _ in 0..self.maxdeg {
            // q <- (1 - tail * q) / c0
            let correction = TruncPoly::constant(self.nvars, self.maxdeg, Rat::one())
                .sub(&tail.mul(&q))
                .scale(&c0_inv);
            if correction == q {
                break;
            }
            q = correction;
        }
        Some(q)
    }
}

/// Determinant of a square matrix of truncated polynomials. Gaussian
/// elimination with series-inverse pivots when every leading pivot has a
/// nonzero constant term (true for I(z) - P of an irreducible critical
/// network, whose proper principal minors are nonsingular at z = 0),
/// otherwise Laplace expansion.
pub fn poly_det(entries: &[Vec<TruncPoly>]) -> TruncPoly {
    let n = entries.len();
    assert!(n > 0 && entries.iter().all(|r| r.len() == n));
    poly_det_gauss(entries).unwrap_or_else(|| poly_det_laplace(entries))
}

fn poly_det_gauss(entries: &[Vec<TruncPoly>]) -> Option<TruncPoly> {
    let n = entries.len();
    let (nvars, maxdeg) = (entries[0][0].nvars, entries[0][0].maxdeg);
    let mut m = entries.to_vec();
    let mut negate = false;
    for k in 0..n.saturating_sub(1) {
        let pivot_row = (k..n).find(|&i| !m[i][k].constant_term().is_zero())?;
        if pivot_row != k {
            m.swap(k, pivot_row);
            negate = !negate;
        }
        let pivot_inv = m[k][k].inverse()?;
        for i in k + 1..n {
            if m[i][k].terms.is_empty() {
                continue;
            }
            let factor = m[i][k].mul(&pivot_inv);
            for j in k..n {
                let delta = factor.mul(&m[k][j]);
                m[i][j] = m[i][j].sub(&delta);
            }
        }
    }
    let mut det = TruncPoly::constant(nvars, maxdeg, Rat::one());
    for (k, row) in m.iter().enumerate() {
        det = det.mul(&row[k]);
    }
    if negate {
        det = TruncPoly::zero(nvars, maxdeg).sub(&det);
    }
    Some(det)
}

fn poly_det_laplace(entries: &[Vec<TruncPoly>]) -> TruncPoly {
    let n = entries.len();
    let (nvars, maxdeg) = (entries[0][0].nvars, entries[0][0].maxdeg);
    if n == 1 {
        return entries[0][0].clone();
    }
    let mut det = TruncPoly::zero(nvars, maxdeg);
    for i in 0..n {
        if entries[i][0].terms.is_empty() {
            continue;
        }
        let minor: Vec<Vec<TruncPoly>> = (0..n)
            .filter(|&r| r != i)
            .map(|r| entries[r][1..].to_vec())
            .collect();
        let mut term = entries[i][0].mul(&poly_det_laplace(&minor));
        if i % 2 == 1 {
            term = TruncPoly::zero(nvars, maxdeg).sub(&term);
        }
        det.add_assign(&term);
    }
    det
}

/// Truncated power-series coefficients with exact integer values, the final
/// form of every enumeration identity in this crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTable {
    pub nvars: usize,
    pub maxdeg: u32,
    pub coefficients: BTreeMap<Vec<u32>, Int>,
}

impl SeriesTable {
    pub fn new(nvars: usize, maxdeg: u32) -> Self {
        SeriesTable { nvars, maxdeg, coefficients: BTreeMap::new() }
    }

    pub fn insert(&mut self, exp: Vec<u32>, c: Int) {
        assert_eq!(exp.len(), self.nvars);
        if exp.iter().sum::<u32>() <= self.maxdeg && !c.is_zero() {
            self.coefficients.insert(exp, c);
        }
    }

    pub fn get(&self, exp: &[u32]) -> Int {
        self.coefficients.get(exp).cloned().unwrap_or_else(Int::zero)
    }

    /// Exact-integer conversion of a rational truncated polynomial.
    pub fn from_poly(p: &TruncPoly) -> SeriesTable {
        let mut t = SeriesTable::new(p.nvars, p.maxdeg);
        for (e, c) in &p.terms {
            assert!(c.is_integer(), "series has a non-integer coefficient {} at {:?}", c, e);
            t.insert(e.clone(), c.to_integer());
        }
        t
    }

    /// Specialize every variable to a single one: coefficient of z^k becomes
    /// the sum over exponent vectors of total degree k.
    pub fn univariate(&self) -> SeriesTable {
        let mut t = SeriesTable::new(1, self.maxdeg);
        for (e, c) in &self.coefficients {
            let d: u32 = e.iter().sum();
            let entry = t.coefficients.entry(vec![d]).or_insert_with(Int::zero);
            *entry += c;
        }
        t.coefficients.retain(|_, c| !c.is_zero());
        t
    }
}

impl fmt::Display for SeriesTable {
    /// One line per monomial, "e_1,...,e_n : coefficient", in graded
    /// lexicographic order of the exponent vectors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lines: Vec<(&Vec<u32>, &Int)> = self.coefficients.iter().collect();
        lines.sort_by_key(|(e, _)| (e.iter().sum::<u32>(), (*e).clone()));
        for (e, c) in lines {
            let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{} : {}", exps.join(","), c)?;
        }
        Ok(())
    }
}

/// Compositions of total degree <= maxdeg over n variables, in graded
/// lexicographic order.
pub fn exponents_up_to(nvars: usize, maxdeg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn walk(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            walk(cur, pos + 1, left - v, out);
        }
        cur[pos] = 0;
    }
    walk(&mut cur, 0, maxdeg, &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}
