//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything in this module is pure and exact: square integer matrices,
//! Smith and Hermite normal forms with deterministic pivoting, integral
//! system solving, characteristic polynomials, integer factorization and
//! monic polynomial factorization up to degree 8.

mod intfactor;
mod modp;
mod poly;
mod zassenhaus;

pub use intfactor::{factor_integer, is_prime, valuation, PrimeFactorization};
pub use poly::IntPoly;
pub use zassenhaus::{factor_monic, unit_factor_test, UnitFactorStatus, MAX_FACTOR_DEGREE};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix entries do not form a {0}x{0} square matrix")]
    NotSquare(usize),
}

/// A square matrix over arbitrary-precision integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(LatticeError::NotSquare(dim));
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LatticeError::NotSquare(dim));
            }
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix::new(dim, entries)
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let dim = diag.len();
        let mut m = IntMatrix::zero(dim);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = BigInt::from(x);
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = IntMatrix::zero(dim);
        for i in 0..dim {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn zero(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.dim)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let d = self.dim;
        let mut out = IntMatrix::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim, "vector dimension mismatch");
        let d = self.dim;
        let mut out = vec![BigInt::zero(); d];
        for i in 0..d {
            for j in 0..d {
                out[i] += &self[(i, j)] * &v[j];
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> IntMatrix {
        let mut result = IntMatrix::identity(self.dim);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..d {
            if a[k * d + k].is_zero() {
                match (k + 1..d).find(|&r| !a[r * d + k].is_zero()) {
                    Some(r) => {
                        for j in 0..d {
                            a.swap(k * d + j, r * d + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let num = &a[i * d + j] * &a[k * d + k] - &a[i * d + k] * &a[k * d + j];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a[i * d + j] = q;
                }
                a[i * d + k] = BigInt::zero();
            }
            prev = a[k * d + k].clone();
        }
        let det = a[(d - 1) * d + (d - 1)].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_triangular(&self) -> bool {
        self.is_lower_triangular() || self.is_upper_triangular()
    }

    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        (0..self.dim).map(|i| self[(i, i)].clone()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Smith normal form `U * M * V = D` with unimodular `U`, `V` and diagonal
/// `D` whose entries are positive and form a divisibility chain.
#[derive(Clone, Debug)]
pub struct SnfData {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfData {
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        self.d.diagonal_entries()
    }
}

/// Position of the pivot: smallest nonzero absolute value, ties broken by
/// row-major scan order. Deterministic so normal forms are reproducible.
fn find_pivot(a: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..a.dim() {
        for j in from..a.dim() {
            if a[(i, j)].is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some(b) => {
                    if a[(i, j)].abs() < a[b].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

pub fn snf(m: &IntMatrix) -> Result<SnfData, LatticeError> {
    if m.det().is_zero() {
        return Err(LatticeError::SingularMatrix);
    }
    let d = m.dim();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(d);
    let mut v = IntMatrix::identity(d);

    let swap_rows = |a: &mut IntMatrix, u: &mut IntMatrix, r1: usize, r2: usize| {
        if r1 == r2 {
            return;
        }
        for j in 0..d {
            let t = a[(r1, j)].clone();
            a[(r1, j)] = a[(r2, j)].clone();
            a[(r2, j)] = t;
            let t = u[(r1, j)].clone();
            u[(r1, j)] = u[(r2, j)].clone();
            u[(r2, j)] = t;
        }
    };
    let swap_cols = |a: &mut IntMatrix, v: &mut IntMatrix, c1: usize, c2: usize| {
        if c1 == c2 {
            return;
        }
        for i in 0..d {
            let t = a[(i, c1)].clone();
            a[(i, c1)] = a[(i, c2)].clone();
            a[(i, c2)] = t;
            let t = v[(i, c1)].clone();
            v[(i, c1)] = v[(i, c2)].clone();
            v[(i, c2)] = t;
        }
    };

    for t in 0..d {
        'reduce: loop {
            let (pi, pj) = find_pivot(&a, t).ok_or(LatticeError::SingularMatrix)?;
            swap_rows(&mut a, &mut u, t, pi);
            swap_cols(&mut a, &mut v, t, pj);

            // clear column t below the pivot
            for r in t + 1..d {
                if a[(r, t)].is_zero() {
                    continue;
                }
                let q = &a[(r, t)] / &a[(t, t)];
                if !q.is_zero() {
                    for j in 0..d {
                        let sub = &q * &a[(t, j)];
                        a[(r, j)] -= &sub;
                        let sub = &q * &u[(t, j)];
                        u[(r, j)] -= &sub;
                    }
                }
                if !a[(r, t)].is_zero() {
                    continue 'reduce; // remainder became the smaller pivot candidate
                }
            }
            // clear row t right of the pivot
            for c in t + 1..d {
                if a[(t, c)].is_zero() {
                    continue;
                }
                let q = &a[(t, c)] / &a[(t, t)];
                if !q.is_zero() {
                    for i in 0..d {
                        let sub = &q * &a[(i, t)];
                        a[(i, c)] -= &sub;
                        let sub = &q * &v[(i, t)];
                        v[(i, c)] -= &sub;
                    }
                }
                if !a[(t, c)].is_zero() {
                    continue 'reduce;
                }
            }
            // pivot must divide every remaining entry; if not, fold the
            // offending row into row t and restart the reduction
            for r in t + 1..d {
                for c in t + 1..d {
                    if !(&a[(r, c)] % &a[(t, t)]).is_zero() {
                        for j in 0..d {
                            let add = a[(r, j)].clone();
                            a[(t, j)] += &add;
                            let add = u[(r, j)].clone();
                            u[(t, j)] += &add;
                        }
                        continue 'reduce;
                    }
                }
            }
            break;
        }
    }

    // normalize diagonal signs
    for t in 0..d {
        if a[(t, t)].is_negative() {
            for j in 0..d {
                let neg = -a[(t, j)].clone();
                a[(t, j)] = neg;
                let neg = -u[(t, j)].clone();
                u[(t, j)] = neg;
            }
        }
    }

    debug_assert!(u.mul(m).mul(&v) == a);
    Ok(SnfData { d: a, u, v })
}

/// Column Hermite normal form of a nonsingular matrix: lower triangular with
/// positive diagonal, and in every row the entries left of the diagonal are
/// reduced into `[0, diagonal)`. Spans the same column lattice as the input.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    h: IntMatrix,
}

impl ColumnHnf {
    pub fn matrix(&self) -> &IntMatrix {
        &self.h
    }

    /// Diagonal of the fundamental box.
    pub fn box_sizes(&self) -> Vec<BigInt> {
        self.h.diagonal_entries()
    }

    /// Unique representative of `v + L` inside the fundamental box
    /// `prod [0, h_ii)`, where `L` is the column lattice.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let d = self.h.dim();
        assert_eq!(v.len(), d, "vector dimension mismatch");
        let mut w = v.to_vec();
        for t in 0..d {
            let q = w[t].div_floor(&self.h[(t, t)]);
            if q.is_zero() {
                continue;
            }
            for i in t..d {
                let sub = &q * &self.h[(i, t)];
                w[i] -= sub;
            }
        }
        w
    }
}

pub fn column_hnf(m: &IntMatrix) -> Result<ColumnHnf, LatticeError> {
    let d = m.dim();
    let mut h = m.clone();
    let swap_cols = |h: &mut IntMatrix, c1: usize, c2: usize| {
        for i in 0..d {
            let t = h[(i, c1)].clone();
            h[(i, c1)] = h[(i, c2)].clone();
            h[(i, c2)] = t;
        }
    };
    for t in 0..d {
        loop {
            let mut best: Option<usize> = None;
            for j in t..d {
                if h[(t, j)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(j),
                    Some(b) => {
                        if h[(t, j)].abs() < h[(t, b)].abs() {
                            best = Some(j);
                        }
                    }
                }
            }
            let b = best.ok_or(LatticeError::SingularMatrix)?;
            swap_cols(&mut h, t, b);
            let mut done = true;
            for j in t + 1..d {
                if h[(t, j)].is_zero() {
                    continue;
                }
                let q = &h[(t, j)] / &h[(t, t)];
                for i in 0..d {
                    let sub = &q * &h[(i, t)];
                    h[(i, j)] -= sub;
                }
                if !h[(t, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(t, t)].is_negative() {
            for i in 0..d {
                let neg = -h[(i, t)].clone();
                h[(i, t)] = neg;
            }
        }
        // reduce the earlier columns in row t into [0, h_tt)
        for j in 0..t {
            let q = h[(t, j)].div_floor(&h[(t, t)]);
            if q.is_zero() {
                continue;
            }
            for i in 0..d {
                let sub = &q * &h[(i, t)];
                h[(i, j)] -= sub;
            }
        }
    }
    Ok(ColumnHnf { h })
}

/// Canonical residue of `v` modulo the column lattice of `m`.
pub fn hnf_reduce(m: &IntMatrix, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
    Ok(column_hnf(m)?.reduce(v))
}

/// Solves `m * x = v` over the integers, if a solution exists.
pub fn solve_integral(m: &IntMatrix, v: &[BigInt]) -> Result<Option<Vec<BigInt>>, LatticeError> {
    let s = snf(m)?;
    let d = m.dim();
    let uv = s.u.mul_vec(v);
    let mut y = Vec::with_capacity(d);
    for i in 0..d {
        let (q, r) = uv[i].div_rem(&s.d[(i, i)]);
        if !r.is_zero() {
            return Ok(None);
        }
        y.push(q);
    }
    Ok(Some(s.v.mul_vec(&y)))
}

/// Characteristic polynomial `det(xI - M)` as a monic integer polynomial,
/// computed by the Faddeev-LeVerrier recurrence (all divisions exact).
pub fn charpoly(m: &IntMatrix) -> IntPoly {
    let d = m.dim();
    let mut coeffs = vec![BigInt::zero(); d + 1];
    coeffs[d] = BigInt::one();
    let mut aux = IntMatrix::identity(d);
    for k in 1..=d {
        let prod = m.mul(&aux);
        let mut trace = BigInt::zero();
        for i in 0..d {
            trace += &prod[(i, i)];
        }
        let (c, r) = (-trace).div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "Faddeev-LeVerrier division must be exact");
        coeffs[d - k] = c.clone();
        if k < d {
            aux = prod;
            for i in 0..d {
                aux[(i, i)] += &c;
            }
        }
    }
    IntPoly::new(coeffs)
}
