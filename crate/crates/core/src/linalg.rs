//! Exact linear algebra over a prime field GF(p).
//!
//! Everything here is deterministic: elimination always picks the first
//! nonzero entry (in column order) as pivot, so kernel bases and echelon
//! forms are reproducible across runs and platforms.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on the number of items any exhaustive enumeration may visit.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// `base^exp` as a `u128`, or `None` on overflow.
pub fn checked_pow(base: u64, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// An upper bound on the size of an exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// Refuses when `p^exp` items would exceed the budget.
    pub fn require_pow(self, p: u64, exp: usize) -> Result<u128> {
        match checked_pow(p, exp) {
            Some(count) if count <= self.0 => Ok(count),
            Some(count) => Err(Error::BudgetExceeded {
                required: count,
                budget: self.0,
            }),
            None => Err(Error::BudgetExceeded {
                required: u128::MAX,
                budget: self.0,
            }),
        }
    }

    pub fn require(self, count: u128) -> Result<u128> {
        if count <= self.0 {
            Ok(count)
        } else {
            Err(Error::BudgetExceeded {
                required: count,
                budget: self.0,
            })
        }
    }
}

/// The prime field GF(p). Construction checks primality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FieldParams {
    p: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldParams {
    pub fn new(p: u64) -> Result<Self> {
        if p > (1 << 31) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldParams { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce(t0))
    }

    /// Reduces an unsigned integer, e.g. a binomial coefficient.
    #[inline]
    pub fn from_u128(self, x: u128) -> u32 {
        (x % self.p as u128) as u32
    }
}

/// A coordinate vector over GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FpVector(Vec<u32>);

impl FpVector {
    pub fn new(coords: impl IntoIterator<Item = i64>, fp: FieldParams) -> Self {
        FpVector(coords.into_iter().map(|x| fp.reduce(x)).collect())
    }

    /// Wraps already-reduced coordinates.
    pub fn from_reduced(coords: Vec<u32>, fp: FieldParams) -> Self {
        debug_assert!(coords.iter().all(|&x| x < fp.p()));
        FpVector(coords)
    }

    pub fn zeros(len: usize) -> Self {
        FpVector(vec![0; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        FpVector(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.0
    }

    pub fn add(&self, other: &FpVector, fp: FieldParams) -> FpVector {
        debug_assert_eq!(self.len(), other.len());
        FpVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| fp.add(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &FpVector, fp: FieldParams) -> FpVector {
        debug_assert_eq!(self.len(), other.len());
        FpVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| fp.sub(a, b))
                .collect(),
        )
    }

    pub fn neg(&self, fp: FieldParams) -> FpVector {
        FpVector(self.0.iter().map(|&a| fp.neg(a)).collect())
    }

    pub fn scale(&self, k: u32, fp: FieldParams) -> FpVector {
        FpVector(self.0.iter().map(|&a| fp.mul(a, k)).collect())
    }

    pub fn dot(&self, other: &FpVector, fp: FieldParams) -> u32 {
        let p = fp.p() as u64;
        let s = self
            .0
            .iter()
            .zip(&other.0)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
        s as u32
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &FpVector) -> FpVector {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FpVector(v)
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Index of `v` in the lexicographic enumeration of GF(p)^n (first
/// coordinate most significant).
pub fn vector_index(v: &FpVector, fp: FieldParams) -> u128 {
    v.coords()
        .iter()
        .fold(0u128, |acc, &x| acc * fp.p() as u128 + x as u128)
}

/// Inverse of [`vector_index`].
pub fn vector_from_index(mut index: u128, len: usize, fp: FieldParams) -> FpVector {
    let p = fp.p() as u128;
    let mut coords = vec![0u32; len];
    for slot in coords.iter_mut().rev() {
        *slot = (index % p) as u32;
        index /= p;
    }
    FpVector(coords)
}

/// All vectors of GF(p)^n in lexicographic order.
#[derive(Debug, Clone)]
pub struct VectorEnumerator {
    fp: FieldParams,
    current: Option<Vec<u32>>,
}

impl Iterator for VectorEnumerator {
    type Item = FpVector;

    fn next(&mut self) -> Option<FpVector> {
        let out = self.current.clone()?;
        let p = self.fp.p();
        let mut next = out.clone();
        let mut carried = true;
        for slot in next.iter_mut().rev() {
            *slot += 1;
            if *slot == p {
                *slot = 0;
            } else {
                carried = false;
                break;
            }
        }
        self.current = if carried { None } else { Some(next) };
        Some(FpVector(out))
    }
}

/// Streams all `p^n` vectors, refusing when that exceeds `budget`.
pub fn enumerate_vectors(n: usize, fp: FieldParams, budget: Budget) -> Result<VectorEnumerator> {
    budget.require_pow(fp.p() as u64, n)?;
    Ok(VectorEnumerator {
        fp,
        current: Some(vec![0; n]),
    })
}

/// A dense row-major matrix over GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rref: FpMatrix,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FpMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FpMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// The elementary matrix with a single 1 at `(r, s)`.
    pub fn elementary(n: usize, r: usize, s: usize) -> Self {
        let mut m = FpMatrix::zeros(n, n);
        m.data[r * n + s] = 1;
        m
    }

    pub fn from_rows<R, I>(rows: R, fp: FieldParams) -> Result<Self>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = i64>,
    {
        let mut data = Vec::new();
        let mut nrows = 0;
        let mut ncols = None;
        for row in rows {
            let before = data.len();
            data.extend(row.into_iter().map(|x| fp.reduce(x)));
            let width = data.len() - before;
            match ncols {
                None => ncols = Some(width),
                Some(c) if c != width => {
                    return Err(Error::dims(format!(
                        "row {nrows} has {width} entries, expected {c}"
                    )))
                }
                _ => {}
            }
            nrows += 1;
        }
        Ok(FpMatrix {
            rows: nrows,
            cols: ncols.unwrap_or(0),
            data,
        })
    }

    /// Builds a matrix from reduced row-major entries.
    pub fn from_data(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(FpMatrix { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(len: usize, columns: &[FpVector]) -> Self {
        let mut m = FpMatrix::zeros(len, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for i in 0..len {
                m.set(i, j, col.coords()[i]);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: u32) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> FpVector {
        FpVector((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix, fp: FieldParams) -> FpMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let p = fp.p() as u64;
        let mut out = FpMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] =
                        ((out.data[idx] as u64 + a * other.get(k, j) as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &FpVector, fp: FieldParams) -> FpVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        let p = fp.p() as u64;
        FpVector(
            (0..self.rows)
                .map(|r| {
                    self.row(r)
                        .iter()
                        .zip(v.coords())
                        .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p)
                        as u32
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &FpMatrix, fp: FieldParams) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        FpMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| fp.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &FpMatrix, fp: FieldParams) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        FpMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| fp.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, k: u32, fp: FieldParams) -> FpMatrix {
        FpMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| fp.mul(a, k)).collect(),
        }
    }

    /// Embeds `self` in the top-left corner of a zero matrix of the given size.
    pub fn padded(&self, rows: usize, cols: usize) -> FpMatrix {
        assert!(rows >= self.rows && cols >= self.cols);
        let mut out = FpMatrix::zeros(rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
        }
        out
    }

    /// Reduced row echelon form with first-nonzero pivoting.
    pub fn echelon(&self, fp: FieldParams) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = fp.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                let x = m.get(row, c);
                m.set(row, c, fp.mul(x, inv));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let x = fp.sub(m.get(r, c), fp.mul(factor, m.get(row, c)));
                    m.set(r, c, x);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { rref: m, pivots }
    }

    pub fn rank(&self, fp: FieldParams) -> usize {
        self.echelon(fp).pivots.len()
    }

    /// Basis of `{x : Mx = 0}`, one vector per free column in increasing order.
    pub fn kernel_basis(&self, fp: FieldParams) -> Vec<FpVector> {
        let Echelon { rref, pivots } = self.echelon(fp);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![0u32; self.cols];
                x[free] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = fp.neg(rref.get(r, free));
                }
                FpVector(x)
            })
            .collect()
    }

    /// Some `x` with `Mx = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &FpVector, fp: FieldParams) -> Result<Option<FpVector>> {
        if b.len() != self.rows {
            return Err(Error::dims(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = FpMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b.coords()[r]);
        }
        let Echelon { rref, pivots } = aug.echelon(fp);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = rref.get(r, self.cols);
        }
        Ok(Some(FpVector(x)))
    }

    pub fn is_invertible(&self, fp: FieldParams) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rank(fp) == self.rows)
    }

    pub fn inverse(&self, fp: FieldParams) -> Result<FpMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = FpMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let Echelon { rref, pivots } = aug.echelon(fp);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = FpMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, rref.get(r, n + c));
            }
        }
        Ok(inv)
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Lexicographic enumeration of GL(n, p) over row-major entries.
///
/// Rows are chosen depth-first; a candidate row is skipped as soon as it
/// falls in the span of the rows above it, so singular matrices are never
/// materialized.
#[derive(Debug, Clone)]
pub struct GeneralLinear {
    n: usize,
    fp: FieldParams,
    row_count: u128,
    /// Row indices (in the lexicographic order of GF(p)^n) chosen so far.
    stack: Vec<u128>,
    done: bool,
}

impl GeneralLinear {
    pub fn new(n: usize, fp: FieldParams) -> Self {
        let row_count = checked_pow(fp.p() as u64, n).expect("row space too large");
        let mut g = GeneralLinear {
            n,
            fp,
            row_count,
            stack: Vec::with_capacity(n),
            done: n == 0,
        };
        if !g.done && !g.descend_from(0) {
            g.done = true;
        }
        g
    }

    /// |GL(n, p)|.
    pub fn order(n: usize, fp: FieldParams) -> Option<u128> {
        let pn = checked_pow(fp.p() as u64, n)?;
        let mut acc: u128 = 1;
        let mut pk: u128 = 1;
        for _ in 0..n {
            acc = acc.checked_mul(pn - pk)?;
            pk *= fp.p() as u128;
        }
        Some(acc)
    }

    fn independent(&self, candidate: u128) -> bool {
        let mut rows: Vec<FpVector> = self
            .stack
            .iter()
            .map(|&i| vector_from_index(i, self.n, self.fp))
            .collect();
        rows.push(vector_from_index(candidate, self.n, self.fp));
        let m = FpMatrix::from_columns(self.n, &rows);
        m.rank(self.fp) == rows.len()
    }

    /// Pushes the smallest independent row `>= start` at the current depth,
    /// then fills remaining depths greedily. Returns false when no completion
    /// exists below this point.
    fn descend_from(&mut self, start: u128) -> bool {
        let mut start = start;
        loop {
            let mut found = None;
            let mut cand = start;
            while cand < self.row_count {
                if self.independent(cand) {
                    found = Some(cand);
                    break;
                }
                cand += 1;
            }
            match found {
                Some(c) => {
                    self.stack.push(c);
                    if self.stack.len() == self.n {
                        return true;
                    }
                    start = 0;
                }
                None => {
                    // backtrack one level
                    match self.stack.pop() {
                        Some(prev) => start = prev + 1,
                        None => return false,
                    }
                }
            }
        }
    }

    fn current(&self) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.n, self.n);
        for (r, &idx) in self.stack.iter().enumerate() {
            let v = vector_from_index(idx, self.n, self.fp);
            for c in 0..self.n {
                m.set(r, c, v.coords()[c]);
            }
        }
        m
    }
}

impl Iterator for GeneralLinear {
    type Item = FpMatrix;

    fn next(&mut self) -> Option<FpMatrix> {
        if self.done {
            return None;
        }
        let out = self.current();
        let last = self.stack.pop().expect("full stack");
        if !self.descend_from(last + 1) {
            self.done = true;
        }
        Some(out)
    }
}

/// Uniform random invertible matrix by rejection sampling.
pub fn random_invertible<R: rand::Rng>(n: usize, fp: FieldParams, rng: &mut R) -> FpMatrix {
    loop {
        let data = (0..n * n).map(|_| rng.gen_range(0..fp.p())).collect();
        let m = FpMatrix::from_data(n, n, data).expect("sized");
        if m.rank(fp) == n {
            return m;
        }
    }
}
