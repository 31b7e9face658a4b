//! Biadditive maps `V × V → W` over GF(p).
//!
//! A map is stored as `m` slices `A_k`, each `n × n`; the `k`-th coordinate
//! of `α(u, v)` is `uᵀ A_k v`. Every formula in this crate is written in that
//! convention.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{enumerate_vectors, Budget, FieldParams, FpMatrix, FpVector};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BilinearMap {
    fp: FieldParams,
    n: usize,
    m: usize,
    slices: Vec<FpMatrix>,
}

/// Coordinates of an alternating map in the basis indexed by `(i < j, k)`,
/// lexicographic; the coordinate is `γ(e_i, e_j)_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AlternatingCoords {
    #[serde(skip)]
    pub fp: FieldParams,
    pub n: usize,
    pub m: usize,
    pub coords: Vec<u32>,
}

/// `m · n(n−1)/2`, the dimension of alt(V, W).
pub fn alt_dim(n: usize, m: usize) -> usize {
    m * n * n.saturating_sub(1) / 2
}

impl AlternatingCoords {
    pub fn new(fp: FieldParams, n: usize, m: usize, coords: Vec<u32>) -> Result<Self> {
        if coords.len() != alt_dim(n, m) {
            return Err(Error::dims(format!(
                "{} alternating coordinates, expected {}",
                coords.len(),
                alt_dim(n, m)
            )));
        }
        if coords.iter().any(|&x| x >= fp.p()) {
            return Err(Error::InvalidArgument(
                "coordinate not reduced mod p".into(),
            ));
        }
        Ok(AlternatingCoords { fp, n, m, coords })
    }

    pub fn as_vector(&self) -> FpVector {
        FpVector::from_reduced(self.coords.clone(), self.fp)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    /// Rebuilds the alternating map.
    pub fn to_map(&self) -> BilinearMap {
        let fp = self.fp;
        let mut slices = vec![FpMatrix::zeros(self.n, self.n); self.m];
        let mut idx = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                for slice in slices.iter_mut() {
                    let x = self.coords[idx];
                    slice.set(i, j, x);
                    slice.set(j, i, fp.neg(x));
                    idx += 1;
                }
            }
        }
        BilinearMap {
            fp,
            n: self.n,
            m: self.m,
            slices,
        }
    }
}

impl BilinearMap {
    pub fn new(fp: FieldParams, n: usize, m: usize, slices: Vec<FpMatrix>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument("n and m must be positive".into()));
        }
        if slices.len() != m {
            return Err(Error::dims(format!(
                "{} slices, expected {m}",
                slices.len()
            )));
        }
        for (k, s) in slices.iter().enumerate() {
            if s.rows() != n || s.cols() != n {
                return Err(Error::dims(format!(
                    "slice {k} is {}x{}, expected {n}x{n}",
                    s.rows(),
                    s.cols()
                )));
            }
            if s.data().iter().any(|&x| x >= fp.p()) {
                return Err(Error::InvalidArgument(format!(
                    "slice {k} not reduced mod p"
                )));
            }
        }
        Ok(BilinearMap { fp, n, m, slices })
    }

    pub fn zero(fp: FieldParams, n: usize, m: usize) -> Self {
        BilinearMap {
            fp,
            n,
            m,
            slices: vec![FpMatrix::zeros(n, n); m],
        }
    }

    /// Convenience constructor from nested integer slices.
    pub fn from_slices(fp: FieldParams, slices: &[Vec<Vec<i64>>]) -> Result<Self> {
        let m = slices.len();
        let n = slices.first().map_or(0, |s| s.len());
        let mats = slices
            .iter()
            .map(|s| FpMatrix::from_rows(s.iter().map(|r| r.iter().copied()), fp))
            .collect::<Result<Vec<_>>>()?;
        BilinearMap::new(fp, n, m, mats)
    }

    #[inline]
    pub fn fp(&self) -> FieldParams {
        self.fp
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn slices(&self) -> &[FpMatrix] {
        &self.slices
    }

    pub fn slice(&self, k: usize) -> &FpMatrix {
        &self.slices[k]
    }

    pub fn same_shape(&self, other: &BilinearMap) -> bool {
        self.fp == other.fp && self.n == other.n && self.m == other.m
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(FpMatrix::is_zero)
    }

    /// `α(u, v)`, checking lengths.
    pub fn evaluate(&self, u: &FpVector, v: &FpVector) -> Result<FpVector> {
        if u.len() != self.n || v.len() != self.n {
            return Err(Error::dims(format!(
                "arguments of length {} and {}, expected {}",
                u.len(),
                v.len(),
                self.n
            )));
        }
        Ok(self.eval(u, v))
    }

    /// `α(u, v)` without the length check.
    pub fn eval(&self, u: &FpVector, v: &FpVector) -> FpVector {
        let p = self.fp.p() as u64;
        let (u, v) = (u.coords(), v.coords());
        let out = self
            .slices
            .iter()
            .map(|a| {
                let mut acc = 0u64;
                for (i, &ui) in u.iter().enumerate() {
                    if ui == 0 {
                        continue;
                    }
                    let row = a.row(i);
                    let mut inner = 0u64;
                    for (&aij, &vj) in row.iter().zip(v) {
                        inner += aij as u64 * vj as u64;
                    }
                    acc = (acc + ui as u64 * (inner % p)) % p;
                }
                acc as u32
            })
            .collect();
        FpVector::from_reduced(out, self.fp)
    }

    /// `α(e_i, e_j)`.
    pub fn eval_basis(&self, i: usize, j: usize) -> FpVector {
        FpVector::from_reduced(self.slices.iter().map(|a| a.get(i, j)).collect(), self.fp)
    }

    /// The `m × n` matrices `v ↦ (vᵀA_k)_k` and `v ↦ ((A_k v)ᵀ)_k`.
    fn side_matrices(&self, v: &FpVector) -> (FpMatrix, FpMatrix) {
        let fp = self.fp;
        let mut left = FpMatrix::zeros(self.m, self.n);
        let mut right = FpMatrix::zeros(self.m, self.n);
        for (k, a) in self.slices.iter().enumerate() {
            let row = a.transpose().mul_vec(v, fp);
            let col = a.mul_vec(v, fp);
            for j in 0..self.n {
                left.set(k, j, row.coords()[j]);
                right.set(k, j, col.coords()[j]);
            }
        }
        (left, right)
    }

    /// Whether `α(v, V) = α(V, v) = W` for every nonzero `v`.
    pub fn is_nonsingular(&self, budget: Budget) -> Result<bool> {
        if self.m > self.n {
            return Ok(false);
        }
        for v in enumerate_vectors(self.n, self.fp, budget)?.skip(1) {
            let (left, right) = self.side_matrices(&v);
            if left.rank(self.fp) < self.m || right.rank(self.fp) < self.m {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `β̄(u, v) = β(u, v) − β(v, u)`.
    pub fn bar(&self) -> BilinearMap {
        let fp = self.fp;
        BilinearMap {
            fp,
            n: self.n,
            m: self.m,
            slices: self
                .slices
                .iter()
                .map(|a| a.sub(&a.transpose(), fp))
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.slices.iter().all(|a| *a == a.transpose())
    }

    /// `γ(v, v) = 0` for all `v`: zero diagonal and `A = −Aᵀ`.
    pub fn is_alternating(&self) -> bool {
        let fp = self.fp;
        self.slices.iter().all(|a| {
            (0..self.n).all(|i| a.get(i, i) == 0)
                && (0..self.n).all(|i| (0..self.n).all(|j| a.get(i, j) == fp.neg(a.get(j, i))))
        })
    }

    /// Every slice transposed: `α^op(u, v) = α(v, u)`.
    pub fn opposite(&self) -> BilinearMap {
        BilinearMap {
            fp: self.fp,
            n: self.n,
            m: self.m,
            slices: self.slices.iter().map(FpMatrix::transpose).collect(),
        }
    }

    pub fn add(&self, other: &BilinearMap) -> BilinearMap {
        assert!(self.same_shape(other));
        BilinearMap {
            fp: self.fp,
            n: self.n,
            m: self.m,
            slices: self
                .slices
                .iter()
                .zip(&other.slices)
                .map(|(a, b)| a.add(b, self.fp))
                .collect(),
        }
    }

    pub fn sub(&self, other: &BilinearMap) -> BilinearMap {
        assert!(self.same_shape(other));
        BilinearMap {
            fp: self.fp,
            n: self.n,
            m: self.m,
            slices: self
                .slices
                .iter()
                .zip(&other.slices)
                .map(|(a, b)| a.sub(b, self.fp))
                .collect(),
        }
    }

    pub fn scale(&self, k: u32) -> BilinearMap {
        BilinearMap {
            fp: self.fp,
            n: self.n,
            m: self.m,
            slices: self.slices.iter().map(|a| a.scale(k, self.fp)).collect(),
        }
    }

    pub fn neg(&self) -> BilinearMap {
        self.scale(self.fp.neg(1))
    }

    /// The map `(v₁, v₂) ↦ c · α(a v₁, b v₂)`; slice `l` is `Σ_k c_lk aᵀ A_k b`.
    pub fn compose(&self, a: &FpMatrix, b: &FpMatrix, c: &FpMatrix) -> Result<BilinearMap> {
        let (n, m, fp) = (self.n, self.m, self.fp);
        if a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n {
            return Err(Error::dims("a and b must be n x n"));
        }
        if c.rows() != m || c.cols() != m {
            return Err(Error::dims("c must be m x m"));
        }
        let at = a.transpose();
        let inner: Vec<FpMatrix> = self
            .slices
            .iter()
            .map(|s| at.mul(s, fp).mul(b, fp))
            .collect();
        let slices = (0..m)
            .map(|l| {
                inner
                    .iter()
                    .enumerate()
                    .fold(FpMatrix::zeros(n, n), |acc, (k, s)| {
                        acc.add(&s.scale(c.get(l, k), fp), fp)
                    })
            })
            .collect();
        Ok(BilinearMap { fp, n, m, slices })
    }

    /// Coordinates in alt(V, W); rejects non-alternating maps.
    pub fn alt_coords(&self) -> Result<AlternatingCoords> {
        if !self.is_alternating() {
            return Err(Error::NotAlternating);
        }
        let mut coords = Vec::with_capacity(alt_dim(self.n, self.m));
        for i in 0..self.n {
            for j in i + 1..self.n {
                for a in &self.slices {
                    coords.push(a.get(i, j));
                }
            }
        }
        Ok(AlternatingCoords {
            fp: self.fp,
            n: self.n,
            m: self.m,
            coords,
        })
    }

    /// A map `β` with `β̄ = γ` for alternating `γ`: the strict upper triangle.
    pub fn upper_lift(gamma: &BilinearMap) -> Result<BilinearMap> {
        if !gamma.is_alternating() {
            return Err(Error::NotAlternating);
        }
        let n = gamma.n;
        let slices = gamma
            .slices
            .iter()
            .map(|a| {
                let mut u = FpMatrix::zeros(n, n);
                for i in 0..n {
                    for j in i + 1..n {
                        u.set(i, j, a.get(i, j));
                    }
                }
                u
            })
            .collect();
        Ok(BilinearMap {
            fp: gamma.fp,
            n,
            m: gamma.m,
            slices,
        })
    }

    /// Multiplication of GF(p^n) followed by projection onto the first `m`
    /// power-basis coordinates (the quotient by the span of the last `n − m`).
    pub fn field_quotient_map(fp: FieldParams, n: usize, m: usize) -> Result<BilinearMap> {
        if n == 0 || m == 0 || m > n {
            return Err(Error::InvalidArgument(format!(
                "field quotient needs 1 <= m <= n, got n={n}, m={m}"
            )));
        }
        let modulus = smallest_irreducible(fp, n);
        // powers[d] = x^d mod f, for d < 2n - 1
        let mut powers: Vec<Vec<u32>> = Vec::with_capacity(2 * n - 1);
        let mut cur = vec![0u32; n];
        cur[0] = 1;
        for _ in 0..2 * n - 1 {
            powers.push(cur.clone());
            cur = times_x(&cur, &modulus, fp);
        }
        let slices = (0..m)
            .map(|k| {
                let mut s = FpMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        s.set(i, j, powers[i + j][k]);
                    }
                }
                s
            })
            .collect();
        Ok(BilinearMap { fp, n, m, slices })
    }

    /// Entries uniform over GF(p), deterministic in `seed`.
    pub fn random_biadditive(fp: FieldParams, n: usize, m: usize, seed: u64) -> BilinearMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(fp, n, m, &mut rng)
    }

    pub fn random_with<R: Rng>(fp: FieldParams, n: usize, m: usize, rng: &mut R) -> BilinearMap {
        let slices = (0..m)
            .map(|_| {
                let data = (0..n * n).map(|_| rng.gen_range(0..fp.p())).collect();
                FpMatrix::from_data(n, n, data).expect("sized")
            })
            .collect();
        BilinearMap { fp, n, m, slices }
    }

    /// Random alternating map, deterministic in `seed`.
    pub fn random_alternating(fp: FieldParams, n: usize, m: usize, seed: u64) -> BilinearMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..alt_dim(n, m))
            .map(|_| rng.gen_range(0..fp.p()))
            .collect();
        AlternatingCoords { fp, n, m, coords }.to_map()
    }

    /// Draws seeded random maps until one is nonsingular.
    pub fn random_nonsingular(
        fp: FieldParams,
        n: usize,
        m: usize,
        seed: u64,
        max_tries: usize,
    ) -> Result<Option<BilinearMap>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..max_tries {
            let cand = Self::random_with(fp, n, m, &mut rng);
            if cand.is_nonsingular(Budget::default())? {
                return Ok(Some(cand));
            }
        }
        Ok(None)
    }

    /// Embeds the map into larger `V` and `W` by zero padding.
    pub fn padded(&self, n: usize, m: usize) -> BilinearMap {
        assert!(n >= self.n && m >= self.m);
        let mut slices: Vec<FpMatrix> = self.slices.iter().map(|a| a.padded(n, n)).collect();
        slices.resize(m, FpMatrix::zeros(n, n));
        BilinearMap {
            fp: self.fp,
            n,
            m,
            slices,
        }
    }
}

/// Multiply a residue `c₀ + … + c_{n−1}x^{n−1}` by `x` modulo the monic
/// polynomial `x^n + Σ f_i x^i`.
fn times_x(poly: &[u32], modulus: &[u32], fp: FieldParams) -> Vec<u32> {
    let n = poly.len();
    let top = poly[n - 1];
    let mut out = vec![0u32; n];
    for i in (1..n).rev() {
        out[i] = poly[i - 1];
    }
    if top != 0 {
        for i in 0..n {
            out[i] = fp.sub(out[i], fp.mul(top, modulus[i]));
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `b` (coefficients low degree
/// first, `b` including its leading 1).
fn poly_rem(a: &[u32], b: &[u32], fp: FieldParams) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = fp.sub(r[shift + i], fp.mul(lead, bi));
            }
        }
        r.pop();
    }
    r
}

fn monic_from_index(mut idx: u128, degree: usize, fp: FieldParams) -> Vec<u32> {
    // coefficient tuple (c₀, …, c_{d−1}) with c₀ most significant
    let mut coeffs = vec![0u32; degree];
    for slot in coeffs.iter_mut().rev() {
        *slot = (idx % fp.p() as u128) as u32;
        idx /= fp.p() as u128;
    }
    coeffs.push(1);
    coeffs
}

/// Trial division by every monic polynomial of degree `1..=d/2`.
pub fn is_irreducible(monic: &[u32], fp: FieldParams) -> bool {
    let d = monic.len() - 1;
    for fd in 1..=d / 2 {
        let count = crate::linalg::checked_pow(fp.p() as u64, fd).expect("small degree");
        for idx in 0..count {
            let factor = monic_from_index(idx, fd, fp);
            if poly_rem(monic, &factor, fp).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `n`,
/// comparing coefficient tuples `(c₀, …, c_{n−1})`. Returns the non-leading
/// coefficients.
pub fn smallest_irreducible(fp: FieldParams, n: usize) -> Vec<u32> {
    let count = crate::linalg::checked_pow(fp.p() as u64, n).expect("degree too large");
    for idx in 0..count {
        let poly = monic_from_index(idx, n, fp);
        if is_irreducible(&poly, fp) {
            let mut low = poly;
            low.pop();
            return low;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}
