//! Abelian complements of the canonical subgroup `A = {(a, 0, c)}`.
//!
//! Every complement of `A` modulo the center is `B_f = {(f(v), v, c)}` for a
//! unique additive `f: V → V`, and commutation inside `B_f` is given by
//! `φ_α(f) + β̄` where `φ_α(f)(v₁, v₂) = α(f(v₁), v₂) − α(f(v₂), v₁)`.
//! So `B_f` is abelian exactly when `φ_α(f) = −β̄`, and the abelian
//! complements are counted by the kernel of `φ_α` whenever `−β̄` lies in its
//! image.
//!
//! Fixed bases: the domain of `φ_α` uses the elementary matrices `E_rs` in
//! row-major order; the codomain uses [`AlternatingCoords`] order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::{alt_dim, AlternatingCoords, BilinearMap};
use crate::error::{Error, Result};
use crate::linalg::{
    checked_pow, enumerate_vectors, vector_from_index, Budget, Echelon, FieldParams, FpMatrix,
    FpVector,
};

pub const DOMAIN_BASIS: &str = "E_rs row-major";
pub const CODOMAIN_BASIS: &str = "(i<j, k) lexicographic";

/// Default cap for enumerating cosets of the image of `φ_α`.
pub const COSET_BUDGET: Budget = Budget(1 << 16);

/// Default cap for enumerating `ker φ_α` in the symmetric-isotope search.
pub const KERNEL_BUDGET: u128 = 1 << 20;

/// An additive map `f: V → V`, acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AdditiveMap(pub FpMatrix);

impl AdditiveMap {
    pub fn new(matrix: FpMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        Ok(AdditiveMap(matrix))
    }

    pub fn zero(n: usize) -> Self {
        AdditiveMap(FpMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        AdditiveMap(FpMatrix::identity(n))
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn apply(&self, v: &FpVector, fp: FieldParams) -> FpVector {
        self.0.mul_vec(v, fp)
    }

    /// Row-major coordinates, matching the `E_rs` basis.
    pub fn coords(&self, fp: FieldParams) -> FpVector {
        FpVector::from_reduced(self.0.data().to_vec(), fp)
    }

    pub fn from_coords(n: usize, coords: &FpVector) -> Self {
        AdditiveMap(FpMatrix::from_data(n, n, coords.coords().to_vec()).expect("n*n coordinates"))
    }
}

fn check_dims(alpha: &BilinearMap, f: &AdditiveMap) -> Result<()> {
    if f.dim() != alpha.n() {
        return Err(Error::dims(format!(
            "additive map is {0}x{0}, alpha has n = {1}",
            f.dim(),
            alpha.n()
        )));
    }
    Ok(())
}

/// `α_f(v₁, v₂) = α(f(v₁), v₂)`; slices `fᵀ A_k`.
pub fn alpha_f(alpha: &BilinearMap, f: &AdditiveMap) -> Result<BilinearMap> {
    check_dims(alpha, f)?;
    let n = alpha.n();
    alpha.compose(
        f.matrix(),
        &FpMatrix::identity(n),
        &FpMatrix::identity(alpha.m()),
    )
}

/// `φ_α(f)`, an alternating map with slices `fᵀA_k − (fᵀA_k)ᵀ`.
pub fn phi_alpha_apply(alpha: &BilinearMap, f: &AdditiveMap) -> Result<BilinearMap> {
    Ok(alpha_f(alpha, f)?.bar())
}

/// Matrix of `φ_α` with its rank data.
#[derive(Debug, Clone, Serialize)]
pub struct PhiMatrix {
    pub matrix: FpMatrix,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub alt_dim: usize,
    #[serde(skip)]
    fp: FieldParams,
    #[serde(skip)]
    n: usize,
    #[serde(skip)]
    m: usize,
    /// RREF of the image, as row vectors in alternating coordinates.
    #[serde(skip)]
    image: Echelon,
}

pub fn phi_alpha_matrix(alpha: &BilinearMap) -> PhiMatrix {
    let (n, m, fp) = (alpha.n(), alpha.m(), alpha.fp());
    let columns: Vec<FpVector> = (0..n)
        .flat_map(|r| (0..n).map(move |s| (r, s)))
        .map(|(r, s)| {
            let e = AdditiveMap(FpMatrix::elementary(n, r, s));
            phi_alpha_apply(alpha, &e)
                .expect("shapes agree")
                .alt_coords()
                .expect("phi is alternating")
                .as_vector()
        })
        .collect();
    let d = alt_dim(n, m);
    let matrix = FpMatrix::from_columns(d, &columns);
    let image = matrix.transpose().echelon(fp);
    let image_dim = image.pivots.len();
    PhiMatrix {
        matrix,
        kernel_dim: n * n - image_dim,
        image_dim,
        alt_dim: d,
        fp,
        n,
        m,
        image,
    }
}

impl PhiMatrix {
    /// Applies the matrix to the row-major coordinates of `f`.
    pub fn apply(&self, f: &AdditiveMap) -> AlternatingCoords {
        let v = self.matrix.mul_vec(&f.coords(self.fp), self.fp);
        AlternatingCoords {
            fp: self.fp,
            n: self.n,
            m: self.m,
            coords: v.into_coords(),
        }
    }

    /// Number of cosets of the image in alt(V, W), `p^{alt_dim − image_dim}`.
    pub fn coset_count(&self) -> Option<u128> {
        checked_pow(self.fp.p() as u64, self.alt_dim - self.image_dim)
    }

    /// Kernel basis as additive maps.
    pub fn kernel_basis(&self) -> Vec<AdditiveMap> {
        self.matrix
            .kernel_basis(self.fp)
            .iter()
            .map(|v| AdditiveMap::from_coords(self.n, v))
            .collect()
    }

    /// Pivot-free coordinates of the image echelon form; the span of the
    /// corresponding unit vectors is a complement to the image.
    pub fn free_coordinates(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.alt_dim];
        for &c in &self.image.pivots {
            is_pivot[c] = true;
        }
        (0..self.alt_dim).filter(|&c| !is_pivot[c]).collect()
    }

    /// The canonical coset representative of `gamma`: clears every pivot
    /// coordinate against the image echelon rows.
    pub fn reduce(&self, gamma: &AlternatingCoords) -> AlternatingCoords {
        let fp = self.fp;
        let mut v = gamma.coords.clone();
        for (row, &pc) in self.image.pivots.iter().enumerate() {
            let x = v[pc];
            if x == 0 {
                continue;
            }
            for (c, slot) in v.iter_mut().enumerate() {
                *slot = fp.sub(*slot, fp.mul(x, self.image.rref.get(row, c)));
            }
        }
        AlternatingCoords {
            fp,
            n: self.n,
            m: self.m,
            coords: v,
        }
    }

    pub fn in_image(&self, gamma: &AlternatingCoords) -> bool {
        self.reduce(gamma).is_zero()
    }
}

/// Existence, count and witness of abelian complements of `A` in `G(α, β)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplementReport {
    pub has_abelian_complement: bool,
    pub witness_f: Option<AdditiveMap>,
    pub count: u128,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub alt_dim: usize,
    pub coset_count: u128,
    pub domain_basis: &'static str,
    pub codomain_basis: &'static str,
}

/// Solves `φ_α(f) = −β̄` for a witness and counts solutions.
pub fn abelian_complement_report(
    alpha: &BilinearMap,
    beta: &BilinearMap,
) -> Result<ComplementReport> {
    if !alpha.same_shape(beta) {
        return Err(Error::dims("alpha and beta must share p, n and m"));
    }
    let fp = alpha.fp();
    let phi = phi_alpha_matrix(alpha);
    let rhs = beta.bar().neg().alt_coords()?.as_vector();
    let solution = phi.matrix.solve(&rhs, fp)?;
    let witness_f = match solution {
        Some(x) => {
            let f = AdditiveMap::from_coords(alpha.n(), &x);
            debug_assert!(is_bf_abelian(alpha, beta, &f)?);
            Some(f)
        }
        None => None,
    };
    let overflow = || Error::BudgetExceeded {
        required: u128::MAX,
        budget: u128::MAX,
    };
    let count = match witness_f {
        Some(_) => checked_pow(fp.p() as u64, phi.kernel_dim).ok_or_else(overflow)?,
        None => 0,
    };
    Ok(ComplementReport {
        has_abelian_complement: witness_f.is_some(),
        witness_f,
        count,
        kernel_dim: phi.kernel_dim,
        image_dim: phi.image_dim,
        alt_dim: phi.alt_dim,
        coset_count: phi.coset_count().ok_or_else(overflow)?,
        domain_basis: DOMAIN_BASIS,
        codomain_basis: CODOMAIN_BASIS,
    })
}

/// Whether `B_f` is abelian: `α(f(e_i), e_j) − α(f(e_j), e_i) + β̄(e_i, e_j) = 0`
/// on every basis pair.
pub fn is_bf_abelian(alpha: &BilinearMap, beta: &BilinearMap, f: &AdditiveMap) -> Result<bool> {
    check_dims(alpha, f)?;
    let (n, fp) = (alpha.n(), alpha.fp());
    let images: Vec<FpVector> = (0..n).map(|i| f.matrix().column(i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (ei, ej) = (FpVector::unit(n, i), FpVector::unit(n, j));
            let lhs = alpha
                .eval(&images[i], &ej)
                .sub(&alpha.eval(&images[j], &ei), fp)
                .add(&beta.eval(&ei, &ej), fp)
                .sub(&beta.eval(&ej, &ei), fp);
            if !lhs.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The same condition checked on every pair of vectors.
pub fn is_bf_abelian_exhaustive(
    alpha: &BilinearMap,
    beta: &BilinearMap,
    f: &AdditiveMap,
    budget: Budget,
) -> Result<bool> {
    check_dims(alpha, f)?;
    let (n, fp) = (alpha.n(), alpha.fp());
    budget.require_pow(fp.p() as u64, 2 * n)?;
    for v1 in enumerate_vectors(n, fp, budget)? {
        let fv1 = f.apply(&v1, fp);
        for v2 in enumerate_vectors(n, fp, budget)? {
            let fv2 = f.apply(&v2, fp);
            let lhs = alpha
                .eval(&fv1, &v2)
                .sub(&alpha.eval(&fv2, &v1), fp)
                .add(&beta.eval(&v1, &v2), fp)
                .sub(&beta.eval(&v2, &v1), fp);
            if !lhs.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Counts abelian `B_f` by visiting all `p^{n²}` additive maps.
pub fn count_abelian_complements_exhaustive(
    alpha: &BilinearMap,
    beta: &BilinearMap,
    budget: Budget,
) -> Result<u128> {
    let (n, fp) = (alpha.n(), alpha.fp());
    let total = budget.require_pow(fp.p() as u64, n * n)?;
    let count = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let f = AdditiveMap::from_coords(n, &vector_from_index(idx, n * n, fp));
            is_bf_abelian(alpha, beta, &f).expect("shapes agree")
        })
        .count();
    Ok(count as u128)
}

/// One representative per coset of `φ_α(add(V))` in alt(V, W).
#[derive(Debug, Clone, Serialize)]
pub struct CosetReport {
    pub coset_count: u128,
    pub image_dim: usize,
    pub alt_dim: usize,
    pub representatives: Vec<AlternatingCoords>,
}

/// Enumerates the complement spanned by the pivot-free coordinates, in
/// lexicographic order; the zero coset comes first.
pub fn coset_representatives(alpha: &BilinearMap, budget: Budget) -> Result<CosetReport> {
    let phi = phi_alpha_matrix(alpha);
    let count = budget.require_pow(alpha.fp().p() as u64, phi.free_coordinates().len())?;
    Ok(representatives_of(alpha, &phi, count))
}

/// Like [`coset_representatives`] but keeps only the first `limit`
/// representatives, so the count is reported however large it is.
pub fn first_coset_representatives(alpha: &BilinearMap, limit: usize) -> Result<CosetReport> {
    let phi = phi_alpha_matrix(alpha);
    let total = phi.coset_count().ok_or(Error::BudgetExceeded {
        required: u128::MAX,
        budget: u128::MAX,
    })?;
    let mut report = representatives_of(alpha, &phi, total.min(limit as u128));
    report.coset_count = total;
    Ok(report)
}

fn representatives_of(alpha: &BilinearMap, phi: &PhiMatrix, count: u128) -> CosetReport {
    let fp = alpha.fp();
    let free = phi.free_coordinates();
    let representatives = (0..count)
        .map(|idx| {
            let digits = vector_from_index(idx, free.len(), fp);
            let mut coords = vec![0u32; phi.alt_dim];
            for (&c, &x) in free.iter().zip(digits.coords()) {
                coords[c] = x;
            }
            AlternatingCoords {
                fp,
                n: alpha.n(),
                m: alpha.m(),
                coords,
            }
        })
        .collect();
    CosetReport {
        coset_count: count,
        image_dim: phi.image_dim,
        alt_dim: phi.alt_dim,
        representatives,
    }
}

/// A `β` whose `β̄` lies outside the image of `φ_α`, so `G(α, β)` has no
/// abelian complement to `A`. `None` when the image is everything.
pub fn escaping_beta(alpha: &BilinearMap) -> Option<BilinearMap> {
    let phi = phi_alpha_matrix(alpha);
    let &first = phi.free_coordinates().first()?;
    let mut coords = vec![0u32; phi.alt_dim];
    coords[first] = 1;
    let gamma = AlternatingCoords {
        fp: alpha.fp(),
        n: alpha.n(),
        m: alpha.m(),
        coords,
    }
    .to_map();
    Some(BilinearMap::upper_lift(&gamma).expect("alternating"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SymmetricIsotope {
    /// An invertible `f ∈ ker φ_α`; `α_f` is symmetric and isotopic to `α`.
    Found {
        f: AdditiveMap,
        symmetric: BilinearMapRows,
    },
    /// The whole kernel was enumerated without an invertible element.
    None,
    /// The kernel was only sampled.
    Inconclusive { sampled: u128 },
}

/// Slices of a map as nested rows, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BilinearMapRows(pub Vec<Vec<Vec<u32>>>);

impl From<&BilinearMap> for BilinearMapRows {
    fn from(map: &BilinearMap) -> Self {
        BilinearMapRows(
            map.slices()
                .iter()
                .map(|s| (0..s.rows()).map(|r| s.row(r).to_vec()).collect())
                .collect(),
        )
    }
}

/// Looks for an invertible `f` with `φ_α(f) = 0`. The identity is tried
/// first; then the kernel is enumerated when `p^{kernel_dim} ≤ budget` and
/// sampled `budget` times with a seeded generator otherwise.
pub fn symmetric_isotope_search(
    alpha: &BilinearMap,
    budget: u128,
    seed: u64,
) -> Result<SymmetricIsotope> {
    let (n, fp) = (alpha.n(), alpha.fp());
    let phi = phi_alpha_matrix(alpha);
    let found = |f: AdditiveMap| -> Result<SymmetricIsotope> {
        let sym = alpha_f(alpha, &f)?;
        Ok(SymmetricIsotope::Found {
            symmetric: BilinearMapRows::from(&sym),
            f,
        })
    };
    let id = AdditiveMap::identity(n);
    if phi.apply(&id).is_zero() {
        return found(id);
    }
    let basis = phi.kernel_basis();
    let combine = |coeffs: &[u32]| -> AdditiveMap {
        let m = basis
            .iter()
            .zip(coeffs)
            .fold(FpMatrix::zeros(n, n), |acc, (b, &c)| {
                acc.add(&b.matrix().scale(c, fp), fp)
            });
        AdditiveMap(m)
    };
    let invertible = |f: &AdditiveMap| f.matrix().rank(fp) == n;
    match checked_pow(fp.p() as u64, basis.len()) {
        Some(total) if total <= budget => {
            for idx in 1..total {
                let f = combine(vector_from_index(idx, basis.len(), fp).coords());
                if invertible(&f) {
                    return found(f);
                }
            }
            Ok(SymmetricIsotope::None)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..budget {
                let coeffs: Vec<u32> = (0..basis.len()).map(|_| rng.gen_range(0..fp.p())).collect();
                let f = combine(&coeffs);
                if invertible(&f) {
                    return found(f);
                }
            }
            Ok(SymmetricIsotope::Inconclusive { sampled: budget })
        }
    }
}

/// Size of `{v : α(α(u,v),w) = α(u,α(v,w)) for all u, w}`; needs `n = m`.
pub fn middle_nucleus(alpha: &BilinearMap, budget: Budget) -> Result<u128> {
    let (n, fp) = (alpha.n(), alpha.fp());
    if alpha.m() != n {
        return Err(Error::InvalidArgument(format!(
            "middle nucleus needs n = m, got n={n}, m={}",
            alpha.m()
        )));
    }
    let mut count = 0u128;
    for v in enumerate_vectors(n, fp, budget)? {
        let ok = (0..n).all(|i| {
            (0..n).all(|j| {
                let (u, w) = (FpVector::unit(n, i), FpVector::unit(n, j));
                alpha.eval(&alpha.eval(&u, &v), &w) == alpha.eval(&u, &alpha.eval(&v, &w))
            })
        });
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

/// Seeded search for a nonsingular `α` whose `φ_α` misses part of alt(V, W).
/// Tries `random_biadditive` at seeds `seed, seed + 1, …` and returns the
/// first hit with its seed.
pub fn search_deficient_alpha(
    fp: FieldParams,
    n: usize,
    m: usize,
    seed: u64,
    tries: u64,
) -> Result<Option<(u64, BilinearMap)>> {
    for s in seed..seed.saturating_add(tries) {
        let cand = BilinearMap::random_biadditive(fp, n, m, s);
        if !cand.is_nonsingular(Budget::default())? {
            continue;
        }
        let phi = phi_alpha_matrix(&cand);
        if phi.image_dim < phi.alt_dim {
            return Ok(Some((s, cand)));
        }
    }
    Ok(None)
}
