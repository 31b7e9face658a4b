//! Isotopisms and anti-isotopisms between biadditive maps, the group
//! isomorphisms they induce, and extraction of `(α, β)` from a group.
//!
//! Conventions, with `(a, b, c)` a witness from `α₁` to `α₂`:
//! - isotopism: `α₂(a v₁, b v₂) = c α₁(v₁, v₂)`
//! - anti-isotopism: `α₂(b v₂, a v₁) = c α₁(v₁, v₂)`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::BilinearMap;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::linalg::{random_invertible, FieldParams, FpMatrix, FpVector, GeneralLinear};

/// Default cap on `(a, c)` pairs visited by [`search_isotopism`].
pub const SEARCH_BUDGET: u128 = 100_000_000;

/// Largest group for which [`verify_homomorphism`] checks all pairs.
pub const EXHAUSTIVE_ORDER_CAP: u128 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsotopyKind {
    Isotopism,
    AntiIsotopism,
}

impl IsotopyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IsotopyKind::Isotopism => "isotopism",
            IsotopyKind::AntiIsotopism => "anti-isotopism",
        }
    }
}

/// A witness triple of invertible matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isotopism {
    a: FpMatrix,
    b: FpMatrix,
    c: FpMatrix,
    kind: IsotopyKind,
}

impl Isotopism {
    pub fn new(
        a: FpMatrix,
        b: FpMatrix,
        c: FpMatrix,
        kind: IsotopyKind,
        fp: FieldParams,
    ) -> Result<Self> {
        if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
            return Err(Error::dims("a and b must be square of the same size"));
        }
        for m in [&a, &b, &c] {
            if !m.is_invertible(fp)? {
                return Err(Error::Singular);
            }
        }
        Ok(Isotopism { a, b, c, kind })
    }

    pub fn identity(n: usize, m: usize, kind: IsotopyKind) -> Self {
        Isotopism {
            a: FpMatrix::identity(n),
            b: FpMatrix::identity(n),
            c: FpMatrix::identity(m),
            kind,
        }
    }

    pub fn a(&self) -> &FpMatrix {
        &self.a
    }

    pub fn b(&self) -> &FpMatrix {
        &self.b
    }

    pub fn c(&self) -> &FpMatrix {
        &self.c
    }

    pub fn kind(&self) -> IsotopyKind {
        self.kind
    }

    /// Witness in the reverse direction.
    pub fn inverse(&self, fp: FieldParams) -> Isotopism {
        let inv = |m: &FpMatrix| m.inverse(fp).expect("witness matrices are invertible");
        match self.kind {
            IsotopyKind::Isotopism => Isotopism {
                a: inv(&self.a),
                b: inv(&self.b),
                c: inv(&self.c),
                kind: self.kind,
            },
            IsotopyKind::AntiIsotopism => Isotopism {
                a: inv(&self.b),
                b: inv(&self.a),
                c: inv(&self.c),
                kind: self.kind,
            },
        }
    }

    /// Composite witness: `self` from `α₁` to `α₂`, then `next` from `α₂` to
    /// `α₃`. Two anti-isotopisms compose to an isotopism.
    pub fn then(&self, next: &Isotopism, fp: FieldParams) -> Isotopism {
        let (a, b) = match self.kind {
            IsotopyKind::Isotopism => (next.a.mul(&self.a, fp), next.b.mul(&self.b, fp)),
            IsotopyKind::AntiIsotopism => (next.b.mul(&self.a, fp), next.a.mul(&self.b, fp)),
        };
        let kind = if self.kind == next.kind {
            IsotopyKind::Isotopism
        } else {
            IsotopyKind::AntiIsotopism
        };
        Isotopism {
            a,
            b,
            c: next.c.mul(&self.c, fp),
            kind,
        }
    }

    fn fits(&self, alpha: &BilinearMap) -> bool {
        self.a.rows() == alpha.n() && self.c.rows() == alpha.m()
    }
}

fn check_inputs(alpha1: &BilinearMap, alpha2: &BilinearMap, iso: &Isotopism) -> Result<()> {
    if !alpha1.same_shape(alpha2) || !iso.fits(alpha1) {
        return Err(Error::dims("maps and witness must share p, n and m"));
    }
    let fp = alpha1.fp();
    for m in [&iso.a, &iso.b, &iso.c] {
        if !m.is_invertible(fp)? {
            return Err(Error::Singular);
        }
    }
    Ok(())
}

/// `α₂(a e_i, b e_j) = c α₁(e_i, e_j)` for every basis pair.
pub fn check_isotopism(
    alpha1: &BilinearMap,
    alpha2: &BilinearMap,
    iso: &Isotopism,
) -> Result<bool> {
    if iso.kind != IsotopyKind::Isotopism {
        return Err(Error::InvalidArgument("witness is not an isotopism".into()));
    }
    check_inputs(alpha1, alpha2, iso)?;
    Ok(first_failure(alpha1, alpha2, iso).is_none())
}

/// `α₂(b e_j, a e_i) = c α₁(e_i, e_j)` for every basis pair.
pub fn check_anti_isotopism(
    alpha1: &BilinearMap,
    alpha2: &BilinearMap,
    iso: &Isotopism,
) -> Result<bool> {
    if iso.kind != IsotopyKind::AntiIsotopism {
        return Err(Error::InvalidArgument(
            "witness is not an anti-isotopism".into(),
        ));
    }
    check_inputs(alpha1, alpha2, iso)?;
    Ok(first_failure(alpha1, alpha2, iso).is_none())
}

/// Either check, by the witness kind.
pub fn check_witness(alpha1: &BilinearMap, alpha2: &BilinearMap, iso: &Isotopism) -> Result<bool> {
    match iso.kind {
        IsotopyKind::Isotopism => check_isotopism(alpha1, alpha2, iso),
        IsotopyKind::AntiIsotopism => check_anti_isotopism(alpha1, alpha2, iso),
    }
}

fn first_failure(
    alpha1: &BilinearMap,
    alpha2: &BilinearMap,
    iso: &Isotopism,
) -> Option<(usize, usize)> {
    let (n, fp) = (alpha1.n(), alpha1.fp());
    let a_cols: Vec<FpVector> = (0..n).map(|i| iso.a.column(i)).collect();
    let b_cols: Vec<FpVector> = (0..n).map(|i| iso.b.column(i)).collect();
    for i in 0..n {
        for j in 0..n {
            let rhs = iso.c.mul_vec(&alpha1.eval_basis(i, j), fp);
            let lhs = match iso.kind {
                IsotopyKind::Isotopism => alpha2.eval(&a_cols[i], &b_cols[j]),
                IsotopyKind::AntiIsotopism => alpha2.eval(&b_cols[j], &a_cols[i]),
            };
            if lhs != rhs {
                return Some((i, j));
            }
        }
    }
    None
}

/// The map `α₂` for which `iso` is a witness from `alpha1`.
pub fn transport(alpha1: &BilinearMap, iso: &Isotopism) -> Result<BilinearMap> {
    if !iso.fits(alpha1) {
        return Err(Error::dims("witness does not match the map"));
    }
    let fp = alpha1.fp();
    let a_inv = iso.a.inverse(fp)?;
    let b_inv = iso.b.inverse(fp)?;
    match iso.kind {
        // α₂(x, y) = c α₁(a⁻¹x, b⁻¹y)
        IsotopyKind::Isotopism => alpha1.compose(&a_inv, &b_inv, &iso.c),
        // α₂(x, y) = c α₁(a⁻¹y, b⁻¹x)
        IsotopyKind::AntiIsotopism => alpha1.opposite().compose(&b_inv, &a_inv, &iso.c),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found {
        witness: Isotopism,
        index: u128,
    },
    /// The whole of GL(n, p) × GL(m, p) was visited: no witness exists.
    Exhausted {
        visited: u128,
    },
    /// The budget ran out first.
    Inconclusive {
        visited: u128,
    },
}

/// Finds `b` column by column for fixed `c`, given the system built from
/// `a`; `None` when some column system is inconsistent.
fn forced_b(alpha1: &BilinearMap, rows: &FpMatrix, c: &FpMatrix) -> Option<FpMatrix> {
    let (n, m, fp) = (alpha1.n(), alpha1.m(), alpha1.fp());
    let mut b = FpMatrix::zeros(n, n);
    for j in 0..n {
        // both kinds pair column j of b with c·α₁(e_i, e_j) for every i
        let mut rhs = Vec::with_capacity(n * m);
        for i in 0..n {
            rhs.extend_from_slice(c.mul_vec(&alpha1.eval_basis(i, j), fp).coords());
        }
        let y = rows.solve(&FpVector::from_reduced(rhs, fp), fp).ok()??;
        for r in 0..n {
            b.set(r, j, y.coords()[r]);
        }
    }
    Some(b)
}

/// Linear system whose unknown is one column `y` of `b`. Row `(i, k)` is
/// `(a e_i)ᵀ A_k` for isotopisms (so `row · y = α₂(a e_i, y)_k`) and
/// `(A_k a e_i)ᵀ` for anti-isotopisms (`row · y = α₂(y, a e_i)_k`).
fn b_system(alpha2: &BilinearMap, a: &FpMatrix, kind: IsotopyKind) -> FpMatrix {
    let (n, m, fp) = (alpha2.n(), alpha2.m(), alpha2.fp());
    let mut rows = FpMatrix::zeros(n * m, n);
    for i in 0..n {
        let ai = a.column(i);
        for k in 0..m {
            let s = alpha2.slice(k);
            let row = match kind {
                IsotopyKind::Isotopism => s.transpose().mul_vec(&ai, fp),
                IsotopyKind::AntiIsotopism => s.mul_vec(&ai, fp),
            };
            for c in 0..n {
                rows.set(i * m + k, c, row.coords()[c]);
            }
        }
    }
    rows
}

/// Deterministic search over `(a, c) ∈ GL(n,p) × GL(m,p)` in lexicographic
/// order (`a` outer), with `b` forced by the basis equations.
pub fn search_isotopism(
    alpha1: &BilinearMap,
    alpha2: &BilinearMap,
    kind: IsotopyKind,
    budget: u128,
) -> Result<SearchOutcome> {
    if !alpha1.same_shape(alpha2) {
        return Err(Error::dims("maps must share p, n and m"));
    }
    let (n, m, fp) = (alpha1.n(), alpha1.m(), alpha1.fp());
    let gl_m: Vec<FpMatrix> = GeneralLinear::new(m, fp).collect();
    let mut visited: u128 = 0;
    for a in GeneralLinear::new(n, fp) {
        let rows = b_system(alpha2, &a, kind);
        for c in &gl_m {
            if visited >= budget {
                return Ok(SearchOutcome::Inconclusive { visited });
            }
            visited += 1;
            let Some(b) = forced_b(alpha1, &rows, c) else {
                continue;
            };
            if !b.is_invertible(fp)? {
                continue;
            }
            let iso = Isotopism {
                a: a.clone(),
                b,
                c: c.clone(),
                kind,
            };
            if first_failure(alpha1, alpha2, &iso).is_none() {
                return Ok(SearchOutcome::Found {
                    witness: iso,
                    index: visited - 1,
                });
            }
        }
    }
    Ok(SearchOutcome::Exhausted { visited })
}

/// A coordinate map between two groups of the same shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementMap {
    /// `(u, v, w) ↦ (a u, b v, c w)`.
    Linear {
        a: FpMatrix,
        b: FpMatrix,
        c: FpMatrix,
    },
    /// `(v, w, z) ↦ (b w, a v, c(α₁(v, w) − z))`.
    Anti {
        a: FpMatrix,
        b: FpMatrix,
        c: FpMatrix,
        alpha1: BilinearMap,
    },
    /// `(u, v, w) ↦ (v, u, w)`; not a homomorphism in general.
    Swap,
}

impl ElementMap {
    pub fn identity(n: usize, m: usize) -> Self {
        ElementMap::Linear {
            a: FpMatrix::identity(n),
            b: FpMatrix::identity(n),
            c: FpMatrix::identity(m),
        }
    }

    pub fn apply(&self, g: &GroupElement, fp: FieldParams) -> GroupElement {
        match self {
            ElementMap::Linear { a, b, c } => GroupElement {
                a: a.mul_vec(&g.a, fp),
                b: b.mul_vec(&g.b, fp),
                c: c.mul_vec(&g.c, fp),
            },
            ElementMap::Anti { a, b, c, alpha1 } => GroupElement {
                a: b.mul_vec(&g.b, fp),
                b: a.mul_vec(&g.a, fp),
                c: c.mul_vec(&alpha1.eval(&g.a, &g.b).sub(&g.c, fp), fp),
            },
            ElementMap::Swap => GroupElement {
                a: g.b.clone(),
                b: g.a.clone(),
                c: g.c.clone(),
            },
        }
    }
}

/// The isomorphism `(u, v, w) ↦ (a u, b v, c w)` from `G(α₁, β₁)` to
/// `G(α₂, β₂)`, valid when `(a, b, c)` is an isotopism and
/// `β₂(b v₁, b v₂) = c β₁(v₁, v₂)`.
pub fn group_isomorphism_from_isotopism(
    iso: &Isotopism,
    spec1: &GroupSpec,
    spec2: &GroupSpec,
) -> Result<ElementMap> {
    if !check_isotopism(spec1.alpha(), spec2.alpha(), iso)? {
        return Err(Error::InvalidArgument(
            "witness is not an isotopism between the alphas".into(),
        ));
    }
    let beta_witness = Isotopism {
        a: iso.b.clone(),
        b: iso.b.clone(),
        c: iso.c.clone(),
        kind: IsotopyKind::Isotopism,
    };
    if let Some((i, j)) = first_failure(spec1.beta(), spec2.beta(), &beta_witness) {
        return Err(Error::BetaIncompatible { i, j });
    }
    Ok(ElementMap::Linear {
        a: iso.a.clone(),
        b: iso.b.clone(),
        c: iso.c.clone(),
    })
}

/// The isomorphism `(v, w, z) ↦ (b w, a v, c(α₁(v, w) − z))` from `G(α₁)` to
/// `G(α₂)` for an anti-isotopism `(a, b, c)`; both betas must vanish.
pub fn group_isomorphism_from_anti_isotopism(
    iso: &Isotopism,
    spec1: &GroupSpec,
    spec2: &GroupSpec,
) -> Result<ElementMap> {
    if !spec1.beta().is_zero() || !spec2.beta().is_zero() {
        return Err(Error::InvalidArgument(
            "anti-isotopism isomorphisms need beta = 0 on both sides".into(),
        ));
    }
    if !check_anti_isotopism(spec1.alpha(), spec2.alpha(), iso)? {
        return Err(Error::InvalidArgument(
            "witness is not an anti-isotopism between the alphas".into(),
        ));
    }
    Ok(ElementMap::Anti {
        a: iso.a.clone(),
        b: iso.b.clone(),
        c: iso.c.clone(),
        alpha1: spec1.alpha().clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { pairs: usize, seed: u64 },
}

/// Checks `map(g₁g₂) = map(g₁)map(g₂)`; the exhaustive mode also checks that
/// the map is a bijection.
pub fn verify_homomorphism(
    g: &GroupSpec,
    h: &GroupSpec,
    map: &ElementMap,
    mode: VerifyMode,
) -> Result<bool> {
    if g.fp() != h.fp() || g.n() != h.n() || g.m() != h.m() {
        return Err(Error::dims("groups must share p, n and m"));
    }
    let fp = g.fp();
    match mode {
        VerifyMode::Exhaustive => {
            let order = g.order().unwrap_or(u128::MAX);
            if order > EXHAUSTIVE_ORDER_CAP {
                return Err(Error::BudgetExceeded {
                    required: order,
                    budget: EXHAUSTIVE_ORDER_CAP,
                });
            }
            let elements: Vec<GroupElement> = (0..order).map(|i| g.element_from_index(i)).collect();
            let images: Vec<GroupElement> = elements.iter().map(|x| map.apply(x, fp)).collect();
            let mut seen = vec![false; order as usize];
            for img in &images {
                let idx = h.element_index(img) as usize;
                if seen[idx] {
                    return Ok(false);
                }
                seen[idx] = true;
            }
            Ok((0..elements.len()).into_par_iter().all(|i| {
                elements.iter().zip(&images).all(|(x2, y2)| {
                    map.apply(&g.mul(&elements[i], x2), fp) == h.mul(&images[i], y2)
                })
            }))
        }
        VerifyMode::Sampled { pairs, seed } => {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let order = g.order().ok_or(Error::BudgetExceeded {
                required: u128::MAX,
                budget: u128::MAX,
            })?;
            for _ in 0..pairs {
                let x = g.element_from_index(rng.gen_range(0..order));
                let y = g.element_from_index(rng.gen_range(0..order));
                if map.apply(&g.mul(&x, &y), fp) != h.mul(&map.apply(&x, fp), &map.apply(&y, fp)) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// The `(δ, σ, τ)` identifications used to read maps off a group: `δ` onto
/// `A/Z`, `σ` onto `G/A` (through `B`), `τ` from `Z` onto `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionBasis {
    pub d: FpMatrix,
    pub s: FpMatrix,
    pub t: FpMatrix,
}

impl ExtractionBasis {
    pub fn new(d: FpMatrix, s: FpMatrix, t: FpMatrix, fp: FieldParams) -> Result<Self> {
        for m in [&d, &s, &t] {
            if !m.is_invertible(fp)? {
                return Err(Error::Singular);
            }
        }
        Ok(ExtractionBasis { d, s, t })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        ExtractionBasis {
            d: FpMatrix::identity(n),
            s: FpMatrix::identity(n),
            t: FpMatrix::identity(m),
        }
    }

    pub fn random(fp: FieldParams, n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ExtractionBasis {
            d: random_invertible(n, fp, &mut rng),
            s: random_invertible(n, fp, &mut rng),
            t: random_invertible(m, fp, &mut rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub alpha: BilinearMap,
    pub beta: BilinearMap,
    /// Isotopism from the extracted `alpha` to the group's own `α`.
    pub witness: Isotopism,
}

/// `α'(v, w) = τ([δ(v), σ(w)])`, read off through group commutators of the
/// canonical `A = {(a,0,c)}` and `B = {(0,b,c)}`.
pub fn extract_alpha(
    spec: &GroupSpec,
    basis: &ExtractionBasis,
) -> Result<(BilinearMap, Isotopism)> {
    let (n, m, fp) = (spec.n(), spec.m(), spec.fp());
    if basis.d.rows() != n || basis.s.rows() != n || basis.t.rows() != m {
        return Err(Error::dims("extraction basis does not match the group"));
    }
    let basis = ExtractionBasis::new(basis.d.clone(), basis.s.clone(), basis.t.clone(), fp)?;
    let zero_n = FpVector::zeros(n);
    let zero_m = FpVector::zeros(m);
    let mut slices = vec![FpMatrix::zeros(n, n); m];
    for i in 0..n {
        let x = GroupElement::new(basis.d.column(i), zero_n.clone(), zero_m.clone());
        for j in 0..n {
            let y = GroupElement::new(zero_n.clone(), basis.s.column(j), zero_m.clone());
            let z = basis.t.mul_vec(&spec.commutator_by_products(&x, &y).c, fp);
            for (k, s) in slices.iter_mut().enumerate() {
                s.set(i, j, z.coords()[k]);
            }
        }
    }
    let alpha = BilinearMap::new(fp, n, m, slices)?;
    // α(d v, s w) = t⁻¹ α'(v, w)
    let witness = Isotopism {
        a: basis.d.clone(),
        b: basis.s.clone(),
        c: basis.t.inverse(fp)?,
        kind: IsotopyKind::Isotopism,
    };
    Ok((alpha, witness))
}

/// [`extract_alpha`] plus `β'(v₁, v₂) = ½ τ([η(v₁), η(v₂)])` with
/// `η(v) = (0, σ v, 0)`; needs odd `p`.
pub fn extract_maps(spec: &GroupSpec, basis: &ExtractionBasis) -> Result<Extraction> {
    let (n, m, fp) = (spec.n(), spec.m(), spec.fp());
    if fp.p() == 2 {
        return Err(Error::InvalidArgument(
            "beta extraction halves commutators and needs odd p".into(),
        ));
    }
    let (alpha, witness) = extract_alpha(spec, basis)?;
    let half = fp.inv(2).expect("p is odd");
    let zero_n = FpVector::zeros(n);
    let zero_m = FpVector::zeros(m);
    let mut slices = vec![FpMatrix::zeros(n, n); m];
    for i in 0..n {
        let x = GroupElement::new(zero_n.clone(), basis.s.column(i), zero_m.clone());
        for j in 0..n {
            let y = GroupElement::new(zero_n.clone(), basis.s.column(j), zero_m.clone());
            let z = basis
                .t
                .mul_vec(&spec.commutator_by_products(&x, &y).c, fp)
                .scale(half, fp);
            for (k, s) in slices.iter_mut().enumerate() {
                s.set(i, j, z.coords()[k]);
            }
        }
    }
    Ok(Extraction {
        alpha,
        beta: BilinearMap::new(fp, n, m, slices)?,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Budget;

    fn f(p: u64) -> FieldParams {
        FieldParams::new(p).unwrap()
    }

    fn random_iso(fp: FieldParams, n: usize, m: usize, seed: u64, kind: IsotopyKind) -> Isotopism {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Isotopism {
            a: random_invertible(n, fp, &mut rng),
            b: random_invertible(n, fp, &mut rng),
            c: random_invertible(m, fp, &mut rng),
            kind,
        }
    }

    #[test]
    fn isotopism_examples() {
        let f3 = f(3);
        let alpha = BilinearMap::field_quotient_map(f3, 2, 2).unwrap();
        let id = Isotopism::identity(2, 2, IsotopyKind::Isotopism);
        assert!(check_isotopism(&alpha, &alpha, &id).unwrap());

        let iso = random_iso(f3, 2, 2, 4, IsotopyKind::Isotopism);
        let alpha2 = transport(&alpha, &iso).unwrap();
        assert!(check_isotopism(&alpha, &alpha2, &iso).unwrap());

        let mut perturbed = alpha.slices().to_vec();
        perturbed[0] = FpMatrix::zeros(2, 2);
        let perturbed = BilinearMap::new(f3, 2, 2, perturbed).unwrap();
        assert!(!check_isotopism(&alpha, &perturbed, &id).unwrap());

        let anti = Isotopism::identity(2, 2, IsotopyKind::AntiIsotopism);
        assert!(check_isotopism(&alpha, &alpha, &anti).is_err());
        let singular = Isotopism {
            a: FpMatrix::zeros(2, 2),
            ..id
        };
        assert_eq!(
            check_isotopism(&alpha, &alpha, &singular),
            Err(Error::Singular)
        );
    }

    #[test]
    fn anti_isotopism_examples() {
        let f5 = f(5);
        let alpha = BilinearMap::random_biadditive(f5, 2, 2, 6);
        let anti = Isotopism::identity(2, 2, IsotopyKind::AntiIsotopism);
        assert!(check_anti_isotopism(&alpha, &alpha.opposite(), &anti).unwrap());

        let sym = BilinearMap::field_quotient_map(f5, 2, 2).unwrap();
        assert!(check_anti_isotopism(&sym, &sym, &anti).unwrap());

        let mut perturbed = sym.slices().to_vec();
        perturbed[1] = FpMatrix::zeros(2, 2);
        let perturbed = BilinearMap::new(f5, 2, 2, perturbed).unwrap();
        assert!(!check_anti_isotopism(&sym, &perturbed, &anti).unwrap());

        let w = random_iso(f5, 2, 2, 1, IsotopyKind::AntiIsotopism);
        assert!(check_anti_isotopism(&alpha, &transport(&alpha, &w).unwrap(), &w).unwrap());
    }

    #[test]
    fn inverse_and_composition_on_scalars() {
        // 1x1: everything is multiplication by a scalar
        let f7 = f(7);
        let alpha = BilinearMap::from_slices(f7, &[vec![vec![3]]]).unwrap();
        let s = |x: i64| FpMatrix::from_rows([[x]], f7).unwrap();
        let iso = Isotopism::new(s(2), s(3), s(5), IsotopyKind::Isotopism, f7).unwrap();
        // α₂(2x, 3y) = 5·3xy ⇒ α₂ = 15/6 = 5/2 = 6 (mod 7)
        let alpha2 = transport(&alpha, &iso).unwrap();
        assert_eq!(alpha2.slice(0).get(0, 0), 6);
        let back = iso.inverse(f7);
        assert!(check_isotopism(&alpha2, &alpha, &back).unwrap());

        let anti = Isotopism::new(s(2), s(4), s(1), IsotopyKind::AntiIsotopism, f7).unwrap();
        let alpha3 = transport(&alpha2, &anti).unwrap();
        let comp = iso.then(&anti, f7);
        assert_eq!(comp.kind(), IsotopyKind::AntiIsotopism);
        assert!(check_anti_isotopism(&alpha, &alpha3, &comp).unwrap());
        assert!(check_anti_isotopism(&alpha3, &alpha2, &anti.inverse(f7)).unwrap());
    }

    #[test]
    fn search_examples() {
        let f2 = f(2);
        let alpha = BilinearMap::field_quotient_map(f2, 2, 2).unwrap();
        match search_isotopism(&alpha, &alpha, IsotopyKind::Isotopism, SEARCH_BUDGET).unwrap() {
            SearchOutcome::Found { witness, index } => {
                // GL(2,2) starts at [[0,1],[1,0]] in lexicographic order
                assert_eq!(index, 0);
                assert_eq!(witness.a().data(), &[0, 1, 1, 0]);
                assert!(check_isotopism(&alpha, &alpha, &witness).unwrap());
            }
            other => panic!("{other:?}"),
        }
        let iso = random_iso(f2, 2, 2, 9, IsotopyKind::Isotopism);
        let alpha2 = transport(&alpha, &iso).unwrap();
        match search_isotopism(&alpha, &alpha2, IsotopyKind::Isotopism, SEARCH_BUDGET).unwrap() {
            SearchOutcome::Found { witness, .. } => {
                assert!(check_isotopism(&alpha, &alpha2, &witness).unwrap())
            }
            other => panic!("{other:?}"),
        }
        match search_isotopism(&alpha, &alpha2, IsotopyKind::AntiIsotopism, SEARCH_BUDGET).unwrap()
        {
            SearchOutcome::Found { witness, .. } => {
                assert!(check_anti_isotopism(&alpha, &alpha2, &witness).unwrap())
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            search_isotopism(&alpha, &alpha2, IsotopyKind::Isotopism, 0).unwrap(),
            SearchOutcome::Inconclusive { visited: 0 }
        );
    }

    #[test]
    fn search_exhausts_between_inequivalent_maps() {
        // a nonsingular map is never isotopic to a singular one
        let f2 = f(2);
        let alpha = BilinearMap::field_quotient_map(f2, 2, 1).unwrap();
        let degenerate = BilinearMap::from_slices(f2, &[vec![vec![1, 0], vec![0, 0]]]).unwrap();
        assert_eq!(
            search_isotopism(&alpha, &degenerate, IsotopyKind::Isotopism, SEARCH_BUDGET).unwrap(),
            SearchOutcome::Exhausted { visited: 6 }
        );
    }

    fn heis(p: u64, n: usize, m: usize) -> GroupSpec {
        GroupSpec::heisenberg_like(
            BilinearMap::field_quotient_map(f(p), n, m).unwrap(),
            Budget::default(),
        )
        .unwrap()
    }

    #[test]
    fn isotopism_group_map_examples() {
        let g = heis(3, 1, 1);
        let map = group_isomorphism_from_isotopism(
            &Isotopism::identity(1, 1, IsotopyKind::Isotopism),
            &g,
            &g,
        )
        .unwrap();
        assert_eq!(map, ElementMap::identity(1, 1));
        assert!(verify_homomorphism(&g, &g, &map, VerifyMode::Exhaustive).unwrap());

        let f3 = f(3);
        let s = |x: i64| FpMatrix::from_rows([[x]], f3).unwrap();
        let iso = Isotopism::new(s(2), s(2), s(1), IsotopyKind::Isotopism, f3).unwrap();
        let g2 = GroupSpec::heisenberg_like(transport(g.alpha(), &iso).unwrap(), Budget::default())
            .unwrap();
        let map = group_isomorphism_from_isotopism(&iso, &g, &g2).unwrap();
        assert!(verify_homomorphism(&g, &g2, &map, VerifyMode::Exhaustive).unwrap());

        // incompatible beta on the target side
        let bad = GroupSpec::new(
            g2.alpha().clone(),
            BilinearMap::from_slices(f3, &[vec![vec![1]]]).unwrap(),
            Budget::default(),
        )
        .unwrap();
        assert_eq!(
            group_isomorphism_from_isotopism(&iso, &g, &bad),
            Err(Error::BetaIncompatible { i: 0, j: 0 })
        );
    }

    #[test]
    fn anti_isotopism_group_map_examples() {
        let f3 = f(3);
        let g = heis(3, 1, 1);
        let op = GroupSpec::heisenberg_like(g.alpha().opposite(), Budget::default()).unwrap();
        let anti = Isotopism::identity(1, 1, IsotopyKind::AntiIsotopism);
        let map = group_isomorphism_from_anti_isotopism(&anti, &g, &op).unwrap();
        assert!(verify_homomorphism(&g, &op, &map, VerifyMode::Exhaustive).unwrap());
        // (v, w, z) ↦ (w, v, α(v, w) − z)
        let x = g.element_from_index(5);
        let y = map.apply(&x, f3);
        assert_eq!((&y.a, &y.b), (&x.b, &x.a));
        assert_eq!(y.c, g.alpha().eval(&x.a, &x.b).sub(&x.c, f3));

        let with_beta = GroupSpec::new(
            g.alpha().clone(),
            BilinearMap::from_slices(f3, &[vec![vec![1]]]).unwrap(),
            Budget::default(),
        )
        .unwrap();
        assert!(group_isomorphism_from_anti_isotopism(&anti, &with_beta, &op).is_err());
    }

    #[test]
    fn swap_is_not_a_homomorphism() {
        let g = heis(3, 1, 1);
        assert!(!verify_homomorphism(&g, &g, &ElementMap::Swap, VerifyMode::Exhaustive).unwrap());
        assert!(!verify_homomorphism(
            &g,
            &g,
            &ElementMap::Swap,
            VerifyMode::Sampled {
                pairs: 200,
                seed: 1
            }
        )
        .unwrap());
    }

    #[test]
    fn extraction_examples() {
        let f3 = f(3);
        let g = heis(3, 2, 2);
        let ex = extract_maps(&g, &ExtractionBasis::identity(2, 2)).unwrap();
        assert_eq!(&ex.alpha, g.alpha());
        assert!(ex.beta.is_zero());

        // 1x1: α' = t·d·s
        let h = heis(3, 1, 1);
        let s = |x: i64| FpMatrix::from_rows([[x]], f3).unwrap();
        let basis = ExtractionBasis::new(s(2), s(2), s(2), f3).unwrap();
        let ex = extract_maps(&h, &basis).unwrap();
        assert_eq!(ex.alpha.slice(0).get(0, 0), 2);
        assert!(check_isotopism(&ex.alpha, h.alpha(), &ex.witness).unwrap());

        let f2 = f(2);
        let g2 = heis(2, 2, 1);
        assert!(extract_maps(&g2, &ExtractionBasis::identity(2, 1)).is_err());
        let (a2, w2) = extract_alpha(&g2, &ExtractionBasis::random(f2, 2, 1, 3)).unwrap();
        assert!(check_isotopism(&a2, g2.alpha(), &w2).unwrap());
    }

    #[test]
    fn extraction_beta_is_half_bar() {
        let f5 = f(5);
        let g = GroupSpec::new(
            BilinearMap::field_quotient_map(f5, 2, 2).unwrap(),
            BilinearMap::random_biadditive(f5, 2, 2, 7),
            Budget::default(),
        )
        .unwrap();
        let ex = extract_maps(&g, &ExtractionBasis::identity(2, 2)).unwrap();
        assert_eq!(ex.beta, g.beta_bar().scale(f5.inv(2).unwrap()));
        assert_eq!(ex.beta.bar(), g.beta_bar().clone());
    }
}
