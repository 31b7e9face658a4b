//! The group `G(α, β)` on `V × V × W` with
//! `(a₁,b₁,c₁)(a₂,b₂,c₂) = (a₁+a₂, b₁+b₂, c₁+c₂+α(a₁,b₂)+β(b₁,b₂))`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::BilinearMap;
use crate::error::{Error, Result};
use crate::linalg::{
    checked_pow, vector_from_index, vector_index, Budget, FieldParams, FpMatrix, FpVector,
};

/// The defining pair `(α, β)`; `α` must be nonsingular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    alpha: BilinearMap,
    beta: BilinearMap,
    beta_bar: BilinearMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub a: FpVector,
    pub b: FpVector,
    pub c: FpVector,
}

impl GroupElement {
    pub fn new(a: FpVector, b: FpVector, c: FpVector) -> Self {
        GroupElement { a, b, c }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Outcome of the semi-extraspecial check. `witness` is the first `(a, b)`
/// whose commutator map fails to reach all of `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SesReport {
    pub holds: bool,
    pub witness_of_failure: Option<(FpVector, FpVector)>,
}

impl GroupSpec {
    /// Validates shapes and nonsingularity of `alpha`.
    pub fn new(alpha: BilinearMap, beta: BilinearMap, budget: Budget) -> Result<Self> {
        if !alpha.same_shape(&beta) {
            return Err(Error::dims("alpha and beta must share p, n and m"));
        }
        if !alpha.is_nonsingular(budget)? {
            return Err(Error::NotNonsingular);
        }
        Ok(Self::new_unchecked(alpha, beta))
    }

    /// `G(α) = G(α, 0)`.
    pub fn heisenberg_like(alpha: BilinearMap, budget: Budget) -> Result<Self> {
        let beta = BilinearMap::zero(alpha.fp(), alpha.n(), alpha.m());
        Self::new(alpha, beta, budget)
    }

    /// Skips the nonsingularity check. Meant for negative tests; the group
    /// law is still well defined but the structure theorems need not hold.
    pub fn new_unchecked(alpha: BilinearMap, beta: BilinearMap) -> Self {
        assert!(
            alpha.same_shape(&beta),
            "alpha and beta must share p, n and m"
        );
        let beta_bar = beta.bar();
        GroupSpec {
            alpha,
            beta,
            beta_bar,
        }
    }

    pub fn alpha(&self) -> &BilinearMap {
        &self.alpha
    }

    pub fn beta(&self) -> &BilinearMap {
        &self.beta
    }

    pub fn beta_bar(&self) -> &BilinearMap {
        &self.beta_bar
    }

    pub fn fp(&self) -> FieldParams {
        self.alpha.fp()
    }

    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    pub fn m(&self) -> usize {
        self.alpha.m()
    }

    /// `log_p |G| = 2n + m`.
    pub fn order_log(&self) -> usize {
        2 * self.n() + self.m()
    }

    pub fn order(&self) -> Option<u128> {
        checked_pow(self.fp().p() as u64, self.order_log())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            a: FpVector::zeros(self.n()),
            b: FpVector::zeros(self.n()),
            c: FpVector::zeros(self.m()),
        }
    }

    pub fn conforms(&self, g: &GroupElement) -> Result<()> {
        if g.a.len() != self.n() || g.b.len() != self.n() || g.c.len() != self.m() {
            return Err(Error::dims(format!(
                "element has shape ({}, {}, {}), group expects ({}, {}, {})",
                g.a.len(),
                g.b.len(),
                g.c.len(),
                self.n(),
                self.n(),
                self.m()
            )));
        }
        Ok(())
    }

    pub fn multiply(&self, g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
        self.conforms(g1)?;
        self.conforms(g2)?;
        Ok(self.mul(g1, g2))
    }

    /// Product without shape checks.
    pub fn mul(&self, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
        let fp = self.fp();
        let twist = self
            .alpha
            .eval(&g1.a, &g2.b)
            .add(&self.beta.eval(&g1.b, &g2.b), fp);
        GroupElement {
            a: g1.a.add(&g2.a, fp),
            b: g1.b.add(&g2.b, fp),
            c: g1.c.add(&g2.c, fp).add(&twist, fp),
        }
    }

    /// `(−a, −b, −c + α(a,b) + β(b,b))`.
    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let fp = self.fp();
        let t = self
            .alpha
            .eval(&g.a, &g.b)
            .add(&self.beta.eval(&g.b, &g.b), fp);
        GroupElement {
            a: g.a.neg(fp),
            b: g.b.neg(fp),
            c: g.c.neg(fp).add(&t, fp),
        }
    }

    /// `[g₁, g₂] = g₁⁻¹g₂⁻¹g₁g₂ = (0, 0, α(a₁,b₂) − α(a₂,b₁) + β̄(b₁,b₂))`.
    pub fn commutator(&self, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
        let fp = self.fp();
        let z = self
            .alpha
            .eval(&g1.a, &g2.b)
            .sub(&self.alpha.eval(&g2.a, &g1.b), fp)
            .add(&self.beta_bar.eval(&g1.b, &g2.b), fp);
        GroupElement {
            a: FpVector::zeros(self.n()),
            b: FpVector::zeros(self.n()),
            c: z,
        }
    }

    /// `g₁⁻¹g₂⁻¹g₁g₂` through four products.
    pub fn commutator_by_products(&self, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
        let left = self.mul(&self.inverse(g1), &self.inverse(g2));
        self.mul(&self.mul(&left, g1), g2)
    }

    /// `g^k = (ka, kb, kc + C(k,2)(α(a,b) + β(b,b)))`.
    pub fn power(&self, g: &GroupElement, k: u64) -> GroupElement {
        let fp = self.fp();
        let kk = fp.from_u128(k as u128);
        let binom = fp.from_u128(k as u128 * (k as u128).saturating_sub(1) / 2);
        let t = self
            .alpha
            .eval(&g.a, &g.b)
            .add(&self.beta.eval(&g.b, &g.b), fp);
        GroupElement {
            a: g.a.scale(kk, fp),
            b: g.b.scale(kk, fp),
            c: g.c.scale(kk, fp).add(&t.scale(binom, fp), fp),
        }
    }

    /// Least `k ≥ 1` with `g^k = 1`; always divides `p²`.
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        let p = self.fp().p() as u64;
        let id = self.identity();
        if *g == id {
            1
        } else if self.power(g, p) == id {
            p
        } else {
            debug_assert_eq!(self.power(g, p * p), id);
            p * p
        }
    }

    /// `g ∈ Z(G)` iff `a = b = 0`.
    pub fn in_center(&self, g: &GroupElement) -> bool {
        g.a.is_zero() && g.b.is_zero()
    }

    /// Number of elements, refusing above the budget.
    pub fn element_count(&self, budget: Budget) -> Result<u128> {
        budget.require_pow(self.fp().p() as u64, self.order_log())
    }

    /// Element at position `idx` in lexicographic order on `(a, b, c)`.
    pub fn element_from_index(&self, idx: u128) -> GroupElement {
        let v = vector_from_index(idx, self.order_log(), self.fp());
        self.split(v.coords())
    }

    pub fn element_index(&self, g: &GroupElement) -> u128 {
        vector_index(&g.a.concat(&g.b).concat(&g.c), self.fp())
    }

    fn split(&self, coords: &[u32]) -> GroupElement {
        let (n, fp) = (self.n(), self.fp());
        GroupElement {
            a: FpVector::from_reduced(coords[..n].to_vec(), fp),
            b: FpVector::from_reduced(coords[n..2 * n].to_vec(), fp),
            c: FpVector::from_reduced(coords[2 * n..].to_vec(), fp),
        }
    }

    /// The `m × 2n` matrix of `(a₂, b₂) ↦ α(a,b₂) − α(a₂,b) + β̄(b,b₂)`.
    fn commutation_matrix(&self, a: &FpVector, b: &FpVector) -> FpMatrix {
        let (n, m, fp) = (self.n(), self.m(), self.fp());
        let mut mat = FpMatrix::zeros(m, 2 * n);
        for j in 0..n {
            let e = FpVector::unit(n, j);
            let col_a = self.alpha.eval(&e, b).neg(fp);
            let col_b = self.alpha.eval(a, &e).add(&self.beta_bar.eval(b, &e), fp);
            for k in 0..m {
                mat.set(k, j, col_a.coords()[k]);
                mat.set(k, n + j, col_b.coords()[k]);
            }
        }
        mat
    }

    /// Checks that commutation with every non-central element surjects onto
    /// `W`, visiting all `p^{2n} − 1` nonzero `(a, b)`.
    pub fn verify_ses(&self, budget: Budget) -> Result<SesReport> {
        let (n, m, fp) = (self.n(), self.m(), self.fp());
        let count = budget.require_pow(fp.p() as u64, 2 * n)?;
        let failure = (1..count).into_par_iter().find_first(|&idx| {
            let v = vector_from_index(idx, 2 * n, fp);
            let a = FpVector::from_reduced(v.coords()[..n].to_vec(), fp);
            let b = FpVector::from_reduced(v.coords()[n..].to_vec(), fp);
            self.commutation_matrix(&a, &b).rank(fp) < m
        });
        Ok(match failure {
            None => SesReport {
                holds: true,
                witness_of_failure: None,
            },
            Some(idx) => {
                let v = vector_from_index(idx, 2 * n, fp);
                SesReport {
                    holds: false,
                    witness_of_failure: Some((
                        FpVector::from_reduced(v.coords()[..n].to_vec(), fp),
                        FpVector::from_reduced(v.coords()[n..].to_vec(), fp),
                    )),
                }
            }
        })
    }

    /// `|G'| = |G : G'|^{1/2}`, i.e. `m = n`.
    pub fn is_ultraspecial(&self) -> bool {
        self.m() == self.n()
    }

    /// Largest element order, by enumerating every element.
    pub fn exponent(&self, budget: Budget) -> Result<u64> {
        let count = self.element_count(budget)?;
        Ok((0..count)
            .into_par_iter()
            .map(|i| self.element_order(&self.element_from_index(i)))
            .max()
            .unwrap_or(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldParams {
        FieldParams::new(p).unwrap()
    }

    fn el(a: &[i64], b: &[i64], c: &[i64], fp: FieldParams) -> GroupElement {
        GroupElement::new(
            FpVector::new(a.iter().copied(), fp),
            FpVector::new(b.iter().copied(), fp),
            FpVector::new(c.iter().copied(), fp),
        )
    }

    fn heis(p: u64) -> GroupSpec {
        let fp = f(p);
        GroupSpec::heisenberg_like(
            BilinearMap::field_quotient_map(fp, 1, 1).unwrap(),
            Budget::default(),
        )
        .unwrap()
    }

    #[test]
    fn construction_validates() {
        let f3 = f(3);
        let z = BilinearMap::zero(f3, 2, 1);
        assert_eq!(
            GroupSpec::new(z.clone(), z.clone(), Budget::default()),
            Err(Error::NotNonsingular)
        );
        let a = BilinearMap::field_quotient_map(f3, 2, 1).unwrap();
        let b = BilinearMap::zero(f3, 2, 2);
        assert!(matches!(
            GroupSpec::new(a, b, Budget::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn multiply_examples() {
        let g = heis(3);
        let fp = g.fp();
        let x = el(&[1], &[1], &[0], fp);
        assert_eq!(g.multiply(&x, &g.identity()).unwrap(), x);
        assert_eq!(g.multiply(&x, &x).unwrap(), el(&[2], &[2], &[1], fp));
        assert!(g.multiply(&x, &el(&[1, 0], &[1], &[0], fp)).is_err());

        let f2 = f(2);
        let g2 = GroupSpec::heisenberg_like(
            BilinearMap::field_quotient_map(f2, 2, 1).unwrap(),
            Budget::default(),
        )
        .unwrap();
        let e1 = [1, 0];
        assert_eq!(
            g2.mul(&el(&e1, &[0, 0], &[0], f2), &el(&[0, 0], &e1, &[0], f2)),
            el(&e1, &e1, &[1], f2)
        );
    }

    #[test]
    fn inverse_examples() {
        let g = heis(3);
        let fp = g.fp();
        assert_eq!(g.inverse(&g.identity()), g.identity());
        let x = el(&[1], &[1], &[0], fp);
        assert_eq!(g.inverse(&x), el(&[2], &[2], &[1], fp));
        assert_eq!(g.mul(&x, &g.inverse(&x)), g.identity());
    }

    #[test]
    fn commutator_examples() {
        let g = heis(3);
        let fp = g.fp();
        let x = el(&[1], &[1], &[2], fp);
        assert_eq!(g.commutator(&x, &x), g.identity());
        assert_eq!(
            g.commutator(&el(&[1], &[0], &[0], fp), &el(&[0], &[1], &[0], fp)),
            el(&[0], &[0], &[1], fp)
        );
        let f5 = f(5);
        let spec = GroupSpec::new(
            BilinearMap::field_quotient_map(f5, 2, 2).unwrap(),
            BilinearMap::random_biadditive(f5, 2, 2, 3),
            Budget::default(),
        )
        .unwrap();
        let b1 = el(&[0, 0], &[1, 3], &[0, 0], f5);
        let b2 = el(&[0, 0], &[4, 2], &[0, 0], f5);
        assert_eq!(
            spec.commutator(&b1, &b2).c,
            spec.beta_bar().eval(&b1.b, &b2.b)
        );
    }

    #[test]
    fn power_examples() {
        let g = heis(3);
        let fp = g.fp();
        let x = el(&[1], &[1], &[0], fp);
        assert_eq!(g.power(&x, 0), g.identity());
        assert_eq!(g.power(&x, 1), x);
        assert_eq!(g.power(&x, 3), g.identity());

        let g2 = heis(2);
        let f2 = g2.fp();
        let y = el(&[1], &[1], &[0], f2);
        assert_eq!(g2.power(&y, 2), el(&[0], &[0], &[1], f2));
        assert_eq!(g2.element_order(&y), 4);
        // large k is reduced via the integer binomial
        let mut acc = g2.identity();
        for k in 0..40u64 {
            assert_eq!(g2.power(&y, k), acc);
            acc = g2.mul(&acc, &y);
        }
    }

    #[test]
    fn orders_odd_p() {
        let g = heis(3);
        assert_eq!(g.element_order(&g.identity()), 1);
        for i in 1..27 {
            assert_eq!(g.element_order(&g.element_from_index(i)), 3);
        }
        assert_eq!(g.exponent(Budget::default()).unwrap(), 3);
        assert_eq!(heis(2).exponent(Budget::default()).unwrap(), 4);
    }

    #[test]
    fn center_membership() {
        let g = heis(3);
        let fp = g.fp();
        assert!(g.in_center(&g.identity()));
        assert!(g.in_center(&el(&[0], &[0], &[2], fp)));
        let e = el(&[1], &[0], &[0], fp);
        assert!(!g.in_center(&e));
        assert!(!g.commutator(&e, &el(&[0], &[1], &[0], fp)).c.is_zero());
    }

    #[test]
    fn ses_holds_and_fails() {
        let f2 = f(2);
        for seed in 0..4 {
            let spec = GroupSpec::new(
                BilinearMap::field_quotient_map(f2, 2, 1).unwrap(),
                BilinearMap::random_biadditive(f2, 2, 1, seed),
                Budget::default(),
            )
            .unwrap();
            assert!(spec.verify_ses(Budget::default()).unwrap().holds);
        }
        let f3 = f(3);
        let bad =
            GroupSpec::new_unchecked(BilinearMap::zero(f3, 2, 1), BilinearMap::zero(f3, 2, 1));
        let r = bad.verify_ses(Budget::default()).unwrap();
        assert!(!r.holds);
        assert_eq!(
            r.witness_of_failure,
            Some((FpVector::zeros(2), FpVector::new([0, 1], f3)))
        );
        assert!(matches!(
            bad.verify_ses(Budget(10)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ultraspecial() {
        let f3 = f(3);
        let u = GroupSpec::heisenberg_like(
            BilinearMap::field_quotient_map(f3, 3, 3).unwrap(),
            Budget::default(),
        )
        .unwrap();
        assert!(u.is_ultraspecial());
        assert_eq!(u.order(), Some(3u128.pow(9)));
        let e = GroupSpec::heisenberg_like(
            BilinearMap::field_quotient_map(f3, 3, 1).unwrap(),
            Budget::default(),
        )
        .unwrap();
        assert!(!e.is_ultraspecial());
    }

    #[test]
    fn index_roundtrip() {
        let g = GroupSpec::heisenberg_like(
            BilinearMap::field_quotient_map(f(2), 2, 1).unwrap(),
            Budget::default(),
        )
        .unwrap();
        assert_eq!(g.element_from_index(0), g.identity());
        for i in 0..32 {
            assert_eq!(g.element_index(&g.element_from_index(i)), i);
        }
    }
}
