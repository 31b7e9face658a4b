//! Embedding a class-2 exponent-`p` group, given by its commutator map `γ`,
//! into an ultraspecial `G(α, β)` with `β = 2⁻¹γ`.

use crate::bilinear::BilinearMap;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::linalg::{Budget, FpVector};

/// Commutator structure of a class-2 exponent-`p` group: an alternating
/// `γ : V₀ × V₀ → W₀` over `GF(p)`, `p` odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class2Data {
    gamma: BilinearMap,
}

impl Class2Data {
    pub fn new(gamma: BilinearMap) -> Result<Self> {
        if gamma.fp().p() == 2 {
            return Err(Error::InvalidArgument(
                "class-2 embedding needs odd p".into(),
            ));
        }
        if !gamma.is_alternating() {
            return Err(Error::NotAlternating);
        }
        Ok(Class2Data { gamma })
    }

    pub fn gamma(&self) -> &BilinearMap {
        &self.gamma
    }

    pub fn n0(&self) -> usize {
        self.gamma.n()
    }

    pub fn m0(&self) -> usize {
        self.gamma.m()
    }

    pub fn is_padded(&self) -> bool {
        self.n0() == self.m0()
    }
}

/// Pads to `n = m = max(n₀, m₀)` with zeros: extra generators are central,
/// extra center coordinates are never hit.
pub fn pad(data: &Class2Data) -> Class2Data {
    let d = data.n0().max(data.m0());
    Class2Data {
        gamma: data.gamma.padded(d, d),
    }
}

/// `G(α, 2⁻¹γ)`; `alpha` defaults to the field quotient map on the padded
/// dimensions.
pub fn embed_class_two(data: &Class2Data, alpha: Option<&BilinearMap>) -> Result<GroupSpec> {
    if !data.is_padded() {
        return Err(Error::dims(format!(
            "class-2 data must be padded to n = m (got n={}, m={})",
            data.n0(),
            data.m0()
        )));
    }
    let fp = data.gamma.fp();
    let alpha = match alpha {
        Some(a) => a.clone(),
        None => BilinearMap::field_quotient_map(fp, data.n0(), data.m0())?,
    };
    if !alpha.same_shape(&data.gamma) {
        return Err(Error::dims("alpha and gamma must share p, n and m"));
    }
    let half = fp.inv(2).expect("p is odd");
    GroupSpec::new(alpha, data.gamma.scale(half), Budget::default())
}

/// True iff `[(0, e_i, 0), (0, e_j, 0)] = (0, 0, γ(e_i, e_j))` on every basis
/// pair, with `γ` padded to the group's dimensions.
pub fn verify_embedding(spec: &GroupSpec, data: &Class2Data) -> bool {
    let (n, m) = (spec.n(), spec.m());
    if data.gamma.fp() != spec.fp() || data.n0() > n || data.m0() > m {
        return false;
    }
    let gamma = data.gamma.padded(n, m);
    let zn = FpVector::zeros(n);
    let zm = FpVector::zeros(m);
    (0..n).all(|i| {
        let x = GroupElement::new(zn.clone(), FpVector::unit(n, i), zm.clone());
        (0..n).all(|j| {
            let y = GroupElement::new(zn.clone(), FpVector::unit(n, j), zm.clone());
            let z = spec.commutator_by_products(&x, &y);
            z.a.is_zero() && z.b.is_zero() && z.c == gamma.eval_basis(i, j)
        })
    })
}
