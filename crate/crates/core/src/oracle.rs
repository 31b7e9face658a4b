//! Brute-force ground truth on explicit multiplication tables.
//!
//! Elements are indexed lexicographically on `(a, b, c)`, so index 0 is the
//! identity and the center `{(0,0,c)}` is the first `p^m` indices.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::linalg::{vector_from_index, Budget, FieldParams, FpVector};

/// Largest group stored as a table.
pub const TABLE_CAP: u128 = 1 << 14;

/// Largest order checked on every triple.
pub const EXHAUSTIVE_AXIOM_CAP: usize = 512;

/// Triples sampled above [`EXHAUSTIVE_AXIOM_CAP`].
pub const SAMPLED_TRIPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    p: u32,
    n: usize,
    m: usize,
    table: Vec<u16>,
}

pub fn build_table(spec: &GroupSpec) -> Result<GroupTable> {
    let order = Budget(TABLE_CAP).require_pow(spec.fp().p() as u64, spec.order_log())? as usize;
    let elements: Vec<GroupElement> = (0..order as u128)
        .map(|i| spec.element_from_index(i))
        .collect();
    let table: Vec<u16> = (0..order)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = &elements[i];
            elements
                .iter()
                .map(move |y| spec.element_index(&spec.mul(x, y)) as u16)
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(GroupTable {
        order,
        p: spec.fp().p(),
        n: spec.n(),
        m: spec.m(),
        table,
    })
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.order + j] as usize
    }

    /// Overwrites one entry; used for negative controls.
    pub fn set(&mut self, i: usize, j: usize, k: usize) {
        self.table[i * self.order + j] = k as u16;
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.order)
            .find(|&j| self.mul(i, j) == 0)
            .expect("table has inverses")
    }

    pub fn inverses(&self) -> Vec<usize> {
        (0..self.order).map(|i| self.inverse(i)).collect()
    }

    pub fn commutator(&self, inv: &[usize], i: usize, j: usize) -> usize {
        self.mul(self.mul(self.mul(inv[i], inv[j]), i), j)
    }

    pub fn power(&self, i: usize, k: u64) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.mul(acc, i);
        }
        acc
    }

    pub fn element_order(&self, i: usize) -> u64 {
        let mut acc = i;
        let mut k = 1;
        while acc != 0 {
            acc = self.mul(acc, i);
            k += 1;
        }
        k
    }

    /// Every row and column is a permutation.
    pub fn is_latin(&self) -> bool {
        let perm = |get: &dyn Fn(usize) -> usize| {
            let mut seen = vec![false; self.order];
            (0..self.order).all(|j| !std::mem::replace(&mut seen[get(j)], true))
        };
        (0..self.order).all(|i| perm(&|j| self.mul(i, j)) && perm(&|j| self.mul(j, i)))
    }

    /// Indices of `{(0, 0, c)}`.
    pub fn predicted_center(&self) -> BTreeSet<usize> {
        (0..self.p.pow(self.m as u32) as usize).collect()
    }

    fn b_is_zero(&self, i: usize) -> bool {
        // b occupies the digits between c and a
        let pm = self.p.pow(self.m as u32) as usize;
        let pn = self.p.pow(self.n as u32) as usize;
        (i / pm).is_multiple_of(pn)
    }

    /// Indices of the canonical abelian subgroup `A = {(a, 0, c)}`.
    pub fn canonical_a(&self) -> BTreeSet<usize> {
        (0..self.order).filter(|&i| self.b_is_zero(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomMode {
    Exhaustive,
    Sampled { triples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub holds: bool,
    pub triples_checked: u64,
    /// First failing `(x, y, z)` for associativity, or `(x, x, x)` for an
    /// identity or inverse failure at `x`.
    pub witness: Option<(usize, usize, usize)>,
}

/// Exhaustive mode is refused above [`EXHAUSTIVE_AXIOM_CAP`].
pub fn verify_axioms(table: &GroupTable, mode: AxiomMode) -> Result<AxiomReport> {
    let n = table.order;
    for x in 0..n {
        if table.mul(0, x) != x || table.mul(x, 0) != x || !(0..n).any(|y| table.mul(x, y) == 0) {
            return Ok(AxiomReport {
                holds: false,
                triples_checked: 0,
                witness: Some((x, x, x)),
            });
        }
    }
    let assoc = |x: usize, y: usize, z: usize| {
        table.mul(table.mul(x, y), z) == table.mul(x, table.mul(y, z))
    };
    match mode {
        AxiomMode::Exhaustive => {
            if n > EXHAUSTIVE_AXIOM_CAP {
                return Err(Error::BudgetExceeded {
                    required: n as u128,
                    budget: EXHAUSTIVE_AXIOM_CAP as u128,
                });
            }
            let witness = (0..n).into_par_iter().find_map_first(|x| {
                for y in 0..n {
                    for z in 0..n {
                        if !assoc(x, y, z) {
                            return Some((x, y, z));
                        }
                    }
                }
                None
            });
            Ok(AxiomReport {
                holds: witness.is_none(),
                triples_checked: (n as u64).pow(3),
                witness,
            })
        }
        AxiomMode::Sampled { triples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..triples {
                let (x, y, z) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                if !assoc(x, y, z) {
                    return Ok(AxiomReport {
                        holds: false,
                        triples_checked: triples as u64,
                        witness: Some((x, y, z)),
                    });
                }
            }
            Ok(AxiomReport {
                holds: true,
                triples_checked: triples as u64,
                witness: None,
            })
        }
    }
}

/// Exhaustive up to [`EXHAUSTIVE_AXIOM_CAP`], seeded sampling above.
pub fn default_axiom_mode(table: &GroupTable, seed: u64) -> AxiomMode {
    if table.order <= EXHAUSTIVE_AXIOM_CAP {
        AxiomMode::Exhaustive
    } else {
        AxiomMode::Sampled {
            triples: SAMPLED_TRIPLES,
            seed,
        }
    }
}

pub fn compute_center(table: &GroupTable) -> BTreeSet<usize> {
    (0..table.order)
        .into_par_iter()
        .filter(|&z| (0..table.order).all(|g| table.mul(z, g) == table.mul(g, z)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Subgroup generated by `gens`.
pub fn closure(table: &GroupTable, gens: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let gens: Vec<usize> = gens.into_iter().collect();
    let mut set: BTreeSet<usize> = BTreeSet::from([0]);
    let mut frontier = vec![0];
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            let y = table.mul(x, g);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

/// Subgroup generated by all commutators.
pub fn compute_derived(table: &GroupTable) -> BTreeSet<usize> {
    let inv = table.inverses();
    let comms: HashSet<usize> = (0..table.order)
        .into_par_iter()
        .flat_map_iter(|i| {
            let inv = &inv;
            (0..table.order).map(move |j| table.commutator(inv, i, j))
        })
        .collect();
    closure(table, comms)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple of all element orders.
pub fn compute_exponent(table: &GroupTable) -> u64 {
    (0..table.order)
        .into_par_iter()
        .map(|i| table.element_order(i))
        .reduce(|| 1, |a, b| a / gcd(a, b) * b)
}

/// Multiply/inverse/power/commutator from the formulas agree with the table
/// on every element and pair.
pub fn formula_agreement(spec: &GroupSpec, table: &GroupTable) -> bool {
    let elements: Vec<GroupElement> = (0..table.order as u128)
        .map(|i| spec.element_from_index(i))
        .collect();
    let idx = |g: &GroupElement| spec.element_index(g) as usize;
    let inv = table.inverses();
    let p = table.p as u64;
    (0..table.order).into_par_iter().all(|i| {
        let x = &elements[i];
        if idx(&spec.inverse(x)) != inv[i]
            || idx(&spec.power(x, p)) != table.power(i, p)
            || idx(&spec.power(x, p + 1)) != table.power(i, p + 1)
        {
            return false;
        }
        (0..table.order).all(|j| {
            let y = &elements[j];
            idx(&spec.mul(x, y)) == table.mul(i, j)
                && idx(&spec.commutator(x, y)) == table.commutator(&inv, i, j)
        })
    })
}

/// Nonzero functionals on `W` up to scalars: first nonzero coordinate 1.
fn hyperplane_functionals(fp: FieldParams, m: usize) -> Vec<FpVector> {
    let total = (fp.p() as u128).pow(m as u32);
    (1..total)
        .map(|i| vector_from_index(i, m, fp))
        .filter(|v| v.coords().iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientCheck {
    pub functional: Vec<u32>,
    pub center_size: usize,
    pub derived_size: usize,
    pub extraspecial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtraspecialReport {
    pub hyperplanes: usize,
    pub all_extraspecial: bool,
    pub checks: Vec<QuotientCheck>,
}

/// For every index-`p` subgroup `N` of the center, `G/N` has center of order
/// `p` equal to its derived subgroup. `N = ker λ` for a functional `λ` on `W`,
/// and `G/N` is tabulated on `(a, b, λ(c))`.
pub fn extraspecial_quotient_check(spec: &GroupSpec) -> Result<ExtraspecialReport> {
    let table = build_table(spec)?;
    let fp = spec.fp();
    let (n, p) = (spec.n(), fp.p() as usize);
    let pm = table.predicted_center().len();
    let qorder = (spec.order_log() - spec.m() + 1) as u32;
    let qorder = p.pow(qorder);
    let mut checks = Vec::new();
    for lambda in hyperplane_functionals(fp, spec.m()) {
        let c_part = |i: usize| -> usize {
            let c = vector_from_index((i % pm) as u128, spec.m(), fp);
            c.dot(&lambda, fp) as usize
        };
        let q = |i: usize| (i / pm) * p + c_part(i);
        let mut qt = vec![u16::MAX; qorder * qorder];
        let mut well_defined = true;
        for i in 0..table.order {
            for j in 0..table.order {
                let (qi, qj, qk) = (q(i), q(j), q(table.mul(i, j)) as u16);
                let slot = &mut qt[qi * qorder + qj];
                if *slot == u16::MAX {
                    *slot = qk;
                } else if *slot != qk {
                    well_defined = false;
                }
            }
        }
        let quotient = GroupTable {
            order: qorder,
            p: p as u32,
            n,
            m: 1,
            table: qt,
        };
        let center = compute_center(&quotient);
        let derived = compute_derived(&quotient);
        checks.push(QuotientCheck {
            functional: lambda.into_coords(),
            center_size: center.len(),
            derived_size: derived.len(),
            extraspecial: well_defined && center.len() == p && center == derived,
        });
    }
    Ok(ExtraspecialReport {
        hyperplanes: checks.len(),
        all_extraspecial: checks.iter().all(|c| c.extraspecial),
        checks,
    })
}

/// An abelian subgroup as a sorted index set.
pub type Subgroup = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub target_order: usize,
    pub count: usize,
    pub subgroups: Vec<Subgroup>,
}

/// Abelian subgroups layer by layer: every abelian `p`-group of order
/// `p^{k+1}` contains one of order `p^k`, so index-`p` extensions by
/// centralizing elements reach all of them. `layers[k]` holds order `p^k`.
fn abelian_layers(table: &GroupTable, max_order: usize) -> Vec<Vec<Subgroup>> {
    let p = table.p as usize;
    let mut layers: Vec<Vec<Subgroup>> = vec![vec![vec![0]]];
    let mut size = 1;
    while size * p <= max_order && size * p <= table.order {
        let current = layers.last().unwrap();
        let mut seen: HashSet<Subgroup> = HashSet::new();
        let mut next = Vec::new();
        for h in current {
            let mut member = vec![false; table.order];
            for &x in h {
                member[x] = true;
            }
            let mut tried = member.clone();
            for g in 0..table.order {
                if tried[g] || !h.iter().all(|&x| table.mul(x, g) == table.mul(g, x)) {
                    continue;
                }
                if !member[table.power(g, p as u64)] {
                    continue;
                }
                let mut k: Vec<usize> = Vec::with_capacity(h.len() * p);
                let mut gi = 0;
                for _ in 0..p {
                    k.extend(h.iter().map(|&x| table.mul(x, gi)));
                    gi = table.mul(gi, g);
                }
                k.sort_unstable();
                for &x in &k {
                    tried[x] = true;
                }
                if seen.insert(k.clone()) {
                    next.push(k);
                }
            }
        }
        next.sort();
        if next.is_empty() {
            break;
        }
        layers.push(next);
        size *= p;
    }
    layers
}

/// All abelian subgroups of exactly `target_order`.
pub fn abelian_census(table: &GroupTable, target_order: usize) -> Result<Census> {
    if table.order > EXHAUSTIVE_AXIOM_CAP {
        return Err(Error::BudgetExceeded {
            required: table.order as u128,
            budget: EXHAUSTIVE_AXIOM_CAP as u128,
        });
    }
    let layers = abelian_layers(table, target_order);
    let subgroups = layers
        .into_iter()
        .find(|l| l[0].len() == target_order)
        .unwrap_or_default();
    Ok(Census {
        target_order,
        count: subgroups.len(),
        subgroups,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGraph {
    pub vertex_order: usize,
    pub vertices: Vec<Subgroup>,
    pub edges: Vec<(usize, usize)>,
}

impl AbelianGraph {
    pub fn is_complete(&self) -> bool {
        let v = self.vertices.len();
        self.edges.len() == v * v.saturating_sub(1) / 2
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter_map(move |&(a, b)| (a == v).then_some(b).or((b == v).then_some(a)))
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let bs: HashSet<&usize> = b.iter().collect();
    a.iter().filter(|x| bs.contains(x)).copied().collect()
}

/// Whether `G = XY` and `X ∩ Y = derived`.
fn complementary(table: &GroupTable, x: &[usize], y: &[usize], derived: &BTreeSet<usize>) -> bool {
    let cap = intersect(x, y);
    x.len() * y.len() / cap.len() == table.order
        && cap.iter().copied().collect::<BTreeSet<_>>() == *derived
}

/// Vertices are the abelian subgroups of the largest order that occurs;
/// edges join complementary pairs.
pub fn abelian_graph(table: &GroupTable) -> Result<AbelianGraph> {
    if table.order > EXHAUSTIVE_AXIOM_CAP {
        return Err(Error::BudgetExceeded {
            required: table.order as u128,
            budget: EXHAUSTIVE_AXIOM_CAP as u128,
        });
    }
    let vertices = abelian_layers(table, table.order).pop().unwrap_or_default();
    let derived = compute_derived(table);
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if complementary(table, &vertices[i], &vertices[j], &derived) {
                edges.push((i, j));
            }
        }
    }
    Ok(AbelianGraph {
        vertex_order: vertices.first().map_or(1, Vec::len),
        vertices,
        edges,
    })
}

/// Number of abelian subgroups `D` with `G = DA` and `D ∩ A = G'` for the
/// canonical `A`; such `D` have order `p^{n+m}`.
pub fn complement_census(table: &GroupTable) -> Result<usize> {
    let target = (table.p as usize).pow((table.n + table.m) as u32);
    let census = abelian_census(table, target)?;
    let a: Vec<usize> = table.canonical_a().into_iter().collect();
    let derived = compute_derived(table);
    Ok(census
        .subgroups
        .iter()
        .filter(|d| complementary(table, d, &a, &derived))
        .count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub order: usize,
    pub latin: bool,
    pub axioms: AxiomReport,
    pub center_matches: bool,
    pub derived_equals_center: bool,
    pub exponent: u64,
    pub formulas_agree: bool,
    pub extraspecial: ExtraspecialReport,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.latin
            && self.axioms.holds
            && self.center_matches
            && self.derived_equals_center
            && self.formulas_agree
            && self.extraspecial.all_extraspecial
            && (self.exponent == 4 || self.exponent % 2 == 1)
    }
}

/// Full table-side cross-validation of a spec.
pub fn cross_validate(spec: &GroupSpec, mode: AxiomMode) -> Result<OracleReport> {
    let table = build_table(spec)?;
    let center = compute_center(&table);
    let derived = compute_derived(&table);
    Ok(OracleReport {
        order: table.order,
        latin: table.is_latin(),
        axioms: verify_axioms(&table, mode)?,
        center_matches: center == table.predicted_center(),
        derived_equals_center: derived == center,
        exponent: compute_exponent(&table),
        formulas_agree: formula_agreement(spec, &table),
        extraspecial: extraspecial_quotient_check(spec)?,
    })
}
