//! Isomorphism types of irreducible complexes and the symbolic cumulant
//! series they induce on `K_n`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::complex::{canonicalize, shares_edge, CanonicalCode, Constituent, FComplex};
use super::poly::{falling_factorial, PPoly, SymbolicPolynomial};
use crate::clusters::{enumerate_clusters, DEFAULT_CLUSTER_BUDGET};
use crate::cumulants::{cumulant_from_moments, cumulant_recursive};
use crate::error::{Error, Result};
use crate::generators::{check_family, CopyInstance, SmallRGraph};
use crate::model::DependencyGraph;
use crate::partitions::PartitionTable;

pub const DEFAULT_TYPE_BUDGET: usize = 200_000;
pub const MAX_SYMBOLIC_K: usize = 5;

#[derive(Debug, Clone)]
pub struct IsoType {
    pub code: CanonicalCode,
    /// Representative in canonical labelling.
    pub representative: FComplex,
    pub aut_count: u64,
    /// `κ(B)` as a polynomial in `p`.
    pub cumulant: PPoly,
    pub num_vertices: usize,
    pub num_edges: usize,
    /// Number of clusters of this type in a concrete instance, when
    /// aggregated from one.
    pub multiplicity: Option<u64>,
}

impl IsoType {
    pub fn size(&self) -> usize {
        self.representative.len()
    }

    /// `1 / |Aut|`; times `n^{\underline v}` this is the number of clusters
    /// of the type in `K_n`.
    pub fn weight(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.aut_count))
    }

    pub fn placements(&self, n: u64) -> BigInt {
        falling_factorial(n, self.num_vertices as u32)
    }
}

/// `κ(B) = Σ_π (|π|-1)! (-1)^{|π|-1} Π_{B' ∈ π} p^{e(G_{B'})}`.
pub fn complex_cumulant(b: &FComplex) -> Result<PPoly> {
    let s = b.len();
    if s > 20 {
        return Err(Error::CapExceeded {
            what: "complex size",
            value: s,
            cap: 20,
        });
    }
    let moments = complex_moments(b);
    Ok(cumulant_from_moments(&PartitionTable::new(s), &moments))
}

/// Same value through the moment-cumulant recursion.
pub fn complex_cumulant_recursive(b: &FComplex) -> PPoly {
    cumulant_recursive(b.len(), &complex_moments(b))
}

fn complex_moments(b: &FComplex) -> Vec<PPoly> {
    (0..1u32 << b.len())
        .map(|mask| PPoly::power(b.edges_of_subset(mask) as u32))
        .collect()
}

fn make_type(b: &FComplex, multiplicity: Option<u64>) -> Result<IsoType> {
    let can = canonicalize(b)?;
    let rep = can.complex(b);
    Ok(IsoType {
        code: can.code,
        cumulant: complex_cumulant(&rep)?,
        num_vertices: rep.num_vertices(),
        num_edges: rep.num_edges(),
        representative: rep,
        aut_count: can.aut_count,
        multiplicity,
    })
}

/// All irreducible complex types of size `1..=k` built from `family`,
/// grouped by size and sorted by canonical code.
pub fn enumerate_types(family: &[SmallRGraph], k: usize, budget: usize) -> Result<Vec<Vec<IsoType>>> {
    let r = check_family(family)?;
    if k == 0 || k > MAX_SYMBOLIC_K {
        return Err(Error::CapExceeded {
            what: "symbolic order k",
            value: k,
            cap: MAX_SYMBOLIC_K,
        });
    }
    let mut levels: Vec<Vec<IsoType>> = Vec::with_capacity(k);
    let mut first: Vec<IsoType> = family
        .iter()
        .enumerate()
        .map(|(id, f)| make_type(&f.as_complex(id), None))
        .collect::<Result<_>>()?;
    first.sort_by(|a, b| a.code.cmp(&b.code));
    let mut total = first.len();
    levels.push(first);
    for _ in 1..k {
        let mut next: BTreeMap<CanonicalCode, FComplex> = BTreeMap::new();
        for t in levels.last().unwrap() {
            for (id, f) in family.iter().enumerate() {
                glue(&t.representative, id, f, r, &mut |b| {
                    let can = canonicalize(&b)?;
                    if !next.contains_key(&can.code) {
                        next.insert(can.code.clone(), can.complex(&b));
                        if total + next.len() > budget {
                            return Err(Error::TypeExplosion { budget });
                        }
                    }
                    Ok(())
                })?;
            }
        }
        total += next.len();
        let level = next
            .into_values()
            .map(|b| make_type(&b, None))
            .collect::<Result<Vec<_>>>()?;
        levels.push(level);
    }
    Ok(levels)
}

// Every way to add one copy of `f` to `b` so that it shares an edge with
// `G_B` and is not already a constituent.
fn glue(
    b: &FComplex,
    id: usize,
    f: &SmallRGraph,
    r: usize,
    emit: &mut impl FnMut(FComplex) -> Result<()>,
) -> Result<()> {
    let v = b.num_vertices();
    let union = Constituent::new(usize::MAX, b.underlying_edges());
    let mut image = vec![0u8; f.num_vertices()];
    let mut used = vec![false; v];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        fresh: usize,
        b: &FComplex,
        id: usize,
        f: &SmallRGraph,
        r: usize,
        union: &Constituent,
        image: &mut Vec<u8>,
        used: &mut Vec<bool>,
        emit: &mut impl FnMut(FComplex) -> Result<()>,
    ) -> Result<()> {
        let v = b.num_vertices();
        if i == f.num_vertices() {
            let c = Constituent::new(
                id,
                f.edges()
                    .iter()
                    .map(|e| e.iter().map(|&x| image[x]).collect())
                    .collect(),
            );
            if !shares_edge(&c, union) || b.constituents().contains(&c) {
                return Ok(());
            }
            let mut cs = b.constituents().to_vec();
            cs.push(c);
            return emit(FComplex::new(r, v + fresh, cs)?);
        }
        for x in 0..v {
            if !used[x] {
                used[x] = true;
                image[i] = x as u8;
                rec(i + 1, fresh, b, id, f, r, union, image, used, emit)?;
                used[x] = false;
            }
        }
        // fresh vertices are numbered in order of first use
        if v + fresh >= 255 {
            return Err(Error::TooManyVertices { vertices: v + fresh + 1 });
        }
        image[i] = (v + fresh) as u8;
        rec(i + 1, fresh + 1, b, id, f, r, union, image, used, emit)
    }

    rec(0, 0, b, id, f, r, &union, &mut image, &mut used, emit)
}

/// `κ_1..κ_k` as polynomials in falling factorials of `n` and powers of `p`.
pub fn symbolic_kappa(family: &[SmallRGraph], k: usize) -> Result<Vec<SymbolicPolynomial>> {
    symbolic_kappa_with_budget(family, k, DEFAULT_TYPE_BUDGET)
}

pub fn symbolic_kappa_with_budget(family: &[SmallRGraph], k: usize, budget: usize) -> Result<Vec<SymbolicPolynomial>> {
    let levels = enumerate_types(family, k, budget)?;
    Ok(levels.iter().map(|level| kappa_of_types(level)).collect())
}

/// `Σ_B n^{\underline v_B} κ(B) / |Aut(B)|` over the given types.
pub fn kappa_of_types(types: &[IsoType]) -> SymbolicPolynomial {
    let mut out = SymbolicPolynomial::zero();
    for t in types {
        out.add_scaled(t.num_vertices as u32, &t.weight(), &t.cumulant);
    }
    out
}

/// Result of grouping the clusters of a concrete instance by type.
#[derive(Debug, Clone)]
pub struct TypeCensus {
    /// Types of size `1..=k`, grouped by size, sorted by code.
    pub levels: Vec<Vec<IsoType>>,
    /// Whether `multiplicity · |Aut| = n^{\underline v}` held for every type.
    pub placement_identity: bool,
}

/// Maps every cluster of size `<= k` of a copy instance to its type.
pub fn aggregate_iso_types(inst: &CopyInstance, k: usize) -> Result<TypeCensus> {
    let g = DependencyGraph::build(&inst.hypergraph);
    let mut groups: Vec<HashMap<CanonicalCode, (FComplex, u64)>> = vec![HashMap::new(); k];
    let mut failure = None;
    enumerate_clusters(&g, k, DEFAULT_CLUSTER_BUDGET, |members| {
        if failure.is_some() {
            return;
        }
        let step = inst.complex_of(members).and_then(|b| Ok((canonicalize(&b)?, b)));
        match step {
            Ok((can, b)) => {
                groups[members.len() - 1]
                    .entry(can.code.clone())
                    .or_insert_with(|| (can.complex(&b), 0))
                    .1 += 1;
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut identity = true;
    let mut levels = Vec::with_capacity(k);
    for group in groups {
        let mut level = group
            .into_values()
            .map(|(b, count)| make_type(&b, Some(count)))
            .collect::<Result<Vec<_>>>()?;
        level.sort_by(|a, b| a.code.cmp(&b.code));
        for t in &level {
            let lhs = BigInt::from(t.multiplicity.unwrap()) * BigInt::from(t.aut_count);
            identity &= lhs == t.placements(inst.n as u64);
        }
        levels.push(level);
    }
    Ok(TypeCensus {
        levels,
        placement_identity: identity,
    })
}

/// Numeric `κ_s` of a concrete instance from its census.
pub fn census_kappa(census: &TypeCensus, p: f64) -> Vec<f64> {
    census
        .levels
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|t| t.multiplicity.unwrap_or(0) as f64 * t.cumulant.eval(p))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn triangle_kappas() {
        let k = symbolic_kappa(&[SmallRGraph::triangle()], 2).unwrap();
        assert_eq!(k[0].to_string(), "1/6 * ff(n,3) * p^3");
        assert_eq!(k[1].to_string(), "1/4 * ff(n,4) * p^5 + -1/4 * ff(n,4) * p^6");
    }

    #[test]
    fn triangle_and_cycle_first_order() {
        let k = symbolic_kappa(&[SmallRGraph::triangle(), SmallRGraph::four_cycle()], 1).unwrap();
        assert_eq!(k[0].coefficient(3, 3), q(1, 6));
        assert_eq!(k[0].coefficient(4, 4), q(1, 8));
        assert_eq!(k[0].len(), 2);
    }

    #[test]
    fn census_of_k5_triangles() {
        let inst = crate::generators::gen_subgraph_copies(&[SmallRGraph::triangle()], 5).unwrap();
        let census = aggregate_iso_types(&inst, 2).unwrap();
        assert!(census.placement_identity);
        assert_eq!(census.levels[1].len(), 1);
        assert_eq!(census.levels[1][0].multiplicity, Some(30));
        let inst4 = crate::generators::gen_subgraph_copies(&[SmallRGraph::triangle()], 4).unwrap();
        let c = aggregate_iso_types(&inst4, 1).unwrap();
        assert_eq!(c.levels[0][0].multiplicity, Some(4));
        assert_eq!(c.levels[0][0].aut_count, 6);
    }

    #[test]
    fn partition_and_recursive_routes_agree() {
        let levels = enumerate_types(&[SmallRGraph::triangle()], 3, DEFAULT_TYPE_BUDGET).unwrap();
        for t in levels.iter().flatten() {
            assert_eq!(t.cumulant, complex_cumulant_recursive(&t.representative));
        }
        let tri_pair = &levels[1][0];
        assert_eq!(tri_pair.cumulant.coefficient(5).to_i64(), Some(1));
    }
}
