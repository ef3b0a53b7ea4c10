//! Joint moments and joint cumulants of edge indicators, and the aggregate
//! series quantities built from them.
//!
//! For a set `A` of edge indices the joint moment is the product of `p_ω`
//! over the vertex union of the edges in `A`. The joint cumulant is the
//! partition sum
//!
//! ```text
//! κ(A) = Σ_{π ∈ Π(A)} (|π|-1)! (-1)^{|π|-1} Π_{P ∈ π} Δ(P)
//! ```
//!
//! which vanishes whenever the edges of `A` split into two vertex-disjoint
//! groups. `κ_k`, `Δ_k` and `δ_k` sum these over all clusters of size `k`.

use std::collections::HashMap;

use crate::clusters::{fold_clusters, ClusterCounts, EnumerationConfig, DEFAULT_CLUSTER_BUDGET};
use crate::error::{Error, Result};
use crate::model::{DependencyGraph, Hypergraph, ProbabilityAssignment};
use crate::oracles;
use crate::partitions::PartitionTable;
use crate::scalar::{CompensatedSum, Real, Ring};

pub const DEFAULT_CUMULANT_CAP: usize = 8;
pub const DEFAULT_SUBSET_BUDGET: u64 = 1_000_000;
pub const DEFAULT_CODEGREE_BUDGET: u64 = 10_000_000;

/// Partition-sum evaluation of a joint cumulant. `moments[mask]` holds the
/// joint moment of the sub-collection selected by `mask`, for every mask
/// over `table.size()` elements.
pub fn cumulant_from_moments<R: Ring>(table: &PartitionTable, moments: &[R]) -> R {
    let n = table.size();
    debug_assert!(moments.len() >= 1 << n);
    let coeffs = block_coefficients::<R>(n);
    R::sum_all(table.iter().map(|blocks| {
        let prod = blocks
            .iter()
            .fold(R::one(), |acc, &b| acc * moments[b as usize].clone());
        coeffs[blocks.len()].clone() * prod
    }))
}

// (b-1)! (-1)^(b-1) for b = 0..=n (index 0 unused)
fn block_coefficients<R: Ring>(n: usize) -> Vec<R> {
    let mut out = vec![R::zero()];
    let mut fact: i64 = 1;
    for b in 1..=n {
        if b > 1 {
            fact *= (b - 1) as i64;
        }
        let sign = if b % 2 == 1 { 1 } else { -1 };
        out.push(R::from_i64(sign * fact));
    }
    out
}

/// Cumulant through the moment-cumulant recursion
/// `κ(S) = Δ(S) - Σ_{T ⊊ S, min S ∈ T} κ(T) Δ(S \ T)`,
/// evaluated for every sub-mask. Independent of the partition sum.
pub fn cumulant_recursive<R: Ring>(n: usize, moments: &[R]) -> R {
    let full = (1usize << n) - 1;
    let mut kappa: Vec<R> = vec![R::zero(); full + 1];
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut acc = moments[s].clone();
        // proper subsets T of S containing the lowest element
        let mut sub = rest;
        loop {
            let t = sub | low;
            if t != s {
                acc = acc - kappa[t].clone() * moments[s ^ t].clone();
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        kappa[s] = acc;
    }
    kappa[full].clone()
}

/// Scratch space for per-cluster moment tables.
#[derive(Debug, Clone, Default)]
pub struct MomentScratch<F> {
    local: Vec<usize>,
    words: usize,
    edge_bits: Vec<u64>,
    union: Vec<u64>,
    local_p: Vec<F>,
    powers: Vec<F>,
    moments: Vec<F>,
    max_single: F,
}

impl<F: Real> MomentScratch<F> {
    pub fn new() -> Self {
        Self {
            local: Vec::new(),
            words: 0,
            edge_bits: Vec::new(),
            union: Vec::new(),
            local_p: Vec::new(),
            powers: Vec::new(),
            moments: Vec::new(),
            max_single: F::zero(),
        }
    }

    /// Fills `moments()` with the joint moment of every sub-collection of
    /// `members` (indexed by bitmask over positions in `members`).
    pub fn fill(&mut self, h: &Hypergraph, p: &ProbabilityAssignment<F>, members: &[usize]) {
        let s = members.len();
        assert!(s < 31, "moment table limited to 30 members");
        self.local.clear();
        for &i in members {
            self.local.extend_from_slice(h.edge(i));
        }
        self.local.sort_unstable();
        self.local.dedup();
        let width = self.local.len();
        self.words = width.div_ceil(64).max(1);
        let w = self.words;
        self.edge_bits.clear();
        self.edge_bits.resize(s * w, 0);
        self.max_single = F::zero();
        for (pos, &i) in members.iter().enumerate() {
            for &v in h.edge(i) {
                let l = self.local.binary_search(&v).unwrap();
                self.edge_bits[pos * w + l / 64] |= 1 << (l % 64);
            }
            self.max_single = self.max_single.max(p.edge_probability(h.edge(i)));
        }
        let total = 1usize << s;
        self.union.clear();
        self.union.resize(total * w, 0);
        for mask in 1..total {
            let low = mask.trailing_zeros() as usize;
            let prev = mask & (mask - 1);
            for x in 0..w {
                self.union[mask * w + x] = self.union[prev * w + x] | self.edge_bits[low * w + x];
            }
        }
        self.moments.clear();
        self.moments.resize(total, F::one());
        match p {
            ProbabilityAssignment::Uniform(q) => {
                self.powers.clear();
                let mut acc = F::one();
                for _ in 0..=width {
                    self.powers.push(acc);
                    acc = acc * *q;
                }
                for mask in 1..total {
                    let bits: u32 = self.union[mask * w..(mask + 1) * w]
                        .iter()
                        .map(|x| x.count_ones())
                        .sum();
                    self.moments[mask] = self.powers[bits as usize];
                }
            }
            ProbabilityAssignment::PerVertex(ps) => {
                self.local_p.clear();
                self.local_p.extend(self.local.iter().map(|&v| ps[v]));
                for mask in 1..total {
                    let mut prod = F::one();
                    for x in 0..w {
                        let mut bits = self.union[mask * w + x];
                        while bits != 0 {
                            let b = bits.trailing_zeros() as usize;
                            prod = prod * self.local_p[x * 64 + b];
                            bits &= bits - 1;
                        }
                    }
                    self.moments[mask] = prod;
                }
            }
        }
    }

    /// Joint moment and `max E[X_i]` of `members` alone, with the same
    /// arithmetic as the full-collection entry of [`fill`](Self::fill).
    pub fn full_only(&mut self, h: &Hypergraph, p: &ProbabilityAssignment<F>, members: &[usize]) -> (F, F) {
        self.local.clear();
        let mut max_single = F::zero();
        for &i in members {
            self.local.extend_from_slice(h.edge(i));
            max_single = max_single.max(p.edge_probability(h.edge(i)));
        }
        self.local.sort_unstable();
        self.local.dedup();
        let moment = match p {
            ProbabilityAssignment::Uniform(q) => {
                let mut acc = F::one();
                for _ in 0..self.local.len() {
                    acc = acc * *q;
                }
                acc
            }
            ProbabilityAssignment::PerVertex(ps) => self.local.iter().fold(F::one(), |a, &v| a * ps[v]),
        };
        (moment, max_single)
    }

    pub fn moments(&self) -> &[F] {
        &self.moments
    }

    /// Joint moment of the whole collection last passed to `fill`.
    pub fn full_moment(&self) -> F {
        *self.moments.last().unwrap()
    }

    /// `max E[X_i]` over the collection last passed to `fill`.
    pub fn max_single(&self) -> F {
        self.max_single
    }
}

/// Joint moment of a collection of edges: product of `p_ω` over the vertex
/// union. Works for arbitrary (also disconnected) collections.
pub fn joint_moment<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>, members: &[usize]) -> F {
    let mut verts: Vec<usize> = members.iter().flat_map(|&i| h.edge(i).iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    p.edge_probability(&verts)
}

/// Joint cumulant of the indicators of `members` by the partition sum.
pub fn joint_cumulant<F: Real + Ring>(
    h: &Hypergraph,
    p: &ProbabilityAssignment<F>,
    members: &[usize],
    cap: usize,
) -> Result<F> {
    let s = members.len();
    if s > cap {
        return Err(Error::CapExceeded {
            what: "cumulant size",
            value: s,
            cap,
        });
    }
    if s == 0 {
        return Ok(F::zero());
    }
    let mut scratch = MomentScratch::new();
    scratch.fill(h, p, members);
    Ok(cumulant_from_moments(&PartitionTable::new(s), scratch.moments()))
}

/// Joint cumulant by the moment-cumulant recursion (second route).
pub fn joint_cumulant_recursive<F: Real + Ring>(
    h: &Hypergraph,
    p: &ProbabilityAssignment<F>,
    members: &[usize],
) -> F {
    if members.is_empty() {
        return F::zero();
    }
    let mut scratch = MomentScratch::new();
    scratch.fill(h, p, members);
    cumulant_recursive(members.len(), scratch.moments())
}

/// Which family of sets a maximum was taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRange {
    /// Every `V ⊆ [N]` with `1 <= |V| <= k`.
    Exhaustive,
    /// Only connected `V`; the value is a lower bound on the true maximum.
    ConnectedOnly,
    /// Sum of the `k` largest singleton values; an upper bound.
    SingletonSum,
}

impl SetRange {
    pub fn as_str(self) -> &'static str {
        match self {
            SetRange::Exhaustive => "exhaustive",
            SetRange::ConnectedOnly => "connected-lower-bound",
            SetRange::SingletonSum => "singleton-sum-upper-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangedValue<F> {
    pub value: F,
    pub range: SetRange,
}

/// Tunables shared by the aggregate computations.
#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    pub cumulant_cap: usize,
    pub cluster_budget: u64,
    /// Largest number of subsets scanned by exhaustive maximisations.
    pub subset_budget: u64,
    pub codegree_budget: u64,
    /// Vertex cap for exact sub-instance evaluations.
    pub m_cap: usize,
    pub shards: usize,
    /// Also compute the exact `ρ` (small instances only).
    pub exact_rho: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            cumulant_cap: DEFAULT_CUMULANT_CAP,
            cluster_budget: DEFAULT_CLUSTER_BUDGET,
            subset_budget: DEFAULT_SUBSET_BUDGET,
            codegree_budget: DEFAULT_CODEGREE_BUDGET,
            m_cap: oracles::DEFAULT_M_CAP,
            shards: 1,
            exact_rho: false,
        }
    }
}

/// `λ(V)`: sum over boundary edges `i` of `E[X_i | X_j = 1 for all j ∈ V]`.
pub fn lambda_of<F: Real>(h: &Hypergraph, g: &DependencyGraph, p: &ProbabilityAssignment<F>, members: &[usize]) -> F {
    let mut scan = SetScanner::new(h);
    scan.lambda(h, g, p, members)
}

struct SetScanner {
    vertex_stamp: Vec<u32>,
    edge_stamp: Vec<u32>,
    gen: u32,
    boundary: Vec<usize>,
}

impl SetScanner {
    fn new(h: &Hypergraph) -> Self {
        Self {
            vertex_stamp: vec![0; h.num_vertices()],
            edge_stamp: vec![0; h.num_edges()],
            gen: 0,
            boundary: Vec::new(),
        }
    }

    fn begin(&mut self, h: &Hypergraph, g: &DependencyGraph, members: &[usize]) {
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.vertex_stamp.iter_mut().for_each(|x| *x = 0);
            self.edge_stamp.iter_mut().for_each(|x| *x = 0);
            self.gen = 1;
        }
        let gen = self.gen;
        for &i in members {
            self.edge_stamp[i] = gen;
            for &v in h.edge(i) {
                self.vertex_stamp[v] = gen;
            }
        }
        self.boundary.clear();
        for &i in members {
            for &j in g.neighbors(i) {
                if self.edge_stamp[j] != gen {
                    self.edge_stamp[j] = gen;
                    self.boundary.push(j);
                }
            }
        }
    }

    fn lambda<F: Real>(&mut self, h: &Hypergraph, g: &DependencyGraph, p: &ProbabilityAssignment<F>, members: &[usize]) -> F {
        self.begin(h, g, members);
        let gen = self.gen;
        let mut acc = CompensatedSum::new();
        for &j in &self.boundary {
            let cond = h
                .edge(j)
                .iter()
                .filter(|&&v| self.vertex_stamp[v] != gen)
                .fold(F::one(), |a, &v| a * p.get(v));
            acc.add(cond);
        }
        acc.value()
    }

    // Σ_{i ∈ V ∪ ∂V} E[X_i], using the state from the last `begin`.
    fn closed_mass<F: Real>(&self, h: &Hypergraph, p: &ProbabilityAssignment<F>, members: &[usize]) -> F {
        let mut acc = CompensatedSum::new();
        for &i in members.iter().chain(&self.boundary) {
            acc.add(p.edge_probability(h.edge(i)));
        }
        acc.value()
    }
}

fn binomial_sum(n: u64, k: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u64 = 1;
    for j in 1..=k as u64 {
        if j > n {
            break;
        }
        c = c.saturating_mul(n - j + 1) / j;
        total = total.saturating_add(c);
    }
    total
}

// Visits every subset of [n] with 1 <= size <= k in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        for i in start..n {
            cur.push(i);
            f(cur);
            if cur.len() < k {
                rec(n, k, i + 1, cur, f);
            }
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(k);
    rec(n, k, 0, &mut cur, &mut f);
}

/// `Λ_i` for `i = 1..=k`. Exhaustive over all subsets when their number
/// fits `opts.subset_budget`; otherwise maximised over clusters only, which
/// still bounds `Δ_{i+1}/Δ_i` and `δ_{i+1}/δ_i` from above.
pub fn lambda_profile<F: Real>(
    h: &Hypergraph,
    g: &DependencyGraph,
    p: &ProbabilityAssignment<F>,
    k: usize,
    opts: &SeriesOptions,
) -> Result<Vec<RangedValue<F>>> {
    let mut best = vec![F::zero(); k];
    let range = if binomial_sum(h.num_edges() as u64, k) <= opts.subset_budget {
        let mut scan = SetScanner::new(h);
        for_each_subset(h.num_edges(), k, |v| {
            let l = scan.lambda(h, g, p, v);
            let slot = &mut best[v.len() - 1];
            if l > *slot {
                *slot = l;
            }
        });
        SetRange::Exhaustive
    } else {
        let cfg = EnumerationConfig {
            k_max: k,
            budget: opts.cluster_budget,
            shards: opts.shards,
        };
        let (b, _) = fold_clusters(
            g,
            &cfg,
            || (SetScanner::new(h), vec![F::zero(); k]),
            |(scan, acc), v| {
                let l = scan.lambda(h, g, p, v);
                let slot = &mut acc[v.len() - 1];
                if l > *slot {
                    *slot = l;
                }
            },
            |(_, a), (_, b)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
            },
        )?;
        best = b.1;
        SetRange::ConnectedOnly
    };
    let mut running = F::zero();
    Ok(best
        .into_iter()
        .map(|b| {
            running = running.max(b);
            RangedValue { value: running, range }
        })
        .collect())
}

/// `Λ_k` alone.
pub fn lambda_k<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>, k: usize, opts: &SeriesOptions) -> Result<RangedValue<F>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let g = DependencyGraph::build(h);
    Ok(*lambda_profile(h, &g, p, k, opts)?.last().unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// Union bound `min(1, Σ_{i ∈ V ∪ ∂V} E[X_i])`, maximised over `V`.
    Surrogate,
    /// `1 - Pr[no X_i fires for i ∈ V ∪ ∂V]`, computed exactly.
    Exact,
}

/// `ρ_k`: the largest probability that some indicator in `V ∪ ∂(V)` fires,
/// over `1 <= |V| <= k`.
pub fn rho_k<F: Real>(
    h: &Hypergraph,
    p: &ProbabilityAssignment<F>,
    k: usize,
    mode: RhoMode,
    opts: &SeriesOptions,
) -> Result<RangedValue<F>> {
    let g = DependencyGraph::build(h);
    rho_with_graph(h, &g, p, k, mode, opts)
}

pub(crate) fn rho_with_graph<F: Real>(
    h: &Hypergraph,
    g: &DependencyGraph,
    p: &ProbabilityAssignment<F>,
    k: usize,
    mode: RhoMode,
    opts: &SeriesOptions,
) -> Result<RangedValue<F>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = h.num_edges();
    let exhaustive = binomial_sum(n as u64, k) <= opts.subset_budget;
    let mut scan = SetScanner::new(h);
    match mode {
        RhoMode::Surrogate if exhaustive => {
            let mut best = F::zero();
            for_each_subset(n, k, |v| {
                scan.begin(h, g, v);
                best = best.max(scan.closed_mass(h, p, v).min(F::one()));
            });
            Ok(RangedValue {
                value: best,
                range: SetRange::Exhaustive,
            })
        }
        RhoMode::Surrogate => {
            // Σ over V ∪ ∂V is at most the sum of the closed-neighbourhood
            // masses of the members of V.
            let mut singles: Vec<F> = (0..n)
                .map(|i| {
                    scan.begin(h, g, &[i]);
                    scan.closed_mass(h, p, &[i])
                })
                .collect();
            singles.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let total = compensated_top(&singles, k);
            Ok(RangedValue {
                value: total.min(F::one()),
                range: SetRange::SingletonSum,
            })
        }
        RhoMode::Exact => {
            if !exhaustive {
                return Err(Error::TooLarge {
                    size: n,
                    max: opts.subset_budget as usize,
                });
            }
            let mut best = F::zero();
            let mut failure = None;
            let mut cache: HashMap<Vec<usize>, F> = HashMap::new();
            for_each_subset(n, k, |v| {
                if failure.is_some() {
                    return;
                }
                scan.begin(h, g, v);
                let mut closed: Vec<usize> = v.iter().chain(&scan.boundary).copied().collect();
                closed.sort_unstable();
                if let Some(&fire) = cache.get(&closed) {
                    best = best.max(fire);
                    return;
                }
                let (sub, verts) = h.induced_by_edges(&closed);
                let sub_p = p.restrict(&verts);
                match oracles::exact_probability(&sub, &sub_p, opts.m_cap) {
                    Ok(none) => {
                        let fire = F::one() - none;
                        best = best.max(fire);
                        cache.insert(closed, fire);
                    }
                    Err(e) => failure = Some(e),
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(RangedValue {
                value: best,
                range: SetRange::Exhaustive,
            })
        }
    }
}

fn compensated_top<F: Real>(sorted_desc: &[F], k: usize) -> F {
    let mut acc = CompensatedSum::new();
    for &x in sorted_desc.iter().take(k) {
        acc.add(x);
    }
    acc.value()
}

/// Weighted maximum codegree and the subset attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct CodegreeStat<F> {
    pub value: F,
    /// Maximising `Ω'` (sorted vertex indices).
    pub subset: Vec<usize>,
    /// Codegree order `j` at the maximum.
    pub j: usize,
}

/// `D(Γ, p) = max_{j >= 1} max_{Ω' ≠ ∅} d_j(Ω') p^j`. Only proper non-empty
/// subsets of edges can have non-zero codegree, so those are the ones
/// enumerated. For per-vertex probabilities `d_j(Ω') p^j` generalises to
/// `Σ_γ Π_{ω ∈ γ \ Ω'} p_ω` over the edges `γ ⊋ Ω'` with `|γ| = |Ω'| + j`.
pub fn codegree_stat<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>, budget: u64) -> Result<CodegreeStat<F>> {
    let mut work: u64 = 0;
    for e in h.edges() {
        if e.len() >= 63 {
            return Err(Error::Overflow {
                budget,
                partial: Vec::new(),
            });
        }
        work = work.saturating_add(1u64 << e.len());
    }
    if work > budget {
        return Err(Error::Overflow {
            budget,
            partial: Vec::new(),
        });
    }
    // (subset, j) -> weight
    let mut table: HashMap<(Vec<usize>, usize), (CompensatedSum<F>, u64)> = HashMap::new();
    for e in h.edges() {
        let r = e.len();
        for mask in 1u64..((1u64 << r) - 1) {
            let mut subset = Vec::with_capacity(mask.count_ones() as usize);
            let mut weight = F::one();
            for (b, &v) in e.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    subset.push(v);
                } else {
                    weight = weight * p.get(v);
                }
            }
            let j = r - subset.len();
            let slot = table.entry((subset, j)).or_insert_with(|| (CompensatedSum::new(), 0));
            slot.0.add(weight);
            slot.1 += 1;
        }
    }
    // uniform p: the weight is d_j(Ω') p^j, evaluated as one product
    let uniform = p.uniform_value();
    let mut best = CodegreeStat {
        value: F::zero(),
        subset: Vec::new(),
        j: 0,
    };
    for ((subset, j), (w, count)) in table {
        let v = match uniform {
            Some(q) => F::from_count(count) * q.powi(j as i32),
            None => w.value(),
        };
        let better = v > best.value
            || (v == best.value
                && (best.subset.is_empty()
                    || (subset.len(), &subset, j) < (best.subset.len(), &best.subset, best.j)));
        if better {
            best = CodegreeStat { value: v, subset, j };
        }
    }
    Ok(best)
}

/// `Δ_1..Δ_s` alone, accumulated exactly as in [`aggregate_series`].
pub fn moment_sums<F: Real>(
    h: &Hypergraph,
    p: &ProbabilityAssignment<F>,
    s: usize,
    opts: &SeriesOptions,
) -> Result<(Vec<F>, ClusterCounts)> {
    crate::model::validate_instance(h, p)?;
    let g = DependencyGraph::build(h);
    let cfg = EnumerationConfig {
        k_max: s,
        budget: opts.cluster_budget,
        shards: opts.shards,
    };
    let (acc, counts) = fold_clusters(
        &g,
        &cfg,
        || (MomentScratch::new(), vec![CompensatedSum::new(); s]),
        |(scratch, sums), members| {
            let (m, _) = scratch.full_only(h, p, members);
            sums[members.len() - 1].add(m);
        },
        |(_, a), (_, b)| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
        },
    )?;
    Ok((acc.1.iter().map(CompensatedSum::value).collect(), counts))
}

/// Aggregates for one instance and truncation order `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerms<F> {
    pub k: usize,
    /// `κ_1..κ_k`.
    pub kappa: Vec<F>,
    /// `Δ_1..Δ_{k+1}`.
    pub big_delta: Vec<F>,
    /// `δ_1..δ_{k+1}`.
    pub small_delta: Vec<F>,
    /// `Λ_1..Λ_k`.
    pub lambda: Vec<RangedValue<F>>,
    /// `ρ_{k+1}` by the union bound.
    pub rho_surrogate: RangedValue<F>,
    pub rho_exact: Option<F>,
    pub codegree: CodegreeStat<F>,
    /// Cluster counts for sizes `1..=k+1`.
    pub cluster_counts: ClusterCounts,
}

impl<F: Real> SeriesTerms<F> {
    pub fn kappa_at(&self, i: usize) -> F {
        self.kappa[i - 1]
    }

    pub fn big_delta_at(&self, i: usize) -> F {
        self.big_delta[i - 1]
    }

    pub fn small_delta_at(&self, i: usize) -> F {
        self.small_delta[i - 1]
    }

    pub fn lambda_at(&self, i: usize) -> F {
        self.lambda[i - 1].value
    }
}

struct SeriesAcc<F> {
    scratch: MomentScratch<F>,
    kappa: Vec<CompensatedSum<F>>,
    big_delta: Vec<CompensatedSum<F>>,
    small_delta: Vec<CompensatedSum<F>>,
}

/// One streaming pass over clusters of sizes `1..=k+1`, plus the
/// diagnostics `Λ`, `ρ` and `D`.
pub fn aggregate_series<F: Real + Ring>(
    h: &Hypergraph,
    p: &ProbabilityAssignment<F>,
    k: usize,
    opts: &SeriesOptions,
) -> Result<SeriesTerms<F>> {
    crate::model::validate_instance(h, p)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > opts.cumulant_cap {
        return Err(Error::CapExceeded {
            what: "cumulant order k",
            value: k,
            cap: opts.cumulant_cap,
        });
    }
    let g = DependencyGraph::build(h);
    let tables: Vec<PartitionTable> = (0..=k).map(PartitionTable::new).collect();
    let cfg = EnumerationConfig {
        k_max: k + 1,
        budget: opts.cluster_budget,
        shards: opts.shards,
    };
    let init = || SeriesAcc {
        scratch: MomentScratch::new(),
        kappa: vec![CompensatedSum::new(); k],
        big_delta: vec![CompensatedSum::new(); k + 1],
        small_delta: vec![CompensatedSum::new(); k + 1],
    };
    let (acc, counts) = fold_clusters(
        &g,
        &cfg,
        init,
        |acc: &mut SeriesAcc<F>, members| {
            let s = members.len();
            if s <= k {
                acc.scratch.fill(h, p, members);
                let kap = cumulant_from_moments(&tables[s], acc.scratch.moments());
                acc.kappa[s - 1].add(kap);
                let full = acc.scratch.full_moment();
                acc.big_delta[s - 1].add(full);
                acc.small_delta[s - 1].add(full * acc.scratch.max_single());
            } else {
                let (full, max_single) = acc.scratch.full_only(h, p, members);
                acc.big_delta[s - 1].add(full);
                acc.small_delta[s - 1].add(full * max_single);
            }
        },
        |a, b| {
            for (x, y) in a.kappa.iter_mut().zip(&b.kappa) {
                x.merge(y);
            }
            for (x, y) in a.big_delta.iter_mut().zip(&b.big_delta) {
                x.merge(y);
            }
            for (x, y) in a.small_delta.iter_mut().zip(&b.small_delta) {
                x.merge(y);
            }
        },
    )?;
    let lambda = lambda_profile(h, &g, p, k, opts)?;
    let rho_surrogate = rho_with_graph(h, &g, p, k + 1, RhoMode::Surrogate, opts)?;
    let rho_exact = if opts.exact_rho {
        Some(rho_with_graph(h, &g, p, k + 1, RhoMode::Exact, opts)?.value)
    } else {
        None
    };
    let codegree = codegree_stat(h, p, opts.codegree_budget)?;
    Ok(SeriesTerms {
        k,
        kappa: acc.kappa.iter().map(CompensatedSum::value).collect(),
        big_delta: acc.big_delta.iter().map(CompensatedSum::value).collect(),
        small_delta: acc.small_delta.iter().map(CompensatedSum::value).collect(),
        lambda,
        rho_surrogate,
        rho_exact,
        codegree,
        cluster_counts: counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn k4_triangles() -> Hypergraph {
        Hypergraph::new(6, vec![vec![0, 1, 3], vec![0, 2, 4], vec![1, 2, 5], vec![3, 4, 5]]).unwrap()
    }

    #[test]
    fn moment_examples() {
        let tri = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(joint_moment(&tri, &ProbabilityAssignment::Uniform(0.5), &[0]), 0.125);
        let h = k4_triangles();
        let p = 0.3f64;
        let m = joint_moment(&h, &ProbabilityAssignment::Uniform(p), &[0, 1]);
        assert!((m - p.powi(5)).abs() < 1e-16);
        let aps = Hypergraph::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let m = joint_moment(&aps, &ProbabilityAssignment::Uniform(p), &[0, 1]);
        assert!((m - p.powi(6)).abs() < 1e-16);
    }

    #[test]
    fn cumulant_examples() {
        let h = k4_triangles();
        let p = ProbabilityAssignment::Uniform(0.3f64);
        let single = joint_cumulant(&h, &p, &[2], 8).unwrap();
        assert!((single - 0.3f64.powi(3)).abs() < 1e-16);
        let pair = joint_cumulant(&h, &p, &[0, 1], 8).unwrap();
        assert!((pair - (0.3f64.powi(5) - 0.3f64.powi(6))).abs() < 1e-16);
        let disjoint = Hypergraph::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(joint_cumulant(&disjoint, &p, &[0, 1], 8).unwrap().abs() < 1e-18);
        assert!(matches!(
            joint_cumulant(&h, &p, &[0, 1, 2], 2),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn exact_rational_cumulant_matches_closed_form() {
        // three variables: E[XYZ] - E[X]E[YZ] - E[Y]E[XZ] - E[Z]E[XY] + 2E[X]E[Y]E[Z]
        let x = Ratio::new(1i128, 7);
        let moments: Vec<Ratio<i128>> = vec![
            Ratio::from_integer(1),
            x,
            x * x,
            x * x * x,
            x * x,
            x * x * x * x,
            x * x * x,
            x.pow(5),
        ];
        let direct = moments[7] - moments[1] * moments[6] - moments[2] * moments[5] - moments[4] * moments[3]
            + Ratio::from_integer(2) * moments[1] * moments[2] * moments[4];
        assert_eq!(cumulant_from_moments(&PartitionTable::new(3), &moments), direct);
        assert_eq!(cumulant_recursive(3, &moments), direct);
    }

    #[test]
    fn aggregate_k4() {
        let h = k4_triangles();
        let p = 0.2f64;
        let s = aggregate_series(&h, &ProbabilityAssignment::Uniform(p), 1, &SeriesOptions::default()).unwrap();
        assert!((s.kappa_at(1) - 4.0 * p.powi(3)).abs() < 1e-15);
        assert!((s.big_delta_at(2) - 6.0 * p.powi(5)).abs() < 1e-15);
        let single = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let s = aggregate_series(&single, &ProbabilityAssignment::Uniform(p), 2, &SeriesOptions::default()).unwrap();
        assert_eq!(s.kappa_at(2), 0.0);
        assert_eq!(s.big_delta_at(2), 0.0);
    }

    #[test]
    fn lambda_examples() {
        let h = k4_triangles();
        let g = DependencyGraph::build(&h);
        let p = 0.25f64;
        let l = lambda_of(&h, &g, &ProbabilityAssignment::Uniform(p), &[0]);
        assert!((l - 3.0 * p * p).abs() < 1e-16);
        let disjoint = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = DependencyGraph::build(&disjoint);
        assert_eq!(lambda_of(&disjoint, &g, &ProbabilityAssignment::Uniform(p), &[0, 1]), 0.0);
    }

    #[test]
    fn rho_examples() {
        let single = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let p = ProbabilityAssignment::Uniform(0.4f64);
        let opts = SeriesOptions::default();
        let exact = rho_k(&single, &p, 1, RhoMode::Exact, &opts).unwrap();
        assert!((exact.value - 0.064).abs() < 1e-15);
        let sur = rho_k(&single, &p, 1, RhoMode::Surrogate, &opts).unwrap();
        assert!(sur.value >= exact.value - 1e-15);
    }

    #[test]
    fn codegree_examples() {
        let single = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let d = codegree_stat(&single, &ProbabilityAssignment::Uniform(0.3f64), u64::MAX).unwrap();
        assert!((d.value - 0.3).abs() < 1e-16);
        assert_eq!(d.j, 1);
        assert_eq!(d.subset.len(), 2);
    }

    #[test]
    fn subset_enumeration_counts() {
        let mut n = 0;
        for_each_subset(6, 3, |_| n += 1);
        assert_eq!(n, 6 + 15 + 20);
        assert_eq!(binomial_sum(6, 3), 41);
    }
}
