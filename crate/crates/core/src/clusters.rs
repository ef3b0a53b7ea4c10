//! Enumeration of clusters: connected induced subgraphs of the dependency
//! graph with at most `k_max` nodes.
//!
//! Every cluster is grown from its least member `v`. A partial cluster
//! carries an extension set of candidates larger than `v`; adding a
//! candidate `w` only admits neighbours of `w` that are outside the closed
//! neighbourhood of the current cluster. This discipline produces every
//! connected set exactly once without a global seen-set.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::DependencyGraph;

/// Default cap on the total number of emitted clusters.
pub const DEFAULT_CLUSTER_BUDGET: u64 = 100_000_000;

/// Largest graph accepted by [`naive_clusters`].
pub const NAIVE_MAX_NODES: usize = 20;

/// Number of clusters per size; index `s - 1` holds the count for size `s`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClusterCounts(pub Vec<u64>);

impl ClusterCounts {
    pub fn new(k_max: usize) -> Self {
        Self(vec![0; k_max])
    }

    pub fn of_size(&self, s: usize) -> u64 {
        self.0.get(s - 1).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    fn add(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }
}

/// Enumeration settings.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationConfig {
    pub k_max: usize,
    pub budget: u64,
    /// Number of deterministic shards; roots `v` with `v % shards == s` go
    /// to shard `s`.
    pub shards: usize,
}

impl EnumerationConfig {
    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            budget: DEFAULT_CLUSTER_BUDGET,
            shards: 1,
        }
    }
}

struct Budget<'a> {
    used: &'a AtomicU64,
    limit: u64,
}

impl Budget<'_> {
    #[inline]
    fn take(&self) -> bool {
        self.used.fetch_add(1, Ordering::Relaxed) < self.limit
    }
}

/// Streams every cluster of size `1..=k_max` to `visit` as a sorted slice.
/// Returns per-size counts.
pub fn enumerate_clusters<V>(g: &DependencyGraph, k_max: usize, budget: u64, mut visit: V) -> Result<ClusterCounts>
where
    V: FnMut(&[usize]),
{
    check_k(k_max)?;
    let used = AtomicU64::new(0);
    let budget_ref = Budget {
        used: &used,
        limit: budget,
    };
    let mut counts = ClusterCounts::new(k_max);
    let ok = if g.len() <= 64 {
        let masks = neighbor_masks(g);
        (0..g.len()).all(|v| grow_masks(&masks, v, k_max, &budget_ref, &mut counts, &mut visit))
    } else {
        let mut state = ListState::new(g.len());
        (0..g.len()).all(|v| state.grow_root(g, v, k_max, &budget_ref, &mut counts, &mut visit))
    };
    if ok {
        Ok(counts)
    } else {
        Err(Error::Overflow {
            budget,
            partial: counts.0,
        })
    }
}

/// Same contract as [`enumerate_clusters`], always through the sorted-list
/// representation regardless of graph size.
pub fn enumerate_clusters_list<V>(g: &DependencyGraph, k_max: usize, budget: u64, mut visit: V) -> Result<ClusterCounts>
where
    V: FnMut(&[usize]),
{
    check_k(k_max)?;
    let used = AtomicU64::new(0);
    let budget_ref = Budget {
        used: &used,
        limit: budget,
    };
    let mut counts = ClusterCounts::new(k_max);
    let mut state = ListState::new(g.len());
    let ok = (0..g.len()).all(|v| state.grow_root(g, v, k_max, &budget_ref, &mut counts, &mut visit));
    if ok {
        Ok(counts)
    } else {
        Err(Error::Overflow {
            budget,
            partial: counts.0,
        })
    }
}

/// Sharded fold over all clusters. Each shard folds its roots into a fresh
/// accumulator; shard results are merged in shard order, so the outcome is
/// independent of thread scheduling for a fixed shard count.
pub fn fold_clusters<A, I, F, M>(
    g: &DependencyGraph,
    cfg: &EnumerationConfig,
    init: I,
    fold: F,
    merge: M,
) -> Result<(A, ClusterCounts)>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &[usize]) + Sync,
    M: Fn(&mut A, A),
{
    check_k(cfg.k_max)?;
    let shards = cfg.shards.max(1);
    let used = AtomicU64::new(0);
    let masks = (g.len() <= 64).then(|| neighbor_masks(g));
    let results: Vec<(A, ClusterCounts, bool)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let budget = Budget {
                used: &used,
                limit: cfg.budget,
            };
            let mut acc = init();
            let mut counts = ClusterCounts::new(cfg.k_max);
            let mut visit = |c: &[usize]| fold(&mut acc, c);
            let roots = (s..g.len()).step_by(shards);
            let ok = match &masks {
                Some(m) => {
                    let mut ok = true;
                    for v in roots {
                        if !grow_masks(m, v, cfg.k_max, &budget, &mut counts, &mut visit) {
                            ok = false;
                            break;
                        }
                    }
                    ok
                }
                None => {
                    let mut state = ListState::new(g.len());
                    let mut ok = true;
                    for v in roots {
                        if !state.grow_root(g, v, cfg.k_max, &budget, &mut counts, &mut visit) {
                            ok = false;
                            break;
                        }
                    }
                    ok
                }
            };
            (acc, counts, ok)
        })
        .collect();
    let mut total = ClusterCounts::new(cfg.k_max);
    let mut all_ok = true;
    let mut merged: Option<A> = None;
    for (acc, counts, ok) in results {
        total.add(&counts);
        all_ok &= ok;
        match &mut merged {
            None => merged = Some(acc),
            Some(m) => merge(m, acc),
        }
    }
    if !all_ok {
        return Err(Error::Overflow {
            budget: cfg.budget,
            partial: total.0,
        });
    }
    Ok((merged.unwrap_or_else(init), total))
}

/// Per-size cluster counts only.
pub fn count_clusters(g: &DependencyGraph, k_max: usize, budget: u64) -> Result<ClusterCounts> {
    enumerate_clusters(g, k_max, budget, |_| {})
}

fn check_k(k_max: usize) -> Result<()> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    Ok(())
}

fn neighbor_masks(g: &DependencyGraph) -> Vec<u64> {
    (0..g.len())
        .map(|i| g.neighbors(i).iter().fold(0u64, |m, &j| m | (1 << j)))
        .collect()
}

fn emit_mask<V: FnMut(&[usize])>(sub: u64, buf: &mut Vec<usize>, visit: &mut V) {
    buf.clear();
    let mut m = sub;
    while m != 0 {
        buf.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    visit(buf);
}

fn grow_masks<V: FnMut(&[usize])>(
    nbr: &[u64],
    root: usize,
    k_max: usize,
    budget: &Budget<'_>,
    counts: &mut ClusterCounts,
    visit: &mut V,
) -> bool {
    // candidates must exceed the root
    let above = if root == 63 { 0 } else { !0u64 << (root + 1) };
    let sub = 1u64 << root;
    let closed = sub | nbr[root];
    let ext = nbr[root] & above;
    let mut buf = Vec::with_capacity(k_max);
    extend_masks(nbr, above, sub, closed, ext, 1, k_max, budget, counts, visit, &mut buf)
}

#[allow(clippy::too_many_arguments)]
fn extend_masks<V: FnMut(&[usize])>(
    nbr: &[u64],
    above: u64,
    sub: u64,
    closed: u64,
    mut ext: u64,
    size: usize,
    k_max: usize,
    budget: &Budget<'_>,
    counts: &mut ClusterCounts,
    visit: &mut V,
    buf: &mut Vec<usize>,
) -> bool {
    if !budget.take() {
        return false;
    }
    counts.0[size - 1] += 1;
    emit_mask(sub, buf, visit);
    if size == k_max {
        return true;
    }
    while ext != 0 {
        let w = ext.trailing_zeros() as usize;
        ext &= ext - 1;
        let exclusive = nbr[w] & !closed & above;
        if !extend_masks(
            nbr,
            above,
            sub | (1 << w),
            closed | nbr[w],
            ext | exclusive,
            size + 1,
            k_max,
            budget,
            counts,
            visit,
            buf,
        ) {
            return false;
        }
    }
    true
}

struct ListState {
    // multiplicity of each node in the closed neighbourhood of the cluster
    closed: Vec<u32>,
    sub: Vec<usize>,
    sorted: Vec<usize>,
}

impl ListState {
    fn new(n: usize) -> Self {
        Self {
            closed: vec![0; n],
            sub: Vec::new(),
            sorted: Vec::new(),
        }
    }

    fn mark(&mut self, g: &DependencyGraph, w: usize, delta: i32) {
        let apply = |c: &mut u32| *c = (*c as i32 + delta) as u32;
        apply(&mut self.closed[w]);
        for &u in g.neighbors(w) {
            apply(&mut self.closed[u]);
        }
    }

    fn grow_root<V: FnMut(&[usize])>(
        &mut self,
        g: &DependencyGraph,
        root: usize,
        k_max: usize,
        budget: &Budget<'_>,
        counts: &mut ClusterCounts,
        visit: &mut V,
    ) -> bool {
        self.sub.clear();
        self.sub.push(root);
        self.mark(g, root, 1);
        let ext: Vec<usize> = g.neighbors(root).iter().copied().filter(|&u| u > root).collect();
        let ok = self.extend(g, root, ext, k_max, budget, counts, visit);
        self.mark(g, root, -1);
        ok
    }

    #[allow(clippy::too_many_arguments)]
    fn extend<V: FnMut(&[usize])>(
        &mut self,
        g: &DependencyGraph,
        root: usize,
        mut ext: Vec<usize>,
        k_max: usize,
        budget: &Budget<'_>,
        counts: &mut ClusterCounts,
        visit: &mut V,
    ) -> bool {
        if !budget.take() {
            return false;
        }
        counts.0[self.sub.len() - 1] += 1;
        self.sorted.clear();
        self.sorted.extend_from_slice(&self.sub);
        self.sorted.sort_unstable();
        visit(&self.sorted);
        if self.sub.len() == k_max {
            return true;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            next.extend(
                g.neighbors(w)
                    .iter()
                    .copied()
                    .filter(|&u| u > root && self.closed[u] == 0),
            );
            self.sub.push(w);
            self.mark(g, w, 1);
            let ok = self.extend(g, root, next, k_max, budget, counts, visit);
            self.mark(g, w, -1);
            self.sub.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Test oracle: checks every subset of size `<= k_max` for connectivity by
/// BFS. Clusters are returned sorted by size, then lexicographically.
pub fn naive_clusters(g: &DependencyGraph, k_max: usize) -> Result<(Vec<Vec<usize>>, ClusterCounts)> {
    check_k(k_max)?;
    let n = g.len();
    if n > NAIVE_MAX_NODES {
        return Err(Error::TooLarge {
            size: n,
            max: NAIVE_MAX_NODES,
        });
    }
    let mut out = Vec::new();
    let mut counts = ClusterCounts::new(k_max);
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > k_max {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if g.is_connected(&members) {
            counts.0[size - 1] += 1;
            out.push(members);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok((out, counts))
}
