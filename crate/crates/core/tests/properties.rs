use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use cumseries::clusters::{count_clusters, enumerate_clusters, naive_clusters, DEFAULT_CLUSTER_BUDGET};
use cumseries::cumulants::{
    aggregate_series, joint_cumulant, joint_cumulant_recursive, joint_moment, SeriesOptions, SetRange,
};
use cumseries::estimator::{harris_lower, janson_upper, series_estimate, truncated_log};
use cumseries::generators::{binomial, family_stats, gen_aps, SmallRGraph};
use cumseries::oracles::{exact_probability, independence_profile, log_exact_probability, monte_carlo, DEFAULT_M_CAP};
use cumseries::{DependencyGraph, Hypergraph, Probabilities};

/// Hypergraph on `3..=max_m` vertices with up to `max_n` distinct edges of
/// size `1..=3`.
fn hypergraph(max_m: usize, max_n: usize) -> impl Strategy<Value = Hypergraph> {
    (3..=max_m).prop_flat_map(move |m| {
        prop::collection::vec(prop::collection::btree_set(0..m, 1..=3), 1..=max_n).prop_map(move |sets| {
            let mut edges: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
            edges.sort();
            edges.dedup();
            Hypergraph::new(m, edges).unwrap()
        })
    })
}

fn with_probabilities(max_m: usize, max_n: usize) -> impl Strategy<Value = (Hypergraph, Probabilities)> {
    hypergraph(max_m, max_n).prop_flat_map(|h| {
        let m = h.num_vertices();
        let per_vertex = prop::collection::vec(0.02f64..0.9, m).prop_map(Probabilities::PerVertex);
        let uniform = (0.02f64..0.9).prop_map(Probabilities::Uniform);
        (Just(h), prop_oneof![uniform, per_vertex])
    })
}

fn sorted(mut v: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dependency_graph_matches_predicate(h in hypergraph(30, 200)) {
        let g = DependencyGraph::build(&h);
        prop_assert_eq!(&g, &DependencyGraph::build_pairwise(&h));
        for i in 0..h.num_edges() {
            for j in 0..h.num_edges() {
                let meet = i != j && h.edge(i).iter().any(|v| h.edge(j).contains(v));
                prop_assert_eq!(g.adjacent(i, j), meet);
            }
        }
    }

    #[test]
    fn boundary_is_outside_and_adjacent(h in hypergraph(12, 20), pick in prop::collection::vec(any::<bool>(), 20)) {
        let g = DependencyGraph::build(&h);
        let members: Vec<usize> = (0..h.num_edges()).filter(|&i| pick[i]).collect();
        for b in g.boundary(&members) {
            prop_assert!(!members.contains(&b));
            prop_assert!(members.iter().any(|&i| g.adjacent(i, b)));
        }
    }

    #[test]
    fn clusters_match_naive(h in hypergraph(10, 12)) {
        let g = DependencyGraph::build(&h);
        let k = h.num_edges();
        let mut fast = Vec::new();
        let counts = enumerate_clusters(&g, k, DEFAULT_CLUSTER_BUDGET, |c| fast.push(c.to_vec())).unwrap();
        for c in &fast {
            prop_assert!(g.is_connected(c));
        }
        let (slow, slow_counts) = naive_clusters(&g, k).unwrap();
        prop_assert_eq!(sorted(fast), sorted(slow));
        prop_assert_eq!(counts, slow_counts);
    }

    #[test]
    fn cluster_counts_ignore_edge_order(h in hypergraph(10, 12), seed in any::<u64>()) {
        let mut edges = h.edges().to_vec();
        // deterministic shuffle from the seed
        let mut state = seed;
        for i in (1..edges.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            edges.swap(i, (state >> 33) as usize % (i + 1));
        }
        let shuffled = Hypergraph::new(h.num_vertices(), edges).unwrap();
        let k = 4.min(h.num_edges());
        let a = count_clusters(&DependencyGraph::build(&h), k, DEFAULT_CLUSTER_BUDGET).unwrap();
        let b = count_clusters(&DependencyGraph::build(&shuffled), k, DEFAULT_CLUSTER_BUDGET).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cumulant_routes_agree((h, p) in with_probabilities(8, 8)) {
        let g = DependencyGraph::build(&h);
        let mut clusters = Vec::new();
        enumerate_clusters(&g, 5, DEFAULT_CLUSTER_BUDGET, |c| clusters.push(c.to_vec())).unwrap();
        for c in clusters {
            let a = joint_cumulant(&h, &p, &c, 8).unwrap();
            let b = joint_cumulant_recursive(&h, &p, &c);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) + 1e-15, "{:?}: {} vs {}", c, a, b);
        }
    }

    #[test]
    fn fkg_lattice_condition((h, p) in with_probabilities(10, 12), pairs in prop::collection::vec((any::<u16>(), any::<u16>()), 1000)) {
        let n = h.num_edges();
        let set = |mask: u16| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>();
        let moment = |mask: u16| if mask == 0 { 1.0 } else { joint_moment(&h, &p, &set(mask)) };
        let full = ((1u32 << n) - 1) as u16;
        for (u, v) in pairs {
            let (u, v) = (u & full, v & full);
            let lhs = moment(u) * moment(v);
            let rhs = moment(u | v) * moment(u & v);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{} > {}", lhs, rhs);
        }
    }

    #[test]
    fn harris_for_monotone_pairs((h, p) in with_probabilities(12, 12), s in any::<u16>(), t in any::<u16>()) {
        // X = "some edge of S is present", Y likewise for T; both increasing
        let avoid = |mask: u16| {
            let sub = h.retain_edges(|i| mask >> i & 1 == 1);
            exact_probability(&sub, &p, DEFAULT_M_CAP).unwrap()
        };
        let (not_x, not_y, neither) = (avoid(s), avoid(t), avoid(s | t));
        let exy = 1.0 - not_x - not_y + neither;
        prop_assert!(exy >= (1.0 - not_x) * (1.0 - not_y) - 1e-12);
    }

    #[test]
    fn sandwich_contains_exact((h, p) in with_probabilities(14, 16)) {
        let exact = log_exact_probability(&h, &p, DEFAULT_M_CAP).unwrap();
        let lower = harris_lower(&h, &p).unwrap();
        let upper = janson_upper(&h, &p, &SeriesOptions::default()).unwrap();
        prop_assert!(lower <= exact + 1e-12 && exact <= upper + 1e-12, "{} {} {}", lower, exact, upper);
        let (lo, hi, mid) = (lower.exp(), upper.exp(), exact.exp());
        prop_assert!(lo <= mid + 1e-12 && mid <= hi + 1e-12);
    }

    #[test]
    fn first_order_matches_janson((h, p) in with_probabilities(12, 16)) {
        let r = series_estimate(&h, &p, 1, &SeriesOptions::default()).unwrap();
        prop_assert_eq!(truncated_log(&r.kappa) + r.big_delta[1], r.janson_log);
    }

    #[test]
    fn budget_shrinks_under_edge_deletion((h, p) in with_probabilities(12, 16), drop in any::<prop::sample::Index>()) {
        let opts = SeriesOptions::default();
        let before = series_estimate(&h, &p, 2, &opts).unwrap();
        let gone = drop.index(h.num_edges());
        let smaller = h.retain_edges(|i| i != gone);
        prop_assume!(smaller.num_edges() > 0);
        let after = series_estimate(&smaller, &p, 2, &opts).unwrap();
        let tol = 1.0 + 1e-12;
        prop_assert!(before.error_budget >= 0.0);
        prop_assert!(after.error_budget <= before.error_budget * tol);
        prop_assert!(after.big_delta[2] <= before.big_delta[2] * tol);
        prop_assert!(after.small_delta[0] <= before.small_delta[0] * tol);
    }

    #[test]
    fn delta_growth_bounded_by_lambda((h, p) in with_probabilities(10, 15)) {
        let s = aggregate_series(&h, &p, 3, &SeriesOptions::default()).unwrap();
        prop_assume!(s.lambda.iter().all(|l| l.range == SetRange::Exhaustive));
        let tol = 1.0 + 1e-12;
        for i in 1..=3 {
            let l = s.lambda_at(i);
            prop_assert!(s.big_delta_at(i + 1) <= s.big_delta_at(i) * l * tol);
            prop_assert!(s.small_delta_at(i + 1) <= s.small_delta_at(i) * l * tol);
        }
    }

    #[test]
    fn profile_at_one_half_counts_independent_sets(h in hypergraph(14, 16)) {
        let m = h.num_vertices();
        let independent = (0u32..1 << m)
            .filter(|s| h.edges().iter().all(|e| e.iter().any(|&v| s >> v & 1 == 0)))
            .count();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let got = independence_profile(&h, DEFAULT_M_CAP).unwrap().probability_rational(&half);
        prop_assert_eq!(got, BigRational::new(BigInt::from(independent), BigInt::from(1u64 << m)));
    }

    #[test]
    fn dense_members_are_bounded_by_twice_the_density(edges in prop::collection::btree_set((0usize..6, 0usize..6), 2..10)) {
        let mut pairs: Vec<Vec<usize>> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| vec![a.min(b), a.max(b)])
            .collect();
        pairs.sort();
        pairs.dedup();
        prop_assume!(pairs.len() >= 2);
        // compact the labels so no vertex is isolated
        let mut used: Vec<usize> = pairs.iter().flatten().copied().collect();
        used.sort();
        used.dedup();
        let pairs: Vec<Vec<usize>> = pairs
            .iter()
            .map(|e| e.iter().map(|v| used.binary_search(v).unwrap()).collect())
            .collect();
        let f = SmallRGraph::new(2, used.len(), pairs).unwrap();
        let stats = family_stats(std::slice::from_ref(&f)).unwrap();
        let m_star = stats.m_star.finite().unwrap();
        prop_assert!(m_star <= stats.d * 2);
        let member = &stats.members[0];
        if member.is_r_balanced {
            prop_assert_eq!(Some(m_star), member.m_r);
        }
    }
}

#[test]
fn ap_count_matches_closed_form() {
    for n in 1..=200u64 {
        let d = n.saturating_sub(1) / 2;
        let h = gen_aps(n as usize, 3).unwrap();
        assert_eq!(h.num_edges() as u64, d * n - d * (d + 1), "n = {n}");
        let direct = (1..=n).flat_map(|a| (1..=n).map(move |s| (a, s))).filter(|&(a, s)| a + 2 * s <= n).count();
        assert_eq!(h.num_edges(), direct);
    }
    assert_eq!(binomial(28, 14), 40_116_600);
}

#[test]
fn monte_carlo_interval_coverage() {
    let h = cumseries::generators::gen_subgraph_copies(&[SmallRGraph::triangle()], 5).unwrap().hypergraph;
    let p = Probabilities::Uniform(0.3);
    let exact = exact_probability(&h, &p, DEFAULT_M_CAP).unwrap();
    let covered = (0..200u64)
        .filter(|&seed| {
            let r = monte_carlo(&h, &p, 2000, seed, 1).unwrap();
            r.lower <= exact && exact <= r.upper
        })
        .count();
    assert!(covered >= 193, "covered {covered} of 200");
}
