//! Quick invariant checks on built-in instances, cheap enough to run from
//! the command line.

use crate::clusters::{enumerate_clusters, naive_clusters, DEFAULT_CLUSTER_BUDGET};
use crate::cumulants::{aggregate_series, joint_cumulant, joint_cumulant_recursive, SeriesOptions};
use crate::estimator::series_estimate;
use crate::generators::{gen_aps, gen_subgraph_copies, SmallRGraph};
use crate::model::{DependencyGraph, Hypergraph, ProbabilityAssignment};
use crate::oracles::{exact_probability, independence_profile, naive_profile, DEFAULT_M_CAP};
use crate::symbolic::{automorphism_count, symbolic_kappa};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

fn triangles(n: usize) -> Result<Hypergraph> {
    Ok(gen_subgraph_copies(&[SmallRGraph::triangle()], n)?.hypergraph)
}

pub fn run() -> Result<Vec<Check>> {
    let opts = SeriesOptions::default();
    let mut out = Vec::new();
    let k5 = triangles(5)?;
    let g = DependencyGraph::build(&k5);

    let mut fast: Vec<Vec<usize>> = Vec::new();
    enumerate_clusters(&g, 3, DEFAULT_CLUSTER_BUDGET, |c| fast.push(c.to_vec()))?;
    fast.sort();
    let (mut slow, _) = naive_clusters(&g, 3)?;
    slow.sort();
    out.push(check("clusters-match-naive", fast == slow, format!("{} clusters", fast.len())));

    let p = ProbabilityAssignment::Uniform(0.37f64);
    let worst = fast
        .iter()
        .map(|c| {
            let a = joint_cumulant(&k5, &p, c, 8)?;
            let b = joint_cumulant_recursive(&k5, &p, c);
            Ok((a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(check("cumulant-routes-agree", worst <= 1e-10, format!("max relative gap {worst:e}")));

    let aps = gen_aps(12, 3)?;
    let same = independence_profile(&aps, DEFAULT_M_CAP)? == naive_profile(&aps)?;
    out.push(check("profile-matches-naive", same, "3-APs in [12]"));

    let p = ProbabilityAssignment::Uniform(0.1f64);
    let exact = exact_probability(&k5, &p, DEFAULT_M_CAP)?.ln();
    let rep = series_estimate(&k5, &p, 3, &opts)?;
    out.push(check(
        "harris-janson-sandwich",
        rep.harris_log <= exact && exact <= rep.janson_log,
        format!("{} <= {} <= {}", rep.harris_log, exact, rep.janson_log),
    ));
    let err = (rep.log_estimate - exact).abs();
    out.push(check(
        "series-within-budget",
        err <= 10.0 * rep.error_budget,
        format!("|L_3 - log exact| = {err:e}, budget {:e}", rep.error_budget),
    ));

    let terms = aggregate_series(&k5, &p, 3, &opts)?;
    let lemma = (1..=3).all(|i| {
        let l = terms.lambda_at(i);
        terms.big_delta_at(i + 1) <= terms.big_delta_at(i) * l * (1.0 + 1e-12)
            && terms.small_delta_at(i + 1) <= terms.small_delta_at(i) * l * (1.0 + 1e-12)
    });
    out.push(check("delta-ratio-bounded-by-lambda", lemma, "K5 triangles, k <= 3"));

    let sym = symbolic_kappa(&[SmallRGraph::triangle()], 3)?;
    let k6 = triangles(6)?;
    let num = aggregate_series(&k6, &ProbabilityAssignment::Uniform(0.2f64), 3, &opts)?;
    let gap = (0..3)
        .map(|i| {
            let s = sym[i].eval(6, 0.2);
            (s - num.kappa[i]).abs() / s.abs()
        })
        .fold(0.0, f64::max);
    out.push(check("symbolic-matches-numeric", gap <= 1e-10, format!("max relative gap {gap:e}")));

    let auts = (
        automorphism_count(&SmallRGraph::triangle().as_complex(0))?,
        automorphism_count(&SmallRGraph::four_cycle().as_complex(0))?,
    );
    out.push(check("automorphism-counts", auts == (6, 8), format!("{auts:?}")));

    let disjoint = Hypergraph::new(9, vec![vec![0, 1, 2], vec![1, 2, 3], vec![5, 6, 7], vec![6, 7, 8]])?;
    let kap = joint_cumulant(&disjoint, &ProbabilityAssignment::Uniform(0.3f64), &[0, 1, 2, 3], 8)?;
    out.push(check("decomposable-cumulant-vanishes", kap.abs() <= 1e-12, format!("{kap:e}")));
    Ok(out)
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
