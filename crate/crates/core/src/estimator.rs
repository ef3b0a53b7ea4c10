//! Truncated cumulant-series estimate of `Pr[X = 0]` together with the
//! classical product lower bound and the Janson upper bound.

use crate::clusters::ClusterCounts;
use crate::cumulants::{aggregate_series, codegree_stat, moment_sums, rho_k, CodegreeStat, RangedValue, RhoMode, SeriesOptions};
use crate::error::Result;
use crate::generators::FamilyStats;
use crate::model::{validate_instance, Hypergraph, ProbabilityAssignment};
use crate::scalar::{CompensatedSum, Real, Ring};

/// `Σ_i ln(1 - E[X_i])`, the log of the product lower bound.
pub fn harris_lower<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>) -> Result<F> {
    validate_instance(h, p)?;
    let mut acc = CompensatedSum::new();
    for e in h.edges() {
        acc.add((-p.edge_probability(e)).ln_1p());
    }
    Ok(acc.value())
}

/// `-Δ_1 + Δ_2`, the log of the Janson upper bound.
pub fn janson_upper<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>, opts: &SeriesOptions) -> Result<F> {
    let (sums, _) = moment_sums(h, p, 2, opts)?;
    Ok(-sums[0] + sums[1])
}

/// A labelled magnitude gating one of the approximation regimes. Values are
/// reported as numbers, never as verdicts: asymptotic hypotheses cannot be
/// decided at a single `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    /// Which regime the quantity gates.
    pub gate: &'static str,
    pub quantity: String,
    pub value: f64,
}

impl Diagnostic {
    fn new(gate: &'static str, quantity: impl Into<String>, value: f64) -> Self {
        Self {
            gate,
            quantity: quantity.into(),
            value,
        }
    }
}

pub const GATE_SERIES: &str = "general-series";
pub const GATE_CODEGREE: &str = "bounded-codegree";
pub const GATE_FAMILY: &str = "forbidden-family";
pub const GATE_BALANCED: &str = "balanced-member";
pub const GATE_PROGRESSIONS: &str = "progressions";

/// What the instance was generated from, if anything.
#[derive(Debug, Clone, Copy)]
pub enum FamilyContext<'a> {
    None,
    Subgraphs { n: usize, stats: &'a FamilyStats },
    Progressions { n: usize, r: usize },
}

/// Instance-level magnitudes (`max p`, `ρ`, `D`) when `h` is given, and
/// family-level ones from `family`.
pub fn diagnose<F: Real>(
    h: Option<&Hypergraph>,
    p: &ProbabilityAssignment<F>,
    family: FamilyContext<'_>,
    k: usize,
    opts: &SeriesOptions,
) -> Result<Vec<Diagnostic>> {
    let max_p = p.max_value().as_f64();
    let mut out = vec![Diagnostic::new(GATE_SERIES, "max_p", max_p)];
    if let Some(h) = h {
        validate_instance(h, p)?;
        let rho = rho_k(h, p, k + 1, RhoMode::Surrogate, opts)?;
        out.push(Diagnostic::new(
            GATE_SERIES,
            format!("rho_surrogate[{}]", rho.range.as_str()),
            rho.value.as_f64(),
        ));
        let d = codegree_stat(h, p, opts.codegree_budget)?;
        out.push(Diagnostic::new(GATE_CODEGREE, "D", d.value.as_f64()));
    }
    out.push(Diagnostic::new(GATE_CODEGREE, "max_p", max_p));
    match family {
        FamilyContext::None => {}
        FamilyContext::Subgraphs { n, stats } => {
            let n = n as f64;
            let d = *stats.d.numer() as f64 / *stats.d.denom() as f64;
            out.push(Diagnostic::new(
                GATE_FAMILY,
                format!("n*p^m_star (m_star={})", stats.m_star),
                n * max_p.powf(stats.m_star.as_f64()),
            ));
            out.push(Diagnostic::new(
                GATE_FAMILY,
                format!("n*p^(2d) (d={}/{})", stats.d.numer(), stats.d.denom()),
                n * max_p.powf(2.0 * d),
            ));
            for (i, m) in stats.members.iter().enumerate() {
                if let Some(mr) = m.m_r {
                    let mr_f = *mr.numer() as f64 / *mr.denom() as f64;
                    out.push(Diagnostic::new(
                        GATE_BALANCED,
                        format!("p*n^(1/m_r) member {i} (m_r={}/{})", mr.numer(), mr.denom()),
                        max_p * n.powf(1.0 / mr_f),
                    ));
                }
            }
        }
        FamilyContext::Progressions { n, r } => {
            out.push(Diagnostic::new(
                GATE_PROGRESSIONS,
                format!("p*n^(1/(r-1)) (r={r})"),
                max_p * (n as f64).powf(1.0 / (r as f64 - 1.0)),
            ));
        }
    }
    Ok(out)
}

/// Everything reported for one `(instance, p, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport<F> {
    pub k: usize,
    /// `κ_1..κ_k`.
    pub kappa: Vec<F>,
    /// `Δ_1..Δ_{k+1}`.
    pub big_delta: Vec<F>,
    /// `δ_1..δ_{k+1}`.
    pub small_delta: Vec<F>,
    /// `L_k = Σ_{i<=k} (-1)^i κ_i`.
    pub log_estimate: F,
    pub estimate: F,
    /// `δ_1 + Δ_{k+1}`, without the unknown constant.
    pub error_budget: F,
    pub harris_log: F,
    pub janson_log: F,
    /// `Λ_1..Λ_k`.
    pub lambda: Vec<RangedValue<F>>,
    pub rho_surrogate: RangedValue<F>,
    pub rho_exact: Option<F>,
    pub codegree: CodegreeStat<F>,
    pub max_p: F,
    pub cluster_counts: ClusterCounts,
    pub diagnostics: Vec<Diagnostic>,
}

impl<F: Real> EstimateReport<F> {
    pub fn delta1(&self) -> F {
        self.small_delta[0]
    }

    /// Whether `[harris, janson]` contains `log_value` up to `tol`.
    pub fn sandwich_contains(&self, log_value: F, tol: F) -> bool {
        self.harris_log - tol <= log_value && log_value <= self.janson_log + tol
    }
}

/// Signed partial sum `Σ_{i=1}^{k} (-1)^i κ_i`.
pub fn truncated_log<F: Real>(kappa: &[F]) -> F {
    let mut acc = CompensatedSum::new();
    for (i, &x) in kappa.iter().enumerate() {
        acc.add(if i % 2 == 0 { -x } else { x });
    }
    acc.value()
}

pub fn series_estimate<F: Real + Ring>(
    h: &Hypergraph,
    p: &ProbabilityAssignment<F>,
    k: usize,
    opts: &SeriesOptions,
) -> Result<EstimateReport<F>> {
    let terms = aggregate_series(h, p, k, opts)?;
    let log_estimate = truncated_log(&terms.kappa);
    let harris_log = harris_lower(h, p)?;
    let janson_log = -terms.big_delta[0] + terms.big_delta[1];
    let max_p = p.max_value();
    let mut diagnostics = vec![
        Diagnostic::new(GATE_SERIES, "max_p", max_p.as_f64()),
        Diagnostic::new(
            GATE_SERIES,
            format!("rho_surrogate[{}]", terms.rho_surrogate.range.as_str()),
            terms.rho_surrogate.value.as_f64(),
        ),
        Diagnostic::new(GATE_CODEGREE, "D", terms.codegree.value.as_f64()),
    ];
    for (i, l) in terms.lambda.iter().enumerate() {
        diagnostics.push(Diagnostic::new(
            GATE_SERIES,
            format!("Lambda_{}[{}]", i + 1, l.range.as_str()),
            l.value.as_f64(),
        ));
    }
    Ok(EstimateReport {
        k,
        log_estimate,
        estimate: log_estimate.exp(),
        error_budget: terms.small_delta[0] + terms.big_delta[k],
        harris_log,
        janson_log,
        max_p,
        kappa: terms.kappa,
        big_delta: terms.big_delta,
        small_delta: terms.small_delta,
        lambda: terms.lambda,
        rho_surrogate: terms.rho_surrogate,
        rho_exact: terms.rho_exact,
        codegree: terms.codegree,
        cluster_counts: terms.cluster_counts,
        diagnostics,
    })
}
