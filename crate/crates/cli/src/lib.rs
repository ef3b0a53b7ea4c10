//! Argument handling and subcommand drivers for the `cumseries` binary.

pub mod report;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use cumseries::cumulants::SeriesOptions;
use cumseries::estimator::{diagnose, series_estimate, Diagnostic, FamilyContext};
use cumseries::generators::{
    family_stats, gen_aps, gen_collinear, gen_subgraph_copies, parse_family, FamilySpec, FamilyStats, PointSet,
    SmallRGraph,
};
use cumseries::oracles::{independence_profile, log_exact_probability, monte_carlo};
use cumseries::symbolic::poly::falling_factorial;
use cumseries::symbolic::{asymptotic_reduce, enumerate_types, parse_rational, signed_series};
use cumseries::{selftest, Error, Hypergraph, Probabilities};

use report::*;

#[derive(Debug, Parser)]
#[command(name = "cumseries", version, about = "Cumulant-series estimates of avoidance probabilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance in hypergraph text format.
    Gen(GenArgs),
    /// Truncated series estimate with its error budget and classical bounds.
    Estimate(EstimateArgs),
    /// Exact probability by exhaustive sweep.
    Exact(ExactArgs),
    /// Seeded Monte Carlo estimate.
    Mc(McArgs),
    /// Symbolic cumulants of a subgraph family in K_n.
    Symbolic(SymbolicArgs),
    /// Magnitudes gating the approximation regimes.
    Diagnose(DiagnoseArgs),
    /// Invariant checks on built-in instances.
    Selftest(OutputArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Hypergraph file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in family: `k3`, `c4`, `k4`, comma-separated lists, or `ap:<r>`.
    #[arg(long)]
    pub family: Option<String>,
    /// Family file: per member an `r v e` header and `e` edge lines.
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    /// Point file, one `x y` pair per line; edges are collinear triples.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub source: Source,
    /// Ground-set size for generated families.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ProbArgs {
    /// Uniform inclusion probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Per-vertex probabilities, whitespace separated.
    #[arg(long)]
    pub p_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CapArgs {
    /// Largest vertex count for exact sweeps.
    #[arg(long, default_value_t = cumseries::oracles::DEFAULT_M_CAP)]
    pub m_cap: usize,
    /// Largest cluster size whose cumulant is evaluated.
    #[arg(long, default_value_t = cumseries::cumulants::DEFAULT_CUMULANT_CAP)]
    pub cumulant_cap: usize,
    /// Largest number of clusters visited.
    #[arg(long, default_value_t = cumseries::clusters::DEFAULT_CLUSTER_BUDGET)]
    pub cluster_budget: u64,
    /// Largest number of edge subsets scanned for exhaustive maxima.
    #[arg(long, default_value_t = cumseries::cumulants::DEFAULT_SUBSET_BUDGET)]
    pub subset_budget: u64,
    /// Work shards; results depend only on this count, not on scheduling.
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
}

impl CapArgs {
    fn options(&self) -> SeriesOptions {
        SeriesOptions {
            cumulant_cap: self.cumulant_cap,
            cluster_budget: self.cluster_budget,
            subset_budget: self.subset_budget,
            m_cap: self.m_cap,
            shards: self.shards,
            ..SeriesOptions::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub prob: ProbArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Also compute the exact rho (small instances only).
    #[arg(long)]
    pub exact_rho: bool,
    #[command(flatten)]
    pub caps: CapArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub prob: ProbArgs,
    #[arg(long, default_value_t = cumseries::oracles::DEFAULT_M_CAP)]
    pub m_cap: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub prob: ProbArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[group(id = "symbolic_family", required = true, multiple = false, args = ["family", "family_file"])]
pub struct SymbolicArgs {
    /// Comma-separated built-in members, e.g. `k3,c4`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Keep terms n^a p^b with a - alpha b > 0, e.g. `7/11`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Largest number of isomorphism types.
    #[arg(long, default_value_t = cumseries::symbolic::types::DEFAULT_TYPE_BUDGET)]
    pub type_budget: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub prob: ProbArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Skip instance-level quantities (rho, D), which need the instance.
    #[arg(long)]
    pub no_instance: bool,
    #[command(flatten)]
    pub caps: CapArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub code: i32,
}

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

impl CliError {
    fn validation(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            message: message.into(),
            code: EXIT_VALIDATION,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
            code: if e.is_budget() { EXIT_BUDGET } else { EXIT_VALIDATION },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.message.replace('\n', " ");
        write!(f, "error: kind={} msg={}", self.kind, msg)
    }
}

/// Text produced by a run, where it goes, and the exit status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub output: Option<PathBuf>,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::validation("Io", format!("{}: {e}", path.display())))
}

/// An instance plus what it was generated from.
pub struct Loaded {
    pub h: Hypergraph,
    pub origin: Origin,
}

pub enum Origin {
    File,
    Subgraphs { n: usize, family: Vec<SmallRGraph> },
    Progressions { n: usize, r: usize },
}

fn need_n(n: Option<usize>) -> Result<usize, CliError> {
    n.ok_or_else(|| CliError::validation("InvalidParameter", "--n is required for generated families"))
}

fn family_members(args: &InstanceArgs) -> Result<Option<Origin>, CliError> {
    if let Some(spec) = &args.source.family {
        let n = need_n(args.n)?;
        return Ok(Some(match FamilySpec::parse(spec)? {
            FamilySpec::Subgraphs(family) => Origin::Subgraphs { n, family },
            FamilySpec::Progressions { r } => Origin::Progressions { n, r },
        }));
    }
    if let Some(path) = &args.source.family_file {
        let n = need_n(args.n)?;
        return Ok(Some(Origin::Subgraphs {
            n,
            family: parse_family(&read(path)?)?,
        }));
    }
    Ok(None)
}

fn build(origin: &Origin) -> Result<Hypergraph, CliError> {
    Ok(match origin {
        Origin::File => unreachable!("files are read directly"),
        Origin::Subgraphs { n, family } => gen_subgraph_copies(family, *n)?.hypergraph,
        Origin::Progressions { n, r } => gen_aps(*n, *r)?,
    })
}

pub fn load(args: &InstanceArgs) -> Result<Loaded, CliError> {
    if let Some(path) = &args.source.input {
        return Ok(Loaded {
            h: Hypergraph::parse(&read(path)?)?,
            origin: Origin::File,
        });
    }
    if let Some(path) = &args.source.points {
        return Ok(Loaded {
            h: gen_collinear(&parse_points(&read(path)?)?),
            origin: Origin::File,
        });
    }
    let origin = family_members(args)?.expect("clap enforces one source");
    Ok(Loaded {
        h: build(&origin)?,
        origin,
    })
}

pub fn parse_points(text: &str) -> Result<PointSet, CliError> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: i + 1,
                message: "expected two integers".into(),
            })?;
        if nums.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected two integers".into(),
            }
            .into());
        }
        points.push((nums[0], nums[1]));
    }
    Ok(PointSet::new(points)?)
}

fn probabilities(args: &ProbArgs, m: usize) -> Result<Probabilities, CliError> {
    let p = match (&args.p, &args.p_file) {
        (Some(p), _) => Probabilities::Uniform(*p),
        (None, Some(path)) => {
            let values = read(path)?
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::validation("Parse", format!("probability file: {e}")))?;
            Probabilities::PerVertex(values)
        }
        (None, None) => unreachable!("clap enforces one probability source"),
    };
    p.check(m)?;
    Ok(p)
}

fn p_fields(p: &Probabilities) -> (String, Float) {
    match p {
        Probabilities::Uniform(q) => ("uniform".into(), float(*q)),
        Probabilities::PerVertex(_) => ("per-vertex".into(), None),
    }
}

fn diagnostics_json(ds: &[Diagnostic]) -> Vec<DiagnosticJson> {
    ds.iter()
        .map(|d| DiagnosticJson {
            gate: d.gate.into(),
            quantity: d.quantity.clone(),
            value: float(d.value),
        })
        .collect()
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).unwrap();
    for r in rows {
        w.write_record(r).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn at(v: &[Float], i: usize) -> String {
    v.get(i).map(float_text).unwrap_or_default()
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Gen(a) => {
            let loaded = load(&a.instance)?;
            Ok(Outcome {
                text: loaded.h.to_text(),
                output: a.output,
                code: 0,
            })
        }
        Command::Estimate(a) => run_estimate(a),
        Command::Exact(a) => run_exact(a),
        Command::Mc(a) => run_mc(a),
        Command::Symbolic(a) => run_symbolic(a),
        Command::Diagnose(a) => run_diagnose(a),
        Command::Selftest(out) => run_selftest(out),
    }
}

fn run_estimate(a: EstimateArgs) -> Result<Outcome, CliError> {
    let loaded = load(&a.instance)?;
    let p = probabilities(&a.prob, loaded.h.num_vertices())?;
    let mut opts = a.caps.options();
    opts.exact_rho = a.exact_rho;
    let r = series_estimate(&loaded.h, &p, a.k, &opts)?;
    let (p_kind, p_value) = p_fields(&p);
    let floats = |v: &[f64]| v.iter().map(|&x| float(x)).collect::<Vec<_>>();
    let json = EstimateJson {
        schema: SCHEMA,
        command: "estimate".into(),
        num_vertices: loaded.h.num_vertices(),
        num_edges: loaded.h.num_edges(),
        p_kind,
        p: p_value,
        k: r.k,
        kappa: floats(&r.kappa),
        big_delta: floats(&r.big_delta),
        delta: floats(&r.small_delta),
        delta1: float(r.delta1()),
        log_estimate: float(r.log_estimate),
        estimate: float(r.estimate),
        error_budget: float(r.error_budget),
        harris_log: float(r.harris_log),
        janson_log: float(r.janson_log),
        lambda: r.lambda.iter().map(|l| float(l.value)).collect(),
        lambda_range: r.lambda.last().map(|l| l.range.as_str()).unwrap_or_default().into(),
        rho_surrogate: float(r.rho_surrogate.value),
        rho_range: r.rho_surrogate.range.as_str().into(),
        rho_exact: r.rho_exact.and_then(float),
        dstat: float(r.codegree.value),
        dstat_subset: r.codegree.subset.clone(),
        dstat_j: r.codegree.j,
        max_p: float(r.max_p),
        cluster_counts: r.cluster_counts.0.clone(),
        diagnostics: diagnostics_json(&r.diagnostics),
    };
    let text = match a.out.format {
        Format::Json => to_json(&json),
        Format::Csv => csv_table(
            &["i", "kappa", "Delta", "delta", "Lambda", "clusters"],
            (0..=json.k)
                .map(|i| {
                    vec![
                        (i + 1).to_string(),
                        at(&json.kappa, i),
                        at(&json.big_delta, i),
                        at(&json.delta, i),
                        at(&json.lambda, i),
                        json.cluster_counts.get(i).map(|c| c.to_string()).unwrap_or_default(),
                    ]
                })
                .collect(),
        ),
        Format::Text => {
            let mut s = String::new();
            s += &format!("instance: m={} N={} p={} ({})\n", json.num_vertices, json.num_edges, float_text(&json.p), json.p_kind);
            s += &format!("k: {}\n", json.k);
            s += &format!("log_estimate: {}\n", float_text(&json.log_estimate));
            s += &format!("estimate: {}\n", float_text(&json.estimate));
            s += &format!("error_budget: {}\n", float_text(&json.error_budget));
            s += &format!("harris_log: {}\n", float_text(&json.harris_log));
            s += &format!("janson_log: {}\n", float_text(&json.janson_log));
            for i in 0..=json.k {
                s += &format!(
                    "size {}: kappa={} Delta={} delta={} clusters={}\n",
                    i + 1,
                    at(&json.kappa, i),
                    at(&json.big_delta, i),
                    at(&json.delta, i),
                    json.cluster_counts.get(i).copied().unwrap_or(0)
                );
            }
            for d in &json.diagnostics {
                s += &format!("[{}] {} = {}\n", d.gate, d.quantity, float_text(&d.value));
            }
            s
        }
    };
    Ok(Outcome {
        text,
        output: a.out.output,
        code: 0,
    })
}

fn run_exact(a: ExactArgs) -> Result<Outcome, CliError> {
    let loaded = load(&a.instance)?;
    let p = probabilities(&a.prob, loaded.h.num_vertices())?;
    let log_p = log_exact_probability(&loaded.h, &p, a.m_cap)?;
    let profile = match p {
        Probabilities::Uniform(_) => Some(independence_profile(&loaded.h, a.m_cap)?),
        Probabilities::PerVertex(_) => None,
    };
    let (p_kind, p_value) = p_fields(&p);
    let json = ExactJson {
        schema: SCHEMA,
        command: "exact".into(),
        num_vertices: loaded.h.num_vertices(),
        num_edges: loaded.h.num_edges(),
        p_kind,
        p: p_value,
        log_probability: float(log_p),
        probability: float(log_p.exp()),
        profile: profile
            .as_ref()
            .map(|pr| pr.counts().iter().map(|c| integer(&c.to_string())).collect()),
    };
    let text = match a.out.format {
        Format::Json => to_json(&json),
        Format::Csv => match &json.profile {
            Some(counts) => csv_table(
                &["s", "independent_sets"],
                counts.iter().enumerate().map(|(s, c)| vec![s.to_string(), c.to_string()]).collect(),
            ),
            None => csv_table(
                &["log_probability", "probability"],
                vec![vec![float_text(&json.log_probability), float_text(&json.probability)]],
            ),
        },
        Format::Text => {
            let mut s = format!(
                "log_probability: {}\nprobability: {}\n",
                float_text(&json.log_probability),
                float_text(&json.probability)
            );
            if let Some(pr) = &profile {
                s += &pr.export();
            }
            s
        }
    };
    Ok(Outcome {
        text,
        output: a.out.output,
        code: 0,
    })
}

fn run_mc(a: McArgs) -> Result<Outcome, CliError> {
    let loaded = load(&a.instance)?;
    let p = probabilities(&a.prob, loaded.h.num_vertices())?;
    let r = monte_carlo(&loaded.h, &p, a.trials, a.seed, a.shards)?;
    let json = McJson {
        schema: SCHEMA,
        command: "mc".into(),
        trials: r.trials,
        successes: r.successes,
        estimate: float(r.estimate),
        lower: float(r.lower),
        upper: float(r.upper),
        level: float(r.level),
        sigma: float(r.sigma()),
        seed: r.seed,
        shards: r.shards,
        algorithm: r.algorithm.into(),
    };
    let text = match a.out.format {
        Format::Json => to_json(&json),
        Format::Csv => csv_table(
            &["trials", "successes", "estimate", "lower", "upper", "level", "seed", "shards", "algorithm"],
            vec![vec![
                json.trials.to_string(),
                json.successes.to_string(),
                float_text(&json.estimate),
                float_text(&json.lower),
                float_text(&json.upper),
                float_text(&json.level),
                json.seed.to_string(),
                json.shards.to_string(),
                json.algorithm.clone(),
            ]],
        ),
        Format::Text => format!(
            "estimate: {} ({} of {})\ninterval: [{}, {}] at level {}\nseed: {} shards: {} algorithm: {}\n",
            float_text(&json.estimate),
            json.successes,
            json.trials,
            float_text(&json.lower),
            float_text(&json.upper),
            float_text(&json.level),
            json.seed,
            json.shards,
            json.algorithm
        ),
    };
    Ok(Outcome {
        text,
        output: a.out.output,
        code: 0,
    })
}

fn describe(f: &SmallRGraph) -> String {
    let edges: Vec<String> = f.edges().iter().map(|e| format!("{e:?}")).collect();
    format!("r={} v={} edges={}", f.uniformity(), f.num_vertices(), edges.join(""))
}

fn run_symbolic(a: SymbolicArgs) -> Result<Outcome, CliError> {
    let family = match (&a.family, &a.family_file) {
        (Some(spec), _) => match FamilySpec::parse(spec)? {
            FamilySpec::Subgraphs(f) => f,
            FamilySpec::Progressions { .. } => {
                return Err(CliError::validation(
                    "InvalidParameter",
                    "symbolic series are for subgraph families; use estimate for progressions",
                ))
            }
        },
        (None, Some(path)) => parse_family(&read(path)?)?,
        (None, None) => unreachable!("clap enforces one family source"),
    };
    let levels = enumerate_types(&family, a.k, a.type_budget)?;
    let kappas: Vec<_> = levels.iter().map(|l| cumseries::symbolic::types::kappa_of_types(l)).collect();
    let series = signed_series(&kappas);
    let alpha = a.alpha.as_deref().map(parse_rational).transpose()?;
    let reduced = alpha.as_ref().map(|al| asymptotic_reduce(&kappas, al)).transpose()?;
    let json = SymbolicJson {
        schema: SCHEMA,
        command: "symbolic".into(),
        family: family.iter().map(describe).collect(),
        k: a.k,
        kappa: kappas
            .iter()
            .enumerate()
            .map(|(i, k)| KappaJson {
                size: i + 1,
                falling: k.to_string(),
                expanded: k.expand().to_string(),
            })
            .collect(),
        series_falling: series.to_string(),
        series_expanded: series.expand().to_string(),
        alpha: alpha.as_ref().map(|q| format!("{}/{}", q.numer(), q.denom())),
        reduced: reduced.as_ref().map(|r| r.to_string()),
        reduced_terms: reduced
            .iter()
            .flat_map(|r| {
                r.terms().map(|(c, a, b)| TermJson {
                    coefficient: format!("{}/{}", c.numer(), c.denom()),
                    n_power: a,
                    p_power: b,
                })
            })
            .collect(),
        types: levels
            .iter()
            .enumerate()
            .flat_map(|(i, level)| {
                level.iter().map(move |t| TypeJson {
                    size: i + 1,
                    vertices: t.num_vertices,
                    edges: t.num_edges,
                    aut: t.aut_count,
                    cumulant: t.cumulant.to_string(),
                    code: t.code.to_hex(),
                })
            })
            .collect(),
    };
    let text = match a.out.format {
        Format::Json => to_json(&json),
        Format::Csv => csv_table(
            &["size", "vertices", "edges", "aut", "cumulant", "code"],
            json.types
                .iter()
                .map(|t| {
                    vec![
                        t.size.to_string(),
                        t.vertices.to_string(),
                        t.edges.to_string(),
                        t.aut.to_string(),
                        t.cumulant.clone(),
                        t.code.clone(),
                    ]
                })
                .collect(),
        ),
        Format::Text => {
            let mut s = String::new();
            for k in &json.kappa {
                s += &format!("kappa_{} = {}\n", k.size, k.falling);
            }
            s += &format!("series = {}\n", json.series_expanded);
            if let (Some(al), Some(r)) = (&json.alpha, &json.reduced) {
                s += &format!("reduced (alpha = {al}) = {r}\n");
            }
            s
        }
    };
    Ok(Outcome {
        text,
        output: a.out.output,
        code: 0,
    })
}

// Upper bound on the work of placing every member in K_n.
fn placements(n: usize, family: &[SmallRGraph]) -> BigInt {
    family.iter().map(|f| falling_factorial(n as u64, f.num_vertices() as u32)).sum()
}

const DIAGNOSE_PLACEMENT_LIMIT: u64 = 20_000_000;

fn run_diagnose(a: DiagnoseArgs) -> Result<Outcome, CliError> {
    let opts = a.caps.options();
    let origin = family_members(&a.instance)?;
    let stats: Option<FamilyStats> = match &origin {
        Some(Origin::Subgraphs { family, .. }) => Some(family_stats(family)?),
        _ => None,
    };
    let small_enough = match &origin {
        Some(Origin::Subgraphs { n, family }) => placements(*n, family) <= BigInt::from(DIAGNOSE_PLACEMENT_LIMIT),
        _ => true,
    };
    let h = if a.no_instance || !small_enough {
        None
    } else {
        Some(match &origin {
            Some(o) => build(o)?,
            None => load(&a.instance)?.h,
        })
    };
    let m = match (&h, &origin) {
        (Some(h), _) => h.num_vertices(),
        (None, Some(Origin::Subgraphs { n, family })) => {
            let r = family[0].uniformity();
            cumseries::generators::binomial(*n as u64, r as u64) as usize
        }
        (None, Some(Origin::Progressions { n, .. })) => *n,
        (None, _) => 0,
    };
    let p = probabilities(&a.prob, m)?;
    let context = match (&origin, &stats) {
        (Some(Origin::Subgraphs { n, .. }), Some(stats)) => FamilyContext::Subgraphs { n: *n, stats },
        (Some(Origin::Progressions { n, r }), _) => FamilyContext::Progressions { n: *n, r: *r },
        _ => FamilyContext::None,
    };
    let ds = diagnose(h.as_ref(), &p, context, a.k, &opts)?;
    let (p_kind, p_value) = p_fields(&p);
    let json = DiagnoseJson {
        schema: SCHEMA,
        command: "diagnose".into(),
        k: a.k,
        p_kind,
        p: p_value,
        instance_metrics: h.is_some(),
        diagnostics: diagnostics_json(&ds),
        members: stats.as_ref().map(|s| {
            s.members
                .iter()
                .map(|m| MemberJson {
                    m_star: m.m_star.to_string(),
                    m_r: m.m_r.map(|q| format!("{}/{}", q.numer(), q.denom())),
                    r_balanced: m.is_r_balanced,
                })
                .collect()
        }),
        d: stats.as_ref().map(|s| format!("{}/{}", s.d.numer(), s.d.denom())),
        m_star: stats.as_ref().map(|s| s.m_star.to_string()),
    };
    let text = match a.out.format {
        Format::Json => to_json(&json),
        Format::Csv => csv_table(
            &["gate", "quantity", "value"],
            json.diagnostics
                .iter()
                .map(|d| vec![d.gate.clone(), d.quantity.clone(), float_text(&d.value)])
                .collect(),
        ),
        Format::Text => json
            .diagnostics
            .iter()
            .map(|d| format!("[{}] {} = {}\n", d.gate, d.quantity, float_text(&d.value)))
            .collect(),
    };
    Ok(Outcome {
        text,
        output: a.out.output,
        code: 0,
    })
}

fn run_selftest(out: OutputArgs) -> Result<Outcome, CliError> {
    let checks = selftest::run()?;
    let json = SelftestJson {
        schema: SCHEMA,
        command: "selftest".into(),
        passed: checks.iter().all(|c| c.passed),
        checks: checks
            .iter()
            .map(|c| CheckJson {
                name: c.name.into(),
                passed: c.passed,
                detail: c.detail.clone(),
            })
            .collect(),
    };
    let text = match out.format {
        Format::Json => to_json(&json),
        Format::Csv => csv_table(
            &["name", "passed", "detail"],
            json.checks
                .iter()
                .map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()])
                .collect(),
        ),
        Format::Text => json
            .checks
            .iter()
            .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect(),
    };
    Ok(Outcome {
        text,
        output: out.output,
        code: if json.passed { 0 } else { 1 },
    })
}

