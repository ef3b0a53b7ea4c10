//! Ground truth: exact avoidance probabilities by exhaustive subset sweeps,
//! and seeded Monte Carlo.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{validate_instance, Hypergraph, ProbabilityAssignment};
use crate::scalar::{CompensatedSum, Real};

pub const DEFAULT_M_CAP: usize = 28;
/// Largest vertex count accepted by the naive recount.
pub const NAIVE_MAX_VERTICES: usize = 16;
pub const MC_ALGORITHM: &str = "chacha8-stream-per-shard";
/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

/// `counts[s]` is the number of `s`-subsets of the vertex set that contain
/// no edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceProfile {
    counts: Vec<BigUint>,
}

impl IndependenceProfile {
    pub fn from_counts(counts: Vec<BigUint>) -> Self {
        Self { counts }
    }

    pub fn num_vertices(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `Σ_s I_s p^s (1-p)^{m-s}` evaluated in log space.
    pub fn log_probability<F: Real>(&self, p: F) -> F {
        let m = self.num_vertices();
        let lp = p.ln();
        let lq = (-p).ln_1p();
        let terms: Vec<F> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| {
                let ln_c = F::lit(c.to_f64().unwrap()).ln();
                ln_c + F::from_count(s as u64) * lp + F::from_count((m - s) as u64) * lq
            })
            .collect();
        log_sum_exp(&terms)
    }

    pub fn probability<F: Real>(&self, p: F) -> F {
        self.log_probability(p).exp()
    }

    /// Exact evaluation at a rational `p`.
    pub fn probability_rational(&self, p: &BigRational) -> BigRational {
        let m = self.num_vertices();
        let q = BigRational::one() - p;
        let mut total = BigRational::zero();
        for (s, c) in self.counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = BigRational::from_integer(BigInt::from(c.clone())) * pow(p, s) * pow(&q, m - s);
            total += term;
        }
        total
    }

    /// One `s I_s` line per cardinality.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (s, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{s} {c}\n"));
        }
        out
    }
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn log_sum_exp<F: Real>(terms: &[F]) -> F {
    let max = terms.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let mut acc = CompensatedSum::new();
    for &t in terms {
        acc.add((t - max).exp());
    }
    max + acc.value().ln()
}

fn check_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap {
        return Err(Error::CapExceeded {
            what: "vertex count m",
            value: m,
            cap,
        });
    }
    if m >= 63 {
        return Err(Error::TooLarge { size: m, max: 62 });
    }
    Ok(())
}

// Incidence lists restricted to the vertices below `low_bits`, plus the
// per-edge sizes.
struct Sweep<'a> {
    h: &'a Hypergraph,
    incidence: Vec<Vec<u32>>,
}

impl<'a> Sweep<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        let mut incidence = vec![Vec::new(); h.num_vertices()];
        for (i, e) in h.edges().iter().enumerate() {
            for &v in e {
                incidence[v].push(i as u32);
            }
        }
        Self { h, incidence }
    }

    // Counts independent sets among subsets whose high bits equal `prefix`,
    // sweeping the low `low` bits in Gray-code order.
    fn run_prefix(&self, low: usize, prefix: u64) -> Vec<u64> {
        let m = self.h.num_vertices();
        let mut missing: Vec<u32> = self.h.edges().iter().map(|e| e.len() as u32).collect();
        let mut full: u32 = 0;
        let mut size = 0usize;
        for v in low..m {
            if prefix >> (v - low) & 1 == 1 {
                size += 1;
                for &e in &self.incidence[v] {
                    missing[e as usize] -= 1;
                    if missing[e as usize] == 0 {
                        full += 1;
                    }
                }
            }
        }
        let mut counts = vec![0u64; m + 1];
        if full == 0 {
            counts[size] += 1;
        }
        let mut state: u64 = 0;
        for step in 1u64..(1u64 << low) {
            let v = step.trailing_zeros() as usize;
            state ^= 1 << v;
            if state >> v & 1 == 1 {
                size += 1;
                for &e in &self.incidence[v] {
                    let slot = &mut missing[e as usize];
                    *slot -= 1;
                    if *slot == 0 {
                        full += 1;
                    }
                }
            } else {
                size -= 1;
                for &e in &self.incidence[v] {
                    let slot = &mut missing[e as usize];
                    if *slot == 0 {
                        full -= 1;
                    }
                    *slot += 1;
                }
            }
            if full == 0 {
                counts[size] += 1;
            }
        }
        counts
    }
}

/// Exact independence profile by a Gray-code sweep over all `2^m` vertex
/// subsets, split over fixed high-bit prefixes.
pub fn independence_profile(h: &Hypergraph, cap: usize) -> Result<IndependenceProfile> {
    let m = h.num_vertices();
    check_cap(m, cap)?;
    let high = m.min(6);
    let low = m - high;
    let sweep = Sweep::new(h);
    let parts: Vec<Vec<u64>> = (0..(1u64 << high))
        .into_par_iter()
        .map(|prefix| sweep.run_prefix(low, prefix))
        .collect();
    let mut counts = vec![BigUint::zero(); m + 1];
    for part in parts {
        for (c, x) in counts.iter_mut().zip(part) {
            *c += x;
        }
    }
    Ok(IndependenceProfile { counts })
}

/// Direct recount: every subset is tested against every edge mask.
pub fn naive_profile(h: &Hypergraph) -> Result<IndependenceProfile> {
    let m = h.num_vertices();
    if m > NAIVE_MAX_VERTICES {
        return Err(Error::TooLarge {
            size: m,
            max: NAIVE_MAX_VERTICES,
        });
    }
    let masks: Vec<u32> = h
        .edges()
        .iter()
        .map(|e| e.iter().fold(0u32, |a, &v| a | 1 << v))
        .collect();
    let mut counts = vec![0u64; m + 1];
    for s in 0u32..(1u32 << m) {
        if masks.iter().all(|&e| e & s != e) {
            counts[s.count_ones() as usize] += 1;
        }
    }
    Ok(IndependenceProfile {
        counts: counts.into_iter().map(BigUint::from).collect(),
    })
}

/// `log Pr[Ω_p contains no edge]`, exactly up to floating rounding.
pub fn log_exact_probability<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>, cap: usize) -> Result<F> {
    validate_instance(h, p)?;
    check_cap(h.num_vertices(), cap)?;
    if h.num_edges() == 0 {
        return Ok(F::zero());
    }
    match p {
        ProbabilityAssignment::Uniform(q) => Ok(independence_profile(h, cap)?.log_probability(*q)),
        ProbabilityAssignment::PerVertex(ps) => Ok(per_vertex_probability(h, ps).ln()),
    }
}

pub fn exact_probability<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>, cap: usize) -> Result<F> {
    Ok(log_exact_probability(h, p, cap)?.exp())
}

// Depth-first sweep over vertices in index order; a branch including a
// vertex is cut as soon as it completes an edge.
fn per_vertex_probability<F: Real>(h: &Hypergraph, ps: &[F]) -> F {
    let m = h.num_vertices();
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, e) in h.edges().iter().enumerate() {
        closing[*e.last().unwrap()].push(i);
    }
    let mut included = vec![false; m];

    fn rec<F: Real>(v: usize, h: &Hypergraph, ps: &[F], closing: &[Vec<usize>], included: &mut [bool]) -> F {
        if v == ps.len() {
            return F::one();
        }
        let skip = (F::one() - ps[v]) * rec(v + 1, h, ps, closing, included);
        let completes = closing[v]
            .iter()
            .any(|&i| h.edge(i).iter().all(|&u| u == v || included[u]));
        if completes {
            return skip;
        }
        included[v] = true;
        let take = ps[v] * rec(v + 1, h, ps, closing, included);
        included[v] = false;
        skip + take
    }

    rec(0, h, ps, &closing, &mut included)
}

/// Outcome of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct MCResult {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub seed: u64,
    pub shards: usize,
    pub algorithm: &'static str,
}

impl MCResult {
    /// Half-width of the Wilson interval at one standard deviation.
    pub fn sigma(&self) -> f64 {
        let (lo, hi) = wilson_interval(self.successes, self.trials, 1.0);
        (hi - lo) / 2.0
    }
}

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Samples `Ω_p` `trials` times and counts samples containing no edge.
/// Shard `i` draws from ChaCha8 seeded with `seed` on stream `i`, so the
/// result depends only on `(seed, shards)`.
pub fn monte_carlo<F: Real>(
    h: &Hypergraph,
    p: &ProbabilityAssignment<F>,
    trials: u64,
    seed: u64,
    shards: usize,
) -> Result<MCResult> {
    validate_instance(h, p)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if shards == 0 {
        return Err(Error::InvalidParameter("shards must be at least 1".into()));
    }
    let probs: Vec<f64> = p.to_vec(h.num_vertices()).iter().map(|x| x.as_f64()).collect();
    let per = trials / shards as u64;
    let extra = trials % shards as u64;
    let successes: u64 = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let count = per + u64::from((shard as u64) < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let mut inside = vec![false; probs.len()];
            let mut ok = 0u64;
            for _ in 0..count {
                for (slot, &q) in inside.iter_mut().zip(&probs) {
                    *slot = rng.gen::<f64>() < q;
                }
                if !h.edges().iter().any(|e| e.iter().all(|&v| inside[v])) {
                    ok += 1;
                }
            }
            ok
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum();
    let (lower, upper) = wilson_interval(successes, trials, Z_99);
    let estimate = successes as f64 / trials as f64;
    Ok(MCResult {
        trials,
        successes,
        estimate,
        lower: lower.min(estimate),
        upper: upper.max(estimate),
        level: 0.99,
        seed,
        shards,
        algorithm: MC_ALGORITHM,
    })
}
