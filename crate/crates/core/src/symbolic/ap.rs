//! Exact counts for 3-term progressions in `[n]`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApClosedForms {
    pub n: u64,
    /// Number of 3-APs in `[n]`.
    pub edges: u128,
    /// Unordered pairs of 3-APs meeting in exactly one point.
    pub one_point_pairs: u128,
    /// `n^2 / 4`.
    pub edges_leading: BigRational,
    /// `7 n^3 / 24`.
    pub pairs_leading: BigRational,
}

/// Number of 3-APs in `[n]` through the (1-indexed) element `i`.
pub fn ap_degree(n: u64, i: u64) -> u64 {
    (i - 1).min(n - i) + (n - i) / 2 + (i - 1) / 2
}

/// Closed forms for `r = 3`; other lengths are only available numerically.
pub fn ap_symbolic(n: u64, r: usize) -> Result<ApClosedForms> {
    if r != 3 {
        return Err(Error::UnsupportedR { r });
    }
    let d = n.saturating_sub(1) / 2;
    let edges = (d * n - d * (d + 1)) as u128;
    let through: u128 = (1..=n)
        .map(|i| {
            let f = ap_degree(n, i) as u128;
            f * f.saturating_sub(1) / 2
        })
        .sum();
    // pairs sharing two terms: consecutive overlap at step d, or the
    // endpoints of a step-d/2 progression reused at step d
    let two_point: u128 = (1..n)
        .map(|d| {
            let overlap = n.saturating_sub(3 * d) as u128;
            let nested = if d % 2 == 0 { 2 * n.saturating_sub(2 * d) as u128 } else { 0 };
            overlap + nested
        })
        .sum();
    let big = |x: u64| BigInt::from(x);
    Ok(ApClosedForms {
        n,
        edges,
        one_point_pairs: through - 2 * two_point,
        edges_leading: BigRational::new(big(n) * big(n), big(4)),
        pairs_leading: BigRational::new(big(7) * big(n) * big(n) * big(n), big(24)),
    })
}
