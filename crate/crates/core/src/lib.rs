//! Cumulant-series approximations for the probability that a binomial
//! random subset contains no edge of a hypergraph, with exact and Monte
//! Carlo oracles and an exact symbolic pipeline for subgraph families.
//!
//! Numeric code is generic over [`scalar::Real`]; the aliases below fix
//! `f64`, which is what the command-line tool uses.

pub mod clusters;
pub mod cumulants;
pub mod error;
pub mod estimator;
pub mod generators;
pub mod model;
pub mod oracles;
pub mod partitions;
pub mod scalar;
pub mod selftest;
pub mod symbolic;

pub use error::{Error, Result};
pub use model::{Cluster, DependencyGraph, Hypergraph, ProbabilityAssignment};

pub type Probabilities = model::ProbabilityAssignment<f64>;
pub type Series = cumulants::SeriesTerms<f64>;
pub type Estimate = estimator::EstimateReport<f64>;
pub type Rational = num_rational::BigRational;
