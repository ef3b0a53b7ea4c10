//! Exact symbolic side: complexes, their isomorphism types, and cumulant
//! polynomials in `n` and `p`.

pub mod ap;
pub mod complex;
pub mod poly;
pub mod reduce;
pub mod types;

pub use ap::{ap_symbolic, ApClosedForms};
pub use complex::{
    automorphism_count, brute_force_automorphisms, brute_force_isomorphic, canonical_form, canonicalize, CanonicalCode,
    Constituent, FComplex,
};
pub use poly::{MonomialPolynomial, PPoly, SymbolicPolynomial};
pub use reduce::{asymptotic_reduce, parse_rational, signed_series};
pub use types::{aggregate_iso_types, enumerate_types, symbolic_kappa, IsoType, TypeCensus};
