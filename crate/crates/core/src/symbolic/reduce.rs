//! Asymptotic truncation of the signed cumulant series.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{MonomialPolynomial, SymbolicPolynomial};
use crate::error::{Error, Result};

/// `-κ_1 + κ_2 - ... + (-1)^k κ_k`.
pub fn signed_series(kappas: &[SymbolicPolynomial]) -> SymbolicPolynomial {
    let minus = -BigRational::one();
    kappas
        .iter()
        .enumerate()
        .fold(SymbolicPolynomial::zero(), |acc, (i, k)| {
            if i % 2 == 0 {
                acc.plus(&k.scaled(&minus))
            } else {
                acc.plus(k)
            }
        })
}

/// Expands the signed series into monomials `c n^a p^b` and keeps those
/// with `a - alpha b > 0`, the ones that do not vanish when
/// `p = o(n^{-alpha})`.
pub fn asymptotic_reduce(kappas: &[SymbolicPolynomial], alpha: &BigRational) -> Result<MonomialPolynomial> {
    if *alpha <= BigRational::zero() {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    let mut out = signed_series(kappas).expand();
    out.retain(|_, a, b| {
        let exponent = BigRational::from_integer(BigInt::from(a)) - alpha * BigRational::from_integer(BigInt::from(b));
        exponent > BigRational::zero()
    });
    Ok(out)
}

/// Parses `7/11`, `4/5`, `2`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_alpha_keeps_only_p_free_terms() {
        let mut k1 = SymbolicPolynomial::zero();
        k1.add_term(BigRational::one(), 3, 3);
        k1.add_term(BigRational::one(), 2, 0);
        let out = asymptotic_reduce(&[k1], &parse_rational("1000").unwrap()).unwrap();
        assert!(out.terms().all(|(_, _, b)| b == 0));
        // ff(n,2) = n^2 - n
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("14/22").unwrap(), parse_rational("7/11").unwrap());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(asymptotic_reduce(&[], &parse_rational("-1").unwrap()).is_err());
    }
}
