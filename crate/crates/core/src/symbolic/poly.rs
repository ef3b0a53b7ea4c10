//! Exact polynomials: univariate in `p`, and bivariate in `(n, p)` with `n`
//! written either in the falling-factorial basis or in monomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::Ring;

fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Polynomial in `p` with rational coefficients, keyed by degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PPoly {
    coeffs: BTreeMap<u32, BigRational>,
}

impl PPoly {
    pub fn monomial(c: BigRational, degree: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        Self { coeffs }
    }

    /// `p^degree`.
    pub fn power(degree: u32) -> Self {
        Self::monomial(BigRational::one(), degree)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn coefficient(&self, degree: u32) -> BigRational {
        self.coeffs.get(&degree).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, degree: u32, c: BigRational) {
        let slot = self.coeffs.entry(degree).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&d, c)| c.to_f64().unwrap() * p.powi(d as i32))
            .sum()
    }

    pub fn eval_exact(&self, p: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .map(|(&d, c)| c * num_traits::pow(p.clone(), d as usize))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

impl Add for PPoly {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (d, c) in rhs.coeffs {
            self.add_term(d, c);
        }
        self
    }
}

impl Sub for PPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PPoly {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: self.coeffs.into_iter().map(|(d, c)| (d, -c)).collect(),
        }
    }
}

impl Mul for PPoly {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = PPoly::default();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                out.add_term(da + db, ca * cb);
            }
        }
        out
    }
}

impl Zero for PPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for PPoly {
    fn one() -> Self {
        Self::power(0)
    }
}

impl Ring for PPoly {
    fn from_i64(v: i64) -> Self {
        Self::monomial(rational(v), 0)
    }
}

impl fmt::Display for PPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(d, c)| format!("{} * p^{d}", render_rational(c)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Signed Stirling numbers of the first kind: `ff(n, a) = Σ_j s(a, j) n^j`.
pub fn stirling_first(a: usize) -> Vec<BigInt> {
    // row recurrence s(a+1, j) = s(a, j-1) - a s(a, j)
    let mut row = vec![BigInt::one()];
    for i in 0..a {
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (j, s) in row.iter().enumerate() {
            next[j + 1] += s;
            next[j] -= s * BigInt::from(i);
        }
        row = next;
    }
    row
}

/// `n(n-1)...(n-a+1)` as an exact integer.
pub fn falling_factorial(n: u64, a: u32) -> BigInt {
    (0..a as u64).fold(BigInt::one(), |acc, i| {
        if i > n {
            BigInt::zero()
        } else {
            acc * BigInt::from(n - i)
        }
    })
}

// Terms keyed by (p-degree, n-degree) so iteration gives the canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Terms(BTreeMap<(u32, u32), BigRational>);

impl Terms {
    fn add(&mut self, a: u32, b: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry((b, a)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&(b, a));
        }
    }

    fn merge(&mut self, other: &Terms, scale: &BigRational) {
        for (&(b, a), c) in &other.0 {
            self.add(a, b, c * scale);
        }
    }

    fn iter(&self) -> impl Iterator<Item = (&BigRational, u32, u32)> {
        self.0.iter().map(|(&(b, a), c)| (c, a, b))
    }

    fn render(&self, n_factor: impl Fn(u32) -> String) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        self.iter()
            .map(|(c, a, b)| format!("{} * {} * p^{}", render_rational(c), n_factor(a), b))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `num/den` with the sign on the numerator.
pub fn render_rational(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

/// `Σ c · n^{\underline a} · p^b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicPolynomial {
    terms: Terms,
}

impl SymbolicPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.0.is_empty()
    }

    /// Adds `weight · ff(n, a) · poly(p)`.
    pub fn add_scaled(&mut self, a: u32, weight: &BigRational, poly: &PPoly) {
        for (b, c) in poly.terms() {
            self.terms.add(a, b, weight * c);
        }
    }

    pub fn add_term(&mut self, c: BigRational, a: u32, b: u32) {
        self.terms.add(a, b, c);
    }

    /// `(coefficient, a, b)` in canonical order (by `b`, then `a`).
    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, u32, u32)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.0.is_empty()
    }

    pub fn coefficient(&self, a: u32, b: u32) -> BigRational {
        self.terms.0.get(&(b, a)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scaled(&self, s: &BigRational) -> Self {
        let mut out = Self::zero();
        out.terms.merge(&self.terms, s);
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.merge(&other.terms, &BigRational::one());
        out
    }

    /// Rewrites every `n^{\underline a}` in monomials.
    pub fn expand(&self) -> MonomialPolynomial {
        let mut out = MonomialPolynomial::default();
        for (c, a, b) in self.terms.iter() {
            for (j, s) in stirling_first(a as usize).into_iter().enumerate() {
                out.terms.add(j as u32, b, c * BigRational::from_integer(s));
            }
        }
        out
    }

    pub fn eval(&self, n: u64, p: f64) -> f64 {
        self.eval_exact_n(n).eval(p)
    }

    /// Substitutes an integer `n`, leaving a polynomial in `p`.
    pub fn eval_exact_n(&self, n: u64) -> PPoly {
        let mut out = PPoly::zero();
        for (c, a, b) in self.terms.iter() {
            let ff = BigRational::from_integer(falling_factorial(n, a));
            out = out + PPoly::monomial(c * ff, b);
        }
        out
    }
}

impl fmt::Display for SymbolicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.terms.render(|a| format!("ff(n,{a})")))
    }
}

/// `Σ c · n^a · p^b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonomialPolynomial {
    terms: Terms,
}

impl MonomialPolynomial {
    pub fn add_term(&mut self, c: BigRational, a: u32, b: u32) {
        self.terms.add(a, b, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, u32, u32)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.0.is_empty()
    }

    pub fn coefficient(&self, a: u32, b: u32) -> BigRational {
        self.terms.0.get(&(b, a)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, n: f64, p: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, a, b)| c.to_f64().unwrap() * n.powi(a as i32) * p.powi(b as i32))
            .sum()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&BigRational, u32, u32) -> bool) {
        self.terms.0.retain(|&(b, a), c| keep(c, a, b));
    }
}

impl fmt::Display for MonomialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.terms.render(|a| format!("n^{a}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn stirling_rows() {
        let row: Vec<i64> = stirling_first(4).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(row, vec![0, -6, 11, -6, 1]);
        assert_eq!(stirling_first(0), vec![BigInt::one()]);
    }

    #[test]
    fn expansion_matches_evaluation() {
        let mut s = SymbolicPolynomial::zero();
        s.add_term(q(1, 4), 4, 5);
        s.add_term(q(-1, 4), 4, 6);
        s.add_term(q(1, 6), 3, 3);
        let m = s.expand();
        for n in [4u64, 7, 13] {
            let a = s.eval(n, 0.3);
            let b = m.eval(n as f64, 0.3);
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }
        assert_eq!(falling_factorial(5, 4), BigInt::from(120));
        assert_eq!(falling_factorial(3, 4), BigInt::zero());
    }

    #[test]
    fn rendering() {
        let mut s = SymbolicPolynomial::zero();
        assert_eq!(s.to_string(), "0");
        s.add_term(q(-1, 4), 4, 6);
        s.add_term(q(1, 4), 4, 5);
        s.add_term(q(1, 6), 3, 3);
        assert_eq!(
            s.to_string(),
            "1/6 * ff(n,3) * p^3 + 1/4 * ff(n,4) * p^5 + -1/4 * ff(n,4) * p^6"
        );
        let mut m = MonomialPolynomial::default();
        m.add_term(q(2, 1), 2, 3);
        assert_eq!(m.to_string(), "2/1 * n^2 * p^3");
    }

    #[test]
    fn ppoly_ring_ops() {
        let a = PPoly::power(2) - PPoly::power(3);
        let b = a.clone() * a.clone();
        assert_eq!(b.coefficient(5), q(-2, 1));
        assert!((a.clone() - a).is_zero());
    }
}
