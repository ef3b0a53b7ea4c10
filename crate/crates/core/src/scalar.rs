//! Scalar abstractions.
//!
//! Floating-point code is generic over [`Real`] (implemented for `f32` and
//! `f64`). The partition-sum machinery only needs ring operations and is
//! generic over [`Ring`], which is also implemented for exact rationals and
//! for polynomials in `p`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, NumCast, One, Zero};

/// Floating point: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; used for literals.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("literal fits")
    }

    fn from_count(n: u64) -> Self {
        <Self as NumCast>::from(n).expect("count fits")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<F> {
    sum: F,
    compensation: F,
}

impl<F: Real> CompensatedSum<F> {
    pub fn new() -> Self {
        Self {
            sum: F::zero(),
            compensation: F::zero(),
        }
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> F {
        self.sum + self.compensation
    }
}

impl<F: Real> Sum<F> for CompensatedSum<F> {
    fn sum<I: Iterator<Item = F>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<F: Real, I: IntoIterator<Item = F>>(terms: I) -> F {
    terms.into_iter().sum::<CompensatedSum<F>>().value()
}

/// Commutative ring with an embedding of the integers.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    /// Sums a sequence of ring elements. Floating-point rings override this
    /// with compensated accumulation.
    fn sum_all<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }
}

macro_rules! impl_float_ring {
    ($f:ty) => {
        impl Ring for $f {
            fn from_i64(v: i64) -> Self {
                v as $f
            }

            fn sum_all<I: IntoIterator<Item = Self>>(terms: I) -> Self {
                compensated_sum(terms)
            }
        }
    };
}

impl_float_ring!(f32);
impl_float_ring!(f64);

impl Ring for Ratio<i64> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }
}

impl Ring for Ratio<i128> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
}

impl Ring for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let terms = [1.0e16f64, 1.0, -1.0e16, 1.0];
        assert_eq!(compensated_sum(terms), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (1..100).map(|i| 1.0 / i as f64).collect();
        let mut a = CompensatedSum::new();
        let mut b = CompensatedSum::new();
        for (i, &x) in xs.iter().enumerate() {
            if i % 2 == 0 {
                a.add(x)
            } else {
                b.add(x)
            }
        }
        a.merge(&b);
        assert!((a.value() - compensated_sum(xs.iter().copied())).abs() < 1e-15);
    }
}
