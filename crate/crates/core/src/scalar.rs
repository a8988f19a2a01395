//! Field-like scalars accepted by the coordinate flows.
//!
//! The same flip/rotation formulas are evaluated on exact rationals, on
//! doubles (to thread points through the quantum representation) and on
//! [`LogDual`] numbers to obtain exact log-coordinate Jacobians.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub trait Scalar:
    Clone + std::fmt::Debug + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn one() -> Self;

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for Q {
    fn one() -> Self {
        <Q as One>::one()
    }
}

impl Scalar for f64 {
    fn one() -> Self {
        1.0
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_q(s: &str) -> crate::Result<Q> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A positive rational value together with its exact gradient with respect
/// to the logarithms of a fixed set of input variables.
///
/// For an input variable `x_j` the gradient is `x_j e_j`; after evaluating a
/// map, `grad / value` is the row of the log-coordinate Jacobian.
#[derive(Clone, Debug, PartialEq)]
pub struct LogDual {
    pub value: Q,
    pub grad: Vec<Q>,
}

impl LogDual {
    pub fn variable(value: Q, index: usize, n: usize) -> Self {
        let mut grad = vec![Q::zero(); n];
        grad[index] = value.clone();
        Self { value, grad }
    }

    pub fn constant(value: Q, n: usize) -> Self {
        Self {
            value,
            grad: vec![Q::zero(); n],
        }
    }

    /// Row of `d ln(self) / d ln(inputs)`.
    pub fn log_gradient(&self) -> Vec<Q> {
        self.grad.iter().map(|g| g / &self.value).collect()
    }

    fn width(&self, other: &Self) -> usize {
        self.grad.len().max(other.grad.len())
    }

    fn g(&self, i: usize) -> Q {
        self.grad.get(i).cloned().unwrap_or_else(Q::zero)
    }
}

impl Add for LogDual {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.width(&rhs);
        let grad = (0..n).map(|i| self.g(i) + rhs.g(i)).collect();
        Self {
            value: self.value + rhs.value,
            grad,
        }
    }
}

impl Sub for LogDual {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.width(&rhs);
        let grad = (0..n).map(|i| self.g(i) - rhs.g(i)).collect();
        Self {
            value: self.value - rhs.value,
            grad,
        }
    }
}

impl Neg for LogDual {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            grad: self.grad.into_iter().map(|g| -g).collect(),
        }
    }
}

impl Mul for LogDual {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        let n = self.width(&rhs);
        let grad = (0..n)
            .map(|i| self.g(i) * &rhs.value + &self.value * rhs.g(i))
            .collect();
        Self {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Div for LogDual {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let n = self.width(&rhs);
        let denom = &rhs.value * &rhs.value;
        let grad = (0..n)
            .map(|i| (self.g(i) * &rhs.value - &self.value * rhs.g(i)) / &denom)
            .collect();
        Self {
            value: self.value / rhs.value,
            grad,
        }
    }
}

impl Scalar for LogDual {
    fn one() -> Self {
        Self::constant(<Q as One>::one(), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("6/4").unwrap(), q(3, 2));
        assert_eq!(parse_q(" 7 ").unwrap(), qi(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(format_q(&q(10, 4)), "5/2");
        assert_eq!(format_q(&qi(-3)), "-3");
    }

    #[test]
    fn log_dual_of_ptolemy_expression() {
        // ln((ac+bd)/e) at a=1,b=2,c=3,d=4,e=5
        let v = |x: i64, i| LogDual::variable(qi(x), i, 5);
        let (a, b, c, d, e) = (v(1, 0), v(2, 1), v(3, 2), v(4, 3), v(5, 4));
        let out = (a * c + b * d) / e;
        assert_eq!(out.value, q(11, 5));
        assert_eq!(
            out.log_gradient(),
            vec![q(3, 11), q(8, 11), q(3, 11), q(8, 11), qi(-1)]
        );
    }
}
