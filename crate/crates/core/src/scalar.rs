//! Scalar backends: exact rationals and IEEE-754 doubles.
//!
//! Every algebraic routine in the crate is generic over [`Scalar`], so the
//! same code path runs exactly on rational inputs (where `d∘d = 0` and the
//! Jacobi identity can be checked with no rounding) and in floating point
//! when an irrational parameter such as `√15/8` is involved.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Field element used by forms, brackets and matrices.
pub trait Scalar:
    nalgebra::Scalar
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + nalgebra::ClosedAddAssign
    + nalgebra::ClosedSubAssign
    + nalgebra::ClosedMulAssign
    + PartialOrd
    + Send
    + Sync
{
    /// `true` for backends where arithmetic is exact.
    const EXACT: bool;
    /// Short backend name used in reports.
    const NAME: &'static str;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Lossless for rationals (the binary value of `v`), identity for floats.
    fn from_f64(v: f64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Zero test: exact for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Text form that re-parses to the same value.
    fn to_exact_string(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }
    fn to_exact_string(&self) -> String {
        // Rust's shortest round-trip formatting
        format!("{self:?}")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn to_exact_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal.
///
/// Fractions and integers yield exact values; anything with a decimal point
/// or exponent is a float.
pub fn parse_number(text: &str) -> Option<Number> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Number::Exact(BigRational::new(p, q)));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Some(Number::Exact(BigRational::from_integer(n)));
    }
    let v: f64 = t.parse().ok()?;
    v.is_finite().then_some(Number::Float(v))
}

/// A user-supplied number before a backend has been chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    pub fn to_scalar<S: Scalar>(&self) -> S {
        match self {
            Number::Exact(q) => S::from_rational(q),
            Number::Float(v) => S::from_f64(*v),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => Scalar::to_f64(q),
            Number::Float(v) => *v,
        }
    }
}

impl From<i64> for Number {
    fn from(v: i64) -> Self {
        Number::Exact(<Rational as Scalar>::from_i64(v))
    }
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        Number::Float(v)
    }
}

impl std::fmt::Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Exact(q) => f.write_str(&q.to_exact_string()),
            Number::Float(v) => f.write_str(&v.to_exact_string()),
        }
    }
}

/// Shorthand for `S::from_ratio`.
pub fn q<S: Scalar>(num: i64, den: i64) -> S {
    S::from_ratio(num, den)
}
